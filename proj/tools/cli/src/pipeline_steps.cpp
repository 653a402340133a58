#include "pipeline_steps.hpp"

#include <chrono>
#include <fstream>

#include "ecp/aes.hpp"
#include "ecp/conformal.hpp"
#include "ecp/errors.hpp"
#include "ecp/figures.hpp"
#include "ecp/model_io.hpp"
#include "ecp/split.hpp"

namespace ecp::cli {

namespace fs = std::filesystem;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::string sizes_string(const SizeHistogram& h) {
  std::string s;
  for (std::size_t k = 0; k < h.size(); ++k) {
    if (k) s += ' ';
    s += std::to_string(h[k]);
  }
  return s;
}

TrainOutcome train_repeats(const DataPair& d, const TrainSpec& spec, const fs::path& out, Io io) {
  if (spec.repeats == 0) throw Error(ErrorKind::config, "--repeats must be at least 1");
  const auto t0 = std::chrono::steady_clock::now();
  const Eigen::MatrixXf xtr = normalize_columns(d.train);
  const Eigen::MatrixXf xte = normalize_columns(d.test);
  std::ofstream trace(out / "train_trace.csv", std::ios::binary);
  if (!trace) throw Error(ErrorKind::io, "cannot create " + (out / "train_trace.csv").string());
  trace << "repeat,epoch,mean_loss,train_accuracy,test_accuracy\n";
  trace.precision(9);

  TrainOutcome result{MlpModel{}, {}, {}, 0.0};
  for (std::size_t r = 0; r < spec.repeats; ++r) {
    TrainConfig cfg = spec.cfg;
    cfg.seed = spec.cfg.seed + r;
    MlpModel start = spec.init ? *spec.init : init_model(spec.arch, cfg.seed);
    TrainResult tr = train(std::move(start), xtr, d.train.labels(), cfg, [&](const EpochStats& s, const MlpModel& m) {
      const double acc = accuracy(m, xte, d.test.labels());
      trace << r << ',' << s.epoch << ',' << s.mean_loss << ',' << s.accuracy << ',' << acc << '\n';
      io.err << "[" << spec.label << " r" << r << "] epoch " << s.epoch << "/" << cfg.epochs << " loss "
             << s.mean_loss << " train_acc " << s.accuracy << " test_acc " << acc << " (" << seconds_since(t0)
             << " s)\n";
    });
    const double acc = accuracy(tr.model, xte, d.test.labels());
    result.accuracies.push_back(acc);
    if (r == 0) {
      save_model(tr.model, out / "model.ecpm");
      result.model = std::move(tr.model);
    }
    if (spec.repeats > 1) save_model(r == 0 ? result.model : tr.model, out / ("model_r" + std::to_string(r) + ".ecpm"));
  }
  if (!trace) throw Error(ErrorKind::io, "short write on train_trace.csv");
  result.summary = mean_std(result.accuracies);
  result.seconds = seconds_since(t0);
  return result;
}

ConformalOutcome run_conformal(const MlpModel& model, const ImageSet& test, const ConformalSpec& spec,
                               const fs::path& out, Io io) {
  const SplitPair split = split_test(test, spec.split_seed);
  const Eigen::MatrixXd cal_all = candidate_scores(model, split.calibration);
  const std::vector<double> cal_true = true_label_scores(cal_all, split.calibration.labels());
  const CalibrationScores cal(cal_true, spec.source);
  const Eigen::MatrixXd test_scores = candidate_scores(model, split.cp_test);

  ConformalOutcome c;
  c.calibration_n = cal.n();
  c.calibration_mean = cal.mean();
  write_scores_csv(cal_true, out / "calibration_scores.csv");
  c.files.push_back(out / "calibration_scores.csv");
  const LossPlotFiles lp = loss_plots(cal, out, spec.bins);
  c.files.push_back(lp.histogram);
  c.files.push_back(lp.sorted);

  auto run_rule = [&](const Rule& rule, const std::string& stem) {
    const double threshold = threshold_for(cal, rule);
    std::vector<PredictionSet> sets = predict_sets(test_scores, threshold, rule);
    for (std::size_t i = 0; i < sets.size(); ++i) sets[i].example_id = split.cp_test_indices[i];
    PredictionReport report = make_report(sets, split.cp_test.labels(), !spec.summary);
    write_report(report, out, stem);
    c.files.push_back(out / (stem + ".txt"));
    c.files.push_back(out / (stem + "_sizes.csv"));
    if (!spec.summary) c.files.push_back(out / (stem + "_sets.csv"));
    io.out << render_table(report);
    return std::make_pair(std::move(report), std::move(sets));
  };

  std::vector<PredictionSet> e_sets, p_sets;
  if (spec.run_e) {
    c.e_factor = e_factor(spec.alpha, cal.n());
    auto [report, sets] = run_rule(Rule::e_value(spec.alpha), "e_rule");
    c.e = std::move(report);
    e_sets = std::move(sets);
  }
  if (spec.run_p) {
    c.p_rank = p_rank(cal.n(), spec.epsilon);
    auto [report, sets] = run_rule(Rule::p_value(spec.epsilon), "p_rule");
    c.p = std::move(report);
    p_sets = std::move(sets);
  }
  if (spec.run_e && spec.run_p) {
    bool inside = true;
    for (std::size_t i = 0; i < p_sets.size(); ++i) inside = inside && (p_sets[i].labels & ~e_sets[i].labels) == 0;
    c.p_within_e = inside;
  }
  return c;
}

void add_conformal_results(Manifest& m, const ConformalOutcome& c) {
  m.set("result.calibration_n", c.calibration_n);
  m.set("result.calibration_mean", c.calibration_mean);
  if (c.e) {
    m.set("result.e.factor", c.e_factor);
    m.set("result.e.threshold", c.e->threshold);
    m.set("result.e.hits", c.e->coverage_count);
    m.set("result.e.coverage", c.e->coverage_fraction());
    m.set("result.e.sizes", sizes_string(c.e->size_histogram));
  }
  if (c.p) {
    m.set("result.p.rank", c.p_rank);
    m.set("result.p.threshold", c.p->threshold);
    m.set("result.p.hits", c.p->coverage_count);
    m.set("result.p.coverage", c.p->coverage_fraction());
    m.set("result.p.sizes", sizes_string(c.p->size_histogram));
  }
  if (c.p_within_e) m.set("result.p_within_e", *c.p_within_e);
}

std::vector<fs::path> digit_figure(const ImageSet& plain_train, std::size_t index, const std::vector<Regime>& regimes,
                                   const CipherConfig& base, std::uint64_t cipher_seed, const fs::path& out) {
  if (index >= plain_train.count()) {
    throw Error(ErrorKind::index, "--index " + std::to_string(index) + " is outside the training set");
  }
  std::vector<fs::path> files;
  const std::string stem = "digit_" + std::to_string(index) + "_";
  const auto img = plain_train.image(index);
  files.push_back(out / (stem + "plaintext.pgm"));
  render_digit(img, files.back());
  for (Regime r : regimes) {
    if (r == Regime::plaintext) continue;
    KeyIv k{base.key, base.iv};
    if (r == Regime::per_sample) k = per_sample_key(per_sample_stream_seed(cipher_seed, false), index);
    const std::vector<std::uint8_t> ct = aes128_cbc_encrypt(img, k.key, k.iv);
    files.push_back(out / (stem + std::string(to_string(r)) + ".pgm"));
    render_digit(ct, files.back());
  }
  return files;
}

TsneOutcome tsne_figure(const ImageSet& plain_train, Regime regime, std::size_t samples, const TsneConfig& cfg,
                        const CipherConfig& base, std::uint64_t cipher_seed, const fs::path& out, Io io) {
  const auto t0 = std::chrono::steady_clock::now();
  const ImageSet subset = apply_regime(plain_train.head(std::min(samples, plain_train.count())), regime, base,
                                       cipher_seed, false);
  io.err << "t-SNE " << to_string(regime) << ": " << subset.count() << " points\n";
  const Embedding2D emb = tsne(image_rows(subset), subset.labels(), cfg);
  TsneOutcome t;
  t.file = out / ("tsne_" + std::string(to_string(regime)) + ".csv");
  write_embedding_csv(emb, t.file);
  t.ratio = intra_inter_ratio(emb.points, emb.labels);
  t.kl = emb.kl_trace.empty() ? 0.0 : emb.kl_trace.back().second;
  t.seconds = seconds_since(t0);
  io.out << "tsne " << to_string(regime) << ": intra/inter ratio " << t.ratio << " KL " << t.kl << " ("
         << t.seconds << " s)\n";
  return t;
}

}  // namespace ecp::cli
