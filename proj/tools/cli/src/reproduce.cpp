#include <fstream>
#include <iomanip>
#include <sstream>

#include "commands.hpp"
#include "ecp/errors.hpp"
#include "ecp/figures.hpp"
#include "pipeline_steps.hpp"

namespace ecp::cli {

namespace fs = std::filesystem;

namespace {

struct Row {
  std::string metric;
  std::string measured;
  std::string reference;
};

std::string num(double v, int prec = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(prec) << v;
  return os.str();
}

}  // namespace

// Runs every step of the experiment end to end with default settings.
int cmd_reproduce(const ReproduceOptions& o, Io io) {
  const fs::path out(o.out);
  fs::create_directories(out);
  DataPair plain = load_mnist(o.mnist);
  if (o.train_limit > 0 && o.train_limit < plain.train.count()) plain.train = plain.train.head(o.train_limit);
  const CipherConfig base;

  Manifest m;
  m.set("command", "reproduce-paper");
  m.set("mnist", o.mnist);
  m.set("out", o.out);
  m.set("epochs", o.epochs);
  m.set("tsne-samples", o.tsne_samples);
  m.set("tsne-iterations", o.tsne_iterations);
  m.set("trials", o.trials);
  m.set("train-limit", o.train_limit);
  m.set("seed", o.seed);
  m.set("input.train_fingerprint", hex64(plain.train.fingerprint()));
  m.set("input.test_fingerprint", hex64(plain.test.fingerprint()));

  std::vector<Row> rows;
  std::optional<MlpModel> fixed_model;
  std::optional<DataPair> fixed_data;
  const std::pair<Regime, const char*> regimes[] = {
      {Regime::plaintext, "0.9811"}, {Regime::fixed, "0.3688"}, {Regime::per_sample, "0.0956"}};
  for (const auto& [regime, reference] : regimes) {
    const std::string name(to_string(regime));
    const fs::path dir = out / name;
    fs::create_directories(dir);
    DataPair d = make_regime(plain, regime, base, o.seed);
    TrainSpec spec;
    spec.cfg.epochs = o.epochs;
    spec.cfg.seed = o.seed;
    spec.label = name;
    const TrainOutcome t = train_repeats(d, spec, dir, io);
    m.set("result." + name + ".test_accuracy", t.accuracies.front());
    m.set("result." + name + ".seconds", t.seconds);
    record_output(m, dir / "model.ecpm");
    rows.push_back({"test accuracy, " + name, num(t.accuracies.front()), reference});
    io.out << name << " test accuracy " << num(t.accuracies.front()) << " (" << num(t.seconds, 1) << " s)\n";
    if (regime == Regime::fixed) {
      fixed_model = t.model;
      fixed_data = std::move(d);
    }
  }

  const fs::path cp_dir = out / "conformal";
  fs::create_directories(cp_dir);
  ConformalSpec cs;
  cs.split_seed = o.seed;
  cs.source = "fixed";
  const ConformalOutcome c = run_conformal(*fixed_model, fixed_data->test, cs, cp_dir, io);
  add_conformal_results(m, c);
  for (const auto& f : c.files) record_output(m, f);
  rows.push_back({"calibration mean score", num(c.calibration_mean), "-"});
  rows.push_back({"e-rule factor", num(c.e_factor, 9), "2.500750225"});
  rows.push_back({"e-rule threshold", num(c.e->threshold), "4.29327"});
  rows.push_back({"e-rule coverage", num(c.e->coverage_fraction()), "0.9776"});
  rows.push_back({"e-rule set sizes 0..10", sizes_string(c.e->size_histogram), "mass at sizes 7-8"});
  rows.push_back({"p-rule order statistic index", std::to_string(c.p_rank), "3000"});
  rows.push_back({"p-rule threshold", num(c.p->threshold), "1.8497"});
  rows.push_back({"p-rule coverage", num(c.p->coverage_fraction()), "0.593"});
  rows.push_back({"p-rule set sizes 0..10", sizes_string(c.p->size_histogram), "mode 2, none >= 6"});

  const fs::path fig = out / "figures";
  fs::create_directories(fig);
  for (const auto& f : digit_figure(plain.train, 0, {Regime::fixed, Regime::per_sample}, base, o.seed, fig))
    record_output(m, f);
  TsneConfig tc;
  tc.iterations = o.tsne_iterations;
  tc.seed = o.seed;
  for (const auto& [regime, reference] : regimes) {
    (void)reference;
    const TsneOutcome t = tsne_figure(plain.train, regime, o.tsne_samples, tc, base, o.seed, fig, io);
    const std::string name(to_string(regime));
    m.set("result.tsne." + name + ".ratio", t.ratio);
    record_output(m, t.file);
    rows.push_back({"t-SNE intra/inter ratio, " + name, num(t.ratio), "-"});
  }

  ValidateOptions vo;
  vo.out = (out / "validate").string();
  vo.trials = o.trials;
  vo.seed = o.seed;
  const int vrc = cmd_validate(vo, io);
  m.set("result.validate", vrc == 0 ? "pass" : "fail");

  std::ostringstream summary;
  std::size_t w = 6;
  for (const auto& r : rows) w = std::max(w, r.metric.size());
  std::size_t w2 = 8;
  for (const auto& r : rows) w2 = std::max(w2, r.measured.size());
  summary << std::left << std::setw(int(w)) << "metric" << "  " << std::setw(int(w2)) << "measured"
          << "  reference\n";
  for (const auto& r : rows)
    summary << std::setw(int(w)) << r.metric << "  " << std::setw(int(w2)) << r.measured << "  " << r.reference << "\n";
  {
    std::ofstream f(out / "summary.txt", std::ios::binary);
    f << summary.str();
    if (!f) throw Error(ErrorKind::io, "cannot write summary.txt");
  }
  io.out << summary.str();
  m.write(out / "reproduce_manifest.txt");
  return vrc;
}

}  // namespace ecp::cli
