#include "commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "ecp/conformal.hpp"
#include "ecp/container.hpp"
#include "ecp/errors.hpp"
#include "ecp/evaluation.hpp"
#include "ecp/figures.hpp"
#include "ecp/model_io.hpp"
#include "ecp/split.hpp"
#include "ecp/train.hpp"
#include "ecp/tsne.hpp"
#include "pipeline_steps.hpp"

namespace ecp::cli {

namespace fs = std::filesystem;

AesBlock parse_block(const std::string& text) {
  if (text.rfind("hex:", 0) == 0) return block_from_hex(text.substr(4));
  return block_from_text(text);
}

std::string format_block(const AesBlock& b) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s = "hex:";
  for (std::uint8_t v : b) {
    s += kDigits[v >> 4];
    s += kDigits[v & 15];
  }
  return s;
}

std::uint64_t file_hash(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= std::uint8_t(buf[i]);
      h *= 0x100000001b3ull;
    }
  }
  return h;
}

void record_output(Manifest& m, const fs::path& path) {
  m.set("output." + path.filename().string(), hex64(file_hash(path)));
}

CipherConfig cipher_config(const std::string& key, const std::string& iv) {
  CipherConfig c;
  c.key = parse_block(key);
  c.iv = parse_block(iv);
  return c;
}

DataPair load_data(const DataOptions& o, std::string* description) {
  const fs::path as_dir(o.data);
  if (fs::is_directory(as_dir)) {
    Container train = read_container(as_dir / "train.ecpd");
    Container test = read_container(as_dir / "test.ecpd");
    if (train.set.provenance() != test.set.provenance()) {
      throw Error(ErrorKind::consistency, "train and test containers differ in provenance");
    }
    if (description) *description = "containers:" + as_dir.string();
    return {std::move(train.set), std::move(test.set)};
  }
  const Regime regime = parse_regime(o.data);
  if (description) *description = std::string(to_string(regime));
  return make_regime(load_mnist(o.mnist), regime, cipher_config(o.key, o.iv), o.cipher_seed);
}

void set_data_options(Manifest& m, const DataOptions& o) {
  m.set("mnist", o.mnist);
  m.set("data", o.data);
  m.set("key", format_block(parse_block(o.key)));
  m.set("iv", format_block(parse_block(o.iv)));
  m.set("cipher-seed", o.cipher_seed);
}

namespace {

void write_manifest(const Manifest& m, const fs::path& path, Io io) {
  m.write(path);
  io.err << "manifest: " << path.string() << "\n";
}

}  // namespace

int cmd_encrypt(const EncryptOptions& o, Io io) {
  const fs::path out(o.out);
  fs::create_directories(out);
  const DataPair plain = load_mnist(o.mnist);
  Regime regime;
  std::uint8_t mode;
  if (o.mode == "none") {
    regime = Regime::plaintext;
    mode = 0xff;
  } else if (o.mode == "fixed") {
    regime = Regime::fixed;
    mode = std::uint8_t(CipherMode::fixed);
  } else if (o.mode == "per-sample") {
    regime = Regime::per_sample;
    mode = std::uint8_t(CipherMode::per_sample);
  } else {
    throw Error(ErrorKind::config, "--mode must be fixed, per-sample or none");
  }
  const CipherConfig base = cipher_config(o.key, o.iv);
  const DataPair enc = make_regime(plain, regime, base, o.seed);
  const bool per_sample = regime == Regime::per_sample;
  write_container(out / "train.ecpd", enc.train, mode, per_sample ? per_sample_stream_seed(o.seed, false) : 0);
  write_container(out / "test.ecpd", enc.test, mode, per_sample ? per_sample_stream_seed(o.seed, true) : 0);

  Manifest m;
  m.set("command", "encrypt");
  m.set("mnist", o.mnist);
  m.set("out", o.out);
  m.set("mode", o.mode);
  m.set("key", format_block(base.key));
  m.set("iv", format_block(base.iv));
  m.set("seed", o.seed);
  m.set("input.train_fingerprint", hex64(plain.train.fingerprint()));
  m.set("input.test_fingerprint", hex64(plain.test.fingerprint()));
  m.set("result.train_count", enc.train.count());
  m.set("result.test_count", enc.test.count());
  record_output(m, out / "train.ecpd");
  record_output(m, out / "test.ecpd");
  write_manifest(m, out / "encrypt_manifest.txt", io);
  io.out << "encrypted " << enc.train.count() << " train and " << enc.test.count() << " test images ("
         << o.mode << ") into " << out.string() << "\n";
  return 0;
}

int cmd_train(const TrainOptions& o, Io io) {
  const fs::path out(o.out);
  fs::create_directories(out);
  std::string desc;
  DataPair d = load_data(o.data, &desc);
  if (o.train_limit > 0 && o.train_limit < d.train.count()) d.train = d.train.head(o.train_limit);

  TrainSpec spec;
  spec.cfg.epochs = o.epochs;
  spec.cfg.batch_size = o.batch_size;
  spec.cfg.learning_rate = o.lr;
  spec.cfg.optimizer = parse_optimizer(o.optimizer);
  spec.cfg.momentum = o.momentum;
  spec.cfg.seed = o.seed;
  spec.arch = parse_architecture(o.arch, o.arch_id);
  if (!o.init_model.empty()) {
    spec.init = load_model(o.init_model);
    spec.arch = spec.init->architecture();
  }
  spec.repeats = o.repeats;
  spec.label = desc;

  const TrainOutcome t = train_repeats(d, spec, out, io);

  Manifest m;
  m.set("command", "train");
  set_data_options(m, o.data);
  m.set("out", o.out);
  m.set("epochs", o.epochs);
  m.set("batch-size", o.batch_size);
  m.set("lr", o.lr);
  m.set("optimizer", o.optimizer);
  m.set("momentum", o.momentum);
  m.set("seed", o.seed);
  m.set("arch", format_dims(spec.arch));
  m.set("arch-id", spec.arch.arch_id);
  m.set("repeats", o.repeats);
  m.set("init-model", o.init_model);
  m.set("train-limit", o.train_limit);
  m.set("input.train_fingerprint", hex64(d.train.fingerprint()));
  m.set("input.test_fingerprint", hex64(d.test.fingerprint()));
  for (std::size_t r = 0; r < t.accuracies.size(); ++r) m.set("result.test_accuracy.r" + std::to_string(r), t.accuracies[r]);
  m.set("result.test_accuracy_mean", t.summary.mean);
  m.set("result.test_accuracy_std", t.summary.stddev);
  m.set("result.seconds", t.seconds);
  record_output(m, out / "model.ecpm");
  record_output(m, out / "train_trace.csv");
  write_manifest(m, out / "train_manifest.txt", io);

  io.out << "data=" << desc << " test_accuracy=" << std::fixed << std::setprecision(4) << t.accuracies.front();
  if (t.accuracies.size() > 1) {
    io.out << " repeats=" << t.accuracies.size() << " mean=" << t.summary.mean << " std=" << t.summary.stddev;
  }
  io.out << "\n";
  io.out.unsetf(std::ios::floatfield);
  return 0;
}

int cmd_conformal(const ConformalOptions& o, Io io) {
  if (o.rule != "e" && o.rule != "p" && o.rule != "both") throw Error(ErrorKind::config, "--rule must be e, p or both");
  const fs::path out(o.out);
  fs::create_directories(out);
  std::string desc;
  const DataPair d = load_data(o.data, &desc);
  const MlpModel model = load_model(o.model);

  ConformalSpec spec;
  spec.alpha = o.alpha;
  spec.epsilon = o.epsilon;
  spec.run_e = o.rule != "p";
  spec.run_p = o.rule != "e";
  spec.split_seed = o.split_seed;
  spec.summary = o.summary;
  spec.bins = o.bins;
  spec.source = desc;
  const ConformalOutcome c = run_conformal(model, d.test, spec, out, io);

  Manifest m;
  m.set("command", "conformal");
  set_data_options(m, o.data);
  m.set("out", o.out);
  m.set("model", o.model);
  m.set("rule", o.rule);
  m.set("alpha", o.alpha);
  m.set("epsilon", o.epsilon);
  m.set("split-seed", o.split_seed);
  m.set("summary", o.summary);
  m.set("bins", o.bins);
  m.set("input.model_hash", hex64(file_hash(o.model)));
  m.set("input.test_fingerprint", hex64(d.test.fingerprint()));
  add_conformal_results(m, c);
  for (const auto& f : c.files) record_output(m, f);
  write_manifest(m, out / "conformal_manifest.txt", io);
  return 0;
}

int cmd_viz(const VizOptions& o, Io io) {
  const bool all = o.figure == "all";
  if (!all && o.figure != "tsne" && o.figure != "digit" && o.figure != "calibration") {
    throw Error(ErrorKind::config, "--figure must be tsne, digit, calibration or all");
  }
  std::vector<Regime> regimes;
  if (o.regime == "all") {
    regimes = {Regime::plaintext, Regime::fixed, Regime::per_sample};
  } else {
    regimes = {parse_regime(o.regime)};
  }
  const fs::path out(o.out);
  fs::create_directories(out);
  const CipherConfig base = cipher_config(o.data.key, o.data.iv);

  Manifest m;
  m.set("command", "viz");
  set_data_options(m, o.data);
  m.set("out", o.out);
  m.set("figure", o.figure);
  m.set("regime", o.regime);
  m.set("index", o.index);
  m.set("samples", o.samples);
  m.set("perplexity", o.perplexity);
  m.set("iterations", o.iterations);
  m.set("tsne-seed", o.tsne_seed);
  m.set("model", o.model);
  m.set("split-seed", o.split_seed);
  m.set("bins", o.bins);

  std::vector<fs::path> files;
  std::optional<DataPair> plain;
  auto mnist = [&]() -> const DataPair& {
    if (!plain) plain = load_mnist(o.data.mnist);
    return *plain;
  };

  if (all || o.figure == "digit") {
    for (const auto& f : digit_figure(mnist().train, o.index, regimes, base, o.data.cipher_seed, out)) files.push_back(f);
  }
  if (all || o.figure == "calibration") {
    std::string desc;
    const DataPair d = load_data(o.data, &desc);
    const MlpModel model = load_model(o.model);
    const SplitPair split = split_test(d.test, o.split_seed);
    const CalibrationScores cal = calibrate(model, split.calibration, desc);
    const LossPlotFiles lp = loss_plots(cal, out, o.bins);
    files.push_back(lp.histogram);
    files.push_back(lp.sorted);
    m.set("input.model_hash", hex64(file_hash(o.model)));
    m.set("result.calibration_mean", cal.mean());
    m.set("result.calibration_max", cal.max());
    io.out << "calibration: n=" << cal.n() << " mean=" << cal.mean() << " max=" << cal.max() << "\n";
  }
  if (all || o.figure == "tsne") {
    TsneConfig cfg;
    cfg.perplexity = o.perplexity;
    cfg.iterations = o.iterations;
    cfg.seed = o.tsne_seed;
    for (Regime r : regimes) {
      const TsneOutcome t = tsne_figure(mnist().train, r, o.samples, cfg, base, o.data.cipher_seed, out, io);
      const std::string k = "result.tsne." + std::string(to_string(r));
      m.set(k + ".ratio", t.ratio);
      m.set(k + ".kl", t.kl);
      m.set(k + ".seconds", t.seconds);
      files.push_back(t.file);
    }
  }
  for (const auto& f : files) record_output(m, f);
  write_manifest(m, out / "viz_manifest.txt", io);
  return 0;
}

}  // namespace ecp::cli
