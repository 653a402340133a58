#include <CLI11.hpp>

#include <algorithm>

#include "commands.hpp"
#include "ecp/errors.hpp"
#include "ecp_cli/cli.hpp"

namespace ecp::cli {

namespace {

void add_data_options(CLI::App* sub, DataOptions& d) {
  sub->add_option("--mnist", d.mnist, "Directory with the MNIST IDX files")->capture_default_str();
  sub->add_option("--data", d.data, "plaintext, fixed, per-sample, or a directory written by `encrypt`")
      ->capture_default_str();
  sub->add_option("--key", d.key, "AES key: 16 characters or hex:<32 digits>")->capture_default_str();
  sub->add_option("--iv", d.iv, "CBC IV: 16 characters or hex:<32 digits>")->capture_default_str();
  sub->add_option("--cipher-seed", d.cipher_seed, "Seed of the per-sample key stream")->capture_default_str();
}

bool mentions(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(),
                     [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

// Appends config-file entries for options the command line leaves unset, so
// flags win over the file and the file wins over built-in defaults.
std::vector<std::string> merge_config(CLI::App& app, std::vector<std::string> args) {
  CLI::App* sub = nullptr;
  for (const auto& a : args) {
    if (!a.empty() && a[0] != '-') {
      sub = app.get_subcommand_no_throw(a);
      break;
    }
  }
  if (!sub) return args;
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  const Manifest cfg = Manifest::read(path);
  if (const auto cmd = cfg.get("command"); cmd && *cmd != sub->get_name()) {
    throw Error(ErrorKind::config, path + " was written by `" + *cmd + "`, not `" + sub->get_name() + "`");
  }
  for (const auto& [k, v] : cfg.entries()) {
    if (k == "command" || k == "config" || k.find('.') != std::string::npos) continue;  // results, hashes
    const std::string flag = "--" + k;
    if (!sub->get_option_no_throw(flag)) throw Error(ErrorKind::config, path + ": unknown key '" + k + "'");
    if (mentions(args, flag) || v.empty()) continue;
    args.push_back(flag + "=" + v);
  }
  return args;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Conformal prediction on encrypted MNIST", "ecp"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ecp 0.1.0");
  std::string config;

  EncryptOptions enc;
  auto* s_enc = app.add_subcommand("encrypt", "Encrypt MNIST into dataset containers");
  s_enc->add_option("--mnist", enc.mnist, "Directory with the MNIST IDX files")->capture_default_str();
  s_enc->add_option("--out", enc.out, "Output directory")->capture_default_str();
  s_enc->add_option("--mode", enc.mode, "fixed, per-sample, or none")->capture_default_str();
  s_enc->add_option("--key", enc.key, "AES key: 16 characters or hex:<32 digits>")->capture_default_str();
  s_enc->add_option("--iv", enc.iv, "CBC IV: 16 characters or hex:<32 digits>")->capture_default_str();
  s_enc->add_option("--seed", enc.seed, "Per-sample key stream seed")->capture_default_str();

  TrainOptions tr;
  auto* s_tr = app.add_subcommand("train", "Train the classifier");
  add_data_options(s_tr, tr.data);
  s_tr->add_option("--out", tr.out, "Output directory")->capture_default_str();
  s_tr->add_option("--epochs", tr.epochs)->capture_default_str();
  s_tr->add_option("--batch-size", tr.batch_size)->capture_default_str();
  s_tr->add_option("--lr", tr.lr, "Learning rate")->capture_default_str();
  s_tr->add_option("--optimizer", tr.optimizer, "sgd or sgd-momentum")->capture_default_str();
  s_tr->add_option("--momentum", tr.momentum)->capture_default_str();
  s_tr->add_option("--seed", tr.seed, "Initialisation and shuffling seed")->capture_default_str();
  s_tr->add_option("--arch", tr.arch, "Layer widths, input first")->capture_default_str();
  s_tr->add_option("--arch-id", tr.arch_id)->capture_default_str();
  s_tr->add_option("--repeats", tr.repeats, "Independent runs with seeds seed, seed+1, ...")->capture_default_str();
  s_tr->add_option("--init-model", tr.init_model, "Continue training from this model file");
  s_tr->add_option("--train-limit", tr.train_limit, "Use only the first N training images (0 = all)")
      ->capture_default_str();

  ConformalOptions cp;
  auto* s_cp = app.add_subcommand("conformal", "Calibrate and build prediction sets");
  add_data_options(s_cp, cp.data);
  s_cp->add_option("--out", cp.out, "Output directory")->capture_default_str();
  s_cp->add_option("--model", cp.model, "Model file from `train`")->capture_default_str();
  s_cp->add_option("--rule", cp.rule, "e, p, or both")->capture_default_str();
  s_cp->add_option("--alpha", cp.alpha, "e-rule level")->capture_default_str();
  s_cp->add_option("--epsilon", cp.epsilon, "p-rule significance")->capture_default_str();
  s_cp->add_option("--split-seed", cp.split_seed, "Calibration/test split seed")->capture_default_str();
  s_cp->add_flag("--summary", cp.summary, "Omit per-example records");
  s_cp->add_option("--bins", cp.bins, "Calibration histogram bins")->capture_default_str();

  VizOptions vz;
  auto* s_vz = app.add_subcommand("viz", "Write figure data (t-SNE, digit rasters, calibration curves)");
  add_data_options(s_vz, vz.data);
  s_vz->add_option("--out", vz.out, "Output directory")->capture_default_str();
  s_vz->add_option("--figure", vz.figure, "tsne, digit, calibration, or all")->capture_default_str();
  s_vz->add_option("--regime", vz.regime, "plaintext, fixed, per-sample, or all")->capture_default_str();
  s_vz->add_option("--index", vz.index, "Training image shown by the digit figure")->capture_default_str();
  s_vz->add_option("--samples", vz.samples, "Leading training images embedded by t-SNE")->capture_default_str();
  s_vz->add_option("--perplexity", vz.perplexity)->capture_default_str();
  s_vz->add_option("--iterations", vz.iterations)->capture_default_str();
  s_vz->add_option("--tsne-seed", vz.tsne_seed)->capture_default_str();
  s_vz->add_option("--model", vz.model, "Model file for the calibration figure")->capture_default_str();
  s_vz->add_option("--split-seed", vz.split_seed)->capture_default_str();
  s_vz->add_option("--bins", vz.bins)->capture_default_str();

  ValidateOptions va;
  auto* s_va = app.add_subcommand("validate", "Run the cipher, Monte Carlo and gradient suites");
  s_va->add_option("--out", va.out, "Output directory")->capture_default_str();
  s_va->add_option("--trials", va.trials, "Monte Carlo trials per configuration")->capture_default_str();
  s_va->add_option("--seed", va.seed)->capture_default_str();
  s_va->add_option("--inject-fault", va.inject_fault)->group("");

  ReproduceOptions rp;
  auto* s_rp = app.add_subcommand("reproduce-paper", "Run the whole experiment end to end");
  s_rp->add_option("--mnist", rp.mnist, "Directory with the MNIST IDX files")->capture_default_str();
  s_rp->add_option("--out", rp.out, "Output directory")->capture_default_str();
  s_rp->add_option("--epochs", rp.epochs)->capture_default_str();
  s_rp->add_option("--tsne-samples", rp.tsne_samples)->capture_default_str();
  s_rp->add_option("--tsne-iterations", rp.tsne_iterations)->capture_default_str();
  s_rp->add_option("--trials", rp.trials)->capture_default_str();
  s_rp->add_option("--train-limit", rp.train_limit)->capture_default_str();
  s_rp->add_option("--seed", rp.seed)->capture_default_str();

  for (auto* sub : {s_enc, s_tr, s_cp, s_vz, s_va, s_rp}) {
    sub->add_option("--config", config, "key=value file; command-line flags take precedence");
  }

  const Io io{out, err};
  try {
    std::vector<std::string> argv = merge_config(app, args);
    std::reverse(argv.begin(), argv.end());
    try {
      app.parse(argv);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? 0 : exit_code_for(ErrorKind::config);
    }
    if (s_enc->parsed()) return cmd_encrypt(enc, io);
    if (s_tr->parsed()) return cmd_train(tr, io);
    if (s_cp->parsed()) return cmd_conformal(cp, io);
    if (s_vz->parsed()) return cmd_viz(vz, io);
    if (s_va->parsed()) return cmd_validate(va, io);
    if (s_rp->parsed()) return cmd_reproduce(rp, io);
    return exit_code_for(ErrorKind::config);
  } catch (const Error& e) {
    err << "ecp: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "ecp: internal error: " << e.what() << "\n";
    return 70;
  }
}

}  // namespace ecp::cli
