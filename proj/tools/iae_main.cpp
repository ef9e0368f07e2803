// iae: split, train, evaluate and synthesize cascade corpora.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "iae/iae.hpp"
#include "manifest.hpp"

namespace fs = std::filesystem;

namespace {

// Maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::ofstream open_output(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw iae::IoError("cannot open for writing: " + path);
  return out;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw iae::IoError("cannot create output directory: " + dir);
}

void write_dataset(const std::string& path, const iae::CascadeDataset& d) {
  auto out = open_output(path, std::ios::binary);
  iae::write_cascade_file(out, d);
  if (!out) throw iae::IoError("failed writing " + path);
}

struct SplitArgs {
  std::string input;
  double test_frac = 0.1;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
};

int cmd_split(const SplitArgs& a) {
  if (!(a.test_frac > 0.0 && a.test_frac < 1.0)) throw UsageError("--test-frac must lie in (0, 1)");
  iae::cli::RunManifest manifest("split");
  const auto data = iae::load_cascade_file(a.input);
  if (data.cascade_count() < 2) throw UsageError("need at least 2 cascades to split");
  const auto parts = iae::split_dataset(data, a.test_frac, a.seed);

  ensure_dir(a.out_dir);
  const auto train_path = (fs::path(a.out_dir) / "train.cascades").string();
  const auto test_path = (fs::path(a.out_dir) / "test.cascades").string();
  write_dataset(train_path, parts.train);
  write_dataset(test_path, parts.test);

  manifest.config() = {{"test_frac", a.test_frac}, {"seed", a.seed}};
  manifest.add_input("input", a.input);
  manifest.add_output("train", train_path);
  manifest.add_output("test", test_path);
  manifest.write((fs::path(a.out_dir) / "split.manifest.json").string());
  std::cout << "train\t" << parts.train.cascade_count() << "\ntest\t"
            << parts.test.cascade_count() << '\n';
  return 0;
}

struct TrainArgs {
  std::string train;
  iae::TrainConfig config;
  std::string sampling = "dominant";
  std::string variant = "independent";
  std::string model_out;
  std::string log;
  std::string table_out;
};

int cmd_train(TrainArgs a) {
  a.config.sampling = iae::parse_sampling(a.sampling);
  a.config.variant = iae::parse_variant(a.variant);
  a.config.validate();
  const auto model_path = fs::weakly_canonical(a.model_out);
  for (const auto* other : {&a.log, &a.table_out, &a.train}) {
    if (!other->empty() && fs::weakly_canonical(*other) == model_path) {
      throw UsageError("--model-out conflicts with another path argument: " + *other);
    }
  }
  if (!a.log.empty() && a.log == a.table_out) throw UsageError("--log and --table-out conflict");

  iae::cli::RunManifest manifest("train");
  const auto data = iae::load_cascade_file(a.train);

  // Open outputs before the run so unwritable paths fail fast.
  auto model_stream = open_output(a.model_out, std::ios::binary);
  std::optional<std::ofstream> log_file;
  if (!a.log.empty()) log_file = open_output(a.log);
  std::ostream& log = log_file ? *log_file : std::cout;

  auto result = iae::train(data, a.config, [&](const iae::EpochStats& s) {
    log << s.epoch << '\t' << std::setprecision(17) << s.total_loss << '\t' << s.active_count
        << '\n';
  });
  if (result.warning) std::cerr << "warning: " << *result.warning << '\n';

  iae::save_model(model_stream, result.model);
  model_stream.close();
  if (!model_stream) throw iae::IoError("failed writing " + a.model_out);
  if (log_file) log_file->close();

  if (!a.table_out.empty()) {
    auto out = open_output(a.table_out);
    iae::write_table_tsv(out, iae::build_table(data, a.config.mu, a.config.sampling),
                         data.vocabulary());
  }

  const auto& c = a.config;
  manifest.config() = {{"dim", c.dimension},
                       {"epochs", c.epochs},
                       {"lr", c.learning_rate},
                       {"mu", c.mu},
                       {"kernel_time", c.kernel_time},
                       {"sampling", iae::to_string(c.sampling)},
                       {"variant", iae::to_string(c.variant)},
                       {"seed", c.seed},
                       {"threads", iae::resolve_threads(c.threads)},
                       {"table_entries", result.table_size},
                       {"epochs_run", result.history.size()}};
  manifest.add_input("train", a.train);
  manifest.add_output("model", a.model_out);
  if (!a.log.empty()) manifest.add_output("log", a.log);
  if (!a.table_out.empty()) manifest.add_output("table", a.table_out);
  manifest.write(a.model_out + ".manifest.json");

  std::cerr << "table_entries\t" << result.table_size << "\nepochs_run\t"
            << result.history.size() << '\n';
  if (!result.history.empty()) {
    std::cerr << "final_loss\t" << result.history.back().total_loss << '\n';
  }
  return 0;
}

struct EvalArgs {
  std::string model;
  std::string test;
  bool json = false;
  bool tsv = false;
  std::string out;
  unsigned threads = 0;
};

int cmd_eval(const EvalArgs& a) {
  iae::cli::RunManifest manifest("eval");
  const auto model = iae::load_model_file(a.model);
  const auto test = iae::load_cascade_file(a.test, model.vocabulary());
  if (test.cascade_count() == 0) throw UsageError("test set is empty");
  const auto report = iae::evaluate(model, test, iae::resolve_threads(a.threads));

  std::ostringstream body;
  if (a.tsv) {
    iae::write_report_tsv(body, report);
  } else {
    iae::write_report_jsonl(body, report);
  }
  std::cout << "MAP\t" << std::setprecision(17) << report.map << '\n';
  if (a.out.empty()) {
    std::cout << body.str();
    return 0;
  }
  {
    auto out = open_output(a.out);
    out << body.str();
    if (!out) throw iae::IoError("failed writing " + a.out);
  }
  manifest.config() = {{"format", a.tsv ? "tsv" : "json"}, {"map", report.map}};
  manifest.add_input("model", a.model);
  manifest.add_input("test", a.test);
  manifest.add_output("report", a.out);
  manifest.write(a.out + ".manifest.json");
  return 0;
}

struct SynthArgs {
  int sources = 5;
  int users_per_source = 20;
  int dim = 4;
  int cascades_per_source = 100;
  int len = 8;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
};

int cmd_synth(const SynthArgs& a) {
  if (a.sources < 1 || a.users_per_source < 1 || a.dim < 1 || a.cascades_per_source < 1 ||
      a.len < 1) {
    throw UsageError("counts must be >= 1");
  }
  if (a.len > a.users_per_source) throw UsageError("--len exceeds --users-per-source");
  if (!(a.noise >= 0.0 && a.noise <= 1.0)) throw UsageError("--noise must lie in [0, 1]");

  iae::cli::RunManifest manifest("synth");
  const auto world = iae::generate_world(a.sources, a.users_per_source, a.dim, a.seed, a.noise);
  // Emission uses a seed stream distinct from geometry.
  const auto data = iae::emit_cascades(world, a.cascades_per_source, a.len, a.seed ^ 0x5eedu);

  ensure_dir(a.out_dir);
  const auto cascades_path = (fs::path(a.out_dir) / "synth.cascades").string();
  const auto truth_path = (fs::path(a.out_dir) / "truth.iaem").string();
  write_dataset(cascades_path, data);
  iae::save_model_file(truth_path, world.ground_truth);

  manifest.config() = {{"sources", a.sources},     {"users_per_source", a.users_per_source},
                       {"dim", a.dim},             {"cascades_per_source", a.cascades_per_source},
                       {"len", a.len},             {"noise", a.noise},
                       {"seed", a.seed}};
  manifest.add_output("cascades", cascades_path);
  manifest.add_output("truth", truth_path);
  manifest.write((fs::path(a.out_dir) / "synth.manifest.json").string());
  std::cout << "cascades\t" << data.cascade_count() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Independent asymmetric embedding for cascade prediction"};
  app.require_subcommand(1);

  SplitArgs split;
  auto* split_cmd = app.add_subcommand("split", "Split a cascade file into train/test");
  split_cmd->add_option("--input", split.input, "Cascade file")->required();
  split_cmd->add_option("--test-frac", split.test_frac, "Fraction of cascades for test");
  split_cmd->add_option("--seed", split.seed);
  split_cmd->add_option("--out-dir", split.out_dir);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Learn latent spaces from training cascades");
  train_cmd->add_option("--train", train.train, "Training cascade file")->required();
  train_cmd->add_option("--dim", train.config.dimension, "Latent dimension")->capture_default_str();
  train_cmd->add_option("--epochs", train.config.epochs)->capture_default_str();
  train_cmd->add_option("--lr", train.config.learning_rate)->capture_default_str();
  train_cmd->add_option("--mu", train.config.mu, "Margin log base")->capture_default_str();
  train_cmd->add_option("--kernel-time", train.config.kernel_time)->capture_default_str();
  train_cmd->add_option("--sampling", train.sampling)
      ->check(CLI::IsMember({"dominant", "full"}))
      ->capture_default_str();
  train_cmd->add_option("--variant", train.variant)
      ->check(CLI::IsMember({"independent", "shared", "single"}))
      ->capture_default_str();
  train_cmd->add_option("--seed", train.config.seed);
  train_cmd->add_option("--threads", train.config.threads, "Worker cap (0 = all cores)");
  train_cmd->add_option("--model-out", train.model_out)->required();
  train_cmd->add_option("--log", train.log, "Epoch log TSV (default stdout)");
  train_cmd->add_option("--table-out", train.table_out, "Dump the combination table as TSV");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score a model on test cascades (AP/MAP)");
  eval_cmd->add_option("--model", eval.model)->required();
  eval_cmd->add_option("--test", eval.test)->required();
  auto* json_flag = eval_cmd->add_flag("--json", eval.json, "JSON-lines report (default)");
  auto* tsv_flag = eval_cmd->add_flag("--tsv", eval.tsv, "TSV report");
  json_flag->excludes(tsv_flag);
  eval_cmd->add_option("--out", eval.out, "Report path (default stdout)");
  eval_cmd->add_option("--threads", eval.threads);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a planted synthetic corpus");
  synth_cmd->add_option("--sources", synth.sources)->capture_default_str();
  synth_cmd->add_option("--users-per-source", synth.users_per_source)->capture_default_str();
  synth_cmd->add_option("--dim", synth.dim)->capture_default_str();
  synth_cmd->add_option("--cascades-per-source", synth.cascades_per_source)->capture_default_str();
  synth_cmd->add_option("--len", synth.len)->capture_default_str();
  synth_cmd->add_option("--noise", synth.noise)->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed);
  synth_cmd->add_option("--out-dir", synth.out_dir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*split_cmd) return cmd_split(split);
    if (*train_cmd) return cmd_train(train);
    if (*eval_cmd) return cmd_eval(eval);
    if (*synth_cmd) return cmd_synth(synth);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const iae::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const iae::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const iae::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const iae::FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const iae::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
