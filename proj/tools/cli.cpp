#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <numeric>
#include <ostream>

#include "nsindy/cases.hpp"
#include "nsindy/io.hpp"
#include "nsindy/symbolic.hpp"

namespace nsindy::cli {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool is_preset(const std::string& id) {
  const auto& ids = preset_ids();
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

bool is_dataset(const std::string& id) {
  const auto& ids = dataset_ids();
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double to_double(const std::string& s, const std::string& flag) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw UsageError(fmt::format("{}: '{}' is not a number", flag, s));
}

InitConfig parse_init(const std::string& s) {
  auto parts = split_list(s, ':');
  InitConfig init;
  if (parts.size() > 1 && parts.back() == "weights") {
    init.biases = false;
    parts.pop_back();
  }
  init.distribution = parse_init_distribution(parts[0]);
  if (init.distribution == InitDistribution::constant) {
    if (parts.size() != 2) throw UsageError("--init constant:VALUE");
    init.value = to_double(parts[1], "--init");
  } else {
    if (parts.size() != 3) throw UsageError("--init normal:MEAN:SD or uniform:MEAN:SD");
    init.mean = to_double(parts[1], "--init");
    init.stddev = to_double(parts[2], "--init");
  }
  return init;
}

/// Flags shared by `fit` and `--print-config` that override preset values.
struct Overrides {
  CLI::App* app = nullptr;
  int epochs = 0;
  double lr = 0.0;
  double lambda0 = 0.0;
  std::string lasso_schedule;
  double noise_alpha = 0.0;
  double prune_mse = 0.0;
  double prune_eps = 0.0;
  int prune_n = 0;
  int prune_every = 0;
  std::string patience;
  std::string init;
  std::size_t batch = 0;
  std::string kind = "pr";
  std::string dict;
  int degree = 2;
  std::size_t width = 0;
  std::size_t k = 2;

  void attach(CLI::App* sub) {
    app = sub;
    sub->add_option("--epochs", epochs, "Epochs per stage");
    sub->add_option("--lr", lr, "Adam learning rate");
    sub->add_option("--lambda0", lambda0, "Lasso coefficient");
    sub->add_option("--lasso-schedule", lasso_schedule, "constant | oscillating");
    sub->add_option("--noise-alpha", noise_alpha, "Gradient-noise alpha (0 disables)");
    sub->add_option("--prune-mse", prune_mse, "Pruning MSE threshold");
    sub->add_option("--prune-eps", prune_eps, "Pruning magnitude threshold");
    sub->add_option("--prune-n", prune_n, "Consecutive epochs below the magnitude threshold");
    sub->add_option("--prune-every", prune_every, "Pruning cadence in epochs");
    sub->add_option("--patience", patience, "EPOCHS or THRESHOLD:EPOCHS, 'off' disables");
    sub->add_option("--init", init, "normal:MEAN:SD | uniform:MEAN:SD | constant:VALUE, append :weights to start biases at zero");
    sub->add_option("--batch", batch, "Mini-batch size for function data (0: full batch)");
    sub->add_option("--kind", kind, "pr | prp (explicit architecture)");
    sub->add_option("--dict", dict, "Comma-separated dictionary (explicit architecture)");
    sub->add_option("--degree", degree, "Input polynomial degree");
    sub->add_option("--width", width, "Radial width (0: dictionary size)");
    sub->add_option("--k", k, "PRP intermediate width");
  }

  bool given(const char* flag) const { return app->count(flag) > 0; }

  bool explicit_arch() const { return given("--dict"); }

  void apply(CasePreset& p) const {
    if (explicit_arch()) {
      const auto names = split_list(dict, ',');
      const auto model = parse_model_kind(kind);
      if (model == ModelKind::pr) {
        p.arch = make_pr(names, p.data.domain.size(), degree, width).arch;
      } else if (model == ModelKind::prp) {
        p.arch = make_prp(names, p.data.domain.size(), degree, width, k).arch;
      } else {
        throw UsageError("--kind must be pr or prp");
      }
    } else if (given("--degree") || given("--k") || given("--width") || given("--kind")) {
      throw UsageError("--kind/--degree/--width/--k need --dict");
    }
    for (auto& c : p.stages) {
      if (given("--epochs")) c.epochs = epochs;
      if (given("--lr")) c.learning_rate = lr;
      if (given("--lambda0")) c.lambda0 = lambda0;
      if (given("--lasso-schedule")) c.lasso_schedule = parse_lasso_schedule(lasso_schedule);
      if (given("--noise-alpha")) c.noise_alpha = noise_alpha;
      if (given("--prune-mse") || given("--prune-eps") || given("--prune-n") || given("--prune-every")) {
        if (!c.prune) c.prune = PruneConfig{};
        if (given("--prune-mse")) c.prune->mse_threshold = prune_mse;
        if (given("--prune-eps")) c.prune->epsilon = prune_eps;
        if (given("--prune-n")) c.prune->n_consecutive = prune_n;
        if (given("--prune-every")) c.prune->every = prune_every;
      }
      if (given("--patience")) {
        if (patience == "off") {
          c.patience.reset();
        } else {
          const auto parts = split_list(patience, ':');
          PatienceConfig pc;
          if (parts.size() == 2) {
            pc.threshold = to_double(parts[0], "--patience");
            pc.epochs = static_cast<int>(to_double(parts[1], "--patience"));
          } else {
            pc.epochs = static_cast<int>(to_double(parts[0], "--patience"));
          }
          c.patience = pc;
        }
      }
      if (given("--init")) c.init = parse_init(init);
      if (given("--batch")) c.batch_size = batch;
      c.validate();
    }
  }
};

CasePreset resolve_preset(const std::string& preset_id, const std::string& config_path, const Overrides& ov,
                          std::ostream& err) {
  CasePreset p;
  if (!config_path.empty()) {
    std::vector<std::string> warnings;
    try {
      p = preset_from_json(read_text(config_path), &warnings);
    } catch (const ParseError& e) {
      throw DataError(fmt::format("{}: {}", config_path, e.what()));
    }
    for (const auto& w : warnings) fmt::print(err, "warning: {}: {}\n", config_path, w);
  } else if (!preset_id.empty()) {
    p = preset(preset_id);
  } else {
    throw UsageError("one of --preset or --config is required");
  }
  ov.apply(p);
  return p;
}

bool is_trajectory_file(const fs::path& path) {
  const auto text = read_text(path);
  return text.rfind("trajectory,t,x", 0) == 0;
}

std::string data_summary(const DatasetSpec& d) {
  std::string domain;
  for (const auto& iv : d.domain) domain += fmt::format("{}[{}, {}]", domain.empty() ? "" : " x ", iv.low, iv.high);
  if (d.kind == ProblemKind::ode) {
    return fmt::format("{}: K={} trajectories, N={} points on t in [{}, {}], x0 in {}, target {}", d.id, d.n,
                       d.n_times, d.t0, d.t1, domain, d.target);
  }
  return fmt::format("{}: N={} samples on {}, target {}", d.id, d.n, domain, d.target);
}

// ---- commands ----

int cmd_gen(const std::string& case_id, const std::string& out_path, std::size_t n, bool n_given, std::uint64_t seed,
            std::ostream& out) {
  DatasetSpec d;
  if (is_preset(case_id)) {
    d = preset(case_id).data;
  } else if (is_dataset(case_id)) {
    d = dataset_spec(case_id);
  } else {
    std::vector<std::string> valid = dataset_ids();
    for (const auto& p : preset_ids()) {
      if (!is_dataset(p)) valid.push_back(p);
    }
    throw UsageError(UnknownCaseError(case_id, valid).what());
  }
  if (n_given) {
    if (n == 0) throw UsageError("--n must be >= 1");
    d.n = n;
  }
  Rng rng(seed);
  if (d.kind == ProblemKind::ode) {
    write_trajectories(out_path, make_trajectories(d, rng));
  } else {
    write_samples(out_path, make_samples(d, rng));
  }
  fmt::print(out, "wrote {}\n{}\n", out_path, data_summary(d));
  return kOk;
}

struct FitArgs {
  std::string preset_id;
  std::string config_path;
  std::string data_path;
  std::string out_dir;
  std::size_t seeds = 1;
  std::uint64_t first_seed = 1;
  std::uint64_t data_seed = 0;
  std::size_t threads = 0;
  int decimals = 3;
  bool print_config = false;
};

int cmd_fit(const FitArgs& a, const Overrides& ov, std::ostream& out, std::ostream& err) {
  const CasePreset p = resolve_preset(a.preset_id, a.config_path, ov, err);
  if (a.print_config) {
    out << preset_to_json(p);
    return kOk;
  }
  if (a.seeds == 0) throw UsageError("--seeds must be >= 1");
  if (a.out_dir.empty()) throw UsageError("--out is required");

  const bool ode = p.data.kind == ProblemKind::ode;
  SampleSet samples;
  TrajectoryDataset trajectories;
  try {
    if (!a.data_path.empty()) {
      if (is_trajectory_file(a.data_path) != ode) {
        throw DataError(fmt::format("{}: data kind does not match preset '{}' ({})", a.data_path, p.id,
                                    to_string(p.data.kind)));
      }
      if (ode) {
        trajectories = read_trajectories(a.data_path);
      } else {
        samples = read_samples(a.data_path);
        if (samples.arity != p.arch.arity) {
          throw DataError(fmt::format("{}: data has {} inputs but the network expects {}", a.data_path, samples.arity,
                                      p.arch.arity));
        }
      }
    } else {
      Rng rng(a.data_seed);
      if (ode) {
        trajectories = make_trajectories(p.data, rng);
      } else {
        samples = make_samples(p.data, rng);
      }
    }
  } catch (const ParseError& e) {
    throw DataError(e.what());
  } catch (const std::runtime_error& e) {
    if (dynamic_cast<const DataError*>(&e)) throw;
    throw DataError(e.what());
  }

  std::vector<std::uint64_t> seeds(a.seeds);
  std::iota(seeds.begin(), seeds.end(), a.first_seed);
  const auto results = run_seeds(seeds, a.threads ? a.threads : default_thread_count(), [&](std::uint64_t seed) {
    NetworkSpec spec = build_network(p.arch);
    TrainReport report = ode ? train_preset(p, spec, trajectories, seed) : train_preset(p, spec, samples, seed);
    return SeedResult{seed, std::move(spec), std::move(report)};
  });

  for (const auto& r : results) {
    Checkpoint c = make_checkpoint(r.spec, r.report.params, r.seed, p.stages.back(),
                                   static_cast<int>(r.report.history.size()));
    c.preset = p.id;
    c.data_case = p.data.id;
    save_checkpoint(fs::path(a.out_dir) / fmt::format("seed-{}.json", r.seed), c);
    write_report(fs::path(a.out_dir) / fmt::format("seed-{}.report.csv", r.seed), r.report);
    fmt::print(out, "seed {}: {} after {} epochs, final mse {:.6g}, active {}/{}\n", r.seed,
               to_string(r.report.stop_reason), r.report.history.size(), r.report.final_mse,
               r.report.params.active_count(), r.report.params.size());
  }

  const auto best = best_seed(results);
  if (!best) {
    fmt::print(err, "all {} seeds diverged:\n", results.size());
    for (const auto& r : results) fmt::print(err, "  seed {}: {}\n", r.seed, r.report.message);
    return kAllDiverged;
  }
  const auto& b = results[*best];
  const Expr formula = simplify(extract(b.spec, b.report.params), 0.0);
  fmt::print(out, "best seed {}\nformula: {}\nactive parameters: {}/{}\nfinal mse: {:.6g}\n", b.seed,
             render(formula, a.decimals), b.report.params.active_count(), b.report.params.size(), b.report.final_mse);
  return kOk;
}

Checkpoint load_or_data_error(const std::string& path, std::ostream& err) {
  std::vector<std::string> warnings;
  try {
    Checkpoint c = load_checkpoint(path, &warnings);
    for (const auto& w : warnings) fmt::print(err, "warning: {}: {}\n", path, w);
    return c;
  } catch (const std::exception& e) {
    throw DataError(e.what());
  }
}

int cmd_eval(const std::string& checkpoint_path, const std::string& data_path, std::ostream& out, std::ostream& err) {
  const Checkpoint c = load_or_data_error(checkpoint_path, err);
  const NetworkSpec spec = restore_network(c);
  const auto active = c.params.active_count();
  try {
    if (is_trajectory_file(data_path)) {
      const auto data = read_trajectories(data_path);
      if (spec.input_arity() != 1) throw DataError("trajectory data needs a scalar (arity 1) checkpoint");
      const double m = trajectory_mse(spec, c.params, data);
      double norm = 0.0;
      for (double v : data.values) norm += v * v;
      norm /= static_cast<double>(data.values.size());
      fmt::print(out, "trajectory mse: {:.6g}\nrelative mse: {:.6g}\nactive parameters: {}/{}\n", m, m / norm, active,
                 c.params.size());
      return kOk;
    }
    const auto data = read_samples(data_path);
    if (data.arity != spec.input_arity()) {
      throw DataError(fmt::format("arity mismatch: checkpoint expects {} inputs, data has {}", spec.input_arity(),
                                  data.arity));
    }
    const double m = mse(spec, c.params, data);
    double norm = 0.0;
    for (double y : data.targets) norm += y * y;
    norm /= static_cast<double>(data.size());
    fmt::print(out, "mse: {:.6g}\nrelative mse: {:.6g}\nactive parameters: {}/{}\n", m, m / norm, active,
               c.params.size());
    return kOk;
  } catch (const ParseError& e) {
    throw DataError(e.what());
  }
}

int cmd_export(const std::string& checkpoint_path, int decimals, std::ostream& out, std::ostream& err) {
  const Checkpoint c = load_or_data_error(checkpoint_path, err);
  const NetworkSpec spec = restore_network(c);
  fmt::print(out, "{}\n", render(simplify(extract(spec, c.params), 0.0), decimals));
  return kOk;
}

int cmd_curve(const std::string& checkpoint_path, const std::string& domain, std::size_t n,
              const std::string& case_id, const std::string& out_path, std::ostream& out, std::ostream& err) {
  const Checkpoint c = load_or_data_error(checkpoint_path, err);
  const NetworkSpec spec = restore_network(c);
  if (spec.input_arity() != 1) throw DataError("curve tables need a scalar (arity 1) checkpoint");
  if (n < 2) throw UsageError("--n must be >= 2");
  const auto bounds = split_list(domain, ',');
  if (bounds.size() != 2) throw UsageError("--domain LOW,HIGH");
  const double low = to_double(bounds[0], "--domain"), high = to_double(bounds[1], "--domain");
  const std::string target = case_id.empty() ? c.data_case : case_id;
  if (!target.empty() && !is_dataset(target)) throw UsageError(UnknownCaseError(target, dataset_ids()).what());

  std::string table = "x,model,target\n";
  for (std::size_t i = 0; i < n; ++i) {
    const double x = low + (high - low) * static_cast<double>(i) / static_cast<double>(n - 1);
    const double y = forward(spec, c.params, std::span<const double>(&x, 1));
    const double t = target.empty() ? std::numeric_limits<double>::quiet_NaN()
                                    : target_value(target, std::span<const double>(&x, 1));
    table += fmt::format("{:.17g},{:.17g},{:.17g}\n", x, y, t);
  }
  if (out_path.empty()) {
    out << table;
  } else {
    write_text(out_path, table);
    fmt::print(out, "wrote {} rows to {}\n", n, out_path);
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nested SINDy: sparse symbolic regression with polynomial/radial blocks"};
  app.require_subcommand(1);

  std::string case_id, out_path;
  std::size_t gen_n = 0;
  std::uint64_t gen_seed = 0;
  auto* gen = app.add_subcommand("gen", "Generate a case dataset");
  gen->add_option("--case", case_id, "Dataset or preset id")->required();
  gen->add_option("--out", out_path, "Output CSV")->required();
  auto* gen_n_opt = gen->add_option("--n", gen_n, "Samples (function) or trajectories (ODE)");
  gen->add_option("--seed", gen_seed, "RNG seed");

  FitArgs fa;
  Overrides ov;
  auto* fit = app.add_subcommand("fit", "Train on a dataset with multi-seed search");
  fit->add_option("--preset", fa.preset_id, "Case preset id");
  fit->add_option("--config", fa.config_path, "Preset JSON (as printed by --print-config)");
  fit->add_option("--case", fa.preset_id, "Alias of --preset");
  fit->add_option("--data", fa.data_path, "Dataset CSV (default: generate from the preset)");
  fit->add_option("--out", fa.out_dir, "Directory for checkpoints and reports");
  fit->add_option("--seeds", fa.seeds, "Number of seeds");
  fit->add_option("--seed", fa.first_seed, "First seed");
  fit->add_option("--data-seed", fa.data_seed, "Seed for generated data");
  fit->add_option("--threads", fa.threads, "Worker threads (default: NSINDY_THREADS or hardware)");
  fit->add_option("--decimals", fa.decimals, "Decimals in the printed formula");
  fit->add_flag("--print-config", fa.print_config, "Print the resolved preset as JSON and exit");
  ov.attach(fit);

  std::string checkpoint_path, data_path;
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset");
  eval->add_option("--checkpoint", checkpoint_path)->required();
  eval->add_option("--data", data_path)->required();

  int decimals = 2;
  auto* exp = app.add_subcommand("export", "Print a checkpoint's formula");
  exp->add_option("--checkpoint", checkpoint_path)->required();
  exp->add_option("--decimals", decimals);

  std::string domain = "0,1", curve_case;
  std::size_t curve_n = 200;
  auto* curve = app.add_subcommand("curve", "Tabulate x, model(x), target(x)");
  curve->add_option("--checkpoint", checkpoint_path)->required();
  curve->add_option("--domain", domain, "LOW,HIGH");
  curve->add_option("--n", curve_n, "Rows");
  curve->add_option("--case", curve_case, "Target dataset id (default: from checkpoint)");
  curve->add_option("--out", out_path, "Output CSV (default: stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) return cmd_gen(case_id, out_path, gen_n, gen_n_opt->count() > 0, gen_seed, out);
    if (*fit) return cmd_fit(fa, ov, out, err);
    if (*eval) return cmd_eval(checkpoint_path, data_path, out, err);
    if (*exp) return cmd_export(checkpoint_path, decimals, out, err);
    if (*curve) return cmd_curve(checkpoint_path, domain, curve_n, curve_case, out_path, out, err);
  } catch (const UsageError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kUsage;
  } catch (const UnknownCaseError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kUsage;
  } catch (const DataError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kDataError;
  } catch (const ParseError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kDataError;
  } catch (const std::invalid_argument& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kDataError;
  }
  return kUsage;
}

}  // namespace nsindy::cli
