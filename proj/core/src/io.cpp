#include "nsindy/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <limits>
#include <json.hpp>
#include <set>
#include <sstream>

namespace nsindy {

using json = nlohmann::ordered_json;

namespace {

// JSON has no infinities; they travel as strings.
json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

std::string path_of(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

const json& field(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object()) throw ParseError(fmt::format("field '{}': expected an object", where.empty() ? "<root>" : where));
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(fmt::format("field '{}': missing", path_of(where, key)));
  return *it;
}

double to_num(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw ParseError(fmt::format("field '{}': expected a number", where));
}

template <class T>
T get(const json& obj, const std::string& key, const std::string& where) {
  const json& v = field(obj, key, where);
  if constexpr (std::is_same_v<T, double>) {
    return to_num(v, path_of(where, key));
  } else {
    try {
      return v.get<T>();
    } catch (const json::exception& e) {
      throw ParseError(fmt::format("field '{}': {}", path_of(where, key), e.what()));
    }
  }
}

template <class T>
T get_or(const json& obj, const std::string& key, const std::string& where, T fallback) {
  if (!obj.contains(key)) return fallback;
  return get<T>(obj, key, where);
}

void check_keys(const json& obj, std::initializer_list<const char*> known, const std::string& where,
                std::vector<std::string>* warnings) {
  if (!warnings || !obj.is_object()) return;
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
      warnings->push_back(fmt::format("ignoring unknown field '{}'", path_of(where, key)));
    }
  }
}

json parse_document(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw ParseError(fmt::format("line {}: {}", line, e.what()));
  }
}

template <class F>
auto wrap_conversion(F&& f) {
  try {
    return f();
  } catch (const ParseError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

json arch_json(const NetworkArch& a) {
  return {{"kind", to_string(a.kind)},     {"arity", a.arity},         {"degree", a.degree},
          {"mode", to_string(a.mode)},     {"dictionary", a.dictionary}, {"nodes", a.nodes},
          {"k", a.k},                      {"out_degree", a.out_degree}, {"out_mode", to_string(a.out_mode)}};
}

NetworkArch arch_from(const json& j, const std::string& where, std::vector<std::string>* warnings) {
  check_keys(j, {"kind", "arity", "degree", "mode", "dictionary", "nodes", "k", "out_degree", "out_mode"}, where,
             warnings);
  return wrap_conversion([&] {
    NetworkArch a;
    a.kind = parse_model_kind(get<std::string>(j, "kind", where));
    a.arity = get<std::size_t>(j, "arity", where);
    a.degree = get<int>(j, "degree", where);
    a.mode = parse_monomial_mode(get<std::string>(j, "mode", where));
    a.dictionary = get<std::vector<std::string>>(j, "dictionary", where);
    a.nodes = get<std::vector<std::size_t>>(j, "nodes", where);
    a.k = get_or<std::size_t>(j, "k", where, 2);
    a.out_degree = get_or<int>(j, "out_degree", where, 2);
    a.out_mode = parse_monomial_mode(get_or<std::string>(j, "out_mode", where, "total-degree"));
    return a;
  });
}

json config_json(const TrainConfig& c) {
  json j;
  j["epochs"] = c.epochs;
  j["learning_rate"] = num(c.learning_rate);
  j["lr_decay"] = c.lr_decay ? json{{"factor", num(c.lr_decay->factor)}, {"every", c.lr_decay->every}} : json();
  j["lambda0"] = num(c.lambda0);
  j["lasso_schedule"] = to_string(c.lasso_schedule);
  j["noise_alpha"] = num(c.noise_alpha);
  j["noise_stall_epochs"] = c.noise_stall_epochs;
  j["prune"] = c.prune ? json{{"mse_threshold", num(c.prune->mse_threshold)},
                              {"epsilon", num(c.prune->epsilon)},
                              {"n_consecutive", c.prune->n_consecutive},
                              {"every", c.prune->every},
                              {"first_at", c.prune->first_at}}
                       : json();
  j["patience"] =
      c.patience ? json{{"threshold", num(c.patience->threshold)}, {"epochs", c.patience->epochs}} : json();
  j["batch_size"] = c.batch_size;
  j["ode"] = {{"n_batch", c.ode.n_batch}, {"l_batch", c.ode.l_batch}, {"steps_per_epoch", c.ode.steps_per_epoch}};
  j["init"] = {{"distribution", to_string(c.init.distribution)},
               {"mean", num(c.init.mean)},
               {"stddev", num(c.init.stddev)},
               {"value", num(c.init.value)},
               {"biases", c.init.biases}};
  j["initialize"] = c.initialize;
  j["seed"] = c.seed;
  j["formula_every"] = c.formula_every;
  j["adam"] = {{"beta1", num(c.adam_beta1)}, {"beta2", num(c.adam_beta2)}, {"epsilon", num(c.adam_epsilon)}};
  return j;
}

TrainConfig config_from(const json& j, const std::string& where, std::vector<std::string>* warnings) {
  check_keys(j,
             {"epochs", "learning_rate", "lr_decay", "lambda0", "lasso_schedule", "noise_alpha", "noise_stall_epochs",
              "prune", "patience", "batch_size", "ode", "init", "initialize", "seed", "formula_every", "adam"},
             where, warnings);
  return wrap_conversion([&] {
    TrainConfig c;
    c.epochs = get_or<int>(j, "epochs", where, c.epochs);
    c.learning_rate = get_or<double>(j, "learning_rate", where, c.learning_rate);
    if (j.contains("lr_decay") && !j["lr_decay"].is_null()) {
      const auto w = path_of(where, "lr_decay");
      check_keys(j["lr_decay"], {"factor", "every"}, w, warnings);
      c.lr_decay = LrDecay{get<double>(j["lr_decay"], "factor", w), get<int>(j["lr_decay"], "every", w)};
    }
    c.lambda0 = get_or<double>(j, "lambda0", where, c.lambda0);
    if (j.contains("lasso_schedule")) c.lasso_schedule = parse_lasso_schedule(get<std::string>(j, "lasso_schedule", where));
    c.noise_alpha = get_or<double>(j, "noise_alpha", where, c.noise_alpha);
    c.noise_stall_epochs = get_or<int>(j, "noise_stall_epochs", where, c.noise_stall_epochs);
    if (j.contains("prune") && !j["prune"].is_null()) {
      const auto& p = j["prune"];
      const auto w = path_of(where, "prune");
      check_keys(p, {"mse_threshold", "epsilon", "n_consecutive", "every", "first_at"}, w, warnings);
      PruneConfig pc;
      pc.mse_threshold = get_or<double>(p, "mse_threshold", w, pc.mse_threshold);
      pc.epsilon = get_or<double>(p, "epsilon", w, pc.epsilon);
      pc.n_consecutive = get_or<int>(p, "n_consecutive", w, pc.n_consecutive);
      pc.every = get_or<int>(p, "every", w, pc.every);
      pc.first_at = get_or<int>(p, "first_at", w, pc.first_at);
      c.prune = pc;
    }
    if (j.contains("patience") && !j["patience"].is_null()) {
      const auto w = path_of(where, "patience");
      check_keys(j["patience"], {"threshold", "epochs"}, w, warnings);
      c.patience = PatienceConfig{get<double>(j["patience"], "threshold", w), get<int>(j["patience"], "epochs", w)};
    }
    c.batch_size = get_or<std::size_t>(j, "batch_size", where, c.batch_size);
    if (j.contains("ode")) {
      const auto w = path_of(where, "ode");
      check_keys(j["ode"], {"n_batch", "l_batch", "steps_per_epoch"}, w, warnings);
      c.ode.n_batch = get_or<std::size_t>(j["ode"], "n_batch", w, c.ode.n_batch);
      c.ode.l_batch = get_or<std::size_t>(j["ode"], "l_batch", w, c.ode.l_batch);
      c.ode.steps_per_epoch = get_or<std::size_t>(j["ode"], "steps_per_epoch", w, c.ode.steps_per_epoch);
    }
    if (j.contains("init")) {
      const auto& in = j["init"];
      const auto w = path_of(where, "init");
      check_keys(in, {"distribution", "mean", "stddev", "value", "biases"}, w, warnings);
      if (in.contains("distribution")) {
        c.init.distribution = parse_init_distribution(get<std::string>(in, "distribution", w));
      }
      c.init.mean = get_or<double>(in, "mean", w, c.init.mean);
      c.init.stddev = get_or<double>(in, "stddev", w, c.init.stddev);
      c.init.value = get_or<double>(in, "value", w, c.init.value);
      c.init.biases = get_or<bool>(in, "biases", w, c.init.biases);
    }
    c.initialize = get_or<bool>(j, "initialize", where, c.initialize);
    c.seed = get_or<std::uint64_t>(j, "seed", where, c.seed);
    c.formula_every = get_or<int>(j, "formula_every", where, c.formula_every);
    if (j.contains("adam")) {
      const auto w = path_of(where, "adam");
      check_keys(j["adam"], {"beta1", "beta2", "epsilon"}, w, warnings);
      c.adam_beta1 = get_or<double>(j["adam"], "beta1", w, c.adam_beta1);
      c.adam_beta2 = get_or<double>(j["adam"], "beta2", w, c.adam_beta2);
      c.adam_epsilon = get_or<double>(j["adam"], "epsilon", w, c.adam_epsilon);
    }
    return c;
  });
}

json interval_json(const Interval& iv) { return json::array({num(iv.low), num(iv.high)}); }

Interval interval_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) throw ParseError(fmt::format("field '{}': expected [low, high]", where));
  return {to_num(j[0], where), to_num(j[1], where)};
}

// ---- delimited text ----

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

double parse_cell(const std::string& cell, std::size_t row, const std::filesystem::path& path) {
  std::string_view s = cell;
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(fmt::format("{}: line {}: non-numeric cell '{}'", path.string(), row + 1, cell));
  }
  return v;
}

std::string fmt17(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

Checkpoint make_checkpoint(const NetworkSpec& spec, const FlatParams& params, std::uint64_t seed,
                           const TrainConfig& config, int epoch) {
  Checkpoint c;
  c.arch = spec.arch;
  c.params = params;
  c.seed = seed;
  c.config = config;
  c.epoch = epoch;
  return c;
}

NetworkSpec restore_network(const Checkpoint& checkpoint) {
  NetworkSpec spec = build_network(checkpoint.arch);
  unflatten(spec, checkpoint.params);
  return spec;
}

std::string checkpoint_to_json(const Checkpoint& c) {
  json j;
  j["format"] = "nsindy-checkpoint";
  j["version"] = c.version;
  j["network"] = arch_json(c.arch);
  json values = json::array();
  for (double v : c.params.values) values.push_back(num(v));
  j["params"] = {{"values", values}, {"mask", c.params.mask}};
  j["seed"] = c.seed;
  j["epoch"] = c.epoch;
  j["preset"] = c.preset;
  j["data_case"] = c.data_case;
  j["config"] = config_json(c.config);
  return j.dump(2) + "\n";
}

Checkpoint checkpoint_from_json(const std::string& text, std::vector<std::string>* warnings) {
  const json j = parse_document(text);
  if (!j.is_object()) throw ParseError("checkpoint: expected a JSON object");
  const json& version = field(j, "version", "");
  int v = 0;
  if (version.is_number_integer()) {
    v = version.get<int>();
  } else if (version.is_string()) {
    const auto s = version.get<std::string>();
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError("field 'version': expected an integer");
  } else {
    throw ParseError("field 'version': expected an integer");
  }
  if (v != kCheckpointVersion) {
    throw VersionMismatchError(
        fmt::format("checkpoint format version {} is not supported (expected {})", v, kCheckpointVersion));
  }
  check_keys(j, {"format", "version", "network", "params", "seed", "epoch", "preset", "data_case", "config"}, "",
             warnings);

  Checkpoint c;
  c.version = v;
  c.arch = arch_from(field(j, "network", ""), "network", warnings);
  const json& p = field(j, "params", "");
  check_keys(p, {"values", "mask"}, "params", warnings);
  const json& values = field(p, "values", "params");
  if (!values.is_array()) throw ParseError("field 'params.values': expected an array");
  for (std::size_t i = 0; i < values.size(); ++i) {
    c.params.values.push_back(to_num(values[i], fmt::format("params.values[{}]", i)));
  }
  c.params.mask = get<std::vector<std::uint8_t>>(p, "mask", "params");
  c.seed = get_or<std::uint64_t>(j, "seed", "", 0);
  c.epoch = get_or<int>(j, "epoch", "", 0);
  c.preset = get_or<std::string>(j, "preset", "", "");
  c.data_case = get_or<std::string>(j, "data_case", "", "");
  if (j.contains("config")) c.config = config_from(j["config"], "config", warnings);

  NetworkSpec spec;
  try {
    spec = build_network(c.arch);
  } catch (const std::exception& e) {
    throw ParseError(fmt::format("field 'network': {}", e.what()));
  }
  const std::size_t expected = spec.parameter_count();
  if (c.params.values.size() != expected || c.params.mask.size() != expected) {
    throw ParseError(fmt::format("field 'params': network needs {} values and mask entries, got {} and {}", expected,
                                 c.params.values.size(), c.params.mask.size()));
  }
  for (auto m : c.params.mask) {
    if (m > 1) throw ParseError("field 'params.mask': entries must be 0 or 1");
  }
  c.params.layout = spec.layout();
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  write_text(path, checkpoint_to_json(checkpoint));
}

Checkpoint load_checkpoint(const std::filesystem::path& path, std::vector<std::string>* warnings) {
  try {
    return checkpoint_from_json(read_text(path), warnings);
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::string config_to_json(const TrainConfig& config) { return config_json(config).dump(2) + "\n"; }

TrainConfig config_from_json(const std::string& text, std::vector<std::string>* warnings) {
  return config_from(parse_document(text), "", warnings);
}

std::string preset_to_json(const CasePreset& p) {
  json j;
  j["id"] = p.id;
  json domain = json::array();
  for (const auto& iv : p.data.domain) domain.push_back(interval_json(iv));
  j["data"] = {{"id", p.data.id},
               {"kind", to_string(p.data.kind)},
               {"domain", domain},
               {"n", p.data.n},
               {"n_times", p.data.n_times},
               {"t0", num(p.data.t0)},
               {"t1", num(p.data.t1)},
               {"x0_low_exclusive", p.data.x0_low_exclusive},
               {"target", p.data.target}};
  j["network"] = arch_json(p.arch);
  json stages = json::array();
  for (const auto& s : p.stages) stages.push_back(config_json(s));
  j["stages"] = stages;
  j["eval_domain"] = interval_json(p.eval_domain);
  return j.dump(2) + "\n";
}

CasePreset preset_from_json(const std::string& text, std::vector<std::string>* warnings) {
  const json j = parse_document(text);
  check_keys(j, {"id", "data", "network", "stages", "eval_domain"}, "", warnings);
  return wrap_conversion([&] {
    CasePreset p;
    p.id = get<std::string>(j, "id", "");
    const json& d = field(j, "data", "");
    check_keys(d, {"id", "kind", "domain", "n", "n_times", "t0", "t1", "x0_low_exclusive", "target"}, "data", warnings);
    p.data.id = get<std::string>(d, "id", "data");
    p.data.kind = parse_problem_kind(get<std::string>(d, "kind", "data"));
    const json& domain = field(d, "domain", "data");
    if (!domain.is_array() || domain.empty()) throw ParseError("field 'data.domain': expected a non-empty array");
    for (const auto& iv : domain) p.data.domain.push_back(interval_from(iv, "data.domain"));
    p.data.n = get<std::size_t>(d, "n", "data");
    p.data.n_times = get_or<std::size_t>(d, "n_times", "data", 0);
    p.data.t0 = get_or<double>(d, "t0", "data", 0.0);
    p.data.t1 = get_or<double>(d, "t1", "data", 1.0);
    p.data.x0_low_exclusive = get_or<bool>(d, "x0_low_exclusive", "data", false);
    p.data.target = get_or<std::string>(d, "target", "data", "");
    p.arch = arch_from(field(j, "network", ""), "network", warnings);
    const json& stages = field(j, "stages", "");
    if (!stages.is_array() || stages.empty()) throw ParseError("field 'stages': expected a non-empty array");
    for (std::size_t i = 0; i < stages.size(); ++i) {
      p.stages.push_back(config_from(stages[i], fmt::format("stages[{}]", i), warnings));
    }
    p.eval_domain = j.contains("eval_domain") ? interval_from(j["eval_domain"], "eval_domain") : p.data.domain.front();
    return p;
  });
}

void write_samples(const std::filesystem::path& path, const SampleSet& samples) {
  samples.validate();
  std::string out;
  for (std::size_t j = 0; j < samples.arity; ++j) out += fmt::format("x{},", j + 1);
  out += "y\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (double v : samples.input(i)) out += fmt17(v) + ",";
    out += fmt17(samples.targets[i]) + "\n";
  }
  write_text(path, out);
}

SampleSet read_samples(const std::filesystem::path& path) {
  const auto lines = lines_of(read_text(path));
  if (lines.empty()) throw ParseError(fmt::format("{}: empty file", path.string()));
  const auto header = split(lines[0], ',');
  const std::size_t arity = header.size() - 1;
  std::string expected;
  for (std::size_t j = 0; j < arity; ++j) expected += fmt::format("x{},", j + 1);
  expected += "y";
  if (arity == 0 || lines[0] != expected) {
    throw ParseError(fmt::format("{}: header '{}' does not match expected header 'x1,...,xn,y' (e.g. '{}')",
                                 path.string(), lines[0], arity ? expected : "x1,y"));
  }
  if (lines.size() < 2) throw ParseError(fmt::format("{}: no data rows (at least one sample is required)", path.string()));
  SampleSet s;
  s.arity = arity;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split(lines[r], ',');
    if (cells.size() != header.size()) {
      throw ParseError(fmt::format("{}: line {}: expected {} cells, found {}", path.string(), r + 1, header.size(), cells.size()));
    }
    for (std::size_t j = 0; j < arity; ++j) s.inputs.push_back(parse_cell(cells[j], r, path));
    s.targets.push_back(parse_cell(cells[arity], r, path));
  }
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return s;
}

void write_trajectories(const std::filesystem::path& path, const TrajectoryDataset& data) {
  data.validate();
  std::string out = "trajectory,t,x\n";
  for (std::size_t k = 0; k < data.trajectories(); ++k) {
    const auto traj = data.trajectory(k);
    for (std::size_t i = 0; i < data.points(); ++i) out += fmt::format("{},{},{}\n", k, fmt17(data.times[i]), fmt17(traj[i]));
  }
  write_text(path, out);
}

TrajectoryDataset read_trajectories(const std::filesystem::path& path) {
  const auto lines = lines_of(read_text(path));
  if (lines.empty()) throw ParseError(fmt::format("{}: empty file", path.string()));
  if (lines[0] != "trajectory,t,x") {
    throw ParseError(fmt::format("{}: header '{}' does not match expected header 'trajectory,t,x'", path.string(), lines[0]));
  }
  TrajectoryDataset d;
  std::vector<double> times;  // times of the trajectory being read
  std::size_t current = 0;
  auto close_trajectory = [&](std::size_t row) {
    if (current == 0) {
      d.times = times;
    } else if (times != d.times) {
      throw ParseError(fmt::format("{}: line {}: trajectory {} does not share the time grid of trajectory 0",
                                   path.string(), row + 1, current - 1));
    }
    times.clear();
  };
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split(lines[r], ',');
    if (cells.size() != 3) throw ParseError(fmt::format("{}: line {}: expected 3 cells, found {}", path.string(), r + 1, cells.size()));
    const double kd = parse_cell(cells[0], r, path);
    if (kd < 0 || kd != std::floor(kd)) throw ParseError(fmt::format("{}: line {}: bad trajectory index", path.string(), r + 1));
    const auto k = static_cast<std::size_t>(kd);
    if (k == current + 1 && !times.empty()) {
      close_trajectory(r);
      current = k;
    } else if (k != current) {
      throw ParseError(fmt::format("{}: line {}: trajectories must be numbered 0,1,... and stored contiguously",
                                   path.string(), r + 1));
    }
    times.push_back(parse_cell(cells[1], r, path));
    d.values.push_back(parse_cell(cells[2], r, path));
  }
  if (times.empty()) throw ParseError(fmt::format("{}: no data rows", path.string()));
  close_trajectory(lines.size());
  try {
    d.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return d;
}

void write_report(const std::filesystem::path& path, const TrainReport& report) {
  std::string out = "epoch,mse,lasso,lambda,active,event\n";
  for (const auto& r : report.history) {
    std::string event;
    if (!r.pruned.empty()) {
      event = "pruned=";
      for (std::size_t i = 0; i < r.pruned.size(); ++i) event += (i ? " " : "") + std::to_string(r.pruned[i]);
    }
    if (r.noise_steps > 0) event += (event.empty() ? "" : ";") + fmt::format("noise={}", r.noise_steps);
    out += fmt::format("{},{},{},{},{},{}\n", r.epoch, fmt17(r.mse), fmt17(r.lasso), fmt17(r.lambda), r.active, event);
  }
  write_text(path, out);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}' for reading", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path.string()));
  out << text;
  if (!out) throw std::runtime_error(fmt::format("failed writing '{}'", path.string()));
}

}  // namespace nsindy
