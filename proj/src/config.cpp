#include "resdeloc/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <omp.h>

#include "resdeloc/errors.hpp"

namespace resdeloc {

using nlohmann::json;

std::string to_string(Command c) {
  switch (c) {
    case Command::green: return "green";
    case Command::dos: return "dos";
    case Command::gamma_scan: return "gamma-scan";
    case Command::resonance: return "resonance";
    case Command::lyapunov: return "lyapunov";
    case Command::phase_scan: return "phase-scan";
    case Command::verify_all: return "verify-all";
  }
  return "verify-all";
}

Command command_from_string(const std::string& s) {
  for (Command c : {Command::green, Command::dos, Command::gamma_scan, Command::resonance, Command::lyapunov,
                    Command::phase_scan, Command::verify_all})
    if (to_string(c) == s) return c;
  throw ConfigError("command", "unknown command '" + s + "'");
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// Object view that rejects keys outside `allowed` and reads typed fields.
class Section {
 public:
  Section(const json& j, std::string path, std::vector<std::string> allowed)
      : j_(j), path_(std::move(path)), allowed_(std::move(allowed)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
    for (const auto& [key, _] : j_.items()) {
      if (std::find(allowed_.begin(), allowed_.end(), key) != allowed_.end()) continue;
      std::string msg = "unknown key '" + key + "'";
      std::string best;
      std::size_t best_d = 3;
      for (const auto& a : allowed_) {
        const std::size_t d = edit_distance(key, a);
        if (d < best_d) {
          best_d = d;
          best = a;
        }
      }
      if (!best.empty()) msg += " (did you mean '" + best + "'?)";
      throw ConfigError(join(path_, key), msg);
    }
  }

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  const json& raw(const std::string& key) const { return j_.at(key); }
  std::string path(const std::string& key) const { return join(path_, key); }

  double number(const std::string& key, double def) const {
    if (!has(key)) return def;
    const auto& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(path(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(path(key), "must be finite");
    return x;
  }

  long long integer(const std::string& key, long long def) const {
    if (!has(key)) return def;
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(path(key), "expected an integer");
    return v.get<long long>();
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t def) const {
    if (!has(key)) return def;
    const auto& v = j_.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0))
      throw ConfigError(path(key), "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  std::string string(const std::string& key, const std::string& def) const {
    if (!has(key)) return def;
    const auto& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(path(key), "expected a string");
    return v.get<std::string>();
  }

  int positive_int(const std::string& key, int def) const {
    const long long v = integer(key, def);
    if (v < 1 || v > 1'000'000'000) throw ConfigError(path(key), "must be a positive integer");
    return static_cast<int>(v);
  }

  double positive(const std::string& key, double def) const {
    const double v = number(key, def);
    if (!(v > 0)) throw ConfigError(path(key), "must be > 0");
    return v;
  }

 private:
  const json& j_;
  std::string path_;
  std::vector<std::string> allowed_;
};

const json& empty_object() {
  static const json e = json::object();
  return e;
}

const json& child(const json& root, const std::string& key) {
  return root.contains(key) && !root.at(key).is_null() ? root.at(key) : empty_object();
}

std::vector<double> parse_energies(const Section& s, const std::string& key, std::vector<double> def) {
  if (!s.has(key)) return def;
  const json& v = s.raw(key);
  const std::string p = s.path(key);
  if (v.is_array()) {
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ConfigError(p + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(v[i].get<double>());
    }
    if (out.empty()) throw ConfigError(p, "must not be empty");
    return out;
  }
  const Section g(v, p, {"lo", "hi", "count"});
  const double lo = g.number("lo", -1.0), hi = g.number("hi", 1.0);
  const int count = g.positive_int("count", 11);
  if (hi < lo) throw ConfigError(g.path("hi"), "must be >= lo");
  return energy_grid(lo, hi, count);
}

TopologySpec parse_topology(const json& j) {
  const Section s(j, "topology", {"kind", "K", "D", "dims", "N", "edges", "origin"});
  TopologySpec t;
  const std::string kind = s.string("kind", "tree");
  if (kind == "tree") {
    t.kind = GraphKind::tree;
    t.K = s.positive_int("K", 2);
    t.D = s.positive_int("D", 10);
    std::size_t n = 0;
    for (int d = 0; d <= t.D; ++d) {
      n += tree_sphere_size(t.K, d);
      if (n > 50'000'000) throw ConfigError(s.path("D"), "tree too large (more than 5e7 vertices)");
    }
  } else if (kind == "box") {
    t.kind = GraphKind::box;
    if (!s.has("dims") || !s.raw("dims").is_array() || s.raw("dims").empty())
      throw ConfigError(s.path("dims"), "box needs a non-empty array of side lengths");
    std::size_t n = 1;
    for (std::size_t i = 0; i < s.raw("dims").size(); ++i) {
      const json& d = s.raw("dims")[i];
      if (!d.is_number_integer() || d.get<long long>() < 1)
        throw ConfigError(s.path("dims") + "[" + std::to_string(i) + "]", "must be a positive integer");
      t.dims.push_back(d.get<std::size_t>());
      n *= t.dims.back();
      if (n > 50'000'000) throw ConfigError(s.path("dims"), "box too large");
    }
  } else if (kind == "complete" || kind == "custom") {
    t.kind = kind == "complete" ? GraphKind::complete : GraphKind::custom;
    t.N = static_cast<std::size_t>(s.positive_int("N", 4));
    if (t.kind == GraphKind::custom) {
      if (!s.has("edges") || !s.raw("edges").is_array())
        throw ConfigError(s.path("edges"), "custom topology needs an edge list");
      for (std::size_t i = 0; i < s.raw("edges").size(); ++i) {
        const json& e = s.raw("edges")[i];
        const std::string p = s.path("edges") + "[" + std::to_string(i) + "]";
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned() || !e[1].is_number_unsigned())
          throw ConfigError(p, "edge must be a pair of vertex indices");
        t.edges.emplace_back(e[0].get<VertexId>(), e[1].get<VertexId>());
      }
      t.origin = s.unsigned_integer("origin", 0);
    }
  } else {
    throw ConfigError(s.path("kind"), "unknown topology '" + kind + "' (tree, box, complete, custom)");
  }
  return t;
}

Distribution parse_dist(const json& j) {
  const std::string kind = j.is_object() && j.contains("kind") && j.at("kind").is_string()
                               ? j.at("kind").get<std::string>()
                               : "uniform";
  try {
    if (kind == "uniform") {
      const Section s(j, "dist", {"kind", "a", "b"});
      return Distribution::uniform(s.number("a", -0.5), s.number("b", 0.5));
    }
    if (kind == "gaussian") {
      const Section s(j, "dist", {"kind", "mean", "sd"});
      return Distribution::gaussian(s.number("mean", 0.0), s.number("sd", 1.0));
    }
    if (kind == "cauchy") {
      const Section s(j, "dist", {"kind", "loc", "scale"});
      return Distribution::cauchy(s.number("loc", 0.0), s.number("scale", 1.0));
    }
    if (kind == "bernoulli") {
      const Section s(j, "dist", {"kind", "p", "v0", "v1"});
      return Distribution::bernoulli(s.number("p", 0.5), s.number("v0", -1.0), s.number("v1", 1.0));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError("dist", e.what());
  }
  Section(j, "dist", {"kind"});
  throw ConfigError("dist.kind", "unknown distribution '" + kind + "' (uniform, gaussian, cauchy, bernoulli)");
}

json dist_json(const Distribution& d) {
  switch (d.kind) {
    case DistKind::uniform: return {{"kind", "uniform"}, {"a", d.p1}, {"b", d.p2}};
    case DistKind::gaussian: return {{"kind", "gaussian"}, {"mean", d.p1}, {"sd", d.p2}};
    case DistKind::cauchy: return {{"kind", "cauchy"}, {"loc", d.p1}, {"scale", d.p2}};
    case DistKind::bernoulli: return {{"kind", "bernoulli"}, {"p", d.p1}, {"v0", d.p2}, {"v1", d.p3}};
  }
  return {};
}

json topology_json(const TopologySpec& t) {
  json j = {{"kind", to_string(t.kind)}};
  switch (t.kind) {
    case GraphKind::tree: j["K"] = t.K; j["D"] = t.D; break;
    case GraphKind::box: j["dims"] = t.dims; break;
    case GraphKind::complete: j["N"] = t.N; break;
    case GraphKind::custom: {
      j["N"] = t.N;
      json edges = json::array();
      for (auto [u, v] : t.edges) edges.push_back({u, v});
      j["edges"] = edges;
      j["origin"] = t.origin;
      break;
    }
  }
  return j;
}

json canonical_json(const RunConfig& c) {
  json j;
  j["command"] = to_string(c.command);
  j["topology"] = topology_json(c.topology);
  j["dist"] = dist_json(c.dist);
  j["lambda"] = c.lambda;
  j["seed"] = c.seed;
  j["hopping"] = c.hopping;
  j["ladder"] = {{"eta0", c.ladder.eta0}, {"rungs", c.ladder.rungs}};
  j["thresholds"] = {{"p_min", c.thresholds.p_min},
                     {"r2_min", c.thresholds.r2_min},
                     {"plateau_rel", c.thresholds.plateau_rel},
                     {"fit_rungs", c.thresholds.fit_rungs},
                     {"plateau_rungs", c.thresholds.plateau_rungs}};
  j["boundary"] = to_string(c.boundary);
  switch (c.command) {
    case Command::green:
      j["green"] = {{"E", c.green.E}, {"eta", c.green.eta}, {"replicates", c.green.replicates}};
      if (c.green.x) j["green"]["x"] = *c.green.x;
      break;
    case Command::dos:
      j["dos"] = {{"energies", c.dos.energies},
                  {"eta", c.dos.eta},
                  {"replicates", c.dos.replicates},
                  {"estimator", c.dos.estimator == DosEstimator::plain ? "plain" : "spectral_average"}};
      break;
    case Command::gamma_scan:
      j["gamma_scan"] = {{"energies", c.gamma_scan.energies}, {"replicates", c.gamma_scan.replicates}};
      break;
    case Command::resonance:
      j["resonance"] = {{"E", c.resonance.E},
                        {"R", c.resonance.R},
                        {"delta", c.resonance.delta},
                        {"replicates", c.resonance.replicates},
                        {"calibration_replicates", c.resonance.calibration_replicates},
                        {"eta", c.resonance.eta},
                        {"ct_replicates", c.resonance.ct_replicates},
                        {"boundary", to_string(c.resonance.boundary)}};
      break;
    case Command::lyapunov:
      j["lyapunov"] = {{"energies", c.lyapunov.energies}, {"replicates", c.lyapunov.replicates},
                       {"d_min", c.lyapunov.d_min},       {"d_max", c.lyapunov.d_max},
                       {"eta", c.lyapunov.eta}};
      break;
    case Command::phase_scan:
      j["phase_scan"] = {{"energies", c.phase_scan.energies}, {"lambdas", c.phase_scan.lambdas},
                         {"s", c.phase_scan.s},               {"replicates", c.phase_scan.replicates},
                         {"d_min", c.phase_scan.d_min},       {"d_max", c.phase_scan.d_max},
                         {"eta", c.phase_scan.eta}};
      break;
    case Command::verify_all:
      j["verify_all"] = {{"identity_instances", c.verify_all.identity_instances},
                         {"rank_one_instances", c.verify_all.rank_one_instances},
                         {"mobius_scans", c.verify_all.mobius_scans},
                         {"two_site_draws", c.verify_all.two_site_draws},
                         {"delta_replicates", c.verify_all.delta_replicates},
                         {"simplicity_replicates", c.verify_all.simplicity_replicates},
                         {"null_average_replicates", c.verify_all.null_average_replicates}};
      break;
  }
  return j;
}

std::size_t vertex_count(const TopologySpec& t) {
  switch (t.kind) {
    case GraphKind::tree: {
      std::size_t n = 0;
      for (int d = 0; d <= t.D; ++d) n += tree_sphere_size(t.K, d);
      return n;
    }
    case GraphKind::box: {
      std::size_t n = 1;
      for (auto d : t.dims) n *= d;
      return n;
    }
    default: return t.N;
  }
}

}  // namespace

Graph build_graph(const TopologySpec& t) {
  try {
    switch (t.kind) {
      case GraphKind::tree: return make_tree(t.K, t.D);
      case GraphKind::box: return make_box(t.dims);
      case GraphKind::complete: return make_complete(t.N);
      case GraphKind::custom: return make_custom(t.N, t.edges, t.origin);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError("topology", e.what());
  }
  throw ConfigError("topology.kind", "unsupported topology");
}

RunConfig parse_config(std::string_view text, std::optional<Command> command) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  const Section top(root, "",
                    {"command", "topology", "dist", "lambda", "seed", "hopping", "workers", "ladder", "thresholds",
                     "boundary", "green", "dos", "gamma_scan", "resonance", "lyapunov", "phase_scan", "verify_all"});
  RunConfig c;
  if (top.has("command")) {
    const Command in_file = command_from_string(top.string("command", ""));
    if (command && *command != in_file)
      throw ConfigError("command", "config names '" + to_string(in_file) + "' but '" + to_string(*command) +
                                       "' was requested");
    c.command = in_file;
  } else if (command) {
    c.command = *command;
  } else {
    throw ConfigError("command", "no command given");
  }

  c.topology = parse_topology(child(root, "topology"));
  c.dist = parse_dist(child(root, "dist"));
  c.lambda = top.number("lambda", 1.0);
  if (c.lambda < 0) throw ConfigError("lambda", "must be >= 0");
  c.seed = top.unsigned_integer("seed", 1);
  c.hopping = top.number("hopping", 1.0);
  c.workers = top.positive_int("workers", std::max(1, omp_get_num_procs()));

  {
    const Section s(child(root, "ladder"), "ladder", {"eta0", "rungs"});
    c.ladder.eta0 = s.positive("eta0", 0.1);
    c.ladder.rungs = s.positive_int("rungs", 14);
    if (c.ladder.rungs > 60) throw ConfigError(s.path("rungs"), "must be <= 60");
  }
  {
    const Section s(child(root, "thresholds"), "thresholds",
                    {"p_min", "r2_min", "plateau_rel", "fit_rungs", "plateau_rungs"});
    c.thresholds.p_min = s.positive("p_min", 0.5);
    c.thresholds.r2_min = s.number("r2_min", 0.99);
    if (!(c.thresholds.r2_min > 0 && c.thresholds.r2_min <= 1)) throw ConfigError(s.path("r2_min"), "must lie in (0, 1]");
    c.thresholds.plateau_rel = s.positive("plateau_rel", 0.01);
    c.thresholds.fit_rungs = s.positive_int("fit_rungs", 6);
    c.thresholds.plateau_rungs = s.positive_int("plateau_rungs", 4);
    if (c.thresholds.fit_rungs < 3) throw ConfigError(s.path("fit_rungs"), "must be >= 3");
    if (c.thresholds.plateau_rungs < 2) throw ConfigError(s.path("plateau_rungs"), "must be >= 2");
  }
  try {
    c.boundary = tree_boundary_from_string(top.string("boundary", "stationary"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("boundary", e.what());
  }

  {
    const Section s(child(root, "green"), "green", {"x", "E", "eta", "replicates"});
    if (s.has("x")) c.green.x = s.unsigned_integer("x", 0);
    c.green.E = s.number("E", 0.0);
    c.green.eta = s.positive("eta", 1e-3);
    c.green.replicates = s.positive_int("replicates", 1);
  }
  {
    const Section s(child(root, "dos"), "dos", {"energies", "eta", "replicates", "estimator"});
    c.dos.energies = parse_energies(s, "energies", energy_grid(-3.0, 3.0, 21));
    c.dos.eta = s.positive("eta", 1e-2);
    c.dos.replicates = s.positive_int("replicates", 1000);
    const std::string est = s.string("estimator", "plain");
    if (est == "plain") c.dos.estimator = DosEstimator::plain;
    else if (est == "spectral_average") c.dos.estimator = DosEstimator::spectral_average;
    else throw ConfigError(s.path("estimator"), "expected 'plain' or 'spectral_average'");
  }
  {
    const Section s(child(root, "gamma_scan"), "gamma_scan", {"energies", "replicates"});
    c.gamma_scan.energies = parse_energies(s, "energies", energy_grid(-2.0, 2.0, 5));
    c.gamma_scan.replicates = s.positive_int("replicates", 20);
  }
  {
    const Section s(child(root, "resonance"), "resonance",
                    {"E", "R", "delta", "replicates", "calibration_replicates", "eta", "ct_replicates", "boundary"});
    c.resonance.E = s.number("E", 0.0);
    c.resonance.R = s.positive_int("R", 6);
    c.resonance.delta = s.number("delta", 0.1);
    if (!(c.resonance.delta > 0 && c.resonance.delta < 0.5)) throw ConfigError(s.path("delta"), "must lie in (0, 0.5)");
    c.resonance.replicates = s.positive_int("replicates", 1000);
    if (c.resonance.replicates < 2) throw ConfigError(s.path("replicates"), "must be >= 2");
    c.resonance.calibration_replicates = s.positive_int("calibration_replicates", 200);
    c.resonance.eta = s.positive("eta", 1e-6);
    c.resonance.ct_replicates = s.positive_int("ct_replicates", 100);
    try {
      c.resonance.boundary = tree_boundary_from_string(s.string("boundary", "real"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(s.path("boundary"), e.what());
    }
  }
  {
    const Section s(child(root, "lyapunov"), "lyapunov", {"energies", "replicates", "d_min", "d_max", "eta"});
    c.lyapunov.energies = parse_energies(s, "energies", {0.0});
    c.lyapunov.replicates = s.positive_int("replicates", 20);
    c.lyapunov.d_min = s.positive_int("d_min", 6);
    c.lyapunov.d_max = s.positive_int("d_max", 12);
    c.lyapunov.eta = s.positive("eta", 1e-6);
  }
  {
    const Section s(child(root, "phase_scan"), "phase_scan",
                    {"energies", "lambdas", "s", "replicates", "d_min", "d_max", "eta"});
    c.phase_scan.energies = parse_energies(s, "energies", {0.0});
    c.phase_scan.lambdas = parse_energies(s, "lambdas", {0.2});
    for (std::size_t i = 0; i < c.phase_scan.lambdas.size(); ++i)
      if (!(c.phase_scan.lambdas[i] >= 0))
        throw ConfigError(s.path("lambdas") + "[" + std::to_string(i) + "]", "must be >= 0");
    c.phase_scan.s = s.number("s", 0.5);
    if (!(c.phase_scan.s > 0 && c.phase_scan.s < 1)) throw ConfigError(s.path("s"), "must lie in (0, 1)");
    c.phase_scan.replicates = s.positive_int("replicates", 20);
    c.phase_scan.d_min = s.positive_int("d_min", 4);
    c.phase_scan.d_max = s.positive_int("d_max", 8);
    c.phase_scan.eta = s.positive("eta", 1e-6);
  }
  {
    const Section s(child(root, "verify_all"), "verify_all",
                    {"identity_instances", "rank_one_instances", "mobius_scans", "two_site_draws", "delta_replicates",
                     "simplicity_replicates", "null_average_replicates"});
    auto& v = c.verify_all;
    v.identity_instances = s.positive_int("identity_instances", v.identity_instances);
    v.rank_one_instances = s.positive_int("rank_one_instances", v.rank_one_instances);
    v.mobius_scans = s.positive_int("mobius_scans", v.mobius_scans);
    v.two_site_draws = s.positive_int("two_site_draws", v.two_site_draws);
    v.delta_replicates = s.positive_int("delta_replicates", v.delta_replicates);
    v.simplicity_replicates = s.positive_int("simplicity_replicates", v.simplicity_replicates);
    v.null_average_replicates = s.positive_int("null_average_replicates", v.null_average_replicates);
    if (v.delta_replicates < 2) throw ConfigError(s.path("delta_replicates"), "must be >= 2");
  }
  validate(c);
  return c;
}

void validate(RunConfig& c) {
  const auto kind = c.topology.kind;
  const bool tree = kind == GraphKind::tree;
  const std::string name = to_string(c.command);
  if (c.workers < 1) throw ConfigError("workers", "must be >= 1");
  if (c.thresholds.fit_rungs > c.ladder.rungs || c.thresholds.plateau_rungs > c.ladder.rungs)
    throw ConfigError("ladder.rungs", "must cover thresholds.fit_rungs and thresholds.plateau_rungs");
  if (kind == GraphKind::custom) {
    try {
      make_custom(c.topology.N, c.topology.edges, c.topology.origin);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("topology", e.what());
    }
  }
  if (c.command == Command::verify_all) {
    c.canonical = canonical_json(c);
    return;
  }
  const std::size_t n = vertex_count(c.topology);
  const bool tree_route = tree && c.command != Command::green;
  if (tree_route && c.hopping != 1.0) throw ConfigError("hopping", name + " on a tree requires hopping = 1");
  if (!tree && n > 4096 && c.command != Command::lyapunov && c.command != Command::phase_scan)
    throw ConfigError("topology", name + " on a non-tree graph is limited to N <= 4096");

  switch (c.command) {
    case Command::green:
      if (n > 4096) throw ConfigError("topology", "green needs N <= 4096");
      if (c.green.x && *c.green.x >= n) throw ConfigError("green.x", "vertex out of range");
      break;
    case Command::dos:
      if (!c.dist.has_density()) throw ConfigError("dist.kind", "dos needs a law with a density");
      if (!(c.lambda > 0)) throw ConfigError("lambda", "dos needs lambda > 0");
      if (c.dos.estimator == DosEstimator::spectral_average && c.dist.kind != DistKind::uniform &&
          c.dist.kind != DistKind::cauchy)
        throw ConfigError("dos.estimator", "spectral_average supports uniform and cauchy laws only");
      break;
    case Command::gamma_scan: break;
    case Command::resonance:
      if (kind != GraphKind::tree && kind != GraphKind::box)
        throw ConfigError("topology.kind", "resonance needs a tree or box topology");
      if (tree && c.resonance.R > c.topology.D) throw ConfigError("resonance.R", "must be <= topology.D");
      if (!c.dist.has_density()) throw ConfigError("dist.kind", "resonance needs a law with a density");
      if (tree && c.resonance.boundary == TreeBoundary::real && !(c.lambda > 0))
        throw ConfigError("resonance.boundary", "the real boundary needs lambda > 0");
      break;
    case Command::lyapunov:
    case Command::phase_scan: {
      if (!tree) throw ConfigError("topology.kind", name + " needs a tree topology");
      const int d_min = c.command == Command::lyapunov ? c.lyapunov.d_min : c.phase_scan.d_min;
      const int d_max = c.command == Command::lyapunov ? c.lyapunov.d_max : c.phase_scan.d_max;
      const std::string sec = c.command == Command::lyapunov ? "lyapunov" : "phase_scan";
      if (d_max - d_min < 3) throw ConfigError(sec + ".d_max", "window must hold at least 4 distances");
      if (d_max > c.topology.D - 2) throw ConfigError(sec + ".d_max", "must be <= topology.D - 2");
      break;
    }
    case Command::verify_all: break;
  }
  c.canonical = canonical_json(c);
}

OperatorModel build_model(const RunConfig& c) {
  return OperatorModel{build_graph(c.topology), c.dist, c.lambda, c.seed, c.hopping};
}

}  // namespace resdeloc
