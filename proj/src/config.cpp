#include "sdeest/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "sdeest/csv.hpp"
#include "sdeest/error.hpp"

namespace sdeest {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"model", {"name"}},
      {"simulation", {"alpha", "beta", "x0", "horizon", "step", "seed"}},
      {"estimation",
       {"start_alpha", "start_beta", "pipelines", "qmle_regularization", "cls_regularization",
        "regularization_center_beta", "derivative_backend"}},
      {"optimizer",
       {"initial_step", "step_divisor", "acceleration", "tol", "max_evals", "alpha_min", "alpha_max", "beta_min",
        "beta_max"}},
      {"experiment", {"replications", "workers"}},
      {"surface", {"objective", "regularization", "alpha_min", "alpha_max", "beta_min", "beta_max", "resolution"}},
      {"output", {"trajectory", "report", "surface", "summary", "replications", "trace"}},
  };
  return keys;
}

class Section {
 public:
  Section(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  std::optional<std::string> text(const std::string& key) const {
    if (!tree_) return std::nullopt;
    const auto v = tree_->get_optional<std::string>(key);
    if (!v) return std::nullopt;
    std::string s = *v;
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.pop_back();
    while (!s.empty() && s.front() == ' ') s.erase(s.begin());
    return s;
  }

  void real(const std::string& key, double& target) const {
    if (const auto v = text(key)) {
      if (!csv::parse_real(*v, target) || !std::isfinite(target)) fail(key, *v, "a finite number");
    }
  }

  template <class Int>
  void integer(const std::string& key, Int& target) const {
    if (const auto v = text(key)) {
      long long parsed = 0;
      std::istringstream in(*v);
      if (!(in >> parsed) || !in.eof() || parsed < 0) fail(key, *v, "a non-negative integer");
      target = static_cast<Int>(parsed);
    }
  }

  void string(const std::string& key, std::string& target) const {
    if (const auto v = text(key)) target = *v;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& value, const char* expected) const {
    throw ConfigError(fmt::format("[{}] {} = '{}': expected {}", name_, key, value, expected));
  }

 private:
  const pt::ptree* tree_;
  std::string name_;
};

}  // namespace

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RunConfig parse_run_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("config line {}: {}", e.line(), e.message()));
  }

  for (const auto& [section, body] : tree) {
    const auto it = schema().find(section);
    if (it == schema().end()) {
      if (body.empty()) throw ConfigError(fmt::format("config: key '{}' outside any section", section));
      throw ConfigError(fmt::format("config: unknown section [{}]", section));
    }
    for (const auto& [key, value] : body) {
      (void)value;
      if (!it->second.count(key)) throw ConfigError(fmt::format("config: unknown key '{}' in [{}]", key, section));
    }
  }
  const auto section = [&](const std::string& name) {
    const auto child = tree.get_child_optional(name);
    return Section(child ? &*child : nullptr, name);
  };

  RunConfig cfg;
  cfg.source_hash = fnv1a(text);

  section("model").string("name", cfg.model);
  builtin_model(cfg.model);

  const Section sim = section("simulation");
  sim.real("alpha", cfg.sim.theta_true.alpha);
  sim.real("beta", cfg.sim.theta_true.beta);
  sim.real("x0", cfg.sim.x0);
  sim.real("horizon", cfg.sim.horizon);
  sim.real("step", cfg.sim.step);
  sim.integer("seed", cfg.sim.seed);
  if (!(cfg.sim.step > 0.0)) sim.fail("step", csv::real(cfg.sim.step), "a positive step");
  if (!(cfg.sim.horizon > 0.0)) sim.fail("horizon", csv::real(cfg.sim.horizon), "a positive horizon");

  const Section est = section("estimation");
  est.real("start_alpha", cfg.settings.start.alpha);
  est.real("start_beta", cfg.settings.start.beta);
  if (const auto p = est.text("pipelines")) cfg.pipelines = parse_pipelines(*p);
  est.real("qmle_regularization", cfg.settings.qmle_regularization);
  est.real("cls_regularization", cfg.settings.cls_regularization);
  if (cfg.settings.qmle_regularization < 0.0 || cfg.settings.cls_regularization < 0.0) {
    throw ConfigError("[estimation] regularization weights must be >= 0");
  }
  if (est.text("regularization_center_beta")) {
    double center = 0.0;
    est.real("regularization_center_beta", center);
    cfg.settings.regularization_center = Theta{cfg.settings.start.alpha, center};
  }
  if (const auto b = est.text("derivative_backend")) {
    if (*b == "finite-difference") {
      cfg.settings.backend = DerivativeBackend::FiniteDifference;
    } else if (*b == "analytic") {
      cfg.settings.backend = DerivativeBackend::Analytic;
    } else {
      est.fail("derivative_backend", *b, "finite-difference or analytic");
    }
  }

  const Section opt = section("optimizer");
  HjConfig& hj = cfg.settings.optimizer;
  double initial = hj.initial_step.alpha;
  opt.real("initial_step", initial);
  hj.initial_step = {initial, initial};
  opt.real("step_divisor", hj.step_divisor);
  opt.real("acceleration", hj.acceleration);
  opt.real("tol", hj.tol);
  opt.integer("max_evals", hj.max_evals);
  const bool any_bound = opt.text("alpha_min") || opt.text("alpha_max") || opt.text("beta_min") || opt.text("beta_max");
  if (any_bound) {
    constexpr double big = std::numeric_limits<double>::max();
    Box box{{-big, -big}, {big, big}};
    opt.real("alpha_min", box.lo.alpha);
    opt.real("alpha_max", box.hi.alpha);
    opt.real("beta_min", box.lo.beta);
    opt.real("beta_max", box.hi.beta);
    hj.bounds = box;
  }

  const Section exp = section("experiment");
  exp.integer("replications", cfg.replications);
  if (exp.text("workers")) {
    unsigned w = 1;
    exp.integer("workers", w);
    cfg.workers = w;
  }

  const Section surf = section("surface");
  if (const auto o = surf.text("objective")) cfg.surface_objective = parse_objective(*o);
  surf.real("regularization", cfg.surface_regularization);
  surf.real("alpha_min", cfg.surface.alpha.lo);
  surf.real("alpha_max", cfg.surface.alpha.hi);
  surf.real("beta_min", cfg.surface.beta.lo);
  surf.real("beta_max", cfg.surface.beta.hi);
  int resolution = cfg.surface.alpha_points;
  surf.integer("resolution", resolution);
  if (resolution < 2) surf.fail("resolution", std::to_string(resolution), "at least 2 points per axis");
  cfg.surface.alpha_points = cfg.surface.beta_points = resolution;

  const Section out = section("output");
  out.string("trajectory", cfg.out_trajectory);
  out.string("report", cfg.out_report);
  out.string("surface", cfg.out_surface);
  out.string("summary", cfg.out_summary);
  out.string("replications", cfg.out_replications);
  out.string("trace", cfg.out_trace);
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

ExperimentConfig RunConfig::experiment(unsigned default_workers) const {
  ExperimentConfig e;
  e.model = model;
  e.sim = sim;
  e.replications = replications;
  e.pipelines = pipelines;
  e.settings = settings;
  e.workers = workers.value_or(default_workers);
  return e;
}

}  // namespace sdeest
