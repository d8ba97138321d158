#include <dualflow/config.hpp>

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include <dualflow/expr.hpp>

namespace dualflow {

namespace {

using nlohmann::json;

std::string join_errors(const std::vector<SchemaError>& errors) {
  std::ostringstream os;
  os << "config has " << errors.size() << " problem" << (errors.size() == 1 ? "" : "s");
  for (const auto& e : errors) os << "\n  " << (e.path.empty() ? "<root>" : e.path) << ": " << e.message;
  return os.str();
}

class Collector {
 public:
  std::vector<SchemaError> errors;

  void add(std::string path, std::string message) { errors.push_back({std::move(path), std::move(message)}); }

  void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool known = false;
      for (const char* a : allowed) {
        if (it.key() == a) {
          known = true;
          break;
        }
      }
      if (!known) add(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
    }
  }

  const json* object(const json& obj, const std::string& path, const char* key, bool required) {
    if (!obj.contains(key)) {
      if (required) add(path + "." + key, "required object is missing");
      return nullptr;
    }
    const json& v = obj.at(key);
    if (!v.is_object()) {
      add(path + "." + key, "expected an object");
      return nullptr;
    }
    return &v;
  }

  std::optional<double> num(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_number()) {
      add(path + "." + key, "expected a number");
      return std::nullopt;
    }
    return v.get<double>();
  }

  std::optional<std::string> str(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_string()) {
      add(path + "." + key, "expected a string");
      return std::nullopt;
    }
    return v.get<std::string>();
  }

  std::optional<bool> boolean(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_boolean()) {
      add(path + "." + key, "expected a boolean");
      return std::nullopt;
    }
    return v.get<bool>();
  }

  std::optional<std::vector<double>> num_array(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_array()) {
      add(path + "." + key, "expected an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) {
        add(path + "." + key, "expected an array of numbers");
        return std::nullopt;
      }
      out.push_back(e.get<double>());
    }
    return out;
  }
};

void parse_problem(Collector& c, const json& top, RunConfig& cfg) {
  const json* prob = c.object(top, "", "problem", true);
  if (!prob) return;
  c.reject_unknown(*prob, "problem", {"n", "p", "q", "f", "phi", "G"});

  if (auto n = c.num(*prob, "problem", "n")) {
    if (*n == 2.0 || *n == 3.0) {
      cfg.dim = static_cast<int>(*n);
    } else {
      c.add("problem.n", "dimension must be 2 or 3");
    }
  } else if (!prob->contains("n")) {
    c.add("problem.n", "required");
  }

  const bool has_p = prob->contains("p"), has_phi = prob->contains("phi");
  if (has_p == has_phi) {
    c.add("problem", has_p ? "give either p or phi, not both" : "a weight is required: p or phi");
  } else if (has_p) {
    cfg.p = c.num(*prob, "problem", "p");
  } else if (const json* phi = c.object(*prob, "problem", "phi", true)) {
    c.reject_unknown(*phi, "problem.phi", {"kind", "p", "s", "values"});
    const auto kind = c.str(*phi, "problem.phi", "kind").value_or("");
    if (kind == "power") {
      cfg.p = c.num(*phi, "problem.phi", "p");
      if (!cfg.p) c.add("problem.phi.p", "required for the power kind");
    } else if (kind == "table") {
      auto s = c.num_array(*phi, "problem.phi", "s");
      auto v = c.num_array(*phi, "problem.phi", "values");
      if (s && v && s->size() == v->size() && s->size() >= 2) {
        cfg.weight_s = std::move(*s);
        cfg.weight_phi = std::move(*v);
      } else {
        c.add("problem.phi", "table needs s and values arrays of equal length >= 2");
      }
    } else {
      c.add("problem.phi.kind", "expected \"power\" or \"table\"");
    }
  }

  const bool has_q = prob->contains("q"), has_G = prob->contains("G");
  if (has_q == has_G) {
    c.add("problem", has_q ? "give either q or G, not both" : "a density is required: q or G");
  } else if (has_q) {
    cfg.q = c.num(*prob, "problem", "q");
  } else if (const json* G = c.object(*prob, "problem", "G", true)) {
    c.reject_unknown(*G, "problem.G", {"kind", "q", "r", "values"});
    const auto kind = c.str(*G, "problem.G", "kind").value_or("");
    if (kind == "radial_power") {
      cfg.q = c.num(*G, "problem.G", "q");
      if (!cfg.q) c.add("problem.G.q", "required for the radial_power kind");
    } else if (kind == "radial_table") {
      auto r = c.num_array(*G, "problem.G", "r");
      auto v = c.num_array(*G, "problem.G", "values");
      if (r && v && r->size() == v->size() && r->size() >= 2) {
        cfg.density_r = std::move(*r);
        cfg.density_g = std::move(*v);
      } else {
        c.add("problem.G", "table needs r and values arrays of equal length >= 2");
      }
    } else {
      c.add("problem.G.kind", "expected \"radial_power\" or \"radial_table\"");
    }
  }

  if (auto f = c.str(*prob, "problem", "f")) {
    cfg.f = *f;
    try {
      AngularExpr::parse(cfg.f);
    } catch (const std::invalid_argument& e) {
      c.add("problem.f", e.what());
    }
  }
}

void parse_grid(Collector& c, const json& top, RunConfig& cfg) {
  const json* grid = c.object(top, "", "grid", true);
  if (!grid) return;
  c.reject_unknown(*grid, "grid", {"N"});
  if (auto n = c.num(*grid, "grid", "N")) {
    const auto nodes = static_cast<std::size_t>(*n);
    if (*n != static_cast<double>(nodes) || nodes < 16 || nodes % 2 != 0) {
      c.add("grid.N", "node count must be an even integer >= 16");
    } else {
      cfg.nodes = nodes;
    }
  } else if (!grid->contains("N")) {
    c.add("grid.N", "required");
  }
}

void parse_flow(Collector& c, const json& top, RunConfig& cfg) {
  const json* flow = c.object(top, "", "flow", false);
  if (!flow) return;
  c.reject_unknown(*flow, "flow",
                   {"dt_init", "dt_min", "dt_max", "safety", "tol_conv", "tol_energy", "max_steps", "renormalize"});
  if (auto v = c.num(*flow, "flow", "dt_init")) cfg.flow.dt_init = *v;
  if (auto v = c.num(*flow, "flow", "dt_min")) cfg.flow.dt_min = *v;
  if (auto v = c.num(*flow, "flow", "dt_max")) cfg.flow.dt_max = *v;
  if (auto v = c.num(*flow, "flow", "safety")) cfg.flow.safety = *v;
  if (auto v = c.num(*flow, "flow", "tol_conv")) cfg.flow.tol_conv = *v;
  if (auto v = c.num(*flow, "flow", "tol_energy")) cfg.flow.tol_energy = *v;
  if (auto v = c.num(*flow, "flow", "max_steps")) {
    if (*v < 0 || *v != static_cast<double>(static_cast<std::size_t>(*v))) {
      c.add("flow.max_steps", "expected a nonnegative integer");
    } else {
      cfg.flow.max_steps = static_cast<std::size_t>(*v);
    }
  }
  if (auto v = c.str(*flow, "flow", "renormalize")) {
    if (*v == "none") {
      cfg.flow.renormalize = FlowConfig::Renormalize::none;
    } else if (*v == "dual-volume") {
      cfg.flow.renormalize = FlowConfig::Renormalize::dual_volume;
    } else {
      c.add("flow.renormalize", "expected \"none\" or \"dual-volume\"");
    }
  }
  try {
    cfg.flow.validate();
  } catch (const std::invalid_argument& e) {
    c.add("flow", e.what());
  }
}

void parse_init(Collector& c, const json& top, RunConfig& cfg) {
  const json* init = c.object(top, "", "init", false);
  if (!init) return;
  c.reject_unknown(*init, "init", {"shape", "r", "a", "b", "c", "eps", "modes", "amp"});
  const auto shape = c.str(*init, "init", "shape").value_or("");
  if (shape == "ball") {
    cfg.initial = Ball{c.num(*init, "init", "r").value_or(1.0)};
  } else if (shape == "ellipse") {
    cfg.initial = Ellipse{c.num(*init, "init", "a").value_or(1.0), c.num(*init, "init", "b").value_or(1.0)};
  } else if (shape == "ellipsoid") {
    cfg.initial = Ellipsoid{c.num(*init, "init", "a").value_or(1.0), c.num(*init, "init", "c").value_or(1.0)};
  } else if (shape == "perturbed") {
    auto eps = c.num_array(*init, "init", "eps");
    if (eps) {
      cfg.initial = Perturbed{std::move(*eps)};
    } else {
      c.add("init.eps", "required for the perturbed shape");
    }
  } else if (shape == "random") {
    RandomPerturbed rp;
    if (auto m = c.num(*init, "init", "modes")) rp.modes = static_cast<int>(*m);
    if (auto a = c.num(*init, "init", "amp")) rp.amp = *a;
    rp.seed = cfg.seed;
    cfg.initial = rp;
  } else {
    c.add("init.shape", "expected ball, ellipse, ellipsoid, perturbed, or random");
  }
}

void parse_output(Collector& c, const json& top, RunConfig& cfg) {
  const json* out = c.object(top, "", "output", false);
  if (!out) return;
  c.reject_unknown(*out, "output", {"dir", "plotdata"});
  if (auto d = c.str(*out, "output", "dir")) cfg.out_dir = *d;
  if (auto p = c.boolean(*out, "output", "plotdata")) cfg.plotdata = *p;
}

}  // namespace

ConfigError::ConfigError(std::vector<SchemaError> errors_in)
    : std::runtime_error(join_errors(errors_in)), errors(std::move(errors_in)) {}

RunConfig parse_config(const std::string& json_text) {
  json top = json::parse(json_text, nullptr, false);
  if (top.is_discarded()) throw ConfigError(std::vector<SchemaError>{{"", "not valid JSON"}});
  if (!top.is_object()) throw ConfigError(std::vector<SchemaError>{{"", "top level must be an object"}});

  Collector c;
  RunConfig cfg;
  c.reject_unknown(top, "", {"problem", "grid", "flow", "init", "output", "seed"});

  if (top.contains("seed")) {
    const json& s = top.at("seed");
    if (s.is_number_unsigned()) {
      cfg.seed = s.get<std::uint64_t>();
    } else {
      c.add("seed", "expected a nonnegative integer");
    }
  }

  parse_problem(c, top, cfg);
  parse_grid(c, top, cfg);
  parse_flow(c, top, cfg);
  parse_init(c, top, cfg);  // after seed: the random shape captures it
  parse_output(c, top, cfg);

  // Semantic checks need constructed objects, so they only run once the
  // field-level pass is clean; each failure keeps its own schema path.
  if (c.errors.empty()) {
    const SphericalGrid grid(cfg.dim, cfg.nodes);
    try {
      const AngularExpr f = AngularExpr::parse(cfg.f);
      double worst = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double a = f.eval(grid.theta()[i]);
        if (!(a > 0.0) || !std::isfinite(a)) {
          c.add("problem.f", "must be positive and finite on the grid");
          worst = 0.0;
          break;
        }
        worst = std::max(worst, std::abs(a - f.eval(grid.theta()[grid.antipode(i)])));
      }
      if (worst > 1e-12) {
        std::ostringstream os;
        os << "not even under the antipodal map (mismatch " << worst << ")";
        c.add("problem.f", os.str());
      }
    } catch (const std::invalid_argument&) {
      // already reported by the field-level pass
    }

    std::optional<OrliczWeight> weight;
    std::optional<DualDensity> density;
    try {
      weight = cfg.p ? OrliczWeight::power_law(*cfg.p) : OrliczWeight::tabulated(cfg.weight_s, cfg.weight_phi);
    } catch (const std::exception& e) {
      c.add(cfg.p ? "problem.p" : "problem.phi", e.what());
    }
    try {
      density = cfg.q ? DualDensity::radial_power(cfg.dim, *cfg.q)
                      : DualDensity::radial_table(cfg.dim, cfg.density_r, cfg.density_g);
    } catch (const std::exception& e) {
      c.add(cfg.q ? "problem.q" : "problem.G", e.what());
    }
    if (weight && density) {
      try {
        classify_case(*weight, *density);
      } catch (const CaseMismatch& e) {
        c.add("problem", e.what());
      }
    }
  }

  if (!c.errors.empty()) throw ConfigError(std::move(c.errors));
  return cfg;
}

ProblemSpec build_problem(const RunConfig& config) {
  auto grid = std::make_shared<SphericalGrid>(config.dim, config.nodes);
  OrliczWeight weight =
      config.p ? OrliczWeight::power_law(*config.p) : OrliczWeight::tabulated(config.weight_s, config.weight_phi);
  DualDensity density = config.q ? DualDensity::radial_power(config.dim, *config.q)
                                 : DualDensity::radial_table(config.dim, config.density_r, config.density_g);
  const AngularExpr f = AngularExpr::parse(config.f);
  std::vector<double> samples(grid->size());
  for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = f.eval(grid->theta()[i]);
  return ProblemSpec(std::move(grid), std::move(weight), std::move(density), std::move(samples));
}

std::string resolved_config_json(const RunConfig& config) {
  json problem;
  problem["n"] = config.dim;
  if (config.p) {
    problem["p"] = *config.p;
  } else {
    problem["phi"] = {{"kind", "table"}, {"s", config.weight_s}, {"values", config.weight_phi}};
  }
  if (config.q) {
    problem["q"] = *config.q;
  } else {
    problem["G"] = {{"kind", "radial_table"}, {"r", config.density_r}, {"values", config.density_g}};
  }
  problem["f"] = config.f;

  json init;
  if (const auto* b = std::get_if<Ball>(&config.initial)) {
    init = {{"shape", "ball"}, {"r", b->r}};
  } else if (const auto* e = std::get_if<Ellipse>(&config.initial)) {
    init = {{"shape", "ellipse"}, {"a", e->a}, {"b", e->b}};
  } else if (const auto* e = std::get_if<Ellipsoid>(&config.initial)) {
    init = {{"shape", "ellipsoid"}, {"a", e->a}, {"c", e->c}};
  } else if (const auto* p = std::get_if<Perturbed>(&config.initial)) {
    init = {{"shape", "perturbed"}, {"eps", p->eps}};
  } else if (const auto* r = std::get_if<RandomPerturbed>(&config.initial)) {
    init = {{"shape", "random"}, {"modes", r->modes}, {"amp", r->amp}};
  }

  json j;
  j["problem"] = std::move(problem);
  j["grid"] = {{"N", config.nodes}};
  j["flow"] = {{"dt_init", config.flow.dt_init},
               {"dt_min", config.flow.dt_min},
               {"dt_max", config.flow.dt_max},
               {"safety", config.flow.safety},
               {"tol_conv", config.flow.tol_conv},
               {"tol_energy", config.flow.tol_energy},
               {"max_steps", config.flow.max_steps},
               {"renormalize",
                config.flow.renormalize == FlowConfig::Renormalize::dual_volume ? "dual-volume" : "none"}};
  j["init"] = std::move(init);
  j["output"] = {{"dir", config.out_dir}, {"plotdata", config.plotdata}};
  j["seed"] = config.seed;
  return j.dump(2);
}

}  // namespace dualflow
