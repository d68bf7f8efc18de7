#include "otcl/config.hpp"

#include <cstdlib>
#include <future>
#include <map>
#include <set>

#include "otcl/flows.hpp"
#include "otcl/ot.hpp"

namespace otcl {

namespace {

constexpr const char* kVersion = "0.1.0";

bool log_enabled() {
  const char* v = std::getenv("OTCL_LOG");
  return v && *v && std::string(v) != "0";
}

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TaskOutput {
  std::string name, op;
  std::string outcome = "pass";
  bool errored = false;
  Json report;
  std::string csv;  // empty = no csv artifact
};

const std::set<std::string> kKnownOps = {
    "validate",  "ot",        "barycenter",      "interpolate", "flow",      "check_cd",
    "check_bcd", "check_evi", "check_evi_jensen", "check_logbm", "check_bs"};

class Runner {
 public:
  Runner(const Json& cfg, const RunOptions& opts) : cfg_(cfg), opts_(opts) {}

  int run() {
    try {
      resolve();
    } catch (const std::exception& e) {
      std::fprintf(stderr, "otcl: config schema error: %s\n", e.what());
      return kExitSchema;  // no partial outputs
    }

    std::vector<TaskOutput> outputs(tasks_.size());
    auto run_one = [&](size_t i) {
      try {
        outputs[i] = execute(tasks_[i], static_cast<int>(i));
      } catch (const std::exception& e) {
        outputs[i].name = task_name(tasks_[i], static_cast<int>(i));
        outputs[i].op = tasks_[i].value("op", "?");
        outputs[i].errored = true;
        outputs[i].outcome = "error";
        outputs[i].report = Json{{"error", e.what()}};
      }
    };
    if (opts_.parallel_tasks) {
      std::vector<std::future<void>> futs;
      for (size_t i = 0; i < tasks_.size(); ++i)
        futs.push_back(std::async(std::launch::async, run_one, i));
      for (auto& f : futs) f.get();
    } else {
      for (size_t i = 0; i < tasks_.size(); ++i) run_one(i);
    }

    std::filesystem::create_directories(opts_.out_dir);
    Json manifest_tasks = Json::array();
    int exit_code = kExitPass;
    bool any_fail = false, any_vacuous = false, any_error = false;
    for (const auto& out : outputs) {
      atomic_write(opts_.out_dir / (out.name + ".json"), dump_json_17(out.report));
      if (!out.csv.empty()) atomic_write(opts_.out_dir / (out.name + ".csv"), out.csv);
      manifest_tasks.push_back(Json{{"name", out.name}, {"op", out.op}, {"outcome", out.outcome}});
      if (log_enabled()) std::fprintf(stderr, "otcl: task %s: %s\n", out.name.c_str(), out.outcome.c_str());
      any_error |= out.errored || out.outcome == "constraint_failed";
      any_fail |= out.outcome == "fail";
      any_vacuous |= out.outcome == "vacuous";
    }
    exit_code = any_error ? kExitError : any_fail ? kExitFail : any_vacuous ? kExitVacuous : kExitPass;

    Json manifest;
    manifest["version"] = kVersion;
    manifest["seed"] = opts_.seed;
    Json inputs;
    for (const auto& [path, hash] : input_hashes_) inputs[path] = hash;
    manifest["inputs"] = std::move(inputs);
    manifest["config"] = content_hash(dump_json_17(cfg_));
    manifest["tasks"] = std::move(manifest_tasks);
    atomic_write(opts_.out_dir / "manifest.json", dump_json_17(manifest));
    return exit_code;
  }

  void note_input(const std::string& path, const std::string& hash) { input_hashes_[path] = hash; }

 private:
  // --- schema resolution (throws SchemaError; nothing written) ---

  Json load_inline_or_file(const Json& j, const char* what) {
    if (j.is_string()) {
      const auto path = j.get<std::string>();
      std::string bytes;
      try {
        bytes = read_file(path);
      } catch (const std::exception& e) {
        throw SchemaError(std::string(what) + ": " + e.what());
      }
      input_hashes_[path] = content_hash(bytes);
      return Json::parse(bytes);
    }
    return j;
  }

  void resolve() {
    if (!cfg_.is_object()) throw SchemaError("config must be a JSON object");
    if (cfg_.contains("seed") && !opts_.has_seed_override) opts_.seed = cfg_.at("seed").get<std::uint64_t>();
    if (cfg_.contains("tolerance") && std::isnan(opts_.tolerance))
      opts_.tolerance = cfg_.at("tolerance").get<double>();
    if (cfg_.contains("out") && opts_.out_dir == "reports")
      opts_.out_dir = cfg_.at("out").get<std::string>();

    if (cfg_.contains("space")) {
      space_ = space_from_json(load_inline_or_file(cfg_.at("space"), "space"));
      has_space_ = true;
    }
    if (cfg_.contains("measures"))
      for (auto it = cfg_.at("measures").begin(); it != cfg_.at("measures").end(); ++it)
        measures_.emplace(it.key(), measure_from_json(load_inline_or_file(it.value(), "measure")));
    if (cfg_.contains("omegas"))
      for (auto it = cfg_.at("omegas").begin(); it != cfg_.at("omegas").end(); ++it)
        omegas_.emplace(it.key(), omega_from_json(load_inline_or_file(it.value(), "omega"),
                                                  has_space_ ? &space_ : nullptr));
    if (cfg_.contains("energies"))
      for (auto it = cfg_.at("energies").begin(); it != cfg_.at("energies").end(); ++it)
        energies_.emplace(it.key(), energy_from_json(it.value()));

    if (!cfg_.contains("tasks")) throw SchemaError("config: missing tasks");
    for (const auto& t : cfg_.at("tasks")) {
      if (!t.is_object() || !t.contains("op")) throw SchemaError("task: missing op");
      const std::string op = t.at("op").get<std::string>();
      if (!kKnownOps.count(op)) throw SchemaError("task: unknown op '" + op + "'");
      check_task_schema(t, op);
      tasks_.push_back(t);
    }
    std::set<std::string> names;
    for (size_t i = 0; i < tasks_.size(); ++i) {
      const std::string n = task_name(tasks_[i], static_cast<int>(i));
      if (!names.insert(n).second) throw SchemaError("task: duplicate name '" + n + "'");
    }
  }

  void require_measure(const Json& t, const char* key) {
    if (!t.contains(key)) throw SchemaError(std::string("task: missing '") + key + "'");
    const std::string name = t.at(key).get<std::string>();
    if (!measures_.count(name)) throw SchemaError("task: undefined measure '" + name + "'");
  }

  void require_omega(const Json& t) {
    if (!t.contains("omega")) throw SchemaError("task: missing 'omega'");
    const std::string name = t.at("omega").get<std::string>();
    if (!omegas_.count(name)) throw SchemaError("task: undefined omega '" + name + "'");
  }

  void check_task_schema(const Json& t, const std::string& op) {
    if (t.contains("t_points") && t.at("t_points").get<int>() < 2)
      throw SchemaError("task: t_points must be >= 2");
    if (t.contains("epsilon") && number_from(t.at("epsilon")) < 0.0)
      throw SchemaError("task: epsilon must be >= 0");
    if (t.contains("tol") && !(number_from(t.at("tol")) > 0.0))
      throw SchemaError("task: tol must be > 0");
    if (op == "ot") {
      require_measure(t, "mu");
      require_measure(t, "nu");
    } else if (op == "check_cd" || op == "interpolate") {
      require_measure(t, "mu0");
      require_measure(t, "mu1");
    } else if (op == "barycenter" || op == "check_bcd") {
      require_omega(t);
    } else if (op == "check_evi" || op == "flow") {
      if (op == "check_evi") require_measure(t, "z");
      if (!t.contains("scheme")) throw SchemaError("task: missing 'scheme'");
      const std::string scheme = t.at("scheme").get<std::string>();
      if (scheme != "heat" && scheme != "ou" && scheme != "jko")
        throw SchemaError("task: unknown scheme '" + scheme + "'");
      require_measure(t, "start");
      if (scheme == "jko" && (!t.contains("tau") || !(number_from(t.at("tau")) > 0.0)))
        throw SchemaError("task: jko needs tau > 0");
      if (scheme == "jko" && (!t.contains("steps") || t.at("steps").get<int>() < 1))
        throw SchemaError("task: jko needs steps >= 1");
    } else if (op == "check_evi_jensen") {
      require_omega(t);
    } else if (op == "check_logbm") {
      if (!t.contains("sets") || !t.contains("lambdas")) throw SchemaError("task: logbm needs sets and lambdas");
    } else if (op == "check_bs") {
      if (!t.contains("functions") && !t.contains("quadratics"))
        throw SchemaError("task: bs needs functions or quadratics");
    }
    if (t.contains("energy")) {
      const std::string name = t.at("energy").get<std::string>();
      if (!energies_.count(name)) throw SchemaError("task: undefined energy '" + name + "'");
    }
  }

  static double number_from(const Json& j) { return j.get<double>(); }

  // one value per line, optionally comma separated
  static std::vector<double> values_from_csv(const std::string& bytes) {
    std::vector<double> vals;
    std::string tok;
    for (char c : bytes) {
      if (c == ',' || c == '\n' || c == '\r') {
        if (!tok.empty()) vals.push_back(std::stod(tok));
        tok.clear();
      } else {
        tok += c;
      }
    }
    if (!tok.empty()) vals.push_back(std::stod(tok));
    return vals;
  }

  EnergySpec energy_from_json(const Json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "boltzmann") return EnergySpec::boltzmann();
    if (kind == "potential") {
      if (j.contains("values")) {
        if (j.at("values").is_string()) {
          const auto path = j.at("values").get<std::string>();
          std::string bytes = read_file(path);
          input_hashes_[path] = content_hash(bytes);
          return EnergySpec::potential_energy(values_from_csv(bytes));
        }
        return EnergySpec::potential_energy(j.at("values").get<std::vector<double>>());
      }
      const std::string builtin = j.at("builtin").get<std::string>();
      const auto* grid = std::get_if<EuclideanGrid>(&space_);
      if (!grid) throw SchemaError("energy: built-in potentials need a grid space");
      const int n = grid->atom_count();
      std::vector<double> vals(static_cast<size_t>(n));
      if (builtin == "quadratic") {
        auto center = j.value("center", std::vector<double>(static_cast<size_t>(grid->dim), 0.0));
        const double scale = j.value("scale", 1.0);
        for (int a = 0; a < n; ++a) {
          auto x = grid->atom_coords(a);
          double s = 0.0;
          for (int d = 0; d < grid->dim; ++d) {
            double diff = x[static_cast<size_t>(d)] - center[static_cast<size_t>(d)];
            s += diff * diff;
          }
          vals[static_cast<size_t>(a)] = scale * s;
        }
      } else if (builtin == "linear") {
        auto slope = j.at("a").get<std::vector<double>>();
        const double b = j.value("b", 0.0);
        for (int a = 0; a < n; ++a) {
          auto x = grid->atom_coords(a);
          double s = b;
          for (int d = 0; d < grid->dim; ++d) s += slope[static_cast<size_t>(d)] * x[static_cast<size_t>(d)];
          vals[static_cast<size_t>(a)] = s;
        }
      } else {
        throw SchemaError("energy: unknown builtin '" + builtin + "'");
      }
      return EnergySpec::potential_energy(std::move(vals));
    }
    if (kind == "internal") {
      const std::string builtin = j.at("builtin").get<std::string>();
      if (builtin == "power") {
        const double p = j.at("p").get<double>();
        if (!(p >= 1.0)) throw SchemaError("energy: power exponent must be >= 1");
        return EnergySpec::internal([p](double x) { return std::pow(x, p); });
      }
      if (builtin == "boltzmann")
        return EnergySpec::internal([](double x) { return x > 0.0 ? x * std::log(x) : 0.0; });
      throw SchemaError("energy: unknown builtin '" + builtin + "'");
    }
    throw SchemaError("energy: unknown kind '" + kind + "'");
  }

  // --- execution ---

  static std::string task_name(const Json& t, int index) {
    if (t.contains("name")) return t.at("name").get<std::string>();
    return "task" + std::to_string(index) + "_" + t.value("op", "op");
  }

  const GroundSpace& space() const {
    if (!has_space_) throw PreconditionError("task requires a space in the config");
    return space_;
  }

  const MeasureVariant& measure(const Json& t, const char* key) const {
    return measures_.at(t.at(key).get<std::string>());
  }

  const DiscreteMeasure& discrete(const Json& t, const char* key) const {
    const auto* d = std::get_if<DiscreteMeasure>(&measure(t, key));
    if (!d) throw PreconditionError(std::string("task: '") + key + "' must be a discrete measure");
    return *d;
  }

  EnergySpec energy_for(const Json& t) const {
    if (t.contains("energy")) return energies_.at(t.at("energy").get<std::string>());
    return EnergySpec::boltzmann();
  }

  static GaussianReference reference_for(const Json& t) {
    const std::string r = t.value("reference", "gaussian");
    if (r == "lebesgue") return GaussianReference::lebesgue;
    if (r == "gaussian") return GaussianReference::standard_gaussian;
    throw PreconditionError("task: unknown reference '" + r + "'");
  }

  std::vector<double> t_grid_for(const Json& t) const {
    if (t.contains("t_grid")) return t.at("t_grid").get<std::vector<double>>();
    return uniform_grid(t.value("t_points", 17));
  }

  CheckOptions check_opts(const Json& t) const {
    CheckOptions o;
    if (t.contains("tol"))
      o.tolerance = t.at("tol").get<double>();
    else if (!std::isnan(opts_.tolerance))
      o.tolerance = opts_.tolerance;
    return o;
  }

  std::vector<int> support_for(const Json& t) const {
    if (!t.contains("support") || (t.at("support").is_string() && t.at("support") == "full"))
      return all_atoms(space());
    return t.at("support").get<std::vector<int>>();
  }

  WassersteinCurve curve_for(const Json& t) const {
    if (!t.contains("scheme"))
      throw PreconditionError("task: a flow scheme (heat|ou|jko) is required for this curve");
    const std::string scheme = t.at("scheme").get<std::string>();
    if (scheme == "jko") {
      FlowSpec spec = FlowSpec::jko(energy_for(t), t.at("tau").get<double>(), t.at("steps").get<int>());
      return jko_trajectory(space(), discrete(t, "start"), spec);
    }
    const auto& g = std::get<GaussianMeasure>(measure(t, "start"));
    std::vector<double> times = t.value("times", std::vector<double>{});
    if (times.empty()) {
      times.resize(10);
      for (int i = 0; i < 10; ++i) times[static_cast<size_t>(i)] = 0.1 * double(i + 1);
    }
    return gaussian_flow_curve(g, scheme == "heat" ? FlowSpec::Scheme::closed_form_heat
                                                   : FlowSpec::Scheme::closed_form_ou,
                               times);
  }

  BarycenterResult barycenter_for(const Json& t, const MixtureOmega& omega) const {
    std::string solver = t.value("solver", omega.gaussian() ? "gaussian" : "fixed_support");
    if (solver == "gaussian") return gaussian_barycenter(omega);
    if (solver == "fixed_support") return barycenter_fixed_support(space(), omega, support_for(t));
    if (solver == "multimarginal") return barycenter_multimarginal(space(), omega);
    if (solver == "sinkhorn")
      return barycenter_sinkhorn(space(), omega, support_for(t),
                                 t.value("epsilon", 1e-3), t.value("certify", false));
    throw PreconditionError("task: unknown barycenter solver '" + solver + "'");
  }

  TaskOutput finish_check(TaskOutput out, CheckReport rep) const {
    out.outcome = to_string(rep.outcome);
    out.report = report_to_json(rep);
    out.csv = report_to_csv(rep);
    return out;
  }

  TaskOutput execute(const Json& t, int index) {
    TaskOutput out;
    out.name = task_name(t, index);
    const std::string op = t.at("op").get<std::string>();
    out.op = op;

    if (op == "validate") {
      ValidationReport rep = validate_space(space(), t.value("force_triangle", false));
      Json v = Json::array();
      for (const auto& viol : rep.violations)
        v.push_back(Json{{"rule", viol.rule}, {"indices", viol.indices}, {"detail", viol.detail}});
      out.report = Json{{"valid", rep.valid()},
                        {"triangle_checked", rep.triangle_checked},
                        {"violations", std::move(v)}};
      out.outcome = rep.valid() ? "pass" : "fail";
      return out;
    }

    if (op == "ot") {
      const std::string solver = t.value("solver", "exact");
      try {
        TransportPlan plan;
        if (solver == "exact")
          plan = solve_ot_exact(space(), discrete(t, "mu"), discrete(t, "nu"));
        else if (solver == "entropic")
          plan = solve_ot_entropic(space(), discrete(t, "mu"), discrete(t, "nu"),
                                   t.at("epsilon").get<double>());
        else if (solver == "bruteforce")
          plan = oracle_ot_bruteforce(space(), discrete(t, "mu"), discrete(t, "nu"));
        else
          throw PreconditionError("task: unknown ot solver '" + solver + "'");
        out.report = Json{{"cost", plan.cost},
                          {"w2", std::sqrt(std::max(0.0, plan.cost))},
                          {"max_marginal_violation", plan.max_marginal_violation},
                          {"converged", plan.converged},
                          {"epsilon", plan.epsilon},
                          {"infeasible", false}};
        if (plan.matrix.size() <= 10000) {
          Json cells = Json::array();
          for (size_t i = 0; i < plan.source.size(); ++i)
            for (size_t j = 0; j < plan.target.size(); ++j)
              if (plan.at(i, j) > 0.0)
                cells.push_back(Json::array(
                    {plan.source.support[i], plan.target.support[j], plan.at(i, j)}));
          out.report["plan"] = std::move(cells);
        }
      } catch (const InfeasibleError&) {
        out.report = Json{{"infeasible", true}, {"w2", "inf"}, {"cost", "inf"}};
      }
      return out;
    }

    if (op == "barycenter") {
      const auto& omega = omegas_.at(t.at("omega").get<std::string>());
      out.report = barycenter_result_to_json(barycenter_for(t, omega));
      return out;
    }

    if (op == "interpolate") {
      const auto& m0 = measure(t, "mu0");
      const auto& m1 = measure(t, "mu1");
      auto grid = t_grid_for(t);
      WassersteinCurve curve;
      double budget = 0.0;
      if (std::holds_alternative<GaussianMeasure>(m0)) {
        curve = gaussian_geodesic_curve(std::get<GaussianMeasure>(m0),
                                        std::get<GaussianMeasure>(m1), grid);
      } else {
        TransportPlan plan = solve_ot_exact(space(), std::get<DiscreteMeasure>(m0),
                                            std::get<DiscreteMeasure>(m1));
        curve = geodesic_curve(space(), plan, grid, &budget);
      }
      out.report = Json{{"points", curve.size()}, {"snap_budget", budget}};
      out.csv = curve_to_csv(curve);
      return out;
    }

    if (op == "flow") {
      WassersteinCurve curve = curve_for(t);
      out.report = Json{{"points", curve.size()}};
      out.csv = curve_to_csv(curve);
      return out;
    }

    if (op == "check_cd") {
      const auto& m0 = measure(t, "mu0");
      const auto& m1 = measure(t, "mu1");
      const double K = t.at("K").get<double>();
      CheckReport rep;
      if (std::holds_alternative<GaussianMeasure>(m0))
        rep = check_cd_gaussian(reference_for(t), std::get<GaussianMeasure>(m0),
                                std::get<GaussianMeasure>(m1), K, t_grid_for(t), check_opts(t));
      else
        rep = check_cd(space(), std::get<DiscreteMeasure>(m0), std::get<DiscreteMeasure>(m1), K,
                       t_grid_for(t), check_opts(t));
      return finish_check(std::move(out), std::move(rep));
    }

    if (op == "check_bcd") {
      const auto& omega = omegas_.at(t.at("omega").get<std::string>());
      const double K = t.at("K").get<double>();
      BarycenterResult bary = barycenter_for(t, omega);
      CheckReport rep = omega.gaussian()
                            ? check_jensen_bcd_gaussian(reference_for(t), omega, K, bary, check_opts(t))
                            : check_jensen_bcd(space(), omega, K, bary, check_opts(t));
      TaskOutput done = finish_check(std::move(out), std::move(rep));
      done.report["barycenter"] = barycenter_result_to_json(bary);
      return done;
    }

    if (op == "check_evi") {
      WassersteinCurve curve = curve_for(t);
      const auto& z = measure(t, "z");
      const double K = t.at("K").get<double>();
      CheckReport rep;
      if (std::holds_alternative<GaussianMeasure>(z))
        rep = check_evi_integral_gaussian(reference_for(t), curve, std::get<GaussianMeasure>(z),
                                          energy_for(t), K, check_opts(t));
      else
        rep = check_evi_integral(space(), curve, std::get<DiscreteMeasure>(z), energy_for(t), K,
                                 check_opts(t));
      return finish_check(std::move(out), std::move(rep));
    }

    if (op == "check_evi_jensen") {
      const auto& omega = omegas_.at(t.at("omega").get<std::string>());
      const double K = t.at("K").get<double>();
      const double eps = t.value("epsilon", 0.0);
      BarycenterResult bary = barycenter_for(t, omega);
      double var_est = t.contains("var_est") ? t.at("var_est").get<double>() : bary.objective;
      CheckReport rep;
      if (omega.gaussian()) {
        const auto& y0 = t.contains("start") ? std::get<GaussianMeasure>(measure(t, "start"))
                                             : std::get<GaussianMeasure>(bary.measure);
        std::vector<double> times = t.value("times", std::vector<double>{});
        if (times.empty()) {
          times.resize(10);
          for (int i = 0; i < 10; ++i) times[static_cast<size_t>(i)] = 0.1 * double(i + 1);
        }
        WassersteinCurve curve = gaussian_flow_curve(y0, FlowSpec::Scheme::closed_form_ou, times);
        rep = check_evi_jensen_bound_gaussian(reference_for(t), curve, omega, energy_for(t), K, eps,
                                              var_est, check_opts(t));
      } else {
        WassersteinCurve curve = curve_for(t);
        rep = check_evi_jensen_bound(space(), curve, omega, energy_for(t), K, eps, var_est,
                                     check_opts(t));
      }
      return finish_check(std::move(out), std::move(rep));
    }

    if (op == "check_logbm") {
      auto sets = t.at("sets").get<std::vector<std::vector<int>>>();
      auto lambdas = t.at("lambdas").get<std::vector<double>>();
      return finish_check(std::move(out), check_logbm(space(), sets, lambdas, check_opts(t)));
    }

    if (op == "check_bs") {
      if (t.contains("quadratics")) {
        std::vector<QuadraticF> fs;
        for (const auto& q : t.at("quadratics"))
          fs.push_back({q.value("a", 0.0), q.value("b", 0.0), q.value("c", 0.0)});
        return finish_check(std::move(out), check_blaschke_santalo_gaussian(fs, check_opts(t)));
      }
      auto fns = t.at("functions").get<std::vector<std::vector<double>>>();
      return finish_check(std::move(out), check_blaschke_santalo(space(), fns, check_opts(t)));
    }

    throw PreconditionError("task: unhandled op '" + op + "'");
  }

  Json cfg_;
  RunOptions opts_;
  GroundSpace space_;
  bool has_space_ = false;
  std::map<std::string, MeasureVariant> measures_;
  std::map<std::string, MixtureOmega> omegas_;
  std::map<std::string, EnergySpec> energies_;
  std::map<std::string, std::string> input_hashes_;
  std::vector<Json> tasks_;
};

}  // namespace

int run_config_json(const Json& config, const RunOptions& opts) {
  Runner r(config, opts);
  return r.run();
}

int run_config(const std::filesystem::path& config_path, RunOptions opts) {
  std::string bytes;
  try {
    bytes = read_file(config_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "otcl: %s\n", e.what());
    return kExitSchema;
  }
  Json cfg;
  try {
    cfg = Json::parse(bytes);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "otcl: config parse error: %s\n", e.what());
    return kExitSchema;
  }
  return run_config_json(cfg, opts);
}

}  // namespace otcl
