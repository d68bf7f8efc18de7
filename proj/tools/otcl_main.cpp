#include <CLI11.hpp>

#include "otcl/config.hpp"
#include "otcl/kernels.hpp"

namespace {

using otcl::Json;

struct CommonArgs {
  std::string space_path;
  std::string out_dir = "reports";
  std::uint64_t seed = 0;
  bool seed_set = false;
  double tol = std::numeric_limits<double>::quiet_NaN();
  bool parallel = false;
};

void add_common(CLI::App* cmd, CommonArgs& c, bool needs_space) {
  auto* s = cmd->add_option("--space", c.space_path, "space JSON file");
  if (needs_space) s->required();
  cmd->add_option("--out", c.out_dir, "output directory");
  cmd->add_option("--seed", c.seed, "deterministic seed")->each([&](const std::string&) {
    c.seed_set = true;
  });
  cmd->add_option("--tol", c.tol, "check tolerance override");
  cmd->add_flag("--parallel", c.parallel, "run independent tasks concurrently");
}

int run_single_task(const CommonArgs& c, Json task) {
  Json cfg;
  if (!c.space_path.empty()) cfg["space"] = c.space_path;
  task["name"] = task.value("name", std::string("cli_") + task.at("op").get<std::string>());
  // measure/omega file options arrive as paths; register them under fixed names
  Json measures, omegas;
  for (const char* key : {"mu", "nu", "mu0", "mu1", "z", "start"}) {
    if (task.contains(key) && task.at(key).is_string() &&
        task.at(key).get<std::string>().find(".json") != std::string::npos) {
      std::string name = std::string("m_") + key;
      measures[name] = task.at(key).get<std::string>();
      task[key] = name;
    }
  }
  if (task.contains("omega")) {
    omegas["omega0"] = task.at("omega").get<std::string>();
    task["omega"] = "omega0";
  }
  if (!measures.empty()) cfg["measures"] = std::move(measures);
  if (!omegas.empty()) cfg["omegas"] = std::move(omegas);
  cfg["tasks"] = Json::array({std::move(task)});

  otcl::RunOptions opts;
  opts.out_dir = c.out_dir;
  opts.seed = c.seed;
  opts.has_seed_override = c.seed_set;
  opts.parallel_tasks = c.parallel;
  opts.tolerance = c.tol;
  return otcl::run_config_json(cfg, opts);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"optimal transport, Wasserstein barycenters and curvature checks"};
  app.require_subcommand(1);

  // --- run ---
  CommonArgs run_args;
  std::string config_path;
  auto* run = app.add_subcommand("run", "execute a config file");
  run->add_option("--config", config_path, "config JSON")->required();
  add_common(run, run_args, false);

  // --- validate ---
  CommonArgs val_args;
  bool force_triangle = false;
  auto* val = app.add_subcommand("validate", "validate a space file");
  add_common(val, val_args, true);
  val->add_flag("--force-triangle", force_triangle, "run the O(n^3) sweep above the gate");

  // --- ot ---
  CommonArgs ot_args;
  std::string ot_mu, ot_nu, ot_solver = "exact";
  double ot_eps = 0.0;
  auto* ot = app.add_subcommand("ot", "solve quadratic optimal transport");
  add_common(ot, ot_args, true);
  ot->add_option("--mu", ot_mu)->required();
  ot->add_option("--nu", ot_nu)->required();
  ot->add_option("--solver", ot_solver, "exact|entropic|bruteforce");
  ot->add_option("--epsilon", ot_eps, "entropic regularization");

  // --- barycenter ---
  CommonArgs bc_args;
  std::string bc_omega, bc_solver;
  double bc_eps = 1e-3;
  std::vector<int> bc_support;
  auto* bc = app.add_subcommand("barycenter", "solve a Wasserstein barycenter problem");
  add_common(bc, bc_args, false);
  bc->add_option("--omega", bc_omega)->required();
  bc->add_option("--solver", bc_solver, "fixed_support|multimarginal|gaussian|sinkhorn");
  bc->add_option("--support", bc_support, "fixed support atoms (default: all)");
  bc->add_option("--epsilon", bc_eps, "sinkhorn regularization");

  // --- interpolate ---
  CommonArgs ip_args;
  std::string ip_mu0, ip_mu1;
  int ip_points = 17;
  auto* ip = app.add_subcommand("interpolate", "displacement interpolation along a geodesic");
  add_common(ip, ip_args, false);
  ip->add_option("--mu0", ip_mu0)->required();
  ip->add_option("--mu1", ip_mu1)->required();
  ip->add_option("--t-points", ip_points, "uniform t samples");

  // --- flow ---
  CommonArgs fl_args;
  std::string fl_scheme, fl_start, fl_energy_kind = "boltzmann";
  std::vector<double> fl_times;
  double fl_tau = 0.01;
  int fl_steps = 10;
  auto* fl = app.add_subcommand("flow", "entropy gradient flows");
  add_common(fl, fl_args, false);
  fl->add_option("--scheme", fl_scheme, "heat|ou|jko")->required();
  fl->add_option("--start", fl_start)->required();
  fl->add_option("--times", fl_times, "sample times (closed-form schemes)");
  fl->add_option("--tau", fl_tau, "jko step size");
  fl->add_option("--steps", fl_steps, "jko step count");

  // --- check ---
  auto* check = app.add_subcommand("check", "curvature and inequality checks");
  check->require_subcommand(1);

  CommonArgs cd_args;
  std::string cd_mu0, cd_mu1, cd_ref = "gaussian";
  double cd_K = 0.0;
  int cd_points = 17;
  auto* cd = check->add_subcommand("cd", "CD(K,infty) displacement convexity");
  add_common(cd, cd_args, false);
  cd->add_option("--mu0", cd_mu0)->required();
  cd->add_option("--mu1", cd_mu1)->required();
  cd->add_option("-K,--K", cd_K)->required();
  cd->add_option("--t-points", cd_points);
  cd->add_option("--reference", cd_ref, "lebesgue|gaussian (Gaussian measures)");

  CommonArgs bcd_args;
  std::string bcd_omega, bcd_ref = "gaussian", bcd_solver;
  double bcd_K = 0.0;
  auto* bcd = check->add_subcommand("bcd", "BCD(K,infty) Wasserstein Jensen inequality");
  add_common(bcd, bcd_args, false);
  bcd->add_option("--omega", bcd_omega)->required();
  bcd->add_option("-K,--K", bcd_K)->required();
  bcd->add_option("--reference", bcd_ref);
  bcd->add_option("--solver", bcd_solver, "barycenter solver");

  CommonArgs evi_args;
  std::string evi_scheme = "ou", evi_start, evi_z, evi_ref = "gaussian";
  double evi_K = 1.0, evi_tau = 0.01;
  int evi_steps = 10;
  std::vector<double> evi_times;
  auto* evi = check->add_subcommand("evi", "integral EVI_K inequality along a flow");
  add_common(evi, evi_args, false);
  evi->add_option("--scheme", evi_scheme, "heat|ou|jko");
  evi->add_option("--start", evi_start)->required();
  evi->add_option("--z", evi_z)->required();
  evi->add_option("-K,--K", evi_K)->required();
  evi->add_option("--times", evi_times);
  evi->add_option("--tau", evi_tau);
  evi->add_option("--steps", evi_steps);
  evi->add_option("--reference", evi_ref);

  CommonArgs ej_args;
  std::string ej_omega, ej_ref = "gaussian";
  double ej_K = 1.0, ej_eps = 0.0;
  auto* ej = check->add_subcommand("evi-jensen", "epsilon-approximate Jensen bound");
  add_common(ej, ej_args, false);
  ej->add_option("--omega", ej_omega)->required();
  ej->add_option("-K,--K", ej_K)->required();
  ej->add_option("--epsilon", ej_eps);
  ej->add_option("--reference", ej_ref);

  CommonArgs lb_args;
  std::vector<std::string> lb_sets;
  std::vector<double> lb_lambdas;
  auto* lb = check->add_subcommand("logbm", "multi-marginal log-Brunn-Minkowski");
  add_common(lb, lb_args, true);
  lb->add_option("--set", lb_sets, "atom set, comma separated (repeatable)")->required();
  lb->add_option("--lambdas", lb_lambdas)->required();

  CommonArgs bs_args;
  std::vector<std::string> bs_quads;
  auto* bs = check->add_subcommand("bs", "functional Blaschke-Santalo inequality");
  add_common(bs, bs_args, false);
  bs->add_option("--quadratic", bs_quads, "a,b,c per function (repeatable)")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    otcl::RunOptions opts;
    opts.out_dir = run_args.out_dir;
    opts.seed = run_args.seed;
    opts.has_seed_override = run_args.seed_set;
    opts.parallel_tasks = run_args.parallel;
    opts.tolerance = run_args.tol;
    return otcl::run_config(config_path, opts);
  }
  if (val->parsed()) {
    Json t{{"op", "validate"}, {"force_triangle", force_triangle}};
    return run_single_task(val_args, std::move(t));
  }
  if (ot->parsed()) {
    Json t{{"op", "ot"}, {"mu", ot_mu}, {"nu", ot_nu}, {"solver", ot_solver}};
    if (ot_solver == "entropic") t["epsilon"] = ot_eps;
    return run_single_task(ot_args, std::move(t));
  }
  if (bc->parsed()) {
    Json t{{"op", "barycenter"}, {"omega", bc_omega}};
    if (!bc_solver.empty()) t["solver"] = bc_solver;
    if (!bc_support.empty()) t["support"] = bc_support;
    if (bc_solver == "sinkhorn") t["epsilon"] = bc_eps;
    return run_single_task(bc_args, std::move(t));
  }
  if (ip->parsed()) {
    Json t{{"op", "interpolate"}, {"mu0", ip_mu0}, {"mu1", ip_mu1}, {"t_points", ip_points}};
    return run_single_task(ip_args, std::move(t));
  }
  if (fl->parsed()) {
    Json t{{"op", "flow"}, {"scheme", fl_scheme}, {"start", fl_start}};
    if (!fl_times.empty()) t["times"] = fl_times;
    if (fl_scheme == "jko") {
      t["tau"] = fl_tau;
      t["steps"] = fl_steps;
    }
    (void)fl_energy_kind;
    return run_single_task(fl_args, std::move(t));
  }
  if (cd->parsed()) {
    Json t{{"op", "check_cd"}, {"mu0", cd_mu0}, {"mu1", cd_mu1}, {"K", cd_K},
           {"t_points", cd_points}, {"reference", cd_ref}};
    return run_single_task(cd_args, std::move(t));
  }
  if (bcd->parsed()) {
    Json t{{"op", "check_bcd"}, {"omega", bcd_omega}, {"K", bcd_K}, {"reference", bcd_ref}};
    if (!bcd_solver.empty()) t["solver"] = bcd_solver;
    return run_single_task(bcd_args, std::move(t));
  }
  if (evi->parsed()) {
    Json t{{"op", "check_evi"}, {"scheme", evi_scheme}, {"start", evi_start}, {"z", evi_z},
           {"K", evi_K}, {"reference", evi_ref}};
    if (!evi_times.empty()) t["times"] = evi_times;
    if (evi_scheme == "jko") {
      t["tau"] = evi_tau;
      t["steps"] = evi_steps;
    }
    return run_single_task(evi_args, std::move(t));
  }
  if (ej->parsed()) {
    Json t{{"op", "check_evi_jensen"}, {"omega", ej_omega}, {"K", ej_K}, {"epsilon", ej_eps},
           {"reference", ej_ref}};
    return run_single_task(ej_args, std::move(t));
  }
  if (lb->parsed()) {
    Json sets = Json::array();
    for (const auto& s : lb_sets) {
      std::vector<int> atoms;
      std::stringstream ss(s);
      std::string tok;
      while (std::getline(ss, tok, ',')) atoms.push_back(std::stoi(tok));
      sets.push_back(atoms);
    }
    Json t{{"op", "check_logbm"}, {"sets", std::move(sets)}, {"lambdas", lb_lambdas}};
    return run_single_task(lb_args, std::move(t));
  }
  if (bs->parsed()) {
    Json quads = Json::array();
    for (const auto& q : bs_quads) {
      std::stringstream ss(q);
      std::string tok;
      std::vector<double> abc;
      while (std::getline(ss, tok, ',')) abc.push_back(std::stod(tok));
      if (abc.size() != 3) {
        std::fprintf(stderr, "otcl: --quadratic needs a,b,c\n");
        return otcl::kExitSchema;
      }
      quads.push_back(Json{{"a", abc[0]}, {"b", abc[1]}, {"c", abc[2]}});
    }
    Json t{{"op", "check_bs"}, {"quadratics", std::move(quads)}};
    return run_single_task(bs_args, std::move(t));
  }
  return otcl::kExitSchema;
}
