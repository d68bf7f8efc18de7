#include "otcl/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace otcl {

namespace {

std::string num17(double v) {
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  if (std::isnan(v)) return "\"nan\"";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void escape_into(const std::string& s, std::string& out) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

void dump_into(const Json& j, std::string& out) {
  switch (j.type()) {
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // nlohmann objects iterate key-sorted
        if (!first) out += ',';
        first = false;
        escape_into(it.key(), out);
        out += ':';
        dump_into(it.value(), out);
      }
      out += '}';
      break;
    }
    case Json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ',';
        first = false;
        dump_into(v, out);
      }
      out += ']';
      break;
    }
    case Json::value_t::string:
      escape_into(j.get_ref<const std::string&>(), out);
      break;
    case Json::value_t::number_float:
      out += num17(j.get<double>());
      break;
    case Json::value_t::number_integer:
      out += std::to_string(j.get<long long>());
      break;
    case Json::value_t::number_unsigned:
      out += std::to_string(j.get<unsigned long long>());
      break;
    case Json::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      break;
    default:
      out += "null";
  }
}

double number_or_inf(const Json& j, const char* what) {
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
    throw PreconditionError(std::string(what) + ": bad numeric string '" + s + "'");
  }
  if (!j.is_number()) throw PreconditionError(std::string(what) + ": number expected");
  return j.get<double>();
}

Json num_or_inf_to_json(double v) {
  if (std::isinf(v)) return v > 0 ? Json("inf") : Json("-inf");
  return Json(v);
}

std::vector<double> default_cell_volumes(const std::vector<std::vector<double>>& axes) {
  // tensor-product Voronoi widths, boundary gaps mirrored outward
  std::vector<std::vector<double>> widths;
  for (const auto& ax : axes) {
    std::vector<double> w(ax.size());
    if (ax.size() == 1) {
      w[0] = 1.0;
    } else {
      for (size_t i = 0; i < ax.size(); ++i) {
        double lo = (i == 0) ? ax[0] - (ax[1] - ax[0]) : ax[i - 1];
        double hi = (i + 1 == ax.size()) ? ax[i] + (ax[i] - ax[i - 1]) : ax[i + 1];
        w[i] = 0.5 * (hi - lo);
      }
    }
    widths.push_back(std::move(w));
  }
  int n = 1;
  for (const auto& ax : axes) n *= static_cast<int>(ax.size());
  std::vector<double> vols(static_cast<size_t>(n), 1.0);
  for (int idx = 0; idx < n; ++idx) {
    int rem = idx;
    for (int d = static_cast<int>(axes.size()) - 1; d >= 0; --d) {
      int sz = static_cast<int>(axes[static_cast<size_t>(d)].size());
      vols[static_cast<size_t>(idx)] *= widths[static_cast<size_t>(d)][static_cast<size_t>(rem % sz)];
      rem /= sz;
    }
  }
  return vols;
}

}  // namespace

std::string dump_json_17(const Json& j) {
  std::string out;
  dump_into(j, out);
  out += '\n';
  return out;
}

std::string content_hash(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw PreconditionError("cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string file_hash(const std::filesystem::path& p) { return content_hash(read_file(p)); }

void atomic_write(const std::filesystem::path& p, const std::string& bytes) {
  auto tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw SolverError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  std::filesystem::rename(tmp, p);
}

GroundSpace space_from_json(const Json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "finite") {
    FiniteSpace f;
    const auto& dist = j.at("dist");
    f.n = static_cast<int>(dist.size());
    f.dist.resize(static_cast<size_t>(f.n) * f.n);
    for (int i = 0; i < f.n; ++i) {
      if (static_cast<int>(dist[static_cast<size_t>(i)].size()) != f.n)
        throw PreconditionError("space: dist must be square");
      for (int k = 0; k < f.n; ++k)
        f.dist[static_cast<size_t>(i) * f.n + k] =
            number_or_inf(dist[static_cast<size_t>(i)][static_cast<size_t>(k)], "dist");
    }
    f.ref_weights = j.at("ref_weights").get<std::vector<double>>();
    if (j.contains("midpoints"))
      for (const auto& e : j.at("midpoints"))
        f.midpoints.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(3).get<int>(),
                               e.at(2).get<double>()});
    return f;
  }
  if (type == "grid") {
    EuclideanGrid g;
    g.axes = j.at("axes").get<std::vector<std::vector<double>>>();
    g.dim = static_cast<int>(g.axes.size());
    if (j.contains("cell_volumes"))
      g.cell_volumes = j.at("cell_volumes").get<std::vector<double>>();
    else
      g.cell_volumes = default_cell_volumes(g.axes);
    const auto& ref = j.at("reference");
    if (ref.is_string() && ref.get<std::string>() == "lebesgue") {
      g.reference = Lebesgue{};
    } else if (ref.is_object() && ref.contains("gaussian")) {
      const auto& gr = ref.at("gaussian");
      auto mean = gr.at("mean").get<std::vector<double>>();
      auto cov = gr.at("cov").get<std::vector<std::vector<double>>>();
      GaussianRef r;
      r.mean = Eigen::Map<Vector>(mean.data(), static_cast<Eigen::Index>(mean.size()));
      r.cov.resize(static_cast<Eigen::Index>(cov.size()), static_cast<Eigen::Index>(cov.size()));
      for (size_t a = 0; a < cov.size(); ++a)
        for (size_t b = 0; b < cov.size(); ++b) r.cov(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = cov[a][b];
      g.reference = std::move(r);
    } else {
      throw PreconditionError("space: unknown grid reference");
    }
    return g;
  }
  if (type == "gaussian") return GaussianAnalytic{j.at("dim").get<int>()};
  throw PreconditionError("space: unknown type '" + type + "'");
}

Json space_to_json(const GroundSpace& s) {
  Json j;
  if (const auto* f = std::get_if<FiniteSpace>(&s)) {
    j["type"] = "finite";
    Json dist = Json::array();
    for (int i = 0; i < f->n; ++i) {
      Json row = Json::array();
      for (int k = 0; k < f->n; ++k) row.push_back(num_or_inf_to_json(f->d(i, k)));
      dist.push_back(std::move(row));
    }
    j["dist"] = std::move(dist);
    j["ref_weights"] = f->ref_weights;
    if (!f->midpoints.empty()) {
      Json mp = Json::array();
      for (const auto& m : f->midpoints) mp.push_back(Json::array({m.i, m.j, m.t, m.k}));
      j["midpoints"] = std::move(mp);
    }
  } else if (const auto* g = std::get_if<EuclideanGrid>(&s)) {
    j["type"] = "grid";
    j["axes"] = g->axes;
    j["cell_volumes"] = g->cell_volumes;
    if (g->is_lebesgue()) {
      j["reference"] = "lebesgue";
    } else {
      const auto& r = std::get<GaussianRef>(g->reference);
      Json gr;
      gr["mean"] = std::vector<double>(r.mean.data(), r.mean.data() + r.mean.size());
      Json cov = Json::array();
      for (Eigen::Index a = 0; a < r.cov.rows(); ++a) {
        Json row = Json::array();
        for (Eigen::Index b = 0; b < r.cov.cols(); ++b) row.push_back(r.cov(a, b));
        cov.push_back(std::move(row));
      }
      gr["cov"] = std::move(cov);
      j["reference"] = Json{{"gaussian", std::move(gr)}};
    }
  } else {
    j["type"] = "gaussian";
    j["dim"] = std::get<GaussianAnalytic>(s).dim;
  }
  return j;
}

MeasureVariant measure_from_json(const Json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "discrete") {
    auto support = j.at("support").get<std::vector<int>>();
    auto weights = j.at("weights").get<std::vector<double>>();
    return DiscreteMeasure::create(support, weights);
  }
  if (type == "gaussian") {
    auto mean = j.at("mean").get<std::vector<double>>();
    auto cov = j.at("cov").get<std::vector<std::vector<double>>>();
    Vector m = Eigen::Map<Vector>(mean.data(), static_cast<Eigen::Index>(mean.size()));
    Matrix c(cov.size(), cov.size());
    for (size_t a = 0; a < cov.size(); ++a) {
      if (cov[a].size() != cov.size()) throw PreconditionError("measure: cov must be square");
      for (size_t b = 0; b < cov.size(); ++b) c(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = cov[a][b];
    }
    return GaussianMeasure::create(std::move(m), std::move(c));
  }
  throw PreconditionError("measure: unknown type '" + type + "'");
}

Json measure_to_json(const MeasureVariant& m) {
  Json j;
  if (const auto* d = std::get_if<DiscreteMeasure>(&m)) {
    j["type"] = "discrete";
    j["support"] = d->support;
    j["weights"] = d->weights;
  } else {
    const auto& g = std::get<GaussianMeasure>(m);
    j["type"] = "gaussian";
    j["mean"] = std::vector<double>(g.mean.data(), g.mean.data() + g.mean.size());
    Json cov = Json::array();
    for (Eigen::Index a = 0; a < g.cov.rows(); ++a) {
      Json row = Json::array();
      for (Eigen::Index b = 0; b < g.cov.cols(); ++b) row.push_back(g.cov(a, b));
      cov.push_back(std::move(row));
    }
    j["cov"] = std::move(cov);
  }
  return j;
}

MixtureOmega omega_from_json(const Json& j, const GroundSpace* space_for_validation) {
  std::vector<MixtureOmega::Component> comps;
  for (const auto& c : j.at("components"))
    comps.push_back({c.at("lambda").get<double>(), measure_from_json(c.at("measure"))});
  MixtureOmega o = MixtureOmega::create(std::move(comps));
  if (space_for_validation && !o.gaussian())
    for (const auto& c : o.components) std::get<DiscreteMeasure>(c.measure).check_space(*space_for_validation);
  return o;
}

Json omega_to_json(const MixtureOmega& o) {
  Json comps = Json::array();
  for (const auto& c : o.components)
    comps.push_back(Json{{"lambda", c.lambda}, {"measure", measure_to_json(c.measure)}});
  return Json{{"components", std::move(comps)}};
}

Json report_to_json(const CheckReport& rep) {
  Json j;
  j["check"] = rep.check;
  Json params;
  for (const auto& [k, v] : rep.params) params[k] = num_or_inf_to_json(v);
  j["params"] = std::move(params);
  j["tolerance"] = rep.tolerance;
  j["outcome"] = to_string(rep.outcome);
  j["min_margin"] = num_or_inf_to_json(rep.min_margin);
  j["min_witness"] = rep.min_witness;
  j["discretization_budget"] = rep.discretization_budget;
  j["skipped_rows"] = rep.skipped_rows;
  j["notes"] = rep.notes;
  Json rows = Json::array();
  for (const auto& r : rep.rows)
    rows.push_back(Json{{"witness", r.witness},
                        {"lhs", num_or_inf_to_json(r.lhs)},
                        {"rhs", num_or_inf_to_json(r.rhs)},
                        {"margin", num_or_inf_to_json(r.margin)}});
  j["rows"] = std::move(rows);
  return j;
}

CheckReport report_from_json(const Json& j) {
  CheckReport rep;
  rep.check = j.at("check").get<std::string>();
  for (auto it = j.at("params").begin(); it != j.at("params").end(); ++it)
    rep.params.emplace_back(it.key(), number_or_inf(it.value(), "params"));
  rep.tolerance = j.at("tolerance").get<double>();
  const std::string o = j.at("outcome").get<std::string>();
  rep.outcome = o == "pass"      ? CheckOutcome::pass
                : o == "fail"    ? CheckOutcome::fail
                : o == "vacuous" ? CheckOutcome::vacuous
                                 : CheckOutcome::constraint_failed;
  rep.min_margin = number_or_inf(j.at("min_margin"), "min_margin");
  rep.min_witness = j.at("min_witness").get<std::string>();
  rep.discretization_budget = j.at("discretization_budget").get<double>();
  rep.skipped_rows = j.at("skipped_rows").get<long>();
  rep.notes = j.at("notes").get<std::vector<std::string>>();
  for (const auto& r : j.at("rows"))
    rep.rows.push_back({r.at("witness").get<std::string>(), number_or_inf(r.at("lhs"), "lhs"),
                        number_or_inf(r.at("rhs"), "rhs"), number_or_inf(r.at("margin"), "margin")});
  return rep;
}

std::string report_to_csv(const CheckReport& rep) {
  std::string out = "witness,lhs,rhs,margin\n";
  for (const auto& r : rep.rows) {
    out += r.witness;
    out += ',';
    out += num17(r.lhs);
    out += ',';
    out += num17(r.rhs);
    out += ',';
    out += num17(r.margin);
    out += '\n';
  }
  return out;
}

void emit_report(const CheckReport& rep, const std::filesystem::path& path, ReportFormat format) {
  atomic_write(path, format == ReportFormat::json ? dump_json_17(report_to_json(rep))
                                                  : report_to_csv(rep));
}

Json barycenter_result_to_json(const BarycenterResult& r) {
  Json j;
  if (const auto* d = std::get_if<DiscreteMeasure>(&r.measure)) {
    j["measure"] = measure_to_json(MeasureVariant{*d});
  } else if (const auto* g = std::get_if<GaussianMeasure>(&r.measure)) {
    j["measure"] = measure_to_json(MeasureVariant{*g});
  } else {
    const auto& fp = std::get<FreePoints>(r.measure);
    Json pts = Json::array();
    for (const auto& p : fp.points) pts.push_back(p);
    j["measure"] = Json{{"type", "points"}, {"points", std::move(pts)}, {"weights", fp.weights}};
  }
  j["objective"] = r.objective;
  j["epsilon"] = num_or_inf_to_json(r.epsilon);
  j["certified"] = r.certified;
  j["converged"] = r.converged;
  j["residual"] = r.residual;
  return j;
}

std::string curve_to_csv(const WassersteinCurve& c) {
  std::string out;
  if (!c.measures.empty() && std::holds_alternative<DiscreteMeasure>(c.measures.front())) {
    out = "t,atom,weight\n";
    for (size_t k = 0; k < c.size(); ++k) {
      const auto& m = std::get<DiscreteMeasure>(c.measures[k]);
      for (size_t i = 0; i < m.size(); ++i) {
        out += num17(c.times[k]);
        out += ',';
        out += std::to_string(m.support[i]);
        out += ',';
        out += num17(m.weights[i]);
        out += '\n';
      }
    }
  } else {
    out = "t,mean...,cov...\n";
    for (size_t k = 0; k < c.size(); ++k) {
      const auto& g = std::get<GaussianMeasure>(c.measures[k]);
      out += num17(c.times[k]);
      for (Eigen::Index i = 0; i < g.mean.size(); ++i) {
        out += ',';
        out += num17(g.mean[i]);
      }
      for (Eigen::Index a = 0; a < g.cov.rows(); ++a)
        for (Eigen::Index b = 0; b < g.cov.cols(); ++b) {
          out += ',';
          out += num17(g.cov(a, b));
        }
      out += '\n';
    }
  }
  return out;
}

}  // namespace otcl
