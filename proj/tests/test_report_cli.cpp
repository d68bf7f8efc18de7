#include <doctest.h>

#include <filesystem>

#include "helpers.hpp"
#include "otcl/config.hpp"
#include "otcl/io.hpp"

using namespace otcl;
using namespace otcl::testing;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("otcl_test_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

CheckReport sample_report() {
  CheckReport rep;
  rep.check = "cd";
  rep.params = {{"K", 1.0}, {"w2sq", 0.123456789012345678}};
  rep.rows.push_back({"t=0.25", 0.1, 0.2, 0.1});
  rep.rows.push_back({"t=0.5", -kInf, 1.0, kInf});
  rep.notes.push_back("note");
  rep.finalize(1e-8);
  return rep;
}

}  // namespace

TEST_CASE("json emission is byte-stable and round-trips") {
  auto rep = sample_report();
  std::string a = dump_json_17(report_to_json(rep));
  std::string b = dump_json_17(report_to_json(rep));
  CHECK(a == b);

  CheckReport back = report_from_json(Json::parse(a));
  CHECK(back.check == rep.check);
  CHECK(back.rows.size() == rep.rows.size());
  CHECK(back.rows[0].margin == rep.rows[0].margin);  // 17 digits round-trip doubles
  CHECK(std::isinf(back.rows[1].margin));
  CHECK(back.min_margin == rep.min_margin);
  std::string again = dump_json_17(report_to_json(back));
  CHECK(again == a);
}

TEST_CASE("csv has one line per row plus the header") {
  auto rep = sample_report();
  std::string csv = report_to_csv(rep);
  size_t lines = static_cast<size_t>(std::count(csv.begin(), csv.end(), '\n'));
  CHECK(lines == rep.rows.size() + 1);
}

TEST_CASE("space json round-trip, including inf distances and midpoints") {
  FiniteSpace f = path_space(3);
  f.dist[2] = kInf;
  f.dist[6] = kInf;
  GroundSpace s{f};
  Json j = space_to_json(s);
  GroundSpace back = space_from_json(j);
  const auto& fb = std::get<FiniteSpace>(back);
  CHECK(fb.n == 3);
  CHECK(std::isinf(fb.d(0, 2)));
  CHECK(fb.midpoints.size() == f.midpoints.size());
  CHECK(dump_json_17(space_to_json(back)) == dump_json_17(j));
}

TEST_CASE("grid space json defaults cell volumes") {
  Json j;
  j["type"] = "grid";
  j["axes"] = Json::array({Json::array({0.0, 0.5, 1.0, 1.5})});
  j["reference"] = "lebesgue";
  auto s = space_from_json(j);
  const auto& g = std::get<EuclideanGrid>(s);
  REQUIRE(g.cell_volumes.size() == 4);
  for (double v : g.cell_volumes) CHECK(v == doctest::Approx(0.5));
}

TEST_CASE("measure and omega json round-trips") {
  auto m = DiscreteMeasure::create(std::vector<int>{1, 4}, std::vector<double>{0.25, 0.75});
  auto back = measure_from_json(measure_to_json(MeasureVariant{m}));
  CHECK(std::get<DiscreteMeasure>(back) == m);

  auto g = gauss1(0.5, 2.0);
  auto gb = std::get<GaussianMeasure>(measure_from_json(measure_to_json(MeasureVariant{g})));
  CHECK(gb.mean[0] == 0.5);
  CHECK(gb.cov(0, 0) == 2.0);

  auto omega = MixtureOmega::create(
      {{0.25, MeasureVariant{gauss1(0, 1)}}, {0.75, MeasureVariant{gauss1(1, 2)}}});
  auto ob = omega_from_json(omega_to_json(omega));
  CHECK(ob.size() == 2);
  CHECK(ob.components[0].lambda == 0.25);
}

TEST_CASE("content hash is stable and sensitive") {
  CHECK(content_hash("abc") == content_hash("abc"));
  CHECK(content_hash("abc") != content_hash("abd"));
}

TEST_CASE("run_config: gaussian equality instance passes with exit 0") {
  TempDir tmp;
  Json cfg;
  cfg["measures"] = Json{{"a", Json{{"type", "gaussian"}, {"mean", {0.0}}, {"cov", {{1.0}}}}},
                         {"b", Json{{"type", "gaussian"}, {"mean", {2.0}}, {"cov", {{1.0}}}}}};
  cfg["tasks"] = Json::array({Json{{"op", "check_cd"},
                                   {"name", "cd0"},
                                   {"mu0", "a"},
                                   {"mu1", "b"},
                                   {"K", 0.0},
                                   {"reference", "lebesgue"}}});
  RunOptions opts;
  opts.out_dir = tmp.path;
  CHECK(run_config_json(cfg, opts) == kExitPass);
  CHECK(fs::exists(tmp.path / "cd0.json"));
  CHECK(fs::exists(tmp.path / "cd0.csv"));
  CHECK(fs::exists(tmp.path / "manifest.json"));

  auto rep = report_from_json(Json::parse(read_file(tmp.path / "cd0.json")));
  CHECK(rep.outcome == CheckOutcome::pass);
  for (const auto& r : rep.rows) CHECK(std::fabs(r.margin) <= 1e-10);
}

TEST_CASE("run_config: undefined names exit 4 with no outputs") {
  TempDir tmp;
  Json cfg;
  cfg["tasks"] = Json::array({Json{{"op", "check_cd"}, {"mu0", "nope"}, {"mu1", "nope"}, {"K", 0.0}}});
  RunOptions opts;
  opts.out_dir = tmp.path / "sub";
  CHECK(run_config_json(cfg, opts) == kExitSchema);
  CHECK_FALSE(fs::exists(tmp.path / "sub"));
}

TEST_CASE("run_config: empty task list exits 0 with manifest only") {
  TempDir tmp;
  Json cfg;
  cfg["tasks"] = Json::array();
  RunOptions opts;
  opts.out_dir = tmp.path;
  CHECK(run_config_json(cfg, opts) == kExitPass);
  CHECK(fs::exists(tmp.path / "manifest.json"));
  int files = 0;
  for (auto& e : fs::directory_iterator(tmp.path)) {
    (void)e;
    ++files;
  }
  CHECK(files == 1);
}

TEST_CASE("run_config: failing check exits 1, vacuous exits 2") {
  TempDir tmp;
  Json cfg;
  // K = 5 on a genuinely CD(1) instance must fail
  cfg["measures"] = Json{{"a", Json{{"type", "gaussian"}, {"mean", {-1.0}}, {"cov", {{1.0}}}}},
                         {"b", Json{{"type", "gaussian"}, {"mean", {1.0}}, {"cov", {{4.0}}}}}};
  cfg["tasks"] = Json::array({Json{{"op", "check_cd"}, {"name", "hard"}, {"mu0", "a"},
                                   {"mu1", "b"}, {"K", 5.0}, {"reference", "gaussian"}}});
  RunOptions opts;
  opts.out_dir = tmp.path;
  CHECK(run_config_json(cfg, opts) == kExitFail);

  // vacuous: entropy infinite on a zero-reference atom
  TempDir tmp2;
  Json cfg2;
  cfg2["space"] = Json{{"type", "finite"},
                       {"dist", {{0.0, 1.0}, {1.0, 0.0}}},
                       {"ref_weights", {1.0, 0.0}}};
  cfg2["measures"] =
      Json{{"a", Json{{"type", "discrete"}, {"support", {1}}, {"weights", {1.0}}}},
           {"b", Json{{"type", "discrete"}, {"support", {0}}, {"weights", {1.0}}}}};
  cfg2["tasks"] = Json::array(
      {Json{{"op", "check_cd"}, {"mu0", "a"}, {"mu1", "b"}, {"K", 0.0}, {"t_points", 3}}});
  RunOptions opts2;
  opts2.out_dir = tmp2.path;
  CHECK(run_config_json(cfg2, opts2) == kExitVacuous);
}

TEST_CASE("reruns with the same seed are byte-identical") {
  Json cfg;
  cfg["seed"] = 42;
  cfg["measures"] = Json{{"a", Json{{"type", "gaussian"}, {"mean", {-1.0}}, {"cov", {{1.0}}}}},
                         {"b", Json{{"type", "gaussian"}, {"mean", {1.0}}, {"cov", {{1.0}}}}}};
  cfg["omegas"] = Json{{"o", Json{{"components",
                                   Json::array({Json{{"lambda", 0.5}, {"measure", Json{{"type", "gaussian"}, {"mean", {-1.0}}, {"cov", {{1.0}}}}}},
                                                Json{{"lambda", 0.5}, {"measure", Json{{"type", "gaussian"}, {"mean", {1.0}}, {"cov", {{1.0}}}}}}})}}}};
  cfg["tasks"] = Json::array(
      {Json{{"op", "check_cd"}, {"name", "c1"}, {"mu0", "a"}, {"mu1", "b"}, {"K", 1.0}},
       Json{{"op", "check_bcd"}, {"name", "c2"}, {"omega", "o"}, {"K", 1.0}},
       Json{{"op", "check_evi_jensen"}, {"name", "c3"}, {"omega", "o"}, {"K", 1.0}, {"epsilon", 0.1}}});

  TempDir t1, t2;
  RunOptions o1, o2;
  o1.out_dir = t1.path;
  o2.out_dir = t2.path;
  CHECK(run_config_json(cfg, o1) == kExitPass);
  CHECK(run_config_json(cfg, o2) == kExitPass);
  for (const char* f : {"c1.json", "c1.csv", "c2.json", "c3.json", "manifest.json"})
    CHECK(read_file(t1.path / f) == read_file(t2.path / f));
}

TEST_CASE("parallel task execution yields identical outputs") {
  Json cfg;
  cfg["measures"] = Json{{"a", Json{{"type", "gaussian"}, {"mean", {0.0}}, {"cov", {{1.0}}}}},
                         {"b", Json{{"type", "gaussian"}, {"mean", {2.0}}, {"cov", {{1.0}}}}}};
  cfg["tasks"] = Json::array(
      {Json{{"op", "check_cd"}, {"name", "x"}, {"mu0", "a"}, {"mu1", "b"}, {"K", 0.0}, {"reference", "lebesgue"}},
       Json{{"op", "ot"}, {"name", "y"}, {"mu", "a"}, {"nu", "b"}, {"solver", "exact"}}});
  // the gaussian ot task errors (no atoms); exercise error aggregation too
  TempDir t1, t2;
  RunOptions o1, o2;
  o1.out_dir = t1.path;
  o2.out_dir = t2.path;
  o2.parallel_tasks = true;
  int e1 = run_config_json(cfg, o1);
  int e2 = run_config_json(cfg, o2);
  CHECK(e1 == e2);
  CHECK(e1 == kExitError);  // the gaussian ot task cannot run and is an error
  CHECK(read_file(t1.path / "x.json") == read_file(t2.path / "x.json"));
  CHECK(read_file(t1.path / "manifest.json") == read_file(t2.path / "manifest.json"));
}

TEST_CASE("curve csv layouts") {
  WassersteinCurve c;
  c.times = {0.0, 1.0};
  c.measures = {MeasureVariant{gauss1(0, 1)}, MeasureVariant{gauss1(1, 2)}};
  std::string csv = curve_to_csv(c);
  CHECK(csv.find("t,mean") == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);

  WassersteinCurve d;
  d.times = {0.0};
  d.measures = {MeasureVariant{DiscreteMeasure::uniform(std::vector<int>{0, 2})}};
  std::string csv2 = curve_to_csv(d);
  CHECK(csv2.find("t,atom,weight") == 0);
  CHECK(std::count(csv2.begin(), csv2.end(), '\n') == 3);
}

TEST_CASE("potential values ingest from csv files") {
  TempDir tmp;
  atomic_write(tmp.path / "pot.csv", "0.0\n1.0\n4.0\n");
  Json cfg;
  cfg["space"] = Json{{"type", "finite"},
                      {"dist", {{0.0, 1.0, 2.0}, {1.0, 0.0, 1.0}, {2.0, 1.0, 0.0}}},
                      {"ref_weights", {1.0, 1.0, 1.0}}};
  cfg["measures"] = Json{{"m", Json{{"type", "discrete"}, {"support", {0, 1}}, {"weights", {0.5, 0.5}}}}};
  cfg["energies"] = Json{{"V", Json{{"kind", "potential"}, {"values", (tmp.path / "pot.csv").string()}}}};
  cfg["tasks"] = Json::array({Json{{"op", "flow"}, {"name", "f"}, {"scheme", "jko"}, {"start", "m"},
                                   {"tau", 0.1}, {"steps", 1}, {"energy", "V"}}});
  RunOptions opts;
  opts.out_dir = tmp.path / "out";
  CHECK(run_config_json(cfg, opts) == kExitPass);
  auto manifest = Json::parse(read_file(tmp.path / "out" / "manifest.json"));
  CHECK(manifest.at("inputs").size() == 1);  // the csv is hashed as an input
}

TEST_CASE("emit_report writes byte-identical files for identical content") {
  TempDir tmp;
  auto rep = sample_report();
  emit_report(rep, tmp.path / "a.json", ReportFormat::json);
  emit_report(rep, tmp.path / "b.json", ReportFormat::json);
  CHECK(read_file(tmp.path / "a.json") == read_file(tmp.path / "b.json"));
  emit_report(rep, tmp.path / "a.csv", ReportFormat::csv);
  CHECK(read_file(tmp.path / "a.csv") == report_to_csv(rep));
}
