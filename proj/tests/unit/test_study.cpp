#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "gwg/study.hpp"

using namespace gwg;

namespace
{

std::filesystem::path scratch(const std::string& name)
{
  const auto dir = std::filesystem::temp_directory_path() / ("gwg_unit_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string read(const std::filesystem::path& p)
{
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

StudyConfig small_steady()
{
  StudyConfig c;
  c.problem = "steady_oseen_ex1";
  c.meshes = {2, 4, 8};
  return c;
}

} // namespace

TEST_CASE("order of errors (4, 1) over steps (1, 1/2) is 2")
{
  const auto o = compute_order({4.0, 1.0}, {1.0, 0.5});
  CHECK_FALSE(o[0].has_value());
  CHECK(*o[1] == doctest::Approx(2.0));
}

TEST_CASE("constant errors have order 0")
{
  const auto o = compute_order({3.0, 3.0, 3.0}, {0.5, 0.25, 0.125});
  CHECK(*o[1] == doctest::Approx(0.0));
  CHECK(*o[2] == doctest::Approx(0.0));
}

TEST_CASE("nonpositive errors leave the order undefined")
{
  const auto o = compute_order({1e-3, 0.0, 1e-5}, {0.5, 0.25, 0.125});
  CHECK_FALSE(o[1].has_value());
  CHECK_FALSE(o[2].has_value());
}

TEST_CASE("steps must decrease and lengths must match")
{
  CHECK_THROWS(compute_order({1.0, 0.5}, {0.25, 0.5}));
  CHECK_THROWS(compute_order({1.0, 0.5}, {0.25}));
}

TEST_CASE("orders of a halving sequence")
{
  const std::vector<double> e{9.5305e-02, 4.9781e-02, 2.5309e-02, 1.2727e-02};
  const auto o = compute_order(e, {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64});
  CHECK(format_order(o[1]) == "0.94");
  CHECK(format_order(o[2]) == "0.98");
  CHECK(format_order(o[3]) == "0.99");
}

TEST_CASE("report number formats")
{
  CHECK(format_error(9.5305e-02) == "9.5305e-02");
  CHECK(format_error(0.0) == "0.0000e+00");
  CHECK(format_order(std::nullopt).empty());
  CHECK(format_order(-0.001) == "0.00");
  CHECK(format_order(1.996) == "2.00");
}

TEST_CASE("floor removal in quadrature")
{
  CHECK(remove_floor(5.0, 3.0) == doctest::Approx(4.0));
  CHECK(remove_floor(1.0, 2.0) == 0.0);
  CHECK(remove_floor(2.0, 0.0) == doctest::Approx(2.0));
}

TEST_CASE("tau rules parse and print back")
{
  CHECK(TauRule::parse("h2").kind == TauRule::Kind::h2);
  const TauRule fixed = TauRule::parse("fixed:0.01");
  CHECK(fixed.kind == TauRule::Kind::fixed);
  CHECK(fixed.values.at(0) == doctest::Approx(0.01));
  const TauRule list = TauRule::parse("list:0.25,0.125");
  CHECK(list.values.size() == 2);
  CHECK(TauRule::parse(list.to_string()).values == list.values);
  CHECK_THROWS(TauRule::parse("fixed:"));
  CHECK_THROWS(TauRule::parse("list:0.5,x"));
  CHECK_THROWS(TauRule::parse("cfl"));
}

TEST_CASE("config validation")
{
  StudyConfig c = small_steady();
  CHECK_NOTHROW(c.validate());
  c.tau_rule = TauRule::parse("h2");
  CHECK_THROWS(c.validate());
  c = small_steady();
  c.meshes = {8, 4};
  CHECK_THROWS(c.validate());
  c = small_steady();
  c.problem = "evolutionary_oseen_ex2";
  CHECK_THROWS(c.validate());
  c.tau_rule = TauRule::parse("list:0.5,0.25");
  CHECK_THROWS(c.validate()); // three meshes, two steps
  c.meshes = {4};
  CHECK_NOTHROW(c.validate());
  c.floor_tau = 0.5;
  CHECK_THROWS(c.validate());
  c.floor_tau = 0.125;
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("config file values, unknown keys and overrides")
{
  const auto dir = scratch("config");
  {
    std::ofstream out(dir / "c.json");
    out << R"({"problem": "evolutionary_oseen_ex2", "elements": "2,1,1,1,1", "gamma": -1, "mesh": [4, 8],
               "tau_rule": "h2", "diagonal": "falling", "pressure_gauge": "first-element", "workers": 2})";
  }
  const StudyConfig c = load_study_config(dir / "c.json");
  CHECK(c.problem == "evolutionary_oseen_ex2");
  CHECK(c.space.k == 2);
  CHECK(c.space.gamma == -1.0);
  CHECK(c.meshes == std::vector<int>{4, 8});
  CHECK(c.tau_rule.kind == TauRule::Kind::h2);
  CHECK(c.diagonal == Diagonal::falling);
  CHECK(c.pressure_gauge == PressureGauge::first_element);
  CHECK(c.workers == 2);
  {
    std::ofstream out(dir / "bad.json");
    out << R"({"mesh": [4], "colour": "red"})";
  }
  CHECK_THROWS(load_study_config(dir / "bad.json"));
  CHECK_THROWS(load_study_config(dir / "missing.json"));
}

TEST_CASE("study reports: CSV and Markdown carry the same numbers")
{
  StudyConfig c = small_steady();
  c.out_dir = scratch("reports");
  const ConvergenceReport r = run_convergence_study(c);
  REQUIRE(r.rows.size() == 3);
  const std::string csv = read(c.out_dir / "study.csv");
  const std::string md = read(c.out_dir / "study.md");
  CHECK(csv.rfind("h,tau,err_energy,ord_energy,err_l2u,ord_l2u,err_l2p,ord_l2p\n", 0) == 0);
  CHECK(csv == r.csv());
  for (const StudyRow& row : r.rows) {
    CHECK(md.find(format_error(row.errors.energy)) != std::string::npos);
    CHECK(md.find(format_error(row.errors.l2_pressure_proj)) != std::string::npos);
    CHECK(row.max_incompressibility <= 1e-9);
  }
  CHECK(std::filesystem::exists(c.out_dir / "study_meta.json"));
}

TEST_CASE("identical configs give byte-identical CSV across runs and worker counts")
{
  StudyConfig c = small_steady();
  c.space = parse_elements("2,1,1,1,1", c.space);
  const std::string first = compute_convergence_study(c).csv();
  CHECK(compute_convergence_study(c).csv() == first);
  c.workers = 3;
  CHECK(compute_convergence_study(c).csv() == first);
}

TEST_CASE("patch study suppresses orders")
{
  StudyConfig c;
  c.problem = "stokes_patch";
  c.meshes = {4, 8};
  const ConvergenceReport r = compute_convergence_study(c);
  CHECK(r.orders_suppressed);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    CHECK_FALSE(r.order_energy[i].has_value());
    CHECK(r.rows[i].errors.energy <= 1e-10);
  }
}

TEST_CASE("a failing cell saves the completed prefix")
{
  StudyConfig c;
  c.problem = "evolutionary_oseen_ex2";
  c.meshes = {2};
  // 0.3 does not divide the final time, so the second cell fails.
  c.tau_rule = TauRule::parse("list:0.5,0.3");
  c.out_dir = scratch("prefix");
  CHECK_THROWS(run_convergence_study(c));
  const std::string csv = read(c.out_dir / "study.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
  CHECK(csv.find("5.0000e-01") != std::string::npos);
}

TEST_CASE("time study with a floor reports floor-removed errors")
{
  StudyConfig c;
  c.problem = "evolutionary_oseen_ex2";
  c.meshes = {4};
  c.tau_rule = TauRule::parse("list:0.5,0.25");
  c.floor_tau = 0.0625;
  const ConvergenceReport r = compute_convergence_study(c);
  REQUIRE(r.floor.has_value());
  REQUIRE(r.subtracted.size() == 2);
  CHECK(r.time_study);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(r.subtracted[i].errors.energy ==
          doctest::Approx(remove_floor(r.rows[i].errors.energy, r.floor->errors.energy)));
  }
  CHECK(r.subtracted_csv().rfind("h,tau,", 0) == 0);
  CHECK(r.markdown().find("floor") != std::string::npos);
}
