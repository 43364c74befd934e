#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "oa/model.hpp"
#include "oa/predictor.hpp"
#include "oa/report_io.hpp"
#include "testutil.hpp"

#ifndef OAX_BIN
#define OAX_BIN "./oax"
#endif

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

fs::path scratch_dir() {
  static int counter = 0;
  auto dir = fs::temp_directory_path() /
             ("oax_cli_test_" + std::to_string(::getpid()) + "_" +
              std::to_string(counter++));
  fs::create_directories(dir);
  return dir;
}

RunResult run_oax(const std::string& arguments) {
  const auto dir = scratch_dir();
  const auto out_path = dir / "stdout.txt";
  const auto err_path = dir / "stderr.txt";
  const std::string command = std::string(OAX_BIN) + " " + arguments + " > " +
                              out_path.string() + " 2> " + err_path.string();
  const int status = std::system(command.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  fs::remove_all(dir);
  return result;
}

std::string cfg(const std::string& relative) {
  return testutil::config_path(relative);
}

// payload view: the report with the run-specific manifest removed
nlohmann::json payload(nlohmann::json doc) {
  doc.erase("manifest");
  return doc;
}

}  // namespace

TEST_CASE("predict matches the library call byte for byte") {
  const auto result =
      run_oax("predict --network " + cfg("networks/lenet5.net") +
              " --config " + cfg("designs/demo.config") + " --tech " +
              cfg("tech/default.tech"));
  REQUIRE(result.exit_code == 0);

  const auto model = oa::load_network(cfg("networks/lenet5.net"));
  const auto config = oa::load_config(cfg("designs/demo.config"));
  const auto tech = oa::load_tech(cfg("tech/default.tech"));
  const auto report = oa::network_cost(model, config, tech);
  const auto expected = oa::to_json(report, false, false);

  const auto actual = payload(nlohmann::json::parse(result.out));
  for (const auto& [key, value] : expected.items()) {
    CHECK(actual.at(key).dump() == value.dump());
  }
}

TEST_CASE("predict --per-layer emits one row per model row") {
  const auto result =
      run_oax("predict --per-layer --network " + cfg("networks/lenet5.net") +
              " --config " + cfg("designs/demo.config"));
  REQUIRE(result.exit_code == 0);
  const auto doc = nlohmann::json::parse(result.out);
  CHECK(doc.at("per_layer").size() == 7);
}

TEST_CASE("predict csv format carries the frozen column order") {
  const auto result = run_oax(
      "predict --format csv --per-layer --network " +
      cfg("networks/lenet5.net") + " --config " + cfg("designs/demo.config"));
  REQUIRE(result.exit_code == 0);
  CHECK(result.out.find(
            "row,layer,kind,e_mem_pj,e_comp_pj,l_mem_ns,l_comp_ns,"
            "l_layer_ns,energy_pj,bottleneck_latency_ns,"
            "throughput_mac_per_s,area_mm2,compute_density_ops_mm2,"
            "ops_per_joule,fps,fps_per_watt") != std::string::npos);
  // 7 layer rows + 1 total row
  CHECK(std::count(result.out.begin(), result.out.end(), '\n') >= 9);
}

TEST_CASE("missing input files exit with code 2") {
  const auto result = run_oax("predict --network nope.net --config " +
                              cfg("designs/demo.config"));
  CHECK(result.exit_code == 2);
  CHECK(result.err.find("nope.net") != std::string::npos);
}

TEST_CASE("invalid design files exit with code 2") {
  const auto dir = scratch_dir();
  const auto bad = dir / "bad.config";
  std::ofstream(bad) << "k_t 0\n";
  const auto result = run_oax("predict --network " +
                              cfg("networks/lenet5.net") + " --config " +
                              bad.string());
  CHECK(result.exit_code == 2);
  fs::remove_all(dir);
}

TEST_CASE("search emits a design the predictor accepts verbatim") {
  const auto dir = scratch_dir();
  const auto result = run_oax(
      "search --network " + cfg("networks/lenet5.net") + " --space " +
      cfg("spaces/small.space") + " --tech " + cfg("tech/default.tech") +
      " --search-config " + cfg("search/tea_small.search") +
      " --seed 11 --out " + dir.string());
  REQUIRE(result.exit_code == 0);
  REQUIRE(fs::exists(dir / "best.config"));
  REQUIRE(fs::exists(dir / "trajectory.csv"));
  REQUIRE(fs::exists(dir / "result.json"));
  REQUIRE(fs::exists(dir / "manifest.json"));

  const auto best = oa::load_config((dir / "best.config").string());
  const auto space = oa::load_space(cfg("spaces/small.space"));
  const auto tech = oa::load_tech(cfg("tech/default.tech"));
  CHECK(oa::validate(best, space, tech).empty());

  const auto doc = nlohmann::json::parse(slurp(dir / "result.json"));
  CHECK(doc.at("success").get<bool>());
  CHECK(doc.at("seed").get<std::uint64_t>() == 11);
  fs::remove_all(dir);
}

TEST_CASE("search reruns with the same seed produce identical outputs") {
  const auto dir_a = scratch_dir();
  const auto dir_b = scratch_dir();
  const std::string base =
      "search --network " + cfg("networks/lenet5.net") + " --space " +
      cfg("spaces/small.space") + " --search-config " +
      cfg("search/ea_small.search") + " --seed 5 --out ";
  REQUIRE(run_oax(base + dir_a.string()).exit_code == 0);
  REQUIRE(run_oax(base + dir_b.string()).exit_code == 0);
  CHECK(slurp(dir_a / "best.config") == slurp(dir_b / "best.config"));
  CHECK(slurp(dir_a / "trajectory.csv") == slurp(dir_b / "trajectory.csv"));
  auto parse_no_clock = [&](const fs::path& path) {
    auto doc = nlohmann::json::parse(slurp(path));
    doc.erase("wall_clock_s");
    doc.erase("manifest");
    return doc.dump();
  };
  CHECK(parse_no_clock(dir_a / "result.json") ==
        parse_no_clock(dir_b / "result.json"));
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST_CASE("search --baseline exhaustive never loses to the stochastic run") {
  const auto dir_search = scratch_dir();
  const auto dir_oracle = scratch_dir();
  const std::string common =
      " --network " + cfg("networks/lenet5.net") + " --space " +
      cfg("spaces/small.space") + " --search-config " +
      cfg("search/tea_small.search");
  REQUIRE(run_oax("search" + common + " --seed 2 --out " +
                  dir_search.string())
              .exit_code == 0);
  REQUIRE(run_oax("search" + common + " --baseline exhaustive --out " +
                  dir_oracle.string())
              .exit_code == 0);

  // compare both best configs on the oracle's normalizer scale
  const auto oracle_doc = nlohmann::json::parse(slurp(dir_oracle / "result.json"));
  oa::MetricStats stats;
  stats.mean_energy_pj =
      oracle_doc.at("objective_scale").at("mean_energy_pj").get<double>();
  stats.mean_area_mm2 =
      oracle_doc.at("objective_scale").at("mean_area_mm2").get<double>();
  stats.mean_ops_per_joule =
      oracle_doc.at("objective_scale").at("mean_ops_per_joule").get<double>();
  stats.count = oracle_doc.at("objective_scale").at("count").get<std::int64_t>();

  const auto model = oa::load_network(cfg("networks/lenet5.net"));
  const auto tech = oa::default_tech();
  const auto search_cfg =
      oa::load_search_config(cfg("search/tea_small.search"));
  const auto space = oa::load_space(cfg("spaces/small.space"));
  const double oracle_best = oracle_doc.at("best").at("objective").get<double>();
  const double search_best = oa::evaluate_objective(
      model, oa::load_config((dir_search / "best.config").string()), tech,
      search_cfg.objective, stats, space.area_cap);
  CHECK(oracle_best <= search_best + 1e-12);
  fs::remove_all(dir_search);
  fs::remove_all(dir_oracle);
}

TEST_CASE("search on a singleton space emits exactly the input design") {
  const auto dir = scratch_dir();
  const auto space_path = dir / "singleton.space";
  std::ofstream(space_path)
      << "k_t 4\nk_ocu 2\nocu_type Z_SVD\nn 16\nq_rf 64\nq_glb 4096\n"
      << "b 8\nloop_order input_stationary\ntile_d 2\ntile_c 1\n";
  const auto search_path = dir / "quick.search";
  std::ofstream(search_path) << "objective TEA\nsteps 1\nbatch 1\n";
  const auto result = run_oax(
      "search --network " + cfg("networks/lenet5.net") + " --space " +
      space_path.string() + " --search-config " + search_path.string() +
      " --seed 1 --out " + dir.string());
  REQUIRE(result.exit_code == 0);
  const auto best = oa::load_config((dir / "best.config").string());
  CHECK(best.k_t == 4);
  CHECK(best.k_ocu == 2);
  CHECK(best.ocu_type == oa::OcuType::Z_SVD);
  CHECK(best.n == 16);
  CHECK(best.mapping.loop_order == oa::LoopOrder::InputStationary);
  CHECK(best.mapping.tile_d == 2);
  fs::remove_all(dir);
}

TEST_CASE("search --baseline random emits a valid feasible design") {
  const auto dir = scratch_dir();
  const auto search_path = dir / "quick.search";
  std::ofstream(search_path) << "objective TEA\nsteps 40\nbatch 8\n";
  const auto result = run_oax(
      "search --baseline random --network " + cfg("networks/lenet5.net") +
      " --space " + cfg("spaces/small.space") + " --search-config " +
      search_path.string() + " --seed 6 --out " + dir.string());
  REQUIRE(result.exit_code == 0);
  const auto doc = nlohmann::json::parse(slurp(dir / "result.json"));
  CHECK(doc.at("success").get<bool>());
  CHECK(doc.at("evaluations").get<int>() == 40 * 8);
  const auto best = oa::load_config((dir / "best.config").string());
  const auto space = oa::load_space(cfg("spaces/small.space"));
  CHECK(oa::validate(best, space, oa::default_tech()).empty());
  fs::remove_all(dir);
}

TEST_CASE("search with an impossible cap exits with code 3") {
  const auto dir = scratch_dir();
  const auto space_path = dir / "impossible.space";
  std::ofstream(space_path)
      << "k_t 1\nk_ocu 1\nocu_type R\nn 8\nq_rf 16\nq_glb 50000000\n"
      << "b 8\nloop_order output_stationary\ntile_d 1\ntile_c 1\n"
      << "area_cap 0.5\n";
  const auto search_path = dir / "quick.search";
  std::ofstream(search_path) << "objective EA\nsteps 3\nbatch 2\n";
  const auto result = run_oax(
      "search --network " + cfg("networks/lenet5.net") + " --space " +
      space_path.string() + " --search-config " + search_path.string() +
      " --seed 1 --out " + dir.string());
  CHECK(result.exit_code == 3);
  CHECK(!fs::exists(dir / "best.config"));
  fs::remove_all(dir);
}

TEST_CASE("sweep emits plot-ready csv plus a summary") {
  const auto dir = scratch_dir();
  const auto csv_path = dir / "sweep.csv";
  const auto result = run_oax(
      "sweep --network " + cfg("networks/lenet5.net") + " --space " +
      cfg("spaces/small.space") + " --samples 500 --seed 77 --thresholds "
      "0,0 --out " + csv_path.string());
  REQUIRE(result.exit_code == 0);
  const auto summary = nlohmann::json::parse(result.out);
  CHECK(summary.at("samples").get<int>() == 500);
  // no area cap in this space: everything is feasible, thresholds at zero
  CHECK(summary.at("fraction_exceeding").get<double>() == 1.0);

  const auto csv = slurp(csv_path);
  CHECK(csv.find("sample,compute_density_ops_mm2,ops_per_joule,area_mm2,"
                 "feasible") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 502);  // manifest+header+rows
  fs::remove_all(dir);
}

TEST_CASE("sweep fraction is zero at unreachable thresholds") {
  const auto result = run_oax(
      "sweep --network " + cfg("networks/lenet5.net") + " --space " +
      cfg("spaces/small.space") +
      " --samples 200 --seed 77 --thresholds 1e300,1e300");
  REQUIRE(result.exit_code == 0);
  // csv goes to stdout here; the summary is the trailing json object,
  // which starts at the last line-initial brace
  const auto brace = result.out.rfind("\n{\n");
  REQUIRE(brace != std::string::npos);
  const auto summary = nlohmann::json::parse(result.out.substr(brace + 1));
  CHECK(summary.at("fraction_exceeding").get<double>() == 0.0);
}

TEST_CASE("compare tabulates designs with stable columns") {
  const auto dir = scratch_dir();
  const auto second = dir / "second.config";
  auto config = oa::load_config(cfg("designs/demo.config"));
  config.k_t = 1;
  oa::save_config(config, second.string());

  const auto result = run_oax("compare --network " +
                              cfg("networks/lenet5.net") + " " +
                              cfg("designs/demo.config") + " " +
                              second.string() + " " +
                              cfg("designs/demo.config"));
  REQUIRE(result.exit_code == 0);
  CHECK(result.out.find("config,energy_pj,bottleneck_latency_ns,"
                        "throughput_mac_per_s,area_mm2,"
                        "compute_density_ops_mm2,ops_per_joule,fps,"
                        "fps_per_watt") != std::string::npos);
  // duplicate design -> identical rows
  std::istringstream lines(result.out);
  std::string line, first_row, last_row;
  int rows = 0;
  while (std::getline(lines, line)) {
    if (line.rfind("demo,", 0) == 0) {
      if (rows == 0) first_row = line;
      last_row = line;
      ++rows;
    }
  }
  CHECK(rows == 2);
  CHECK(first_row == last_row);
  fs::remove_all(dir);

  // rows are re-derivable from predict output
  const auto predict =
      run_oax("predict --network " + cfg("networks/lenet5.net") +
              " --config " + cfg("designs/demo.config"));
  REQUIRE(predict.exit_code == 0);
  const auto doc = nlohmann::json::parse(predict.out);
  std::ostringstream expected;
  expected.precision(17);
  expected << doc.at("totals").at("energy_pj").get<double>();
  CHECK(first_row.find(expected.str()) != std::string::npos);
}

TEST_CASE("compare rejects invalid designs with exit 2") {
  const auto dir = scratch_dir();
  const auto bad = dir / "bad.config";
  std::ofstream(bad) << "n -3\n";
  const auto result = run_oax("compare --network " +
                              cfg("networks/lenet5.net") + " " + bad.string());
  CHECK(result.exit_code == 2);
  fs::remove_all(dir);
}
