// oax: analytical cost prediction and design-space search for optical DNN
// accelerators. Subcommands: predict, search, sweep, compare.
//
// Exit codes: 0 ok, 2 input/validation error, 3 search found no feasible
// design.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "oa/arch.hpp"
#include "oa/model.hpp"
#include "oa/predictor.hpp"
#include "oa/report_io.hpp"
#include "oa/rng.hpp"
#include "oa/search.hpp"
#include "oa/tech.hpp"
#include "oa/textfile.hpp"
#include "oa/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 2;
constexpr int kExitSearchFailure = 3;

struct CommonArgs {
  std::string network;
  std::string config;
  std::string space;
  std::string tech;
  std::string search_config;
  std::string out;
  std::string format = "json";
  bool per_layer = false;
  bool dram_energy = false;
  std::optional<std::uint64_t> seed;
  std::string baseline;
  std::int64_t samples = 10000;
  std::string thresholds = "0,0";
};

oa::TechParams load_tech_or_default(const std::string& path) {
  if (path.empty()) return oa::default_tech();
  return oa::load_tech(path);
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed) {
  if (seed) return *seed;
  std::random_device entropy;
  return (static_cast<std::uint64_t>(entropy()) << 32) ^ entropy();
}

void emit(const std::string& content, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << content;
  } else {
    oa::write_text_file(out_path, content);
  }
}

std::vector<std::string> manifest_inputs(
    const std::initializer_list<std::string>& paths) {
  std::vector<std::string> inputs;
  for (const auto& path : paths) {
    if (!path.empty()) inputs.push_back(path);
  }
  return inputs;
}

int cmd_predict(const CommonArgs& args) {
  const auto model = oa::load_network(args.network);
  const auto config = oa::load_config(args.config);
  const auto tech = load_tech_or_default(args.tech);
  oa::PredictorOptions options;
  options.include_dram_energy = args.dram_energy;
  const auto report = oa::network_cost(model, config, tech, options);
  const auto manifest = oa::RunManifest::make(
      "predict", manifest_inputs({args.network, args.config, args.tech}),
      std::nullopt);
  if (args.format == "csv") {
    emit(oa::report_csv(report, manifest, args.per_layer), args.out);
  } else {
    emit(oa::report_document(report, manifest, model.name, args.per_layer,
                             args.dram_energy)
                 .dump(2) +
             "\n",
         args.out);
  }
  return kExitOk;
}

int cmd_search(const CommonArgs& args) {
  const auto model = oa::load_network(args.network);
  const auto space = oa::load_space(args.space);
  const auto tech = load_tech_or_default(args.tech);
  auto search_config = oa::load_search_config(args.search_config);
  if (args.seed) {
    search_config.budget.seed = *args.seed;
  } else if (!search_config.seed_set) {
    search_config.budget.seed = resolve_seed(std::nullopt);
  }

  const std::string out_dir = args.out.empty() ? "." : args.out;
  std::filesystem::create_directories(out_dir);
  const auto manifest = oa::RunManifest::make(
      "search",
      manifest_inputs(
          {args.network, args.space, args.tech, args.search_config}),
      search_config.budget.seed);

  oa::SearchResult result;
  if (args.baseline == "random") {
    result = oa::random_search(
        model, space, tech, search_config.objective,
        search_config.budget.steps * search_config.budget.batch,
        search_config.budget.seed);
  } else if (args.baseline == "exhaustive") {
    result = oa::exhaustive_search(model, space, tech, search_config.objective);
  } else {
    result = oa::search(model, space, tech, search_config.objective,
                        search_config.budget);
  }

  nlohmann::json doc = oa::to_json(result);
  doc["manifest"] = oa::to_json(manifest, true);
  oa::write_text_file(out_dir + "/result.json", doc.dump(2) + "\n");
  oa::write_text_file(out_dir + "/trajectory.csv",
                      oa::trajectory_csv(result, manifest, space));
  oa::write_text_file(out_dir + "/manifest.json",
                      oa::to_json(manifest, true).dump(2) + "\n");
  if (!result.success) {
    std::cerr << "search failed: " << result.failure_reason << "\n";
    return kExitSearchFailure;
  }
  oa::save_config(result.best_config, out_dir + "/best.config");
  std::cout << "best objective " << result.best_objective << " after "
            << result.evaluations << " evaluations ("
            << result.wall_clock_s << " s); design written to " << out_dir
            << "/best.config\n";
  return kExitOk;
}

int cmd_sweep(const CommonArgs& args) {
  const auto model = oa::load_network(args.network);
  const auto space = oa::load_space(args.space);
  const auto tech = load_tech_or_default(args.tech);
  if (args.samples < 1) {
    throw oa::ParseError("--samples must be >= 1");
  }
  double thr_cd = 0.0, thr_tpe = 0.0;
  {
    std::istringstream in(args.thresholds);
    std::string cd, tpe;
    if (!std::getline(in, cd, ',') || !std::getline(in, tpe)) {
      throw oa::ParseError("--thresholds expects 'CD,TPE'");
    }
    thr_cd = oa::textfile::parse_double(cd, "--thresholds CD");
    thr_tpe = oa::textfile::parse_double(tpe, "--thresholds TPE");
  }
  const std::uint64_t seed = resolve_seed(args.seed);
  const auto manifest = oa::RunManifest::make(
      "sweep", manifest_inputs({args.network, args.space, args.tech}), seed);

  oa::Rng rng(seed);
  std::ostringstream csv;
  csv << oa::manifest_csv_line(manifest) << "\n";
  csv << "sample,compute_density_ops_mm2,ops_per_joule,area_mm2,feasible\n";
  std::int64_t feasible_count = 0;
  std::int64_t exceed_count = 0;
  csv.precision(17);
  for (std::int64_t i = 0; i < args.samples; ++i) {
    std::array<std::size_t, oa::SearchSpaceDef::kDims> idx{};
    for (std::size_t dim = 0; dim < oa::SearchSpaceDef::kDims; ++dim) {
      idx[dim] = rng.uniform_index(space.dim_size(dim));
    }
    const auto config = space.config_at(idx);
    const auto report = oa::network_cost(model, config, tech);
    const bool feasible =
        !space.area_cap || report.area_mm2 <= *space.area_cap;
    if (feasible) {
      ++feasible_count;
      if (report.compute_density_ops_mm2 > thr_cd &&
          report.ops_per_joule > thr_tpe) {
        ++exceed_count;
      }
    }
    csv << i << ',' << report.compute_density_ops_mm2 << ','
        << report.ops_per_joule << ',' << report.area_mm2 << ','
        << (feasible ? 1 : 0) << "\n";
  }
  emit(csv.str(), args.out);

  nlohmann::json summary;
  summary["schema_version"] = oa::kSchemaVersion;
  summary["manifest"] = oa::to_json(manifest, true);
  summary["samples"] = args.samples;
  summary["feasible"] = feasible_count;
  summary["exceeding"] = exceed_count;
  summary["threshold_compute_density"] = thr_cd;
  summary["threshold_ops_per_joule"] = thr_tpe;
  summary["fraction_exceeding"] =
      feasible_count ? static_cast<double>(exceed_count) /
                           static_cast<double>(feasible_count)
                     : 0.0;
  std::cout << summary.dump(2) << "\n";
  return kExitOk;
}

int cmd_compare(const CommonArgs& args,
                const std::vector<std::string>& design_paths) {
  const auto model = oa::load_network(args.network);
  const auto tech = load_tech_or_default(args.tech);
  std::vector<std::string> names;
  std::vector<oa::CostReport> reports;
  for (const auto& path : design_paths) {
    const auto config = oa::load_config(path);
    names.push_back(std::filesystem::path(path).stem().string());
    reports.push_back(oa::network_cost(model, config, tech));
  }
  const auto manifest = oa::RunManifest::make(
      "compare", manifest_inputs({args.network, args.tech}), std::nullopt);
  if (args.format == "json") {
    nlohmann::json doc;
    doc["schema_version"] = oa::kSchemaVersion;
    doc["manifest"] = oa::to_json(manifest, true);
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < reports.size(); ++i) {
      nlohmann::json row = oa::to_json(reports[i], false, false);
      row["config"] = names[i];
      rows.push_back(row);
    }
    doc["designs"] = rows;
    emit(doc.dump(2) + "\n", args.out);
  } else {
    emit(oa::compare_csv(names, reports, manifest), args.out);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"analytical cost prediction and automated design search for "
               "optical DNN accelerators"};
  app.set_version_flag("--version", oa::kToolVersion);
  app.require_subcommand(1);

  CommonArgs args;
  std::vector<std::string> design_paths;

  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", args.seed, "RNG seed (default: OS entropy)");
  };

  CLI::App* predict = app.add_subcommand("predict", "cost one design");
  predict->add_option("--network", args.network, "network file")->required();
  predict->add_option("--config", args.config, "design config file")->required();
  predict->add_option("--tech", args.tech, "technology file");
  predict->add_option("--out", args.out, "output path (default stdout)");
  predict->add_option("--format", args.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  predict->add_flag("--per-layer", args.per_layer, "per-layer breakdown");
  predict->add_flag("--dram-energy", args.dram_energy,
                    "report DRAM access energy as an extra field");

  CLI::App* search = app.add_subcommand("search", "optimize over a space");
  search->add_option("--network", args.network, "network file")->required();
  search->add_option("--space", args.space, "search-space file")->required();
  search->add_option("--tech", args.tech, "technology file");
  search->add_option("--search-config", args.search_config,
                     "objective/budget file")
      ->required();
  search->add_option("--out", args.out, "output directory (default .)");
  search->add_option("--baseline", args.baseline,
                     "run a baseline instead: random (same evaluation "
                     "budget) or exhaustive")
      ->check(CLI::IsMember({"random", "exhaustive"}));
  add_seed(search);

  CLI::App* sweep = app.add_subcommand("sweep", "random density sweep");
  sweep->add_option("--network", args.network, "network file")->required();
  sweep->add_option("--space", args.space, "search-space file")->required();
  sweep->add_option("--tech", args.tech, "technology file");
  sweep->add_option("--samples", args.samples, "number of random designs");
  sweep->add_option("--thresholds", args.thresholds,
                    "'CD,TPE' exceedance thresholds (OPS/mm^2, OPS/J)");
  sweep->add_option("--out", args.out, "scatter CSV path (default stdout)");
  add_seed(sweep);

  CLI::App* compare = app.add_subcommand("compare", "tabulate designs");
  compare->add_option("--network", args.network, "network file")->required();
  compare->add_option("--tech", args.tech, "technology file");
  std::string compare_format = "csv";
  compare->add_option("--format", compare_format, "csv or json")
      ->check(CLI::IsMember({"json", "csv"}));
  compare->add_option("--out", args.out, "output path (default stdout)");
  compare->add_option("designs", design_paths, "design config files")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (predict->parsed()) return cmd_predict(args);
    if (search->parsed()) return cmd_search(args);
    if (sweep->parsed()) return cmd_sweep(args);
    if (compare->parsed()) {
      args.format = compare_format;
      return cmd_compare(args, design_paths);
    }
  } catch (const oa::ParseError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitInputError;
  } catch (const std::invalid_argument& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitInputError;
  } catch (const std::length_error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitInputError;
  }
  return kExitOk;
}
