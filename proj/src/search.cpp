#include "oa/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "oa/textfile.hpp"

namespace oa {

CategoricalParams CategoricalParams::uniform(const SearchSpaceDef& space) {
  CategoricalParams params;
  params.logits.resize(SearchSpaceDef::kDims);
  for (std::size_t dim = 0; dim < SearchSpaceDef::kDims; ++dim) {
    params.logits[dim].assign(space.dim_size(dim), 0.0);
  }
  return params;
}

std::vector<double> softmax(const std::vector<double>& logits) {
  std::vector<double> probs(logits.size());
  double max_logit = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t j = 0; j < logits.size(); ++j) {
    probs[j] = std::exp(logits[j] - max_logit);
    sum += probs[j];
  }
  for (double& p : probs) p /= sum;
  return probs;
}

double CategoricalParams::entropy(std::size_t dim) const {
  double h = 0.0;
  for (double p : softmax(logits.at(dim))) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

void Objective::check() const {
  if (w_e < 0.0 || w_t < 0.0 || w_a < 0.0) {
    throw std::invalid_argument("objective weights must be >= 0");
  }
  const double active =
      (mode == ObjectiveMode::EA ? w_e : w_t) + w_a;
  if (!(active > 0.0)) {
    throw std::invalid_argument("objective weights must not all be zero");
  }
  if (cap_mode == AreaCapMode::QuadraticPenalty && !(penalty_lambda > 0.0)) {
    throw std::invalid_argument("penalty_lambda must be > 0 in penalty mode");
  }
}

void MetricStats::update(const CostReport& report) {
  ++count;
  const double k = 1.0 / static_cast<double>(count);
  mean_energy_pj += (report.energy_pj - mean_energy_pj) * k;
  mean_area_mm2 += (report.area_mm2 - mean_area_mm2) * k;
  mean_ops_per_joule += (report.ops_per_joule - mean_ops_per_joule) * k;
}

double objective_value(const CostReport& report, const Objective& objective,
                       const MetricStats& stats,
                       std::optional<double> area_cap) {
  double value = 0.0;
  switch (objective.mode) {
    case ObjectiveMode::EA:
      value = objective.w_e * stats.norm_energy(report.energy_pj) +
              objective.w_a * stats.norm_area(report.area_mm2);
      break;
    case ObjectiveMode::TEA:
      value = -objective.w_t * stats.norm_tpe(report.ops_per_joule) +
              objective.w_a * stats.norm_area(report.area_mm2);
      break;
  }
  if (area_cap && report.area_mm2 > *area_cap) {
    if (objective.cap_mode == AreaCapMode::HardReject) {
      return kInfeasible;
    }
    const double excess = (report.area_mm2 - *area_cap) / *area_cap;
    value += objective.penalty_lambda * excess * excess;
  }
  return value;
}

GumbelSample gumbel_sample(const CategoricalParams& params,
                           const SearchSpaceDef& space, double tau, Rng& rng) {
  if (!(tau > 0.0)) {
    throw std::invalid_argument("temperature must be > 0");
  }
  GumbelSample sample;
  sample.soft.resize(SearchSpaceDef::kDims);
  std::array<std::size_t, SearchSpaceDef::kDims> idx{};
  for (std::size_t dim = 0; dim < SearchSpaceDef::kDims; ++dim) {
    const auto& logits = params.logits.at(dim);
    std::vector<double> perturbed(logits.size());
    for (std::size_t j = 0; j < logits.size(); ++j) {
      perturbed[j] = (logits[j] + rng.gumbel()) / tau;
    }
    sample.soft[dim] = softmax(perturbed);
    const auto& soft = sample.soft[dim];
    idx[dim] = static_cast<std::size_t>(
        std::max_element(soft.begin(), soft.end()) - soft.begin());
  }
  sample.hard = idx;
  sample.config = space.config_at(idx);
  return sample;
}

double gs_loss_and_gradient(const CategoricalParams& params,
                            const std::vector<BatchSample>& batch, double tau,
                            std::vector<std::vector<double>>& grad) {
  grad.resize(params.logits.size());
  for (std::size_t dim = 0; dim < params.logits.size(); ++dim) {
    grad[dim].assign(params.logits[dim].size(), 0.0);
  }
  if (batch.empty()) return 0.0;

  double loss = 0.0;
  for (const auto& sample : batch) {
    double selected_sum = 0.0;
    for (std::size_t dim = 0; dim < params.logits.size(); ++dim) {
      const auto& soft = sample.soft.at(dim);
      const std::size_t k = sample.hard.at(dim);
      const double sk = soft.at(k);
      selected_sum += sk;
      // d softmax_k / d logit_j = s_k (delta_kj - s_j) / tau
      for (std::size_t j = 0; j < soft.size(); ++j) {
        const double delta = (j == k) ? 1.0 : 0.0;
        grad[dim][j] += sample.objective * sk * (delta - soft[j]) / tau;
      }
    }
    loss += sample.objective * selected_sum;
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  loss *= inv;
  for (auto& row : grad) {
    for (double& g : row) g *= inv;
  }
  return loss;
}

AdamState AdamState::init(const CategoricalParams& params, double lr,
                          double beta1, double beta2) {
  AdamState adam;
  adam.lr = lr;
  adam.beta1 = beta1;
  adam.beta2 = beta2;
  adam.m.resize(params.logits.size());
  adam.v.resize(params.logits.size());
  for (std::size_t dim = 0; dim < params.logits.size(); ++dim) {
    adam.m[dim].assign(params.logits[dim].size(), 0.0);
    adam.v[dim].assign(params.logits[dim].size(), 0.0);
  }
  return adam;
}

bool step(CategoricalParams& params, const std::vector<BatchSample>& batch,
          double tau, AdamState& adam) {
  std::vector<BatchSample> finite;
  finite.reserve(batch.size());
  for (const auto& sample : batch) {
    if (std::isfinite(sample.objective)) finite.push_back(sample);
  }
  if (finite.empty()) return false;

  std::vector<std::vector<double>> grad;
  gs_loss_and_gradient(params, finite, tau, grad);

  ++adam.t;
  const double bias1 = 1.0 - std::pow(adam.beta1, static_cast<double>(adam.t));
  const double bias2 = 1.0 - std::pow(adam.beta2, static_cast<double>(adam.t));
  for (std::size_t dim = 0; dim < params.logits.size(); ++dim) {
    for (std::size_t j = 0; j < params.logits[dim].size(); ++j) {
      double& m = adam.m[dim][j];
      double& v = adam.v[dim][j];
      const double g = grad[dim][j];
      m = adam.beta1 * m + (1.0 - adam.beta1) * g;
      v = adam.beta2 * v + (1.0 - adam.beta2) * g * g;
      const double m_hat = m / bias1;
      const double v_hat = v / bias2;
      params.logits[dim][j] -= adam.lr * m_hat / (std::sqrt(v_hat) + adam.epsilon);
    }
  }
  return true;
}

namespace {

bool feasible(const AcceleratorConfig& config, const SearchSpaceDef& space,
              const TechParams& tech) {
  return validate(config, space, tech).empty();
}

struct BestTracker {
  bool found = false;
  AcceleratorConfig config;
  CostReport report;
  double objective = kInfeasible;

  void consider(const AcceleratorConfig& candidate, const CostReport& rep,
                double value) {
    if (!std::isfinite(value)) return;
    if (!found || value < objective) {
      found = true;
      config = candidate;
      report = rep;
      objective = value;
    }
  }
};

double anneal_tau(const SearchBudget& budget, std::int64_t step_idx) {
  if (budget.steps <= 1) return budget.tau_start;
  const double frac = static_cast<double>(step_idx) /
                      static_cast<double>(budget.steps - 1);
  return budget.tau_start + (budget.tau_end - budget.tau_start) * frac;
}

}  // namespace

SearchResult search(const DnnModel& model, const SearchSpaceDef& space,
                    const TechParams& tech, const Objective& objective,
                    const SearchBudget& budget) {
  objective.check();
  check_space(space);
  if (budget.steps < 1 || budget.batch < 1) {
    throw std::invalid_argument("search budget needs steps >= 1 and batch >= 1");
  }
  const auto start = std::chrono::steady_clock::now();

  SearchResult result;
  result.seed = budget.seed;
  Rng rng(budget.seed);
  CategoricalParams params = CategoricalParams::uniform(space);
  AdamState adam =
      AdamState::init(params, budget.lr, budget.beta1, budget.beta2);

  MetricStats stats;
  bool frozen = false;
  // samples seen before the normalizer freezes, re-ranked afterwards
  std::vector<std::pair<AcceleratorConfig, CostReport>> pending;
  BestTracker best;

  auto freeze_and_flush = [&]() {
    frozen = true;
    for (const auto& [config, report] : pending) {
      if (feasible(config, space, tech)) {
        best.consider(config, report,
                      objective_value(report, objective, stats, space.area_cap));
      }
    }
    pending.clear();
  };

  for (std::int64_t step_idx = 0; step_idx < budget.steps; ++step_idx) {
    const double tau = anneal_tau(budget, step_idx);
    std::vector<BatchSample> batch;
    batch.reserve(static_cast<std::size_t>(budget.batch));
    double finite_sum = 0.0;
    std::int64_t finite_count = 0;

    for (std::int64_t j = 0; j < budget.batch; ++j) {
      GumbelSample gs = gumbel_sample(params, space, tau, rng);
      CostReport report = network_cost(model, gs.config, tech);
      ++result.evaluations;
      if (!frozen) {
        stats.update(report);
        pending.emplace_back(gs.config, report);
        if (stats.count >= budget.stats_warmup) freeze_and_flush();
      }
      const double value =
          objective_value(report, objective, stats, space.area_cap);
      if (frozen && feasible(gs.config, space, tech)) {
        best.consider(gs.config, report, value);
      }
      if (std::isfinite(value)) {
        finite_sum += value;
        ++finite_count;
      }
      batch.push_back({std::move(gs.soft), gs.hard, value});
    }

    TrajectoryPoint point;
    point.step = step_idx;
    point.sampled_objective =
        finite_count ? finite_sum / static_cast<double>(finite_count)
                     : kInfeasible;
    point.best_so_far = best.found ? best.objective : kInfeasible;
    point.entropy.reserve(SearchSpaceDef::kDims);
    for (std::size_t dim = 0; dim < SearchSpaceDef::kDims; ++dim) {
      point.entropy.push_back(params.entropy(dim));
    }
    result.trajectory.push_back(std::move(point));

    if (!step(params, batch, tau, adam)) {
      ++result.infeasible_steps;
    }
  }
  if (!frozen) freeze_and_flush();

  // final design: per-dimension argmax of the logits (first index on ties)
  std::array<std::size_t, SearchSpaceDef::kDims> argmax{};
  for (std::size_t dim = 0; dim < SearchSpaceDef::kDims; ++dim) {
    const auto& logits = params.logits[dim];
    argmax[dim] = static_cast<std::size_t>(
        std::max_element(logits.begin(), logits.end()) - logits.begin());
  }
  result.final_design = space.config_at(argmax);
  result.final_design_report = network_cost(model, result.final_design, tech);
  result.final_design_feasible = feasible(result.final_design, space, tech);
  result.final_design_objective = objective_value(
      result.final_design_report, objective, stats, space.area_cap);
  if (result.final_design_feasible && !best.found) {
    best.consider(result.final_design, result.final_design_report,
                  result.final_design_objective);
  }

  result.final_gamma = std::move(params);
  result.stats = stats;
  if (best.found) {
    result.success = true;
    result.best_config = best.config;
    result.best_report = best.report;
    result.best_objective = best.objective;
  } else {
    result.success = false;
    result.failure_reason =
        "no feasible design found in " + std::to_string(result.evaluations) +
        " sampled configs (area cap " +
        (space.area_cap ? std::to_string(*space.area_cap) + " mm^2" : "unset") +
        ")";
  }
  result.wall_clock_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

SearchResult exhaustive_search(const DnnModel& model,
                               const SearchSpaceDef& space,
                               const TechParams& tech,
                               const Objective& objective,
                               std::uint64_t limit) {
  objective.check();
  const auto start = std::chrono::steady_clock::now();

  SearchResult result;
  std::vector<std::pair<AcceleratorConfig, CostReport>> evaluated;
  evaluated.reserve(static_cast<std::size_t>(
      std::min<unsigned __int128>(space.cardinality(), limit)));
  MetricStats stats;
  enumerate(space, limit, [&](const AcceleratorConfig& config) {
    CostReport report = network_cost(model, config, tech);
    stats.update(report);
    evaluated.emplace_back(config, report);
  });
  result.evaluations = static_cast<std::int64_t>(evaluated.size());

  BestTracker best;
  for (const auto& [config, report] : evaluated) {
    if (!feasible(config, space, tech)) continue;
    best.consider(config, report,
                  objective_value(report, objective, stats, space.area_cap));
  }
  result.stats = stats;
  if (best.found) {
    result.success = true;
    result.best_config = best.config;
    result.best_report = best.report;
    result.best_objective = best.objective;
    result.final_design = best.config;
    result.final_design_report = best.report;
    result.final_design_objective = best.objective;
    result.final_design_feasible = true;
  } else {
    result.failure_reason = "no feasible design in the enumerated space";
  }
  result.wall_clock_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

SearchResult random_search(const DnnModel& model, const SearchSpaceDef& space,
                           const TechParams& tech, const Objective& objective,
                           std::int64_t samples, std::uint64_t seed) {
  objective.check();
  const auto start = std::chrono::steady_clock::now();

  SearchResult result;
  result.seed = seed;
  if (samples < 1) {
    result.failure_reason = "random search needs at least one sample";
    return result;
  }
  check_space(space);
  Rng rng(seed);
  std::vector<std::pair<AcceleratorConfig, CostReport>> evaluated;
  evaluated.reserve(static_cast<std::size_t>(samples));
  MetricStats stats;
  for (std::int64_t i = 0; i < samples; ++i) {
    std::array<std::size_t, SearchSpaceDef::kDims> idx{};
    for (std::size_t dim = 0; dim < SearchSpaceDef::kDims; ++dim) {
      idx[dim] = rng.uniform_index(space.dim_size(dim));
    }
    AcceleratorConfig config = space.config_at(idx);
    CostReport report = network_cost(model, config, tech);
    stats.update(report);
    evaluated.emplace_back(std::move(config), std::move(report));
  }
  result.evaluations = samples;

  BestTracker best;
  std::int64_t step_idx = 0;
  for (const auto& [config, report] : evaluated) {
    double value = kInfeasible;
    if (feasible(config, space, tech)) {
      value = objective_value(report, objective, stats, space.area_cap);
      best.consider(config, report, value);
    }
    TrajectoryPoint point;
    point.step = step_idx++;
    point.sampled_objective = value;
    point.best_so_far = best.found ? best.objective : kInfeasible;
    result.trajectory.push_back(std::move(point));
  }
  result.stats = stats;
  if (best.found) {
    result.success = true;
    result.best_config = best.config;
    result.best_report = best.report;
    result.best_objective = best.objective;
    result.final_design = best.config;
    result.final_design_report = best.report;
    result.final_design_objective = best.objective;
    result.final_design_feasible = true;
  } else {
    result.failure_reason = "no feasible design among the sampled configs";
  }
  result.wall_clock_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

double evaluate_objective(const DnnModel& model,
                          const AcceleratorConfig& config,
                          const TechParams& tech, const Objective& objective,
                          const MetricStats& stats,
                          std::optional<double> area_cap) {
  return objective_value(network_cost(model, config, tech), objective, stats,
                         area_cap);
}

SearchConfig load_search_config(const std::string& path) {
  SearchConfig config;
  for (const auto& line : textfile::read_lines(path)) {
    const std::string where = path + ":" + std::to_string(line.number);
    if (line.tokens.size() != 2) {
      throw ParseError(where + ": expected '<key> <value>'");
    }
    const std::string& key = line.tokens[0];
    const std::string& value = line.tokens[1];
    if (key == "objective") {
      if (value == "EA") config.objective.mode = ObjectiveMode::EA;
      else if (value == "TEA") config.objective.mode = ObjectiveMode::TEA;
      else throw ParseError(where + ": objective must be EA or TEA");
    } else if (key == "w_e") {
      config.objective.w_e = textfile::parse_double(value, where);
    } else if (key == "w_t") {
      config.objective.w_t = textfile::parse_double(value, where);
    } else if (key == "w_a") {
      config.objective.w_a = textfile::parse_double(value, where);
    } else if (key == "area_cap_mode") {
      if (value == "hard") config.objective.cap_mode = AreaCapMode::HardReject;
      else if (value == "penalty")
        config.objective.cap_mode = AreaCapMode::QuadraticPenalty;
      else throw ParseError(where + ": area_cap_mode must be hard or penalty");
    } else if (key == "penalty_lambda") {
      config.objective.penalty_lambda = textfile::parse_double(value, where);
    } else if (key == "steps") {
      config.budget.steps = textfile::parse_int(value, where);
    } else if (key == "batch") {
      config.budget.batch = textfile::parse_int(value, where);
    } else if (key == "tau_start") {
      config.budget.tau_start = textfile::parse_double(value, where);
    } else if (key == "tau_end") {
      config.budget.tau_end = textfile::parse_double(value, where);
    } else if (key == "seed") {
      config.budget.seed =
          static_cast<std::uint64_t>(textfile::parse_int(value, where));
      config.seed_set = true;
    } else if (key == "lr") {
      config.budget.lr = textfile::parse_double(value, where);
    } else if (key == "beta1") {
      config.budget.beta1 = textfile::parse_double(value, where);
    } else if (key == "beta2") {
      config.budget.beta2 = textfile::parse_double(value, where);
    } else if (key == "warmup") {
      config.budget.stats_warmup = textfile::parse_int(value, where);
    } else {
      throw ParseError(where + ": unknown key '" + key + "'");
    }
  }
  try {
    config.objective.check();
  } catch (const std::invalid_argument& err) {
    throw ParseError(path + ": " + err.what());
  }
  if (config.budget.steps < 1 || config.budget.batch < 1) {
    throw ParseError(path + ": steps and batch must be >= 1");
  }
  if (!(config.budget.tau_start > 0.0) || !(config.budget.tau_end > 0.0)) {
    throw ParseError(path + ": temperatures must be > 0");
  }
  return config;
}

}  // namespace oa
