#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "oa/arch.hpp"
#include "oa/model.hpp"
#include "oa/predictor.hpp"
#include "oa/rng.hpp"
#include "oa/tech.hpp"

namespace oa {

// One logit vector per design dimension; softmax(logits[i]) is the sampling
// distribution over space.dim_size(i) choices.
struct CategoricalParams {
  std::vector<std::vector<double>> logits;

  static CategoricalParams uniform(const SearchSpaceDef& space);
  // Shannon entropy (nats) of softmax(logits[dim]).
  double entropy(std::size_t dim) const;
};

std::vector<double> softmax(const std::vector<double>& logits);

enum class ObjectiveMode { EA, TEA };
enum class AreaCapMode { HardReject, QuadraticPenalty };

// Scalarization of a CostReport; lower is better. Metrics are divided by
// running means (MetricStats) so the weights act on comparable scales.
struct Objective {
  ObjectiveMode mode = ObjectiveMode::TEA;
  double w_e = 1.0;  // energy weight (EA)
  double w_t = 1.0;  // throughput-per-energy weight (TEA)
  double w_a = 0.1;  // area weight (both modes)
  AreaCapMode cap_mode = AreaCapMode::HardReject;
  double penalty_lambda = 1.0;

  void check() const;  // throws std::invalid_argument on bad weights
};

// Running means of the sampled metrics, used to normalize the objective.
struct MetricStats {
  double mean_energy_pj = 1.0;
  double mean_area_mm2 = 1.0;
  double mean_ops_per_joule = 1.0;
  std::int64_t count = 0;

  void update(const CostReport& report);
  double norm_energy(double e) const { return count ? e / mean_energy_pj : e; }
  double norm_area(double a) const { return count ? a / mean_area_mm2 : a; }
  double norm_tpe(double t) const { return count ? t / mean_ops_per_joule : t; }
};

inline constexpr double kInfeasible = std::numeric_limits<double>::infinity();

// Lower-is-better scalar; +inf when the area cap is exceeded in hard-reject
// mode. `area_cap` comes from the space definition (unset -> no cap term).
double objective_value(const CostReport& report, const Objective& objective,
                       const MetricStats& stats,
                       std::optional<double> area_cap = std::nullopt);

struct GumbelSample {
  AcceleratorConfig config;
  std::array<std::size_t, SearchSpaceDef::kDims> hard{};  // argmax choices
  std::vector<std::vector<double>> soft;  // softmax((logits+g)/tau) per dim
};

// Gumbel-Softmax draw: the hard choice follows softmax(logits) in law for
// any temperature; the soft vectors carry the gradient path.
GumbelSample gumbel_sample(const CategoricalParams& params,
                           const SearchSpaceDef& space, double tau, Rng& rng);

struct BatchSample {
  std::vector<std::vector<double>> soft;
  std::array<std::size_t, SearchSpaceDef::kDims> hard{};
  double objective = 0.0;
};

// loss = mean over batch of objective * sum_i soft_i[hard_i], with the
// objective treated as a constant; gradient flows through the softmax only.
// Returns the loss; `grad` is resized/filled to match `params`.
double gs_loss_and_gradient(const CategoricalParams& params,
                            const std::vector<BatchSample>& batch, double tau,
                            std::vector<std::vector<double>>& grad);

struct AdamState {
  double lr = 1e-7;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t t = 0;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;

  static AdamState init(const CategoricalParams& params, double lr = 1e-7,
                        double beta1 = 0.5, double beta2 = 0.999);
};

// One Adam update of the logits from a batch of sampled (soft, objective)
// pairs. Samples with non-finite objectives are dropped; an all-infeasible
// batch is a no-op and returns false.
bool step(CategoricalParams& params, const std::vector<BatchSample>& batch,
          double tau, AdamState& adam);

struct SearchBudget {
  std::int64_t steps = 500;
  std::int64_t batch = 16;
  double tau_start = 1.0;
  double tau_end = 1.0;  // linear anneal; equal values = constant
  std::uint64_t seed = 0;
  double lr = 1e-7;
  double beta1 = 0.5;
  double beta2 = 0.999;
  std::int64_t stats_warmup = 32;  // samples before the normalizer freezes
};

struct TrajectoryPoint {
  std::int64_t step = 0;
  double sampled_objective = 0.0;  // batch mean over finite objectives
  double best_so_far = kInfeasible;
  std::vector<double> entropy;  // per-dimension, nats
};

struct SearchResult {
  bool success = false;
  std::string failure_reason;
  // Best feasible sampled design (min objective over the trajectory).
  AcceleratorConfig best_config;
  CostReport best_report;
  double best_objective = kInfeasible;
  // Design read off the final logits (per-dimension argmax), re-costed.
  AcceleratorConfig final_design;
  CostReport final_design_report;
  double final_design_objective = kInfeasible;
  bool final_design_feasible = false;

  CategoricalParams final_gamma;
  std::vector<TrajectoryPoint> trajectory;
  MetricStats stats;  // frozen normalizer all recorded objectives use
  std::uint64_t seed = 0;
  double wall_clock_s = 0.0;
  std::int64_t evaluations = 0;
  std::int64_t infeasible_steps = 0;
};

// Gumbel-Softmax search: sample batch -> cost -> Adam step, tracking the
// best feasible sample. Deterministic given budget.seed.
SearchResult search(const DnnModel& model, const SearchSpaceDef& space,
                    const TechParams& tech, const Objective& objective,
                    const SearchBudget& budget);

// Ground-truth oracle: costs every config (stats over the full space), picks
// the global optimum with first-in-enumeration-order tie-break.
SearchResult exhaustive_search(const DnnModel& model,
                               const SearchSpaceDef& space,
                               const TechParams& tech,
                               const Objective& objective,
                               std::uint64_t limit = 1'000'000);

// Uniform i.i.d. baseline over the space, stats over the sampled set.
SearchResult random_search(const DnnModel& model, const SearchSpaceDef& space,
                           const TechParams& tech, const Objective& objective,
                           std::int64_t samples, std::uint64_t seed);

// Re-evaluates a config's objective under a given normalizer (used to
// compare results produced with different stats on one scale).
double evaluate_objective(const DnnModel& model,
                          const AcceleratorConfig& config,
                          const TechParams& tech, const Objective& objective,
                          const MetricStats& stats,
                          std::optional<double> area_cap);

// Search-config file: objective mode/weights, cap handling, budget, seed,
// optimizer overrides. Missing keys keep the defaults above.
struct SearchConfig {
  Objective objective;
  SearchBudget budget;
  bool seed_set = false;  // whether the file pinned a seed
};

SearchConfig load_search_config(const std::string& path);

}  // namespace oa
