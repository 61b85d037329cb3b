#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "bibt/graph_complex.hpp"
#include "bibt/rng.hpp"

namespace bibt {

/// Aggregated binary comparison counts on the complete graph. wins[e] and
/// trials[e] are y_ij and n_ij for the canonical edge e = (i, j), i < j; the
/// reverse count is implicit (y_ji = n_ij - y_ij). Pairs never observed carry
/// trials = 0 and drop out of the likelihood.
struct ComparisonData {
  int n_entities = 0;
  Eigen::VectorXi wins;
  Eigen::VectorXi trials;
  std::vector<std::string> entity_labels;

  /// Checks 0 <= wins <= trials and that sizes match the complete graph.
  /// Throws DataError on violation.
  void validate() const;
};

struct Hyperparams {
  double a_sigma = 0.5;
  double b_sigma = 0.5;
  int n_iterations = 10000;
  int burn_in = 2000;
  int thin = 1;
  std::uint64_t seed = 0;

  void validate() const;
  int retained_draws() const { return (n_iterations - burn_in) / thin; }
};

/// Full parameter set of one Gibbs iteration.
struct SamplerState {
  Eigen::VectorXd scores;        // sum-to-zero score vector
  double score_var = 1.0;        // prior variance of the scores
  Eigen::VectorXd weights;       // curl-basis weights, length K
  Eigen::VectorXd local_scale2;  // per-weight shrinkage scales (squared)
  double global_scale2 = 1.0;    // global shrinkage scale (squared)
  Eigen::VectorXd aux_local;     // auxiliaries behind the local scales
  double aux_global = 1.0;       // auxiliary behind the global scale
  Eigen::VectorXd omega;         // one latent per edge; exactly 0 where trials = 0
  Eigen::VectorXd kappa;         // wins - trials / 2, fixed over the run

  static SamplerState initial(const ComparisonData& data, const OperatorSet& ops);
  bool finite() const;
};

enum class ModelKind { bibt, baseline };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

/// Retained post-burn-in draws. Scores and weights are stored per draw; the
/// edge-flow functionals are derived on demand so that the total flow is the
/// exact sum of its gradient and curl parts by construction.
struct PosteriorDraws {
  ModelKind model = ModelKind::bibt;
  Hyperparams hyperparams;
  Eigen::MatrixXd scores;   // draws x N
  Eigen::MatrixXd weights;  // draws x K
  double wall_seconds = 0.0;

  int draw_count() const { return static_cast<int>(scores.rows()); }
  int n_entities() const { return static_cast<int>(scores.cols()); }
  int n_weights() const { return static_cast<int>(weights.cols()); }

  Eigen::MatrixXd matchup_draws(const OperatorSet& ops) const;
  Eigen::MatrixXd grad_flow_draws(const OperatorSet& ops) const;
  Eigen::MatrixXd curl_flow_draws(const OperatorSet& ops) const;
};

/// Match-up flow of the current state: grad scores + curl* (H weights).
EdgeFlow compute_matchup(const SamplerState& state, const OperatorSet& ops);

/// Conditional updates, in the order they run inside one sweep. Each consumes
/// draws from the passed stream and mutates the state in place.
void gibbs_update_omega(SamplerState& state, const ComparisonData& data,
                        const OperatorSet& ops, Rng& rng);
void gibbs_update_scores(SamplerState& state, const ComparisonData& data,
                         const OperatorSet& ops, Rng& rng);
void gibbs_update_score_variance(SamplerState& state, const Hyperparams& hp, Rng& rng);
void gibbs_update_curl_weights(SamplerState& state, const ComparisonData& data,
                               const OperatorSet& ops, Rng& rng);
void gibbs_update_shrinkage(SamplerState& state, Rng& rng);

/// Runs the full sampler: sweep order omega, scores, score variance, curl
/// weights, shrinkage; post burn-in every thin-th state is retained.
/// Deterministic given (data, hp.seed). Throws NumericalError with the
/// iteration index if any state component becomes non-finite.
PosteriorDraws run_chain(const ComparisonData& data, const Hyperparams& hp,
                         const OperatorSet& ops);

/// Transitive baseline: curl weights pinned at zero, same score and variance
/// updates. Draws carry an all-zero weight block so downstream summaries see
/// an exactly-zero curl flow.
PosteriorDraws run_baseline_chain(const ComparisonData& data, const Hyperparams& hp,
                                  const OperatorSet& ops);

}  // namespace bibt
