#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bibt/graph_complex.hpp"
#include "bibt/sampler.hpp"

namespace bibt {

/// Number of trials per edge: constant when lo == hi, otherwise drawn
/// uniformly from {lo..hi} independently per edge.
struct TrialsRange {
  int lo = 100;
  int hi = 100;
};

struct SimConfig {
  int n_entities = 10;
  TrialsRange trials;
  double sparsity = 0.5;     // fraction of zeroed curl-basis weights; 1 = transitive
  double score_scale = 1.0;  // sd of the true scores
  double curl_scale = 1.0;   // sd of the nonzero true curl weights
  int replications = 100;
  std::uint64_t master_seed = 0;
  Hyperparams mcmc;
  std::vector<double> detection_levels{0.90, 0.95, 0.99};

  void validate() const;
};

struct SyntheticTruth {
  Eigen::VectorXd scores;     // centered
  Eigen::VectorXd weights;    // sparse in the curl basis
  Eigen::VectorXd matchup;    // grad + curl flow
  Eigen::VectorXd grad_flow;
  Eigen::VectorXd curl_flow;
};

struct SyntheticDataset {
  SyntheticTruth truth;
  ComparisonData data;
};

/// Draws one replication's ground truth and binomial outcomes. All randomness
/// derives from (cfg.master_seed, replication_id), so the dataset is a pure
/// function of those two values.
SyntheticDataset generate_synthetic(const SimConfig& cfg, int replication_id,
                                    const OperatorSet& ops);

struct MseTriple {
  double matchup = 0.0;
  double grad = 0.0;
  double curl = 0.0;
};

/// Mean squared errors of the posterior-mean flows against the truth,
/// normalized by the edge count. The curl error is computed on the edge-flow
/// scale, which is the identified scale.
MseTriple compute_mse(const SyntheticTruth& truth, const PosteriorDraws& draws,
                      const OperatorSet& ops);

struct SignRecovery {
  double accuracy = 0.0;     // fraction of edges whose estimated sign matches
  int zero_truth_edges = 0;  // edges with exactly zero true flow (counted as misses)
};

SignRecovery compute_recovery_accuracy(const SyntheticTruth& truth,
                                       const PosteriorDraws& draws,
                                       const OperatorSet& ops);

struct DetectionScores {
  std::optional<double> recall;
  std::optional<double> precision;
  std::optional<double> f1;
};

/// Detection of nonzero true curl-flow edges by central credible intervals at
/// each level. Recall is absent when the truth has no nonzero curl edge;
/// precision when no edge is flagged; f1 when recall + precision is 0 or
/// either factor is absent.
std::map<double, DetectionScores> compute_detection(const SyntheticTruth& truth,
                                                    const PosteriorDraws& draws,
                                                    const OperatorSet& ops,
                                                    const std::vector<double>& levels);

struct CoverageRates {
  double matchup = 0.0;
  double grad = 0.0;
  double curl = 0.0;
};

/// Fraction of edges whose central credible interval contains the true value,
/// per component and nominal level.
std::map<double, CoverageRates> compute_coverage(
    const SyntheticTruth& truth, const PosteriorDraws& draws, const OperatorSet& ops,
    const std::vector<double>& levels = {0.90, 0.95});

struct ReplicationRecord {
  int replication = 0;
  ModelKind model = ModelKind::bibt;
  bool aborted = false;
  std::string abort_reason;
  MseTriple mse;
  SignRecovery recovery;
  double intransitivity = 0.0;  // posterior mean of the global measure
  std::map<double, DetectionScores> detection;
  std::map<double, CoverageRates> coverage;
  double wall_seconds = 0.0;
};

struct StudyReport {
  SimConfig config;
  std::vector<ReplicationRecord> records;

  /// Mean of a metric over non-aborted replications of one model; absent if
  /// the metric was defined in none of them.
  std::optional<double> mean_of(
      ModelKind model,
      const std::function<std::optional<double>(const ReplicationRecord&)>& metric) const;
};

/// Runs generate -> fit (both models) -> metrics for every replication and
/// collects the per-replication records. Chain aborts are recorded, not
/// fatal. Deterministic given cfg regardless of the worker count.
StudyReport run_study(const SimConfig& cfg, int jobs = 1);

}  // namespace bibt
