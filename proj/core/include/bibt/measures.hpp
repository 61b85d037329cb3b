#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "bibt/graph_complex.hpp"
#include "bibt/sampler.hpp"

namespace bibt {

enum class Quantity { global_measure, vorticity, matchup, grad_flow, curl_flow, scores };

std::string to_string(Quantity q);

/// Posterior summary of one quantity: per-component mean, sd and equal-tailed
/// empirical quantiles. Vorticity summaries additionally flag triads whose
/// central 95% interval excludes zero.
struct MeasureSummary {
  Quantity quantity = Quantity::matchup;
  std::vector<std::string> component_labels;
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;
  std::vector<double> levels;  // sorted, in (0, 1)
  Eigen::MatrixXd quantiles;   // levels x components
  std::vector<char> ci_excludes_zero;  // vorticity only, 95% interval
  int flagged_count = 0;
  double flagged_fraction = 0.0;
};

/// Default summary levels: 2.5%, 5%, 95%, 97.5%.
const std::vector<double>& default_levels();

/// Curl-energy fraction of a single draw's flow split. Returns 0 when both
/// components vanish. Always in [0, 1] since the two parts are orthogonal.
double global_intransitivity(const Eigen::VectorXd& grad_flow,
                             const Eigen::VectorXd& curl_flow);

/// Per-draw trace of the global measure, one value per retained draw.
Eigen::VectorXd global_intransitivity_trace(const PosteriorDraws& draws,
                                            const OperatorSet& ops);

/// Cyclic sum of the match-up flow around each triangle. Identical on the
/// full flow and on its curl part, since the gradient part is curl-free.
TriangleFlow local_vorticity(const EdgeFlow& matchup, const ComplexIndex& idx);

/// Empirical quantile, linear interpolation between order statistics
/// (matches the median at level 0.5 for any sample size).
double empirical_quantile(const Eigen::VectorXd& values, double level);

/// Posterior summary for the requested quantity. entity_labels, when given,
/// feed the component labels; otherwise generic e1..eN labels are used.
/// Requires at least two retained draws.
MeasureSummary summarize(const PosteriorDraws& draws, const ComplexIndex& idx,
                         const OperatorSet& ops, Quantity quantity,
                         const std::vector<double>& levels = default_levels(),
                         const std::vector<std::string>& entity_labels = {});

}  // namespace bibt
