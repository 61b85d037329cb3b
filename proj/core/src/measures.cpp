#include "bibt/measures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bibt {

namespace {

std::vector<std::string> entity_names(int n, const std::vector<std::string>& labels) {
  if (!labels.empty()) {
    if (labels.size() != static_cast<std::size_t>(n)) {
      throw std::invalid_argument("label count does not match entity count");
    }
    return labels;
  }
  std::vector<std::string> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back("e" + std::to_string(i + 1));
  return out;
}

}  // namespace

std::string to_string(Quantity q) {
  switch (q) {
    case Quantity::global_measure: return "global_measure";
    case Quantity::vorticity: return "vorticity";
    case Quantity::matchup: return "matchup";
    case Quantity::grad_flow: return "grad_flow";
    case Quantity::curl_flow: return "curl_flow";
    case Quantity::scores: return "scores";
  }
  return "unknown";
}

const std::vector<double>& default_levels() {
  static const std::vector<double> levels{0.025, 0.05, 0.95, 0.975};
  return levels;
}

double global_intransitivity(const Eigen::VectorXd& grad_flow,
                             const Eigen::VectorXd& curl_flow) {
  const double g = grad_flow.squaredNorm();
  const double c = curl_flow.squaredNorm();
  if (g + c == 0.0) return 0.0;  // all-zero flow counts as transitive
  return c / (g + c);
}

Eigen::VectorXd global_intransitivity_trace(const PosteriorDraws& draws,
                                            const OperatorSet& ops) {
  const Eigen::MatrixXd grad = draws.grad_flow_draws(ops);
  const Eigen::MatrixXd curl = draws.curl_flow_draws(ops);
  Eigen::VectorXd out(draws.draw_count());
  for (int r = 0; r < out.size(); ++r) {
    out[r] = global_intransitivity(grad.row(r), curl.row(r));
  }
  return out;
}

TriangleFlow local_vorticity(const EdgeFlow& matchup, const ComplexIndex& idx) {
  return curl_apply(matchup, idx);
}

double empirical_quantile(const Eigen::VectorXd& values, double level) {
  if (values.size() == 0) throw std::invalid_argument("quantile of empty sample");
  if (level < 0.0 || level > 1.0) {
    throw std::invalid_argument("quantile level must lie in [0, 1]");
  }
  std::vector<double> sorted(values.data(), values.data() + values.size());
  std::sort(sorted.begin(), sorted.end());
  const double h = level * (sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

namespace {

/// Column-wise mean/sd/quantiles over a draws-by-components matrix.
void summarize_matrix(const Eigen::MatrixXd& draws, const std::vector<double>& levels,
                      MeasureSummary& out) {
  const int rows = static_cast<int>(draws.rows());
  const int cols = static_cast<int>(draws.cols());
  out.mean.resize(cols);
  out.sd.resize(cols);
  out.levels = levels;
  std::sort(out.levels.begin(), out.levels.end());
  out.quantiles.resize(static_cast<int>(out.levels.size()), cols);

  std::vector<double> buf(rows);
  for (int c = 0; c < cols; ++c) {
    const double m = draws.col(c).mean();
    out.mean[c] = m;
    out.sd[c] = std::sqrt((draws.col(c).array() - m).square().sum() / (rows - 1));
    for (int r = 0; r < rows; ++r) buf[r] = draws(r, c);
    std::sort(buf.begin(), buf.end());
    for (std::size_t q = 0; q < out.levels.size(); ++q) {
      const double h = out.levels[q] * (rows - 1);
      const auto lo = static_cast<std::size_t>(std::floor(h));
      const double frac = h - static_cast<double>(lo);
      out.quantiles(static_cast<int>(q), c) =
          lo + 1 >= buf.size() ? buf.back() : buf[lo] + frac * (buf[lo + 1] - buf[lo]);
    }
  }
}

Eigen::MatrixXd vorticity_draws(const PosteriorDraws& draws, const OperatorSet& ops) {
  // curl of the match-up flow equals curl of its curl part
  return draws.matchup_draws(ops) * ops.curl.transpose();
}

}  // namespace

MeasureSummary summarize(const PosteriorDraws& draws, const ComplexIndex& idx,
                         const OperatorSet& ops, Quantity quantity,
                         const std::vector<double>& levels,
                         const std::vector<std::string>& entity_labels) {
  if (draws.draw_count() < 2) {
    throw std::invalid_argument("summaries need at least two retained draws");
  }
  MeasureSummary out;
  out.quantity = quantity;
  const auto names = entity_names(idx.n_entities(), entity_labels);

  Eigen::MatrixXd value_draws;
  switch (quantity) {
    case Quantity::global_measure:
      value_draws = global_intransitivity_trace(draws, ops);
      out.component_labels = {"global_measure"};
      break;
    case Quantity::scores:
      value_draws = draws.scores;
      out.component_labels = names;
      break;
    case Quantity::matchup:
      value_draws = draws.matchup_draws(ops);
      break;
    case Quantity::grad_flow:
      value_draws = draws.grad_flow_draws(ops);
      break;
    case Quantity::curl_flow:
      value_draws = draws.curl_flow_draws(ops);
      break;
    case Quantity::vorticity:
      value_draws = vorticity_draws(draws, ops);
      break;
  }

  if (quantity == Quantity::matchup || quantity == Quantity::grad_flow ||
      quantity == Quantity::curl_flow) {
    out.component_labels.reserve(idx.n_edges());
    for (const auto& [i, j] : idx.edges()) {
      out.component_labels.push_back(names[i] + "/" + names[j]);
    }
  } else if (quantity == Quantity::vorticity) {
    out.component_labels.reserve(idx.n_triangles());
    for (const auto& [i, j, k] : idx.triangles()) {
      out.component_labels.push_back(names[i] + "/" + names[j] + "/" + names[k]);
    }
  }

  summarize_matrix(value_draws, levels, out);

  if (quantity == Quantity::vorticity) {
    out.ci_excludes_zero.resize(value_draws.cols());
    for (int c = 0; c < value_draws.cols(); ++c) {
      const double lo = empirical_quantile(value_draws.col(c), 0.025);
      const double hi = empirical_quantile(value_draws.col(c), 0.975);
      out.ci_excludes_zero[c] = (lo > 0.0 || hi < 0.0) ? 1 : 0;
      out.flagged_count += out.ci_excludes_zero[c];
    }
    out.flagged_fraction =
        static_cast<double>(out.flagged_count) / static_cast<double>(value_draws.cols());
  }
  return out;
}

}  // namespace bibt
