#include "bibt/sampler.hpp"

#include <Eigen/Cholesky>

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "bibt/errors.hpp"
#include "bibt/polya_gamma.hpp"

namespace bibt {

namespace {

constexpr double kScaleFloor = 1e-12;  // guards the inverse-gamma scales

/// Draws x ~ N(P^{-1} b, P^{-1}) from precision P and shift b via one
/// Cholesky factorization and two triangular solves.
Eigen::VectorXd draw_gaussian_from_precision(const Eigen::MatrixXd& precision,
                                             const Eigen::VectorXd& shift, Rng& rng,
                                             const char* where) {
  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success) {
    throw NumericalError(std::string(where) +
                         ": precision matrix is not positive definite");
  }
  Eigen::VectorXd mean = llt.solve(shift);
  Eigen::VectorXd z(precision.rows());
  for (int i = 0; i < z.size(); ++i) z[i] = rng.normal();
  return mean + llt.matrixU().solve(z);
}

void check_dimensions(const SamplerState& state, const OperatorSet& ops) {
  if (state.scores.size() != ops.n_entities() ||
      state.weights.size() != ops.cyclomatic_number ||
      state.omega.size() != ops.n_edges()) {
    throw std::invalid_argument("sampler state dimensions do not match operators");
  }
}

}  // namespace

void ComparisonData::validate() const {
  const long expected = static_cast<long>(n_entities) * (n_entities - 1) / 2;
  if (wins.size() != expected || trials.size() != expected) {
    throw DataError("comparison data needs one (wins, trials) pair per edge: expected " +
                    std::to_string(expected) + ", got " + std::to_string(wins.size()));
  }
  for (int e = 0; e < wins.size(); ++e) {
    if (trials[e] < 0 || wins[e] < 0 || wins[e] > trials[e]) {
      throw DataError("edge " + std::to_string(e) + " has wins=" +
                      std::to_string(wins[e]) + " trials=" + std::to_string(trials[e]));
    }
  }
  if (!entity_labels.empty() &&
      entity_labels.size() != static_cast<std::size_t>(n_entities)) {
    throw DataError("entity label count does not match n_entities");
  }
}

void Hyperparams::validate() const {
  if (a_sigma <= 0.0 || b_sigma <= 0.0) {
    throw std::invalid_argument("score variance prior parameters must be positive");
  }
  if (n_iterations <= 0 || burn_in < 0 || burn_in >= n_iterations) {
    throw std::invalid_argument("need 0 <= burn_in < n_iterations");
  }
  if (thin < 1) throw std::invalid_argument("thin must be >= 1");
}

SamplerState SamplerState::initial(const ComparisonData& data, const OperatorSet& ops) {
  SamplerState st;
  const int n_edges = ops.n_edges();
  st.scores = Eigen::VectorXd::Zero(ops.n_entities());
  st.weights = Eigen::VectorXd::Zero(ops.cyclomatic_number);
  st.local_scale2 = Eigen::VectorXd::Ones(ops.cyclomatic_number);
  st.aux_local = Eigen::VectorXd::Ones(ops.cyclomatic_number);
  st.omega.resize(n_edges);
  st.kappa.resize(n_edges);
  for (int e = 0; e < n_edges; ++e) {
    st.kappa[e] = data.wins[e] - 0.5 * data.trials[e];
    st.omega[e] = 0.25 * data.trials[e];  // pg_mean at zero tilt
  }
  return st;
}

bool SamplerState::finite() const {
  return scores.allFinite() && weights.allFinite() && omega.allFinite() &&
         local_scale2.allFinite() && aux_local.allFinite() &&
         std::isfinite(score_var) && std::isfinite(global_scale2) &&
         std::isfinite(aux_global);
}

std::string to_string(ModelKind kind) {
  return kind == ModelKind::bibt ? "bibt" : "baseline";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "bibt") return ModelKind::bibt;
  if (name == "baseline") return ModelKind::baseline;
  throw std::invalid_argument("unknown model '" + name + "' (expected bibt|baseline)");
}

Eigen::MatrixXd PosteriorDraws::matchup_draws(const OperatorSet& ops) const {
  return grad_flow_draws(ops) + curl_flow_draws(ops);
}

Eigen::MatrixXd PosteriorDraws::grad_flow_draws(const OperatorSet& ops) const {
  return scores * ops.grad.transpose();
}

Eigen::MatrixXd PosteriorDraws::curl_flow_draws(const OperatorSet& ops) const {
  return weights * ops.curl_adjoint_basis.transpose();
}

EdgeFlow compute_matchup(const SamplerState& state, const OperatorSet& ops) {
  check_dimensions(state, ops);
  return EdgeFlow(ops.grad * state.scores +
                  ops.curl_adjoint_basis * state.weights);
}

void gibbs_update_omega(SamplerState& state, const ComparisonData& data,
                        const OperatorSet& ops, Rng& rng) {
  const EdgeFlow matchup = compute_matchup(state, ops);
  for (int e = 0; e < state.omega.size(); ++e) {
    if (data.trials[e] == 0) {
      state.omega[e] = 0.0;
      continue;
    }
    state.omega[e] = pg_draw({data.trials[e], matchup.values[e]}, rng);
  }
}

void gibbs_update_scores(SamplerState& state,
                         [[maybe_unused]] const ComparisonData& data,
                         const OperatorSet& ops, Rng& rng) {
  check_dimensions(state, ops);
  const int n = ops.n_entities();
  if (!(state.score_var > 0.0) || !std::isfinite(state.score_var)) {
    throw NumericalError("score update: variance is not positive and finite");
  }

  // precision sigma^{-2} I + G' Omega G assembled edge-wise (G rows are +-1,
  // edges in lexicographic order)
  Eigen::MatrixXd precision =
      Eigen::MatrixXd::Identity(n, n) / state.score_var;
  for (int i = 0, e = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++e) {
      const double w = state.omega[e];
      if (w == 0.0) continue;
      precision(i, i) += w;
      precision(j, j) += w;
      precision(i, j) -= w;
      precision(j, i) -= w;
    }
  }

  const Eigen::VectorXd curl_flow = ops.curl_adjoint_basis * state.weights;
  const Eigen::VectorXd shift =
      ops.grad.transpose() *
      (state.kappa - state.omega.cwiseProduct(curl_flow)).eval();

  state.scores = draw_gaussian_from_precision(precision, shift, rng, "score update");
  state.scores.array() -= state.scores.mean();  // identifiability constraint
}

void gibbs_update_score_variance(SamplerState& state, const Hyperparams& hp, Rng& rng) {
  const double shape = hp.a_sigma + 0.5 * state.scores.size();
  const double scale = hp.b_sigma + 0.5 * state.scores.squaredNorm();
  state.score_var = std::max(rng.inverse_gamma(shape, scale), kScaleFloor);
}

void gibbs_update_curl_weights(SamplerState& state,
                               [[maybe_unused]] const ComparisonData& data,
                               const OperatorSet& ops, Rng& rng) {
  check_dimensions(state, ops);
  const int k = ops.cyclomatic_number;
  const Eigen::MatrixXd& basis = ops.curl_adjoint_basis;  // |E| x K

  Eigen::MatrixXd precision =
      (state.global_scale2 * state.local_scale2.array()).inverse().matrix().asDiagonal();
  precision.noalias() += basis.transpose() * state.omega.asDiagonal() * basis;

  const Eigen::VectorXd grad_flow = ops.grad * state.scores;
  const Eigen::VectorXd shift =
      basis.transpose() * (state.kappa - state.omega.cwiseProduct(grad_flow)).eval();

  state.weights =
      draw_gaussian_from_precision(precision, shift, rng, "curl weight update");
  if (state.weights.size() != k) {
    throw NumericalError("curl weight update produced wrong dimension");
  }
}

void gibbs_update_shrinkage(SamplerState& state, Rng& rng) {
  const int k = static_cast<int>(state.weights.size());
  // local scales
  for (int l = 0; l < k; ++l) {
    const double scale = 1.0 / state.aux_local[l] +
                         state.weights[l] * state.weights[l] /
                             (2.0 * state.global_scale2);
    state.local_scale2[l] = std::max(rng.inverse_gamma(1.0, scale), kScaleFloor);
  }
  // global scale
  double penalty = 0.0;
  for (int l = 0; l < k; ++l) {
    penalty += state.weights[l] * state.weights[l] / state.local_scale2[l];
  }
  state.global_scale2 = std::max(
      rng.inverse_gamma(0.5 * (k + 1), 1.0 / state.aux_global + 0.5 * penalty),
      kScaleFloor);
  // auxiliaries
  for (int l = 0; l < k; ++l) {
    state.aux_local[l] = rng.inverse_gamma(1.0, 1.0 + 1.0 / state.local_scale2[l]);
  }
  state.aux_global = rng.inverse_gamma(1.0, 1.0 + 1.0 / state.global_scale2);
}

namespace {

PosteriorDraws run_impl(const ComparisonData& data, const Hyperparams& hp,
                        const OperatorSet& ops, ModelKind kind) {
  hp.validate();
  data.validate();
  if (data.n_entities != ops.n_entities()) {
    throw std::invalid_argument("data has " + std::to_string(data.n_entities) +
                                " entities but operators were built for " +
                                std::to_string(ops.n_entities()));
  }

  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(hp.seed);
  SamplerState state = SamplerState::initial(data, ops);

  PosteriorDraws out;
  out.model = kind;
  out.hyperparams = hp;
  out.scores.resize(hp.retained_draws(), ops.n_entities());
  out.weights.resize(hp.retained_draws(), ops.cyclomatic_number);

  int row = 0;
  for (int it = 1; it <= hp.n_iterations; ++it) {
    gibbs_update_omega(state, data, ops, rng);
    gibbs_update_scores(state, data, ops, rng);
    gibbs_update_score_variance(state, hp, rng);
    if (kind == ModelKind::bibt) {
      gibbs_update_curl_weights(state, data, ops, rng);
      gibbs_update_shrinkage(state, rng);
    }
    if (!state.finite()) {
      throw NumericalError("non-finite sampler state at iteration " +
                           std::to_string(it));
    }
    if (it > hp.burn_in && (it - hp.burn_in) % hp.thin == 0 &&
        row < out.scores.rows()) {
      out.scores.row(row) = state.scores;
      out.weights.row(row) = state.weights;
      ++row;
    }
  }

  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace

PosteriorDraws run_chain(const ComparisonData& data, const Hyperparams& hp,
                         const OperatorSet& ops) {
  return run_impl(data, hp, ops, ModelKind::bibt);
}

PosteriorDraws run_baseline_chain(const ComparisonData& data, const Hyperparams& hp,
                                  const OperatorSet& ops) {
  return run_impl(data, hp, ops, ModelKind::baseline);
}

}  // namespace bibt
