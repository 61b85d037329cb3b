#include "bibt/sim_harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "bibt/errors.hpp"
#include "bibt/measures.hpp"
#include "bibt/rng.hpp"

namespace bibt {

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// substream roles within one replication
enum : std::uint64_t { kDataRole = 0, kBibtRole = 1, kBaselineRole = 2 };

}  // namespace

void SimConfig::validate() const {
  if (n_entities < 3) throw std::invalid_argument("need at least 3 entities");
  if (trials.lo < 1 || trials.hi < trials.lo) {
    throw std::invalid_argument("trials range must satisfy 1 <= lo <= hi");
  }
  if (sparsity < 0.0 || sparsity > 1.0) {
    throw std::invalid_argument("sparsity must lie in [0, 1]");
  }
  if (score_scale < 0.0 || curl_scale < 0.0) {
    throw std::invalid_argument("scales must be nonnegative");
  }
  if (replications < 1) throw std::invalid_argument("need at least 1 replication");
  mcmc.validate();
}

SyntheticDataset generate_synthetic(const SimConfig& cfg, int replication_id,
                                    const OperatorSet& ops) {
  cfg.validate();
  if (ops.n_entities() != cfg.n_entities) {
    throw std::invalid_argument("operator set does not match configured entity count");
  }
  const std::uint64_t rep_seed = derive_stream(cfg.master_seed, replication_id);
  Rng rng(derive_stream(rep_seed, kDataRole));

  const int n = cfg.n_entities;
  const int k = ops.cyclomatic_number;

  SyntheticDataset out;
  out.truth.scores.resize(n);
  for (int i = 0; i < n; ++i) out.truth.scores[i] = cfg.score_scale * rng.normal();
  out.truth.scores.array() -= out.truth.scores.mean();

  // a uniformly random subset of ceil((1 - sparsity) K) weights is nonzero
  const int active = static_cast<int>(std::ceil((1.0 - cfg.sparsity) * k));
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  for (int i = k - 1; i > 0; --i) {  // Fisher-Yates on the seeded stream
    const int j = static_cast<int>(rng.uniform() * (i + 1));
    std::swap(order[i], order[j]);
  }
  out.truth.weights = Eigen::VectorXd::Zero(k);
  for (int i = 0; i < active; ++i) {
    out.truth.weights[order[i]] = cfg.curl_scale * rng.normal();
  }

  out.truth.grad_flow = ops.grad * out.truth.scores;
  out.truth.curl_flow = ops.curl_adjoint_basis * out.truth.weights;
  out.truth.matchup = out.truth.grad_flow + out.truth.curl_flow;

  const int n_edges = ops.n_edges();
  out.data.n_entities = n;
  out.data.wins.resize(n_edges);
  out.data.trials.resize(n_edges);
  for (int e = 0; e < n_edges; ++e) {
    int trials = cfg.trials.lo;
    if (cfg.trials.hi > cfg.trials.lo) {
      std::uniform_int_distribution<int> dist(cfg.trials.lo, cfg.trials.hi);
      trials = dist(rng.engine());
    }
    out.data.trials[e] = trials;
    out.data.wins[e] =
        static_cast<int>(rng.binomial(trials, logistic(out.truth.matchup[e])));
  }
  return out;
}

MseTriple compute_mse(const SyntheticTruth& truth, const PosteriorDraws& draws,
                      const OperatorSet& ops) {
  const int n_edges = ops.n_edges();
  if (truth.matchup.size() != n_edges) {
    throw std::invalid_argument("truth does not match operator dimensions");
  }
  const Eigen::VectorXd grad_hat = draws.grad_flow_draws(ops).colwise().mean();
  const Eigen::VectorXd curl_hat = draws.curl_flow_draws(ops).colwise().mean();
  MseTriple out;
  out.grad = (grad_hat - truth.grad_flow).squaredNorm() / n_edges;
  out.curl = (curl_hat - truth.curl_flow).squaredNorm() / n_edges;
  out.matchup = (grad_hat + curl_hat - truth.matchup).squaredNorm() / n_edges;
  return out;
}

SignRecovery compute_recovery_accuracy(const SyntheticTruth& truth,
                                       const PosteriorDraws& draws,
                                       const OperatorSet& ops) {
  const Eigen::VectorXd estimate = draws.matchup_draws(ops).colwise().mean();
  SignRecovery out;
  int hits = 0;
  for (int e = 0; e < estimate.size(); ++e) {
    if (truth.matchup[e] == 0.0) {
      ++out.zero_truth_edges;  // counted as a miss
      continue;
    }
    if (estimate[e] * truth.matchup[e] > 0.0) ++hits;
  }
  out.accuracy = static_cast<double>(hits) / static_cast<double>(estimate.size());
  return out;
}

namespace {

/// Central interval [ (1-level)/2, (1+level)/2 ] bounds for every column.
void central_interval(const Eigen::MatrixXd& draws, double level,
                      Eigen::VectorXd& lo, Eigen::VectorXd& hi) {
  const double tail = 0.5 * (1.0 - level);
  lo.resize(draws.cols());
  hi.resize(draws.cols());
  for (int c = 0; c < draws.cols(); ++c) {
    lo[c] = empirical_quantile(draws.col(c), tail);
    hi[c] = empirical_quantile(draws.col(c), 1.0 - tail);
  }
}

}  // namespace

std::map<double, DetectionScores> compute_detection(const SyntheticTruth& truth,
                                                    const PosteriorDraws& draws,
                                                    const OperatorSet& ops,
                                                    const std::vector<double>& levels) {
  const Eigen::MatrixXd curl_draws = draws.curl_flow_draws(ops);
  // structural zeros of the basis can round to ~1e-17; classify them as zero
  const double zero_tol =
      1e-9 * std::max(1.0, truth.curl_flow.lpNorm<Eigen::Infinity>());
  const auto is_positive = [&](int e) {
    return std::abs(truth.curl_flow[e]) > zero_tol;
  };
  int positives = 0;
  for (int e = 0; e < truth.curl_flow.size(); ++e) {
    if (is_positive(e)) ++positives;
  }

  std::map<double, DetectionScores> out;
  Eigen::VectorXd lo, hi;
  for (double level : levels) {
    central_interval(curl_draws, level, lo, hi);
    int detected = 0, true_detected = 0;
    for (int e = 0; e < curl_draws.cols(); ++e) {
      const bool excludes_zero = lo[e] > 0.0 || hi[e] < 0.0;
      if (!excludes_zero) continue;
      ++detected;
      if (is_positive(e)) ++true_detected;
    }
    DetectionScores scores;
    if (positives > 0) scores.recall = static_cast<double>(true_detected) / positives;
    if (detected > 0) scores.precision = static_cast<double>(true_detected) / detected;
    if (scores.recall && scores.precision && *scores.recall + *scores.precision > 0.0) {
      scores.f1 = 2.0 * *scores.recall * *scores.precision /
                  (*scores.recall + *scores.precision);
    }
    out[level] = scores;
  }
  return out;
}

std::map<double, CoverageRates> compute_coverage(const SyntheticTruth& truth,
                                                 const PosteriorDraws& draws,
                                                 const OperatorSet& ops,
                                                 const std::vector<double>& levels) {
  const Eigen::MatrixXd grad_draws = draws.grad_flow_draws(ops);
  const Eigen::MatrixXd curl_draws = draws.curl_flow_draws(ops);
  const Eigen::MatrixXd matchup_draws = grad_draws + curl_draws;
  const int n_edges = static_cast<int>(matchup_draws.cols());

  std::map<double, CoverageRates> out;
  Eigen::VectorXd lo, hi;
  for (double level : levels) {
    CoverageRates rates;
    const auto covered = [&](const Eigen::MatrixXd& component_draws,
                             const Eigen::VectorXd& target) {
      central_interval(component_draws, level, lo, hi);
      int inside = 0;
      for (int e = 0; e < n_edges; ++e) {
        if (lo[e] <= target[e] && target[e] <= hi[e]) ++inside;
      }
      return static_cast<double>(inside) / n_edges;
    };
    rates.matchup = covered(matchup_draws, truth.matchup);
    rates.grad = covered(grad_draws, truth.grad_flow);
    rates.curl = covered(curl_draws, truth.curl_flow);
    out[level] = rates;
  }
  return out;
}

std::optional<double> StudyReport::mean_of(
    ModelKind model,
    const std::function<std::optional<double>(const ReplicationRecord&)>& metric) const {
  double total = 0.0;
  int count = 0;
  for (const auto& rec : records) {
    if (rec.model != model || rec.aborted) continue;
    if (const auto value = metric(rec)) {
      total += *value;
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return total / count;
}

namespace {

ReplicationRecord evaluate_fit(const SyntheticDataset& dataset, int replication,
                               ModelKind model, const SimConfig& cfg,
                               const OperatorSet& ops) {
  ReplicationRecord rec;
  rec.replication = replication;
  rec.model = model;
  try {
    Hyperparams hp = cfg.mcmc;
    const std::uint64_t rep_seed = derive_stream(cfg.master_seed, replication);
    hp.seed = derive_stream(rep_seed,
                            model == ModelKind::bibt ? kBibtRole : kBaselineRole);
    const PosteriorDraws draws = model == ModelKind::bibt
                                     ? run_chain(dataset.data, hp, ops)
                                     : run_baseline_chain(dataset.data, hp, ops);
    rec.mse = compute_mse(dataset.truth, draws, ops);
    rec.recovery = compute_recovery_accuracy(dataset.truth, draws, ops);
    rec.detection = compute_detection(dataset.truth, draws, ops, cfg.detection_levels);
    rec.coverage = compute_coverage(dataset.truth, draws, ops);
    rec.intransitivity = global_intransitivity_trace(draws, ops).mean();
    rec.wall_seconds = draws.wall_seconds;
  } catch (const NumericalError& err) {
    rec.aborted = true;
    rec.abort_reason = err.what();
  }
  return rec;
}

}  // namespace

StudyReport run_study(const SimConfig& cfg, int jobs) {
  cfg.validate();
  const ComplexIndex idx = build_complex(cfg.n_entities);
  const OperatorSet ops = build_curl_basis(idx, 1e-10, /*with_kernel_basis=*/false);

  StudyReport report;
  report.config = cfg;
  report.records.resize(2 * static_cast<std::size_t>(cfg.replications));

  if (jobs < 1) jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 1;
  jobs = std::min(jobs, cfg.replications);

  std::atomic<int> next{0};
  const auto worker = [&]() {
    while (true) {
      const int r = next.fetch_add(1);
      if (r >= cfg.replications) break;
      const SyntheticDataset dataset = generate_synthetic(cfg, r, ops);
      report.records[2 * r] = evaluate_fit(dataset, r, ModelKind::bibt, cfg, ops);
      report.records[2 * r + 1] =
          evaluate_fit(dataset, r, ModelKind::baseline, cfg, ops);
    }
  };

  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return report;
}

}  // namespace bibt
