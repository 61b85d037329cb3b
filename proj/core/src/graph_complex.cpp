#include "bibt/graph_complex.hpp"

#include <Eigen/Eigenvalues>

#include <cassert>
#include <limits>
#include <cmath>
#include <stdexcept>
#include <string>

#include "bibt/errors.hpp"

namespace bibt {

namespace {

Eigen::MatrixXd build_grad_matrix(const ComplexIndex& idx) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(idx.n_edges(), idx.n_entities());
  for (int e = 0; e < idx.n_edges(); ++e) {
    const auto [i, j] = idx.edges()[e];
    g(e, i) = 1.0;
    g(e, j) = -1.0;
  }
  return g;
}

Eigen::MatrixXd build_curl_matrix(const ComplexIndex& idx) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(idx.n_triangles(), idx.n_edges());
  for (int t = 0; t < idx.n_triangles(); ++t) {
    const auto [i, j, k] = idx.triangles()[t];
    // X(i,j) + X(j,k) + X(k,i) with X(k,i) = -X(i,k) on canonical storage.
    c(t, idx.edge_index(i, j)) = 1.0;
    c(t, idx.edge_index(j, k)) = 1.0;
    c(t, idx.edge_index(i, k)) = -1.0;
  }
  return c;
}

}  // namespace

ComplexIndex::ComplexIndex(int n_entities) : n_(n_entities) {
  if (n_entities < 3) {
    throw std::invalid_argument(
        "complex requires at least 3 entities, got " + std::to_string(n_entities));
  }
  edges_.reserve(static_cast<std::size_t>(n_) * (n_ - 1) / 2);
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j) edges_.emplace_back(i, j);
  triangles_.reserve(static_cast<std::size_t>(n_) * (n_ - 1) * (n_ - 2) / 6);
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      for (int k = j + 1; k < n_; ++k) triangles_.push_back({i, j, k});
}

int ComplexIndex::edge_index(int i, int j) const {
  assert(0 <= i && i < j && j < n_);
  // edges with first vertex < i, then offset within row i
  return i * (2 * n_ - i - 1) / 2 + (j - i - 1);
}

int ComplexIndex::triangle_index(int i, int j, int k) const {
  assert(0 <= i && i < j && j < k && k < n_);
  int base = 0;
  for (int a = 0; a < i; ++a) base += (n_ - 1 - a) * (n_ - 2 - a) / 2;
  for (int b = i + 1; b < j; ++b) base += n_ - 1 - b;
  return base + (k - j - 1);
}

double EdgeFlow::at(const ComplexIndex& idx, int i, int j) const {
  assert(i != j);
  if (i < j) return values[idx.edge_index(i, j)];
  return -values[idx.edge_index(j, i)];
}

double TriangleFlow::at(const ComplexIndex& idx, int i, int j, int k) const {
  assert(i != j && j != k && i != k);
  // sort the triple, tracking the permutation sign
  int a = i, b = j, c = k;
  double sign = 1.0;
  if (a > b) { std::swap(a, b); sign = -sign; }
  if (b > c) { std::swap(b, c); sign = -sign; }
  if (a > b) { std::swap(a, b); sign = -sign; }
  return sign * values[idx.triangle_index(a, b, c)];
}

ComplexIndex build_complex(int n_entities) { return ComplexIndex(n_entities); }

EdgeFlow grad_apply(const Eigen::VectorXd& scores, const ComplexIndex& idx) {
  if (scores.size() != idx.n_entities()) {
    throw std::invalid_argument("grad_apply: score vector has length " +
                                std::to_string(scores.size()) + ", expected " +
                                std::to_string(idx.n_entities()));
  }
  EdgeFlow out = EdgeFlow::zero(idx);
  for (int e = 0; e < idx.n_edges(); ++e) {
    const auto [i, j] = idx.edges()[e];
    out.values[e] = scores[i] - scores[j];
  }
  return out;
}

TriangleFlow curl_apply(const EdgeFlow& flow, const ComplexIndex& idx) {
  if (flow.values.size() != idx.n_edges()) {
    throw std::invalid_argument("curl_apply: edge flow has length " +
                                std::to_string(flow.values.size()) + ", expected " +
                                std::to_string(idx.n_edges()));
  }
  TriangleFlow out = TriangleFlow::zero(idx);
  for (int t = 0; t < idx.n_triangles(); ++t) {
    const auto [i, j, k] = idx.triangles()[t];
    out.values[t] = flow.values[idx.edge_index(i, j)] +
                    flow.values[idx.edge_index(j, k)] -
                    flow.values[idx.edge_index(i, k)];
  }
  return out;
}

Eigen::VectorXd grad_adjoint_apply(const EdgeFlow& flow, const ComplexIndex& idx) {
  if (flow.values.size() != idx.n_edges()) {
    throw std::invalid_argument("grad_adjoint_apply: edge flow has length " +
                                std::to_string(flow.values.size()) + ", expected " +
                                std::to_string(idx.n_edges()));
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(idx.n_entities());
  for (int e = 0; e < idx.n_edges(); ++e) {
    const auto [i, j] = idx.edges()[e];
    out[i] += flow.values[e];
    out[j] -= flow.values[e];
  }
  return out;
}

EdgeFlow curl_adjoint_apply(const TriangleFlow& flow, const ComplexIndex& idx) {
  if (flow.values.size() != idx.n_triangles()) {
    throw std::invalid_argument("curl_adjoint_apply: triangle flow has length " +
                                std::to_string(flow.values.size()) + ", expected " +
                                std::to_string(idx.n_triangles()));
  }
  EdgeFlow out = EdgeFlow::zero(idx);
  for (int t = 0; t < idx.n_triangles(); ++t) {
    const auto [i, j, k] = idx.triangles()[t];
    const double v = flow.values[t];
    out.values[idx.edge_index(i, j)] += v;
    out.values[idx.edge_index(j, k)] += v;
    out.values[idx.edge_index(i, k)] -= v;
  }
  return out;
}

OperatorSet build_curl_basis(const ComplexIndex& idx, double rank_tol,
                             bool with_kernel_basis) {
  if (rank_tol <= 0.0) {
    throw std::invalid_argument("build_curl_basis: rank_tol must be positive");
  }
  OperatorSet ops;
  ops.grad = build_grad_matrix(idx);
  ops.curl = build_curl_matrix(idx);
  ops.curl_adjoint = ops.curl.transpose();

  const int n = idx.n_entities();
  const int expected_rank = (n - 1) * (n - 2) / 2;

  // Left singular basis of the curl matrix via its (small) Gram matrix:
  // C'C = V S^2 V', H = C V S^{-1}. The spectrum is benign here; the nonzero
  // eigenvalues of C'C all equal N on the complete graph's clique complex.
  // (BDCSVD in Eigen 3.4 returns non-finite thin-U factors on this matrix.)
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(ops.curl.transpose() * ops.curl);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("eigendecomposition of the curl Gram matrix failed");
  }
  const Eigen::VectorXd& lambda = eig.eigenvalues();  // ascending
  const double lambda_max = std::max(lambda[lambda.size() - 1], 0.0);
  // numerically-zero eigenvalues of the Gram matrix sit at ~eps * lambda_max;
  // floor them before applying the relative singular-value cutoff
  const double noise_floor = static_cast<double>(lambda.size()) *
                             std::numeric_limits<double>::epsilon() * lambda_max;
  const double sigma_cutoff = rank_tol * std::sqrt(lambda_max);
  int rank = 0;
  while (rank < lambda.size()) {
    const double lam = lambda[lambda.size() - 1 - rank];
    if (lam <= noise_floor || std::sqrt(lam) <= sigma_cutoff) break;
    ++rank;
  }
  if (rank != expected_rank) {
    throw NumericalError("curl matrix has numerical rank " + std::to_string(rank) +
                         " but the cyclomatic number is " +
                         std::to_string(expected_rank));
  }
  ops.cyclomatic_number = rank;
  const Eigen::MatrixXd right = eig.eigenvectors().rightCols(rank);
  const Eigen::VectorXd inv_sigma =
      lambda.tail(rank).cwiseSqrt().cwiseInverse();
  ops.curl_basis = ops.curl * right * inv_sigma.asDiagonal();

  // deterministic column signs: first nonzero entry (by index) positive
  for (int c = 0; c < ops.curl_basis.cols(); ++c) {
    for (int r = 0; r < ops.curl_basis.rows(); ++r) {
      const double v = ops.curl_basis(r, c);
      if (std::abs(v) > 1e-8) {
        if (v < 0.0) ops.curl_basis.col(c) *= -1.0;
        break;
      }
    }
  }

  ops.curl_adjoint_basis = ops.curl_adjoint * ops.curl_basis;

  if (with_kernel_basis) {
    const int nt = idx.n_triangles();
    if (nt == rank) {
      ops.kernel_basis.resize(nt, 0);
    } else {
      // complete curl_basis to an orthonormal basis of the triangle space;
      // the trailing columns span ker(curl*)
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(ops.curl_basis);
      Eigen::MatrixXd ext = Eigen::MatrixXd::Zero(nt, nt - rank);
      ext.bottomRows(nt - rank).setIdentity();
      ops.kernel_basis = qr.householderQ() * ext;
    }
  } else {
    ops.kernel_basis.resize(idx.n_triangles(), 0);
  }
  return ops;
}

Eigen::MatrixXd helmholtzian(const ComplexIndex& idx) {
  const Eigen::MatrixXd g = build_grad_matrix(idx);
  const Eigen::MatrixXd c = build_curl_matrix(idx);
  return g * g.transpose() + c.transpose() * c;
}

HodgeDecomposition hodge_project(const EdgeFlow& flow, const OperatorSet& ops) {
  if (flow.values.size() != ops.n_edges()) {
    throw std::invalid_argument("hodge_project: edge flow has length " +
                                std::to_string(flow.values.size()) + ", expected " +
                                std::to_string(ops.n_edges()));
  }
  HodgeDecomposition out;

  // minimum-norm least squares; the grad side's null space is span(1), so the
  // minimum-norm potential is automatically centered
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> grad_cod(ops.grad);
  out.potential = grad_cod.solve(flow.values);
  out.potential.array() -= out.potential.mean();
  out.grad_part = EdgeFlow(ops.grad * out.potential);

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> curl_cod(ops.curl_adjoint);
  const Eigen::VectorXd phi = curl_cod.solve(flow.values);
  out.curl_part = EdgeFlow(ops.curl_adjoint * phi);

  out.residual_norm =
      (flow.values - out.grad_part.values - out.curl_part.values).norm();
  return out;
}

}  // namespace bibt
