#pragma once

#include <Eigen/Dense>

#include <array>
#include <utility>
#include <vector>

namespace bibt {

/// Lexicographic indexing of the 3-clique complex of the complete graph on
/// n_entities vertices. Entities are 0-based; edges are ordered pairs (i, j)
/// with i < j and triangles ordered triples (i, j, k) with i < j < k, both
/// enumerated in lexicographic order.
class ComplexIndex {
 public:
  /// Throws std::invalid_argument for n_entities < 3 (no triangles, the
  /// curl side of the model would be undefined).
  explicit ComplexIndex(int n_entities);

  int n_entities() const { return n_; }
  int n_edges() const { return static_cast<int>(edges_.size()); }
  int n_triangles() const { return static_cast<int>(triangles_.size()); }

  /// Requires i < j; both in [0, N).
  int edge_index(int i, int j) const;
  /// Requires i < j < k; all in [0, N).
  int triangle_index(int i, int j, int k) const;

  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }

 private:
  int n_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::array<int, 3>> triangles_;
};

/// Alternating edge function stored on the canonical orientation i < j.
/// Accessing (j, i) returns the negated canonical value.
struct EdgeFlow {
  Eigen::VectorXd values;

  EdgeFlow() = default;
  explicit EdgeFlow(Eigen::VectorXd v) : values(std::move(v)) {}
  static EdgeFlow zero(const ComplexIndex& idx) {
    return EdgeFlow(Eigen::VectorXd::Zero(idx.n_edges()));
  }

  /// Sign-correct accessor; requires i != j.
  double at(const ComplexIndex& idx, int i, int j) const;
};

/// Alternating triangular function stored on the canonical orientation
/// i < j < k. Accessors for permuted triples apply the permutation sign.
struct TriangleFlow {
  Eigen::VectorXd values;

  TriangleFlow() = default;
  explicit TriangleFlow(Eigen::VectorXd v) : values(std::move(v)) {}
  static TriangleFlow zero(const ComplexIndex& idx) {
    return TriangleFlow(Eigen::VectorXd::Zero(idx.n_triangles()));
  }

  /// Sign-correct accessor; requires i, j, k pairwise distinct.
  double at(const ComplexIndex& idx, int i, int j, int k) const;
};

/// Discrete differential operators of the complex plus the identifiable curl
/// basis. All matrices are dense; the sizes stay modest for N up to a few
/// dozen entities (|T| = 4060 at N = 30).
struct OperatorSet {
  Eigen::MatrixXd grad;                // |E| x N, rows have one +1 and one -1
  Eigen::MatrixXd curl;                // |T| x |E|
  Eigen::MatrixXd curl_adjoint;        // |E| x |T|, transpose of curl
  Eigen::MatrixXd curl_basis;          // H: |T| x K, orthonormal basis of im(curl)
  Eigen::MatrixXd kernel_basis;        // A: |T| x (|T|-K), basis of ker(curl*); empty if skipped
  Eigen::MatrixXd curl_adjoint_basis;  // curl_adjoint * curl_basis: |E| x K
  int cyclomatic_number = 0;           // K = (N-1)(N-2)/2

  int n_entities() const { return static_cast<int>(grad.cols()); }
  int n_edges() const { return static_cast<int>(grad.rows()); }
  int n_triangles() const { return static_cast<int>(curl.rows()); }
};

/// Result of the orthogonal splitting of an edge flow. On the complete graph
/// the harmonic space is trivial, so grad_part + curl_part reconstructs the
/// input up to numerical residual; the residual norm is reported as a
/// diagnostic rather than treated as a failure.
struct HodgeDecomposition {
  EdgeFlow grad_part;
  EdgeFlow curl_part;
  Eigen::VectorXd potential;  // centered score vector generating grad_part
  double residual_norm = 0.0;
};

ComplexIndex build_complex(int n_entities);

/// (grad s)(i, j) = s_i - s_j on the canonical orientation i < j, so a
/// positive flow means i is the stronger entity.
EdgeFlow grad_apply(const Eigen::VectorXd& scores, const ComplexIndex& idx);

/// (curl X)(i, j, k) = X(i,j) + X(j,k) + X(k,i), the cyclic sum around each
/// triangle.
TriangleFlow curl_apply(const EdgeFlow& flow, const ComplexIndex& idx);

/// (grad* X)(i) = sum over j of X(i, j); adjoint of grad_apply under the
/// unweighted inner products.
Eigen::VectorXd grad_adjoint_apply(const EdgeFlow& flow, const ComplexIndex& idx);

/// (curl* F)(i, j) = sum over k of F(i, j, k); adjoint of curl_apply.
EdgeFlow curl_adjoint_apply(const TriangleFlow& flow, const ComplexIndex& idx);

/// Builds the full operator set. curl_basis is the left singular basis of the
/// curl matrix (computed through its Gram matrix) with a relative
/// singular-value cutoff; the numerical rank must equal the cyclomatic number
/// (N-1)(N-2)/2, otherwise a NumericalError is thrown.
/// Column signs are fixed deterministically (first nonzero entry positive).
/// Pass with_kernel_basis = false to skip the (large) ker(curl*) basis when
/// only the sampler-facing matrices are needed.
OperatorSet build_curl_basis(const ComplexIndex& idx, double rank_tol = 1e-10,
                             bool with_kernel_basis = true);

/// Edge-space Laplacian grad grad* + curl* curl. Symmetric; positive definite
/// on the complete graph's 3-clique complex.
Eigen::MatrixXd helmholtzian(const ComplexIndex& idx);

/// Least-squares projections of an edge flow onto im(grad) and im(curl*),
/// solved with rank-revealing decompositions of the operators. The returned
/// potential is centered (sums to zero).
HodgeDecomposition hodge_project(const EdgeFlow& flow, const OperatorSet& ops);

}  // namespace bibt
