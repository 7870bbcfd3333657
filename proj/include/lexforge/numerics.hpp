#ifndef LEXFORGE_NUMERICS_HPP
#define LEXFORGE_NUMERICS_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "lexforge/matrix.hpp"
#include "lexforge/rng.hpp"

namespace lexforge {

// Sample Pearson correlation of two equal-length sequences.
// Throws DataError on length mismatch, fewer than two points, or a
// constant input (the correlation is undefined at zero variance).
double pearson_correlation(std::span<const double> x, std::span<const double> y);

struct KMeansResult {
    Matrix centroids;                   // C x dim
    std::vector<std::size_t> assignments; // one cluster id per input row
    std::vector<double> sse_trace;      // within-cluster SSE after each Lloyd iteration
    std::size_t iterations = 0;
};

// Lloyd's algorithm with k-means++ seeding from the supplied Rng.
// Ties in nearest-centroid assignment go to the lowest cluster index.
// An empty cluster is re-seeded with the point farthest from its current
// centroid (lowest row index on ties). SSE is non-increasing across
// iterations; the loop stops when assignments stabilise or at max_iters.
KMeansResult kmeans(const Matrix& x, std::size_t c, Rng rng, std::size_t max_iters = 100);

// Moore-Penrose pseudo-inverse of a symmetric positive semi-definite
// matrix via Jacobi eigendecomposition. Eigenvalues at or below
// 1e-10 * lambda_max are treated as zero.
Matrix pinv_symmetric(const Matrix& a);

// Least-squares factor update: F = X G^T (G G^T)^+. Among exact
// minimisers of ||X - F G||_F this is the pseudo-inverse solution.
Matrix solve_f_step(const Matrix& x, const Matrix& g);

struct GumbelSample {
    std::vector<double> soft; // probability vector, sums to 1
    std::size_t hard_onehot;  // argmax index, lowest index on ties
};

// soft = softmax((logits + g) / tau) with g_j = -log(-log(u_j)). The hard
// flag marks the straight-through usage: callers take hard_onehot as the
// forward value while gradients flow through soft.
GumbelSample gumbel_softmax(std::span<const double> logits, double tau, Rng& rng, bool hard);

// Same computation with caller-supplied noise; used to pin the noise for
// gradient checks and by the sampling variant above.
GumbelSample gumbel_softmax_with_noise(std::span<const double> logits,
                                       std::span<const double> noise, double tau);

namespace detail {
// Double-precision core of pinv_symmetric (row-major n x n input);
// shared with the factorization engines, which iterate in double.
std::vector<double> pinv_symmetric_d(std::vector<double> a, std::size_t n);
} // namespace detail

using LossFn = std::function<double(const std::vector<Matrix>&)>;

// Central-difference gradient check. Perturbs each parameter element by
// +-eps in its float storage and divides by the actually realised spread
// of the two stored values, so storage quantisation does not pollute the
// estimate. Returns the max over elements of
//   |analytic - fd| / max(|analytic|, |fd|, 1e-6).
// Throws NumericError when the loss evaluates to a non-finite value.
double grad_check(const LossFn& loss, const std::vector<Matrix>& params,
                  const std::vector<Matrix>& analytic_grads, double eps);

} // namespace lexforge

#endif
