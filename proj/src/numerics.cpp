#include "lexforge/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lexforge/common.hpp"

namespace lexforge {

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw DataError("pearson_correlation: sequence lengths differ (" +
                        std::to_string(x.size()) + " vs " + std::to_string(y.size()) + ")");
    if (x.size() < 2) throw DataError("pearson_correlation: need at least two points");

    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;

    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw NumericError("pearson_correlation: undefined correlation (constant input)");
    const double r = sxy / (std::sqrt(sxx) * std::sqrt(syy));
    return std::clamp(r, -1.0, 1.0);
}

namespace {

// Centroids are kept in double during Lloyd iterations; they are rounded
// to float storage only in the returned Matrix.
struct Centroids {
    std::size_t c, dim;
    std::vector<double> data;
    double* row(std::size_t i) { return data.data() + i * dim; }
    const double* row(std::size_t i) const { return data.data() + i * dim; }
};

double sq_dist(std::span<const float> x, const double* c, std::size_t dim) {
    double acc = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
        const double d = static_cast<double>(x[j]) - c[j];
        acc += d * d;
    }
    return acc;
}

std::size_t nearest_centroid(std::span<const float> x, const Centroids& cs, double* best_out) {
    std::size_t best = 0;
    double best_d = sq_dist(x, cs.row(0), cs.dim);
    for (std::size_t k = 1; k < cs.c; ++k) {
        const double d = sq_dist(x, cs.row(k), cs.dim);
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    if (best_out) *best_out = best_d;
    return best;
}

void seed_kmeans_pp(const Matrix& x, Centroids& cs, Rng& rng) {
    const std::size_t n = x.rows();
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());

    std::size_t first = static_cast<std::size_t>(rng.below(n));
    for (std::size_t j = 0; j < cs.dim; ++j) cs.row(0)[j] = x(first, j);

    for (std::size_t k = 1; k < cs.c; ++k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = sq_dist(x.row(i), cs.row(k - 1), cs.dim);
            d2[i] = std::min(d2[i], d);
            total += d2[i];
        }
        std::size_t pick = 0;
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double cum = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                cum += d2[i];
                if (cum > target) {
                    pick = i;
                    break;
                }
            }
        } else {
            // All remaining mass is zero (duplicate points); fall back to uniform.
            pick = static_cast<std::size_t>(rng.below(n));
        }
        for (std::size_t j = 0; j < cs.dim; ++j) cs.row(k)[j] = x(pick, j);
    }
}

} // namespace

KMeansResult kmeans(const Matrix& x, std::size_t c, Rng rng, std::size_t max_iters) {
    if (c == 0) throw DataError("kmeans: cluster count must be positive");
    if (c > x.rows())
        throw DataError("kmeans: more clusters (" + std::to_string(c) + ") than rows (" +
                        std::to_string(x.rows()) + ")");
    if (max_iters == 0) throw DataError("kmeans: max_iters must be positive");
    require_finite(x, "kmeans input");

    const std::size_t n = x.rows();
    const std::size_t dim = x.cols();
    Centroids cs{c, dim, std::vector<double>(c * dim, 0.0)};
    seed_kmeans_pp(x, cs, rng);

    KMeansResult res;
    res.assignments.assign(n, 0);
    std::vector<double> dist(n, 0.0);
    double prev_sse = std::numeric_limits<double>::infinity();

    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        double sse = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double d = 0.0;
            const std::size_t k = nearest_centroid(x.row(i), cs, &d);
            if (k != res.assignments[i]) changed = true;
            res.assignments[i] = k;
            dist[i] = d;
            sse += d;
        }

        // Re-seed empty clusters from the farthest assigned point. Points
        // that are the sole member of their cluster stay put so a re-seed
        // cannot create a new empty cluster.
        std::vector<std::size_t> counts(c, 0);
        for (std::size_t i = 0; i < n; ++i) ++counts[res.assignments[i]];
        for (std::size_t k = 0; k < c; ++k) {
            if (counts[k] != 0) continue;
            std::size_t far = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[res.assignments[i]] <= 1) continue;
                if (far == n || dist[i] > dist[far]) far = i;
            }
            if (far == n) break; // every remaining cluster is a singleton
            --counts[res.assignments[far]];
            res.assignments[far] = k;
            counts[k] = 1;
            sse -= dist[far];
            dist[far] = 0.0;
            for (std::size_t j = 0; j < dim; ++j) cs.row(k)[j] = x(far, j);
            changed = true;
        }

        // Lloyd guarantees monotone SSE; the slack only absorbs rounding
        // in the double accumulation.
        if (sse > prev_sse + 1e-9 * (1.0 + prev_sse))
            throw NumericError("kmeans: SSE increased at iteration " + std::to_string(iter));
        prev_sse = sse;
        res.sse_trace.push_back(sse);
        res.iterations = iter + 1;

        // Update step: centroid = mean of assigned rows.
        std::vector<double> sums(c * dim, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t k = res.assignments[i];
            for (std::size_t j = 0; j < dim; ++j)
                sums[k * dim + j] += static_cast<double>(x(i, j));
        }
        for (std::size_t k = 0; k < c; ++k) {
            if (counts[k] == 0) continue;
            for (std::size_t j = 0; j < dim; ++j)
                cs.row(k)[j] = sums[k * dim + j] / static_cast<double>(counts[k]);
        }

        if (!changed && iter > 0) break;
    }

    res.centroids = Matrix(c, dim);
    for (std::size_t k = 0; k < c; ++k)
        for (std::size_t j = 0; j < dim; ++j)
            res.centroids(k, j) = static_cast<float>(cs.row(k)[j]);
    require_finite(res.centroids, "kmeans centroids");
    return res;
}

namespace {

// Cyclic Jacobi eigendecomposition for a symmetric matrix held in double.
// a is overwritten with the diagonalised matrix; v accumulates rotations.
void jacobi_eigen(std::vector<double>& a, std::vector<double>& v, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) v[i * n + j] = (i == j) ? 1.0 : 0.0;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
        if (off < 1e-30) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (std::abs(apq) < 1e-300) continue;
                const double app = a[p * n + p];
                const double aqq = a[q * n + q];
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0)
                                     ? 1.0 / (theta + std::sqrt(1.0 + theta * theta))
                                     : 1.0 / (theta - std::sqrt(1.0 + theta * theta));
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = t * cs;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k * n + p];
                    const double akq = a[k * n + q];
                    a[k * n + p] = cs * akp - sn * akq;
                    a[k * n + q] = sn * akp + cs * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p * n + k];
                    const double aqk = a[q * n + k];
                    a[p * n + k] = cs * apk - sn * aqk;
                    a[q * n + k] = sn * apk + cs * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v[k * n + p];
                    const double vkq = v[k * n + q];
                    v[k * n + p] = cs * vkp - sn * vkq;
                    v[k * n + q] = sn * vkp + cs * vkq;
                }
            }
        }
    }
}

} // namespace

namespace detail {

std::vector<double> pinv_symmetric_d(std::vector<double> a, std::size_t n) {
    // Jacobi needs an exactly symmetric input.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double s = 0.5 * (a[i * n + j] + a[j * n + i]);
            a[i * n + j] = a[j * n + i] = s;
        }
    std::vector<double> v(n * n);
    jacobi_eigen(a, v, n);

    std::vector<double> lambda(n);
    double lmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        lambda[i] = a[i * n + i];
        lmax = std::max(lmax, std::abs(lambda[i]));
    }
    const double cutoff = 1e-10 * lmax;
    std::vector<double> out(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                if (std::abs(lambda[k]) <= cutoff) continue;
                acc += v[i * n + k] * v[j * n + k] / lambda[k];
            }
            out[i * n + j] = acc;
        }
    }
    return out;
}

} // namespace detail

Matrix pinv_symmetric(const Matrix& m) {
    if (m.rows() != m.cols()) throw DataError("pinv_symmetric: matrix must be square");
    require_finite(m, "pinv_symmetric input");
    const std::size_t n = m.rows();
    std::vector<double> a(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a[i * n + j] = static_cast<double>(m(i, j));
    const std::vector<double> p = detail::pinv_symmetric_d(std::move(a), n);
    Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out(i, j) = static_cast<float>(p[i * n + j]);
    return out;
}

Matrix solve_f_step(const Matrix& x, const Matrix& g) {
    if (x.cols() != g.cols())
        throw DataError("solve_f_step: X has " + std::to_string(x.cols()) +
                        " cols but G has " + std::to_string(g.cols()));
    require_finite(x, "solve_f_step X");
    require_finite(g, "solve_f_step G");

    const Matrix gram = matmul_transposed_b(g, g); // G G^T, D' x D'
    const Matrix gram_pinv = pinv_symmetric(gram);
    const Matrix xgt = matmul_transposed_b(x, g); // X G^T
    Matrix f = matmul(xgt, gram_pinv);
    require_finite(f, "solve_f_step result");
    return f;
}

GumbelSample gumbel_softmax_with_noise(std::span<const double> logits,
                                       std::span<const double> noise, double tau) {
    if (logits.empty()) throw DataError("gumbel_softmax: empty logits");
    if (noise.size() != logits.size()) throw DataError("gumbel_softmax: noise length mismatch");
    if (!(tau > 0.0)) throw DataError("gumbel_softmax: tau must be positive");

    const std::size_t n = logits.size();
    std::vector<double> z(n);
    double zmax = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = (logits[i] + noise[i]) / tau;
        zmax = std::max(zmax, z[i]);
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = std::exp(z[i] - zmax);
        total += z[i];
    }
    GumbelSample s;
    s.soft.resize(n);
    s.hard_onehot = 0;
    for (std::size_t i = 0; i < n; ++i) {
        s.soft[i] = z[i] / total;
        if (s.soft[i] > s.soft[s.hard_onehot]) s.hard_onehot = i;
    }
    return s;
}

GumbelSample gumbel_softmax(std::span<const double> logits, double tau, Rng& rng, bool hard) {
    if (logits.empty()) throw DataError("gumbel_softmax: empty logits");
    if (!(tau > 0.0)) throw DataError("gumbel_softmax: tau must be positive");
    std::vector<double> noise(logits.size());
    for (double& g : noise) g = -std::log(-std::log(rng.uniform_open()));
    (void)hard; // the hard/soft choice is a caller contract; both fields are returned
    return gumbel_softmax_with_noise(logits, noise, tau);
}

double grad_check(const LossFn& loss, const std::vector<Matrix>& params,
                  const std::vector<Matrix>& analytic_grads, double eps) {
    if (!(eps > 0.0)) throw DataError("grad_check: eps must be positive");
    if (params.size() != analytic_grads.size())
        throw DataError("grad_check: gradient count mismatch");

    std::vector<Matrix> work = params;
    double max_err = 0.0;
    for (std::size_t p = 0; p < work.size(); ++p) {
        if (!params[p].same_shape(analytic_grads[p]))
            throw DataError("grad_check: gradient shape mismatch for parameter " +
                            std::to_string(p));
        for (std::size_t i = 0; i < work[p].size(); ++i) {
            const float orig = work[p].data()[i];
            const float plus = static_cast<float>(static_cast<double>(orig) + eps);
            const float minus = static_cast<float>(static_cast<double>(orig) - eps);

            work[p].data()[i] = plus;
            const double lp = loss(work);
            work[p].data()[i] = minus;
            const double lm = loss(work);
            work[p].data()[i] = orig;
            if (!std::isfinite(lp) || !std::isfinite(lm))
                throw NumericError("grad_check: non-finite loss");

            // Divide by the spread actually realised in float storage.
            const double spread = static_cast<double>(plus) - static_cast<double>(minus);
            const double fd = (lp - lm) / spread;
            const double an = static_cast<double>(analytic_grads[p].data()[i]);
            const double denom = std::max({std::abs(an), std::abs(fd), 1e-6});
            max_err = std::max(max_err, std::abs(an - fd) / denom);
        }
    }
    return max_err;
}

} // namespace lexforge
