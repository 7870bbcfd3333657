#include "lexforge/factorization.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "lexforge/common.hpp"
#include "lexforge/numerics.hpp"
#include "lexforge/unicode.hpp"

namespace lexforge {

void FactorizationModel::validate() const {
    if (g.empty()) throw DataError("model: no up-projection matrices");
    for (const auto& gc : g)
        if (gc.rows() != g[0].rows() || gc.cols() != g[0].cols())
            throw DataError("model: up-projection shapes differ");
    if (g[0].rows() != f.cols()) throw DataError("model: F/G inner dimensions differ");
    if (assignments.size() != f.rows())
        throw DataError("model: assignment count != token count");
    for (std::size_t a : assignments)
        if (a >= g.size()) throw DataError("model: assignment out of cluster range");
    if (z) {
        if (z->rows() != f.rows() || z->cols() != g.size())
            throw DataError("model: Z shape mismatch");
    }
}

namespace {

// Double-precision working matrix for the iterative engines. Results are
// rounded to float storage only at the API boundary.
struct Md {
    std::size_t rows = 0, cols = 0;
    std::vector<double> v;

    Md() = default;
    Md(std::size_t r, std::size_t c) : rows(r), cols(c), v(r * c, 0.0) {}
    explicit Md(const Matrix& m) : rows(m.rows()), cols(m.cols()), v(m.size()) {
        for (std::size_t i = 0; i < m.size(); ++i) v[i] = static_cast<double>(m.data()[i]);
    }
    double& at(std::size_t r, std::size_t c) { return v[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return v[r * cols + c]; }

    Matrix to_matrix() const {
        Matrix m(rows, cols);
        for (std::size_t i = 0; i < v.size(); ++i) m.data()[i] = static_cast<float>(v[i]);
        return m;
    }
};

Md matmul_d(const Md& a, const Md& b) {
    Md c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < b.cols; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols; ++k) acc += a.at(i, k) * b.at(k, j);
            c.at(i, j) = acc;
        }
    return c;
}

Md matmul_at_b_d(const Md& a, const Md& b) { // A^T B
    Md c(a.cols, b.cols);
    for (std::size_t i = 0; i < a.cols; ++i)
        for (std::size_t j = 0; j < b.cols; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.rows; ++k) acc += a.at(k, i) * b.at(k, j);
            c.at(i, j) = acc;
        }
    return c;
}

Md matmul_a_bt_d(const Md& a, const Md& b) { // A B^T
    Md c(a.rows, b.rows);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < b.rows; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols; ++k) acc += a.at(i, k) * b.at(j, k);
            c.at(i, j) = acc;
        }
    return c;
}

double frob_dist_d(const Md& a, const Md& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i) {
        const double d = a.v[i] - b.v[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

// F = X G^T (G G^T)^+ in double.
Md lsq_f_step_d(const Md& x, const Md& g) {
    const std::size_t k = g.rows;
    Md gram(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            double acc = 0.0;
            for (std::size_t c = 0; c < g.cols; ++c) acc += g.at(i, c) * g.at(j, c);
            gram.at(i, j) = acc;
        }
    Md gram_pinv(k, k);
    gram_pinv.v = detail::pinv_symmetric_d(std::move(gram.v), k);
    return matmul_d(matmul_a_bt_d(x, g), gram_pinv);
}

} // namespace

SemiNmfResult semi_nmf(const Matrix& x, std::size_t d_prime, std::size_t steps, Rng rng) {
    if (d_prime == 0 || d_prime > std::min(x.rows(), x.cols()))
        throw DataError("semi_nmf: d_prime must be in [1, min(rows, cols)]");
    if (steps == 0) throw DataError("semi_nmf: steps must be positive");
    require_finite(x, "semi_nmf input");

    const std::size_t d = x.cols();
    const Md xd(x);

    Md g(d_prime, d);
    {
        Rng init_rng = rng.split("semi-nmf-init");
        for (double& v : g.v) v = std::abs(init_rng.normal(0.0, 0.02));
    }
    // F starts from the least-squares step; step 0 recomputes it against
    // the same G, so the loop below covers initialization too.
    Md f;

    constexpr double kEps = 1e-9;
    SemiNmfResult result;
    result.error_trace.reserve(steps);

    for (std::size_t step = 0; step < steps; ++step) {
        f = lsq_f_step_d(xd, g);

        const Md ftx = matmul_at_b_d(f, xd); // D' x D
        const Md ftf = matmul_at_b_d(f, f);  // D' x D'
        const Md ftf_g = [&] {
            // Split F^T F into positive and negative parts once; both
            // products against G are needed below.
            Md pos(d_prime, d_prime), neg(d_prime, d_prime);
            for (std::size_t i = 0; i < ftf.v.size(); ++i) {
                const double v = ftf.v[i];
                pos.v[i] = 0.5 * (std::abs(v) + v);
                neg.v[i] = 0.5 * (std::abs(v) - v);
            }
            Md stacked(2 * d_prime, d);
            const Md pg = matmul_d(pos, g);
            const Md ng = matmul_d(neg, g);
            std::copy(pg.v.begin(), pg.v.end(), stacked.v.begin());
            std::copy(ng.v.begin(), ng.v.end(), stacked.v.begin() + pg.v.size());
            return stacked;
        }();

        for (std::size_t i = 0; i < d_prime; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                const double a = ftx.at(i, j);
                const double a_pos = 0.5 * (std::abs(a) + a);
                const double a_neg = 0.5 * (std::abs(a) - a);
                const double pg = ftf_g.at(i, j);            // (F^T F)+ G
                const double ng = ftf_g.at(i + d_prime, j);  // (F^T F)- G
                const double num = a_pos + ng;
                const double den = a_neg + pg + kEps;
                g.at(i, j) *= std::sqrt(num / den);
            }
        }

        result.error_trace.push_back(frob_dist_d(xd, matmul_d(f, g)));
        if (!std::isfinite(result.error_trace.back()))
            throw NumericError("semi_nmf: non-finite error at step " + std::to_string(step));
    }

    result.f = f.to_matrix();
    result.g = g.to_matrix();
    require_finite(result.f, "semi_nmf F");
    require_finite(result.g, "semi_nmf G");
    return result;
}

FactorizationModel factorize_kmeans(const Matrix& x, std::size_t clusters,
                                    std::size_t d_prime, std::size_t steps, Rng rng,
                                    std::size_t kmeans_iters) {
    if (clusters == 0) throw DataError("factorize_kmeans: cluster count must be positive");

    FactorizationModel model;
    model.meta.method = "kmeans";
    model.meta.d_prime = d_prime;
    model.meta.steps = steps;

    if (clusters == 1) {
        auto fit = semi_nmf(x, d_prime, steps, rng);
        model.f = std::move(fit.f);
        model.g.push_back(std::move(fit.g));
        model.assignments.assign(x.rows(), 0);
        model.meta.clusters = 1;
        model.validate();
        return model;
    }

    auto km = kmeans(x, clusters, rng.split("kmeans"), kmeans_iters);
    std::vector<std::size_t> assign = km.assignments;

    // Merge clusters that cannot support a rank-d_prime factor into the
    // nearest other cluster (by centroid distance), smallest first.
    std::vector<bool> alive(clusters, true);
    for (;;) {
        std::vector<std::size_t> sizes(clusters, 0);
        for (std::size_t a : assign) ++sizes[a];
        std::size_t victim = clusters;
        for (std::size_t c = 0; c < clusters; ++c) {
            if (!alive[c] || sizes[c] >= d_prime) continue;
            if (victim == clusters || sizes[c] < sizes[victim]) victim = c;
        }
        if (victim == clusters) break;
        std::size_t target = clusters;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < clusters; ++c) {
            if (c == victim || !alive[c]) continue;
            const double dist =
                squared_distance(km.centroids.row(victim), km.centroids.row(c));
            if (dist < best) {
                best = dist;
                target = c;
            }
        }
        if (target == clusters)
            throw DataError("factorize_kmeans: not enough rows for a rank-" +
                            std::to_string(d_prime) + " factorization");
        for (std::size_t& a : assign)
            if (a == victim) a = target;
        alive[victim] = false;
    }

    // Compact labels of surviving clusters.
    std::vector<std::size_t> relabel(clusters, 0);
    std::size_t effective = 0;
    for (std::size_t c = 0; c < clusters; ++c)
        if (alive[c]) relabel[c] = effective++;
    for (std::size_t& a : assign) a = relabel[a];

    model.f = Matrix(x.rows(), d_prime);
    model.assignments = assign;
    model.meta.clusters = effective;
    model.g.resize(effective);

    for (std::size_t c = 0; c < effective; ++c) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < assign.size(); ++i)
            if (assign[i] == c) members.push_back(i);
        Matrix xc(members.size(), x.cols());
        for (std::size_t i = 0; i < members.size(); ++i)
            for (std::size_t j = 0; j < x.cols(); ++j) xc(i, j) = x(members[i], j);

        auto fit = semi_nmf(xc, d_prime, steps, rng.split("cluster", c));
        for (std::size_t i = 0; i < members.size(); ++i)
            for (std::size_t j = 0; j < d_prime; ++j) model.f(members[i], j) = fit.f(i, j);
        model.g[c] = std::move(fit.g);
    }

    model.validate();
    return model;
}

namespace neural {

std::vector<std::size_t> hard_choices(const Matrix& z, const Matrix& noise, double tau) {
    if (!z.same_shape(noise)) throw DataError("hard_choices: noise shape mismatch");
    std::vector<std::size_t> out(z.rows(), 0);
    for (std::size_t v = 0; v < z.rows(); ++v) {
        std::size_t best = 0;
        double best_val = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < z.cols(); ++c) {
            const double val = (static_cast<double>(z(v, c)) +
                                static_cast<double>(noise(v, c))) / tau;
            if (val > best_val) {
                best_val = val;
                best = c;
            }
        }
        out[v] = best;
    }
    return out;
}

double loss_and_grads(const Matrix& f, const std::vector<Matrix>& g, const Matrix& z,
                      const Matrix& x, const Matrix& noise, double tau, bool hard_forward,
                      Gradients* out) {
    const std::size_t n = f.rows();
    const std::size_t k = f.cols();
    const std::size_t cc = g.size();
    const std::size_t d = x.cols();
    if (x.rows() != n) throw DataError("loss_and_grads: X rows != F rows");
    if (z.rows() != n || z.cols() != cc) throw DataError("loss_and_grads: Z shape mismatch");
    if (!z.same_shape(noise)) throw DataError("loss_and_grads: noise shape mismatch");
    if (!(tau > 0.0)) throw DataError("loss_and_grads: tau must be positive");

    // Per-row soft weights and hard picks.
    std::vector<double> soft(n * cc);
    std::vector<std::size_t> hard(n);
    for (std::size_t v = 0; v < n; ++v) {
        std::vector<double> logits(cc), nz(cc);
        for (std::size_t c = 0; c < cc; ++c) {
            logits[c] = static_cast<double>(z(v, c));
            nz[c] = static_cast<double>(noise(v, c));
        }
        const GumbelSample s = gumbel_softmax_with_noise(logits, nz, tau);
        for (std::size_t c = 0; c < cc; ++c) soft[v * cc + c] = s.soft[c];
        hard[v] = s.hard_onehot;
    }

    // Row reconstructions through every up-projection; needed for the Z
    // gradient in both modes.
    std::vector<double> proj(n * cc * d);
    for (std::size_t v = 0; v < n; ++v)
        for (std::size_t c = 0; c < cc; ++c)
            for (std::size_t j = 0; j < d; ++j) {
                double acc = 0.0;
                for (std::size_t t = 0; t < k; ++t)
                    acc += static_cast<double>(f(v, t)) * static_cast<double>(g[c](t, j));
                proj[(v * cc + c) * d + j] = acc;
            }

    std::vector<double> xhat(n * d, 0.0);
    for (std::size_t v = 0; v < n; ++v) {
        for (std::size_t j = 0; j < d; ++j) {
            if (hard_forward) {
                xhat[v * d + j] = proj[(v * cc + hard[v]) * d + j];
            } else {
                double acc = 0.0;
                for (std::size_t c = 0; c < cc; ++c)
                    acc += soft[v * cc + c] * proj[(v * cc + c) * d + j];
                xhat[v * d + j] = acc;
            }
        }
    }

    double sq = 0.0;
    for (std::size_t v = 0; v < n; ++v)
        for (std::size_t j = 0; j < d; ++j) {
            const double r = xhat[v * d + j] - static_cast<double>(x(v, j));
            sq += r * r;
        }
    const double loss = std::sqrt(sq);
    if (!out) return loss;

    out->f = Matrix(n, k);
    out->z = Matrix(n, cc);
    out->g.assign(cc, Matrix(k, d));
    if (loss == 0.0) return loss; // gradient of the norm vanishes only here

    std::vector<std::vector<double>> gd(cc, std::vector<double>(k * d, 0.0));
    for (std::size_t v = 0; v < n; ++v) {
        std::vector<double> w(d); // dL/dxhat_v
        for (std::size_t j = 0; j < d; ++j)
            w[j] = (xhat[v * d + j] - static_cast<double>(x(v, j))) / loss;

        // s_c = w . (F_v G^c): gradient wrt the (relaxed) assignment weight.
        std::vector<double> s(cc, 0.0);
        for (std::size_t c = 0; c < cc; ++c)
            for (std::size_t j = 0; j < d; ++j) s[c] += w[j] * proj[(v * cc + c) * d + j];

        for (std::size_t t = 0; t < k; ++t) {
            double acc = 0.0;
            if (hard_forward) {
                const Matrix& gc = g[hard[v]];
                for (std::size_t j = 0; j < d; ++j)
                    acc += w[j] * static_cast<double>(gc(t, j));
            } else {
                for (std::size_t c = 0; c < cc; ++c) {
                    const double sc = soft[v * cc + c];
                    if (sc == 0.0) continue;
                    double inner = 0.0;
                    for (std::size_t j = 0; j < d; ++j)
                        inner += w[j] * static_cast<double>(g[c](t, j));
                    acc += sc * inner;
                }
            }
            out->f(v, t) = static_cast<float>(acc);
        }

        if (hard_forward) {
            auto& gacc = gd[hard[v]];
            for (std::size_t t = 0; t < k; ++t) {
                const double fv = static_cast<double>(f(v, t));
                for (std::size_t j = 0; j < d; ++j) gacc[t * d + j] += fv * w[j];
            }
        } else {
            for (std::size_t c = 0; c < cc; ++c) {
                const double sc = soft[v * cc + c];
                if (sc == 0.0) continue;
                auto& gacc = gd[c];
                for (std::size_t t = 0; t < k; ++t) {
                    const double fv = sc * static_cast<double>(f(v, t));
                    for (std::size_t j = 0; j < d; ++j) gacc[t * d + j] += fv * w[j];
                }
            }
        }

        // Softmax Jacobian: dL/dz_j = (soft_j / tau) (s_j - sum_c s_c soft_c).
        // With the straight-through forward the same expression applies, with
        // s taken at the hard reconstruction's residual.
        double sbar = 0.0;
        for (std::size_t c = 0; c < cc; ++c) sbar += s[c] * soft[v * cc + c];
        for (std::size_t c = 0; c < cc; ++c)
            out->z(v, c) = static_cast<float>(soft[v * cc + c] / tau * (s[c] - sbar));
    }

    for (std::size_t c = 0; c < cc; ++c)
        for (std::size_t t = 0; t < k; ++t)
            for (std::size_t j = 0; j < d; ++j)
                out->g[c](t, j) = static_cast<float>(gd[c][t * d + j]);
    return loss;
}

} // namespace neural

namespace {

Matrix draw_gumbel_noise(std::size_t rows, std::size_t cols, Rng& rng) {
    Matrix noise(rows, cols);
    for (std::size_t i = 0; i < noise.size(); ++i)
        noise.data()[i] = static_cast<float>(-std::log(-std::log(rng.uniform_open())));
    return noise;
}

std::vector<std::size_t> argmax_rows(const Matrix& z) {
    std::vector<std::size_t> out(z.rows(), 0);
    for (std::size_t v = 0; v < z.rows(); ++v) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < z.cols(); ++c)
            if (z(v, c) > z(v, best)) best = c;
        out[v] = best;
    }
    return out;
}

} // namespace

std::pair<FactorizationModel, std::vector<double>>
factorize_neural(const Matrix& x, std::size_t clusters, std::size_t d_prime,
                 const FactorizeOptions& opts, Rng rng) {
    if (clusters == 0) throw DataError("factorize_neural: cluster count must be positive");
    if (d_prime == 0) throw DataError("factorize_neural: d_prime must be positive");
    if (!(opts.lr > 0.0)) throw DataError("factorize_neural: lr must be positive");
    if (!(opts.tau.start > 0.0) || !(opts.tau.end > 0.0))
        throw DataError("factorize_neural: tau must stay positive");
    require_finite(x, "factorize_neural input");

    const std::size_t n = x.rows();
    Matrix f(n, d_prime);
    {
        Rng r = rng.split("init-f");
        for (auto& v : f.data()) v = static_cast<float>(r.normal(0.0, 0.02));
    }
    std::vector<Matrix> g(clusters);
    for (std::size_t c = 0; c < clusters; ++c) {
        Rng r = rng.split("init-g", c);
        g[c] = Matrix(d_prime, x.cols());
        for (auto& v : g[c].data()) v = static_cast<float>(r.normal(0.0, 0.02));
    }
    Matrix z(n, clusters);
    {
        Rng r = rng.split("init-z");
        for (auto& v : z.data()) v = static_cast<float>(r.normal(0.0, 0.02));
    }

    Rng noise_rng = rng.split("gumbel");
    std::vector<double> trace;
    trace.reserve(opts.steps);
    neural::Gradients grads;

    for (std::size_t step = 0; step < opts.steps; ++step) {
        const double tau = opts.tau.at(step, opts.steps);
        const Matrix noise = draw_gumbel_noise(n, clusters, noise_rng);
        const double loss = neural::loss_and_grads(f, g, z, x, noise, tau, true, &grads);
        if (!std::isfinite(loss))
            throw NumericError("factorize_neural: non-finite loss at step " +
                               std::to_string(step));
        trace.push_back(loss);

        const float lr = static_cast<float>(opts.lr);
        for (std::size_t i = 0; i < f.size(); ++i) f.data()[i] -= lr * grads.f.data()[i];
        for (std::size_t c = 0; c < clusters; ++c)
            for (std::size_t i = 0; i < g[c].size(); ++i)
                g[c].data()[i] -= lr * grads.g[c].data()[i];
        for (std::size_t i = 0; i < z.size(); ++i) z.data()[i] -= lr * grads.z.data()[i];
    }

    FactorizationModel model;
    model.f = std::move(f);
    model.g = std::move(g);
    model.assignments = argmax_rows(z);
    model.z = std::move(z);
    model.meta.method = "neural";
    model.meta.d_prime = d_prime;
    model.meta.clusters = clusters;
    model.meta.steps = opts.steps;
    model.meta.tau = opts.tau;
    model.validate();
    require_finite(model.f, "factorize_neural F");
    return {std::move(model), std::move(trace)};
}

Matrix reconstruct(const FactorizationModel& model) {
    model.validate();
    const std::size_t n = model.f.rows();
    const std::size_t k = model.f.cols();
    const std::size_t d = model.dim();
    Matrix out(n, d);
    for (std::size_t v = 0; v < n; ++v) {
        const Matrix& gc = model.g[model.assignments[v]];
        for (std::size_t j = 0; j < d; ++j) {
            double acc = 0.0;
            for (std::size_t t = 0; t < k; ++t)
                acc += static_cast<double>(model.f(v, t)) * static_cast<double>(gc(t, j));
            out(v, j) = static_cast<float>(acc);
        }
    }
    return out;
}

double reconstruction_error(const FactorizationModel& model, const Matrix& x) {
    const Matrix xhat = reconstruct(model);
    if (!xhat.same_shape(x)) throw DataError("reconstruction_error: shape mismatch");
    return frobenius_distance(x, xhat);
}

ParamBudget param_budget(std::size_t v_new, std::size_t d, std::size_t d_prime,
                         std::size_t c, BudgetMode mode) {
    ParamBudget b;
    if (mode == BudgetMode::EL) {
        b.breakdown.emplace_back("embedding_matrix", v_new * d);
    } else {
        b.breakdown.emplace_back("token_factors", v_new * d_prime);
        b.breakdown.emplace_back("assignment_logits", v_new * c);
    }
    for (const auto& [name, count] : b.breakdown) b.trainable_new_params += count;
    return b;
}

std::vector<std::map<std::string, std::size_t>>
cluster_script_report(const FactorizationModel& model, const Vocabulary& vocab) {
    if (model.f.rows() != vocab.size())
        throw DataError("cluster_script_report: model rows != vocabulary size");
    std::vector<std::map<std::string, std::size_t>> report(model.clusters());
    for (std::size_t v = vocab.num_specials(); v < vocab.size(); ++v) {
        const auto script = uni::majority_script(surface_form(vocab.token(v)));
        ++report[model.assignments[v]][uni::script_name(script)];
    }
    return report;
}

// ---------------------------------------------------------------------
// MFAC container
// ---------------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'M', 'F', 'A', 'C'};
constexpr std::uint16_t kFormatVersion = 1;

void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f32_blob(std::string& out, const Matrix& m) {
    for (float f : m.data()) {
        const auto bits = std::bit_cast<std::uint32_t>(f);
        put_u32(out, bits);
    }
}

struct Reader {
    std::string_view s;
    std::size_t pos = 0;

    void need(std::size_t n) const {
        if (pos + n > s.size()) throw DataError("model file truncated");
    }
    std::uint16_t u16() {
        need(2);
        const auto a = static_cast<std::uint8_t>(s[pos]);
        const auto b = static_cast<std::uint8_t>(s[pos + 1]);
        pos += 2;
        return static_cast<std::uint16_t>(a | (b << 8));
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(s[pos + i])) << (8 * i);
        pos += 4;
        return v;
    }
    Matrix f32_blob(std::size_t rows, std::size_t cols) {
        Matrix m(rows, cols);
        for (std::size_t i = 0; i < m.size(); ++i)
            m.data()[i] = std::bit_cast<float>(u32());
        return m;
    }
};

} // namespace

std::string serialize_model(const FactorizationModel& model) {
    model.validate();
    nlohmann::json meta;
    meta["d_prime"] = model.f.cols();
    meta["clusters"] = model.g.size();
    meta["dim"] = model.dim();
    meta["rows"] = model.f.rows();
    meta["method"] = model.meta.method;
    meta["steps"] = model.meta.steps;
    meta["seed"] = model.meta.seed;
    meta["tau_start"] = model.meta.tau.start;
    meta["tau_end"] = model.meta.tau.end;
    meta["vocab_hash"] = model.meta.vocab_hash;
    meta["has_z"] = model.z.has_value();
    const std::string header = meta.dump();

    std::string out;
    out.append(kMagic, 4);
    put_u16(out, kFormatVersion);
    put_u32(out, static_cast<std::uint32_t>(header.size()));
    out += header;
    put_f32_blob(out, model.f);
    for (const auto& gc : model.g) put_f32_blob(out, gc);
    if (model.z) put_f32_blob(out, *model.z);
    for (std::size_t a : model.assignments) {
        if (a > 0xFFFF) throw DataError("serialize_model: assignment exceeds u16 range");
        put_u16(out, static_cast<std::uint16_t>(a));
    }
    return out;
}

FactorizationModel deserialize_model(std::string_view bytes) {
    Reader r{bytes};
    r.need(4);
    if (std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw DataError("model file: bad magic (expected MFAC)");
    r.pos = 4;
    const std::uint16_t version = r.u16();
    if (version != kFormatVersion)
        throw DataError("model file: unsupported format version " + std::to_string(version));
    const std::uint32_t header_len = r.u32();
    r.need(header_len);
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(bytes.substr(r.pos, header_len));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("model file: bad metadata header: ") + e.what());
    }
    r.pos += header_len;

    FactorizationModel model;
    const auto rows = meta.at("rows").get<std::size_t>();
    const auto d_prime = meta.at("d_prime").get<std::size_t>();
    const auto clusters = meta.at("clusters").get<std::size_t>();
    const auto dim = meta.at("dim").get<std::size_t>();
    model.meta.d_prime = d_prime;
    model.meta.clusters = clusters;
    model.meta.method = meta.at("method").get<std::string>();
    model.meta.steps = meta.at("steps").get<std::size_t>();
    model.meta.seed = meta.at("seed").get<std::uint64_t>();
    model.meta.tau.start = meta.at("tau_start").get<double>();
    model.meta.tau.end = meta.at("tau_end").get<double>();
    model.meta.vocab_hash = meta.at("vocab_hash").get<std::string>();

    model.f = r.f32_blob(rows, d_prime);
    model.g.reserve(clusters);
    for (std::size_t c = 0; c < clusters; ++c) model.g.push_back(r.f32_blob(d_prime, dim));
    if (meta.at("has_z").get<bool>()) model.z = r.f32_blob(rows, clusters);
    model.assignments.resize(rows);
    for (std::size_t i = 0; i < rows; ++i) model.assignments[i] = r.u16();
    if (r.pos != bytes.size()) throw DataError("model file: trailing bytes");
    model.validate();
    return model;
}

void save_model(const FactorizationModel& model, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open model file for writing: " + path);
    const std::string bytes = serialize_model(model);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw DataError("failed writing model file: " + path);
}

FactorizationModel load_model(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open model file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return deserialize_model(ss.str());
}

} // namespace lexforge
