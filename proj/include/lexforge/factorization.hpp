#ifndef LEXFORGE_FACTORIZATION_HPP
#define LEXFORGE_FACTORIZATION_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lexforge/matrix.hpp"
#include "lexforge/rng.hpp"
#include "lexforge/vocab.hpp"

namespace lexforge {

// Linear interpolation from start to end over the run; constant when
// start == end. Temperatures must stay positive.
struct TauSchedule {
    double start = 1.0;
    double end = 1.0;

    double at(std::size_t step, std::size_t total_steps) const {
        if (total_steps <= 1 || start == end) return start;
        const double t = static_cast<double>(step) / static_cast<double>(total_steps - 1);
        return start + (end - start) * t;
    }
};

struct ModelMeta {
    std::size_t d_prime = 0;
    std::size_t clusters = 0;
    std::string method;          // "semi-nmf" | "kmeans" | "neural" | "init" | "fit"
    std::size_t steps = 0;       // alternation pairs for semi-nmf, update steps otherwise
    std::uint64_t seed = 0;
    TauSchedule tau;
    std::string vocab_hash;      // hex FNV-1a of the vocabulary file, empty if none
};

// Low-rank factorization of a token embedding matrix: per-token factors
// F (|V| x D'), per-cluster up-projections G^c (D' x D), a hard cluster
// assignment per token, and optionally the assignment logits Z it came
// from. Reconstruction of token v is F_v * G^{assignment(v)}.
struct FactorizationModel {
    Matrix f;
    std::vector<Matrix> g;
    std::vector<std::size_t> assignments;
    std::optional<Matrix> z;
    ModelMeta meta;

    std::size_t vocab_rows() const { return f.rows(); }
    std::size_t d_prime() const { return f.cols(); }
    std::size_t clusters() const { return g.size(); }
    std::size_t dim() const { return g.empty() ? 0 : g[0].cols(); }

    // Shape and invariant checks (assignment range, argmax-of-Z
    // consistency, non-negative G for Semi-NMF-trained models are the
    // callers' contracts; this validates the structural part).
    void validate() const;
};

struct SemiNmfResult {
    Matrix f;
    Matrix g;                      // element-wise non-negative
    std::vector<double> error_trace; // ||X - F G||_F after each alternation
};

// Alternating Semi-NMF: F is the least-squares update F = X G^T (G G^T)^+,
// G follows the multiplicative rule
//   G_kj *= sqrt( ((F^T X)+_kj + [(F^T F)- G]_kj)
//               / ((F^T X)-_kj + [(F^T F)+ G]_kj + eps) )
// with A+ = (|A|+A)/2 and A- = (|A|-A)/2, which keeps G >= 0 and the
// Frobenius error non-increasing. G starts from |N(0, 0.02)| and F from
// the least-squares step; the loop runs in double precision and rounds
// to storage on return. One step = one F update followed by one G update.
SemiNmfResult semi_nmf(const Matrix& x, std::size_t d_prime, std::size_t steps, Rng rng);

struct FactorizeOptions {
    std::size_t d_prime = 100;
    std::size_t clusters = 10;
    std::size_t steps = 3000;
    double lr = 1e-2;        // neural method only
    TauSchedule tau;         // neural method only
    std::size_t kmeans_iters = 100;
};

// Pipeline method: KMeans on the rows of X, then an independent Semi-NMF
// per cluster. Clusters that end up with fewer than d_prime rows are
// merged into the cluster with the nearest centroid and the labels are
// re-compacted, so every fitted cluster supports a rank-d_prime factor.
// With clusters == 1 this is exactly semi_nmf on the same rng.
FactorizationModel factorize_kmeans(const Matrix& x, std::size_t clusters,
                                    std::size_t d_prime, std::size_t steps, Rng rng,
                                    std::size_t kmeans_iters = 100);

// Joint method: gradient descent on L = ||X - sum_c diag(i_c) F G^c||_F
// where each row's i is a straight-through Gumbel-Softmax sample of its
// Z logits: the forward reconstruction uses the hard one-hot sample, the
// Z gradient flows through the soft distribution. Returns the model
// (assignments = argmax Z) and the per-step forward loss trace.
// Throws NumericError naming the step if the loss turns non-finite.
std::pair<FactorizationModel, std::vector<double>>
factorize_neural(const Matrix& x, std::size_t clusters, std::size_t d_prime,
                 const FactorizeOptions& opts, Rng rng);

Matrix reconstruct(const FactorizationModel& model);
double reconstruction_error(const FactorizationModel& model, const Matrix& x);

enum class BudgetMode { EL, MF };

struct ParamBudget {
    std::size_t trainable_new_params = 0;
    std::vector<std::pair<std::string, std::size_t>> breakdown;
};

// New-parameter accounting per added language: EL trains a full
// |V'| x D matrix; MF trains |V'| x D' factors plus |V'| x C assignment
// logits (shared up-projections are pretrained once and excluded).
ParamBudget param_budget(std::size_t v_new, std::size_t d, std::size_t d_prime,
                         std::size_t c, BudgetMode mode);

// Per-cluster counts of member tokens by majority script (specials
// excluded; digits and punctuation count as "Common").
std::vector<std::map<std::string, std::size_t>>
cluster_script_report(const FactorizationModel& model, const Vocabulary& vocab);

// Container format: "MFAC" magic, u16 version, u32-length-prefixed JSON
// metadata, then little-endian f32 blobs for F and each G^c, the
// optional Z blob, and u16 assignments. Byte-exact round trip.
std::string serialize_model(const FactorizationModel& model);
FactorizationModel deserialize_model(std::string_view bytes);
void save_model(const FactorizationModel& model, const std::string& path);
FactorizationModel load_model(const std::string& path);

namespace neural {

// Loss and gradients of L = ||X - sum_c diag(i_c) F G^c||_F shared by
// factorize_neural, fit_target and the gradient-check tests. noise is a
// rows x clusters matrix of Gumbel draws. With hard_forward the i are
// one-hot argmax samples (straight-through); without it the relaxed soft
// weights are used so the whole map is differentiable.
struct Gradients {
    Matrix f;
    std::vector<Matrix> g;
    Matrix z;
};

double loss_and_grads(const Matrix& f, const std::vector<Matrix>& g, const Matrix& z,
                      const Matrix& x, const Matrix& noise, double tau, bool hard_forward,
                      Gradients* out);

// The per-row hard one-hot choices for a given noise draw; exposed so
// tests can assert the forward is exactly one-hot.
std::vector<std::size_t> hard_choices(const Matrix& z, const Matrix& noise, double tau);

} // namespace neural

} // namespace lexforge

#endif
