#ifndef LEXFORGE_ADAPTATION_HPP
#define LEXFORGE_ADAPTATION_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lexforge/factorization.hpp"
#include "lexforge/matrix.hpp"
#include "lexforge/rng.hpp"
#include "lexforge/vocab.hpp"

namespace lexforge {

// The four new-language initialization strategies: full-dimension
// embedding learning (EL) or low-dimensional factors over frozen
// up-projections (MF), each with random or lexical-overlap-seeded rows.
enum class InitStrategy { ElRand, ElLex, MfRand, MfLex };

const char* strategy_name(InitStrategy s);
InitStrategy parse_strategy(std::string_view name);

struct InitSpec {
    InitStrategy strategy = InitStrategy::ElRand;
    double rand_stddev = 0.02;
    std::uint64_t seed = 0;
};

// Builds a |new_vocab| x D embedding matrix. Special-token rows are
// always copied from the base matrix (it is an error if a special is
// missing there); ElLex additionally copies every lexically overlapping
// token's row. Remaining rows draw N(0, stddev^2) from a per-row
// substream of the seed, so a row's random values do not depend on which
// other rows were copied.
Matrix init_embeddings_el(const Vocabulary& new_vocab, const Vocabulary& base_vocab,
                          const Matrix& base_x, const InitSpec& spec);

// Builds a new-language factor model over the base model's frozen
// up-projections. F' rows for specials (and, under MfLex, overlapping
// tokens) are copied from the base F together with assignment logits
// whose argmax is the base token's cluster (the copied coordinate sits
// 3 * stddev above the row's other logits); all other rows are random.
FactorizationModel init_embeddings_mf(const Vocabulary& new_vocab,
                                      const Vocabulary& base_vocab,
                                      const FactorizationModel& base_model,
                                      const InitSpec& spec);

struct FitOptions {
    std::size_t steps = 100;
    double lr = 1e-2;
    TauSchedule tau;
};

// Regression harness: gradient descent on ||X_target - reconstruction||_F
// over F' and Z' only; the up-projections are never touched. The forward
// uses straight-through Gumbel-Softmax assignments like factorize_neural.
// loss_trace has steps+1 entries: entry 0 is the deterministic
// reconstruction error of the initial model (argmax assignments, no
// sampling), entry t is the sampled forward loss at step t.
// Throws NumericError naming the step if the loss turns non-finite.
std::pair<FactorizationModel, std::vector<double>>
fit_target(const FactorizationModel& model, const Matrix& x_target,
           const FitOptions& opts, Rng rng);

// Exact (erf-based) GeLU: x * Phi(x).
double gelu(double x);
double gelu_derivative(double x);

// Bottleneck adapter: down-projection (h x d), GeLU, up-projection
// (d x h), residual added back. Vectors are row vectors, applied as
// v * M.
struct AdapterLayer {
    Matrix down;
    Matrix up;
    std::size_t layer_index = 0;
};

std::vector<double> adapter_forward(const AdapterLayer& layer, std::span<const double> h,
                                    std::span<const double> r);

// Checks the analytic gradients of ||adapter_forward(h, r)||^2 with
// respect to down, up, and h against central finite differences;
// returns the max relative error.
double adapter_backward_check(const AdapterLayer& layer, std::span<const double> h,
                              std::span<const double> r, double eps = 1e-3);

enum class StackVariant { MadX, MadX20 };

const char* variant_name(StackVariant v);
StackVariant parse_variant(std::string_view name);

struct StackConfig {
    std::size_t num_layers = 0;
    std::vector<std::size_t> adapter_layers; // 1-indexed
    StackVariant variant = StackVariant::MadX;

    std::string to_json() const;
    static StackConfig from_json(std::string_view text);

    bool operator==(const StackConfig&) const = default;
};

// MAD-X places an adapter in every transformer layer; MAD-X 2.0 drops
// the one in the last layer. With a single layer the 2.0 stack is empty.
StackConfig madx_stack_config(std::size_t num_layers, StackVariant variant);

} // namespace lexforge

#endif
