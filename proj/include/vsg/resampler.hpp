#pragma once

// Latent-query cross-attention resampler in double precision, sized for
// desk-scale experiments, with an analytic backward pass used only to check
// the forward math against finite differences.

#include "vsg/types.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vsg {

struct ResamplerDims {
    int depth = 3;
    int n_queries = 32;
    int d_in = 1152;
    int d_latent = 2048;
    int d_hidden = 2048; // MLP intermediate size is 4 * d_hidden
    int d_out = 3584;

    /// Throws InvalidParam unless every field is positive.
    void validate() const;
    bool operator==(const ResamplerDims&) const = default;
};

struct ResamplerLayer {
    Eigen::MatrixXd norm_q;    // 1 x d_latent, gain before attention on the latents
    Eigen::MatrixXd norm_kv;   // 1 x d_in, gain before attention on the tokens
    Eigen::MatrixXd wq;        // d_latent x d_latent
    Eigen::MatrixXd wk;        // d_in x d_latent
    Eigen::MatrixXd wv;        // d_in x d_latent
    Eigen::MatrixXd wo;        // d_latent x d_latent
    Eigen::MatrixXd norm_post; // 1 x d_latent
    Eigen::MatrixXd w1;        // d_latent x 4 d_hidden
    Eigen::MatrixXd w2;        // 4 d_hidden x d_latent
};

struct ResamplerParams {
    ResamplerDims dims;
    Eigen::MatrixXd latents; // n_queries x d_latent
    std::vector<ResamplerLayer> layers;
    Eigen::MatrixXd proj_out; // d_latent x d_out

    /// Every tensor with a stable dotted name, in manifest order.
    std::vector<std::pair<std::string, Eigen::MatrixXd*>> named();
    std::vector<std::pair<std::string, const Eigen::MatrixXd*>> named() const;
    std::size_t parameter_count() const;

    /// Throws InvalidParam when a tensor shape disagrees with `dims`.
    void check_shapes() const;
};

/// Weights uniform with standard deviation 1/sqrt(fan_in), where fan_in is
/// the row count; latents use fan_in = d_latent. Gains start at 1.
ResamplerParams init_params(std::uint64_t seed, const ResamplerDims& dims);

struct TokenFeatures {
    ObjectId object_id = 0;
    Eigen::MatrixXd vectors; // one d_in row per token, in stream order
};

inline constexpr double kRmsEps = 1e-6;

/// n_queries x d_out summary. Throws EmptyInput for zero tokens and
/// InvalidDimensions when the feature width is not d_in.
Eigen::MatrixXd resample(const Eigen::MatrixXd& x, const ResamplerParams& params);
Eigen::MatrixXd resample(const TokenFeatures& x, const ResamplerParams& params);

struct SummaryBlock {
    std::optional<int> window; // nullopt for the global block
    double start_seconds = 0.0;
    /// Global: n_queries x d_out. Window: n_queries' x (1 + d_out) with the
    /// window start time in column 0.
    Eigen::MatrixXd z;
};

struct WindowFeatures {
    double start_seconds = 0.0;
    Eigen::MatrixXd vectors;
};

/// Global summary followed by one block per window in ascending window
/// order. Empty windows are skipped; zero object tokens is EmptyInput.
std::vector<SummaryBlock> dual_resample(const TokenFeatures& object_tokens,
                                        const std::map<int, WindowFeatures>& windows,
                                        const ResamplerParams& params_global,
                                        const ResamplerParams& params_window);

/// Stacks the blocks row-wise into (rows) x (1 + d_out); global rows carry
/// NaN in the timestamp column. All blocks must share d_out.
Eigen::MatrixXd concatenate_blocks(const std::vector<SummaryBlock>& blocks);

struct Gradients {
    double loss = 0.0;
    std::vector<std::pair<std::string, Eigen::MatrixXd>> grads; // same order as named()
};

/// Loss = sum of squares of resample(x, params) and its analytic gradient
/// with respect to every parameter.
Gradients loss_and_gradients(const Eigen::MatrixXd& x, const ResamplerParams& params);

struct GradCheckOptions {
    double step = 1e-5;
    /// Check at most this many entries per tensor, drawn without replacement
    /// with `seed`; 0 checks every entry.
    std::size_t max_entries_per_tensor = 0;
    std::uint64_t seed = 0;
    /// Evaluate the finite differences in long double. With double probes
    /// the roundoff of a step-1e-5 difference (about 1e-16 * loss / step)
    /// swamps the handful of gradients near 1e-5 once the loss reaches a few
    /// hundred, as it does at depth 3.
    bool extended_precision_probe = true;
};

struct GradCheckResult {
    double max_rel_error = 0.0;
    std::string worst_tensor;
    std::size_t entries_checked = 0;
};

/// Compares the analytic (double) gradients to central differences. Relative
/// error is |a - n| / max(|a|, |n|, 1e-8).
GradCheckResult grad_check(const ResamplerParams& params, const Eigen::MatrixXd& x,
                           const GradCheckOptions& options = {});

/// n_tokens x d uniform features on [-1, 1], deterministic in `seed`.
Eigen::MatrixXd random_features(std::uint64_t seed, int n_tokens, int d);

/// Largest absolute output difference between resample(x) and resample of
/// `n_permutations` seeded row shuffles of x.
double permutation_error(const ResamplerParams& params, const Eigen::MatrixXd& x,
                         int n_permutations, std::uint64_t seed);

/// Flat manifest: {"dims": {...}, "tensors": [{"name", "shape", "values"}]}
/// with row-major values. Doubles round-trip exactly.
std::string params_to_manifest(const ResamplerParams& params);
/// Throws ParseError on malformed text and InvalidParam on shape mismatch.
ResamplerParams params_from_manifest(const std::string& text);

} // namespace vsg
