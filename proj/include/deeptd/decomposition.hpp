#pragma once

#include "deeptd/dataset.hpp"
#include "deeptd/tensor.hpp"

#include <cstdint>
#include <vector>

namespace deeptd {

/// Controls for the alternating rank-one solver.
struct AlsOptions {
    int restarts = 10;
    int max_iters = 500;
    double rel_tol = 1e-9;
    std::uint64_t seed = 0;

    /// Throws ArgumentError on non-positive restarts/max_iters/rel_tol.
    void validate() const;
};

struct DecompositionResult {
    /// Unit-norm factors, one per mode.
    std::vector<std::vector<double>> factors;
    /// <T, outer(factors)>, always >= 0.
    double lambda = 0.0;
    /// Objective after every sweep of the returned restart.
    std::vector<double> objective_history;
    /// Restarts actually executed (including degenerate ones).
    int restarts_used = 0;
    bool converged = false;
};

enum class Centering { Centered, Uncentered };

/// (1/n) sum_i w_i T(x_i) with w_i = y_i - mean(y) (Centered) or w_i = y_i.
DenseTensor empirical_tensor(const TrainingSet& data, const TensorShape& shape, Centering centering);

/// Best rank-one approximation by alternating maximization of <T, outer(v)>
/// over unit factors, keeping the best of several random restarts.
DecompositionResult rank1_decompose(const DenseTensor& t, const AlsOptions& opts);

/// Flips factors 1..D-1 so their largest-magnitude entry (first on ties) is
/// positive and moves the parity of those flips into the last factor; the
/// outer product is unchanged.
void canonicalize_signs(std::span<std::vector<double>> factors);

/// rank1_decompose(empirical_tensor(...)).
DecompositionResult deeptd_estimate(const TrainingSet& data, const TensorShape& shape,
                                    const AlsOptions& opts, Centering centering);

/// Lower bound on sup <T, outer(v)> over unit factors.
double approx_spectral_norm(const DenseTensor& t, const AlsOptions& opts);

/// ||T - lambda outer(factors)||_F.
double rank1_residual(const DenseTensor& t, const DecompositionResult& r);

} // namespace deeptd
