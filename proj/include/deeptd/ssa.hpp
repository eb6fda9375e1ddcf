#pragma once

#include "deeptd/cnn.hpp"
#include "deeptd/dataset.hpp"

#include <span>
#include <vector>

namespace deeptd {

/// What `corr` returns: the raw centered correlation, or the least-squares
/// slope of centered labels on centered predictions.
enum class CorrMode { Correlation, Scale };

struct CorrResult {
    double value = 0.0;
    /// Scale mode only: predictions were constant, value forced to 0.
    bool degenerate = false;
};

/// rho = sum (y_i - mean y)(yhat_i - mean yhat); Scale mode divides by
/// sum (yhat_i - mean yhat)^2.
CorrResult centered_corr(std::span<const double> labels, std::span<const double> predictions, CorrMode mode);

/// centered_corr of the labels against the CNN built from `kernels`.
CorrResult corr(const TrainingSet& data, std::span<const Kernel> kernels,
                std::span<const Activation> activations, CorrMode mode);

/// Kernel estimates with resolved signs and a global output scale.
struct SignedEstimate {
    std::vector<Kernel> kernels;
    double gamma = 0.0;
    /// +1/-1 per layer, relative to the raw decomposition factors.
    std::vector<int> signs;
    /// gamma forced to 0 because predictions were constant.
    bool degenerate = false;
    /// Some activation is not positively homogeneous, so a single global
    /// scale cannot absorb per-layer scalings.
    bool non_homogeneous = false;
    int flips = 0;
    int sweeps = 0;
};

/// Applies `signs` to `raw` and fits gamma by centered regression.
SignedEstimate fit_scale(const TrainingSet& data, std::span<const Kernel> raw,
                         std::span<const Activation> activations, std::vector<int> signs);

/// Greedy sign search: sweep layers in order and flip a kernel whenever that
/// strictly increases |rho|; repeat until a sweep makes no flip, then fit
/// gamma. If gamma comes out negative and the final activation is odd, the
/// sign is moved into the last kernel so gamma >= 0.
SignedEstimate greedy_sign_resolve(const TrainingSet& data, std::span<const Kernel> raw,
                                   std::span<const Activation> activations);

/// sign_l = +1 if <raw_l, truth_l> >= 0 else -1.
std::vector<int> oracle_sign_resolve(std::span<const Kernel> raw, std::span<const Kernel> truth);

/// Network built from the signed kernels of `estimate`.
CnnNetwork signed_network(const SignedEstimate& estimate, std::span<const Activation> activations);

/// gamma * f(signed kernels; x).
double predict(const SignedEstimate& estimate, std::span<const Activation> activations,
               std::span<const double> x);

} // namespace deeptd
