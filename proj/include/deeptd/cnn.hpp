#pragma once

#include "deeptd/tensor.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace deeptd {

enum class ActivationType { Identity, Relu, LeakyRelu, Softplus };

/// Entrywise 1-Lipschitz activation.
class Activation {
public:
    static Activation identity() { return Activation(ActivationType::Identity, 0.0); }
    static Activation relu() { return Activation(ActivationType::Relu, 0.0); }
    /// Throws ArgumentError unless slope is within [0, 1].
    static Activation leaky_relu(double slope);
    static Activation softplus() { return Activation(ActivationType::Softplus, 0.0); }

    ActivationType type() const noexcept { return type_; }
    /// Negative-side slope of LeakyReLU; 0 for every other kind.
    double slope() const noexcept { return slope_; }

    double value(double z) const noexcept;
    /// Derivative with the conventions relu'(0) = 0 and leaky_relu'(0) = slope.
    double derivative(double z) const noexcept;
    /// value() applied in place to every entry.
    void apply(std::span<double> values) const noexcept;

    /// Smoothness constant S (metadata only): Identity 0, Softplus 1, none for
    /// the piecewise-linear kinds.
    std::optional<double> smoothness() const noexcept;
    /// phi(c z) = c phi(z) for c > 0.
    bool positively_homogeneous() const noexcept { return type_ != ActivationType::Softplus; }
    /// phi(-z) = -phi(z).
    bool odd() const noexcept
    {
        return type_ == ActivationType::Identity ||
               (type_ == ActivationType::LeakyRelu && slope_ == 1.0);
    }

    /// "identity", "relu", "leaky_relu" or "softplus".
    std::string name() const;

    friend bool operator==(const Activation&, const Activation&) = default;

private:
    Activation(ActivationType type, double slope)
        : type_(type)
        , slope_(slope)
    {
    }

    ActivationType type_;
    double slope_;
};

using Kernel = std::vector<double>;

/// Deep CNN with one kernel per layer and stride equal to the kernel length.
/// Layer widths are p_0 = prod d_l, p_l = p_{l-1} / d_l, p_D = 1.
class CnnNetwork {
public:
    CnnNetwork(std::vector<Kernel> kernels, std::vector<Activation> activations);

    std::size_t depth() const noexcept { return kernels_.size(); }
    std::size_t input_dim() const noexcept { return widths_.front(); }
    /// p_l for l in [0, depth].
    std::size_t layer_width(std::size_t layer) const { return widths_.at(layer); }
    const Kernel& kernel(std::size_t layer) const { return kernels_.at(layer); }
    const Activation& activation(std::size_t layer) const { return activations_.at(layer); }
    const std::vector<Kernel>& kernels() const noexcept { return kernels_; }
    const std::vector<Activation>& activations() const noexcept { return activations_; }
    /// (d_1, ..., d_D).
    TensorShape kernel_shape() const;

private:
    std::vector<Kernel> kernels_;
    std::vector<Activation> activations_;
    std::vector<std::size_t> widths_;
};

/// Output together with the pre-activation vectors of every layer.
struct ForwardTrace {
    double output = 0.0;
    std::vector<std::vector<double>> pre_activations;
};

/// Row-major dense matrix; only used to materialize kernel matrices.
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
    std::vector<double> apply(std::span<const double> x) const;
};

/// Block-diagonal I_{p/d} (x) k^T of shape (p/d) x p.
DenseMatrix kernel_matrix(std::span<const double> kernel, std::size_t input_len);

/// u_i = <k, h[i*d, (i+1)*d)>.
std::vector<double> non_overlapping_convolve(std::span<const double> kernel, std::span<const double> h);

ForwardTrace forward_trace(const CnnNetwork& net, std::span<const double> x);
/// Output only; avoids storing the trace.
double forward(const CnnNetwork& net, std::span<const double> x);
/// Same as `forward` but evaluates every layer as an explicit kernel-matrix product.
double forward_by_matrices(const CnnNetwork& net, std::span<const double> x);

/// Entry i is the product of kernel weights along the path from input i to the
/// output: prod_l k^(l)[digit_l(i)].
std::vector<double> path_gain_vector(const CnnNetwork& net);

inline constexpr std::size_t default_gain_samples = 100000;

/// Monte-Carlo estimate of prod_l E[phi_l'(hbar^(l)_1)] under x ~ N(0, I_p).
double estimate_cnn_gain(const CnnNetwork& net, std::size_t mc_samples, std::uint64_t seed);

/// max_l sqrt(d_l) ||k^(l)||_inf / ||k^(l)||_2.
double diffuseness(std::span<const Kernel> kernels);

/// sum(k) >= 4 ||k||_2.
bool gain_condition_holds(std::span<const double> kernel);

} // namespace deeptd
