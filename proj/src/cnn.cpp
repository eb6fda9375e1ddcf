#include "deeptd/cnn.hpp"

#include "deeptd/error.hpp"
#include "deeptd/random.hpp"

#include <algorithm>
#include <cmath>

namespace deeptd {

namespace {

void require_divisible(std::size_t len, std::size_t d, const char* what)
{
    if (d == 0 || len % d != 0)
        throw DimensionError(std::string(what) + ": length " + std::to_string(len) +
                             " is not divisible by kernel length " + std::to_string(d));
}

// Runs the network in a single buffer. `on_layer(l, pre)` sees the
// pre-activation vector of layer l before the activation is applied.
template <class OnLayer>
double run_layers(const CnnNetwork& net, std::span<const double> x, std::vector<double>& buf,
                  OnLayer&& on_layer)
{
    if (x.size() != net.input_dim())
        throw DimensionError("forward: input length " + std::to_string(x.size()) +
                             " does not match network input " + std::to_string(net.input_dim()));
    const auto& k0 = net.kernel(0);
    const std::size_t d0 = k0.size();
    std::size_t width = net.layer_width(1);
    buf.resize(width);
    for (std::size_t i = 0; i < width; ++i) {
        const double* patch = x.data() + i * d0;
        double acc = 0.0;
        for (std::size_t j = 0; j < d0; ++j)
            acc += k0[j] * patch[j];
        buf[i] = acc;
    }
    for (std::size_t l = 0;; ++l) {
        on_layer(l, std::span<const double>(buf.data(), width));
        net.activation(l).apply(std::span<double>(buf.data(), width));
        if (l + 1 == net.depth())
            break;
        // In place: output i reads [i*d, (i+1)*d) which is never behind i.
        const auto& k = net.kernel(l + 1);
        const std::size_t d = k.size();
        const std::size_t next = width / d;
        for (std::size_t i = 0; i < next; ++i) {
            const double* patch = buf.data() + i * d;
            double acc = 0.0;
            for (std::size_t j = 0; j < d; ++j)
                acc += k[j] * patch[j];
            buf[i] = acc;
        }
        width = next;
    }
    return buf[0];
}

} // namespace

Activation Activation::leaky_relu(double slope)
{
    if (!(slope >= 0.0 && slope <= 1.0))
        throw ArgumentError("leaky_relu slope must lie in [0, 1], got " + std::to_string(slope));
    return Activation(ActivationType::LeakyRelu, slope);
}

double Activation::value(double z) const noexcept
{
    switch (type_) {
    case ActivationType::Identity:
        return z;
    case ActivationType::Relu:
        return z > 0.0 ? z : 0.0;
    case ActivationType::LeakyRelu:
        return z >= 0.0 ? z : slope_ * z;
    case ActivationType::Softplus:
        return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
    }
    return z;
}

void Activation::apply(std::span<double> values) const noexcept
{
    switch (type_) {
    case ActivationType::Identity:
        return;
    case ActivationType::Relu:
        for (double& v : values)
            v = v > 0.0 ? v : 0.0;
        return;
    case ActivationType::LeakyRelu:
        for (double& v : values)
            v = v >= 0.0 ? v : slope_ * v;
        return;
    case ActivationType::Softplus:
        for (double& v : values)
            v = value(v);
        return;
    }
}

double Activation::derivative(double z) const noexcept
{
    switch (type_) {
    case ActivationType::Identity:
        return 1.0;
    case ActivationType::Relu:
        return z > 0.0 ? 1.0 : 0.0;
    case ActivationType::LeakyRelu:
        return z > 0.0 ? 1.0 : slope_;
    case ActivationType::Softplus:
        if (z >= 0.0)
            return 1.0 / (1.0 + std::exp(-z));
        else {
            const double e = std::exp(z);
            return e / (1.0 + e);
        }
    }
    return 1.0;
}

std::optional<double> Activation::smoothness() const noexcept
{
    switch (type_) {
    case ActivationType::Identity:
        return 0.0;
    case ActivationType::Softplus:
        return 1.0;
    default:
        return std::nullopt;
    }
}

std::string Activation::name() const
{
    switch (type_) {
    case ActivationType::Identity:
        return "identity";
    case ActivationType::Relu:
        return "relu";
    case ActivationType::LeakyRelu:
        return "leaky_relu";
    case ActivationType::Softplus:
        return "softplus";
    }
    return "unknown";
}

CnnNetwork::CnnNetwork(std::vector<Kernel> kernels, std::vector<Activation> activations)
    : kernels_(std::move(kernels))
    , activations_(std::move(activations))
{
    if (kernels_.empty())
        throw ArgumentError("network needs at least one layer");
    if (kernels_.size() != activations_.size())
        throw DimensionError("network has " + std::to_string(kernels_.size()) + " kernels but " +
                             std::to_string(activations_.size()) + " activations");
    std::size_t p = 1;
    for (const auto& k : kernels_) {
        if (k.empty())
            throw ArgumentError("kernels must be non-empty");
        for (double w : k)
            if (!std::isfinite(w))
                throw ArgumentError("kernel weights must be finite");
        p *= k.size();
    }
    widths_.resize(kernels_.size() + 1);
    widths_[0] = p;
    for (std::size_t l = 0; l < kernels_.size(); ++l)
        widths_[l + 1] = widths_[l] / kernels_[l].size();
}

TensorShape CnnNetwork::kernel_shape() const
{
    std::vector<std::size_t> dims;
    dims.reserve(kernels_.size());
    for (const auto& k : kernels_)
        dims.push_back(k.size());
    return TensorShape(std::move(dims));
}

std::vector<double> DenseMatrix::apply(std::span<const double> x) const
{
    if (x.size() != cols)
        throw DimensionError("matrix-vector product: length mismatch");
    std::vector<double> y(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = values.data() + r * cols;
        double acc = 0.0;
        for (std::size_t c = 0; c < cols; ++c)
            acc += row[c] * x[c];
        y[r] = acc;
    }
    return y;
}

DenseMatrix kernel_matrix(std::span<const double> kernel, std::size_t input_len)
{
    require_divisible(input_len, kernel.size(), "kernel_matrix");
    const std::size_t d = kernel.size();
    DenseMatrix m{input_len / d, input_len, std::vector<double>((input_len / d) * input_len, 0.0)};
    for (std::size_t r = 0; r < m.rows; ++r)
        std::copy(kernel.begin(), kernel.end(), m.values.begin() + r * input_len + r * d);
    return m;
}

std::vector<double> non_overlapping_convolve(std::span<const double> kernel, std::span<const double> h)
{
    require_divisible(h.size(), kernel.size(), "non_overlapping_convolve");
    const std::size_t d = kernel.size();
    std::vector<double> u(h.size() / d);
    for (std::size_t i = 0; i < u.size(); ++i)
        u[i] = dot(kernel, h.subspan(i * d, d));
    return u;
}

ForwardTrace forward_trace(const CnnNetwork& net, std::span<const double> x)
{
    ForwardTrace trace;
    trace.pre_activations.reserve(net.depth());
    std::vector<double> buf;
    trace.output = run_layers(net, x, buf, [&](std::size_t, std::span<const double> pre) {
        trace.pre_activations.emplace_back(pre.begin(), pre.end());
    });
    return trace;
}

double forward(const CnnNetwork& net, std::span<const double> x)
{
    std::vector<double> buf;
    return run_layers(net, x, buf, [](std::size_t, std::span<const double>) {});
}

double forward_by_matrices(const CnnNetwork& net, std::span<const double> x)
{
    if (x.size() != net.input_dim())
        throw DimensionError("forward: input length does not match network input");
    std::vector<double> h(x.begin(), x.end());
    for (std::size_t l = 0; l < net.depth(); ++l) {
        h = kernel_matrix(net.kernel(l), h.size()).apply(h);
        for (double& v : h)
            v = net.activation(l).value(v);
    }
    return h.front();
}

std::vector<double> path_gain_vector(const CnnNetwork& net)
{
    // Kronecker build in canonical order; mode l is digit l of the input index.
    std::vector<double> g{1.0};
    for (const auto& k : net.kernels()) {
        std::vector<double> next(g.size() * k.size());
        for (std::size_t j = 0; j < k.size(); ++j)
            for (std::size_t i = 0; i < g.size(); ++i)
                next[i + g.size() * j] = g[i] * k[j];
        g = std::move(next);
    }
    return g;
}

double estimate_cnn_gain(const CnnNetwork& net, std::size_t mc_samples, std::uint64_t seed)
{
    if (mc_samples == 0)
        throw ArgumentError("estimate_cnn_gain needs at least one sample");
    const std::size_t depth = net.depth();
    std::vector<double> sums(depth, 0.0);
    Rng rng(seed);
    std::vector<double> x(net.input_dim());
    std::vector<double> buf;
    for (std::size_t s = 0; s < mc_samples; ++s) {
        fill_gaussian(rng, x);
        run_layers(net, x, buf, [&](std::size_t l, std::span<const double> pre) {
            sums[l] += net.activation(l).derivative(pre[0]);
        });
    }
    double gain = 1.0;
    for (double s : sums)
        gain *= s / static_cast<double>(mc_samples);
    return gain;
}

double diffuseness(std::span<const Kernel> kernels)
{
    if (kernels.empty())
        throw ArgumentError("diffuseness: no kernels");
    double mu = 0.0;
    for (const auto& k : kernels) {
        const double n2 = norm2(k);
        if (n2 == 0.0)
            throw ArgumentError("diffuseness: zero-norm kernel");
        double inf = 0.0;
        for (double w : k)
            inf = std::max(inf, std::abs(w));
        mu = std::max(mu, std::sqrt(static_cast<double>(k.size())) * inf / n2);
    }
    return mu;
}

bool gain_condition_holds(std::span<const double> kernel)
{
    double sum = 0.0;
    for (double w : kernel)
        sum += w;
    return sum >= 4.0 * norm2(kernel);
}

} // namespace deeptd
