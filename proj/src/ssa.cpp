#include "deeptd/ssa.hpp"

#include "deeptd/error.hpp"

#include <algorithm>
#include <cmath>

namespace deeptd {

namespace {

std::vector<double> network_predictions(const TrainingSet& data, const CnnNetwork& net)
{
    std::vector<double> out(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
        out[i] = forward(net, data.x(i));
    return out;
}

std::vector<Kernel> apply_signs(std::span<const Kernel> raw, std::span<const int> signs)
{
    std::vector<Kernel> kernels(raw.begin(), raw.end());
    for (std::size_t l = 0; l < kernels.size(); ++l)
        if (signs[l] < 0)
            for (double& w : kernels[l])
                w = -w;
    return kernels;
}

bool all_homogeneous(std::span<const Activation> activations)
{
    return std::all_of(activations.begin(), activations.end(),
                       [](const Activation& a) { return a.positively_homogeneous(); });
}

} // namespace

CorrResult centered_corr(std::span<const double> labels, std::span<const double> predictions, CorrMode mode)
{
    if (labels.size() != predictions.size())
        throw DimensionError("corr: label and prediction counts differ");
    if (labels.size() < 2)
        throw ArgumentError("corr needs at least two samples");
    const double y_mean = shifted_mean(labels);
    const double p_mean = shifted_mean(predictions);
    double rho = 0.0;
    double energy = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double pc = predictions[i] - p_mean;
        rho += (labels[i] - y_mean) * pc;
        energy += pc * pc;
    }
    if (mode == CorrMode::Correlation)
        return {rho, false};
    if (energy == 0.0)
        return {0.0, true};
    return {rho / energy, false};
}

CorrResult corr(const TrainingSet& data, std::span<const Kernel> kernels,
                std::span<const Activation> activations, CorrMode mode)
{
    const CnnNetwork net(std::vector<Kernel>(kernels.begin(), kernels.end()),
                         std::vector<Activation>(activations.begin(), activations.end()));
    if (net.input_dim() != data.feature_dim())
        throw DimensionError("corr: network input does not match feature length");
    return centered_corr(data.labels(), network_predictions(data, net), mode);
}

SignedEstimate fit_scale(const TrainingSet& data, std::span<const Kernel> raw,
                         std::span<const Activation> activations, std::vector<int> signs)
{
    if (signs.size() != raw.size())
        throw DimensionError("fit_scale: one sign per layer required");
    SignedEstimate est;
    est.kernels = apply_signs(raw, signs);
    est.signs = std::move(signs);
    const CorrResult scale = corr(data, est.kernels, activations, CorrMode::Scale);
    est.gamma = scale.value;
    est.degenerate = scale.degenerate;
    est.non_homogeneous = !all_homogeneous(activations);
    return est;
}

namespace {

// Applies layers [from, depth) to one row of width `width`, using `buf` as
// scratch; returns the network output.
double propagate(std::span<const Kernel> kernels, std::span<const Activation> activations, std::size_t from,
                 const double* row, std::size_t width, std::vector<double>& buf)
{
    buf.assign(row, row + width);
    for (std::size_t l = from; l < kernels.size(); ++l) {
        const auto& k = kernels[l];
        const std::size_t d = k.size();
        const std::size_t next = width / d;
        for (std::size_t i = 0; i < next; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < d; ++j)
                acc += k[j] * buf[i * d + j];
            buf[i] = activations[l].value(acc);
        }
        width = next;
    }
    return buf[0];
}

} // namespace

SignedEstimate greedy_sign_resolve(const TrainingSet& data, std::span<const Kernel> raw,
                                   std::span<const Activation> activations)
{
    if (raw.size() != activations.size())
        throw DimensionError("greedy_sign_resolve: one activation per kernel required");
    if (data.size() < 2)
        throw ArgumentError("greedy_sign_resolve needs at least two samples");

    const std::size_t depth = raw.size();
    const std::size_t n = data.size();
    std::vector<int> signs(depth, 1);
    std::vector<Kernel> kernels(raw.begin(), raw.end());
    double best = std::abs(corr(data, kernels, activations, CorrMode::Correlation).value);

    // During a sweep, `layer_input` holds every sample's input to the current
    // layer under the signs settled so far, so trying a flip at layer l only
    // re-evaluates layers l..D-1.
    std::vector<double> layer_input;
    std::vector<double> next_input;
    std::vector<double> predictions(n);
    std::vector<double> buf;

    int flips = 0;
    int sweeps = 0;
    bool flipped = true;
    while (flipped) {
        flipped = false;
        ++sweeps;
        const double* input = data.features().data();
        std::size_t width = data.feature_dim();
        for (std::size_t l = 0; l < depth; ++l) {
            for (double& w : kernels[l])
                w = -w;
            for (std::size_t i = 0; i < n; ++i)
                predictions[i] = propagate(kernels, activations, l, input + i * width, width, buf);
            const double rho = std::abs(centered_corr(data.labels(), predictions, CorrMode::Correlation).value);
            if (rho > best) {
                best = rho;
                signs[l] = -signs[l];
                ++flips;
                flipped = true;
            } else {
                for (double& w : kernels[l])
                    w = -w;
            }
            if (l + 1 == depth)
                break;
            const auto& k = kernels[l];
            const std::size_t d = k.size();
            const std::size_t next = width / d;
            next_input.resize(n * next);
            for (std::size_t i = 0; i < n; ++i) {
                const double* row = input + i * width;
                for (std::size_t u = 0; u < next; ++u) {
                    double acc = 0.0;
                    for (std::size_t j = 0; j < d; ++j)
                        acc += k[j] * row[u * d + j];
                    next_input[i * next + u] = activations[l].value(acc);
                }
            }
            layer_input.swap(next_input);
            input = layer_input.data();
            width = next;
        }
    }

    SignedEstimate est = fit_scale(data, raw, activations, std::move(signs));
    if (est.gamma < 0.0 && activations.back().odd()) {
        est.signs.back() = -est.signs.back();
        for (double& w : est.kernels.back())
            w = -w;
        est.gamma = -est.gamma;
    }
    est.flips = flips;
    est.sweeps = sweeps;
    return est;
}

std::vector<int> oracle_sign_resolve(std::span<const Kernel> raw, std::span<const Kernel> truth)
{
    if (raw.size() != truth.size())
        throw DimensionError("oracle_sign_resolve: layer counts differ");
    std::vector<int> signs(raw.size());
    for (std::size_t l = 0; l < raw.size(); ++l)
        signs[l] = dot(raw[l], truth[l]) >= 0.0 ? 1 : -1;
    return signs;
}

CnnNetwork signed_network(const SignedEstimate& estimate, std::span<const Activation> activations)
{
    return CnnNetwork(estimate.kernels, std::vector<Activation>(activations.begin(), activations.end()));
}

double predict(const SignedEstimate& estimate, std::span<const Activation> activations,
               std::span<const double> x)
{
    if (estimate.gamma == 0.0) {
        if (x.size() != signed_network(estimate, activations).input_dim())
            throw DimensionError("predict: input length does not match network input");
        return 0.0;
    }
    return estimate.gamma * forward(signed_network(estimate, activations), x);
}

} // namespace deeptd
