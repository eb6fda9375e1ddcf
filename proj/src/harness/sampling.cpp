#include "deeptd/harness.hpp"

#include "deeptd/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace deeptd {

std::vector<Kernel> sample_kernels(std::span<const std::size_t> dims, KernelDistribution dist, Rng& rng)
{
    std::vector<Kernel> kernels;
    kernels.reserve(dims.size());
    for (std::size_t d : dims) {
        if (d == 0)
            throw ArgumentError("sample_kernels: kernel length must be positive");
        if (dist == KernelDistribution::Gaussian) {
            kernels.push_back(random_unit_vector(rng, d));
        } else {
            std::bernoulli_distribution coin(0.5);
            const double magnitude = 1.0 / std::sqrt(static_cast<double>(d));
            Kernel k(d);
            for (double& w : k)
                w = coin(rng) ? magnitude : -magnitude;
            kernels.push_back(std::move(k));
        }
    }
    return kernels;
}

TrainingSet sample_dataset(const CnnNetwork& net, std::size_t n, Rng& rng)
{
    if (n == 0)
        throw ArgumentError("sample_dataset: n must be >= 1");
    const std::size_t p = net.input_dim();
    std::vector<double> features(n * p);
    std::vector<double> labels(n);
    fill_gaussian(rng, features);
    for (std::size_t i = 0; i < n; ++i)
        labels[i] = forward(net, std::span<const double>(features.data() + i * p, p));
    return TrainingSet(p, std::move(features), std::move(labels));
}

namespace {

// True when some layer provably outputs zeros for every input and every later
// layer maps 0 to 0: a ReLU layer whose inputs are nonnegative and whose
// kernel has no positive entry.
bool output_identically_zero(const CnnNetwork& net)
{
    const auto maps_zero_to_zero = [](const Activation& a) { return a.type() != ActivationType::Softplus; };
    const auto nonnegative_output = [](const Activation& a) {
        return a.type() == ActivationType::Relu || a.type() == ActivationType::Softplus ||
               (a.type() == ActivationType::LeakyRelu && a.slope() == 0.0);
    };
    for (std::size_t l = 1; l < net.depth(); ++l) {
        if (net.activation(l).type() != ActivationType::Relu || !nonnegative_output(net.activation(l - 1)))
            continue;
        const auto& k = net.kernel(l);
        if (std::any_of(k.begin(), k.end(), [](double w) { return w > 0.0; }))
            continue;
        bool rest_zero = true;
        for (std::size_t m = l + 1; m < net.depth(); ++m)
            rest_zero = rest_zero && maps_zero_to_zero(net.activation(m));
        if (rest_zero)
            return true;
    }
    return false;
}

} // namespace

OperationalNetwork generate_operational_network(const ExperimentConfig& config, Rng& rng)
{
    const std::size_t n = config.sample_size();
    const std::size_t p = config.input_dim();
    const double required = config.threshold * static_cast<double>(n);
    const auto activations = config.activations();
    std::vector<double> features(n * p);
    std::vector<double> labels(n);

    for (std::size_t attempt = 0; attempt < max_network_attempts; ++attempt) {
        CnnNetwork net(sample_kernels(config.widths, config.kernel_distribution, rng), activations);
        if (required > 0.0 && output_identically_zero(net))
            continue;
        // Same decision as sampling the whole set, but stops as soon as the
        // nonzero fraction can no longer reach the threshold.
        std::size_t zeros = 0;
        bool rejected = false;
        for (std::size_t i = 0; i < n && !rejected; ++i) {
            std::span<double> x(features.data() + i * p, p);
            fill_gaussian(rng, x);
            labels[i] = forward(net, x);
            if (labels[i] == 0.0)
                rejected = static_cast<double>(n - ++zeros) < required;
        }
        if (!rejected)
            return {std::move(net), TrainingSet(p, std::move(features), std::move(labels)), attempt};
    }
    std::ostringstream msg;
    msg << "no operational network after " << max_network_attempts
        << " attempts: fewer than a fraction " << config.threshold
        << " of labels were nonzero (threshold too high for these activations?)";
    throw ConfigError(msg.str());
}

double correlation_metric(std::span<const double> estimate, std::span<const double> truth)
{
    if (estimate.size() != truth.size())
        throw DimensionError("correlation_metric: length mismatch");
    if (std::abs(norm2(estimate) - 1.0) > 1e-6 || std::abs(norm2(truth) - 1.0) > 1e-6)
        throw ArgumentError("correlation_metric: inputs must have unit norm");
    return std::abs(dot(estimate, truth));
}

std::vector<double> test_mse(std::span<const SignedEstimate> estimates, std::span<const Activation> activations,
                             const CnnNetwork& truth, std::size_t n_test, Rng& rng)
{
    if (n_test == 0)
        throw ArgumentError("test_mse: n_test must be >= 1");
    std::vector<CnnNetwork> nets;
    nets.reserve(estimates.size());
    for (const auto& e : estimates) {
        nets.push_back(signed_network(e, activations));
        if (nets.back().input_dim() != truth.input_dim())
            throw DimensionError("test_mse: estimate and truth have different input dimension");
    }

    // Identical estimates (e.g. greedy agreeing with the oracle) share one evaluation.
    std::vector<std::size_t> source(estimates.size());
    for (std::size_t e = 0; e < estimates.size(); ++e) {
        source[e] = e;
        for (std::size_t f = 0; f < e; ++f)
            if (estimates[f].gamma == estimates[e].gamma && estimates[f].kernels == estimates[e].kernels) {
                source[e] = source[f];
                break;
            }
    }

    std::vector<double> x(truth.input_dim());
    std::vector<double> err(estimates.size(), 0.0);
    double energy = 0.0;
    for (std::size_t s = 0; s < n_test; ++s) {
        fill_gaussian(rng, x);
        const double y = forward(truth, x);
        energy += y * y;
        for (std::size_t e = 0; e < estimates.size(); ++e) {
            if (source[e] != e)
                continue;
            const double gamma = estimates[e].gamma;
            const double y_hat = gamma == 0.0 ? 0.0 : gamma * forward(nets[e], x);
            err[e] += (y - y_hat) * (y - y_hat);
        }
    }
    for (std::size_t e = 0; e < estimates.size(); ++e)
        err[e] = err[source[e]];
    if (energy == 0.0)
        throw DegeneracyError("test_mse: all test labels are zero");
    for (double& v : err)
        v /= energy;
    return err;
}

double test_mse(const SignedEstimate& estimate, std::span<const Activation> activations,
                const CnnNetwork& truth, std::size_t n_test, Rng& rng)
{
    return test_mse(std::span<const SignedEstimate>(&estimate, 1), activations, truth, n_test, rng).front();
}

} // namespace deeptd
