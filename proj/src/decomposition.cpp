#include "deeptd/decomposition.hpp"

#include "deeptd/error.hpp"
#include "deeptd/random.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace deeptd {

void AlsOptions::validate() const
{
    if (restarts < 1)
        throw ArgumentError("ALS restarts must be >= 1, got " + std::to_string(restarts));
    if (max_iters < 1)
        throw ArgumentError("ALS max_iters must be >= 1, got " + std::to_string(max_iters));
    if (!(rel_tol > 0.0))
        throw ArgumentError("ALS rel_tol must be positive");
}

DenseTensor empirical_tensor(const TrainingSet& data, const TensorShape& shape, Centering centering)
{
    const std::size_t n = data.size();
    if (n == 0)
        throw ArgumentError("empirical_tensor: empty dataset");
    if (data.feature_dim() != shape.total())
        throw DimensionError("empirical_tensor: feature length " + std::to_string(data.feature_dim()) +
                             " does not match shape total " + std::to_string(shape.total()));

    const double offset = centering == Centering::Centered ? shifted_mean(data.labels()) : 0.0;
    const double inv_n = 1.0 / static_cast<double>(n);

    // Tensorization is an ordered copy, so accumulate directly on the vectors.
    std::vector<double> acc(shape.total(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = data.y(i) - offset;
        if (w == 0.0)
            continue;
        const auto x = data.x(i);
        for (std::size_t j = 0; j < acc.size(); ++j)
            acc[j] += w * x[j];
    }
    for (double& v : acc)
        v *= inv_n;
    return DenseTensor(shape, std::move(acc));
}

namespace {

struct RestartOutcome {
    std::vector<std::vector<double>> factors;
    std::vector<double> history;
    bool degenerate = false;
    bool converged = false;
};

RestartOutcome run_restart(const DenseTensor& t, const AlsOptions& opts, Rng& rng)
{
    const TensorShape& shape = t.shape();
    RestartOutcome out;
    out.factors.reserve(shape.order());
    for (std::size_t m = 0; m < shape.order(); ++m)
        out.factors.push_back(random_unit_vector(rng, shape.dim(m)));

    double previous = 0.0;
    for (int it = 0; it < opts.max_iters; ++it) {
        double objective = 0.0;
        for (std::size_t m = 0; m < shape.order(); ++m) {
            std::vector<double> w = contract_all_but(t, out.factors, m);
            const double n = norm2(w);
            if (!(n > 0.0) || !std::isfinite(n)) {
                out.degenerate = true;
                return out;
            }
            for (double& v : w)
                v /= n;
            out.factors[m] = std::move(w);
            // After updating mode m the objective equals ||w||.
            objective = n;
        }
        out.history.push_back(objective);
        if (it > 0 && std::abs(objective - previous) <= opts.rel_tol * std::abs(objective)) {
            out.converged = true;
            break;
        }
        previous = objective;
    }
    return out;
}

} // namespace

void canonicalize_signs(std::span<std::vector<double>> factors)
{
    if (factors.empty())
        return;
    bool odd = false;
    for (std::size_t m = 0; m + 1 < factors.size(); ++m) {
        auto& f = factors[m];
        if (f.empty())
            continue;
        std::size_t peak = 0;
        for (std::size_t j = 1; j < f.size(); ++j)
            if (std::abs(f[j]) > std::abs(f[peak]))
                peak = j;
        if (f[peak] < 0.0) {
            for (double& v : f)
                v = -v;
            odd = !odd;
        }
    }
    if (odd)
        for (double& v : factors.back())
            v = -v;
}

DecompositionResult rank1_decompose(const DenseTensor& t, const AlsOptions& opts)
{
    opts.validate();
    if (t.order() == 0)
        throw ArgumentError("rank1_decompose: tensor has no modes");

    Rng rng(opts.seed);
    DecompositionResult best;
    double best_objective = -std::numeric_limits<double>::infinity();
    bool found = false;

    for (int r = 0; r < opts.restarts; ++r) {
        RestartOutcome outcome = run_restart(t, opts, rng);
        ++best.restarts_used;
        if (outcome.degenerate)
            continue;
        const double objective = outcome.history.back();
        if (objective > best_objective) {
            best_objective = objective;
            best.factors = std::move(outcome.factors);
            best.objective_history = std::move(outcome.history);
            best.converged = outcome.converged;
            found = true;
        }
    }

    if (!found) {
        best.factors.clear();
        for (std::size_t m = 0; m < t.order(); ++m) {
            std::vector<double> e(t.shape().dim(m), 0.0);
            e[0] = 1.0;
            best.factors.push_back(std::move(e));
        }
        best.lambda = 0.0;
        best.objective_history.clear();
        best.converged = false;
        return best;
    }

    canonicalize_signs(best.factors);
    best.lambda = multilinear_form(t, best.factors);
    if (best.lambda < 0.0) {
        for (double& v : best.factors.back())
            v = -v;
        best.lambda = -best.lambda;
    }
    return best;
}

DecompositionResult deeptd_estimate(const TrainingSet& data, const TensorShape& shape,
                                    const AlsOptions& opts, Centering centering)
{
    return rank1_decompose(empirical_tensor(data, shape, centering), opts);
}

double approx_spectral_norm(const DenseTensor& t, const AlsOptions& opts)
{
    return rank1_decompose(t, opts).lambda;
}

double rank1_residual(const DenseTensor& t, const DecompositionResult& r)
{
    if (r.factors.size() != t.order())
        throw DimensionError("rank1_residual: factor count does not match tensor order");
    DenseTensor approx = outer_product(r.factors);
    if (approx.shape() != t.shape())
        throw DimensionError("rank1_residual: factor lengths do not match tensor shape");
    approx *= r.lambda;
    return frobenius_norm(t - approx);
}

} // namespace deeptd
