#pragma once

#include "deeptd/cnn.hpp"
#include "deeptd/dataset.hpp"
#include "deeptd/decomposition.hpp"
#include "deeptd/random.hpp"
#include "deeptd/ssa.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace deeptd {

inline constexpr const char* artifact_version = "0.1.0";

enum class KernelDistribution { Gaussian, Rademacher };
enum class Estimator { DeepTD, NaiveTD };
enum class SignResolution { Greedy, Oracle };

/// Declarative description of a batch of synthetic trials.
struct ExperimentConfig {
    /// Kernel lengths d_1..d_D.
    std::vector<std::size_t> widths;
    Activation hidden_activation = Activation::relu();
    Activation final_activation = Activation::identity();
    KernelDistribution kernel_distribution = KernelDistribution::Gaussian;
    /// N; the training size is n = N * sum(d_l).
    std::size_t oversampling = 50;
    std::size_t trials = 100;
    std::size_t test_size = 10000;
    /// Minimum fraction of nonzero training labels for an operational network.
    double threshold = 0.5;
    std::uint64_t seed = 0;
    Estimator estimator = Estimator::DeepTD;
    SignResolution sign_resolution = SignResolution::Greedy;
    /// `als.seed` is ignored; every trial derives its own.
    AlsOptions als;
    /// Monte-Carlo samples for the per-trial CNN gain estimate.
    std::size_t gain_samples = 2000;

    std::size_t depth() const noexcept { return widths.size(); }
    std::size_t sample_size() const;
    std::size_t input_dim() const;
    TensorShape kernel_shape() const { return TensorShape(widths); }
    std::vector<Activation> activations() const;
    /// Throws ConfigError.
    void validate() const;
};

/// Parses the JSON config document; unknown fields are rejected.
ExperimentConfig parse_config(std::string_view json_text);
/// Canonical JSON form (always spells out `widths`).
std::string config_to_json(const ExperimentConfig& config, int indent = 2);

struct TrialResult {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    /// |<k_hat_l, k_l>| per layer.
    std::vector<double> correlations;
    /// Greedy signs agree with the oracle on every layer.
    bool sign_correct = false;
    /// Test MSE of the configured sign resolution.
    double test_mse = 0.0;
    double test_mse_greedy = 0.0;
    double test_mse_oracle = 0.0;
    /// Scale of the configured sign resolution.
    double gamma = 0.0;
    double alpha_cnn = 0.0;
    double diffuseness = 0.0;
    std::size_t rejections = 0;
    std::vector<bool> gain_condition;
    int greedy_flips = 0;
    double lambda = 0.0;
    std::optional<std::string> error;

    bool ok() const noexcept { return !error.has_value(); }
};

// --- data generation ------------------------------------------------------

/// Gaussian: i.i.d. N(0,1) entries normalized to unit norm. Rademacher:
/// i.i.d. +-1/sqrt(d).
std::vector<Kernel> sample_kernels(std::span<const std::size_t> dims, KernelDistribution dist, Rng& rng);

/// x_i ~ N(0, I_p), y_i = f(x_i).
TrainingSet sample_dataset(const CnnNetwork& net, std::size_t n, Rng& rng);

struct OperationalNetwork {
    CnnNetwork net;
    TrainingSet data;
    std::size_t rejections = 0;
};

inline constexpr std::size_t max_network_attempts = 1000;

/// Rejection-samples (kernels, dataset) until at least `config.threshold` of
/// the labels are nonzero. Throws ConfigError after max_network_attempts.
OperationalNetwork generate_operational_network(const ExperimentConfig& config, Rng& rng);

// --- metrics --------------------------------------------------------------

/// |<estimate, truth>| for unit vectors; ArgumentError if either norm is off
/// by more than 1e-6.
double correlation_metric(std::span<const double> estimate, std::span<const double> truth);

/// sum (y - f_hat(x))^2 / sum y^2 over n_test fresh Gaussian inputs; one value
/// per estimate, all on the same sample. DegeneracyError if sum y^2 == 0.
std::vector<double> test_mse(std::span<const SignedEstimate> estimates, std::span<const Activation> activations,
                             const CnnNetwork& truth, std::size_t n_test, Rng& rng);
double test_mse(const SignedEstimate& estimate, std::span<const Activation> activations,
                const CnnNetwork& truth, std::size_t n_test, Rng& rng);

// --- orchestration --------------------------------------------------------

/// Seed of trial `index`: derive_seed(config.seed, index).
std::uint64_t trial_seed(const ExperimentConfig& config, std::size_t index);

/// Runs one trial; failures are captured in TrialResult::error.
TrialResult run_trial(const ExperimentConfig& config, std::size_t index);

struct MetricSummary {
    double mean = 0.0;
    double median = 0.0;
    double stddev = 0.0;
    std::size_t count = 0;
};

MetricSummary summarize(std::span<const double> values);

struct ExperimentReport {
    ExperimentConfig config;
    /// Ordered by trial index.
    std::vector<TrialResult> trials;

    std::vector<const TrialResult*> successful() const;
    /// Summary over successful trials of correlations at `layer`.
    MetricSummary layer_correlation(std::size_t layer) const;
    double sign_correct_fraction() const;
    MetricSummary metric(double TrialResult::*field) const;
};

/// Runs every trial on up to `threads` workers; the result does not depend on
/// scheduling.
ExperimentReport run_experiment(const ExperimentConfig& config, unsigned threads = 1);

/// CSV with header
/// trial,seed,layer,correlation,sign_correct,test_mse,gamma,alpha_cnn,diffuseness,rejections
std::string trials_csv(const ExperimentReport& report);
std::string summary_json(const ExperimentReport& report);
/// Writes summary.json and trials.csv into `dir` (created if missing).
void write_report(const ExperimentReport& report, const std::filesystem::path& dir);

/// JSON dump of trial `index`'s operational network and training set.
std::string generate_json(const ExperimentConfig& config, std::size_t index);

// --- tensor documents -----------------------------------------------------

/// {"shape": [...], "entries": [...]} with entries in canonical order.
DenseTensor parse_tensor(std::string_view json_text);
std::string tensor_to_json(const DenseTensor& t);
std::string decomposition_to_json(const DecompositionResult& r, int indent = 2);

} // namespace deeptd
