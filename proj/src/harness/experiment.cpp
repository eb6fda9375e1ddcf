#include "deeptd/harness.hpp"

#include "deeptd/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

namespace deeptd {

using nlohmann::json;

namespace {

// Independent random streams inside one trial.
enum Stream : std::uint64_t { NetworkStream = 0, AlsStream = 1, TestStream = 2, GainStream = 3 };

std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::uint64_t trial_seed(const ExperimentConfig& config, std::size_t index)
{
    return derive_seed(config.seed, index);
}

TrialResult run_trial(const ExperimentConfig& config, std::size_t index)
{
    TrialResult result;
    result.index = index;
    result.seed = trial_seed(config, index);
    try {
        config.validate();
        const auto activations = config.activations();

        Rng net_rng(derive_seed(result.seed, NetworkStream));
        OperationalNetwork op = generate_operational_network(config, net_rng);
        result.rejections = op.rejections;

        AlsOptions als = config.als;
        als.seed = derive_seed(result.seed, AlsStream);
        const Centering centering =
            config.estimator == Estimator::DeepTD ? Centering::Centered : Centering::Uncentered;
        const DecompositionResult dec = deeptd_estimate(op.data, config.kernel_shape(), als, centering);
        result.lambda = dec.lambda;

        const auto& truth = op.net.kernels();
        for (std::size_t l = 0; l < truth.size(); ++l) {
            result.correlations.push_back(correlation_metric(dec.factors[l], truth[l]));
            result.gain_condition.push_back(gain_condition_holds(truth[l]));
        }

        const SignedEstimate greedy = greedy_sign_resolve(op.data, dec.factors, activations);
        const SignedEstimate oracle =
            fit_scale(op.data, dec.factors, activations, oracle_sign_resolve(dec.factors, truth));
        result.sign_correct = greedy.signs == oracle.signs;
        result.greedy_flips = greedy.flips;

        Rng test_rng(derive_seed(result.seed, TestStream));
        const std::vector<SignedEstimate> both{greedy, oracle};
        const auto mse = test_mse(both, activations, op.net, config.test_size, test_rng);
        result.test_mse_greedy = mse[0];
        result.test_mse_oracle = mse[1];
        const bool use_greedy = config.sign_resolution == SignResolution::Greedy;
        result.test_mse = use_greedy ? mse[0] : mse[1];
        result.gamma = use_greedy ? greedy.gamma : oracle.gamma;

        result.alpha_cnn = estimate_cnn_gain(op.net, config.gain_samples, derive_seed(result.seed, GainStream));
        result.diffuseness = diffuseness(truth);
    } catch (const std::exception& e) {
        result.error = e.what();
    }
    return result;
}

MetricSummary summarize(std::span<const double> values)
{
    MetricSummary s;
    s.count = values.size();
    if (values.empty())
        return s;
    double sum = 0.0;
    for (double v : values)
        sum += v;
    s.mean = sum / static_cast<double>(values.size());
    double sq = 0.0;
    for (double v : values)
        sq += (v - s.mean) * (v - s.mean);
    s.stddev = values.size() > 1 ? std::sqrt(sq / static_cast<double>(values.size() - 1)) : 0.0;
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    s.median = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
    return s;
}

std::vector<const TrialResult*> ExperimentReport::successful() const
{
    std::vector<const TrialResult*> out;
    for (const auto& t : trials)
        if (t.ok())
            out.push_back(&t);
    return out;
}

MetricSummary ExperimentReport::layer_correlation(std::size_t layer) const
{
    std::vector<double> v;
    for (const auto* t : successful())
        v.push_back(t->correlations.at(layer));
    return summarize(v);
}

double ExperimentReport::sign_correct_fraction() const
{
    const auto ok = successful();
    if (ok.empty())
        return 0.0;
    const auto hits = std::count_if(ok.begin(), ok.end(), [](const TrialResult* t) { return t->sign_correct; });
    return static_cast<double>(hits) / static_cast<double>(ok.size());
}

MetricSummary ExperimentReport::metric(double TrialResult::*field) const
{
    std::vector<double> v;
    for (const auto* t : successful())
        v.push_back(t->*field);
    return summarize(v);
}

ExperimentReport run_experiment(const ExperimentConfig& config, unsigned threads)
{
    config.validate();
    ExperimentReport report;
    report.config = config;
    report.trials.resize(config.trials);

    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(config.trials)));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < config.trials; i = next++)
            report.trials[i] = run_trial(config, i);
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(work);
    }
    return report;
}

std::string trials_csv(const ExperimentReport& report)
{
    std::string out = "trial,seed,layer,correlation,sign_correct,test_mse,gamma,alpha_cnn,diffuseness,rejections\n";
    for (const auto& t : report.trials) {
        if (!t.ok())
            continue;
        const std::string tail = "," + std::string(t.sign_correct ? "1" : "0") + "," + format_double(t.test_mse) +
                                 "," + format_double(t.gamma) + "," + format_double(t.alpha_cnn) + "," +
                                 format_double(t.diffuseness) + "," + std::to_string(t.rejections) + "\n";
        for (std::size_t l = 0; l < t.correlations.size(); ++l)
            out += std::to_string(t.index) + "," + std::to_string(t.seed) + "," + std::to_string(l + 1) + "," +
                   format_double(t.correlations[l]) + tail;
    }
    return out;
}

namespace {

json summary_to_json(const MetricSummary& s)
{
    return {{"mean", s.mean}, {"median", s.median}, {"std", s.stddev}, {"count", s.count}};
}

} // namespace

std::string summary_json(const ExperimentReport& report)
{
    json doc;
    doc["artifact_version"] = artifact_version;
    doc["config"] = json::parse(config_to_json(report.config));
    const auto ok = report.successful();
    doc["trials_completed"] = ok.size();
    json failures = json::array();
    for (const auto& t : report.trials)
        if (!t.ok())
            failures.push_back({{"trial", t.index}, {"seed", t.seed}, {"error", *t.error}});
    doc["failures"] = failures;

    json layers = json::array();
    for (std::size_t l = 0; l < report.config.depth(); ++l) {
        std::size_t holds = 0;
        for (const auto* t : ok)
            holds += t->gain_condition.at(l) ? 1 : 0;
        json entry = summary_to_json(report.layer_correlation(l));
        entry["layer"] = l + 1;
        entry["gain_condition_fraction"] = ok.empty() ? 0.0 : static_cast<double>(holds) / static_cast<double>(ok.size());
        layers.push_back(entry);
    }
    doc["correlation"] = layers;
    doc["sign_correct_fraction"] = report.sign_correct_fraction();
    doc["test_mse"] = summary_to_json(report.metric(&TrialResult::test_mse));
    doc["test_mse_greedy"] = summary_to_json(report.metric(&TrialResult::test_mse_greedy));
    doc["test_mse_oracle"] = summary_to_json(report.metric(&TrialResult::test_mse_oracle));
    doc["gamma"] = summary_to_json(report.metric(&TrialResult::gamma));
    doc["alpha_cnn"] = summary_to_json(report.metric(&TrialResult::alpha_cnn));
    doc["diffuseness"] = summary_to_json(report.metric(&TrialResult::diffuseness));
    std::vector<double> rejections;
    for (const auto* t : ok)
        rejections.push_back(static_cast<double>(t->rejections));
    doc["rejections"] = summary_to_json(summarize(rejections));
    return doc.dump(2);
}

void write_report(const ExperimentReport& report, const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    const auto write = [](const std::filesystem::path& path, const std::string& text) {
        std::ofstream f(path, std::ios::binary);
        if (!f)
            throw IoError("cannot open " + path.string() + " for writing");
        f << text;
        if (!f)
            throw IoError("failed writing " + path.string());
    };
    write(dir / "summary.json", summary_json(report));
    write(dir / "trials.csv", trials_csv(report));
}

std::string generate_json(const ExperimentConfig& config, std::size_t index)
{
    config.validate();
    const std::uint64_t seed = trial_seed(config, index);
    Rng net_rng(derive_seed(seed, NetworkStream));
    const OperationalNetwork op = generate_operational_network(config, net_rng);

    json doc;
    doc["artifact_version"] = artifact_version;
    doc["config"] = json::parse(config_to_json(config));
    doc["trial"] = index;
    doc["seed"] = seed;
    doc["rejections"] = op.rejections;
    doc["kernels"] = op.net.kernels();
    json acts = json::array();
    for (const auto& a : op.net.activations())
        acts.push_back(a.type() == ActivationType::LeakyRelu ? json{{"kind", "leaky_relu"}, {"slope", a.slope()}}
                                                             : json(a.name()));
    doc["activations"] = acts;
    json features = json::array();
    for (std::size_t i = 0; i < op.data.size(); ++i) {
        const auto x = op.data.x(i);
        features.push_back(std::vector<double>(x.begin(), x.end()));
    }
    doc["features"] = features;
    doc["labels"] = std::vector<double>(op.data.labels().begin(), op.data.labels().end());
    return doc.dump();
}

} // namespace deeptd
