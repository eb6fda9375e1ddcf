#include "deeptd/error.hpp"
#include "deeptd/harness.hpp"

#include <doctest.h>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

using namespace deeptd;
using nlohmann::json;

namespace {

ExperimentConfig small_config()
{
    ExperimentConfig c;
    c.widths = {2, 2, 2};
    c.oversampling = 20;
    c.trials = 5;
    c.test_size = 400;
    c.gain_samples = 300;
    c.seed = 77;
    return c;
}

std::string read_file(const std::filesystem::path& p)
{
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("seed derivation")
{
    // Reference values of the public mixing function.
    CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
    CHECK(derive_seed(0, 0) == splitmix64(splitmix64(0)));
    CHECK(derive_seed(5, 3) == splitmix64(5 ^ splitmix64(3)));
    ExperimentConfig c = small_config();
    CHECK(trial_seed(c, 4) == derive_seed(77, 4));
    CHECK(trial_seed(c, 4) != trial_seed(c, 5));
}

TEST_CASE("kernel sampling")
{
    Rng rng(1);
    const std::vector<std::size_t> dims{4, 3, 9};
    const auto rad = sample_kernels(dims, KernelDistribution::Rademacher, rng);
    for (std::size_t l = 0; l < dims.size(); ++l) {
        REQUIRE(rad[l].size() == dims[l]);
        for (double w : rad[l])
            CHECK(std::abs(w) == 1.0 / std::sqrt(double(dims[l])));
        CHECK(norm2(rad[l]) == doctest::Approx(1.0).epsilon(1e-14));
    }

    const auto g = sample_kernels(dims, KernelDistribution::Gaussian, rng);
    for (const auto& k : g)
        CHECK(std::abs(norm2(k) - 1.0) <= 1e-12);

    Rng a(9), b(9);
    CHECK(sample_kernels(dims, KernelDistribution::Gaussian, a) == sample_kernels(dims, KernelDistribution::Gaussian, b));
    const std::vector<std::size_t> bad{2, 0};
    CHECK_THROWS_AS(sample_kernels(bad, KernelDistribution::Gaussian, rng), ArgumentError);
}

TEST_CASE("dataset sampling")
{
    Rng rng(2);
    const CnnNetwork selector({{1, 0}, {1, 0, 0}}, {Activation::identity(), Activation::identity()});
    const auto data = sample_dataset(selector, 50, rng);
    REQUIRE(data.size() == 50);
    for (std::size_t i = 0; i < data.size(); ++i)
        CHECK(data.y(i) == data.x(i)[0]);
    CHECK_THROWS_AS(sample_dataset(selector, 0, rng), ArgumentError);

    // A ReLU output is nonnegative, so its mean is clearly positive.
    const CnnNetwork relu_net({{0.6, 0.8}, {0.6, 0.8}}, {Activation::relu(), Activation::relu()});
    const auto big = sample_dataset(relu_net, 100000, rng);
    double mean = 0.0, sq = 0.0;
    for (double y : big.labels()) {
        mean += y;
        sq += y * y;
    }
    mean /= 1e5;
    const double sd = std::sqrt(sq / 1e5 - mean * mean);
    CHECK(mean > 3.0 * sd / std::sqrt(1e5));
}

TEST_CASE("operational network generation")
{
    Rng rng(3);
    ExperimentConfig linear = small_config();
    linear.hidden_activation = Activation::identity();
    for (int i = 0; i < 10; ++i)
        CHECK(generate_operational_network(linear, rng).rejections == 0);

    ExperimentConfig open = small_config();
    open.final_activation = Activation::relu();
    open.threshold = 0.0;
    for (int i = 0; i < 10; ++i)
        CHECK(generate_operational_network(open, rng).rejections == 0);

    ExperimentConfig strict = small_config();
    strict.final_activation = Activation::relu();
    strict.threshold = 1.0;
    try {
        generate_operational_network(strict, rng);
        FAIL("expected a configuration error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("threshold") != std::string::npos);
    }

    ExperimentConfig c = small_config();
    Rng a(4), b(4);
    const auto x = generate_operational_network(c, a);
    const auto y = generate_operational_network(c, b);
    CHECK(x.net.kernels() == y.net.kernels());
    CHECK(std::vector<double>(x.data.labels().begin(), x.data.labels().end()) ==
          std::vector<double>(y.data.labels().begin(), y.data.labels().end()));
    std::size_t nonzero = 0;
    for (double v : x.data.labels())
        nonzero += v != 0.0;
    CHECK(double(nonzero) >= c.threshold * double(x.data.size()));
    CHECK(x.data.size() == c.sample_size());
}

TEST_CASE("correlation metric")
{
    const std::vector<double> k{0.6, 0.8};
    const std::vector<double> neg{-0.6, -0.8};
    const std::vector<double> orth{-0.8, 0.6};
    CHECK(correlation_metric(k, k) == doctest::Approx(1.0));
    CHECK(correlation_metric(neg, k) == doctest::Approx(1.0));
    CHECK(correlation_metric(orth, k) == 0.0);
    CHECK_THROWS_AS(correlation_metric(std::vector<double>{1.0, 1.0}, k), ArgumentError);
    CHECK_THROWS_AS(correlation_metric(std::vector<double>{1.0}, k), DimensionError);
}

TEST_CASE("test MSE")
{
    Rng rng(5);
    const std::vector<Activation> acts{Activation::relu(), Activation::identity()};
    const CnnNetwork truth({{0.6, 0.8}, {0.8, -0.6}}, acts);
    SignedEstimate exact;
    exact.kernels = truth.kernels();
    exact.signs = {1, 1};
    exact.gamma = 1.0;
    CHECK(test_mse(exact, acts, truth, 1000, rng) == 0.0);

    SignedEstimate zero = exact;
    zero.gamma = 0.0;
    CHECK(test_mse(zero, acts, truth, 1000, rng) == 1.0);

    const std::vector<SignedEstimate> both{exact, zero};
    const auto v = test_mse(both, acts, truth, 1000, rng);
    CHECK(v == std::vector<double>{0.0, 1.0});

    // Truth with an all-zero kernel has no signal to normalize by.
    const CnnNetwork null_net({{0.0, 0.0}, {1.0, 0.0}}, acts);
    CHECK_THROWS_AS(test_mse(exact, acts, null_net, 100, rng), DegeneracyError);
    CHECK_THROWS_AS(test_mse(exact, acts, truth, 0, rng), ArgumentError);
}

TEST_CASE("trial determinism and metric ranges")
{
    const ExperimentConfig c = small_config();
    const auto a = run_trial(c, 3);
    const auto b = run_trial(c, 3);
    REQUIRE(a.ok());
    CHECK(a.correlations == b.correlations);
    CHECK(a.test_mse == b.test_mse);
    CHECK(a.gamma == b.gamma);
    CHECK(a.seed == trial_seed(c, 3));
    CHECK(a.correlations.size() == 3);
    for (double r : a.correlations) {
        CHECK(r >= 0.0);
        CHECK(r <= 1.0 + 1e-9);
    }
    CHECK(a.test_mse >= 0.0);
    CHECK(a.diffuseness >= 1.0);
}

TEST_CASE("linear network trials recover kernels")
{
    ExperimentConfig c;
    c.widths = {4, 4};
    c.hidden_activation = Activation::identity();
    c.oversampling = 100;
    c.trials = 1;
    c.seed = 8;
    c.test_size = 500;
    c.gain_samples = 100;
    const auto t = run_trial(c, 0);
    REQUIRE(t.ok());
    for (double r : t.correlations)
        CHECK(r >= 0.99);
    CHECK(t.alpha_cnn == 1.0);
}

TEST_CASE("estimator choice only changes centering")
{
    ExperimentConfig c = small_config();
    c.final_activation = Activation::relu();
    const auto deep = run_trial(c, 1);
    c.estimator = Estimator::NaiveTD;
    const auto naive = run_trial(c, 1);
    REQUIRE(deep.ok());
    REQUIRE(naive.ok());
    // Same sampled network and data.
    CHECK(deep.rejections == naive.rejections);
    CHECK(deep.diffuseness == naive.diffuseness);
    CHECK(deep.alpha_cnn == naive.alpha_cnn);
}

TEST_CASE("experiment aggregation and determinism")
{
    ExperimentConfig c = small_config();
    c.trials = 1;
    const auto one = run_experiment(c);
    REQUIRE(one.successful().size() == 1);
    CHECK(one.layer_correlation(0).mean == one.trials[0].correlations[0]);
    CHECK(one.layer_correlation(0).median == one.trials[0].correlations[0]);
    CHECK(one.layer_correlation(0).stddev == 0.0);
    CHECK(one.metric(&TrialResult::test_mse).mean == one.trials[0].test_mse);

    c.trials = 6;
    const auto serial = run_experiment(c, 1);
    const auto parallel = run_experiment(c, 3);
    CHECK(trials_csv(serial) == trials_csv(parallel));
    CHECK(summary_json(serial) == summary_json(parallel));

    const auto csv = trials_csv(serial);
    CHECK(csv.rfind("trial,seed,layer,correlation,sign_correct,test_mse,gamma,alpha_cnn,diffuseness,rejections\n", 0) ==
          0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 6 * 3);
}

TEST_CASE("summaries")
{
    const std::vector<double> v{4, 1, 3, 2};
    const auto s = summarize(v);
    CHECK(s.mean == 2.5);
    CHECK(s.median == 2.5);
    CHECK(s.stddev == doctest::Approx(std::sqrt(5.0 / 3.0)));
    CHECK(s.count == 4);
    CHECK(summarize(std::vector<double>{}).count == 0);
}

TEST_CASE("config parsing")
{
    const auto c = parse_config(R"({"depth": 3, "width": 4, "oversampling": 10, "seed": 5,
        "hidden_activation": {"kind": "leaky_relu", "slope": 0.2}, "final_activation": "softplus",
        "kernel_distribution": "rademacher", "estimator": "naivetd", "sign_resolution": "oracle",
        "als": {"restarts": 3}})");
    CHECK(c.widths == std::vector<std::size_t>{4, 4, 4});
    CHECK(c.hidden_activation == Activation::leaky_relu(0.2));
    CHECK(c.final_activation == Activation::softplus());
    CHECK(c.kernel_distribution == KernelDistribution::Rademacher);
    CHECK(c.estimator == Estimator::NaiveTD);
    CHECK(c.sign_resolution == SignResolution::Oracle);
    CHECK(c.als.restarts == 3);
    CHECK(c.als.max_iters == 500);
    CHECK(c.sample_size() == 120);
    CHECK(c.input_dim() == 64);

    const auto round = parse_config(config_to_json(c));
    CHECK(config_to_json(round) == config_to_json(c));

    CHECK(parse_config(R"({"widths": [2, 3]})").widths == std::vector<std::size_t>{2, 3});

    CHECK_THROWS_AS(parse_config(R"({"widths": [2, 2], "bogus": 1})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"widths": [2, 2], "als": {"tolerance": 1}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"depth": 2})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"widths": [2, 0]})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"widths": [2], "threshold": 1.5})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"widths": [2], "oversampling": 0})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"widths": [2], "hidden_activation": "tanh"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"widths": [2], "hidden_activation": {"kind": "leaky_relu", "slope": 2}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config("not json"), ConfigError);
    CHECK_THROWS_AS(parse_config("[1, 2]"), ConfigError);
}

TEST_CASE("report files")
{
    ExperimentConfig c = small_config();
    c.trials = 2;
    const auto report = run_experiment(c);
    const auto dir = std::filesystem::temp_directory_path() / "deeptd_report_test";
    std::filesystem::remove_all(dir);
    write_report(report, dir / "nested");
    CHECK(read_file(dir / "nested" / "trials.csv") == trials_csv(report));
    const auto summary = json::parse(read_file(dir / "nested" / "summary.json"));
    CHECK(summary["artifact_version"] == artifact_version);
    CHECK(summary["config"]["seed"] == 77);
    CHECK(summary["trials_completed"] == 2);
    CHECK(summary["correlation"].size() == 3);
    std::filesystem::remove_all(dir);

    // A regular file where the directory should go.
    const auto blocker = std::filesystem::temp_directory_path() / "deeptd_blocker";
    std::ofstream(blocker) << "x";
    try {
        write_report(report, blocker / "sub");
        FAIL("expected an I/O error");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("deeptd_blocker") != std::string::npos);
    }
    std::filesystem::remove(blocker);
}

TEST_CASE("failed trials are reported, not fatal")
{
    ExperimentConfig c = small_config();
    c.trials = 2;
    c.final_activation = Activation::relu();
    c.threshold = 1.0;
    const auto report = run_experiment(c);
    CHECK(report.successful().empty());
    CHECK_FALSE(report.trials[0].ok());
    CHECK(trials_csv(report) ==
          "trial,seed,layer,correlation,sign_correct,test_mse,gamma,alpha_cnn,diffuseness,rejections\n");
    const auto summary = json::parse(summary_json(report));
    CHECK(summary["failures"].size() == 2);
}

TEST_CASE("generated network documents")
{
    const ExperimentConfig c = small_config();
    const auto doc = json::parse(generate_json(c, 2));
    CHECK(doc["seed"] == trial_seed(c, 2));
    CHECK(doc["kernels"].size() == 3);
    CHECK(generate_json(c, 2) == generate_json(c, 2));
}

TEST_CASE("tensor documents")
{
    const auto t = parse_tensor(R"({"shape": [2, 2], "entries": [1, 2, 3, 4]})");
    CHECK(t.at({1, 0}) == 2.0);
    CHECK(parse_tensor(tensor_to_json(t)).data()[3] == 4.0);
    CHECK_THROWS_AS(parse_tensor(R"({"shape": [2, 2], "entries": [1, 2, 3]})"), DimensionError);
    CHECK_THROWS_AS(parse_tensor(R"({"shape": [2, 2]})"), ArgumentError);
    CHECK_THROWS_AS(parse_tensor(R"({"shape": [2], "entries": [1, 2], "extra": 0})"), ArgumentError);
    CHECK_THROWS_AS(parse_tensor("{"), ArgumentError);
}
