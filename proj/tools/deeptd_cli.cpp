// Command-line front end. Talks to the library only through the C API.

#include "deeptd/deeptd.h"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_runtime = 3;

int exit_code_for(dtd_status s)
{
    switch (s) {
    case DTD_OK:
        return exit_ok;
    case DTD_ERR_CONFIG:
    case DTD_ERR_ARGUMENT:
    case DTD_ERR_DIMENSION:
        return exit_config;
    default:
        return exit_runtime;
    }
}

int report(dtd_status s, const std::string& context)
{
    std::cerr << "deeptd: " << context << ": " << dtd_status_name(s) << ": " << dtd_last_error() << "\n";
    return exit_code_for(s);
}

std::optional<std::string> read_file(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        return std::nullopt;
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct StringDeleter {
    void operator()(char* s) const { dtd_string_free(s); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;

int run_experiment(const std::string& config_path, const std::string& out_dir, unsigned threads)
{
    const auto text = read_file(config_path);
    if (!text) {
        std::cerr << "deeptd: cannot read config file " << config_path << "\n";
        return exit_config;
    }
    dtd_experiment* raw = nullptr;
    if (auto s = dtd_experiment_create(text->c_str(), &raw); s != DTD_OK)
        return report(s, config_path);
    std::unique_ptr<dtd_experiment, decltype(&dtd_experiment_destroy)> exp(raw, dtd_experiment_destroy);

    if (auto s = dtd_experiment_run(exp.get(), threads); s != DTD_OK)
        return report(s, "experiment");
    if (auto s = dtd_experiment_write(exp.get(), out_dir.c_str()); s != DTD_OK)
        return report(s, out_dir);
    std::cout << "completed " << dtd_experiment_trials_completed(exp.get()) << " trials; wrote " << out_dir
              << "/summary.json and " << out_dir << "/trials.csv\n";
    return exit_ok;
}

int run_decompose(const std::string& tensor_path, const dtd_als_options& opts)
{
    const auto text = read_file(tensor_path);
    if (!text) {
        std::cerr << "deeptd: cannot read tensor file " << tensor_path << "\n";
        return exit_config;
    }
    dtd_tensor* raw_t = nullptr;
    if (auto s = dtd_tensor_from_json(text->c_str(), &raw_t); s != DTD_OK)
        return report(s, tensor_path);
    std::unique_ptr<dtd_tensor, decltype(&dtd_tensor_destroy)> tensor(raw_t, dtd_tensor_destroy);

    dtd_decomposition* raw_d = nullptr;
    if (auto s = dtd_decompose(tensor.get(), &opts, &raw_d); s != DTD_OK)
        return report(s, "decompose");
    std::unique_ptr<dtd_decomposition, decltype(&dtd_decomposition_destroy)> dec(raw_d, dtd_decomposition_destroy);

    char* json = nullptr;
    if (auto s = dtd_decomposition_to_json(dec.get(), &json); s != DTD_OK)
        return report(s, "decompose");
    OwnedString owned(json);
    std::cout << owned.get() << "\n";
    return exit_ok;
}

int run_generate(const std::string& config_path, const std::string& out_path, std::uint64_t trial)
{
    const auto text = read_file(config_path);
    if (!text) {
        std::cerr << "deeptd: cannot read config file " << config_path << "\n";
        return exit_config;
    }
    char* json = nullptr;
    if (auto s = dtd_generate_json(text->c_str(), trial, &json); s != DTD_OK)
        return report(s, config_path);
    OwnedString owned(json);
    std::ofstream f(out_path, std::ios::binary);
    if (!f || !(f << owned.get())) {
        std::cerr << "deeptd: cannot write " << out_path << "\n";
        return exit_runtime;
    }
    return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Learn deep non-overlapping CNN kernels by rank-one tensor decomposition"};
    app.set_version_flag("--version", std::string(dtd_version()));
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    unsigned threads = 1;
    auto* experiment = app.add_subcommand("experiment", "Run a batch of synthetic trials");
    experiment->add_option("--config", config_path, "Experiment config (JSON)")->required();
    experiment->add_option("--out", out_path, "Output directory")->required();
    experiment->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

    std::string tensor_path;
    dtd_als_options als = dtd_als_default_options();
    auto* decompose = app.add_subcommand("decompose", "Best rank-one approximation of a stored tensor");
    decompose->add_option("--tensor", tensor_path, "Tensor document (JSON)")->required();
    decompose->add_option("--restarts", als.restarts, "Random restarts");
    decompose->add_option("--max-iters", als.max_iters, "Iterations per restart");
    decompose->add_option("--tol", als.rel_tol, "Relative objective tolerance");
    decompose->add_option("--seed", als.seed, "Initialization seed");

    std::uint64_t trial = 0;
    auto* generate = app.add_subcommand("generate", "Dump one trial's network and training set as JSON");
    generate->add_option("--config", config_path, "Experiment config (JSON)")->required();
    generate->add_option("--out", out_path, "Output file")->required();
    generate->add_option("--trial", trial, "Trial index whose seed is used");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    if (experiment->parsed())
        return run_experiment(config_path, out_path, threads);
    if (decompose->parsed())
        return run_decompose(tensor_path, als);
    return run_generate(config_path, out_path, trial);
}
