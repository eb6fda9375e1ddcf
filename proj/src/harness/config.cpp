#include "deeptd/harness.hpp"

#include "deeptd/error.hpp"

#include <json.hpp>

#include <set>

namespace deeptd {

using nlohmann::json;

namespace {

const std::set<std::string> config_fields = {
    "depth",     "width",     "widths",  "hidden_activation", "final_activation", "kernel_distribution",
    "oversampling", "trials", "test_size", "threshold",       "seed",             "estimator",
    "sign_resolution", "als", "gain_samples",
};

const std::set<std::string> als_fields = {"restarts", "max_iters", "rel_tol"};

template <class T>
T get_field(const json& doc, const char* key)
{
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field '") + key + "': " + e.what());
    }
}

std::size_t get_count(const json& doc, const char* key)
{
    const json& v = doc.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ConfigError(std::string("config field '") + key + "' must be a non-negative integer");
    return v.get<std::size_t>();
}

Activation parse_activation(const json& v, const char* key)
{
    std::string kind;
    double slope = 0.0;
    if (v.is_string()) {
        kind = v.get<std::string>();
    } else if (v.is_object()) {
        for (const auto& [k, _] : v.items())
            if (k != "kind" && k != "slope")
                throw ConfigError(std::string("unknown field '") + k + "' in " + key);
        kind = get_field<std::string>(v, "kind");
        if (v.contains("slope"))
            slope = get_field<double>(v, "slope");
    } else {
        throw ConfigError(std::string("config field '") + key + "' must be a string or object");
    }
    if (kind == "identity")
        return Activation::identity();
    if (kind == "relu")
        return Activation::relu();
    if (kind == "softplus")
        return Activation::softplus();
    if (kind == "leaky_relu") {
        try {
            return Activation::leaky_relu(slope);
        } catch (const ArgumentError& e) {
            throw ConfigError(std::string(key) + ": " + e.what());
        }
    }
    throw ConfigError(std::string("unknown activation '") + kind + "' in " + key);
}

json activation_json(const Activation& a)
{
    if (a.type() == ActivationType::LeakyRelu)
        return json{{"kind", "leaky_relu"}, {"slope", a.slope()}};
    return a.name();
}

} // namespace

std::size_t ExperimentConfig::sample_size() const
{
    std::size_t total = 0;
    for (std::size_t d : widths)
        total += d;
    return oversampling * total;
}

std::size_t ExperimentConfig::input_dim() const
{
    std::size_t p = 1;
    for (std::size_t d : widths)
        p *= d;
    return p;
}

std::vector<Activation> ExperimentConfig::activations() const
{
    std::vector<Activation> acts(widths.size(), hidden_activation);
    if (!acts.empty())
        acts.back() = final_activation;
    return acts;
}

void ExperimentConfig::validate() const
{
    if (widths.empty())
        throw ConfigError("config: depth must be >= 1");
    for (std::size_t d : widths)
        if (d == 0)
            throw ConfigError("config: kernel widths must be >= 1");
    if (oversampling < 1)
        throw ConfigError("config: oversampling must be >= 1");
    if (trials < 1)
        throw ConfigError("config: trials must be >= 1");
    if (test_size < 1)
        throw ConfigError("config: test_size must be >= 1");
    if (gain_samples < 1)
        throw ConfigError("config: gain_samples must be >= 1");
    if (!(threshold >= 0.0 && threshold <= 1.0))
        throw ConfigError("config: threshold must lie in [0, 1]");
    if (sample_size() < 2)
        throw ConfigError("config: training size N * sum(d) must be >= 2");
    try {
        als.validate();
    } catch (const ArgumentError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

ExperimentConfig parse_config(std::string_view json_text)
{
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object())
        throw ConfigError("config must be a JSON object");
    for (const auto& [key, _] : doc.items())
        if (!config_fields.contains(key))
            throw ConfigError("unknown config field '" + key + "'");

    ExperimentConfig cfg;
    if (doc.contains("widths")) {
        const json& w = doc.at("widths");
        if (!w.is_array())
            throw ConfigError("config field 'widths' must be an array");
        for (const auto& v : w) {
            if (!v.is_number_integer() || v.get<long long>() < 1)
                throw ConfigError("config field 'widths' must hold positive integers");
            cfg.widths.push_back(v.get<std::size_t>());
        }
        if (doc.contains("width"))
            throw ConfigError("config: give either 'width' or 'widths', not both");
        if (doc.contains("depth") && get_count(doc, "depth") != cfg.widths.size())
            throw ConfigError("config: 'depth' does not match the length of 'widths'");
    } else {
        if (!doc.contains("depth") || !doc.contains("width"))
            throw ConfigError("config needs 'widths' or both 'depth' and 'width'");
        cfg.widths.assign(get_count(doc, "depth"), get_count(doc, "width"));
    }

    if (doc.contains("hidden_activation"))
        cfg.hidden_activation = parse_activation(doc.at("hidden_activation"), "hidden_activation");
    if (doc.contains("final_activation"))
        cfg.final_activation = parse_activation(doc.at("final_activation"), "final_activation");
    if (doc.contains("kernel_distribution")) {
        const auto s = get_field<std::string>(doc, "kernel_distribution");
        if (s == "gaussian")
            cfg.kernel_distribution = KernelDistribution::Gaussian;
        else if (s == "rademacher")
            cfg.kernel_distribution = KernelDistribution::Rademacher;
        else
            throw ConfigError("unknown kernel_distribution '" + s + "'");
    }
    if (doc.contains("oversampling"))
        cfg.oversampling = get_count(doc, "oversampling");
    if (doc.contains("trials"))
        cfg.trials = get_count(doc, "trials");
    if (doc.contains("test_size"))
        cfg.test_size = get_count(doc, "test_size");
    if (doc.contains("gain_samples"))
        cfg.gain_samples = get_count(doc, "gain_samples");
    if (doc.contains("threshold"))
        cfg.threshold = get_field<double>(doc, "threshold");
    if (doc.contains("seed")) {
        const json& s = doc.at("seed");
        if (!s.is_number_integer())
            throw ConfigError("config field 'seed' must be an integer");
        cfg.seed = s.is_number_unsigned() ? s.get<std::uint64_t>()
                                          : static_cast<std::uint64_t>(s.get<std::int64_t>());
    }
    if (doc.contains("estimator")) {
        const auto s = get_field<std::string>(doc, "estimator");
        if (s == "deeptd")
            cfg.estimator = Estimator::DeepTD;
        else if (s == "naivetd")
            cfg.estimator = Estimator::NaiveTD;
        else
            throw ConfigError("unknown estimator '" + s + "'");
    }
    if (doc.contains("sign_resolution")) {
        const auto s = get_field<std::string>(doc, "sign_resolution");
        if (s == "greedy")
            cfg.sign_resolution = SignResolution::Greedy;
        else if (s == "oracle")
            cfg.sign_resolution = SignResolution::Oracle;
        else
            throw ConfigError("unknown sign_resolution '" + s + "'");
    }
    if (doc.contains("als")) {
        const json& a = doc.at("als");
        if (!a.is_object())
            throw ConfigError("config field 'als' must be an object");
        for (const auto& [key, _] : a.items())
            if (!als_fields.contains(key))
                throw ConfigError("unknown config field 'als." + key + "'");
        if (a.contains("restarts"))
            cfg.als.restarts = get_field<int>(a, "restarts");
        if (a.contains("max_iters"))
            cfg.als.max_iters = get_field<int>(a, "max_iters");
        if (a.contains("rel_tol"))
            cfg.als.rel_tol = get_field<double>(a, "rel_tol");
    }
    cfg.validate();
    return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg, int indent)
{
    json doc;
    doc["depth"] = cfg.depth();
    doc["widths"] = cfg.widths;
    doc["hidden_activation"] = activation_json(cfg.hidden_activation);
    doc["final_activation"] = activation_json(cfg.final_activation);
    doc["kernel_distribution"] = cfg.kernel_distribution == KernelDistribution::Gaussian ? "gaussian" : "rademacher";
    doc["oversampling"] = cfg.oversampling;
    doc["trials"] = cfg.trials;
    doc["test_size"] = cfg.test_size;
    doc["threshold"] = cfg.threshold;
    doc["seed"] = cfg.seed;
    doc["estimator"] = cfg.estimator == Estimator::DeepTD ? "deeptd" : "naivetd";
    doc["sign_resolution"] = cfg.sign_resolution == SignResolution::Greedy ? "greedy" : "oracle";
    doc["als"] = {{"restarts", cfg.als.restarts}, {"max_iters", cfg.als.max_iters}, {"rel_tol", cfg.als.rel_tol}};
    doc["gain_samples"] = cfg.gain_samples;
    return doc.dump(indent);
}

DenseTensor parse_tensor(std::string_view json_text)
{
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ArgumentError(std::string("tensor document is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("shape") || !doc.contains("entries"))
        throw ArgumentError("tensor document needs 'shape' and 'entries'");
    for (const auto& [key, _] : doc.items())
        if (key != "shape" && key != "entries")
            throw ArgumentError("unknown tensor field '" + key + "'");
    std::vector<std::size_t> dims;
    std::vector<double> entries;
    try {
        dims = doc.at("shape").get<std::vector<std::size_t>>();
        entries = doc.at("entries").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw ArgumentError(std::string("malformed tensor document: ") + e.what());
    }
    return DenseTensor(TensorShape(std::move(dims)), std::move(entries));
}

std::string tensor_to_json(const DenseTensor& t)
{
    json doc;
    doc["shape"] = t.shape().dims();
    doc["entries"] = vectorize(t);
    return doc.dump();
}

std::string decomposition_to_json(const DecompositionResult& r, int indent)
{
    json doc;
    doc["lambda"] = r.lambda;
    doc["factors"] = r.factors;
    doc["converged"] = r.converged;
    doc["restarts_used"] = r.restarts_used;
    doc["iterations"] = r.objective_history.size();
    return doc.dump(indent);
}

} // namespace deeptd
