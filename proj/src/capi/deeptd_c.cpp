#include "deeptd/deeptd.h"

#include "deeptd/decomposition.hpp"
#include "deeptd/error.hpp"
#include "deeptd/harness.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <string>

struct dtd_tensor {
    deeptd::DenseTensor value;
};

struct dtd_decomposition {
    deeptd::DecompositionResult value;
};

struct dtd_experiment {
    deeptd::ExperimentConfig config;
    std::optional<deeptd::ExperimentReport> report;
};

namespace {

thread_local std::string last_error;

dtd_status fail(dtd_status status, const char* message)
{
    last_error = message;
    return status;
}

// Maps the exception hierarchy onto status codes.
template <class F>
dtd_status guarded(F&& f) noexcept
{
    try {
        f();
        last_error.clear();
        return DTD_OK;
    } catch (const deeptd::DimensionError& e) {
        return fail(DTD_ERR_DIMENSION, e.what());
    } catch (const deeptd::ArgumentError& e) {
        return fail(DTD_ERR_ARGUMENT, e.what());
    } catch (const deeptd::ConfigError& e) {
        return fail(DTD_ERR_CONFIG, e.what());
    } catch (const deeptd::DegeneracyError& e) {
        return fail(DTD_ERR_DEGENERATE, e.what());
    } catch (const deeptd::IoError& e) {
        return fail(DTD_ERR_IO, e.what());
    } catch (const std::bad_alloc&) {
        return fail(DTD_ERR_RUNTIME, "out of memory");
    } catch (const std::exception& e) {
        return fail(DTD_ERR_RUNTIME, e.what());
    } catch (...) {
        return fail(DTD_ERR_RUNTIME, "unknown error");
    }
}

char* copy_string(const std::string& s)
{
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out)
        throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void require(const void* p, const char* what)
{
    if (!p)
        throw deeptd::ArgumentError(std::string(what) + " must not be NULL");
}

} // namespace

extern "C" {

const char* dtd_version(void)
{
    return deeptd::artifact_version;
}

const char* dtd_last_error(void)
{
    return last_error.c_str();
}

const char* dtd_status_name(dtd_status status)
{
    switch (status) {
    case DTD_OK:
        return "ok";
    case DTD_ERR_DIMENSION:
        return "dimension error";
    case DTD_ERR_ARGUMENT:
        return "argument error";
    case DTD_ERR_CONFIG:
        return "config error";
    case DTD_ERR_DEGENERATE:
        return "degenerate input";
    case DTD_ERR_IO:
        return "i/o error";
    case DTD_ERR_RUNTIME:
        return "runtime error";
    }
    return "unknown status";
}

void dtd_string_free(char* s)
{
    std::free(s);
}

dtd_als_options dtd_als_default_options(void)
{
    const deeptd::AlsOptions d;
    return {d.restarts, d.max_iters, d.rel_tol, d.seed};
}

dtd_status dtd_tensor_create(const size_t* dims, size_t order, const double* entries, size_t count,
                             dtd_tensor** out)
{
    return guarded([&] {
        require(out, "out");
        require(dims, "dims");
        if (count > 0)
            require(entries, "entries");
        deeptd::TensorShape shape(std::vector<std::size_t>(dims, dims + order));
        *out = new dtd_tensor{deeptd::DenseTensor(std::move(shape), std::vector<double>(entries, entries + count))};
    });
}

dtd_status dtd_tensor_from_json(const char* json, dtd_tensor** out)
{
    return guarded([&] {
        require(out, "out");
        require(json, "json");
        *out = new dtd_tensor{deeptd::parse_tensor(json)};
    });
}

void dtd_tensor_destroy(dtd_tensor* t)
{
    delete t;
}

size_t dtd_tensor_order(const dtd_tensor* t)
{
    return t ? t->value.order() : 0;
}

size_t dtd_tensor_dim(const dtd_tensor* t, size_t mode)
{
    return t && mode < t->value.order() ? t->value.shape().dim(mode) : 0;
}

size_t dtd_tensor_size(const dtd_tensor* t)
{
    return t ? t->value.size() : 0;
}

dtd_status dtd_tensor_frobenius_norm(const dtd_tensor* t, double* out)
{
    return guarded([&] {
        require(t, "tensor");
        require(out, "out");
        *out = deeptd::frobenius_norm(t->value);
    });
}

dtd_status dtd_decompose(const dtd_tensor* t, const dtd_als_options* opts, dtd_decomposition** out)
{
    return guarded([&] {
        require(t, "tensor");
        require(out, "out");
        deeptd::AlsOptions o;
        if (opts) {
            o.restarts = opts->restarts;
            o.max_iters = opts->max_iters;
            o.rel_tol = opts->rel_tol;
            o.seed = opts->seed;
        }
        *out = new dtd_decomposition{deeptd::rank1_decompose(t->value, o)};
    });
}

void dtd_decomposition_destroy(dtd_decomposition* d)
{
    delete d;
}

double dtd_decomposition_lambda(const dtd_decomposition* d)
{
    return d ? d->value.lambda : 0.0;
}

int dtd_decomposition_converged(const dtd_decomposition* d)
{
    return d && d->value.converged ? 1 : 0;
}

size_t dtd_decomposition_order(const dtd_decomposition* d)
{
    return d ? d->value.factors.size() : 0;
}

dtd_status dtd_decomposition_factor(const dtd_decomposition* d, size_t mode, double* buf, size_t len)
{
    return guarded([&] {
        require(d, "decomposition");
        require(buf, "buf");
        if (mode >= d->value.factors.size())
            throw deeptd::ArgumentError("factor mode out of range");
        const auto& f = d->value.factors[mode];
        if (len < f.size())
            throw deeptd::DimensionError("buffer of length " + std::to_string(len) + " cannot hold factor of length " +
                                         std::to_string(f.size()));
        std::copy(f.begin(), f.end(), buf);
    });
}

dtd_status dtd_decomposition_residual(const dtd_decomposition* d, const dtd_tensor* t, double* out)
{
    return guarded([&] {
        require(d, "decomposition");
        require(t, "tensor");
        require(out, "out");
        *out = deeptd::rank1_residual(t->value, d->value);
    });
}

dtd_status dtd_decomposition_to_json(const dtd_decomposition* d, char** out)
{
    return guarded([&] {
        require(d, "decomposition");
        require(out, "out");
        *out = copy_string(deeptd::decomposition_to_json(d->value));
    });
}

dtd_status dtd_experiment_create(const char* config_json, dtd_experiment** out)
{
    return guarded([&] {
        require(config_json, "config_json");
        require(out, "out");
        *out = new dtd_experiment{deeptd::parse_config(config_json), std::nullopt};
    });
}

void dtd_experiment_destroy(dtd_experiment* e)
{
    delete e;
}

dtd_status dtd_experiment_run(dtd_experiment* e, unsigned threads)
{
    return guarded([&] {
        require(e, "experiment");
        e->report = deeptd::run_experiment(e->config, threads == 0 ? 1 : threads);
    });
}

size_t dtd_experiment_trials_completed(const dtd_experiment* e)
{
    return e && e->report ? e->report->successful().size() : 0;
}

namespace {

const deeptd::ExperimentReport& report_of(const dtd_experiment* e)
{
    require(e, "experiment");
    if (!e->report)
        throw deeptd::ArgumentError("experiment has not been run");
    return *e->report;
}

} // namespace

dtd_status dtd_experiment_summary_json(const dtd_experiment* e, char** out)
{
    return guarded([&] {
        require(out, "out");
        *out = copy_string(deeptd::summary_json(report_of(e)));
    });
}

dtd_status dtd_experiment_trials_csv(const dtd_experiment* e, char** out)
{
    return guarded([&] {
        require(out, "out");
        *out = copy_string(deeptd::trials_csv(report_of(e)));
    });
}

dtd_status dtd_experiment_write(const dtd_experiment* e, const char* dir)
{
    return guarded([&] {
        require(dir, "dir");
        deeptd::write_report(report_of(e), dir);
    });
}

dtd_status dtd_generate_json(const char* config_json, uint64_t trial, char** out)
{
    return guarded([&] {
        require(config_json, "config_json");
        require(out, "out");
        *out = copy_string(deeptd::generate_json(deeptd::parse_config(config_json), trial));
    });
}

} // extern "C"
