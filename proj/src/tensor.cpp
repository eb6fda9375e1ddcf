#include "deeptd/tensor.hpp"

#include "deeptd/error.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace deeptd {

namespace {

void require_same_shape(const TensorShape& a, const TensorShape& b, const char* what)
{
    if (a != b)
        throw DimensionError(std::string(what) + ": tensor shapes differ");
}

// Kronecker product of factors[first, last) in canonical order, i.e. the
// vectorized outer product of that run of modes.
std::vector<double> kron_weights(std::span<const std::vector<double>> factors,
                                 std::size_t first, std::size_t last)
{
    std::vector<double> w{1.0};
    for (std::size_t m = first; m < last; ++m) {
        const auto& v = factors[m];
        std::vector<double> next(w.size() * v.size());
        for (std::size_t j = 0; j < v.size(); ++j)
            for (std::size_t i = 0; i < w.size(); ++i)
                next[i + w.size() * j] = w[i] * v[j];
        w = std::move(next);
    }
    return w;
}

void require_conforming(const TensorShape& shape, std::span<const std::vector<double>> factors)
{
    if (factors.size() != shape.order())
        throw DimensionError("factor count " + std::to_string(factors.size()) +
                             " does not match tensor order " + std::to_string(shape.order()));
    for (std::size_t m = 0; m < factors.size(); ++m)
        if (factors[m].size() != shape.dim(m))
            throw DimensionError("factor " + std::to_string(m) + " has length " +
                                 std::to_string(factors[m].size()) + ", expected " +
                                 std::to_string(shape.dim(m)));
}

} // namespace

TensorShape::TensorShape(std::vector<std::size_t> dims)
    : dims_(std::move(dims))
{
    if (dims_.empty())
        throw ArgumentError("tensor shape needs at least one mode");
    total_ = 1;
    for (std::size_t d : dims_) {
        if (d == 0)
            throw ArgumentError("tensor mode sizes must be positive");
        total_ *= d;
    }
}

std::size_t TensorShape::linear_index(std::span<const std::size_t> index) const
{
    if (index.size() != dims_.size())
        throw DimensionError("multi-index has wrong number of modes");
    std::size_t linear = 0;
    std::size_t stride = 1;
    for (std::size_t m = 0; m < dims_.size(); ++m) {
        if (index[m] >= dims_[m])
            throw DimensionError("multi-index out of range in mode " + std::to_string(m));
        linear += stride * index[m];
        stride *= dims_[m];
    }
    return linear;
}

std::vector<std::size_t> TensorShape::multi_index(std::size_t linear) const
{
    if (linear >= total_)
        throw DimensionError("linear index out of range");
    std::vector<std::size_t> index(dims_.size());
    for (std::size_t m = 0; m < dims_.size(); ++m) {
        index[m] = linear % dims_[m];
        linear /= dims_[m];
    }
    return index;
}

DenseTensor::DenseTensor(TensorShape shape)
    : shape_(std::move(shape))
    , data_(shape_.total(), 0.0)
{
}

DenseTensor::DenseTensor(TensorShape shape, std::vector<double> entries)
    : shape_(std::move(shape))
    , data_(std::move(entries))
{
    if (data_.size() != shape_.total())
        throw DimensionError("entry count " + std::to_string(data_.size()) +
                             " does not match shape total " + std::to_string(shape_.total()));
}

DenseTensor& DenseTensor::operator+=(const DenseTensor& other)
{
    require_same_shape(shape_, other.shape_, "tensor addition");
    for (std::size_t i = 0; i < data_.size(); ++i)
        data_[i] += other.data_[i];
    return *this;
}

DenseTensor& DenseTensor::operator-=(const DenseTensor& other)
{
    require_same_shape(shape_, other.shape_, "tensor subtraction");
    for (std::size_t i = 0; i < data_.size(); ++i)
        data_[i] -= other.data_[i];
    return *this;
}

DenseTensor& DenseTensor::operator*=(double factor)
{
    for (double& v : data_)
        v *= factor;
    return *this;
}

DenseTensor operator+(DenseTensor lhs, const DenseTensor& rhs) { return lhs += rhs; }
DenseTensor operator-(DenseTensor lhs, const DenseTensor& rhs) { return lhs -= rhs; }
DenseTensor operator*(double factor, DenseTensor t) { return t *= factor; }

DenseTensor tensorize(std::span<const double> x, const TensorShape& shape)
{
    if (x.size() != shape.total())
        throw DimensionError("tensorize: vector length " + std::to_string(x.size()) +
                             " does not match shape total " + std::to_string(shape.total()));
    return DenseTensor(shape, std::vector<double>(x.begin(), x.end()));
}

std::vector<double> vectorize(const DenseTensor& t)
{
    return {t.data().begin(), t.data().end()};
}

DenseTensor outer_product(std::span<const std::vector<double>> factors)
{
    if (factors.empty())
        throw ArgumentError("outer_product: empty factor list");
    std::vector<std::size_t> dims;
    dims.reserve(factors.size());
    for (const auto& f : factors)
        dims.push_back(f.size());
    TensorShape shape(std::move(dims));
    return DenseTensor(std::move(shape), kron_weights(factors, 0, factors.size()));
}

double inner_product(const DenseTensor& a, const DenseTensor& b)
{
    require_same_shape(a.shape(), b.shape(), "inner_product");
    return dot(a.data(), b.data());
}

double frobenius_norm(const DenseTensor& t)
{
    return norm2(t.data());
}

std::vector<double> contract_all_but(const DenseTensor& t,
                                     std::span<const std::vector<double>> factors,
                                     std::size_t mode)
{
    const TensorShape& shape = t.shape();
    if (mode >= shape.order())
        throw ArgumentError("contract_all_but: mode " + std::to_string(mode) +
                            " out of range for order " + std::to_string(shape.order()));
    require_conforming(shape, factors);

    // View T as [before][d_mode][after] with `before` fastest.
    const std::vector<double> prefix = kron_weights(factors, 0, mode);
    const std::vector<double> suffix = kron_weights(factors, mode + 1, shape.order());
    const std::size_t before = prefix.size();
    const std::size_t dm = shape.dim(mode);
    const auto data = t.data();

    std::vector<double> w(dm, 0.0);
    for (std::size_t k = 0; k < suffix.size(); ++k) {
        const double sk = suffix[k];
        for (std::size_t j = 0; j < dm; ++j) {
            const double* slab = data.data() + before * (j + dm * k);
            double acc = 0.0;
            for (std::size_t i = 0; i < before; ++i)
                acc += slab[i] * prefix[i];
            w[j] += sk * acc;
        }
    }
    return w;
}

double multilinear_form(const DenseTensor& t, std::span<const std::vector<double>> factors)
{
    require_conforming(t.shape(), factors);
    return dot(t.data(), kron_weights(factors, 0, factors.size()));
}

double dot(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size())
        throw DimensionError("dot: length mismatch");
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2(std::span<const double> a)
{
    double s = 0.0;
    for (double v : a)
        s += v * v;
    return std::sqrt(s);
}

} // namespace deeptd
