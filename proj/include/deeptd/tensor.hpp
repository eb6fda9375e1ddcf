#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace deeptd {

/// Mode sizes (d_1, ..., d_D) of a D-way tensor.
class TensorShape {
public:
    TensorShape() = default;
    explicit TensorShape(std::vector<std::size_t> dims);

    std::size_t order() const noexcept { return dims_.size(); }
    std::size_t dim(std::size_t mode) const { return dims_.at(mode); }
    std::size_t total() const noexcept { return total_; }
    const std::vector<std::size_t>& dims() const noexcept { return dims_; }

    /// Linear position of a 0-based multi-index; mode 0 varies fastest.
    std::size_t linear_index(std::span<const std::size_t> index) const;
    /// Inverse of linear_index (mixed-radix digits of `linear`).
    std::vector<std::size_t> multi_index(std::size_t linear) const;

    friend bool operator==(const TensorShape&, const TensorShape&) = default;

private:
    std::vector<std::size_t> dims_;
    std::size_t total_ = 0;
};

/// Dense real tensor stored in canonical order (mode 0 fastest).
class DenseTensor {
public:
    DenseTensor() = default;
    /// Zero tensor.
    explicit DenseTensor(TensorShape shape);
    DenseTensor(TensorShape shape, std::vector<double> entries);

    const TensorShape& shape() const noexcept { return shape_; }
    std::size_t order() const noexcept { return shape_.order(); }
    std::size_t size() const noexcept { return data_.size(); }

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    double operator[](std::size_t linear) const { return data_[linear]; }
    double& operator[](std::size_t linear) { return data_[linear]; }

    double at(std::span<const std::size_t> index) const { return data_[shape_.linear_index(index)]; }
    double& at(std::span<const std::size_t> index) { return data_[shape_.linear_index(index)]; }
    double at(std::initializer_list<std::size_t> index) const
    {
        return at(std::span<const std::size_t>(index.begin(), index.size()));
    }

    DenseTensor& operator+=(const DenseTensor& other);
    DenseTensor& operator-=(const DenseTensor& other);
    DenseTensor& operator*=(double factor);

private:
    TensorShape shape_;
    std::vector<double> data_;
};

DenseTensor operator+(DenseTensor lhs, const DenseTensor& rhs);
DenseTensor operator-(DenseTensor lhs, const DenseTensor& rhs);
DenseTensor operator*(double factor, DenseTensor t);

/// Reshapes x into a tensor whose mode-l index is the l-th mixed-radix digit
/// (base d_l, least significant first) of the coordinate. Because storage is
/// mode-0-fastest this is an ordered copy.
DenseTensor tensorize(std::span<const double> x, const TensorShape& shape);

std::vector<double> vectorize(const DenseTensor& t);

/// Rank-one tensor v_1 (x) v_2 (x) ... (x) v_D.
DenseTensor outer_product(std::span<const std::vector<double>> factors);

double inner_product(const DenseTensor& a, const DenseTensor& b);

double frobenius_norm(const DenseTensor& t);

/// Contracts every mode except `mode` (0-based) against `factors`. The result
/// w satisfies <w, v> = <T, outer(factors with factors[mode] = v)>.
std::vector<double> contract_all_but(const DenseTensor& t,
                                     std::span<const std::vector<double>> factors,
                                     std::size_t mode);

/// <T, outer(factors)>.
double multilinear_form(const DenseTensor& t, std::span<const std::vector<double>> factors);

// Small vector helpers shared across modules.
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

} // namespace deeptd
