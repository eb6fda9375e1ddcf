#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace deeptd {

/// n feature vectors of length p (row-major) with one label each.
class TrainingSet {
public:
    TrainingSet() = default;
    TrainingSet(std::size_t feature_dim, std::vector<double> features, std::vector<double> labels);

    std::size_t size() const noexcept { return labels_.size(); }
    std::size_t feature_dim() const noexcept { return dim_; }

    std::span<const double> x(std::size_t i) const { return {features_.data() + i * dim_, dim_}; }
    double y(std::size_t i) const { return labels_[i]; }

    std::span<const double> features() const noexcept { return features_; }
    std::span<const double> labels() const noexcept { return labels_; }
    std::span<double> labels() noexcept { return labels_; }

private:
    std::size_t dim_ = 0;
    std::vector<double> features_;
    std::vector<double> labels_;
};

/// Mean computed as y_0 + mean(y_i - y_0); exact when all values are equal.
double shifted_mean(std::span<const double> values);

} // namespace deeptd
