#include "deeptd/dataset.hpp"

#include "deeptd/error.hpp"

#include <string>

namespace deeptd {

TrainingSet::TrainingSet(std::size_t feature_dim, std::vector<double> features, std::vector<double> labels)
    : dim_(feature_dim)
    , features_(std::move(features))
    , labels_(std::move(labels))
{
    if (features_.size() != dim_ * labels_.size())
        throw DimensionError("training set: " + std::to_string(features_.size()) +
                             " feature values for " + std::to_string(labels_.size()) +
                             " labels of dimension " + std::to_string(dim_));
}

double shifted_mean(std::span<const double> values)
{
    if (values.empty())
        throw ArgumentError("mean of an empty sequence");
    const double anchor = values.front();
    double acc = 0.0;
    for (double v : values)
        acc += v - anchor;
    return anchor + acc / static_cast<double>(values.size());
}

} // namespace deeptd
