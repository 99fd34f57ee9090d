#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace ptmap {

/// Row-major so that one sample is one contiguous row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixF = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

using Label = std::uint32_t;
using Labels = std::vector<Label>;

}  // namespace ptmap
