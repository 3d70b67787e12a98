#pragma once

#include <Eigen/Core>

namespace safelight::nn {

// Row-major so that a batch matrix row is one sample and checkpoints can dump
// parameter storage directly.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

inline bool all_finite(const Matrix& m) { return m.allFinite(); }
inline bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace safelight::nn
