#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace xfemp {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

}  // namespace xfemp
