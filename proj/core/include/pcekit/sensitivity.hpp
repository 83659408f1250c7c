#pragma once

#include <Eigen/Core>

#include <string>
#include <utility>
#include <vector>

#include "pcekit/projection.hpp"

namespace pcekit {

/// Variance-based sensitivity indices read off the PC coefficients, one
/// column per output index. Columns with zero variance have `defined` false
/// and NaN indices.
struct SensitivityReport {
    int dim = 0;
    std::vector<std::string> labels;
    Eigen::MatrixXd first;   // d x M
    Eigen::MatrixXd second;  // pairs x M, pairs ordered (0,1),(0,2),..,(d-2,d-1)
    Eigen::MatrixXd total;   // d x M
    Eigen::VectorXd mixed;   // M
    Eigen::VectorXd variance;
    std::vector<bool> defined;

    /// Row of `second` holding the (i, j) interaction, i != j.
    Eigen::Index pair_row(int i, int j) const;
    std::vector<std::pair<int, int>> pairs() const;

    /// Share of variance carried by terms with three or more active inputs:
    /// mixed - sum of second-order indices.
    double higher_order(Eigen::Index m) const;
};

/// First-order, second-order, total and mixed indices per output. The mixed
/// index sums the variance of every term with two or more active inputs.
/// Throws std::logic_error for log-transformed surrogates.
SensitivityReport sobol_indices(const PcSurrogate& surrogate);

/// sobol_indices over a time-labelled surrogate; labels are carried through.
SensitivityReport sensitivity_timeseries(const PcSurrogate& surrogate);

}  // namespace pcekit
