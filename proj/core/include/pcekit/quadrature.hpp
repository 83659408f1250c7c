#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pcekit/basis.hpp"

namespace pcekit {

/// One-dimensional Gauss rule against a probability density.
struct Rule1d {
    std::vector<double> nodes;    // ascending
    std::vector<double> weights;  // positive, sum to 1
};

/// n-point Gauss rule for the family's density, via the eigenproblem of the
/// symmetric tridiagonal Jacobi matrix. Exact for degree <= 2n-1.
Rule1d gauss_1d(PolyFamily family, int n);

/// Full-tensor Gaussian rule in d dimensions.
///
/// Nodes are stored row-major (node j occupies [j*dim, (j+1)*dim)). Grid
/// points are enumerated in odometer order with the last dimension varying
/// fastest; the node-table file protocol depends on this order.
class QuadratureRule {
public:
    static QuadratureRule tensor_grid(std::vector<PolyFamily> families,
                                      std::vector<int> points_per_dim);
    static QuadratureRule tensor_grid(int dim, PolyFamily family, int points);

    int dim() const { return static_cast<int>(families_.size()); }
    std::size_t size() const { return weights_.size(); }
    const std::vector<PolyFamily>& families() const { return families_; }
    const std::vector<int>& points_per_dim() const { return points_per_dim_; }
    std::span<const double> node(std::size_t j) const
    {
        return {nodes_.data() + j * families_.size(), families_.size()};
    }
    double weight(std::size_t j) const { return weights_[j]; }
    const std::vector<double>& weights() const { return weights_; }

    /// Stable identifier, e.g. "H5xH5xH5xH5"; used to bind evaluation
    /// tables to the rule that generated their nodes.
    std::string id() const;

    /// True when every 1D node set shares no point with `other` apart from
    /// the origin. Only meaningful for equal families/dimension.
    bool is_non_nested_with(const QuadratureRule& other) const;

private:
    std::vector<PolyFamily> families_;
    std::vector<int> points_per_dim_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
    std::vector<Rule1d> rules_1d_;
};

struct OrthogonalityReport {
    double max_deviation = 0.0;
    bool passed = false;
};

/// max_{i,j} |sum_q w_q Psi_i Psi_j - delta_ij <Psi_i^2>| over the whole basis.
OrthogonalityReport check_discrete_orthogonality(const PcBasis& basis,
                                                 const QuadratureRule& rule, double tol);

}  // namespace pcekit
