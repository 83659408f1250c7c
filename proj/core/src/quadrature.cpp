#include "pcekit/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pcekit/summation.hpp"

namespace pcekit {

Rule1d gauss_1d(PolyFamily family, int n)
{
    if (n < 1) throw std::invalid_argument("quadrature needs at least one point");

    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        jacobi(i, i) = monic_recurrence(family, i).a;
        if (i + 1 < n) {
            const double off = std::sqrt(monic_recurrence(family, i + 1).b);
            jacobi(i, i + 1) = off;
            jacobi(i + 1, i) = off;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("Jacobi matrix eigen-decomposition failed");

    Rule1d rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    // Eigen returns eigenvalues in ascending order; density has unit mass.
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = solver.eigenvalues()(i);
        const double v0 = solver.eigenvectors()(0, i);
        rule.weights[i] = v0 * v0;
    }

    // Both supported densities are symmetric; enforce it exactly.
    for (int i = 0; i < n / 2; ++i) {
        const int j = n - 1 - i;
        const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
        const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
        rule.nodes[i] = -x;
        rule.nodes[j] = x;
        rule.weights[i] = w;
        rule.weights[j] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;

    CompensatedSum total;
    for (double w : rule.weights) total += w;
    const double s = total.value();
    for (double& w : rule.weights) w /= s;
    return rule;
}

QuadratureRule QuadratureRule::tensor_grid(std::vector<PolyFamily> families,
                                           std::vector<int> points_per_dim)
{
    if (families.empty()) throw std::invalid_argument("quadrature dimension must be >= 1");
    if (families.size() != points_per_dim.size())
        throw std::invalid_argument("need one point count per dimension");

    std::size_t total = 1;
    for (int n : points_per_dim) {
        if (n < 1) throw std::invalid_argument("quadrature needs at least one point per dimension");
        if (total > std::numeric_limits<std::size_t>::max() / static_cast<std::size_t>(n) /
                        families.size())
            throw std::overflow_error("tensor grid size overflows");
        total *= static_cast<std::size_t>(n);
    }

    QuadratureRule rule;
    rule.families_ = std::move(families);
    rule.points_per_dim_ = std::move(points_per_dim);
    const std::size_t d = rule.families_.size();
    for (std::size_t i = 0; i < d; ++i)
        rule.rules_1d_.push_back(gauss_1d(rule.families_[i], rule.points_per_dim_[i]));

    rule.nodes_.resize(total * d);
    rule.weights_.resize(total);
    std::vector<int> digit(d, 0);
    for (std::size_t j = 0; j < total; ++j) {
        double w = 1.0;
        for (std::size_t i = 0; i < d; ++i) {
            rule.nodes_[j * d + i] = rule.rules_1d_[i].nodes[digit[i]];
            w *= rule.rules_1d_[i].weights[digit[i]];
        }
        rule.weights_[j] = w;
        for (std::size_t i = d; i-- > 0;) {
            if (++digit[i] < rule.points_per_dim_[i]) break;
            digit[i] = 0;
        }
    }
    return rule;
}

QuadratureRule QuadratureRule::tensor_grid(int dim, PolyFamily family, int points)
{
    if (dim < 1) throw std::invalid_argument("quadrature dimension must be >= 1");
    return tensor_grid(std::vector<PolyFamily>(dim, family), std::vector<int>(dim, points));
}

std::string QuadratureRule::id() const
{
    std::string s;
    for (std::size_t i = 0; i < families_.size(); ++i) {
        if (i) s += 'x';
        s += families_[i] == PolyFamily::HermiteProbabilist ? 'H' : 'L';
        s += std::to_string(points_per_dim_[i]);
    }
    return s;
}

bool QuadratureRule::is_non_nested_with(const QuadratureRule& other) const
{
    if (other.dim() != dim()) return false;
    for (int i = 0; i < dim(); ++i) {
        for (double a : rules_1d_[i].nodes) {
            if (a == 0.0) continue;
            for (double b : other.rules_1d_[i].nodes)
                if (std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a))) return false;
        }
    }
    return true;
}

OrthogonalityReport check_discrete_orthogonality(const PcBasis& basis,
                                                 const QuadratureRule& rule, double tol)
{
    if (basis.dim() != rule.dim())
        throw std::invalid_argument("basis and quadrature dimensions differ");

    const std::size_t nt = basis.size();
    const std::size_t nq = rule.size();
    // psi(j, k) = Psi_k at node j, scaled by sqrt(w_j) so Gram = psi^T psi.
    Eigen::MatrixXd psi(nq, nt);
    std::vector<double> row(nt);
    std::vector<double> scratch(static_cast<std::size_t>(basis.dim()) * (basis.order() + 1));
    for (std::size_t j = 0; j < nq; ++j) {
        basis.eval_into(rule.node(j), row, scratch);
        const double sw = std::sqrt(rule.weight(j));
        for (std::size_t k = 0; k < nt; ++k) psi(j, k) = sw * row[k];
    }
    const Eigen::MatrixXd gram = psi.transpose() * psi;

    OrthogonalityReport report;
    for (std::size_t a = 0; a < nt; ++a)
        for (std::size_t b = 0; b < nt; ++b) {
            const double expected = a == b ? basis.norm_squared(a) : 0.0;
            report.max_deviation = std::max(report.max_deviation, std::abs(gram(a, b) - expected));
        }
    report.passed = report.max_deviation < tol;
    return report;
}

}  // namespace pcekit
