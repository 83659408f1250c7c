#include "pcekit/sensitivity.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "pcekit/summation.hpp"

namespace pcekit {

Eigen::Index SensitivityReport::pair_row(int i, int j) const
{
    if (i == j || i < 0 || j < 0 || i >= dim || j >= dim)
        throw std::out_of_range("invalid input pair");
    if (i > j) std::swap(i, j);
    // Rows before i: sum_{r<i} (d-1-r).
    return static_cast<Eigen::Index>(i * (2 * dim - i - 1) / 2 + (j - i - 1));
}

std::vector<std::pair<int, int>> SensitivityReport::pairs() const
{
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j) out.emplace_back(i, j);
    return out;
}

double SensitivityReport::higher_order(Eigen::Index m) const
{
    return mixed(m) - second.col(m).sum();
}

SensitivityReport sobol_indices(const PcSurrogate& surrogate)
{
    if (surrogate.log_transformed())
        throw std::logic_error("sensitivity indices of a log-transformed surrogate describe log X, "
                               "not X; project the quantity directly");

    const PcBasis& basis = surrogate.basis();
    const int d = basis.dim();
    const Eigen::Index nm = surrogate.num_outputs();
    const Eigen::Index npairs = d * (d - 1) / 2;

    SensitivityReport r;
    r.dim = d;
    r.labels = surrogate.labels();
    r.first = Eigen::MatrixXd::Zero(d, nm);
    r.second = Eigen::MatrixXd::Zero(npairs, nm);
    r.total = Eigen::MatrixXd::Zero(d, nm);
    r.mixed = Eigen::VectorXd::Zero(nm);
    r.variance = Eigen::VectorXd::Zero(nm);
    r.defined.assign(static_cast<std::size_t>(nm), true);

    const auto& c = surrogate.coeffs();
    std::vector<int> active;
    for (Eigen::Index m = 0; m < nm; ++m) {
        std::vector<CompensatedSum> first(d), total(d), second(static_cast<std::size_t>(npairs));
        CompensatedSum mixed, var;
        for (std::size_t k = 1; k < basis.size(); ++k) {
            const double contrib = c(static_cast<Eigen::Index>(k), m) *
                                   c(static_cast<Eigen::Index>(k), m) * basis.norm_squared(k);
            var += contrib;
            active.clear();
            const auto& a = basis.term(k).orders;
            for (int i = 0; i < d; ++i)
                if (a[i] != 0) active.push_back(i);
            for (int i : active) total[i] += contrib;
            if (active.size() == 1) {
                first[active[0]] += contrib;
            } else {
                mixed += contrib;
                if (active.size() == 2) second[r.pair_row(active[0], active[1])] += contrib;
            }
        }

        const double v = var.value();
        r.variance(m) = v;
        if (!(v > 0.0)) {
            r.defined[m] = false;
            const double nan = std::numeric_limits<double>::quiet_NaN();
            r.first.col(m).setConstant(nan);
            r.second.col(m).setConstant(nan);
            r.total.col(m).setConstant(nan);
            r.mixed(m) = nan;
            continue;
        }
        for (int i = 0; i < d; ++i) {
            r.first(i, m) = first[i].value() / v;
            r.total(i, m) = total[i].value() / v;
        }
        for (Eigen::Index p = 0; p < npairs; ++p) r.second(p, m) = second[p].value() / v;
        r.mixed(m) = mixed.value() / v;
    }
    return r;
}

SensitivityReport sensitivity_timeseries(const PcSurrogate& surrogate)
{
    return sobol_indices(surrogate);
}

}  // namespace pcekit
