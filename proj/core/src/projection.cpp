#include "pcekit/projection.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pcekit/summation.hpp"

namespace pcekit {

EvaluationTable::EvaluationTable(const QuadratureRule& rule, Eigen::MatrixXd outputs,
                                 std::vector<std::string> labels)
    : rule_id_(rule.id()), outputs_(std::move(outputs)), labels_(std::move(labels))
{
    if (static_cast<std::size_t>(outputs_.rows()) != rule.size())
        throw std::invalid_argument("evaluation table has " + std::to_string(outputs_.rows()) +
                                    " rows but rule " + rule_id_ + " has " +
                                    std::to_string(rule.size()) + " nodes");
    if (static_cast<Eigen::Index>(labels_.size()) != outputs_.cols())
        throw std::invalid_argument("evaluation table label count does not match output count");
    for (Eigen::Index m = 0; m < outputs_.cols(); ++m)
        for (Eigen::Index j = 0; j < outputs_.rows(); ++j)
            if (!std::isfinite(outputs_(j, m)))
                throw std::invalid_argument("non-finite output at node " + std::to_string(j) +
                                            ", output '" + labels_[m] + "'");
}

PcSurrogate::PcSurrogate(PcBasis basis, Eigen::MatrixXd coeffs, bool log_transformed,
                         std::vector<std::string> labels)
    : basis_(std::move(basis)), coeffs_(std::move(coeffs)), log_transformed_(log_transformed),
      labels_(std::move(labels))
{
    if (static_cast<std::size_t>(coeffs_.rows()) != basis_.size())
        throw std::invalid_argument("coefficient rows do not match basis size");
    if (static_cast<Eigen::Index>(labels_.size()) != coeffs_.cols())
        throw std::invalid_argument("label count does not match coefficient columns");
}

void PcSurrogate::series_from_basis(std::span<const double> psi, std::span<double> out) const
{
    const Eigen::Map<const Eigen::VectorXd> p(psi.data(), static_cast<Eigen::Index>(psi.size()));
    for (Eigen::Index m = 0; m < coeffs_.cols(); ++m) out[m] = coeffs_.col(m).dot(p);
}

std::vector<double> PcSurrogate::evaluate(std::span<const double> point) const
{
    const std::vector<double> psi = basis_.eval(point);
    std::vector<double> out(static_cast<std::size_t>(coeffs_.cols()));
    series_from_basis(psi, out);
    if (log_transformed_)
        for (double& v : out) v = std::exp(v);
    return out;
}

PcSurrogate project(const EvaluationTable& table, const QuadratureRule& rule,
                    const PcBasis& basis, bool log_transform, std::vector<std::string>* warnings)
{
    if (table.rule_id() != rule.id())
        throw std::invalid_argument("evaluation table was built on rule " + table.rule_id() +
                                    ", not " + rule.id());
    if (basis.dim() != rule.dim())
        throw std::invalid_argument("basis and quadrature dimensions differ");

    const Eigen::Index nq = table.rows();
    const Eigen::Index nm = table.num_outputs();
    const auto nt = static_cast<Eigen::Index>(basis.size());

    Eigen::MatrixXd y = table.outputs();
    if (log_transform) {
        for (Eigen::Index m = 0; m < nm; ++m)
            for (Eigen::Index j = 0; j < nq; ++j) {
                if (!(y(j, m) > 0.0)) {
                    std::ostringstream msg;
                    msg << "log projection needs positive outputs; node " << j << ", output '"
                        << table.labels()[m] << "' has " << y(j, m);
                    throw std::invalid_argument(msg.str());
                }
                y(j, m) = std::log(y(j, m));
            }
    }

    if (warnings) {
        const auto report = check_discrete_orthogonality(basis, rule, 1e-10);
        if (!report.passed) {
            std::ostringstream msg;
            msg << "quadrature rule " << rule.id() << " does not preserve discrete orthogonality "
                << "of the order-" << basis.order() << " basis (max deviation "
                << report.max_deviation << ")";
            warnings->push_back(msg.str());
        }
    }

    // w_j * Psi_k(xi_j), node-major.
    Eigen::MatrixXd wpsi(nq, nt);
    std::vector<double> row(static_cast<std::size_t>(nt));
    std::vector<double> scratch(static_cast<std::size_t>(basis.dim()) * (basis.order() + 1));
    for (Eigen::Index j = 0; j < nq; ++j) {
        basis.eval_into(rule.node(static_cast<std::size_t>(j)), row, scratch);
        for (Eigen::Index k = 0; k < nt; ++k) wpsi(j, k) = rule.weight(j) * row[k];
    }

    Eigen::MatrixXd coeffs(nt, nm);
    for (Eigen::Index m = 0; m < nm; ++m) {
        for (Eigen::Index k = 0; k < nt; ++k) {
            CompensatedSum s;
            for (Eigen::Index j = 0; j < nq; ++j) s += wpsi(j, k) * y(j, m);
            coeffs(k, m) = s.value() / basis.norm_squared(static_cast<std::size_t>(k));
        }
    }
    return PcSurrogate(basis, std::move(coeffs), log_transform, table.labels());
}

RelativeL2Error relative_l2_error(const PcSurrogate& surrogate, const EvaluationTable& validation,
                                  const QuadratureRule& validation_rule)
{
    if (validation.rule_id() != validation_rule.id())
        throw std::invalid_argument("validation table was built on rule " + validation.rule_id() +
                                    ", not " + validation_rule.id());
    if (validation_rule.dim() != surrogate.basis().dim())
        throw std::invalid_argument("validation rule dimension does not match surrogate basis");
    if (validation.num_outputs() != surrogate.num_outputs())
        throw std::invalid_argument("validation table output count does not match surrogate");

    const Eigen::Index nm = surrogate.num_outputs();
    const std::size_t nq = validation_rule.size();
    std::vector<CompensatedSum> num_native(nm), den_native(nm), num_phys(nm), den_phys(nm);

    const PcBasis& basis = surrogate.basis();
    std::vector<double> psi(basis.size());
    std::vector<double> scratch(static_cast<std::size_t>(basis.dim()) * (basis.order() + 1));
    std::vector<double> series(static_cast<std::size_t>(nm));
    for (std::size_t j = 0; j < nq; ++j) {
        basis.eval_into(validation_rule.node(j), psi, scratch);
        surrogate.series_from_basis(psi, series);
        const double w = validation_rule.weight(j);
        for (Eigen::Index m = 0; m < nm; ++m) {
            const double x = validation.outputs()(static_cast<Eigen::Index>(j), m);
            if (surrogate.log_transformed()) {
                if (!(x > 0.0))
                    throw std::invalid_argument("log-space validation needs positive outputs");
                const double lx = std::log(x);
                num_native[m] += w * (lx - series[m]) * (lx - series[m]);
                den_native[m] += w * lx * lx;
                const double ex = std::exp(series[m]);
                num_phys[m] += w * (x - ex) * (x - ex);
                den_phys[m] += w * x * x;
            } else {
                num_native[m] += w * (x - series[m]) * (x - series[m]);
                den_native[m] += w * x * x;
            }
        }
    }

    RelativeL2Error err;
    err.native.resize(nm);
    err.physical.resize(nm);
    for (Eigen::Index m = 0; m < nm; ++m) {
        const double dn = den_native[m].value();
        if (!(dn > 0.0))
            throw std::domain_error("relative L2 error undefined: validation output '" +
                                    validation.labels()[m] + "' is identically zero");
        err.native[m] = std::sqrt(num_native[m].value() / dn);
        err.physical[m] = surrogate.log_transformed()
                              ? std::sqrt(num_phys[m].value() / den_phys[m].value())
                              : err.native[m];
    }
    return err;
}

Moments moments(const PcSurrogate& surrogate)
{
    if (surrogate.log_transformed())
        throw std::logic_error("moments of a log-transformed surrogate are not available in "
                               "closed form; estimate them by sampling");
    const Eigen::Index nm = surrogate.num_outputs();
    const auto& c = surrogate.coeffs();
    Moments mom;
    mom.mean.resize(nm);
    mom.variance.resize(nm);
    for (Eigen::Index m = 0; m < nm; ++m) {
        mom.mean[m] = c(0, m);
        CompensatedSum v;
        for (Eigen::Index k = 1; k < c.rows(); ++k)
            v += c(k, m) * c(k, m) * surrogate.basis().norm_squared(static_cast<std::size_t>(k));
        mom.variance[m] = v.value();
    }
    return mom;
}

}  // namespace pcekit
