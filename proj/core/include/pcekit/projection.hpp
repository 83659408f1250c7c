#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

#include "pcekit/basis.hpp"
#include "pcekit/quadrature.hpp"

namespace pcekit {

/// Model outputs at the nodes of one quadrature rule: one row per node (in
/// the rule's odometer order), one column per output index.
class EvaluationTable {
public:
    /// Throws std::invalid_argument on a row-count/rule mismatch, a label
    /// count mismatch, or any non-finite entry.
    EvaluationTable(const QuadratureRule& rule, Eigen::MatrixXd outputs,
                    std::vector<std::string> labels);

    const std::string& rule_id() const { return rule_id_; }
    const Eigen::MatrixXd& outputs() const { return outputs_; }
    const std::vector<std::string>& labels() const { return labels_; }
    Eigen::Index rows() const { return outputs_.rows(); }
    Eigen::Index num_outputs() const { return outputs_.cols(); }

private:
    std::string rule_id_;
    Eigen::MatrixXd outputs_;
    std::vector<std::string> labels_;
};

/// Truncated PC expansion, one coefficient column per output index.
/// When log_transformed, the expansion approximates log X and evaluation
/// returns exp of the series.
class PcSurrogate {
public:
    PcSurrogate(PcBasis basis, Eigen::MatrixXd coeffs, bool log_transformed,
                std::vector<std::string> labels);

    const PcBasis& basis() const { return basis_; }
    const Eigen::MatrixXd& coeffs() const { return coeffs_; }
    bool log_transformed() const { return log_transformed_; }
    const std::vector<std::string>& labels() const { return labels_; }
    Eigen::Index num_outputs() const { return coeffs_.cols(); }

    /// All outputs at a canonical point.
    std::vector<double> evaluate(std::span<const double> point) const;

    /// Series value (log-space for log surrogates) for every output, given
    /// precomputed basis values psi.
    void series_from_basis(std::span<const double> psi, std::span<double> out) const;

private:
    PcBasis basis_;
    Eigen::MatrixXd coeffs_;
    bool log_transformed_;
    std::vector<std::string> labels_;
};

/// Non-intrusive spectral projection:
///   c_k = (sum_j w_j Y_j Psi_k(xi_j)) / <Psi_k^2>,  Y = X or log X.
/// If the rule does not preserve discrete orthogonality of the basis, a
/// warning carrying the deviation is appended to `warnings`.
PcSurrogate project(const EvaluationTable& table, const QuadratureRule& rule,
                    const PcBasis& basis, bool log_transform,
                    std::vector<std::string>* warnings = nullptr);

struct RelativeL2Error {
    /// Error in the space the expansion approximates (log space for log
    /// surrogates).
    std::vector<double> native;
    /// Error of the surrogate in physical space; equals `native` for plain
    /// surrogates.
    std::vector<double> physical;
};

/// Relative L2 error against a validation table, by quadrature on the
/// validation rule. The validation grid should not be nested with the
/// construction grid; that is the caller's responsibility.
RelativeL2Error relative_l2_error(const PcSurrogate& surrogate, const EvaluationTable& validation,
                                  const QuadratureRule& validation_rule);

struct Moments {
    std::vector<double> mean;
    std::vector<double> variance;
};

/// Mean c_0 and variance sum_{k>=1} c_k^2 <Psi_k^2>. Log surrogates throw
/// std::logic_error: their moments must be estimated by sampling.
Moments moments(const PcSurrogate& surrogate);

}  // namespace pcekit
