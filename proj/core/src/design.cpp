#include "pcekit/design.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pcekit/parallel.hpp"

namespace pcekit {

void DesignProblem::validate() const
{
    if (!surrogate) throw std::invalid_argument("design problem has no surrogate");
    if (design_dim < 0 || design_dim >= surrogate->basis().dim())
        throw std::invalid_argument("design dimension " + std::to_string(design_dim + 1) +
                                    " is outside 1.." + std::to_string(surrogate->basis().dim()));
    if (output < 0 || output >= surrogate->num_outputs())
        throw std::invalid_argument("design output index out of range");
    if (!(sigma > 0.0)) throw std::invalid_argument("design sigma must be positive");
    if (!(target_prob > 0.0 && target_prob <= 1.0))
        throw std::invalid_argument("target probability must lie in (0,1]");
    if (std::isnan(threshold)) throw std::invalid_argument("threshold must not be NaN");
}

FailureProbability::FailureProbability(const DesignProblem& problem, std::size_t n,
                                       std::uint64_t seed)
    : problem_(problem), n_(n)
{
    problem_.validate();
    if (n < 1) throw std::invalid_argument("sample size must be >= 1");

    const PcSurrogate& s = *problem_.surrogate;
    const PcBasis& basis = s.basis();
    const std::size_t d = static_cast<std::size_t>(basis.dim());
    const int dd = problem_.design_dim;
    degree_ = basis.order();
    const std::size_t width = static_cast<std::size_t>(degree_) + 1;
    reduced_.assign(n * width, 0.0);

    const GermSampler sampler(basis.families(), seed);
    const std::size_t stride = static_cast<std::size_t>(degree_) + 1;
    parallel_for(GermSampler::block_count(n), [&](std::size_t b) {
        const std::size_t first = b * GermSampler::kBlockSize;
        const std::size_t count = std::min(GermSampler::kBlockSize, n - first);
        std::vector<double> germs(count * d);
        sampler.fill_block(b, count, germs);
        std::vector<double> psi1d(d * stride);
        for (std::size_t i = 0; i < count; ++i) {
            for (std::size_t k = 0; k < d; ++k)
                eval_1d_all(basis.families()[k], degree_, germs[i * d + k],
                            std::span<double>(psi1d.data() + k * stride, stride));
            double* row = reduced_.data() + (first + i) * width;
            for (std::size_t t = 0; t < basis.size(); ++t) {
                const auto& a = basis.term(t).orders;
                double v = s.coeffs()(static_cast<Eigen::Index>(t), problem_.output);
                for (std::size_t k = 0; k < d; ++k)
                    if (static_cast<int>(k) != dd && a[k] != 0) v *= psi1d[k * stride + a[k]];
                row[a[dd]] += v;
            }
        }
    });
}

ProbabilityEstimate FailureProbability::operator()(double design_value) const
{
    const double xi = problem_.to_canonical(design_value);
    const PolyFamily family = problem_.surrogate->basis().families()[problem_.design_dim];
    std::vector<double> psi(static_cast<std::size_t>(degree_) + 1);
    eval_1d_all(family, degree_, xi, psi);

    // Compare in series space; exp is monotone so log surrogates compare
    // against log(threshold).
    double limit = problem_.threshold;
    bool all_fail = false;
    if (problem_.surrogate->log_transformed()) {
        if (problem_.threshold <= 0.0)
            all_fail = true;
        else
            limit = std::log(problem_.threshold);
    }

    std::size_t hits = 0;
    if (all_fail) {
        hits = n_;
    } else {
        const std::size_t width = psi.size();
        for (std::size_t i = 0; i < n_; ++i) {
            const double* row = reduced_.data() + i * width;
            double v = 0.0;
            for (std::size_t j = 0; j < width; ++j) v += row[j] * psi[j];
            hits += v > limit;
        }
    }
    const double n = static_cast<double>(n_);
    const double p = static_cast<double>(hits) / n;
    return {p, std::sqrt(p * (1.0 - p) / n)};
}

ProbabilityEstimate failure_probability(const DesignProblem& problem, double design_value,
                                        std::size_t n, std::uint64_t seed)
{
    return FailureProbability(problem, n, seed)(design_value);
}

DesignResult optimal_design(const DesignProblem& problem, const DesignSearchOptions& options)
{
    if (!(options.hi > options.lo)) throw std::invalid_argument("design interval must have lo < hi");
    if (!(options.tol > 0.0)) throw std::invalid_argument("design tolerance must be positive");

    const FailureProbability pfail(problem, options.samples, options.seed);
    DesignResult result;

    if (options.sweep_points >= 2) {
        result.sweep.resize(options.sweep_points);
        parallel_for(options.sweep_points, [&](std::size_t i) {
            const double v = options.lo + (options.hi - options.lo) * static_cast<double>(i) /
                                              static_cast<double>(options.sweep_points - 1);
            const auto e = pfail(v);
            result.sweep[i] = {v, e.probability, e.std_error};
        });
        for (std::size_t i = 1; i < result.sweep.size(); ++i) {
            if (result.sweep[i].probability < result.sweep[i - 1].probability) {
                std::ostringstream msg;
                msg << "failure probability is not monotone in the design value: "
                    << result.sweep[i - 1].probability << " at " << result.sweep[i - 1].value
                    << " drops to " << result.sweep[i].probability << " at " << result.sweep[i].value;
                result.warnings.push_back(msg.str());
                break;
            }
        }
    }

    const auto at_lo = pfail(options.lo);
    if (!(at_lo.probability < problem.target_prob)) {
        std::ostringstream msg;
        msg << "design interval does not bracket the target: failure probability at lo="
            << options.lo << " is " << at_lo.probability << " >= " << problem.target_prob;
        throw std::invalid_argument(msg.str());
    }
    const auto at_hi = pfail(options.hi);
    if (at_hi.probability < problem.target_prob) {
        result.optimum = options.hi;
        result.at_optimum = at_hi;
        result.warnings.push_back("failure constraint is inactive on the search interval; "
                                  "optimum is the upper bound");
    } else {
        double lo = options.lo;
        double hi = options.hi;
        ProbabilityEstimate lo_est = at_lo;
        while (hi - lo >= options.tol) {
            const double mid = 0.5 * (lo + hi);
            const auto e = pfail(mid);
            if (e.probability < problem.target_prob) {
                lo = mid;
                lo_est = e;
            } else {
                hi = mid;
            }
        }
        result.optimum = lo;
        result.at_optimum = lo_est;
    }

    if (options.verify_seed) {
        const FailureProbability fresh(problem, options.samples, *options.verify_seed);
        const double step = options.tol / 4.0;
        auto check = fresh(result.optimum);
        int backoffs = 0;
        while (!(check.probability < problem.target_prob) && result.optimum - step >= options.lo) {
            result.optimum -= step;
            result.at_optimum = pfail(result.optimum);
            check = fresh(result.optimum);
            ++backoffs;
        }
        if (backoffs > 0) {
            std::ostringstream msg;
            msg << "optimum lowered by " << backoffs * step
                << " to stay feasible on the verification sample";
            result.warnings.push_back(msg.str());
        }
        if (!(check.probability < problem.target_prob))
            result.warnings.push_back("optimum is infeasible on the verification sample");
        result.verification = check;
    }
    return result;
}

}  // namespace pcekit
