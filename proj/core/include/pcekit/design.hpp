#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pcekit/analysis.hpp"
#include "pcekit/projection.hpp"

namespace pcekit {

/// Chance-constrained choice of one design input. The design dimension is
/// pinned through the affine map xi = (value - mean) / sigma; every other
/// dimension stays random.
struct DesignProblem {
    const PcSurrogate* surrogate = nullptr;
    int design_dim = 0;      // 0-based
    Eigen::Index output = 0; // which surrogate output is the constrained quantity
    double mean = 0.0;
    double sigma = 1.0;
    double threshold = 0.0;  // failure: output > threshold
    double target_prob = 0.05;

    double to_canonical(double value) const { return (value - mean) / sigma; }
    void validate() const;
};

/// Failure-probability estimator with common random numbers: the germs of
/// the random dimensions are drawn once, and the surrogate is reduced per
/// draw to a 1D polynomial in the design germ. Every design value is then
/// judged on the same draws, so the estimate is a deterministic function of
/// the design value.
class FailureProbability {
public:
    FailureProbability(const DesignProblem& problem, std::size_t n, std::uint64_t seed);

    ProbabilityEstimate operator()(double design_value) const;

    std::size_t samples() const { return n_; }

private:
    DesignProblem problem_;
    std::size_t n_;
    int degree_;
    // n x (degree+1), row-major: coefficients of psi_j(xi_design) per draw.
    std::vector<double> reduced_;
};

ProbabilityEstimate failure_probability(const DesignProblem& problem, double design_value,
                                        std::size_t n, std::uint64_t seed);

struct SweepPoint {
    double value;
    double probability;
    double std_error;
};

struct DesignResult {
    double optimum = 0.0;
    ProbabilityEstimate at_optimum;
    /// Fresh-seed check at the optimum; present when a verification seed was
    /// given.
    std::optional<ProbabilityEstimate> verification;
    std::vector<SweepPoint> sweep;
    std::vector<std::string> warnings;
};

struct DesignSearchOptions {
    double lo = 0.0;
    double hi = 1.0;
    std::size_t samples = 1'000'000;
    std::uint64_t seed = 0;
    double tol = 1e-3;
    std::size_t sweep_points = 41;
    /// Seed for an independent feasibility check of the optimum. The
    /// optimum is stepped down until it also passes there.
    std::optional<std::uint64_t> verify_seed;
};

/// Largest design value in [lo, hi] whose failure probability stays below
/// the target, found by bisection on common random numbers. Returns hi when
/// the constraint is inactive over the interval; throws std::invalid_argument
/// when even lo is infeasible.
DesignResult optimal_design(const DesignProblem& problem, const DesignSearchOptions& options);

}  // namespace pcekit
