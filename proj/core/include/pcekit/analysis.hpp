#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pcekit/projection.hpp"

namespace pcekit {

/// Draws iid canonical germs: standard normal on Hermite dimensions,
/// uniform on [-1,1] on Legendre dimensions.
///
/// Draw i depends only on (seed, i): the index range is cut into fixed-size
/// blocks, each with its own generator seeded from (seed, block). Results are
/// therefore identical for any number of worker threads.
class GermSampler {
public:
    static constexpr std::size_t kBlockSize = 4096;

    GermSampler(std::vector<PolyFamily> families, std::uint64_t seed);

    int dim() const { return static_cast<int>(families_.size()); }

    /// Fills `out` (row-major, count x dim) with draws
    /// [block*kBlockSize, block*kBlockSize + count).
    void fill_block(std::size_t block, std::size_t count, std::span<double> out) const;

    static std::size_t block_count(std::size_t n) { return (n + kBlockSize - 1) / kBlockSize; }

private:
    std::vector<PolyFamily> families_;
    std::uint64_t seed_;
};

struct SampleBatch {
    Eigen::MatrixXd draws;  // n x M
    std::uint64_t seed = 0;
    std::size_t n = 0;
};

/// Evaluates the surrogate at n iid germ draws. `input_distribution` names
/// the germ law per dimension and must match the basis families.
SampleBatch sample(const PcSurrogate& surrogate, std::size_t n, std::uint64_t seed);
SampleBatch sample(const PcSurrogate& surrogate, std::size_t n, std::uint64_t seed,
                   const std::vector<PolyFamily>& input_distribution);

/// Same draws as sample(), restricted to outputs [m_begin, m_end).
Eigen::MatrixXd sample_outputs(const PcSurrogate& surrogate, std::size_t n, std::uint64_t seed,
                               Eigen::Index m_begin, Eigen::Index m_end);

struct KdeGrid {
    std::size_t points = 1024;
    std::optional<double> lo;
    std::optional<double> hi;
    /// Overrides the Silverman bandwidth when set.
    std::optional<double> bandwidth;
};

struct DensityEstimate {
    std::vector<double> grid;
    std::vector<double> density;
    double bandwidth = 0.0;
};

/// Silverman's rule of thumb, robust form: 0.9 * min(sd, IQR/1.34) * n^(-1/5).
double silverman_bandwidth(std::span<const double> values);

/// Gaussian-kernel density estimate. Throws std::invalid_argument when the
/// sample has fewer than two distinct values.
DensityEstimate kde(std::span<const double> values, const KdeGrid& grid = {});

/// Empirical quantiles with linear interpolation between order statistics,
/// position (n-1)q. Reorders `values`.
std::vector<double> empirical_quantiles(std::span<double> values, std::span<const double> qs);

/// M x |quantiles| matrix of per-output percentiles over n surrogate draws.
Eigen::MatrixXd percentiles(const PcSurrogate& surrogate, std::span<const double> quantiles,
                            std::size_t n, std::uint64_t seed);

struct ProbabilityEstimate {
    double probability = 0.0;
    double std_error = 0.0;  // binomial sqrt(p(1-p)/n)
};

ProbabilityEstimate exceedance_from_samples(std::span<const double> values, double threshold);

/// P(X_m > threshold) for each output m.
std::vector<ProbabilityEstimate> exceedance_probability(const PcSurrogate& surrogate,
                                                        double threshold, std::size_t n,
                                                        std::uint64_t seed);

}  // namespace pcekit
