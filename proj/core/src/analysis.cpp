#include "pcekit/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "pcekit/parallel.hpp"
#include "pcekit/summation.hpp"

namespace pcekit {

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Bounds the size of one n x K column chunk in percentiles/exceedance.
constexpr std::size_t kChunkDoubles = std::size_t{1} << 24;

Eigen::Index chunk_width(std::size_t n, Eigen::Index total)
{
    const auto w = static_cast<Eigen::Index>(std::max<std::size_t>(1, kChunkDoubles / std::max<std::size_t>(n, 1)));
    return std::min(w, total);
}

}  // namespace

GermSampler::GermSampler(std::vector<PolyFamily> families, std::uint64_t seed)
    : families_(std::move(families)), seed_(seed)
{
}

void GermSampler::fill_block(std::size_t block, std::size_t count, std::span<double> out) const
{
    std::mt19937_64 gen(splitmix64(seed_ ^ splitmix64(block)));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    const std::size_t d = families_.size();
    for (std::size_t i = 0; i < count; ++i)
        for (std::size_t k = 0; k < d; ++k)
            out[i * d + k] = families_[k] == PolyFamily::HermiteProbabilist ? normal(gen) : uniform(gen);
}

Eigen::MatrixXd sample_outputs(const PcSurrogate& surrogate, std::size_t n, std::uint64_t seed,
                               Eigen::Index m_begin, Eigen::Index m_end)
{
    if (n < 1) throw std::invalid_argument("sample size must be >= 1");
    if (m_begin < 0 || m_end > surrogate.num_outputs() || m_begin > m_end)
        throw std::invalid_argument("output range out of bounds");

    const PcBasis& basis = surrogate.basis();
    const GermSampler sampler(basis.families(), seed);
    const std::size_t d = static_cast<std::size_t>(basis.dim());
    const Eigen::Index width = m_end - m_begin;
    const Eigen::MatrixXd coeffs = surrogate.coeffs().middleCols(m_begin, width);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(n), width);

    parallel_for(GermSampler::block_count(n), [&](std::size_t b) {
        const std::size_t first = b * GermSampler::kBlockSize;
        const std::size_t count = std::min(GermSampler::kBlockSize, n - first);
        std::vector<double> germs(count * d);
        sampler.fill_block(b, count, germs);
        // Basis values as columns, so each draw's row is contiguous.
        Eigen::MatrixXd psi(static_cast<Eigen::Index>(basis.size()), static_cast<Eigen::Index>(count));
        std::vector<double> scratch(d * (basis.order() + 1));
        for (std::size_t i = 0; i < count; ++i)
            basis.eval_into(std::span<const double>(germs.data() + i * d, d),
                            std::span<double>(psi.col(static_cast<Eigen::Index>(i)).data(), basis.size()),
                            scratch);
        auto rows = out.middleRows(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(count));
        rows.noalias() = psi.transpose() * coeffs;
        if (surrogate.log_transformed()) rows = rows.array().exp().matrix();
    });
    return out;
}

SampleBatch sample(const PcSurrogate& surrogate, std::size_t n, std::uint64_t seed)
{
    return sample(surrogate, n, seed, surrogate.basis().families());
}

SampleBatch sample(const PcSurrogate& surrogate, std::size_t n, std::uint64_t seed,
                   const std::vector<PolyFamily>& input_distribution)
{
    if (input_distribution != surrogate.basis().families())
        throw std::invalid_argument("input distribution does not match the basis families "
                                    "(Hermite needs standard normal, Legendre needs uniform)");
    SampleBatch batch;
    batch.draws = sample_outputs(surrogate, n, seed, 0, surrogate.num_outputs());
    batch.seed = seed;
    batch.n = n;
    return batch;
}

double silverman_bandwidth(std::span<const double> values)
{
    const std::size_t n = values.size();
    if (n < 2) throw std::invalid_argument("bandwidth needs at least two values");
    CompensatedSum s;
    for (double v : values) s += v;
    const double mean = s.value() / static_cast<double>(n);
    CompensatedSum ss;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss.value() / static_cast<double>(n - 1));

    std::vector<double> copy(values.begin(), values.end());
    const std::vector<double> qs{0.25, 0.75};
    const auto q = empirical_quantiles(copy, qs);
    const double iqr = (q[1] - q[0]) / 1.34;
    const double spread = iqr > 0.0 ? std::min(sd, iqr) : sd;
    return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

DensityEstimate kde(std::span<const double> values, const KdeGrid& grid)
{
    if (values.size() < 2) throw std::invalid_argument("density estimate needs at least two values");
    const auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
    const double vmin = *min_it;
    const double vmax = *max_it;
    if (!(vmax > vmin)) throw std::invalid_argument("degenerate sample: all values are equal");
    if (grid.points < 2) throw std::invalid_argument("density grid needs at least two points");

    const double h = grid.bandwidth.value_or(silverman_bandwidth(values));
    if (!(h > 0.0)) throw std::invalid_argument("bandwidth must be positive");

    double lo = 0.0;
    double hi = 0.0;
    if (grid.lo && grid.hi) {
        lo = *grid.lo;
        hi = *grid.hi;
    } else {
        std::vector<double> copy(values.begin(), values.end());
        const std::vector<double> qs{0.001, 0.999};
        const auto q = empirical_quantiles(copy, qs);
        lo = grid.lo.value_or(q[0] - 3.0 * h);
        hi = grid.hi.value_or(q[1] + 3.0 * h);
    }
    if (!(hi > lo)) throw std::invalid_argument("density grid range is empty");

    // Linear binning onto a fine grid, then a truncated Gaussian sum per
    // output point over the occupied bins.
    constexpr double kCutoff = 6.0;
    const double fine_lo = std::min(lo, vmin) - kCutoff * h;
    const double fine_hi = std::max(hi, vmax) + kCutoff * h;
    constexpr std::size_t kMaxBins = 4'000'000;
    const double delta = std::max(h / 25.0, (fine_hi - fine_lo) / static_cast<double>(kMaxBins - 1));
    const auto bins = static_cast<std::size_t>(std::ceil((fine_hi - fine_lo) / delta)) + 2;
    std::vector<double> mass(bins, 0.0);
    for (double v : values) {
        const double pos = (v - fine_lo) / delta;
        const auto i = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(i);
        mass[i] += 1.0 - frac;
        mass[i + 1] += frac;
    }

    DensityEstimate est;
    est.bandwidth = h;
    est.grid.resize(grid.points);
    est.density.resize(grid.points);
    const double norm = 1.0 / (static_cast<double>(values.size()) * h * std::sqrt(2.0 * std::numbers::pi));
    const auto reach = static_cast<std::ptrdiff_t>(std::ceil(kCutoff * h / delta));
    for (std::size_t g = 0; g < grid.points; ++g) {
        const double x = lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(grid.points - 1);
        est.grid[g] = x;
        const auto centre = static_cast<std::ptrdiff_t>(std::floor((x - fine_lo) / delta));
        const std::ptrdiff_t b0 = std::max<std::ptrdiff_t>(0, centre - reach);
        const std::ptrdiff_t b1 = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(bins) - 1, centre + reach + 1);
        double acc = 0.0;
        for (std::ptrdiff_t b = b0; b <= b1; ++b) {
            if (mass[b] == 0.0) continue;
            const double u = (x - (fine_lo + static_cast<double>(b) * delta)) / h;
            acc += mass[b] * std::exp(-0.5 * u * u);
        }
        est.density[g] = acc * norm;
    }
    return est;
}

std::vector<double> empirical_quantiles(std::span<double> values, std::span<const double> qs)
{
    const std::size_t n = values.size();
    if (n == 0) throw std::invalid_argument("quantiles of an empty sample");
    for (double q : qs)
        if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("quantile levels must lie in (0,1)");

    std::vector<std::size_t> order(qs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return qs[a] < qs[b]; });

    std::vector<double> out(qs.size());
    // Ascending levels let each selection work on the not-yet-partitioned tail.
    std::size_t settled = 0;
    for (std::size_t idx : order) {
        const double pos = static_cast<double>(n - 1) * qs[idx];
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const double frac = pos - static_cast<double>(lo);
        if (lo >= settled) {
            std::nth_element(values.begin() + static_cast<std::ptrdiff_t>(settled),
                             values.begin() + static_cast<std::ptrdiff_t>(lo), values.end());
        }
        double v = values[lo];
        if (frac > 0.0 && lo + 1 < n) {
            const double next = *std::min_element(values.begin() + static_cast<std::ptrdiff_t>(lo + 1), values.end());
            v = v + frac * (next - v);
        }
        out[idx] = v;
        settled = lo + 1;
    }
    return out;
}

Eigen::MatrixXd percentiles(const PcSurrogate& surrogate, std::span<const double> quantiles,
                            std::size_t n, std::uint64_t seed)
{
    const Eigen::Index nm = surrogate.num_outputs();
    Eigen::MatrixXd out(nm, static_cast<Eigen::Index>(quantiles.size()));
    const Eigen::Index width = chunk_width(n, nm);
    for (Eigen::Index m0 = 0; m0 < nm; m0 += width) {
        const Eigen::Index m1 = std::min(nm, m0 + width);
        Eigen::MatrixXd draws = sample_outputs(surrogate, n, seed, m0, m1);
        parallel_for(static_cast<std::size_t>(m1 - m0), [&](std::size_t c) {
            const auto col = static_cast<Eigen::Index>(c);
            std::span<double> values(draws.col(col).data(), n);
            const auto q = empirical_quantiles(values, quantiles);
            for (std::size_t i = 0; i < q.size(); ++i) out(m0 + col, static_cast<Eigen::Index>(i)) = q[i];
        });
    }
    return out;
}

ProbabilityEstimate exceedance_from_samples(std::span<const double> values, double threshold)
{
    if (values.empty()) throw std::invalid_argument("exceedance needs at least one value");
    if (std::isnan(threshold)) throw std::invalid_argument("threshold must not be NaN");
    std::size_t hits = 0;
    for (double v : values) hits += v > threshold;
    const double n = static_cast<double>(values.size());
    const double p = static_cast<double>(hits) / n;
    return {p, std::sqrt(p * (1.0 - p) / n)};
}

std::vector<ProbabilityEstimate> exceedance_probability(const PcSurrogate& surrogate,
                                                        double threshold, std::size_t n,
                                                        std::uint64_t seed)
{
    const Eigen::Index nm = surrogate.num_outputs();
    std::vector<ProbabilityEstimate> out(static_cast<std::size_t>(nm));
    const Eigen::Index width = chunk_width(n, nm);
    for (Eigen::Index m0 = 0; m0 < nm; m0 += width) {
        const Eigen::Index m1 = std::min(nm, m0 + width);
        const Eigen::MatrixXd draws = sample_outputs(surrogate, n, seed, m0, m1);
        for (Eigen::Index c = 0; c < m1 - m0; ++c)
            out[static_cast<std::size_t>(m0 + c)] =
                exceedance_from_samples(std::span<const double>(draws.col(c).data(), n), threshold);
    }
    return out;
}

}  // namespace pcekit
