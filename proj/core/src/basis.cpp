#include "pcekit/basis.hpp"

#include <limits>
#include <stdexcept>

namespace pcekit {

std::string_view to_string(PolyFamily family)
{
    switch (family) {
    case PolyFamily::HermiteProbabilist: return "hermite";
    case PolyFamily::Legendre: return "legendre";
    }
    return "unknown";
}

PolyFamily parse_family(std::string_view name)
{
    if (name == "hermite") return PolyFamily::HermiteProbabilist;
    if (name == "legendre") return PolyFamily::Legendre;
    throw std::invalid_argument("unknown polynomial family '" + std::string(name) + "'");
}

double eval_1d(PolyFamily family, int order, double x)
{
    if (order < 0) throw std::invalid_argument("polynomial order must be non-negative");
    if (order == 0) return 1.0;
    double prev = 1.0;
    double cur = x;
    for (int n = 1; n < order; ++n) {
        double next = 0.0;
        if (family == PolyFamily::HermiteProbabilist) {
            next = x * cur - n * prev;
        } else {
            next = ((2 * n + 1) * x * cur - n * prev) / (n + 1);
        }
        prev = cur;
        cur = next;
    }
    return cur;
}

void eval_1d_all(PolyFamily family, int max_order, double x, std::span<double> out)
{
    if (max_order < 0) return;
    out[0] = 1.0;
    if (max_order == 0) return;
    out[1] = x;
    for (int n = 1; n < max_order; ++n) {
        if (family == PolyFamily::HermiteProbabilist) {
            out[n + 1] = x * out[n] - n * out[n - 1];
        } else {
            out[n + 1] = ((2 * n + 1) * x * out[n] - n * out[n - 1]) / (n + 1);
        }
    }
}

double norm_squared_1d(PolyFamily family, int order)
{
    if (order < 0) throw std::invalid_argument("polynomial order must be non-negative");
    if (family == PolyFamily::HermiteProbabilist) {
        double f = 1.0;
        for (int n = 2; n <= order; ++n) f *= n;
        return f;
    }
    return 1.0 / (2.0 * order + 1.0);
}

MonicRecurrence monic_recurrence(PolyFamily family, int n)
{
    if (family == PolyFamily::HermiteProbabilist) return {0.0, static_cast<double>(n)};
    const double nn = static_cast<double>(n) * n;
    return {0.0, n == 0 ? 0.0 : nn / (4.0 * nn - 1.0)};
}

int MultiIndex::total_degree() const
{
    int s = 0;
    for (int a : orders) s += a;
    return s;
}

int MultiIndex::interaction_order() const
{
    int s = 0;
    for (int a : orders) s += a != 0;
    return s;
}

std::size_t total_degree_term_count(int dim, int order)
{
    if (dim < 1) throw std::invalid_argument("basis dimension must be >= 1");
    if (order < 0) throw std::invalid_argument("basis order must be >= 0");
    // binomial(dim + order, order) built incrementally; each partial is exact.
    std::size_t c = 1;
    for (int i = 1; i <= order; ++i) {
        const std::size_t num = static_cast<std::size_t>(dim) + i;
        if (c > std::numeric_limits<std::size_t>::max() / num)
            throw std::overflow_error("basis term count overflows");
        c = c * num / i;
    }
    return c;
}

namespace {

// All compositions of `degree` into `dim` non-negative parts, first
// coordinate descending.
void append_degree(int dim, int degree, std::vector<MultiIndex>& out)
{
    std::vector<int> cur(dim, 0);
    auto rec = [&](auto&& self, int pos, int remaining) -> void {
        if (pos == dim - 1) {
            cur[pos] = remaining;
            out.push_back(MultiIndex{cur});
            return;
        }
        for (int a = remaining; a >= 0; --a) {
            cur[pos] = a;
            self(self, pos + 1, remaining - a);
        }
    };
    rec(rec, 0, degree);
}

}  // namespace

PcBasis PcBasis::build(int dim, int order, std::vector<PolyFamily> families)
{
    const std::size_t count = total_degree_term_count(dim, order);
    if (families.size() != static_cast<std::size_t>(dim))
        throw std::invalid_argument("need one polynomial family per dimension");

    PcBasis b;
    b.dim_ = dim;
    b.order_ = order;
    b.families_ = std::move(families);
    b.terms_.reserve(count);
    for (int deg = 0; deg <= order; ++deg) append_degree(dim, deg, b.terms_);

    b.norms_.resize(b.terms_.size());
    for (std::size_t k = 0; k < b.terms_.size(); ++k) {
        double n = 1.0;
        for (int i = 0; i < dim; ++i) n *= norm_squared_1d(b.families_[i], b.terms_[k].orders[i]);
        b.norms_[k] = n;
    }
    return b;
}

PcBasis PcBasis::build(int dim, int order, PolyFamily family)
{
    if (dim < 1) throw std::invalid_argument("basis dimension must be >= 1");
    return build(dim, order, std::vector<PolyFamily>(dim, family));
}

PcBasis PcBasis::from_terms(int dim, int order, std::vector<PolyFamily> families,
                            std::vector<MultiIndex> terms)
{
    PcBasis b = build(dim, order, std::move(families));
    if (terms != b.terms_)
        throw std::invalid_argument("multi-index list does not match graded-lexicographic "
                                    "total-degree ordering for dim/order");
    return b;
}

std::vector<double> PcBasis::eval(std::span<const double> point) const
{
    std::vector<double> out(size());
    std::vector<double> scratch(static_cast<std::size_t>(dim_) * (order_ + 1));
    eval_into(point, out, scratch);
    return out;
}

void PcBasis::eval_into(std::span<const double> point, std::span<double> out,
                        std::span<double> scratch) const
{
    if (point.size() != static_cast<std::size_t>(dim_))
        throw std::invalid_argument("point dimension " + std::to_string(point.size()) +
                                    " does not match basis dimension " + std::to_string(dim_));
    const std::size_t stride = static_cast<std::size_t>(order_) + 1;
    for (int i = 0; i < dim_; ++i)
        eval_1d_all(families_[i], order_, point[i], scratch.subspan(i * stride, stride));

    for (std::size_t k = 0; k < terms_.size(); ++k) {
        const auto& a = terms_[k].orders;
        double v = 1.0;
        for (int i = 0; i < dim_; ++i)
            if (a[i] != 0) v *= scratch[i * stride + a[i]];
        out[k] = v;
    }
}

std::size_t PcBasis::find(const MultiIndex& index) const
{
    for (std::size_t k = 0; k < terms_.size(); ++k)
        if (terms_[k] == index) return k;
    return terms_.size();
}

}  // namespace pcekit
