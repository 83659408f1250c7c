#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pcekit {

/// One-dimensional orthogonal polynomial family, each paired with the
/// probability density it is orthogonal against:
///   HermiteProbabilist  <->  standard normal germ, <psi_n^2> = n!
///   Legendre            <->  uniform germ on [-1,1], <psi_n^2> = 1/(2n+1)
enum class PolyFamily { HermiteProbabilist, Legendre };

std::string_view to_string(PolyFamily family);
PolyFamily parse_family(std::string_view name);

/// psi_order(x) by three-term recurrence.
double eval_1d(PolyFamily family, int order, double x);

/// Fills out[0..max_order] with psi_0(x) .. psi_max_order(x).
void eval_1d_all(PolyFamily family, int max_order, double x, std::span<double> out);

/// Squared norm <psi_n^2> with respect to the family's probability density.
double norm_squared_1d(PolyFamily family, int order);

/// Monic recurrence coefficients: pi_{n+1} = (x - a_n) pi_n - b_n pi_{n-1}.
struct MonicRecurrence {
    double a;
    double b;
};
MonicRecurrence monic_recurrence(PolyFamily family, int n);

struct MultiIndex {
    std::vector<int> orders;

    int total_degree() const;
    /// Number of dimensions with a nonzero order.
    int interaction_order() const;

    friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

/// Multivariate total-degree tensor-product basis.
///
/// Terms are ordered graded-lexicographically: ascending total degree, and
/// within a degree, descending in the first coordinate, then the second, and
/// so on. For d=2, p=2 that is (0,0) (1,0) (0,1) (2,0) (1,1) (0,2). This
/// ordering is part of the expansion archive contract.
class PcBasis {
public:
    static PcBasis build(int dim, int order, std::vector<PolyFamily> families);
    /// Single family for every dimension.
    static PcBasis build(int dim, int order, PolyFamily family);

    /// Rebuilds from an explicit term list; the list must equal what build()
    /// would produce for the same dim/order.
    static PcBasis from_terms(int dim, int order, std::vector<PolyFamily> families,
                              std::vector<MultiIndex> terms);

    int dim() const { return dim_; }
    int order() const { return order_; }
    std::size_t size() const { return terms_.size(); }
    const std::vector<PolyFamily>& families() const { return families_; }
    const std::vector<MultiIndex>& terms() const { return terms_; }
    const MultiIndex& term(std::size_t k) const { return terms_[k]; }
    const std::vector<double>& norms() const { return norms_; }
    double norm_squared(std::size_t k) const { return norms_[k]; }

    std::vector<double> eval(std::span<const double> point) const;

    /// Writes Psi_k(point) into out (size() entries); scratch must hold
    /// dim() * (order() + 1) doubles.
    void eval_into(std::span<const double> point, std::span<double> out,
                   std::span<double> scratch) const;

    /// Index of the term with the given orders, or size() if absent.
    std::size_t find(const MultiIndex& index) const;

private:
    PcBasis() = default;

    int dim_ = 0;
    int order_ = 0;
    std::vector<PolyFamily> families_;
    std::vector<MultiIndex> terms_;
    std::vector<double> norms_;
};

/// binomial(dim + order, order) with overflow detection; throws
/// std::overflow_error when the count does not fit in size_t.
std::size_t total_degree_term_count(int dim, int order);

}  // namespace pcekit
