// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pcekit/analysis.hpp"
#include "pcekit/csv.hpp"
#include "pcekit/design.hpp"
#include "pcekit/models.hpp"
#include "pcekit/projection.hpp"
#include "pcekit/sensitivity.hpp"

using namespace pcekit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double time_limit_s;
    std::function<Outcome()> check;
};

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

Outcome c1_orthogonality()
{
    const auto basis = PcBasis::build(4, 4, PolyFamily::HermiteProbabilist);
    const auto rule = QuadratureRule::tensor_grid(4, PolyFamily::HermiteProbabilist, 5);
    const auto r = check_discrete_orthogonality(basis, rule, 1e-10);
    return {r.passed && r.max_deviation < 1e-10, "max deviation " + fmt(r.max_deviation)};
}

Outcome c2_term_count()
{
    const auto basis = PcBasis::build(4, 4, PolyFamily::HermiteProbabilist);
    const bool ok = basis.size() == 70 && total_degree_term_count(4, 4) == 70 &&
                    basis.size() == static_cast<std::size_t>(oracle::binomial(8, 4));
    return {ok, std::to_string(basis.size()) + " terms"};
}

Outcome c3_reproduction()
{
    const auto basis = PcBasis::build(2, 2, PolyFamily::HermiteProbabilist);
    const auto rule = QuadratureRule::tensor_grid(2, PolyFamily::HermiteProbabilist, 3);
    Eigen::MatrixXd y(static_cast<Eigen::Index>(rule.size()), 1);
    for (std::size_t j = 0; j < rule.size(); ++j) {
        const auto x = rule.node(j);
        y(static_cast<Eigen::Index>(j), 0) = 3.0 + 2.0 * x[0] * x[1];
    }
    const auto s = project(EvaluationTable(rule, y, {"x"}), rule, basis, false);
    const auto k11 = basis.find(MultiIndex{{1, 1}});
    double worst = 0.0;
    for (std::size_t k = 0; k < basis.size(); ++k)
        if (k != 0 && k != k11) worst = std::max(worst, std::abs(s.coeffs()(static_cast<Eigen::Index>(k), 0)));
    const double c0 = s.coeffs()(0, 0), c11 = s.coeffs()(static_cast<Eigen::Index>(k11), 0);
    const bool ok = std::abs(c0 - 3.0) < 1e-10 && std::abs(c11 - 2.0) < 1e-10 && worst < 1e-10;
    return {ok, "c0=" + fmt(c0) + " c11=" + fmt(c11) + " max other " + fmt(worst)};
}

Outcome c4_ishigami()
{
    const auto spec = ParameterSpec::ishigami_defaults();
    const auto rule = QuadratureRule::tensor_grid(spec.families(), {10, 10, 10});
    const auto s = project(evaluate_model(BuiltinModel::Ishigami, spec, rule), rule,
                           PcBasis::build(3, 9, spec.families()), false);
    const auto r = sobol_indices(s);
    const auto o = oracle::ishigami_indices(7.0, 0.1);
    const double e1 = std::abs(r.first(0, 0) - o.s1), e2 = std::abs(r.first(1, 0) - o.s2),
                 e3 = std::abs(r.first(2, 0) - o.s3), e4 = std::abs(r.total(2, 0) - o.t3);
    const double worst = std::max({e1, e2, e3, e4});
    return {worst <= 1e-2, "S1=" + fmt(r.first(0, 0)) + " S2=" + fmt(r.first(1, 0)) + " S3=" + fmt(r.first(2, 0)) +
                               " T3=" + fmt(r.total(2, 0)) + " max abs error " + fmt(worst)};
}

Outcome c5_mixed_identity()
{
    std::mt19937_64 gen(5);
    std::uniform_int_distribution<int> dim(1, 4), ord(1, 4);
    std::normal_distribution<double> normal;
    double worst_mix = 0.0, worst_t = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int d = dim(gen), p = ord(gen);
        std::vector<PolyFamily> fam(static_cast<std::size_t>(d));
        for (auto& f : fam) f = gen() % 2 ? PolyFamily::HermiteProbabilist : PolyFamily::Legendre;
        const auto basis = PcBasis::build(d, p, fam);
        Eigen::VectorXd c(static_cast<Eigen::Index>(basis.size()));
        for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = normal(gen);
        const auto r = sobol_indices(PcSurrogate(basis, c, false, {"x"}));
        worst_mix = std::max(worst_mix, std::abs(r.mixed(0) - (1.0 - r.first.col(0).sum())));
        for (int i = 0; i < d; ++i) worst_t = std::max(worst_t, r.first(i, 0) - r.total(i, 0));
    }
    return {worst_mix <= 1e-12 && worst_t <= 1e-12,
            "max |T_mix - (1 - sum S_i)| " + fmt(worst_mix) + ", max (S_i - T_i) " + fmt(worst_t)};
}

Outcome c6_cross_validation()
{
    const auto spec = ParameterSpec::leakage_defaults();
    const auto build = QuadratureRule::tensor_grid(spec.families(), {5, 5, 5, 5});
    const auto check = QuadratureRule::tensor_grid(spec.families(), {4, 4, 4, 4});
    if (!build.is_non_nested_with(check)) return {false, "grids are nested"};
    const auto train = evaluate_model(BuiltinModel::ToyLeakage, spec, build);
    const auto valid = evaluate_model(BuiltinModel::ToyLeakage, spec, check);
    std::vector<double> mean_err;
    std::string detail = "time-mean E_rel of log Q_leak:";
    for (int p = 1; p <= 4; ++p) {
        const auto s = project(train, build, PcBasis::build(4, p, spec.families()), true);
        const auto e = relative_l2_error(s, valid, check);
        double sum = 0.0;
        for (double v : e.native) sum += v;
        mean_err.push_back(sum / static_cast<double>(e.native.size()));
        detail += " p" + std::to_string(p) + "=" + fmt(mean_err.back());
    }
    bool ok = true;
    for (std::size_t i = 1; i < mean_err.size(); ++i) ok = ok && mean_err[i] < mean_err[i - 1];
    return {ok, detail};
}

Outcome c7_positivity()
{
    const auto spec = ParameterSpec::leakage_defaults();
    const auto rule = QuadratureRule::tensor_grid(spec.families(), {5, 5, 5, 5});
    const auto s = project(evaluate_model(BuiltinModel::ToyLeakage, spec, rule), rule,
                           PcBasis::build(4, 4, spec.families()), true);
    constexpr std::size_t n = 1'000'000;
    double lowest = std::numeric_limits<double>::infinity();
    std::size_t bad = 0;
    for (Eigen::Index m0 = 0; m0 < s.num_outputs(); m0 += 27) {
        const Eigen::Index m1 = std::min<Eigen::Index>(m0 + 27, s.num_outputs());
        const auto draws = sample_outputs(s, n, 7, m0, m1);
        lowest = std::min(lowest, draws.minCoeff());
        bad += static_cast<std::size_t>((draws.array() <= 0.0).count());
    }
    return {bad == 0, std::to_string(n) + " evaluations x " + std::to_string(s.num_outputs()) +
                          " outputs, min " + fmt(lowest) + ", non-positive " + std::to_string(bad)};
}

Outcome c8_risk()
{
    constexpr std::size_t n = 1'000'000;
    const auto b1 = PcBasis::build(1, 1, PolyFamily::HermiteProbabilist);
    Eigen::VectorXd id(2);
    id << 0, 1;
    const auto ex = exceedance_probability(PcSurrogate(b1, id, false, {"x"}), oracle::kNormalQ95, n, 8)[0];
    const bool tail_ok = std::abs(ex.probability - 0.05) <= 3.0 * ex.std_error;

    // The design germ is pinned, so the random part of X comes from a second
    // germ: X = xi_1 + xi_design. P(X > 0) = Phi(xi_design), binding at
    // xi_design = -1.6449.
    const auto b2 = PcBasis::build(2, 1, PolyFamily::HermiteProbabilist);
    Eigen::VectorXd c(3);
    c << 0, 1, 1;
    const PcSurrogate s(b2, c, false, {"x"});
    DesignProblem prob;
    prob.surrogate = &s;
    prob.design_dim = 1;
    prob.mean = 2.1827;
    prob.sigma = 0.2;
    prob.threshold = 0.0;
    prob.target_prob = 0.05;
    DesignSearchOptions o;
    o.lo = prob.mean - 4 * prob.sigma;
    o.hi = prob.mean + 4 * prob.sigma;
    o.samples = n;
    o.seed = 8;
    o.tol = 1e-2;
    const auto r = optimal_design(prob, o);
    const double expected = prob.mean - oracle::kNormalQ95 * prob.sigma;
    const bool design_ok = std::abs(r.optimum - expected) <= o.tol;
    return {tail_ok && design_ok, "P(X>1.6449)=" + fmt(ex.probability) + " +- " + fmt(ex.std_error) +
                                      "; Q*=" + fmt(r.optimum) + " vs " + fmt(expected) + " (tol " + fmt(o.tol) + ")"};
}

Outcome c9_moments()
{
    std::mt19937_64 gen(9);
    std::uniform_int_distribution<int> dim(1, 4), ord(1, 3);
    std::normal_distribution<double> normal;
    constexpr std::size_t n = 1'000'000;
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const int d = dim(gen), p = ord(gen);
        std::vector<PolyFamily> fam(static_cast<std::size_t>(d));
        for (auto& f : fam) f = gen() % 2 ? PolyFamily::HermiteProbabilist : PolyFamily::Legendre;
        const auto basis = PcBasis::build(d, p, fam);
        Eigen::VectorXd c(static_cast<Eigen::Index>(basis.size()));
        for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = normal(gen) / (1.0 + basis.term(static_cast<std::size_t>(k)).total_degree());
        const PcSurrogate s(basis, c, false, {"x"});
        const auto m = moments(s);
        const Eigen::VectorXd draws = sample(s, n, gen()).draws.col(0);
        const double mean = draws.mean();
        const Eigen::ArrayXd dev = draws.array() - mean;
        const double var = dev.square().mean();
        const double m4 = dev.square().square().mean();
        const double z_mean = std::abs(mean - m.mean[0]) / std::sqrt(var / n);
        const double z_var = std::abs(var - m.variance[0]) / std::sqrt((m4 - var * var) / n);
        worst = std::max({worst, z_mean, z_var});
    }
    return {worst <= 5.0, "max deviation " + fmt(worst) + " standard errors over 20 surrogates"};
}

int run_cli(const std::string& args)
{
    const std::string cmd = std::string("\"") + PCEKIT_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
}

Outcome c10_determinism()
{
    const fs::path root = fs::temp_directory_path() / "pcekit_acceptance_determinism";
    fs::remove_all(root);
    const std::string configs = PCEKIT_CONFIG_DIR;
    const std::vector<std::pair<std::string, std::vector<std::string>>> pipelines{
        {configs + "/toy_leakage.json",
         {"gen-nodes", "run-model", "run-model --validation", "project", "validate", "moments", "pdf",
          "percentiles", "risk"}},
        {configs + "/caprock.json", {"gen-nodes", "run-model", "project", "moments", "sobol", "design-opt"}},
    };
    for (const char* run : {"a", "b"}) {
        for (const auto& [config, steps] : pipelines) {
            const fs::path out = root / run / fs::path(config).stem();
            for (const auto& step : steps) {
                if (run_cli(step + " --config \"" + config + "\" --out \"" + out.string() + "\"") != 0)
                    return {false, "command failed: " + step + " (" + config + ")"};
            }
        }
    }
    std::size_t files = 0;
    for (const auto& e : fs::recursive_directory_iterator(root / "a")) {
        if (!e.is_regular_file()) continue;
        const auto other = root / "b" / fs::relative(e.path(), root / "a");
        if (!fs::exists(other) || csv::read_file(e.path()) != csv::read_file(other))
            return {false, "artifact differs: " + fs::relative(e.path(), root / "a").string()};
        ++files;
    }
    std::size_t files_b = 0;
    for (const auto& e : fs::recursive_directory_iterator(root / "b")) files_b += e.is_regular_file();
    fs::remove_all(root);
    return {files > 0 && files == files_b, std::to_string(files) + " artifacts byte-identical across two runs"};
}

}  // namespace

int main(int argc, char** argv)
{
    // Optional argument: run a single criterion by number.
    const int only = argc > 1 ? std::atoi(argv[1]) : 0;
    const std::vector<Criterion> criteria{
        {1, "discrete orthogonality (d=4 Hermite, p=4, n_q=5)", 1.0, c1_orthogonality},
        {2, "total-degree term count (d=4, p=4)", 1.0, c2_term_count},
        {3, "projection reproduces 3 + 2 xi_1 xi_2", 1.0, c3_reproduction},
        {4, "Ishigami Sobol indices (p=9, n_q=10)", 10.0, c4_ishigami},
        {5, "mixed-index and total-index identities", 5.0, c5_mixed_identity},
        {6, "cross-validation error decreases with order", 30.0, c6_cross_validation},
        {7, "log-projection positivity", 10.0, c7_positivity},
        {8, "exceedance tail and design CDF inversion", 30.0, c8_risk},
        {9, "moments match Monte Carlo", 60.0, c9_moments},
        {10, "CLI pipeline determinism", 120.0, c10_determinism},
    };
    int failures = 0;
    int ran = 0;
    for (const auto& c : criteria) {
        if (only != 0 && c.id != only) continue;
        ++ran;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.time_limit_s;
        const bool pass = o.passed && in_time;
        failures += !pass;
        std::printf("%s criterion %d: %s | %s | %.2fs (limit %.0fs)%s\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                    o.detail.c_str(), secs, c.time_limit_s, in_time ? "" : " over time limit");
        std::fflush(stdout);
    }
    if (ran == 0) {
        std::printf("no criterion %d\n", only);
        return 2;
    }
    std::printf("%d of %d criteria passed\n", ran - failures, ran);
    return failures == 0 ? 0 : 1;
}
