#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcekit/projection.hpp"
#include "pcekit/quadrature.hpp"

namespace pcekit {

enum class DistributionKind { Lognormal, Normal, Uniform };

/// Law of one physical input and its map from the canonical germ:
///   lognormal(mu, sigma): exp(mu + sigma xi), xi ~ N(0,1)   (Hermite)
///   normal(mu, sigma):    mu + sigma xi,      xi ~ N(0,1)   (Hermite)
///   uniform(a, b):        (a+b)/2 + (b-a)/2 xi, xi ~ U(-1,1) (Legendre)
struct Distribution {
    DistributionKind kind = DistributionKind::Normal;
    double first = 0.0;   // mu or a
    double second = 1.0;  // sigma or b

    static Distribution lognormal(double mu, double sigma) { return {DistributionKind::Lognormal, mu, sigma}; }
    static Distribution normal(double mu, double sigma) { return {DistributionKind::Normal, mu, sigma}; }
    static Distribution uniform(double a, double b) { return {DistributionKind::Uniform, a, b}; }

    PolyFamily family() const;
    double to_physical(double xi) const;
    double to_canonical(double x) const;
    void validate() const;
};

struct Parameter {
    std::string name;
    Distribution distribution;
};

class ParameterSpec {
public:
    explicit ParameterSpec(std::vector<Parameter> parameters);

    /// Log-normal porosity, aquifer permeability, leaky-well permeability and
    /// injection rate of the CO2 leakage benchmark setup.
    static ParameterSpec leakage_defaults();
    /// Three inputs uniform on [-pi, pi].
    static ParameterSpec ishigami_defaults();

    static ParameterSpec from_json(std::string_view text);
    static ParameterSpec load(const std::filesystem::path& path);
    std::string to_json() const;

    int dim() const { return static_cast<int>(parameters_.size()); }
    const std::vector<Parameter>& parameters() const { return parameters_; }
    std::vector<PolyFamily> families() const;
    std::vector<double> to_physical(std::span<const double> xi) const;

private:
    std::vector<Parameter> parameters_;
};

/// sin x1 + a sin^2 x2 + b x3^4 sin x1 at physical x in [-pi, pi]^3.
double ishigami_physical(std::span<const double> x, double a, double b);
/// Same, at canonical xi in [-1,1]^3 with x = pi xi.
double ishigami(std::span<const double> xi, double a, double b);

struct LeakageParams {
    double porosity;
    double perm_aquifer;
    double perm_well;
    double injection_rate;
};

struct TimeSeriesOutput {
    std::vector<double> times;
    std::vector<double> values;
};

/// Synthetic stand-in for a leakage-rate simulator (percent of injection
/// rate over time in days). It is not a physical model. Closed form:
///
///   tau(t)  = 130 d * (phi / phi_ref) * (Q / Q_ref)^-1
///   A       = 0.06 * (K_L / K_L_ref)^0.5 * (K_A / K_A_ref)^-0.3 * (Q / Q_ref)^0.3
///   u       = t / tau
///   Q_leak  = A * (1e-5 + u^4 / (1 + u^4) * (1 + 1.5 exp(-u / 2)))
///
/// with reference values at the medians of leakage_defaults(). The rise is
/// controlled by porosity and injection rate, the plateau by the two
/// permeabilities; the curve peaks near u = 2 and relaxes to A.
TimeSeriesOutput toy_leakage(const LeakageParams& params, std::span<const double> times);

/// 0 followed by 80 log-spaced labels from 1 to 1500 days.
std::vector<double> default_leakage_times();

/// 0 followed by 2000 log-spaced times from 1 to 1500 days; QoI extraction
/// runs on this grid so arrival and peak times are not quantized to the
/// coarse output labels.
std::vector<double> default_qoi_times();

/// Synthetic end-time caprock pressure [bar], increasing in injection rate:
///   300 + 20 (Q/Q_ref) (K_A/K_A_ref)^-0.25 (phi/phi_ref)^-0.2 (K_L/K_L_ref)^-0.05
double toy_caprock_pressure(const LeakageParams& params);

LeakageParams leakage_params_from(std::span<const double> physical);

struct QoiSet {
    double t_arrival = 0.0;
    bool censored = false;  // never exceeded the threshold; t_arrival is the horizon
    double q_max = 0.0;
    double t_maxleak = 0.0;
};

/// Arrival time (first crossing of `arrival_threshold`, linearly
/// interpolated between samples), peak value and its time label.
QoiSet extract_qois(const TimeSeriesOutput& series, double arrival_threshold = 3.0e-3);

enum class BuiltinModel { Ishigami, ToyLeakage, ToyLeakageQoi, ToyCaprock };

BuiltinModel parse_model(std::string_view name);
std::string_view to_string(BuiltinModel model);

struct ModelOptions {
    double ishigami_a = 7.0;
    double ishigami_b = 0.1;
    std::vector<double> times = default_leakage_times();
    std::vector<double> qoi_times = default_qoi_times();
    double arrival_threshold = 3.0e-3;
};

/// Evaluates a built-in model at every node of the rule. Censored arrival
/// times (ToyLeakageQoi) are reported through `warnings`.
EvaluationTable evaluate_model(BuiltinModel model, const ParameterSpec& spec,
                               const QuadratureRule& rule, const ModelOptions& options = {},
                               std::vector<std::string>* warnings = nullptr);

/// Node table: header "node_id,xi_1..xi_d,<parameter names>,weight", one row
/// per node in odometer order, node ids from 0.
std::string nodes_csv(const QuadratureRule& rule, const ParameterSpec& spec);
void emit_nodes(const std::filesystem::path& path, const QuadratureRule& rule,
                const ParameterSpec& spec);

/// Results table: header "node_id,<label_1>..<label_M>", rows in any order.
std::string results_csv(const EvaluationTable& table);

/// Parses a results table and binds it to the rule. Every node id must
/// appear exactly once with finite values.
EvaluationTable parse_results(std::string_view text, const QuadratureRule& rule,
                              std::string_view source = "results");
EvaluationTable ingest_results(const std::filesystem::path& path, const QuadratureRule& rule);

}  // namespace pcekit
