#include "pcekit/models.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "pcekit/csv.hpp"
#include "pcekit/parallel.hpp"

namespace pcekit {

using nlohmann::json;

PolyFamily Distribution::family() const
{
    return kind == DistributionKind::Uniform ? PolyFamily::Legendre : PolyFamily::HermiteProbabilist;
}

double Distribution::to_physical(double xi) const
{
    switch (kind) {
    case DistributionKind::Lognormal: return std::exp(first + second * xi);
    case DistributionKind::Normal: return first + second * xi;
    case DistributionKind::Uniform: return 0.5 * (first + second) + 0.5 * (second - first) * xi;
    }
    return 0.0;
}

double Distribution::to_canonical(double x) const
{
    switch (kind) {
    case DistributionKind::Lognormal:
        if (!(x > 0.0)) throw std::domain_error("lognormal value must be positive");
        return (std::log(x) - first) / second;
    case DistributionKind::Normal: return (x - first) / second;
    case DistributionKind::Uniform: return (x - 0.5 * (first + second)) / (0.5 * (second - first));
    }
    return 0.0;
}

void Distribution::validate() const
{
    if (!std::isfinite(first) || !std::isfinite(second))
        throw std::invalid_argument("distribution parameters must be finite");
    if (kind == DistributionKind::Uniform) {
        if (!(first < second)) throw std::invalid_argument("uniform distribution needs a < b");
    } else if (!(second > 0.0)) {
        throw std::invalid_argument("distribution sigma must be positive");
    }
}

ParameterSpec::ParameterSpec(std::vector<Parameter> parameters) : parameters_(std::move(parameters))
{
    if (parameters_.empty()) throw std::invalid_argument("parameter spec needs at least one parameter");
    for (const auto& p : parameters_) {
        if (p.name.empty()) throw std::invalid_argument("parameter names must be non-empty");
        if (p.name.find_first_of(",\n\r") != std::string::npos)
            throw std::invalid_argument("parameter name '" + p.name + "' contains a CSV separator");
        try {
            p.distribution.validate();
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("parameter '" + p.name + "': " + e.what());
        }
    }
}

ParameterSpec ParameterSpec::leakage_defaults()
{
    // Log-parameters are N(mu, variance); the leaky-well entry is given as a
    // variance of 0.3679.
    return ParameterSpec({
        {"porosity", Distribution::lognormal(-1.8971, 0.2)},
        {"perm_aquifer", Distribution::lognormal(-30.002, 1.2)},
        {"perm_well", Distribution::lognormal(-27.631, std::sqrt(0.3679))},
        {"injection_rate", Distribution::lognormal(2.1827, 0.2)},
    });
}

ParameterSpec ParameterSpec::ishigami_defaults()
{
    const double pi = std::numbers::pi;
    return ParameterSpec({
        {"x1", Distribution::uniform(-pi, pi)},
        {"x2", Distribution::uniform(-pi, pi)},
        {"x3", Distribution::uniform(-pi, pi)},
    });
}

ParameterSpec ParameterSpec::from_json(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("parameter spec is not valid JSON: ") + e.what());
    }
    std::vector<Parameter> params;
    try {
        for (const auto& p : doc.at("parameters")) {
            Parameter param;
            param.name = p.at("name").get<std::string>();
            const auto kind = p.at("distribution").get<std::string>();
            if (kind == "lognormal") {
                param.distribution = Distribution::lognormal(p.at("mu").get<double>(), p.at("sigma").get<double>());
            } else if (kind == "normal") {
                param.distribution = Distribution::normal(p.at("mu").get<double>(), p.at("sigma").get<double>());
            } else if (kind == "uniform") {
                param.distribution = Distribution::uniform(p.at("a").get<double>(), p.at("b").get<double>());
            } else {
                throw std::invalid_argument("parameter '" + param.name + "': unknown distribution '" +
                                            kind + "'");
            }
            params.push_back(std::move(param));
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed parameter spec: ") + e.what());
    }
    return ParameterSpec(std::move(params));
}

ParameterSpec ParameterSpec::load(const std::filesystem::path& path)
{
    try {
        return from_json(csv::read_file(path));
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
}

std::string ParameterSpec::to_json() const
{
    json params = json::array();
    for (const auto& p : parameters_) {
        json j = {{"name", p.name}};
        const auto& d = p.distribution;
        switch (d.kind) {
        case DistributionKind::Lognormal:
            j["distribution"] = "lognormal";
            j["mu"] = d.first;
            j["sigma"] = d.second;
            break;
        case DistributionKind::Normal:
            j["distribution"] = "normal";
            j["mu"] = d.first;
            j["sigma"] = d.second;
            break;
        case DistributionKind::Uniform:
            j["distribution"] = "uniform";
            j["a"] = d.first;
            j["b"] = d.second;
            break;
        }
        params.push_back(std::move(j));
    }
    return json{{"parameters", params}}.dump(2) + "\n";
}

std::vector<PolyFamily> ParameterSpec::families() const
{
    std::vector<PolyFamily> out;
    for (const auto& p : parameters_) out.push_back(p.distribution.family());
    return out;
}

std::vector<double> ParameterSpec::to_physical(std::span<const double> xi) const
{
    if (xi.size() != parameters_.size())
        throw std::invalid_argument("germ dimension does not match the parameter spec");
    std::vector<double> out(xi.size());
    for (std::size_t i = 0; i < xi.size(); ++i) out[i] = parameters_[i].distribution.to_physical(xi[i]);
    return out;
}

double ishigami_physical(std::span<const double> x, double a, double b)
{
    if (x.size() != 3) throw std::invalid_argument("Ishigami function takes three inputs");
    const double s1 = std::sin(x[0]);
    const double s2 = std::sin(x[1]);
    const double x3sq = x[2] * x[2];
    return s1 + a * s2 * s2 + b * x3sq * x3sq * s1;
}

double ishigami(std::span<const double> xi, double a, double b)
{
    if (xi.size() != 3) throw std::invalid_argument("Ishigami function takes three inputs");
    const double pi = std::numbers::pi;
    const double x[3] = {pi * xi[0], pi * xi[1], pi * xi[2]};
    return ishigami_physical(x, a, b);
}

namespace {

struct LeakageReference {
    double porosity = std::exp(-1.8971);
    double perm_aquifer = std::exp(-30.002);
    double perm_well = std::exp(-27.631);
    double injection_rate = std::exp(2.1827);
};

void require_positive(const LeakageParams& p)
{
    if (!(p.porosity > 0.0 && p.perm_aquifer > 0.0 && p.perm_well > 0.0 && p.injection_rate > 0.0))
        throw std::invalid_argument("leakage model parameters must be positive");
}

}  // namespace

TimeSeriesOutput toy_leakage(const LeakageParams& params, std::span<const double> times)
{
    require_positive(params);
    const LeakageReference ref;
    const double tau = 130.0 * (params.porosity / ref.porosity) * (ref.injection_rate / params.injection_rate);
    const double amplitude = 0.06 * std::pow(params.perm_well / ref.perm_well, 0.5) *
                             std::pow(params.perm_aquifer / ref.perm_aquifer, -0.3) *
                             std::pow(params.injection_rate / ref.injection_rate, 0.3);

    TimeSeriesOutput out;
    out.times.assign(times.begin(), times.end());
    out.values.resize(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double u = std::max(times[i], 0.0) / tau;
        const double u4 = u * u * u * u;
        const double rise = u4 / (1.0 + u4);
        out.values[i] = amplitude * (1e-5 + rise * (1.0 + 1.5 * std::exp(-0.5 * u)));
    }
    return out;
}

std::vector<double> default_leakage_times()
{
    std::vector<double> t{0.0};
    constexpr int kCount = 80;
    for (int i = 0; i < kCount; ++i) {
        const double v = std::pow(1500.0, static_cast<double>(i) / (kCount - 1));
        t.push_back(std::round(v * 100.0) / 100.0);
    }
    return t;
}

std::vector<double> default_qoi_times()
{
    std::vector<double> t{0.0};
    constexpr int kCount = 2000;
    for (int i = 0; i < kCount; ++i) t.push_back(std::pow(1500.0, static_cast<double>(i) / (kCount - 1)));
    return t;
}

double toy_caprock_pressure(const LeakageParams& params)
{
    require_positive(params);
    const LeakageReference ref;
    return 300.0 + 20.0 * (params.injection_rate / ref.injection_rate) *
                       std::pow(params.perm_aquifer / ref.perm_aquifer, -0.25) *
                       std::pow(params.porosity / ref.porosity, -0.2) *
                       std::pow(params.perm_well / ref.perm_well, -0.05);
}

LeakageParams leakage_params_from(std::span<const double> physical)
{
    if (physical.size() != 4)
        throw std::invalid_argument("leakage models take four inputs (porosity, aquifer "
                                    "permeability, well permeability, injection rate)");
    return {physical[0], physical[1], physical[2], physical[3]};
}

QoiSet extract_qois(const TimeSeriesOutput& series, double arrival_threshold)
{
    const auto& t = series.times;
    const auto& v = series.values;
    if (t.empty() || t.size() != v.size()) throw std::invalid_argument("QoI extraction needs a non-empty series");

    QoiSet q;
    const auto peak = std::max_element(v.begin(), v.end());
    q.q_max = *peak;
    q.t_maxleak = t[static_cast<std::size_t>(peak - v.begin())];

    const auto first = std::find_if(v.begin(), v.end(), [&](double x) { return x > arrival_threshold; });
    if (first == v.end()) {
        q.censored = true;
        q.t_arrival = t.back();
        return q;
    }
    const auto i = static_cast<std::size_t>(first - v.begin());
    if (i == 0) {
        q.t_arrival = t[0];
    } else {
        const double frac = (arrival_threshold - v[i - 1]) / (v[i] - v[i - 1]);
        q.t_arrival = t[i - 1] + frac * (t[i] - t[i - 1]);
    }
    return q;
}

BuiltinModel parse_model(std::string_view name)
{
    if (name == "ishigami") return BuiltinModel::Ishigami;
    if (name == "toy_leakage") return BuiltinModel::ToyLeakage;
    if (name == "toy_leakage_qoi") return BuiltinModel::ToyLeakageQoi;
    if (name == "toy_caprock") return BuiltinModel::ToyCaprock;
    throw std::invalid_argument("unknown built-in model '" + std::string(name) + "'");
}

std::string_view to_string(BuiltinModel model)
{
    switch (model) {
    case BuiltinModel::Ishigami: return "ishigami";
    case BuiltinModel::ToyLeakage: return "toy_leakage";
    case BuiltinModel::ToyLeakageQoi: return "toy_leakage_qoi";
    case BuiltinModel::ToyCaprock: return "toy_caprock";
    }
    return "unknown";
}

EvaluationTable evaluate_model(BuiltinModel model, const ParameterSpec& spec,
                               const QuadratureRule& rule, const ModelOptions& options,
                               std::vector<std::string>* warnings)
{
    if (spec.dim() != rule.dim())
        throw std::invalid_argument("parameter spec has " + std::to_string(spec.dim()) +
                                    " dimensions, quadrature rule has " + std::to_string(rule.dim()));
    if (spec.families() != rule.families())
        throw std::invalid_argument("quadrature families do not match the parameter distributions");

    std::vector<std::string> labels;
    switch (model) {
    case BuiltinModel::Ishigami: labels = {"y"}; break;
    case BuiltinModel::ToyLeakage:
        if (options.times.empty()) throw std::invalid_argument("toy leakage model needs time labels");
        for (double t : options.times) labels.push_back(csv::format_shortest(t));
        break;
    case BuiltinModel::ToyLeakageQoi: labels = {"t_arrival", "q_max", "t_maxleak"}; break;
    case BuiltinModel::ToyCaprock: labels = {"p_caprock"}; break;
    }
    if (model == BuiltinModel::Ishigami && spec.dim() != 3)
        throw std::invalid_argument("Ishigami model needs a 3-dimensional spec");
    if (model != BuiltinModel::Ishigami && spec.dim() != 4)
        throw std::invalid_argument(std::string(to_string(model)) + " needs a 4-dimensional spec");

    const auto nq = static_cast<Eigen::Index>(rule.size());
    Eigen::MatrixXd out(nq, static_cast<Eigen::Index>(labels.size()));
    std::vector<char> censored(rule.size(), 0);
    parallel_for(rule.size(), [&](std::size_t j) {
        const auto x = spec.to_physical(rule.node(j));
        const auto row = static_cast<Eigen::Index>(j);
        switch (model) {
        case BuiltinModel::Ishigami:
            out(row, 0) = ishigami_physical(x, options.ishigami_a, options.ishigami_b);
            break;
        case BuiltinModel::ToyLeakage: {
            const auto s = toy_leakage(leakage_params_from(x), options.times);
            for (std::size_t m = 0; m < s.values.size(); ++m) out(row, static_cast<Eigen::Index>(m)) = s.values[m];
            break;
        }
        case BuiltinModel::ToyLeakageQoi: {
            const auto q = extract_qois(toy_leakage(leakage_params_from(x), options.qoi_times),
                                        options.arrival_threshold);
            out(row, 0) = q.t_arrival;
            out(row, 1) = q.q_max;
            out(row, 2) = q.t_maxleak;
            censored[j] = q.censored;
            break;
        }
        case BuiltinModel::ToyCaprock: out(row, 0) = toy_caprock_pressure(leakage_params_from(x)); break;
        }
    });
    const auto ncens = std::count(censored.begin(), censored.end(), 1);
    if (ncens > 0 && warnings)
        warnings->push_back(std::to_string(ncens) + " of " + std::to_string(rule.size()) +
                            " arrival times are censored at the horizon");
    return EvaluationTable(rule, std::move(out), std::move(labels));
}

std::string nodes_csv(const QuadratureRule& rule, const ParameterSpec& spec)
{
    if (spec.dim() != rule.dim())
        throw std::invalid_argument("parameter spec has " + std::to_string(spec.dim()) +
                                    " dimensions, quadrature rule has " + std::to_string(rule.dim()));
    std::string s = "node_id";
    for (int i = 0; i < rule.dim(); ++i) s += ",xi_" + std::to_string(i + 1);
    for (const auto& p : spec.parameters()) s += "," + p.name;
    s += ",weight\n";
    for (std::size_t j = 0; j < rule.size(); ++j) {
        const auto xi = rule.node(j);
        s += std::to_string(j);
        for (double v : xi) s += "," + csv::format_double(v);
        for (double v : spec.to_physical(xi)) s += "," + csv::format_double(v);
        s += "," + csv::format_double(rule.weight(j)) + "\n";
    }
    return s;
}

void emit_nodes(const std::filesystem::path& path, const QuadratureRule& rule, const ParameterSpec& spec)
{
    csv::write_file_atomic(path, nodes_csv(rule, spec));
}

std::string results_csv(const EvaluationTable& table)
{
    std::string s = "node_id";
    for (const auto& l : table.labels()) s += "," + l;
    s += "\n";
    for (Eigen::Index j = 0; j < table.rows(); ++j) {
        s += std::to_string(j);
        for (Eigen::Index m = 0; m < table.num_outputs(); ++m) s += "," + csv::format_double(table.outputs()(j, m));
        s += "\n";
    }
    return s;
}

EvaluationTable parse_results(std::string_view text, const QuadratureRule& rule, std::string_view source)
{
    const std::string src(source);
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument(src + ": empty results file");
    auto header = csv::split_line(line);
    if (header.empty() || header[0] != "node_id")
        throw std::invalid_argument(src + ": header must start with node_id");
    std::vector<std::string> labels(header.begin() + 1, header.end());
    if (labels.empty()) throw std::invalid_argument(src + ": no output columns");

    const auto nq = rule.size();
    Eigen::MatrixXd outputs(static_cast<Eigen::Index>(nq), static_cast<Eigen::Index>(labels.size()));
    std::vector<char> seen(nq, 0);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = csv::split_line(line);
        const std::string where = src + " line " + std::to_string(line_no);
        if (fields.size() != header.size())
            throw std::invalid_argument(where + ": expected " + std::to_string(header.size()) +
                                        " fields, found " + std::to_string(fields.size()));
        const double id_val = csv::parse_double(fields[0], where + " node_id");
        if (id_val < 0 || id_val != std::floor(id_val) || id_val >= static_cast<double>(nq))
            throw std::invalid_argument(where + ": node_id " + fields[0] + " is not a node of rule " + rule.id());
        const auto id = static_cast<std::size_t>(id_val);
        if (seen[id]) throw std::invalid_argument(where + ": duplicate node_id " + std::to_string(id));
        seen[id] = 1;
        for (std::size_t m = 0; m < labels.size(); ++m) {
            const double v = csv::parse_double(fields[m + 1], where + " column '" + labels[m] + "'");
            if (!std::isfinite(v))
                throw std::invalid_argument(where + ": non-finite value in column '" + labels[m] + "'");
            outputs(static_cast<Eigen::Index>(id), static_cast<Eigen::Index>(m)) = v;
        }
    }
    for (std::size_t j = 0; j < nq; ++j)
        if (!seen[j]) throw std::invalid_argument(src + ": missing node_id " + std::to_string(j));
    return EvaluationTable(rule, std::move(outputs), std::move(labels));
}

EvaluationTable ingest_results(const std::filesystem::path& path, const QuadratureRule& rule)
{
    return parse_results(csv::read_file(path), rule, path.string());
}

}  // namespace pcekit
