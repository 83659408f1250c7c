#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "pcekit/analysis.hpp"
#include "pcekit/archive.hpp"
#include "pcekit/csv.hpp"
#include "pcekit/design.hpp"
#include "pcekit/models.hpp"
#include "pcekit/projection.hpp"
#include "pcekit/sensitivity.hpp"
#include "study_config.hpp"

namespace pcekit::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.3.0";

/// Flags shared by every subcommand; unset values leave the config alone.
struct Overrides {
    std::string config;
    std::optional<std::string> out;
    std::optional<std::string> spec;
    std::optional<std::string> model;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> samples;
    std::optional<int> order;
    std::vector<int> nq;
    std::vector<int> validation_nq;
    bool log_transform = false;
    std::vector<double> thresholds;
    std::optional<double> target_prob;
    std::optional<int> design_dim;
    std::optional<std::string> output_label;

    StudyConfig resolve() const
    {
        StudyConfig c = config.empty() ? StudyConfig{} : StudyConfig::load(config);
        if (out) c.out = *out;
        if (spec) c.spec_path = fs::path(*spec);
        if (model) c.model = *model;
        if (seed) c.seed = *seed;
        if (samples) c.samples = *samples;
        if (order) c.order = *order;
        if (!nq.empty()) c.nq = nq;
        if (!validation_nq.empty()) c.validation_nq = validation_nq;
        if (log_transform) c.log_transform = true;
        if (!thresholds.empty()) c.thresholds = thresholds;
        if (target_prob) c.target_prob = *target_prob;
        if (design_dim) c.design_dim = *design_dim;
        if (output_label) c.output_label = *output_label;
        return c;
    }
};

void add_common(CLI::App* cmd, Overrides& o)
{
    cmd->add_option("--config", o.config, "Study config (JSON)");
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_option("--spec", o.spec, "Parameter spec (JSON)");
    cmd->add_option("--model", o.model, "ishigami | toy_leakage | toy_leakage_qoi | toy_caprock | external");
    cmd->add_option("--seed", o.seed, "Sampling seed");
    cmd->add_option("--samples", o.samples, "Monte Carlo sample size");
    cmd->add_option("--order", o.order, "Total polynomial degree");
    cmd->add_option("--nq", o.nq, "Quadrature points per dimension (one value or one per dimension)")
        ->delimiter(',');
    cmd->add_option("--validation-nq", o.validation_nq, "Validation grid points per dimension")
        ->delimiter(',');
    cmd->add_flag("--log-transform", o.log_transform, "Project log of the outputs");
    cmd->add_option("--threshold", o.thresholds, "Threshold(s) for risk / design")->delimiter(',');
    cmd->add_option("--target-prob", o.target_prob, "Target failure probability");
    cmd->add_option("--design-dim", o.design_dim, "Design dimension (1-based)");
    cmd->add_option("--output-label", o.output_label, "Output label to analyse");
}

/// Collects warnings and artifacts of one command and writes its run summary.
class Run {
public:
    Run(std::string command, StudyConfig cfg, std::ostream& err)
        : command_(std::move(command)), cfg_(std::move(cfg)), err_(err)
    {
        std::error_code ec;
        fs::create_directories(cfg_.out, ec);
        if (ec || !fs::is_directory(cfg_.out))
            throw std::runtime_error("cannot create output directory '" + cfg_.out.string() + "'");
    }

    const StudyConfig& cfg() const { return cfg_; }
    std::vector<std::string>& warnings() { return warnings_; }
    json& extra() { return extra_; }

    fs::path path_for(const std::string& name) const { return cfg_.out / name; }

    void input(const std::string& role, const fs::path& p) { inputs_[role] = p.filename().generic_string(); }

    void write(const std::string& name, const std::string& content)
    {
        csv::write_file_atomic(path_for(name), content);
        outputs_.push_back(name);
    }

    void finish()
    {
        for (const auto& w : warnings_) err_ << "warning: " << w << "\n";
        json summary = {
            {"command", command_},
            {"version", kVersion},
            {"config_hash", cfg_.hash()},
            {"config", cfg_.to_json()},
            {"seed", cfg_.seed},
            {"samples", cfg_.samples},
            {"inputs", inputs_},
            {"outputs", outputs_},
            {"warnings", warnings_},
        };
        if (!extra_.is_null()) summary["results"] = extra_;
        csv::write_file_atomic(path_for(command_ + ".summary.json"), summary.dump(2) + "\n");
    }

private:
    std::string command_;
    StudyConfig cfg_;
    std::ostream& err_;
    std::vector<std::string> warnings_;
    json inputs_ = json::object();
    json outputs_ = json::array();
    json extra_;
};

QuadratureRule make_rule(const StudyConfig& cfg, const ParameterSpec& spec, const std::vector<int>& counts)
{
    return QuadratureRule::tensor_grid(spec.families(), cfg.points_per_dim(counts, spec.dim()));
}

ModelOptions model_options(const StudyConfig& cfg)
{
    ModelOptions o;
    o.ishigami_a = cfg.ishigami_a;
    o.ishigami_b = cfg.ishigami_b;
    o.arrival_threshold = cfg.arrival_threshold;
    return o;
}

Eigen::Index select_output(const PcSurrogate& s, const StudyConfig& cfg)
{
    if (!cfg.output_label) return 0;
    const auto& labels = s.labels();
    for (std::size_t m = 0; m < labels.size(); ++m)
        if (labels[m] == *cfg.output_label) return static_cast<Eigen::Index>(m);
    throw std::invalid_argument("expansion has no output labelled '" + *cfg.output_label + "'");
}

std::string quantile_column(double q)
{
    const double pct = q * 100.0;
    const double rounded = std::round(pct);
    if (std::abs(pct - rounded) < 1e-9) {
        const auto v = static_cast<int>(rounded);
        return std::string("q") + (v < 10 ? "0" : "") + std::to_string(v);
    }
    return "q" + csv::format_shortest(pct);
}

PcSurrogate load_expansion(Run& run, const std::optional<std::string>& path)
{
    const fs::path p = path ? fs::path(*path) : run.path_for("expansion.json");
    run.input("expansion", p);
    try {
        return read_archive(p);
    } catch (const std::exception& e) {
        throw std::runtime_error(p.string() + ": " + e.what());
    }
}

void cmd_gen_nodes(const StudyConfig& cfg, bool validation, std::optional<std::string> file, std::ostream& err)
{
    const auto spec = cfg.parameter_spec();
    Run run("gen-nodes", cfg, err);
    const auto rule = make_rule(cfg, spec, validation ? cfg.validation_nq : cfg.nq);
    const std::string name = file.value_or(validation ? "validation_nodes.csv" : "nodes.csv");
    run.write(name, nodes_csv(rule, spec));
    run.extra() = {{"rule", rule.id()}, {"nodes", rule.size()}};
    run.finish();
}

void cmd_run_model(const StudyConfig& cfg, bool validation, std::optional<std::string> file, std::ostream& err)
{
    if (cfg.model == "external")
        throw std::invalid_argument("run-model needs a built-in model (--model); external models are "
                                    "run by the user against nodes.csv");
    const auto model = parse_model(cfg.model);
    const auto spec = cfg.parameter_spec();
    Run run("run-model", cfg, err);
    const auto rule = make_rule(cfg, spec, validation ? cfg.validation_nq : cfg.nq);
    const auto table = evaluate_model(model, spec, rule, model_options(cfg), &run.warnings());
    run.write(file.value_or(validation ? "validation_results.csv" : "results.csv"), results_csv(table));
    run.extra() = {{"rule", rule.id()}, {"model", cfg.model}};
    run.finish();
}

void cmd_project(const StudyConfig& cfg, std::optional<std::string> results, std::optional<std::string> file,
                 std::ostream& err)
{
    const auto spec = cfg.parameter_spec();
    Run run("project", cfg, err);
    const auto rule = make_rule(cfg, spec, cfg.nq);
    const fs::path rpath = results ? fs::path(*results) : run.path_for("results.csv");
    run.input("results", rpath);
    const auto table = ingest_results(rpath, rule);
    const auto basis = PcBasis::build(spec.dim(), cfg.order, spec.families());
    const auto surrogate = project(table, rule, basis, cfg.log_transform, &run.warnings());
    run.write(file.value_or("expansion.json"), surrogate_to_json(surrogate));
    run.extra() = {{"rule", rule.id()}, {"terms", basis.size()}, {"log_transformed", cfg.log_transform}};
    run.finish();
}

void cmd_evaluate(const StudyConfig& cfg, std::optional<std::string> expansion, const std::string& points,
                  std::optional<std::string> file, std::ostream& err)
{
    Run run("evaluate", cfg, err);
    const auto s = load_expansion(run, expansion);
    run.input("points", points);
    std::istringstream in(csv::read_file(points));
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument(points + ": empty points file");
    const auto header = csv::split_line(line);
    if (static_cast<int>(header.size()) != s.basis().dim())
        throw std::invalid_argument(points + ": expected " + std::to_string(s.basis().dim()) +
                                    " columns (xi_1..xi_d), found " + std::to_string(header.size()));
    std::string outcsv = "point_id";
    for (const auto& l : s.labels()) outcsv += "," + l;
    outcsv += "\n";
    std::size_t id = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = csv::split_line(line);
        if (fields.size() != header.size())
            throw std::invalid_argument(points + " line " + std::to_string(line_no) + ": wrong field count");
        std::vector<double> xi;
        for (const auto& f : fields) xi.push_back(csv::parse_double(f, points + " line " + std::to_string(line_no)));
        outcsv += std::to_string(id++);
        for (double v : s.evaluate(xi)) outcsv += "," + csv::format_double(v);
        outcsv += "\n";
    }
    run.write(file.value_or("evaluations.csv"), outcsv);
    run.finish();
}

void cmd_moments(const StudyConfig& cfg, std::optional<std::string> expansion, std::optional<std::string> file,
                 std::ostream& err)
{
    Run run("moments", cfg, err);
    const auto s = load_expansion(run, expansion);
    std::string out = "label,mean,variance,method\n";
    if (!s.log_transformed()) {
        const auto m = moments(s);
        for (std::size_t i = 0; i < m.mean.size(); ++i)
            out += s.labels()[i] + "," + csv::format_double(m.mean[i]) + "," + csv::format_double(m.variance[i]) +
                   ",coefficients\n";
    } else {
        run.warnings().push_back("log-transformed expansion: moments estimated from " +
                                 std::to_string(cfg.samples) + " surrogate samples");
        const auto batch = sample(s, cfg.samples, cfg.seed);
        const double n = static_cast<double>(batch.n);
        for (Eigen::Index m = 0; m < batch.draws.cols(); ++m) {
            const double mean = batch.draws.col(m).mean();
            const double var = (batch.draws.col(m).array() - mean).square().sum() / (n - 1.0);
            out += s.labels()[m] + "," + csv::format_double(mean) + "," + csv::format_double(var) + ",sampling\n";
        }
    }
    run.write(file.value_or("moments.csv"), out);
    run.finish();
}

void cmd_pdf(const StudyConfig& cfg, std::optional<std::string> expansion, std::size_t points,
             std::optional<std::string> file, std::ostream& err)
{
    Run run("pdf", cfg, err);
    const auto s = load_expansion(run, expansion);
    const Eigen::Index m = select_output(s, cfg);
    const auto draws = sample_outputs(s, cfg.samples, cfg.seed, m, m + 1);
    KdeGrid grid;
    grid.points = points;
    const auto est = kde(std::span<const double>(draws.data(), static_cast<std::size_t>(draws.rows())), grid);
    std::string out = "x,pdf\n";
    for (std::size_t i = 0; i < est.grid.size(); ++i)
        out += csv::format_double(est.grid[i]) + "," + csv::format_double(est.density[i]) + "\n";
    run.write(file.value_or("pdf.csv"), out);
    run.extra() = {{"label", s.labels()[m]}, {"bandwidth", est.bandwidth}};
    run.finish();
}

void cmd_percentiles(const StudyConfig& cfg, std::optional<std::string> expansion, std::optional<std::string> file,
                     std::ostream& err)
{
    Run run("percentiles", cfg, err);
    const auto s = load_expansion(run, expansion);
    const auto table = percentiles(s, cfg.quantiles, cfg.samples, cfg.seed);
    std::string out = "label";
    for (double q : cfg.quantiles) out += "," + quantile_column(q);
    out += "\n";
    for (Eigen::Index m = 0; m < table.rows(); ++m) {
        out += s.labels()[m];
        for (Eigen::Index q = 0; q < table.cols(); ++q) out += "," + csv::format_double(table(m, q));
        out += "\n";
    }
    run.write(file.value_or("percentiles.csv"), out);
    run.finish();
}

void cmd_sobol(const StudyConfig& cfg, std::optional<std::string> expansion, std::optional<std::string> file,
               std::ostream& err)
{
    Run run("sobol", cfg, err);
    const auto s = load_expansion(run, expansion);
    const auto rep = sensitivity_timeseries(s);
    const int d = rep.dim;
    std::string out = "label";
    for (int i = 0; i < d; ++i) out += ",S_" + std::to_string(i + 1);
    for (auto [i, j] : rep.pairs()) out += ",S_" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
    for (int i = 0; i < d; ++i) out += ",T_" + std::to_string(i + 1);
    out += ",T_mix,variance,defined\n";
    std::size_t undefined = 0;
    for (Eigen::Index m = 0; m < static_cast<Eigen::Index>(rep.labels.size()); ++m) {
        out += rep.labels[m];
        for (int i = 0; i < d; ++i) out += "," + csv::format_double(rep.first(i, m));
        for (Eigen::Index p = 0; p < rep.second.rows(); ++p) out += "," + csv::format_double(rep.second(p, m));
        for (int i = 0; i < d; ++i) out += "," + csv::format_double(rep.total(i, m));
        out += "," + csv::format_double(rep.mixed(m)) + "," + csv::format_double(rep.variance(m));
        out += rep.defined[m] ? ",1\n" : ",0\n";
        undefined += !rep.defined[m];
    }
    if (undefined)
        run.warnings().push_back(std::to_string(undefined) + " output(s) have zero variance; their indices are undefined");
    run.write(file.value_or("sobol.csv"), out);
    run.finish();
}

void cmd_risk(const StudyConfig& cfg, std::optional<std::string> expansion, std::optional<std::string> file,
              std::ostream& err)
{
    if (cfg.thresholds.empty()) throw std::invalid_argument("risk needs at least one --threshold");
    Run run("risk", cfg, err);
    const auto s = load_expansion(run, expansion);
    std::string out = "label,threshold,prob,stderr\n";
    for (double t : cfg.thresholds) {
        const auto probs = exceedance_probability(s, t, cfg.samples, cfg.seed);
        for (std::size_t m = 0; m < probs.size(); ++m)
            out += s.labels()[m] + "," + csv::format_double(t) + "," + csv::format_double(probs[m].probability) +
                   "," + csv::format_double(probs[m].std_error) + "\n";
    }
    run.write(file.value_or("exceedance.csv"), out);
    run.finish();
}

void cmd_design_opt(const StudyConfig& cfg, std::optional<std::string> expansion, std::ostream& err)
{
    if (cfg.thresholds.size() != 1) throw std::invalid_argument("design-opt needs exactly one --threshold");
    if (cfg.design_dim < 1) throw std::invalid_argument("design-opt needs --design-dim (1-based)");
    const auto spec = cfg.parameter_spec();
    Run run("design-opt", cfg, err);
    const auto s = load_expansion(run, expansion);
    if (spec.dim() != s.basis().dim())
        throw std::invalid_argument("parameter spec and expansion dimensions differ");
    if (cfg.design_dim > spec.dim())
        throw std::invalid_argument("--design-dim " + std::to_string(cfg.design_dim) + " exceeds dimension " +
                                    std::to_string(spec.dim()));

    const auto& param = spec.parameters()[static_cast<std::size_t>(cfg.design_dim - 1)];
    const auto& dist = param.distribution;
    DesignProblem problem;
    problem.surrogate = &s;
    problem.design_dim = cfg.design_dim - 1;
    problem.output = select_output(s, cfg);
    problem.threshold = cfg.thresholds[0];
    problem.target_prob = cfg.target_prob;
    // Design values live on the germ's affine scale: log-value for
    // lognormal inputs, the value itself for normal, and for uniform the
    // value with mean = midpoint and sigma = half-width.
    if (dist.kind == DistributionKind::Uniform) {
        problem.mean = 0.5 * (dist.first + dist.second);
        problem.sigma = 0.5 * (dist.second - dist.first);
    } else {
        problem.mean = dist.first;
        problem.sigma = dist.second;
    }

    DesignSearchOptions opt;
    opt.lo = cfg.design_lo.value_or(problem.mean - 3.0 * problem.sigma);
    opt.hi = cfg.design_hi.value_or(problem.mean + 3.0 * problem.sigma);
    opt.samples = cfg.samples;
    opt.seed = cfg.seed;
    opt.tol = cfg.design_tol;
    opt.sweep_points = cfg.design_sweep;
    opt.verify_seed = cfg.seed ^ 0x5bd1e9955bd1e995ULL;
    auto result = optimal_design(problem, opt);
    for (auto& w : result.warnings) run.warnings().push_back(w);

    std::string sweep = "design_value,prob,stderr\n";
    for (const auto& p : result.sweep)
        sweep += csv::format_double(p.value) + "," + csv::format_double(p.probability) + "," +
                 csv::format_double(p.std_error) + "\n";
    run.write("design_sweep.csv", sweep);

    const double physical = dist.kind == DistributionKind::Lognormal ? std::exp(result.optimum) : result.optimum;
    json summary = {
        {"q_star", result.optimum},
        {"q_star_physical", physical},
        {"design_parameter", param.name},
        {"target_prob", problem.target_prob},
        {"threshold", problem.threshold},
        {"n", cfg.samples},
        {"seed", cfg.seed},
        {"prob_at_q_star", result.at_optimum.probability},
        {"stderr_at_q_star", result.at_optimum.std_error},
        {"search_interval", {opt.lo, opt.hi}},
        {"tol", opt.tol},
    };
    if (result.verification)
        summary["verification"] = {{"seed", *opt.verify_seed},
                                   {"prob", result.verification->probability},
                                   {"stderr", result.verification->std_error}};
    run.write("design.json", summary.dump(2) + "\n");
    run.extra() = summary;
    run.finish();
}

void cmd_validate(const StudyConfig& cfg, std::optional<std::string> expansion, std::optional<std::string> results,
                  std::optional<std::string> file, std::ostream& err)
{
    const auto spec = cfg.parameter_spec();
    Run run("validate", cfg, err);
    const auto s = load_expansion(run, expansion);
    const auto construction = make_rule(cfg, spec, cfg.nq);
    const auto validation = make_rule(cfg, spec, cfg.validation_nq);
    if (construction.points_per_dim() == validation.points_per_dim())
        run.warnings().push_back("grids are nested/identical: construction and validation both use " +
                                 validation.id() + "; the error estimate is not a cross-validation");
    else if (!validation.is_non_nested_with(construction))
        run.warnings().push_back("grids are nested/identical: validation grid " + validation.id() +
                                 " shares nodes with construction grid " + construction.id());

    const fs::path rpath = results ? fs::path(*results) : run.path_for("validation_results.csv");
    run.input("validation_results", rpath);
    const auto table = ingest_results(rpath, validation);
    const auto e = relative_l2_error(s, table, validation);
    std::string out = "label,e_rel,e_rel_physical\n";
    for (std::size_t m = 0; m < e.native.size(); ++m)
        out += s.labels()[m] + "," + csv::format_double(e.native[m]) + "," + csv::format_double(e.physical[m]) + "\n";
    run.write(file.value_or("l2_error.csv"), out);
    run.extra() = {{"construction_rule", construction.id()}, {"validation_rule", validation.id()},
                   {"space", s.log_transformed() ? "log" : "physical"}};
    run.finish();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Polynomial chaos surrogates: projection, sensitivity, risk and design", "pcekit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    Overrides o;
    std::optional<std::string> file, expansion, results, points_file;
    bool validation = false;
    std::size_t pdf_points = 512;

    auto sub = [&](const char* name, const char* desc) {
        CLI::App* c = app.add_subcommand(name, desc);
        add_common(c, o);
        c->add_option("--file", file, "Output file name inside --out");
        return c;
    };

    auto* gen = sub("gen-nodes", "Write the quadrature node table");
    gen->add_flag("--validation", validation, "Use the validation grid");
    auto* runm = sub("run-model", "Evaluate a built-in model at the nodes");
    runm->add_flag("--validation", validation, "Use the validation grid");
    auto* proj = sub("project", "Compute PC coefficients from a results table");
    proj->add_option("--results", results, "results.csv");
    auto* eval = sub("evaluate", "Evaluate the expansion at canonical points");
    eval->add_option("--expansion", expansion, "expansion.json");
    eval->add_option("--points", points_file, "CSV of canonical points")->required();
    auto* mom = sub("moments", "Mean and variance per output");
    mom->add_option("--expansion", expansion, "expansion.json");
    auto* pdf = sub("pdf", "Kernel density estimate of one output");
    pdf->add_option("--expansion", expansion, "expansion.json");
    pdf->add_option("--points", pdf_points, "Density grid points");
    auto* pct = sub("percentiles", "Percentile bands per output");
    pct->add_option("--expansion", expansion, "expansion.json");
    auto* sob = sub("sobol", "Sensitivity indices per output");
    sob->add_option("--expansion", expansion, "expansion.json");
    auto* risk = sub("risk", "Exceedance probabilities per output");
    risk->add_option("--expansion", expansion, "expansion.json");
    auto* des = sub("design-opt", "Largest design value meeting the failure target");
    des->add_option("--expansion", expansion, "expansion.json");
    std::optional<double> lo, hi, tol;
    des->add_option("--lo", lo, "Lower end of the design search interval");
    des->add_option("--hi", hi, "Upper end of the design search interval");
    des->add_option("--tol", tol, "Bisection tolerance");
    auto* val = sub("validate", "Relative L2 error on a validation grid");
    val->add_option("--expansion", expansion, "expansion.json");
    val->add_option("--results", results, "validation_results.csv");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        StudyConfig cfg = o.resolve();
        if (lo) cfg.design_lo = *lo;
        if (hi) cfg.design_hi = *hi;
        if (tol) cfg.design_tol = *tol;

        if (gen->parsed()) cmd_gen_nodes(cfg, validation, file, err);
        else if (runm->parsed()) cmd_run_model(cfg, validation, file, err);
        else if (proj->parsed()) cmd_project(cfg, results, file, err);
        else if (eval->parsed()) cmd_evaluate(cfg, expansion, *points_file, file, err);
        else if (mom->parsed()) cmd_moments(cfg, expansion, file, err);
        else if (pdf->parsed()) cmd_pdf(cfg, expansion, pdf_points, file, err);
        else if (pct->parsed()) cmd_percentiles(cfg, expansion, file, err);
        else if (sob->parsed()) cmd_sobol(cfg, expansion, file, err);
        else if (risk->parsed()) cmd_risk(cfg, expansion, file, err);
        else if (des->parsed()) cmd_design_opt(cfg, expansion, err);
        else if (val->parsed()) cmd_validate(cfg, expansion, results, file, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace pcekit::cli
