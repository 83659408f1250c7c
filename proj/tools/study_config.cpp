#include "study_config.hpp"

#include <cstdio>
#include <stdexcept>

#include "pcekit/csv.hpp"

namespace pcekit::cli {

using nlohmann::json;

namespace {

std::vector<int> int_or_list(const json& j)
{
    if (j.is_number_integer()) return {j.get<int>()};
    return j.get<std::vector<int>>();
}

}  // namespace

StudyConfig StudyConfig::load(const std::filesystem::path& path)
{
    json doc;
    try {
        doc = json::parse(csv::read_file(path));
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(path.string() + ": not valid JSON: " + e.what());
    }

    StudyConfig c;
    const auto base = path.parent_path();
    try {
        if (doc.contains("spec")) {
            std::filesystem::path p = doc["spec"].get<std::string>();
            c.spec_path = p.is_absolute() ? p : base / p;
        }
        if (doc.contains("out")) {
            std::filesystem::path p = doc["out"].get<std::string>();
            c.out = p.is_absolute() ? p : base / p;
        }
        c.model = doc.value("model", c.model);
        c.order = doc.value("order", c.order);
        if (doc.contains("nq")) c.nq = int_or_list(doc["nq"]);
        if (doc.contains("validation_nq")) c.validation_nq = int_or_list(doc["validation_nq"]);
        c.log_transform = doc.value("log_transform", c.log_transform);
        c.seed = doc.value("seed", c.seed);
        c.samples = doc.value("samples", c.samples);
        c.thresholds = doc.value("thresholds", c.thresholds);
        c.quantiles = doc.value("quantiles", c.quantiles);
        c.target_prob = doc.value("target_prob", c.target_prob);
        c.design_dim = doc.value("design_dim", c.design_dim);
        if (doc.contains("design_lo")) c.design_lo = doc["design_lo"].get<double>();
        if (doc.contains("design_hi")) c.design_hi = doc["design_hi"].get<double>();
        c.design_tol = doc.value("design_tol", c.design_tol);
        c.design_sweep = doc.value("design_sweep", c.design_sweep);
        if (doc.contains("output_label")) c.output_label = doc["output_label"].get<std::string>();
        c.arrival_threshold = doc.value("arrival_threshold", c.arrival_threshold);
        if (doc.contains("ishigami")) {
            c.ishigami_a = doc["ishigami"].value("a", c.ishigami_a);
            c.ishigami_b = doc["ishigami"].value("b", c.ishigami_b);
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
    return c;
}

json StudyConfig::to_json() const
{
    json j = {
        {"model", model},
        {"order", order},
        {"nq", nq},
        {"validation_nq", validation_nq},
        {"log_transform", log_transform},
        {"seed", seed},
        {"samples", samples},
        {"thresholds", thresholds},
        {"quantiles", quantiles},
        {"target_prob", target_prob},
        {"design_dim", design_dim},
        {"design_tol", design_tol},
        {"design_sweep", design_sweep},
        {"arrival_threshold", arrival_threshold},
        {"ishigami", {{"a", ishigami_a}, {"b", ishigami_b}}},
    };
    j["spec"] = spec_path ? json(spec_path->filename().generic_string()) : json(nullptr);
    j["design_lo"] = design_lo ? json(*design_lo) : json(nullptr);
    j["design_hi"] = design_hi ? json(*design_hi) : json(nullptr);
    j["output_label"] = output_label ? json(*output_label) : json(nullptr);
    return j;
}

std::string StudyConfig::hash() const
{
    const std::string s = to_json().dump();
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ParameterSpec StudyConfig::parameter_spec() const
{
    if (spec_path) return ParameterSpec::load(*spec_path);
    if (model == "ishigami") return ParameterSpec::ishigami_defaults();
    if (model == "toy_leakage" || model == "toy_leakage_qoi" || model == "toy_caprock")
        return ParameterSpec::leakage_defaults();
    throw std::invalid_argument("a parameter spec (\"spec\" in the config) is required for model '" +
                                model + "'");
}

std::vector<int> StudyConfig::points_per_dim(const std::vector<int>& counts, int dim) const
{
    if (counts.size() == 1) return std::vector<int>(static_cast<std::size_t>(dim), counts[0]);
    if (counts.size() != static_cast<std::size_t>(dim))
        throw std::invalid_argument("nq lists " + std::to_string(counts.size()) +
                                    " point counts for a " + std::to_string(dim) +
                                    "-dimensional parameter spec");
    return counts;
}

}  // namespace pcekit::cli
