#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcekit/models.hpp"

namespace pcekit::cli {

/// Effective settings of one CLI run: the optional --config file overlaid
/// with command-line flags.
struct StudyConfig {
    std::optional<std::filesystem::path> spec_path;
    std::string model = "external";
    int order = 4;
    std::vector<int> nq{5};
    std::vector<int> validation_nq{4};
    bool log_transform = false;
    std::uint64_t seed = 20240611;
    std::size_t samples = 1'000'000;
    std::filesystem::path out = ".";
    std::vector<double> thresholds;
    std::vector<double> quantiles{0.05, 0.25, 0.5, 0.75, 0.95};
    double target_prob = 0.05;
    int design_dim = 0;  // 1-based; 0 means unset
    std::optional<double> design_lo;
    std::optional<double> design_hi;
    double design_tol = 1e-3;
    std::size_t design_sweep = 41;
    std::optional<std::string> output_label;
    double ishigami_a = 7.0;
    double ishigami_b = 0.1;
    double arrival_threshold = 3.0e-3;

    /// Reads a study config; relative paths resolve against its directory.
    static StudyConfig load(const std::filesystem::path& path);

    /// Settings that determine results; the output directory is excluded so
    /// identical studies hash identically wherever they are written.
    nlohmann::json to_json() const;
    /// FNV-1a of the canonical JSON dump, as 16 hex digits.
    std::string hash() const;

    ParameterSpec parameter_spec() const;
    /// Per-dimension point counts, expanding a single isotropic value.
    std::vector<int> points_per_dim(const std::vector<int>& counts, int dim) const;
};

}  // namespace pcekit::cli
