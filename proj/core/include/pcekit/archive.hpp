#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "pcekit/projection.hpp"

namespace pcekit {

/// Expansion archive (JSON):
///   {"basis": {"dim", "order", "families", "multi_indices"},
///    "log_transformed", "output_labels", "coeffs"}
/// `coeffs` is row-major: coeffs[k][m] for term k, output m. Doubles are
/// written in shortest round-trip form, so write -> read is bit-exact.
std::string surrogate_to_json(const PcSurrogate& surrogate);
PcSurrogate surrogate_from_json(std::string_view text);

void write_archive(const std::filesystem::path& path, const PcSurrogate& surrogate);
PcSurrogate read_archive(const std::filesystem::path& path);

}  // namespace pcekit
