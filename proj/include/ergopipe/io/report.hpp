#pragma once

#include <filesystem>
#include <optional>
#include <span>

#include "ergopipe/reba.hpp"

namespace ergopipe::io {

// One CSV row per (frame, person) with the full breakdown, followed by a
// summary block with the score/category distribution and, when known, the
// unmatched fraction of the upstream matching stage.
void write_reba_report(std::span<const reba::RebaBreakdown> breakdowns,
                       const std::filesystem::path& path,
                       std::optional<double> unmatched_fraction = {},
                       int n_skipped = 0);

// Appends the original-versus-obfuscated comparison block produced by
// compare_breakdowns.
void append_comparison_block(const reba::CompareReport& report,
                             const std::filesystem::path& path);

}  // namespace ergopipe::io
