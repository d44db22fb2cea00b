#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "authpipe/runner.hpp"

namespace authpipe {

enum class TableKind {
  forgery_detection_with,
  forgery_detection_without,
  synthetic_detection,
};

std::string_view to_string(TableKind kind);

struct ReportSpec {
  std::string artist_tag;
  TableKind kind = TableKind::forgery_detection_with;
  std::vector<std::string> formats = {"csv", "markdown", "svg"};
};

// Column groups for a table kind: forgery tables report (forgeries,
// originals); the synthetic table reports (Stable Diffusion, tuned GANs).
std::vector<EvalGroup> table_columns(TableKind kind);

struct RenderedTable {
  std::string csv;
  std::string markdown;
  std::size_t n_rows = 0;
};

// Paper-ordered rows (contrast-major, backbones within), parenthesis
// notation cells, column best marked (bold in markdown, flag columns in
// csv). Throws on empty summaries for the kind.
RenderedTable render_table(const std::vector<SummaryRow>& summaries,
                           const ReportSpec& spec);

// Grouped bar chart with error bars and dotted no_synthetic baselines, one
// chart per backbone. Deterministic bytes for identical inputs.
std::string render_bars_svg(const std::vector<SummaryRow>& summaries,
                            const ReportSpec& spec,
                            const std::string& backbone);

// Writes table files (and one SVG per backbone) for the requested formats.
// Returns the written file paths.
std::vector<std::filesystem::path> write_report(
    const std::vector<SummaryRow>& summaries, const ReportSpec& spec,
    const std::filesystem::path& out_dir);

}  // namespace authpipe
