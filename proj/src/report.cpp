#include "authpipe/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "authpipe/errors.hpp"
#include "authpipe/robust_stats.hpp"

namespace authpipe {

std::string_view to_string(TableKind kind) {
  switch (kind) {
    case TableKind::forgery_detection_with:
      return "forgery_detection_with";
    case TableKind::forgery_detection_without:
      return "forgery_detection_without";
    case TableKind::synthetic_detection:
      return "synthetic_detection";
  }
  return "?";
}

std::vector<EvalGroup> table_columns(TableKind kind) {
  if (kind == TableKind::synthetic_detection) {
    return {EvalGroup::diffusion, EvalGroup::tuned_gans};
  }
  return {EvalGroup::forgeries, EvalGroup::originals};
}

namespace {

std::string contrast_display(ContrastName name) {
  switch (name) {
    case ContrastName::no_synthetic:
      return "no synthetic";
    case ContrastName::raw_gans:
      return "raw GANs";
    case ContrastName::tuned_gans:
      return "tuned GANs";
    case ContrastName::diffusion:
      return "diffusion";
    case ContrastName::diffusion_plus_gans:
      return "diffusion+GANs";
  }
  return "?";
}

std::string backbone_display(const std::string& identifier) {
  if (identifier == "swin_base") return "Swin Base";
  if (identifier == "efficientnet_b0") return "EfficientNet B0";
  if (identifier == "toy_linear") return "Toy Linear";
  return identifier;
}

std::string column_display(EvalGroup g) {
  switch (g) {
    case EvalGroup::forgeries:
      return "accuracy forgeries";
    case EvalGroup::originals:
      return "accuracy originals";
    case EvalGroup::diffusion:
      return "accuracy Stable Diffusion";
    case EvalGroup::tuned_gans:
      return "accuracy tuned GANs";
    case EvalGroup::raw_gans:
      return "accuracy raw GANs";
    case EvalGroup::proxies:
      return "accuracy proxies";
  }
  return "?";
}

int backbone_rank(const std::string& identifier) {
  if (identifier == "swin_base") return 0;
  if (identifier == "efficientnet_b0") return 1;
  if (identifier == "toy_linear") return 2;
  return 3;
}

int contrast_rank(ContrastName name) {
  for (std::size_t i = 0; i < kAllContrasts.size(); ++i) {
    if (kAllContrasts[i] == name) return static_cast<int>(i);
  }
  return static_cast<int>(kAllContrasts.size());
}

bool row_matches_kind(const SummaryRow& row, TableKind kind) {
  switch (kind) {
    case TableKind::forgery_detection_with:
      return row.contrast.include_imitations;
    case TableKind::forgery_detection_without:
      return !row.contrast.include_imitations;
    case TableKind::synthetic_detection:
      // Synthetic detection reports the experiment-1 (with forgeries) runs.
      return row.contrast.include_imitations;
  }
  return false;
}

struct TableRow {
  ContrastName contrast;
  std::string backbone;
  std::vector<const MetricSummary*> cells;  // one per column, may be null
  std::vector<bool> best;
};

std::vector<TableRow> collect_rows(const std::vector<SummaryRow>& summaries,
                                   const ReportSpec& spec,
                                   const std::vector<EvalGroup>& columns) {
  std::map<std::pair<int, std::string>, TableRow> rows;
  for (const SummaryRow& s : summaries) {
    if (s.artist_tag != spec.artist_tag || !row_matches_kind(s, spec.kind)) {
      continue;
    }
    auto col = std::find(columns.begin(), columns.end(), s.group);
    if (col == columns.end()) continue;
    const std::pair<int, std::string> key{contrast_rank(s.contrast.name),
                                          s.backbone};
    TableRow& row = rows[key];
    if (row.cells.empty()) {
      row.contrast = s.contrast.name;
      row.backbone = s.backbone;
      row.cells.assign(columns.size(), nullptr);
      row.best.assign(columns.size(), false);
    }
    row.cells[static_cast<std::size_t>(col - columns.begin())] = &s.summary;
  }

  std::vector<TableRow> ordered;
  ordered.reserve(rows.size());
  for (auto& [key, row] : rows) ordered.push_back(std::move(row));
  std::sort(ordered.begin(), ordered.end(),
            [](const TableRow& a, const TableRow& b) {
              return std::tuple(contrast_rank(a.contrast),
                                backbone_rank(a.backbone), a.backbone) <
                     std::tuple(contrast_rank(b.contrast),
                                backbone_rank(b.backbone), b.backbone);
            });

  // Strictly greatest median per column; ties mark all.
  for (std::size_t c = 0; c < columns.size(); ++c) {
    double best = -1.0;
    for (const TableRow& row : ordered) {
      if (row.cells[c] && row.cells[c]->median > best) {
        best = row.cells[c]->median;
      }
    }
    for (TableRow& row : ordered) {
      if (row.cells[c] && row.cells[c]->median == best) row.best[c] = true;
    }
  }
  return ordered;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

}  // namespace

RenderedTable render_table(const std::vector<SummaryRow>& summaries,
                           const ReportSpec& spec) {
  const std::vector<EvalGroup> columns = table_columns(spec.kind);
  const std::vector<TableRow> rows = collect_rows(summaries, spec, columns);
  if (rows.empty()) {
    throw ValidationError("no summaries for table kind '" +
                          std::string(to_string(spec.kind)) + "' and artist '" +
                          spec.artist_tag + "'");
  }

  RenderedTable out;
  out.n_rows = rows.size();

  std::ostringstream csv;
  csv << "training_contrast_set,model_architecture";
  for (EvalGroup g : columns) csv << "," << to_string(g);
  for (EvalGroup g : columns) csv << "," << to_string(g) << "_best";
  csv << "\n";
  for (const TableRow& row : rows) {
    csv << csv_escape(contrast_display(row.contrast)) << ","
        << csv_escape(backbone_display(row.backbone));
    for (std::size_t c = 0; c < columns.size(); ++c) {
      csv << ",";
      if (row.cells[c]) {
        csv << format_parenthesis(row.cells[c]->median,
                                  row.cells[c]->half_width);
      }
    }
    for (std::size_t c = 0; c < columns.size(); ++c) {
      csv << "," << (row.best[c] && row.cells[c] ? 1 : 0);
    }
    csv << "\n";
  }
  out.csv = csv.str();

  std::ostringstream md;
  md << "| training contrast set | model architecture |";
  for (EvalGroup g : columns) md << " " << column_display(g) << " |";
  md << "\n|---|---|";
  for (std::size_t c = 0; c < columns.size(); ++c) md << "---|";
  md << "\n";
  for (const TableRow& row : rows) {
    md << "| " << contrast_display(row.contrast) << " | "
       << backbone_display(row.backbone) << " |";
    for (std::size_t c = 0; c < columns.size(); ++c) {
      md << " ";
      if (row.cells[c]) {
        const std::string cell = format_parenthesis(
            row.cells[c]->median, row.cells[c]->half_width);
        md << (row.best[c] ? "**" + cell + "**" : cell);
      } else {
        md << "-";
      }
      md << " |";
    }
    md << "\n";
  }
  out.markdown = md.str();
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

const char* metric_color(EvalGroup g) {
  switch (g) {
    case EvalGroup::forgeries:
      return "#7e57c2";
    case EvalGroup::originals:
      return "#66bb6a";
    case EvalGroup::diffusion:
      return "#1f77b4";
    case EvalGroup::tuned_gans:
      return "#ff7f0e";
    default:
      return "#777777";
  }
}

}  // namespace

std::string render_bars_svg(const std::vector<SummaryRow>& summaries,
                            const ReportSpec& spec,
                            const std::string& backbone) {
  const std::vector<EvalGroup> metrics = table_columns(spec.kind);

  // (contrast, metric) -> summary, restricted to this backbone.
  std::map<std::pair<int, int>, const MetricSummary*> cells;
  std::set<int> contrasts_present;
  for (const SummaryRow& s : summaries) {
    if (s.artist_tag != spec.artist_tag || s.backbone != backbone ||
        !row_matches_kind(s, spec.kind)) {
      continue;
    }
    auto m = std::find(metrics.begin(), metrics.end(), s.group);
    if (m == metrics.end()) continue;
    const int ci = contrast_rank(s.contrast.name);
    cells[{ci, static_cast<int>(m - metrics.begin())}] = &s.summary;
    contrasts_present.insert(ci);
  }
  if (cells.empty()) {
    throw ValidationError("no summaries to chart for backbone '" + backbone +
                          "'");
  }
  const int baseline_rank = contrast_rank(ContrastName::no_synthetic);
  if (contrasts_present.count(baseline_rank) == 0) {
    throw ValidationError(
        "missing no_synthetic baseline config; cannot draw baselines");
  }

  const std::vector<int> order(contrasts_present.begin(),
                               contrasts_present.end());
  const double left = 64.0, right = 636.0, top = 40.0, bottom = 360.0;
  const double span = right - left;
  const double group_w = span / static_cast<double>(order.size());
  const double bar_w = std::min(
      42.0, group_w / (static_cast<double>(metrics.size()) + 1.0));
  auto y_of = [&](double v) { return bottom - v * (bottom - top); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"700\" "
         "height=\"430\" viewBox=\"0 0 700 430\">\n";
  svg << "<rect width=\"700\" height=\"430\" fill=\"white\"/>\n";
  svg << "<text x=\"350\" y=\"20\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"14\">"
      << spec.artist_tag << " | " << to_string(spec.kind) << " | "
      << backbone_display(backbone) << "</text>\n";

  // y axis with ticks every 0.2
  svg << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top) << "\" x2=\""
      << fmt(left) << "\" y2=\"" << fmt(bottom)
      << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    const double v = t * 0.2;
    svg << "<line x1=\"" << fmt(left - 4) << "\" y1=\"" << fmt(y_of(v))
        << "\" x2=\"" << fmt(right) << "\" y2=\"" << fmt(y_of(v))
        << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << fmt(left - 8) << "\" y=\"" << fmt(y_of(v) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << fmt(v) << "</text>\n";
  }
  svg << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(bottom)
      << "\" x2=\"" << fmt(right) << "\" y2=\"" << fmt(bottom)
      << "\" stroke=\"black\"/>\n";

  // dotted baseline per metric at the no_synthetic value
  for (std::size_t m = 0; m < metrics.size(); ++m) {
    auto it = cells.find({baseline_rank, static_cast<int>(m)});
    if (it == cells.end()) continue;
    svg << "<line x1=\"" << fmt(left) << "\" y1=\""
        << fmt(y_of(it->second->median)) << "\" x2=\"" << fmt(right)
        << "\" y2=\"" << fmt(y_of(it->second->median)) << "\" stroke=\""
        << metric_color(metrics[m])
        << "\" stroke-dasharray=\"4,4\" stroke-width=\"1.5\"/>\n";
  }

  for (std::size_t gi = 0; gi < order.size(); ++gi) {
    const double gx = left + (static_cast<double>(gi) + 0.5) * group_w;
    const double total_w = bar_w * static_cast<double>(metrics.size());
    for (std::size_t m = 0; m < metrics.size(); ++m) {
      auto it = cells.find({order[gi], static_cast<int>(m)});
      if (it == cells.end()) continue;
      const MetricSummary& s = *it->second;
      const double x = gx - total_w / 2.0 + bar_w * static_cast<double>(m);
      svg << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y_of(s.median))
          << "\" width=\"" << fmt(bar_w - 2) << "\" height=\""
          << fmt(bottom - y_of(s.median)) << "\" fill=\""
          << metric_color(metrics[m]) << "\"/>\n";
      const double cx = x + (bar_w - 2) / 2.0;
      const double y_hi = y_of(std::min(1.0, s.median + s.half_width));
      const double y_lo = y_of(std::max(0.0, s.median - s.half_width));
      svg << "<line x1=\"" << fmt(cx) << "\" y1=\"" << fmt(y_hi)
          << "\" x2=\"" << fmt(cx) << "\" y2=\"" << fmt(y_lo)
          << "\" stroke=\"black\"/>\n";
      svg << "<line x1=\"" << fmt(cx - 4) << "\" y1=\"" << fmt(y_hi)
          << "\" x2=\"" << fmt(cx + 4) << "\" y2=\"" << fmt(y_hi)
          << "\" stroke=\"black\"/>\n";
      svg << "<line x1=\"" << fmt(cx - 4) << "\" y1=\"" << fmt(y_lo)
          << "\" x2=\"" << fmt(cx + 4) << "\" y2=\"" << fmt(y_lo)
          << "\" stroke=\"black\"/>\n";
    }
    svg << "<text x=\"" << fmt(gx) << "\" y=\"" << fmt(bottom + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << contrast_display(kAllContrasts[static_cast<std::size_t>(
               order[gi])])
        << "</text>\n";
  }

  // legend
  for (std::size_t m = 0; m < metrics.size(); ++m) {
    const double lx = left + static_cast<double>(m) * 180.0;
    svg << "<rect x=\"" << fmt(lx) << "\" y=\"398\" width=\"12\" "
           "height=\"12\" fill=\""
        << metric_color(metrics[m]) << "\"/>\n";
    svg << "<text x=\"" << fmt(lx + 18) << "\" y=\"408\" "
           "font-family=\"sans-serif\" font-size=\"12\">"
        << column_display(metrics[m]) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::vector<std::filesystem::path> write_report(
    const std::vector<SummaryRow>& summaries, const ReportSpec& spec,
    const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::vector<fs::path> written;

  const bool want_csv =
      std::find(spec.formats.begin(), spec.formats.end(), "csv") !=
      spec.formats.end();
  const bool want_md =
      std::find(spec.formats.begin(), spec.formats.end(), "markdown") !=
      spec.formats.end();
  const bool want_svg =
      std::find(spec.formats.begin(), spec.formats.end(), "svg") !=
      spec.formats.end();

  const std::string stem = "table_" + std::string(to_string(spec.kind));
  if (want_csv || want_md) {
    const RenderedTable table = render_table(summaries, spec);
    if (want_csv) {
      const fs::path p = out_dir / (stem + ".csv");
      std::ofstream out(p);
      out << table.csv;
      if (!out) throw PipelineError("cannot write " + p.string());
      written.push_back(p);
    }
    if (want_md) {
      const fs::path p = out_dir / (stem + ".md");
      std::ofstream out(p);
      out << table.markdown;
      if (!out) throw PipelineError("cannot write " + p.string());
      written.push_back(p);
    }
  }

  if (want_svg) {
    std::set<std::string> backbones;
    for (const SummaryRow& s : summaries) {
      if (s.artist_tag == spec.artist_tag && row_matches_kind(s, spec.kind)) {
        backbones.insert(s.backbone);
      }
    }
    for (const std::string& backbone : backbones) {
      const fs::path p =
          out_dir / ("bars_" + std::string(to_string(spec.kind)) + "_" +
                     backbone + ".svg");
      std::ofstream out(p);
      out << render_bars_svg(summaries, spec, backbone);
      if (!out) throw PipelineError("cannot write " + p.string());
      written.push_back(p);
    }
  }
  return written;
}

}  // namespace authpipe
