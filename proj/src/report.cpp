#include <algorithm>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <map>
#include <set>

#include "edbench/common/csv.hpp"
#include "edbench/common/error.hpp"
#include "edbench/evaluate.hpp"

namespace edbench::evaluate {

namespace {

bool is_id_column(const std::string& name) {
  return name == "subject_id" || name == "stay_id" || name == "hadm_id";
}

bool is_binary(const std::vector<double>& col) {
  return std::all_of(col.begin(), col.end(), [](double v) { return is_missing(v) || v == 0.0 || v == 1.0; });
}

std::string count_cell(std::size_t count, std::size_t total) {
  const double pct = total ? 100.0 * static_cast<double>(count) / static_cast<double>(total) : 0.0;
  return std::to_string(count) + " (" + csv::format_fixed(pct, 1) + "%)";
}

std::string mean_sd_cell(const std::vector<double>& values) {
  const auto m = mean_sd(values);
  if (m.n == 0) return "";
  return csv::format_fixed(m.mean, 2) + " (" + csv::format_fixed(m.sd, 2) + ")";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(double v, int decimals = 1) { return csv::format_fixed(v, decimals); }

// Wall-clock runtime is kept out of report.csv so reruns reproduce it byte
// for byte; it goes to runtime.csv and report.json instead.
const std::vector<std::string> kReportHeader = {
    "Task",   "Model",   "Threshold", "AUROC (95% CI)", "AUPRC (95% CI)", "Sensitivity (95% CI)",
    "Specificity (95% CI)", "Number of variables"};

std::string render_csv(const EvalReport& report) {
  csv::Writer w(kReportHeader);
  for (const auto& r : report.rows) {
    w.add_row({r.task, r.model, format_threshold(r.threshold), format_ci(r.auroc), format_ci(r.auprc),
               format_ci(r.sensitivity), format_ci(r.specificity), std::to_string(r.variables)});
  }
  return w.str();
}

std::string render_runtime(const EvalReport& report) {
  csv::Writer w({"Task", "Model", "Runtime"});
  for (const auto& r : report.rows) w.add_row({r.task, r.model, csv::format_fixed(r.runtime_seconds, 2)});
  return w.str();
}

std::string render_json(const EvalReport& report) {
  using nlohmann::json;
  auto ci = [](const MetricCi& m) { return json{{"value", m.value}, {"low", m.low}, {"high", m.high}}; };
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"task", r.task},
                    {"model", r.model},
                    {"threshold", r.threshold},
                    {"auroc", ci(r.auroc)},
                    {"auprc", ci(r.auprc)},
                    {"sensitivity", ci(r.sensitivity)},
                    {"specificity", ci(r.specificity)},
                    {"runtime_seconds", r.runtime_seconds},
                    {"variables", r.variables}});
  }
  return json{{"rows", rows}}.dump(2) + "\n";
}

// Grouped bars: one group per task, one bar per model, whiskers for the CI.
// Fixed layout: 24 px bars, 32 px gap between groups, y axis 0..1 over 260 px.
std::string render_svg(const EvalReport& report, bool auroc_metric) {
  const char* title = auroc_metric ? "AUROC" : "AUPRC";
  std::vector<std::string> tasks;
  std::vector<std::string> models;
  for (const auto& r : report.rows) {
    if (std::find(tasks.begin(), tasks.end(), r.task) == tasks.end()) tasks.push_back(r.task);
    if (std::find(models.begin(), models.end(), r.model) == models.end()) models.push_back(r.model);
  }
  static const char* palette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948",
                                  "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};
  constexpr double bar = 24.0;
  constexpr double gap = 32.0;
  constexpr double left = 60.0;
  constexpr double top = 40.0;
  constexpr double plot_h = 260.0;
  std::map<std::string, std::vector<const ModelResult*>> by_task;
  for (const auto& r : report.rows) by_task[r.task].push_back(&r);
  double width = left + gap;
  for (const auto& t : tasks) width += static_cast<double>(by_task[t].size()) * bar + gap;
  const double legend_x = width;
  width += 140.0;
  const double height = std::max(top + plot_h + 60.0, top + 20.0 * static_cast<double>(models.size()) + 20.0);
  auto y_of = [&](double v) { return top + plot_h * (1.0 - std::clamp(v, 0.0, 1.0)); };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width) + "\" height=\"" + fmt(height) +
       "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + fmt(left) + "\" y=\"20\" font-size=\"14\">" + title + " (95% CI)</text>\n";
  for (int k = 0; k <= 10; k += 2) {
    const double v = k / 10.0;
    const double y = y_of(v);
    s += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(legend_x - gap / 2) + "\" y2=\"" +
         fmt(y) + "\" stroke=\"#ddd\"/>\n";
    s += "<text x=\"" + fmt(left - 6) + "\" y=\"" + fmt(y + 4) + "\" text-anchor=\"end\">" + fmt(v) + "</text>\n";
  }
  s += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(top) + "\" x2=\"" + fmt(left) + "\" y2=\"" +
       fmt(top + plot_h) + "\" stroke=\"black\"/>\n";

  double x = left + gap;
  for (const auto& t : tasks) {
    const auto& rows = by_task[t];
    const double group_start = x;
    for (const auto* r : rows) {
      const auto& m = auroc_metric ? r->auroc : r->auprc;
      const auto colour = palette[static_cast<std::size_t>(std::find(models.begin(), models.end(), r->model) -
                                                           models.begin()) %
                                  std::size(palette)];
      const double y = y_of(m.value);
      s += "<rect x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" width=\"" + fmt(bar - 2) + "\" height=\"" +
           fmt(top + plot_h - y) + "\" fill=\"" + colour + "\"><title>" + xml_escape(r->model) + " " +
           format_ci(m) + "</title></rect>\n";
      const double cx = x + (bar - 2) / 2;
      s += "<line x1=\"" + fmt(cx) + "\" y1=\"" + fmt(y_of(m.low)) + "\" x2=\"" + fmt(cx) + "\" y2=\"" +
           fmt(y_of(m.high)) + "\" stroke=\"black\"/>\n";
      for (double v : {m.low, m.high}) {
        s += "<line x1=\"" + fmt(cx - 4) + "\" y1=\"" + fmt(y_of(v)) + "\" x2=\"" + fmt(cx + 4) + "\" y2=\"" +
             fmt(y_of(v)) + "\" stroke=\"black\"/>\n";
      }
      x += bar;
    }
    s += "<text x=\"" + fmt((group_start + x) / 2) + "\" y=\"" + fmt(top + plot_h + 18) +
         "\" text-anchor=\"middle\">" + xml_escape(t) + "</text>\n";
    x += gap;
  }
  for (std::size_t i = 0; i < models.size(); ++i) {
    const double y = top + 20.0 * static_cast<double>(i);
    s += "<rect x=\"" + fmt(legend_x) + "\" y=\"" + fmt(y) + "\" width=\"12\" height=\"12\" fill=\"" +
         palette[i % std::size(palette)] + "\"/>\n";
    s += "<text x=\"" + fmt(legend_x + 18) + "\" y=\"" + fmt(y + 10) + "\">" + xml_escape(models[i]) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace

std::string format_ci(const MetricCi& m) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.3f (%.3f-%.3f)", m.value, m.low, m.high);
  return buf;
}

std::string format_threshold(double threshold) {
  std::string s = csv::format_fixed(threshold, 3);
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

std::string SummaryTable::to_csv() const {
  csv::Writer w(header);
  for (const auto& r : rows) w.add_row(r);
  return w.str();
}

SummaryTable summarize_cohort(const NumericTable& master, const std::vector<std::string>& strata,
                              const std::vector<std::string>& categorical) {
  // Row groups: everyone, then each stratum split into 0 and 1.
  std::vector<std::vector<std::size_t>> groups;
  SummaryTable out;
  out.header = {"Variable", "Level", "Overall"};
  std::vector<std::size_t> all(master.rows());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  groups.push_back(all);
  for (const auto& name : strata) {
    const auto& col = master.column(name);
    std::vector<std::size_t> neg;
    std::vector<std::size_t> pos;
    for (std::size_t i = 0; i < col.size(); ++i) {
      if (is_missing(col[i])) continue;
      (col[i] != 0.0 ? pos : neg).push_back(i);
    }
    groups.push_back(std::move(neg));
    groups.push_back(std::move(pos));
    out.header.push_back(name + "=0");
    out.header.push_back(name + "=1");
  }

  std::vector<std::string> count_row = {"n", ""};
  for (const auto& g : groups) count_row.push_back(std::to_string(g.size()));
  out.rows.push_back(count_row);

  const std::set<std::string> strata_set(strata.begin(), strata.end());
  for (std::size_t c = 0; c < master.cols(); ++c) {
    const auto& name = master.names()[c];
    if (is_id_column(name) || strata_set.count(name)) continue;
    const auto& col = master.column(c);
    auto subset = [&](const std::vector<std::size_t>& g) {
      std::vector<double> v;
      v.reserve(g.size());
      for (auto i : g) v.push_back(col[i]);
      return v;
    };
    auto non_missing = [&](const std::vector<std::size_t>& g) {
      std::size_t k = 0;
      for (auto i : g) k += is_missing(col[i]) ? 0 : 1;
      return k;
    };
    if (std::find(categorical.begin(), categorical.end(), name) != categorical.end()) {
      std::set<double> levels;
      for (double v : col) {
        if (!is_missing(v)) levels.insert(v);
      }
      for (double level : levels) {
        std::vector<std::string> row = {name, csv::format_number(level)};
        for (const auto& g : groups) {
          std::size_t k = 0;
          for (auto i : g) k += col[i] == level ? 1 : 0;
          row.push_back(count_cell(k, non_missing(g)));
        }
        out.rows.push_back(std::move(row));
      }
    } else if (is_binary(col)) {
      std::vector<std::string> row = {name, "1"};
      for (const auto& g : groups) {
        std::size_t k = 0;
        for (auto i : g) k += col[i] == 1.0 ? 1 : 0;
        row.push_back(count_cell(k, non_missing(g)));
      }
      out.rows.push_back(std::move(row));
    } else {
      std::vector<std::string> row = {name, ""};
      for (const auto& g : groups) row.push_back(mean_sd_cell(subset(g)));
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

std::string render_report(const EvalReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::Csv: return render_csv(report);
    case ReportFormat::Json: return render_json(report);
    case ReportFormat::SvgAuroc: return render_svg(report, true);
    case ReportFormat::SvgAuprc: return render_svg(report, false);
    case ReportFormat::RuntimeCsv: return render_runtime(report);
  }
  return {};
}

void write_report(const EvalReport& report, const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  csv::write_text_file(directory / "report.csv", render_report(report, ReportFormat::Csv));
  csv::write_text_file(directory / "report.json", render_report(report, ReportFormat::Json));
  csv::write_text_file(directory / "figure_auroc.svg", render_report(report, ReportFormat::SvgAuroc));
  csv::write_text_file(directory / "figure_auprc.svg", render_report(report, ReportFormat::SvgAuprc));
  csv::write_text_file(directory / "runtime.csv", render_report(report, ReportFormat::RuntimeCsv));
}

}  // namespace edbench::evaluate
