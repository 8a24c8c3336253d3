#include "protaudit/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "protaudit/csv.hpp"
#include "protaudit/error.hpp"

namespace protaudit {
namespace {

using nlohmann::json;

Json Rounded(double v) {
  if (!std::isfinite(v)) return NumberJson(v);
  return RoundForReport(v);
}

Json Optional(const std::optional<double>& v) {
  if (!v) return nullptr;
  return Rounded(*v);
}

Json SummaryJson(const MetricSummary& s) {
  Json j;
  j["metric"] = s.metric;
  j["axis"] = ToString(s.axis);
  j["female_median"] = Optional(s.medians.female);
  j["male_median"] = Optional(s.medians.male);
  j["n_female"] = s.medians.n_female;
  j["n_male"] = s.medians.n_male;
  j["missing"] = s.missing;
  j["note"] = s.note;
  return j;
}

Json RegressionJson(const RegressionResult& r) {
  Json j = ToJson(r);
  for (auto& c : j["categories"]) {
    for (const char* key : {"coefficient", "std_error", "p_value"}) {
      if (c[key].is_number()) c[key] = RoundForReport(c[key].get<double>());
    }
  }
  return j;
}

std::string Cell(const json& v) {
  if (v.is_null()) return "n/a";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "yes" : "no";
  if (v.is_number_integer() || v.is_number_unsigned()) return std::to_string(v.get<long long>());
  return FormatNumber(v.get<double>());
}

std::string Fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string XmlEscape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr const char* kFemaleColor = "#c0504d";
constexpr const char* kMaleColor = "#4f81bd";

struct Bar {
  std::string group;
  double female;
  double male;
};

std::string GroupedBarSvg(const std::string& title, const std::vector<Bar>& bars) {
  const double group_w = 120.0;
  const double left = 60.0;
  const double width = left + group_w * static_cast<double>(bars.size()) + 20.0;
  const double height = 320.0;
  const double top = 40.0;
  const double plot_h = 220.0;
  double extent = 0.5;
  for (const auto& b : bars) extent = std::max({extent, std::abs(b.female), std::abs(b.male)});
  const double zero_y = top + plot_h / 2.0;
  const double scale = (plot_h / 2.0) / extent;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << Fixed(width) << "\" height=\"" << Fixed(height)
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "  <text x=\"" << Fixed(width / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << XmlEscape(title) << "</text>\n";
  svg << "  <line x1=\"" << Fixed(left) << "\" y1=\"" << Fixed(zero_y) << "\" x2=\"" << Fixed(width - 20)
      << "\" y2=\"" << Fixed(zero_y) << "\" stroke=\"#333\"/>\n";
  for (double tick : {-extent, 0.0, extent}) {
    svg << "  <text x=\"" << Fixed(left - 6) << "\" y=\"" << Fixed(zero_y - tick * scale + 4)
        << "\" text-anchor=\"end\">" << Fixed(tick) << "</text>\n";
  }
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const double x0 = left + group_w * static_cast<double>(i) + 20.0;
    const double bw = 36.0;
    const std::pair<double, const char*> pairs[] = {{bars[i].female, kFemaleColor}, {bars[i].male, kMaleColor}};
    for (int k = 0; k < 2; ++k) {
      const double v = pairs[k].first;
      const double h = std::abs(v) * scale;
      const double y = v >= 0 ? zero_y - h : zero_y;
      const double x = x0 + k * (bw + 4.0);
      svg << "  <rect x=\"" << Fixed(x) << "\" y=\"" << Fixed(y) << "\" width=\"" << Fixed(bw) << "\" height=\""
          << Fixed(h) << "\" fill=\"" << pairs[k].second << "\"><title>" << (k == 0 ? "F " : "M ")
          << FormatNumber(v) << "</title></rect>\n";
    }
    svg << "  <text x=\"" << Fixed(x0 + bw + 2) << "\" y=\"" << Fixed(top + plot_h + 20)
        << "\" text-anchor=\"middle\">" << XmlEscape(bars[i].group) << "</text>\n";
  }
  svg << "  <rect x=\"" << Fixed(left) << "\" y=\"" << Fixed(height - 30)
      << "\" width=\"10\" height=\"10\" fill=\"" << kFemaleColor << "\"/>\n";
  svg << "  <text x=\"" << Fixed(left + 14) << "\" y=\"" << Fixed(height - 21) << "\">F</text>\n";
  svg << "  <rect x=\"" << Fixed(left + 40) << "\" y=\"" << Fixed(height - 30)
      << "\" width=\"10\" height=\"10\" fill=\"" << kMaleColor << "\"/>\n";
  svg << "  <text x=\"" << Fixed(left + 54) << "\" y=\"" << Fixed(height - 21) << "\">M</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

// Bars for one metric family, or a note explaining why there are none.
std::vector<Bar> FamilyBars(const json& entries, const std::string& family, std::vector<std::string>& notes) {
  std::vector<Bar> bars;
  std::size_t females = 0;
  std::size_t males = 0;
  for (const auto& e : entries) {
    females += e["n_female"].get<std::size_t>();
    males += e["n_male"].get<std::size_t>();
  }
  if (entries.empty() || females == 0 || males == 0) {
    notes.push_back(family + " figure skipped: a gender group is empty");
    return bars;
  }
  for (const auto& e : entries) {
    const std::string group = e["metric"].get<std::string>() + " " + e["axis"].get<std::string>();
    if (e["female_median"].is_null() || e["male_median"].is_null()) {
      notes.push_back(family + " figure omits " + group + ": no median for one gender");
      continue;
    }
    bars.push_back({group, e["female_median"].get<double>(), e["male_median"].get<double>()});
  }
  if (bars.empty()) notes.push_back(family + " figure skipped: no plottable medians");
  return bars;
}

void WriteBarFigure(const std::string& stem, const std::string& title, const std::vector<Bar>& bars,
                    const std::filesystem::path& out_dir, FigureOutput& out) {
  std::string table = "metric,axis,gender,median_z\n";
  for (const auto& b : bars) {
    const auto space = b.group.find(' ');
    const std::string metric = b.group.substr(0, space);
    const std::string axis = b.group.substr(space + 1);
    table += csv::JoinRow({metric, axis, "F", FormatNumber(b.female)}) + "\n";
    table += csv::JoinRow({metric, axis, "M", FormatNumber(b.male)}) + "\n";
  }
  WriteFileAtomic(out_dir / (stem + ".svg"), GroupedBarSvg(title, bars));
  WriteFileAtomic(out_dir / (stem + ".csv"), table);
  out.files.push_back(stem + ".svg");
  out.files.push_back(stem + ".csv");
}

std::string BubbleSvg(const json& categories) {
  const double cell = 110.0;
  const double max_r = 40.0;
  const double width = 40.0 + cell * static_cast<double>(categories.size());
  const double height = 220.0;
  double max_abs = 0.0;
  for (const auto& c : categories) {
    const double v = NumberFromJson(c["coefficient"]);
    if (std::isfinite(v)) max_abs = std::max(max_abs, std::abs(v));
  }
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << Fixed(width) << "\" height=\"" << Fixed(height)
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "  <text x=\"" << Fixed(width / 2)
      << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">Motivation categories and gender</text>\n";
  for (std::size_t i = 0; i < categories.size(); ++i) {
    const auto& c = categories[i];
    const double v = NumberFromJson(c["coefficient"]);
    double r = max_r;
    if (std::isfinite(v)) r = max_abs > 0 ? max_r * std::sqrt(std::abs(v) / max_abs) : 0.0;
    const double cx = 20.0 + cell * (static_cast<double>(i) + 0.5);
    const double cy = 110.0;
    const std::string name = c["category"].get<std::string>();
    const std::string mark = c["mark"].get<std::string>();
    svg << "  <circle cx=\"" << Fixed(cx) << "\" cy=\"" << Fixed(cy) << "\" r=\"" << Fixed(r) << "\" fill=\""
        << (v >= 0 ? kFemaleColor : kMaleColor) << "\" fill-opacity=\"0.7\"><title>" << XmlEscape(name) << " "
        << Cell(c["coefficient"]) << "</title></circle>\n";
    if (!mark.empty()) {
      svg << "  <text class=\"mark\" x=\"" << Fixed(cx) << "\" y=\"" << Fixed(cy - max_r - 6)
          << "\" text-anchor=\"middle\" font-size=\"14\">" << mark << "</text>\n";
    }
    svg << "  <text x=\"" << Fixed(cx) << "\" y=\"" << Fixed(cy + max_r + 20) << "\" text-anchor=\"middle\">"
        << XmlEscape(name) << "</text>\n";
  }
  svg << "  <text x=\"20\" y=\"" << Fixed(height - 8) << "\">red: more likely F, blue: more likely M; "
      << "* p&lt;0.001, † p&lt;0.01, ‡ p&lt;0.05</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace

double RoundForReport(double v) {
  if (!std::isfinite(v)) return v;
  const double r = std::round(v * 1e9) / 1e9;
  return r == 0.0 ? 0.0 : r;
}

std::string FormatNumber(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Json BuildReport(const ReportInputs& in) {
  Json report;
  report["schema_version"] = kReportSchemaVersion;
  report["manifest"] = in.manifest;

  Json corpus;
  corpus["stories"] = in.stats.story_count;
  corpus["annotated"] = in.stats.annotated_count;
  corpus["female"] = in.stats.female;
  corpus["male"] = in.stats.male;
  corpus["unresolved"] = in.stats.unresolved;
  corpus["mean_tokens"] = RoundForReport(in.stats.mean_tokens);
  corpus["mean_tokens_female"] = RoundForReport(in.stats.mean_tokens_female);
  corpus["mean_tokens_male"] = RoundForReport(in.stats.mean_tokens_male);
  report["corpus"] = corpus;

  Json portrayal = Json::array();
  Json affect = Json::array();
  std::size_t missing = 0;
  for (const auto& s : in.summaries) {
    missing += s.missing;
    const bool is_portrayal =
        std::find(kPortrayalMetrics.begin(), kPortrayalMetrics.end(), s.metric) != kPortrayalMetrics.end();
    (is_portrayal ? portrayal : affect).push_back(SummaryJson(s));
  }
  report["pooling"] = in.pooling;
  report["portrayal"] = portrayal;
  report["affect"] = affect;

  Json regression;
  if (in.regression) {
    regression = RegressionJson(*in.regression);
  } else {
    regression = Json{{"categories", Json::array()}, {"skipped", Json::array()}};
  }
  regression["note"] = in.regression_note;
  report["regression"] = regression;

  Json probes = Json::array();
  for (const auto& p : in.probes) {
    Json j;
    if (p.result) {
      j = ToJson(*p.result);
      j["accuracy"] = RoundForReport(p.result->accuracy);
    } else {
      j["name"] = p.name;
      j["accuracy"] = nullptr;
    }
    j["note"] = p.note;
    probes.push_back(j);
  }
  report["probes"] = probes;

  Json exclusions;
  exclusions["unresolved_gender"] = in.stats.unresolved;
  exclusions["no_character_mentions"] = in.no_character_stories;
  exclusions["inference_failures"] = in.inference_failures;
  exclusions["missing_scores"] = missing;
  exclusions["regression_unresolved"] = in.regression ? in.regression->excluded : 0;
  Json probe_ex = Json::object();
  for (const auto& p : in.probes) probe_ex[p.name] = p.result ? p.result->excluded : 0;
  exclusions["probes"] = probe_ex;
  report["exclusions"] = exclusions;
  return report;
}

std::string RenderMarkdown(const Json& report) {
  std::ostringstream md;
  md << "# Protagonist bias audit\n\n";
  md << "Schema version " << report["schema_version"].get<int>() << ".\n\n";

  const auto& m = report["manifest"];
  md << "## Run\n\n";
  md << "| field | value |\n|---|---|\n";
  md << "| seed | " << Cell(m.value("seed", json())) << " |\n";
  md << "| config digest | " << Cell(m.value("config_digest", json())) << " |\n";
  if (m.contains("corpus")) {
    md << "| corpus | " << Cell(m["corpus"].value("file", json())) << " (" << Cell(m["corpus"].value("sha256", json()))
       << ") |\n";
  }
  if (m.contains("backends")) {
    for (const auto& [role, b] : m["backends"].items()) {
      md << "| " << role << " backend | " << Cell(b.value("id", json())) << " " << Cell(b.value("version", json()))
         << " |\n";
    }
  }
  if (m.contains("lexicons")) {
    for (const auto& l : m["lexicons"]) {
      md << "| " << Cell(l["role"]) << " | " << Cell(l["file"]) << " (" << Cell(l["sha256"]) << ") |\n";
    }
  }
  md << "\n";

  const auto& c = report["corpus"];
  md << "## Corpus\n\n";
  md << "| stories | annotated | F | M | unresolved | mean tokens | mean tokens F | mean tokens M |\n";
  md << "|---|---|---|---|---|---|---|---|\n";
  md << "| " << Cell(c["stories"]) << " | " << Cell(c["annotated"]) << " | " << Cell(c["female"]) << " | "
     << Cell(c["male"]) << " | " << Cell(c["unresolved"]) << " | " << Cell(c["mean_tokens"]) << " | "
     << Cell(c["mean_tokens_female"]) << " | " << Cell(c["mean_tokens_male"]) << " |\n\n";

  auto summary_table = [&](const char* title, const json& rows) {
    md << "## " << title << "\n\n";
    md << "Median z-scores, " << report["pooling"].get<std::string>() << " pooling.\n\n";
    md << "| metric | axis | F | M | n F | n M | missing | note |\n|---|---|---|---|---|---|---|---|\n";
    for (const auto& r : rows) {
      md << "| " << Cell(r["metric"]) << " | " << Cell(r["axis"]) << " | " << Cell(r["female_median"]) << " | "
         << Cell(r["male_median"]) << " | " << Cell(r["n_female"]) << " | " << Cell(r["n_male"]) << " | "
         << Cell(r["missing"]) << " | " << Cell(r["note"]) << " |\n";
    }
    md << "\n";
  };
  summary_table("Portrayal", report["portrayal"]);
  summary_table("Mental states", report["affect"]);

  const auto& reg = report["regression"];
  md << "## Motivation categories\n\n";
  if (reg["categories"].empty()) {
    md << "No regression results. " << Cell(reg["note"]) << "\n\n";
  } else {
    md << "Positive coefficients mean the category is more likely in stories with a female protagonist. ";
    md << "* p<0.001, † p<0.01, ‡ p<0.05.\n\n";
    md << "| category | coefficient | std. error | p | n | mark |\n|---|---|---|---|---|---|\n";
    for (const auto& r : reg["categories"]) {
      md << "| " << Cell(r["category"]) << " | " << Cell(r["coefficient"]) << " | " << Cell(r["std_error"]) << " | "
         << Cell(r["p_value"]) << " | " << Cell(r["n"]) << " | " << Cell(r["mark"]) << " |\n";
    }
    md << "\n";
  }
  if (!reg["skipped"].empty()) {
    md << "Skipped: ";
    bool first = true;
    for (const auto& s : reg["skipped"]) {
      md << (first ? "" : "; ") << Cell(s["category"]) << " (" << Cell(s["reason"]) << ")";
      first = false;
    }
    md << ".\n\n";
  }

  md << "## Leakage probes\n\n";
  md << "| probe | accuracy | train | test | seed | excluded | note |\n|---|---|---|---|---|---|---|\n";
  for (const auto& p : report["probes"]) {
    md << "| " << Cell(p["name"]) << " | " << Cell(p["accuracy"]) << " | " << Cell(p.value("train_size", json()))
       << " | " << Cell(p.value("test_size", json())) << " | " << Cell(p.value("seed", json())) << " | "
       << Cell(p.value("excluded", json())) << " | " << Cell(p["note"]) << " |\n";
  }
  md << "\n";

  md << "## Exclusions\n\n";
  for (const auto& [k, v] : report["exclusions"].items()) {
    if (v.is_object()) {
      for (const auto& [p, n] : v.items()) md << "- probe " << p << ": " << Cell(n) << "\n";
    } else {
      md << "- " << k << ": " << Cell(v) << "\n";
    }
  }
  md << "\n";

  if (report.contains("figures")) {
    md << "## Figures\n\n";
    for (const auto& f : report["figures"]["files"]) md << "- figures/" << f.get<std::string>() << "\n";
    for (const auto& n : report["figures"]["notes"]) md << "- note: " << n.get<std::string>() << "\n";
    md << "\n";
  }
  return md.str();
}

FigureOutput EmitFigures(const Json& report, const std::filesystem::path& out_dir) {
  FigureOutput out;
  std::filesystem::create_directories(out_dir);

  const auto portrayal = FamilyBars(report["portrayal"], "portrayal", out.notes);
  if (!portrayal.empty()) WriteBarFigure("portrayal", "Portrayal: median z-scores", portrayal, out_dir, out);
  const auto affect = FamilyBars(report["affect"], "affect", out.notes);
  if (!affect.empty()) WriteBarFigure("affect", "Valence and arousal: median z-scores", affect, out_dir, out);

  const auto& cats = report["regression"]["categories"];
  if (cats.empty()) {
    out.notes.push_back("regression figure skipped: empty regression table");
  } else {
    std::string table = "category,coefficient,std_error,p_value,mark\n";
    for (const auto& c : cats) {
      table += csv::JoinRow({c["category"].get<std::string>(), Cell(c["coefficient"]), Cell(c["std_error"]),
                             Cell(c["p_value"]), c["mark"].get<std::string>()}) +
               "\n";
    }
    WriteFileAtomic(out_dir / "regression.svg", BubbleSvg(cats));
    WriteFileAtomic(out_dir / "regression.csv", table);
    out.files.push_back("regression.svg");
    out.files.push_back("regression.csv");
  }
  return out;
}

}  // namespace protaudit
