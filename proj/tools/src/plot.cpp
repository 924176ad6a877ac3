#include "ctgp_cli/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ctgp/errors.hpp"
#include "ctgp_cli/trace_csv.hpp"

namespace ctgp::cli {
namespace fs = std::filesystem;
namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
constexpr double kWidth = 720, kHeight = 420, kLeft = 70, kRight = 160, kTop = 30, kBottom = 50;

struct Curve {
  std::string label;
  std::vector<double> t, median, q25, q75;
};

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string() + ": cannot open");
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    rows.push_back(std::move(cells));
  }
  return rows;
}

class Frame {
 public:
  Frame(double x0, double x1, double y0, double y1) : x0_(x0), x1_(x1), y0_(y0), y1_(y1) {
    if (x1_ <= x0_) x1_ = x0_ + 1;
    if (y1_ <= y0_) y1_ = y0_ + 1;
  }
  [[nodiscard]] double x(double v) const { return kLeft + (v - x0_) / (x1_ - x0_) * (kWidth - kLeft - kRight); }
  [[nodiscard]] double y(double v) const { return kHeight - kBottom - (v - y0_) / (y1_ - y0_) * (kHeight - kTop - kBottom); }

  void axes(std::ostream& out, const std::string& xlabel, const std::string& ylabel) const {
    out << "<rect x='" << kLeft << "' y='" << kTop << "' width='" << kWidth - kLeft - kRight << "' height='"
        << kHeight - kTop - kBottom << "' fill='none' stroke='#444'/>\n";
    for (int i = 0; i <= 4; ++i) {
      const double xv = x0_ + (x1_ - x0_) * i / 4.0;
      const double yv = y0_ + (y1_ - y0_) * i / 4.0;
      out << "<text x='" << x(xv) << "' y='" << kHeight - kBottom + 18 << "' font-size='11' text-anchor='middle'>"
          << tick(xv) << "</text>\n";
      out << "<text x='" << kLeft - 6 << "' y='" << y(yv) + 4 << "' font-size='11' text-anchor='end'>" << tick(yv)
          << "</text>\n";
    }
    out << "<text x='" << (kLeft + kWidth - kRight) / 2 << "' y='" << kHeight - 10
        << "' font-size='13' text-anchor='middle'>" << xlabel << "</text>\n";
    out << "<text x='16' y='" << (kTop + kHeight - kBottom) / 2 << "' font-size='13' text-anchor='middle' "
        << "transform='rotate(-90 16 " << (kTop + kHeight - kBottom) / 2 << ")'>" << ylabel << "</text>\n";
  }

 private:
  static std::string tick(double v) {
    std::ostringstream s;
    s.precision(3);
    s << v;
    return s.str();
  }
  double x0_, x1_, y0_, y1_;
};

void open_svg(std::ostream& out) {
  out << "<?xml version='1.0' encoding='UTF-8'?>\n"
      << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='" << kHeight << "' viewBox='0 0 "
      << kWidth << ' ' << kHeight << "' font-family='sans-serif'>\n"
      << "<rect width='100%' height='100%' fill='white'/>\n";
}

void legend(std::ostream& out, std::size_t i, const std::string& label, const char* color) {
  const double y = kTop + 16 + 20.0 * static_cast<double>(i);
  out << "<line x1='" << kWidth - kRight + 12 << "' y1='" << y << "' x2='" << kWidth - kRight + 36 << "' y2='" << y
      << "' stroke='" << color << "' stroke-width='2'/>\n";
  out << "<text x='" << kWidth - kRight + 42 << "' y='" << y + 4 << "' font-size='12'>" << label << "</text>\n";
}

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  out << body;
  out.close();
  if (!out) throw InputError(path.string() + ": write failed");
}

std::string regret_svg(const std::vector<Curve>& curves) {
  double tmax = 1, ymax = 0;
  for (const auto& c : curves) {
    if (!c.t.empty()) tmax = std::max(tmax, c.t.back());
    for (double v : c.q75) ymax = std::max(ymax, v);
  }
  Frame f(0, tmax, 0, ymax > 0 ? ymax * 1.05 : 1);
  std::ostringstream out;
  open_svg(out);
  f.axes(out, "round t", "cumulative regret");
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto& c = curves[i];
    const char* color = kPalette[i % std::size(kPalette)];
    out << "<g class='series' data-label='" << c.label << "'>\n<polygon fill='" << color
        << "' fill-opacity='0.2' stroke='none' points='";
    for (std::size_t k = 0; k < c.t.size(); ++k) out << f.x(c.t[k]) << ',' << f.y(c.q75[k]) << ' ';
    for (std::size_t k = c.t.size(); k-- > 0;) out << f.x(c.t[k]) << ',' << f.y(c.q25[k]) << ' ';
    out << "'/>\n<polyline fill='none' stroke='" << color << "' stroke-width='2' points='";
    for (std::size_t k = 0; k < c.t.size(); ++k) out << f.x(c.t[k]) << ',' << f.y(c.median[k]) << ' ';
    out << "'/>\n</g>\n";
    legend(out, i, c.label, color);
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace

PlotReport emit_plot(const fs::path& dir) {
  const fs::path summary_path = dir / "summary.json";
  if (!fs::exists(summary_path)) {
    throw InputError(dir.string() +
                     ": no batch results found (expected summary.json, summary_<policy>.csv and "
                     "trace_<policy>_seed<k>.csv written by 'ctgp batch')");
  }
  nlohmann::json summary;
  {
    std::ifstream in(summary_path, std::ios::binary);
    try {
      summary = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& ex) {
      throw InputError(summary_path.string() + ": " + ex.what());
    }
  }

  PlotReport report;
  std::vector<std::string> labels;
  std::vector<Curve> curves;
  for (const auto& p : summary.at("policies")) {
    const std::string label = p.at("label").get<std::string>();
    labels.push_back(label);
    const fs::path path = dir / ("summary_" + label + ".csv");
    if (!fs::exists(path)) {
      report.missing.push_back(path.filename().string());
      continue;
    }
    Curve c;
    c.label = label;
    for (const auto& row : read_csv(path)) {
      if (row.size() != 4) throw InputError(path.string() + ": expected 4 columns");
      c.t.push_back(std::stod(row[0]));
      c.median.push_back(std::stod(row[1]));
      c.q25.push_back(std::stod(row[2]));
      c.q75.push_back(std::stod(row[3]));
    }
    curves.push_back(std::move(c));
  }
  if (curves.empty()) throw InputError(dir.string() + ": every regret series is missing");
  write_file(dir / "regret.svg", regret_svg(curves));
  report.written.push_back(dir / "regret.svg");

  const auto& seeds = summary.at("seeds");
  if (seeds.empty()) return report;
  const std::string seed = std::to_string(seeds.front().get<std::uint64_t>());
  const fs::path obj_path = dir / ("objective_seed" + seed + ".csv");
  if (!fs::exists(obj_path)) {
    report.missing.push_back(obj_path.filename().string());
    return report;
  }
  const auto obj_rows = read_csv(obj_path);
  if (obj_rows.empty() || obj_rows.front().size() != 3 || obj_rows.front()[1].find(';') != std::string::npos) {
    return report;  // objective view is drawn for 1-D grids only
  }
  std::vector<double> xs, fs_values;
  for (const auto& r : obj_rows) {
    xs.push_back(std::stod(r[1]));
    fs_values.push_back(std::stod(r[2]));
  }
  const auto [fmin, fmax] = std::minmax_element(fs_values.begin(), fs_values.end());
  const double pad = 0.1 * (*fmax - *fmin + 1e-12);
  Frame f(*std::min_element(xs.begin(), xs.end()), *std::max_element(xs.begin(), xs.end()), *fmin - pad,
          *fmax + pad);
  std::ostringstream out;
  open_svg(out);
  f.axes(out, "x", "f(x)");
  out << "<polyline fill='none' stroke='#222' stroke-width='2' points='";
  for (std::size_t i = 0; i < xs.size(); ++i) out << f.x(xs[i]) << ',' << f.y(fs_values[i]) << ' ';
  out << "'/>\n";
  legend(out, 0, "f", "#222");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const fs::path tpath = dir / ("trace_" + labels[i] + "_seed" + seed + ".csv");
    if (!fs::exists(tpath)) {
      report.missing.push_back(tpath.filename().string());
      continue;
    }
    std::ifstream in(tpath, std::ios::binary);
    const auto rows = read_trace_csv(in);
    const char* color = kPalette[i % std::size(kPalette)];
    const double lane = kHeight - kBottom - 6.0 - 6.0 * static_cast<double>(i);
    out << "<g class='samples' data-label='" << labels[i] << "'>\n";
    for (const auto& r : rows) {
      const double x = f.x(xs.at(r.x_index));
      out << "<circle cx='" << x << "' cy='" << f.y(fs_values.at(r.x_index)) << "' r='3' fill='" << color
          << "' fill-opacity='0.25'/>";
      out << "<line x1='" << x << "' y1='" << lane << "' x2='" << x << "' y2='" << lane - 4 << "' stroke='" << color
          << "' stroke-opacity='0.4'/>\n";
    }
    out << "</g>\n";
    legend(out, i + 1, labels[i], color);
  }
  out << "</svg>\n";
  write_file(dir / "objective.svg", out.str());
  report.written.push_back(dir / "objective.svg");
  return report;
}

}  // namespace ctgp::cli
