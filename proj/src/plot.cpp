#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "relaybc/experiments.hpp"

namespace relaybc {

namespace {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  int col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
  }
};

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open CSV: " + path);
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.push_back("");
    if (first) {
      t.header = cells;
      first = false;
    } else {
      if (cells.size() != t.header.size()) {
        throw std::runtime_error("malformed CSV row in " + path);
      }
      t.rows.push_back(cells);
    }
  }
  if (first) throw std::runtime_error("empty CSV: " + path);
  return t;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> pts;
};

std::string svg_header(int w, int h) {
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" "
                "height=\"%d\" viewBox=\"0 0 %d %d\">\n",
                w, h, w, h);
  return std::string(buf) + "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

std::string axis_label_x(const std::string& preset) {
  if (preset == "fig4-gap") return "total subframes L";
  if (preset == "fig7-hap-position") return "HAP x [m]";
  if (preset == "fig2-convergence") return "iteration";
  if (preset == "custom") return "axis value";
  return "path-loss exponent (S-D)";
}

std::string axis_label_y(const std::string& preset) {
  if (preset == "fig4-gap") return "gap [bits/block]";
  if (preset == "fig7-hap-position") return "HAP y [m]";
  if (preset == "fig8-subframes") return "subframes";
  if (preset == "fig2-convergence") return "t [bits/block]";
  return "throughput [bits/block]";
}

void render_lines(const std::vector<Series>& series, const std::string& xlab,
                  const std::string& ylab, bool scatter, std::ostream& out) {
  const int W = 760, H = 520, ml = 70, mr = 180, mt = 30, mb = 55;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series) {
    for (auto [x, y] : s.pts) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (xmin > xmax) throw std::runtime_error("no plottable rows");
  if (xmax == xmin) { xmax += 1.0; xmin -= 1.0; }
  if (ymax == ymin) { ymax += 1.0; ymin -= 1.0; }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  auto px = [&](double x) {
    return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr);
  };
  auto py = [&](double y) {
    return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb);
  };

  out << svg_header(W, H);
  out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr
      << "\" height=\"" << H - mt - mb
      << "\" fill=\"none\" stroke=\"#333\"/>\n";
  char buf[256];
  for (int i = 0; i <= 5; ++i) {
    const double xv = xmin + i * (xmax - xmin) / 5;
    const double yv = ymin + i * (ymax - ymin) / 5;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%d\" font-size=\"11\" "
                  "text-anchor=\"middle\">%.3g</text>\n",
                  px(xv), H - mb + 16, xv);
    out << buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%d\" y=\"%.1f\" font-size=\"11\" "
                  "text-anchor=\"end\">%.4g</text>\n",
                  ml - 6, py(yv) + 4, yv);
    out << buf;
  }
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%d\" y=\"%d\" font-size=\"13\" "
                "text-anchor=\"middle\">%s</text>\n",
                ml + (W - ml - mr) / 2, H - 12, xlab.c_str());
  out << buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"16\" y=\"%d\" font-size=\"13\" "
                "text-anchor=\"middle\" transform=\"rotate(-90 16 %d)\">%s"
                "</text>\n",
                mt + (H - mt - mb) / 2, mt + (H - mt - mb) / 2, ylab.c_str());
  out << buf;

  int ci = 0;
  for (const auto& s : series) {
    const char* color = kPalette[ci % 8];
    if (!scatter && s.pts.size() > 1) {
      out << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.8\" points=\"";
      for (auto [x, y] : s.pts) {
        std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", px(x), py(y));
        out << buf;
      }
      out << "\"/>\n";
    }
    for (auto [x, y] : s.pts) {
      std::snprintf(buf, sizeof(buf),
                    "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"2.6\" fill=\"%s\"/>\n",
                    px(x), py(y), color);
      out << buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "<rect x=\"%d\" y=\"%d\" width=\"12\" height=\"12\" "
                  "fill=\"%s\"/>\n<text x=\"%d\" y=\"%d\" "
                  "font-size=\"11\">%s</text>\n",
                  W - mr + 12, mt + 18 * ci, color, W - mr + 30,
                  mt + 18 * ci + 10, s.label.c_str());
    out << buf;
    ++ci;
  }
  out << "</svg>\n";
}

void render_heatmap(const CsvTable& t, std::ostream& out) {
  const int cx = t.col("axis"), cy = t.col("axis2"), cv = t.col("throughput_bits");
  const int cvar = t.col("variant"), cst = t.col("status");
  if (cx < 0 || cy < 0 || cv < 0) {
    throw std::runtime_error("CSV lacks heatmap columns");
  }
  std::map<std::string, std::vector<std::array<double, 3>>> groups;
  double vmin = 1e300, vmax = -1e300;
  for (const auto& r : t.rows) {
    if (cst >= 0 && r[cst] != "ok") continue;
    if (r[cx].empty() || r[cy].empty() || r[cv].empty()) continue;
    const double v = std::stod(r[cv]);
    groups[cvar >= 0 ? r[cvar] : ""].push_back(
        {std::stod(r[cx]), std::stod(r[cy]), v});
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  if (groups.empty()) {
    throw std::runtime_error("no rows carry the two heatmap coordinates");
  }
  if (vmax == vmin) vmax = vmin + 1.0;

  const int cell = 26, pad = 60;
  int panel_w = 0, panel_h = 0;
  for (const auto& [name, pts] : groups) {
    std::vector<double> xs, ys;
    for (const auto& p : pts) {
      xs.push_back(p[0]);
      ys.push_back(p[1]);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
    panel_w = std::max<int>(panel_w, static_cast<int>(xs.size()) * cell);
    panel_h = std::max<int>(panel_h, static_cast<int>(ys.size()) * cell);
  }
  const int W = pad * 2 + panel_w + 120;
  const int H =
      static_cast<int>(groups.size()) * (panel_h + pad) + pad;
  out << svg_header(W, H);
  char buf[256];
  int panel = 0;
  for (const auto& [name, pts] : groups) {
    const int oy = pad + panel * (panel_h + pad);
    std::vector<double> xs, ys;
    for (const auto& p : pts) {
      xs.push_back(p[0]);
      ys.push_back(p[1]);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
    auto idx = [](const std::vector<double>& v, double x) {
      return static_cast<int>(std::lower_bound(v.begin(), v.end(), x) -
                              v.begin());
    };
    for (const auto& p : pts) {
      const double f = (p[2] - vmin) / (vmax - vmin);
      const int red = static_cast<int>(40 + 215 * f);
      const int blue = static_cast<int>(255 - 215 * f);
      std::snprintf(buf, sizeof(buf),
                    "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" "
                    "fill=\"rgb(%d,60,%d)\"/>\n",
                    pad + idx(xs, p[0]) * cell,
                    oy + (static_cast<int>(ys.size()) - 1 - idx(ys, p[1])) * cell,
                    cell, cell, red, blue);
      out << buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%d\" y=\"%d\" font-size=\"13\">%s  "
                  "[%.4g, %.4g] bits/block</text>\n",
                  pad, oy - 8, name.c_str(), vmin, vmax);
    out << buf;
    ++panel;
  }
  out << "</svg>\n";
}

}  // namespace

void emit_plot(const std::string& csv_path, PlotStyle style,
               const std::string& out_svg) {
  const CsvTable t = read_csv(csv_path);
  const bool trace = t.col("iteration") >= 0;
  const std::string preset =
      t.rows.empty() ? "" : t.rows.front()[std::max(0, t.col("preset"))];

  std::ofstream out(out_svg);
  if (!out) throw std::runtime_error("cannot open output: " + out_svg);

  if (style == PlotStyle::heatmap ||
      (style == PlotStyle::automatic && preset == "fig7-hap-position")) {
    render_heatmap(t, out);
    return;
  }

  std::vector<Series> series;
  auto series_for = [&](const std::string& label) -> Series& {
    for (auto& s : series) {
      if (s.label == label) return s;
    }
    series.push_back({label, {}});
    return series.back();
  };

  if (trace) {
    const int ci = t.col("iteration"), cv = t.col("t_bits"),
              cvar = t.col("variant");
    for (const auto& r : t.rows) {
      if (r[cv].empty()) continue;
      series_for(cvar >= 0 ? r[cvar] : "trace")
          .pts.emplace_back(std::stod(r[ci]), std::stod(r[cv]));
    }
  } else {
    const int cx = t.col("axis"), cv = t.col("throughput_bits"),
              cs = t.col("scheme"), cvar = t.col("variant"),
              cst = t.col("status"), cm = t.col("M"), cn = t.col("N");
    if (cx < 0 || cv < 0) throw std::runtime_error("CSV lacks plot columns");
    const bool split_plot = preset == "fig8-subframes";
    for (const auto& r : t.rows) {
      if (cst >= 0 && r[cst] != "ok" && r[cst] != "derived") continue;
      std::string label = cs >= 0 ? r[cs] : "series";
      if (cvar >= 0 && !r[cvar].empty()) label += " " + r[cvar];
      if (preset == "fig4-gap" && (cs < 0 || r[cs] != "gap")) continue;
      if (split_plot) {
        if (!r[cm].empty()) {
          series_for("M " + label).pts.emplace_back(std::stod(r[cx]),
                                                    std::stod(r[cm]));
          series_for("N " + label).pts.emplace_back(std::stod(r[cx]),
                                                    std::stod(r[cn]));
        }
      } else {
        series_for(label).pts.emplace_back(std::stod(r[cx]),
                                           std::stod(r[cv]));
      }
    }
  }
  for (auto& s : series) {
    std::sort(s.pts.begin(), s.pts.end());
  }
  render_lines(series, axis_label_x(preset), axis_label_y(preset),
               style == PlotStyle::scatter, out);
}

}  // namespace relaybc
