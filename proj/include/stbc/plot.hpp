#pragma once

// Minimal SVG scatter/line plots and the rate-vs-complexity tradeoff table.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "stbc/constructions.hpp"
#include "stbc/simharness.hpp"

namespace stbc {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool connect = false;
};

struct PlotAxes {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
};

namespace detail {

inline std::string fmt(double v, const char* spec = "%.4g") {
  char buf[48];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
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

inline const char* series_color(size_t i) {
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};
  return kColors[i % (sizeof(kColors) / sizeof(kColors[0]))];
}

}  // namespace detail

inline std::string render_svg(const std::vector<PlotSeries>& series, const PlotAxes& axes) {
  constexpr double W = 640, H = 440, L = 70, R = 170, Tm = 40, B = 55;
  auto ty = [&](double v) { return axes.log_y ? std::log10(v) : v; };

  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series)
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (axes.log_y && !(s.y[i] > 0)) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (axes.log_y) y0 = std::floor(y0), y1 = std::ceil(y1);
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  if (!axes.log_y) {
    const double px = 0.05 * (x1 - x0), py = 0.05 * (y1 - y0);
    x0 -= px, x1 += px, y0 -= py, y1 += py;
  }
  auto sx = [&](double v) { return L + (v - x0) / (x1 - x0) * (W - L - R); };
  auto sy = [&](double v) { return H - B - (ty(v) - y0) / (y1 - y0) * (H - Tm - B); };
  auto sy_raw = [&](double t) { return H - B - (t - y0) / (y1 - y0) * (H - Tm - B); };

  std::string o = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::fmt(W) + "\" height=\"" +
                  detail::fmt(H) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o += "<text x=\"" + detail::fmt(W / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
       detail::xml_escape(axes.title) + "</text>\n";
  o += "<rect x=\"" + detail::fmt(L) + "\" y=\"" + detail::fmt(Tm) + "\" width=\"" + detail::fmt(W - L - R) +
       "\" height=\"" + detail::fmt(H - Tm - B) + "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 5; ++i) {
    const double v = x0 + (x1 - x0) * i / 5.0;
    o += "<text x=\"" + detail::fmt(sx(v)) + "\" y=\"" + detail::fmt(H - B + 16) + "\" text-anchor=\"middle\">" +
         detail::fmt(v, "%.3g") + "</text>\n";
  }
  if (axes.log_y) {
    for (int e = static_cast<int>(y0); e <= static_cast<int>(y1); ++e)
      o += "<text x=\"" + detail::fmt(L - 6) + "\" y=\"" + detail::fmt(sy_raw(e) + 4) +
           "\" text-anchor=\"end\">1e" + std::to_string(e) + "</text>\n" + "<line x1=\"" + detail::fmt(L) +
           "\" x2=\"" + detail::fmt(W - R) + "\" y1=\"" + detail::fmt(sy_raw(e)) + "\" y2=\"" +
           detail::fmt(sy_raw(e)) + "\" stroke=\"#ddd\"/>\n";
  } else {
    for (int i = 0; i <= 5; ++i) {
      const double t = y0 + (y1 - y0) * i / 5.0;
      o += "<text x=\"" + detail::fmt(L - 6) + "\" y=\"" + detail::fmt(sy_raw(t) + 4) + "\" text-anchor=\"end\">" +
           detail::fmt(t, "%.3g") + "</text>\n";
    }
  }
  o += "<text x=\"" + detail::fmt(L + (W - L - R) / 2) + "\" y=\"" + detail::fmt(H - 14) +
       "\" text-anchor=\"middle\">" + detail::xml_escape(axes.x_label) + "</text>\n";
  o += "<text transform=\"translate(18," + detail::fmt(Tm + (H - Tm - B) / 2) +
       ") rotate(-90)\" text-anchor=\"middle\">" + detail::xml_escape(axes.y_label) + "</text>\n";

  for (size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = detail::series_color(si);
    std::string path;
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (axes.log_y && !(s.y[i] > 0)) continue;
      const std::string px = detail::fmt(sx(s.x[i])), py = detail::fmt(sy(s.y[i]));
      o += "<circle cx=\"" + px + "\" cy=\"" + py + "\" r=\"4\" fill=\"" + color + "\"/>\n";
      path += (path.empty() ? "M" : " L") + px + " " + py;
    }
    if (s.connect && !path.empty())
      o += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" + color + "\"/>\n";
    const double ly = Tm + 10 + 18 * static_cast<double>(si);
    o += "<circle cx=\"" + detail::fmt(W - R + 14) + "\" cy=\"" + detail::fmt(ly) + "\" r=\"4\" fill=\"" + color +
         "\"/><text x=\"" + detail::fmt(W - R + 24) + "\" y=\"" + detail::fmt(ly + 4) + "\">" +
         detail::xml_escape(s.label) + "</text>\n";
  }
  o += "</svg>\n";
  return o;
}

struct TradeoffRendering {
  std::vector<TradeoffRow> rows;
  std::string csv;
  std::string svg;
};

/// Rate against worst-case decoding exponent for every feasible family at
/// (N, T). The lambda column holds the real symbols per group.
inline TradeoffRendering render_tradeoff(int antennas, int delay) {
  TradeoffRendering out;
  out.rows = tabulate_tradeoff(antennas, delay);
  out.csv = "family,lambda,rate,complexity_exponent\n";
  std::vector<PlotSeries> series;
  for (const auto& r : out.rows) {
    out.csv += to_string(r.family) + "," + std::to_string(r.reals_per_group) + "," + r.rate.str() + "," +
               r.exponent.str() + "\n";
    const std::string label = to_string(r.family);
    auto it = std::find_if(series.begin(), series.end(), [&](const PlotSeries& s) { return s.label == label; });
    if (it == series.end()) {
      series.push_back({label, {}, {}, r.family == TableFamily::kSection3});
      it = series.end() - 1;
    }
    it->x.push_back(r.exponent.value());
    it->y.push_back(r.rate.value());
  }
  out.svg = render_svg(series, {"Rate vs worst-case decoding exponent, N=" + std::to_string(antennas) +
                                    ", T=" + std::to_string(delay),
                                "exponent e (complexity M^e)", "rate (symbols per channel use)", false});
  return out;
}

inline std::string render_ber_svg(const SimResult& r, const std::string& label) {
  PlotSeries s{label, {}, {}, true};
  for (const auto& p : r.points) {
    s.x.push_back(p.snr_db);
    s.y.push_back(p.ber);
  }
  return render_svg({s}, {"Bit error rate", "SNR (dB)", "BER", true});
}

}  // namespace stbc
