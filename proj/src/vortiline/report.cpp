#include "vortiline/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace vortiline {
namespace {

// ---- deterministic formatting -------------------------------------------

std::string fnum(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string px(double v) { return fnum(v, "%.2f"); }

// ---- axis mapping ---------------------------------------------------------

struct Axis {
  double lo = 0.0, hi = 1.0;    // data range
  double p0 = 0.0, p1 = 1.0;    // pixel range (p0 maps lo)
  double map(double v) const { return p0 + (v - lo) / (hi - lo) * (p1 - p0); }
};

// Round the range outward to "nice" tick positions (1/2/5 ladder).
std::vector<double> nice_ticks(double lo, double hi, int target) {
  if (!(hi > lo)) return {lo};
  double raw = (hi - lo) / std::max(1, target);
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double norm = raw / mag;
  double step = (norm <= 1.5 ? 1.0 : norm <= 3.5 ? 2.0 : norm <= 7.5 ? 5.0 : 10.0) * mag;
  std::vector<double> t;
  double first = std::ceil(lo / step - 1e-9) * step;
  for (double v = first; v <= hi + 1e-9 * step; v += step) {
    double r = std::abs(v) < 1e-12 * step ? 0.0 : v;
    t.push_back(r);
  }
  return t;
}

struct Series {
  std::vector<double> x, y;
};

Series pick(const CsvTable& tab, const std::string& xcol, const std::string& ycol) {
  Series s;
  int xi = tab.col(xcol), yi = tab.col(ycol);
  if (xi < 0 || yi < 0) return s;
  for (const auto& r : tab.rows) {
    s.x.push_back(r[std::size_t(xi)]);
    s.y.push_back(r[std::size_t(yi)]);
  }
  return s;
}

// ---- svg fragments --------------------------------------------------------

void text(std::string& out, double x, double y, const std::string& s, int size,
          const char* anchor = "start", const char* fill = "#222222") {
  out += "<text x=\"" + px(x) + "\" y=\"" + px(y) + "\" font-size=\"" + std::to_string(size) +
         "\" text-anchor=\"" + anchor + "\" fill=\"" + fill + "\">" + s + "</text>\n";
}

void line(std::string& out, double x1, double y1, double x2, double y2, const char* stroke,
          const char* extra = "") {
  out += "<line x1=\"" + px(x1) + "\" y1=\"" + px(y1) + "\" x2=\"" + px(x2) + "\" y2=\"" +
         px(y2) + "\" stroke=\"" + stroke + "\"" + extra + "/>\n";
}

// Polyline broken at non-finite samples; optional log10 transform of y.
void poly(std::string& out, const Axis& ax, const Axis& ay, const Series& s, bool logy,
          const char* stroke) {
  std::string pts;
  auto flush = [&]() {
    if (pts.empty()) return;
    out += "<polyline fill=\"none\" stroke=\"" + std::string(stroke) +
           "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    pts.clear();
  };
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    double y = s.y[i];
    if (logy) y = y > 0.0 ? std::log10(y) : std::nan("");
    if (!std::isfinite(s.x[i]) || !std::isfinite(y)) {
      flush();
      continue;
    }
    if (!pts.empty()) pts += " ";
    pts += px(ax.map(s.x[i])) + "," + px(ay.map(y));
  }
  flush();
}

struct Panel {
  double x0, y0, x1, y1;  // plot box in pixels
};

void frame(std::string& out, const Panel& p, const std::string& title) {
  out += "<rect x=\"" + px(p.x0) + "\" y=\"" + px(p.y0) + "\" width=\"" + px(p.x1 - p.x0) +
         "\" height=\"" + px(p.y1 - p.y0) +
         "\" fill=\"#fcfcfc\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
  text(out, p.x0, p.y0 - 8, title, 14);
}

void x_ticks(std::string& out, const Panel& p, const Axis& ax, bool labels = true) {
  for (double v : nice_ticks(ax.lo, ax.hi, 6)) {
    double X = ax.map(v);
    line(out, X, p.y1, X, p.y1 + 4, "#444444");
    line(out, X, p.y0, X, p.y1, "#e0e0e0");
    if (labels) text(out, X, p.y1 + 16, fnum(v), 11, "middle");
  }
}

void y_ticks_log(std::string& out, const Panel& p, const Axis& ay) {
  double span = ay.hi - ay.lo;
  std::vector<double> tk;
  if (span >= 1.0) {
    for (double d = std::ceil(ay.lo - 1e-9); d <= ay.hi + 1e-9; d += std::max(1.0, std::floor(span / 6.0)))
      tk.push_back(d);
  } else {
    tk = nice_ticks(ay.lo, ay.hi, 5);
  }
  for (double d : tk) {
    double Y = ay.map(d);
    line(out, p.x0 - 4, Y, p.x0, Y, "#444444");
    line(out, p.x0, Y, p.x1, Y, "#e0e0e0");
    text(out, p.x0 - 7, Y + 4, "1e" + fnum(d, "%.3g"), 11, "end");
  }
}

bool finite_range(const std::vector<const Series*>& ss, bool logy, double& lo, double& hi,
                  double& xlo, double& xhi) {
  bool any = false;
  for (const Series* s : ss)
    for (std::size_t i = 0; i < s->x.size(); ++i) {
      double y = s->y[i];
      if (logy) {
        if (!(y > 0.0)) continue;
        y = std::log10(y);
      }
      if (!std::isfinite(s->x[i]) || !std::isfinite(y)) continue;
      if (!any) {
        lo = hi = y;
        xlo = xhi = s->x[i];
        any = true;
      } else {
        lo = std::min(lo, y);
        hi = std::max(hi, y);
        xlo = std::min(xlo, s->x[i]);
        xhi = std::max(xhi, s->x[i]);
      }
    }
  if (!any) return false;
  if (!(xhi > xlo)) {
    xlo -= 0.5;
    xhi += 0.5;
  }
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  }
  return true;
}

const char* kColOmega = "#1a1a1a";
const char* kColSingle = "#1565c0";
const char* kColDouble = "#e65100";
const char* kColResid = "#b71c1c";
const char* kColOk = "#2e7d32";
const char* kColBad = "#c62828";
const char* kColNa = "#bdbdbd";

}  // namespace

std::string render_report_svg(const ReportTables& in) {
  const double W = 960, H = 940;
  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + px(W) + "\" height=\"" + px(H) +
         "\" viewBox=\"0 0 " + px(W) + " " + px(H) + "\" font-family=\"monospace\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + px(W) + "\" height=\"" + px(H) +
         "\" fill=\"#ffffff\"/>\n";
  text(svg, W / 2, 26, in.title, 17, "middle");

  // ---- panel 1: growth vs envelopes --------------------------------------
  Panel p1{80, 60, 930, 330};
  frame(svg, p1, "max |w| and growth envelopes (log scale)");
  Series omg = pick(in.envelope, "time", "omega");
  Series es = pick(in.envelope, "time", "env_single");
  Series ed = pick(in.envelope, "time", "env_double");
  Series bkm = pick(in.envelope, "time", "bkm_partial");
  double lo, hi, xlo, xhi;
  if (finite_range({&omg, &es, &ed}, true, lo, hi, xlo, xhi)) {
    Axis ax{xlo, xhi, p1.x0, p1.x1};
    Axis ay{lo - 0.05 * (hi - lo) - 0.02, hi + 0.05 * (hi - lo) + 0.02, p1.y1, p1.y0};
    x_ticks(svg, p1, ax);
    y_ticks_log(svg, p1, ay);
    poly(svg, ax, ay, es, true, kColSingle);
    poly(svg, ax, ay, ed, true, kColDouble);
    poly(svg, ax, ay, omg, true, kColOmega);
    text(svg, p1.x0 + 10, p1.y0 + 18, "measured max |w|", 12, "start", kColOmega);
    text(svg, p1.x0 + 10, p1.y0 + 34, "single-exp envelope", 12, "start", kColSingle);
    text(svg, p1.x0 + 10, p1.y0 + 50, "double-exp envelope", 12, "start", kColDouble);
    if (!bkm.y.empty() && std::isfinite(bkm.y.back()))
      text(svg, p1.x1 - 10, p1.y0 + 18, "bkm integral: " + fnum(bkm.y.back()), 12, "end");
    text(svg, (p1.x0 + p1.x1) / 2, p1.y1 + 32, "time", 12, "middle");
  } else {
    text(svg, (p1.x0 + p1.x1) / 2, (p1.y0 + p1.y1) / 2, "no envelope data", 13, "middle",
         "#888888");
  }

  // ---- panel 2: identity residuals ----------------------------------------
  Panel p2{80, 400, 930, 610};
  frame(svg, p2, "evolution-identity relative residual (log scale)");
  Series res = pick(in.identity, "time", "relative_residual");
  if (finite_range({&res}, true, lo, hi, xlo, xhi)) {
    lo = std::min(lo, -2.2);  // keep the 1e-2 reference line in view
    hi = std::max(hi, -1.8);
    Axis ax{xlo, xhi, p2.x0, p2.x1};
    Axis ay{lo - 0.2, hi + 0.2, p2.y1, p2.y0};
    x_ticks(svg, p2, ax);
    y_ticks_log(svg, p2, ay);
    double yref = ay.map(-2.0);
    line(svg, p2.x0, yref, p2.x1, yref, "#888888", " stroke-dasharray=\"6,4\"");
    text(svg, p2.x1 - 6, yref - 5, "0.01", 11, "end", "#888888");
    poly(svg, ax, ay, res, true, kColResid);
    for (std::size_t i = 0; i < res.x.size(); ++i) {
      if (!(res.y[i] > 0.0) || !std::isfinite(res.x[i])) continue;
      svg += "<circle cx=\"" + px(ax.map(res.x[i])) + "\" cy=\"" +
             px(ay.map(std::log10(res.y[i]))) + "\" r=\"2.5\" fill=\"" + kColResid + "\"/>\n";
    }
    text(svg, (p2.x0 + p2.x1) / 2, p2.y1 + 32, "time", 12, "middle");
  } else {
    text(svg, (p2.x0 + p2.x1) / 2, (p2.y0 + p2.y1) / 2, "no identity data", 13, "middle",
         "#888888");
  }

  // ---- panel 3: assumption-flag timeline ----------------------------------
  Panel p3{180, 680, 930, 890};
  frame(svg, p3, "per-time hypothesis and quality flags (green = holds)");
  struct FlagRow {
    const CsvTable* tab;
    const char* col;
    const char* label;
  };
  std::vector<FlagRow> want = {
      {&in.envelope, "dom_single", "single-exp dominates"},
      {&in.envelope, "dom_double", "double-exp dominates"},
      {&in.envelope, "f_kappa", "int kappa <= C0"},
      {&in.envelope, "f_tau", "int |tau| <= C0"},
      {&in.envelope, "f_c0", "Omega_L >= c0 Omega"},
      {&in.envelope, "f_end_speed", "end speed <= Cl V"},
      {&in.envelope, "f_omega_log", "max |u| <= Cu log Omega"},
      {&in.diagnostics, "resolved", "segment resolved"},
      {&in.diagnostics, "endpoint_max", "endpoint max"},
  };
  std::vector<FlagRow> rows;
  for (const FlagRow& f : want)
    if (f.tab->col(f.col) >= 0 && !f.tab->rows.empty()) rows.push_back(f);
  if (!rows.empty()) {
    // shared time axis across all flag sources
    double txlo = 0.0, txhi = 0.0;
    bool any = false;
    for (const FlagRow& f : rows) {
      Series s = pick(*f.tab, "time", f.col);
      for (double t : s.x) {
        if (!std::isfinite(t)) continue;
        if (!any) {
          txlo = txhi = t;
          any = true;
        } else {
          txlo = std::min(txlo, t);
          txhi = std::max(txhi, t);
        }
      }
    }
    if (!(txhi > txlo)) {
      txlo -= 0.5;
      txhi += 0.5;
    }
    Axis ax{txlo, txhi, p3.x0, p3.x1};
    x_ticks(svg, p3, ax, true);
    double rh = (p3.y1 - p3.y0) / double(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      Series s = pick(*rows[r].tab, "time", rows[r].col);
      double ry = p3.y0 + rh * double(r);
      text(svg, p3.x0 - 8, ry + rh / 2 + 4, rows[r].label, 11, "end");
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i])) continue;
        double cl = i > 0 ? 0.5 * (s.x[i - 1] + s.x[i]) : s.x[i];
        double cr = i + 1 < s.x.size() ? 0.5 * (s.x[i] + s.x[i + 1]) : s.x[i];
        double X0 = ax.map(std::max(cl, txlo)), X1 = ax.map(std::min(cr, txhi));
        if (!(X1 > X0)) X1 = X0 + 1.0;
        const char* col = !std::isfinite(s.y[i]) ? kColNa : (s.y[i] != 0.0 ? kColOk : kColBad);
        svg += "<rect x=\"" + px(X0) + "\" y=\"" + px(ry + 2) + "\" width=\"" + px(X1 - X0) +
               "\" height=\"" + px(rh - 4) + "\" fill=\"" + col + "\" fill-opacity=\"0.85\"/>\n";
      }
    }
    text(svg, (p3.x0 + p3.x1) / 2, p3.y1 + 32, "time", 12, "middle");
  } else {
    text(svg, (p3.x0 + p3.x1) / 2, (p3.y0 + p3.y1) / 2, "no flag data", 13, "middle", "#888888");
  }

  svg += "</svg>\n";
  return svg;
}

}  // namespace vortiline
