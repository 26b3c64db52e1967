#include "smsearch/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace smsearch {

int Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return -1;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(double v, int prec = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

}  // namespace

Table parse_csv(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) return t;
  t.columns = split(line);
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line);
    if (cells.size() != t.columns.size()) throw std::runtime_error("csv row with wrong number of cells");
    std::vector<std::optional<double>> row;
    for (const auto& c : cells) {
      if (c.empty()) row.emplace_back();
      else row.emplace_back(std::stod(c));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return parse_csv(s.str());
}

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += '\n';
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out += ',';
      if (r[i]) out += num(*r[i]);
    }
    out += '\n';
  }
  return out;
}

Table aggregate(const std::vector<Table>& runs) {
  if (runs.empty()) throw std::runtime_error("nothing to aggregate");
  const Table& first = runs.front();
  for (const auto& r : runs)
    if (r.columns != first.columns || r.rows.size() != first.rows.size())
      throw std::runtime_error("runs have different shapes");
  Table a;
  a.columns.push_back(first.columns.at(0));
  for (std::size_t c = 1; c < first.columns.size(); ++c) {
    a.columns.push_back(first.columns[c] + "_mean");
    a.columns.push_back(first.columns[c] + "_std");
  }
  for (std::size_t i = 0; i < first.rows.size(); ++i) {
    std::vector<std::optional<double>> row{first.rows[i][0]};
    for (std::size_t c = 1; c < first.columns.size(); ++c) {
      double s = 0, n = 0;
      for (const auto& r : runs)
        if (r.rows[i][c]) {
          s += *r.rows[i][c];
          n += 1;
        }
      if (n == 0) {
        row.emplace_back();
        row.emplace_back();
        continue;
      }
      const double m = s / n;
      double v = 0;
      for (const auto& r : runs)
        if (r.rows[i][c]) v += (*r.rows[i][c] - m) * (*r.rows[i][c] - m);
      row.emplace_back(m);
      row.emplace_back(std::sqrt(v / n));
    }
    a.rows.push_back(std::move(row));
  }
  return a;
}

std::string svg_chart(const Table& agg, const std::string& title, const std::string& y_label,
                      const std::vector<Series>& series) {
  if (agg.rows.empty()) throw std::runtime_error("aggregate table is empty");
  std::string missing;
  for (const auto& s : series)
    if (agg.column(s.column + "_mean") < 0) missing += " " + s.column + "_mean";
  if (agg.column("t_s") < 0) missing += " t_s";
  if (!missing.empty()) throw std::runtime_error("missing columns:" + missing);

  const int tc = agg.column("t_s");
  double x0 = 1e300, x1 = -1e300, y0 = 0, y1 = -1e300;
  for (const auto& r : agg.rows) {
    if (!r[tc]) continue;
    x0 = std::min(x0, *r[tc]);
    x1 = std::max(x1, *r[tc]);
    for (const auto& s : series) {
      const int mc = agg.column(s.column + "_mean"), sc = agg.column(s.column + "_std");
      if (!r[mc]) continue;
      const double sd = sc >= 0 && r[sc] ? *r[sc] : 0;
      y0 = std::min(y0, *r[mc] - sd);
      y1 = std::max(y1, *r[mc] + sd);
    }
  }
  if (x1 <= x0) x1 = x0 + 1;
  if (y1 <= y0) y1 = y0 + 1;
  const double W = 720, H = 420, L = 70, R = 170, Tp = 40, B = 50;
  const double pw = W - L - R, ph = H - Tp - B;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return Tp + ph - (y - y0) / (y1 - y0) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" data-x0=\"" << num(x0)
    << "\" data-x1=\"" << num(x1) << "\" data-y0=\"" << num(y0) << "\" data-y1=\"" << num(y1) << "\" data-left=\"" << L
    << "\" data-top=\"" << Tp << "\" data-width=\"" << pw << "\" data-height=\"" << ph << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" << title
    << "</text>\n";
  o << "<rect x=\"" << L << "\" y=\"" << Tp << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = x0 + (x1 - x0) * i / 5, yv = y0 + (y1 - y0) * i / 5;
    o << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << fmt(Tp + ph + 18)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(xv, 0) << "</text>\n";
    o << "<text x=\"" << fmt(L - 6) << "\" y=\"" << fmt(py(yv) + 4)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(yv, y1 - y0 < 5 ? 2 : 0)
      << "</text>\n";
    o << "<line x1=\"" << L << "\" x2=\"" << L + pw << "\" y1=\"" << fmt(py(yv)) << "\" y2=\"" << fmt(py(yv))
      << "\" stroke=\"#ddd\"/>\n";
  }
  o << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 10
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">t (s)</text>\n";
  o << "<text transform=\"translate(16," << Tp + ph / 2
    << ") rotate(-90)\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << y_label << "</text>\n";

  int legend = 0;
  for (const auto& s : series) {
    const int mc = agg.column(s.column + "_mean"), sc = agg.column(s.column + "_std");
    std::vector<std::pair<double, double>> up, lo, mid;
    for (const auto& r : agg.rows) {
      if (!r[tc] || !r[mc]) continue;
      const double sd = sc >= 0 && r[sc] ? *r[sc] : 0;
      mid.emplace_back(*r[tc], *r[mc]);
      up.emplace_back(*r[tc], *r[mc] + sd);
      lo.emplace_back(*r[tc], *r[mc] - sd);
    }
    if (!mid.empty() && sc >= 0) {
      o << "<polygon fill=\"" << s.color << "\" fill-opacity=\"0.18\" stroke=\"none\" points=\"";
      for (const auto& [x, y] : up) o << num(px(x)) << ',' << num(py(y)) << ' ';
      for (auto it = lo.rbegin(); it != lo.rend(); ++it) o << num(px(it->first)) << ',' << num(py(it->second)) << ' ';
      o << "\"/>\n";
    }
    o << "<polyline data-series=\"" << s.column << "\" fill=\"none\" stroke=\"" << s.color
      << "\" stroke-width=\"1.6\" points=\"";
    for (const auto& [x, y] : mid) o << num(px(x)) << ',' << num(py(y)) << ' ';
    o << "\"/>\n";
    const double ly = Tp + 12 + 20 * legend++;
    o << "<line x1=\"" << L + pw + 12 << "\" x2=\"" << L + pw + 32 << "\" y1=\"" << ly << "\" y2=\"" << ly
      << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << L + pw + 38 << "\" y=\"" << ly + 4 << "\" font-family=\"sans-serif\" font-size=\"11\">"
      << s.label << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::vector<std::string> render_plots(const std::string& dir) {
  const Table agg = read_csv(dir + "/aggregate.csv");
  struct Chart {
    std::string file, title, y;
    std::vector<Series> s;
  };
  const std::vector<Chart> charts{
      {"localization.svg",
       "Localization",
       "m",
       {{"e_t_mean_m", "mean error e_t", "#d62728"}, {"equiv_radius_m", "equivalent radius", "#1f77b4"}}},
      {"targets.svg",
       "Targets",
       "count",
       {{"card_L", "identified so far", "#d62728"},
        {"card_in_fov", "in a FoV", "#222222"},
        {"card_detected_now", "detected now", "#2ca02c"}}},
      {"coverage.svg",
       "Ground coverage",
       "fraction of ground",
       {{"phi_cg_frac", "cumulated ground", "#9467bd"},
        {"phi_xbar_frac", "unknown region", "#ff7f0e"},
        {"phi_xbar_hidden_frac", "unknown and hidden", "#1f77b4"}}},
      {"fov.svg",
       "Instantaneous coverage",
       "fraction of ground",
       {{"phi_fov_frac", "FoV", "#8c564b"}, {"phi_g_frac", "seen as ground", "#17becf"}}},
  };
  std::vector<std::string> out;
  for (const auto& c : charts) {
    const std::string svg = svg_chart(agg, c.title, c.y, c.s);
    std::ofstream f(dir + "/" + c.file, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + dir + "/" + c.file);
    f << svg;
    out.push_back(c.file);
  }
  return out;
}

}  // namespace smsearch
