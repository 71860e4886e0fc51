#include "buridan/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace buridan {

namespace {

double interp(const Profile& c, double x) {
  if (c.m.empty() || x < c.m.front() || x > c.m.back()) return 0.0;
  const auto it = std::lower_bound(c.m.begin(), c.m.end(), x);
  const std::size_t i = it - c.m.begin();
  if (c.m[i] == x) return c.p[i];
  const double w = (x - c.m[i - 1]) / (c.m[i] - c.m[i - 1]);
  return c.p[i - 1] + w * (c.p[i] - c.p[i - 1]);
}

const char* kPalette[] = {"#1b4f72", "#b03a2e", "#1e8449", "#7d3c98", "#d68910",
                          "#117a65", "#34495e", "#c0392b", "#2e86c1", "#a04000"};

std::string nice(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

}  // namespace

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream os(file, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + file.string());
  os << text;
}

void write_profiles_csv(const std::filesystem::path& file, const std::vector<Profile>& curves) {
  std::string s = "t,m,P\n";
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < c.m.size(); ++i) {
      s += fmt(c.t) + ',' + fmt(c.m[i]) + ',' + fmt(c.p[i]) + '\n';
    }
  }
  write_text(file, s);
}

void write_profile_files(const std::filesystem::path& dir, const std::vector<Profile>& curves) {
  for (std::size_t k = 0; k < curves.size(); ++k) {
    std::string s = "# t=" + fmt(curves[k].t) + "\nm,P\n";
    for (std::size_t i = 0; i < curves[k].m.size(); ++i) {
      s += fmt(curves[k].m[i]) + ',' + fmt(curves[k].p[i]) + '\n';
    }
    char name[32];
    std::snprintf(name, sizeof name, "P_%03zu.csv", k);
    write_text(dir / name, s);
  }
}

std::vector<Profile> read_profiles_csv(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) throw std::runtime_error("cannot read " + file.string());
  std::string line;
  if (!std::getline(is, line) || line != "t,m,P") {
    throw std::runtime_error(file.string() + ": expected header t,m,P");
  }
  std::vector<Profile> out;
  int n = 1;
  while (std::getline(is, line)) {
    ++n;
    if (line.empty()) continue;
    double t, m, p;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &t, &m, &p) != 3) {
      throw std::runtime_error(file.string() + ":" + std::to_string(n) + ": malformed row");
    }
    if (out.empty() || out.back().t != t) out.push_back({t, {}, {}});
    out.back().m.push_back(m);
    out.back().p.push_back(p);
  }
  return out;
}

double l1_distance(const Profile& a, const Profile& b) {
  std::vector<double> x = a.m;
  x.insert(x.end(), b.m.begin(), b.m.end());
  std::sort(x.begin(), x.end());
  x.erase(std::unique(x.begin(), x.end()), x.end());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double d0 = interp(a, x[i]) - interp(b, x[i]);
    const double d1 = interp(a, x[i + 1]) - interp(b, x[i + 1]);
    const double h = x[i + 1] - x[i];
    if ((d0 >= 0.0) == (d1 >= 0.0)) {
      sum += 0.5 * h * (std::abs(d0) + std::abs(d1));
    } else {
      // |.| of a linear function crossing zero
      sum += 0.5 * h * (d0 * d0 + d1 * d1) / (std::abs(d0) + std::abs(d1));
    }
  }
  return sum;
}

std::string render_svg(const std::vector<SvgCurve>& curves, const std::string& title,
                       const std::string& x_label, const std::string& y_label) {
  const double w = 820, h = 520, left = 70, right = 170, top = 40, bottom = 60;
  double x0 = 1e300, x1 = -1e300, y1 = 0.0;
  for (const auto& c : curves) {
    for (double v : c.x) { x0 = std::min(x0, v); x1 = std::max(x1, v); }
    for (double v : c.y) y1 = std::max(y1, v);
  }
  if (!(x1 > x0)) { x0 = 0.0; x1 = 1.0; }
  if (!(y1 > 0.0)) y1 = 1.0;
  y1 *= 1.05;
  const double pw = w - left - right, ph = h - top - bottom;
  auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return top + ph - y / y1 * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << left + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << title << "</text>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0;
    const double yv = y1 * i / 4.0;
    os << "<line x1=\"" << sx(xv) << "\" y1=\"" << top + ph << "\" x2=\"" << sx(xv) << "\" y2=\""
       << top + ph + 5 << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << sx(xv) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
       << nice(xv) << "</text>\n";
    os << "<line x1=\"" << left - 5 << "\" y1=\"" << sy(yv) << "\" x2=\"" << left << "\" y2=\""
       << sy(yv) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << left - 8 << "\" y=\"" << sy(yv) + 4 << "\" text-anchor=\"end\">"
       << nice(yv) << "</text>\n";
  }
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << h - 15 << "\" text-anchor=\"middle\">"
     << x_label << "</text>\n";
  os << "<text x=\"18\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
     << top + ph / 2 << ")\">" << y_label << "</text>\n";
  for (std::size_t k = 0; k < curves.size(); ++k) {
    const char* col = kPalette[k % (sizeof kPalette / sizeof *kPalette)];
    os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < curves[k].x.size(); ++i) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", sx(curves[k].x[i]), sy(curves[k].y[i]));
      os << buf;
    }
    os << "\"/>\n";
    const double ly = top + 14 + 18.0 * k;
    os << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 36
       << "\" y2=\"" << ly << "\" stroke=\"" << col << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << left + pw + 42 << "\" y=\"" << ly + 4 << "\">" << curves[k].label
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace buridan
