#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace buridan {

/// One curve P(m) at time t.
struct Profile {
  double t = 0.0;
  std::vector<double> m;
  std::vector<double> p;
};

/// 17 significant digits, so the value reads back exactly.
std::string fmt(double x);

/// Long-format CSV with header `t,m,P`.
void write_profiles_csv(const std::filesystem::path& file, const std::vector<Profile>& curves);
std::vector<Profile> read_profiles_csv(const std::filesystem::path& file);

/// One file per curve: `# t=<value>` then header `m,P`.
void write_profile_files(const std::filesystem::path& dir, const std::vector<Profile>& curves);

/// int |P_a - P_b| dm with both curves linearly interpolated (zero outside
/// their support) on the union of their nodes.
double l1_distance(const Profile& a, const Profile& b);

struct SvgCurve {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};
/// Minimal line plot with axes, ticks, labels and a legend.
std::string render_svg(const std::vector<SvgCurve>& curves, const std::string& title,
                       const std::string& x_label, const std::string& y_label);

void write_text(const std::filesystem::path& file, const std::string& text);

}  // namespace buridan
