#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>

#include "brwfpt/cli.hpp"

namespace brwfpt::cli {

FitResult fit_power_law(const std::vector<FitPoint>& points, const CramerProfile& profile) {
  const double decay = (profile.I_chat1 - profile.log_rho) / profile.chat1;
  std::vector<double> xs;
  std::vector<double> ys;
  FitResult f;
  for (const FitPoint& p : points) {
    if (!(p.estimate > 0.0) || p.n < 1) continue;
    xs.push_back(std::log(static_cast<double>(p.n)));
    ys.push_back(std::log(p.estimate) + p.x * decay);
    f.x_min = f.points == 0 ? p.x : std::min(f.x_min, p.x);
    f.x_max = f.points == 0 ? p.x : std::max(f.x_max, p.x);
    ++f.points;
  }
  if (f.points < 2) throw NumericError("fit: need at least two points with positive estimates");

  const double m = static_cast<double>(f.points);
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw NumericError("fit: all points share the same n");
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.beta = std::exp(f.intercept);
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (f.intercept + f.slope * xs[i]);
    ss += r * r;
  }
  f.residual_rms = std::sqrt(ss / m);
  return f;
}

std::optional<std::size_t> CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  return std::nullopt;
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  auto split_line = [](const std::string& l) {
    std::vector<std::string> cells;
    std::istringstream is(l);
    std::string cell;
    while (std::getline(is, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t\r");
      const auto e = cell.find_last_not_of(" \t\r");
      cells.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
    }
    return cells;
  };
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split_line(line);
    if (t.columns.empty()) {
      t.columns = std::move(cells);
      continue;
    }
    if (cells.size() != t.columns.size()) {
      throw ConfigError("csv: row has " + std::to_string(cells.size()) + " cells, header has " +
                        std::to_string(t.columns.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  return t;
}

}  // namespace brwfpt::cli
