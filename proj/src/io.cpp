#include "tbh/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace tbh {

std::string format_full(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_moment_csv(const std::string& path, const MomentSeries& series) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_moment_csv: cannot open " + path);
  out << "t";
  for (int k = 1; k <= series.modes(); ++k) {
    out << ",re_a" << k << ",im_a" << k;
  }
  out << ",mean_E,mean_H\n";
  for (int s = 0; s < series.snapshots(); ++s) {
    out << format_full(series.times[s]);
    for (int k = 0; k < series.modes(); ++k) {
      out << ',' << format_full(series.means(s, k).real()) << ','
          << format_full(series.means(s, k).imag());
    }
    out << ',' << format_full(series.mean_energy[s]) << ','
        << format_full(series.mean_hamiltonian[s]) << '\n';
  }
  if (!out) throw std::runtime_error("write_moment_csv: write failed for " + path);
}

MomentSeries read_moment_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_moment_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("read_moment_csv: empty file " + path);
  }
  int columns = 1;
  for (char c : line) columns += (c == ',');
  const int modes = (columns - 3) / 2;
  if (modes < 1 || columns != 3 + 2 * modes) {
    throw std::runtime_error("read_moment_csv: malformed header in " + path);
  }

  std::vector<double> t, e, h;
  std::vector<Complex> a;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    row.reserve(columns);
    const char* p = line.c_str();
    char* next = nullptr;
    for (int c = 0; c < columns; ++c) {
      row.push_back(std::strtod(p, &next));
      if (next == p || (c + 1 < columns && *next != ',')) {
        throw std::runtime_error("read_moment_csv: malformed row in " + path);
      }
      p = next + 1;
    }
    t.push_back(row[0]);
    for (int k = 0; k < modes; ++k) {
      a.emplace_back(row[1 + 2 * k], row[2 + 2 * k]);
    }
    e.push_back(row[columns - 2]);
    h.push_back(row[columns - 1]);
  }
  if (t.empty()) throw std::runtime_error("read_moment_csv: no rows in " + path);

  MomentSeries series;
  const int snapshots = static_cast<int>(t.size());
  series.times = Eigen::Map<const RealVector>(t.data(), snapshots);
  series.mean_energy = Eigen::Map<const RealVector>(e.data(), snapshots);
  series.mean_hamiltonian = Eigen::Map<const RealVector>(h.data(), snapshots);
  series.means.resize(snapshots, modes);
  for (int s = 0; s < snapshots; ++s) {
    for (int k = 0; k < modes; ++k) {
      series.means(s, k) = a[static_cast<std::size_t>(s) * modes + k];
    }
  }
  return series;
}

void write_report(const std::string& path, const Report& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_report: cannot open " + path);
  for (const auto& [key, value] : report) {
    out << key << " = " << value << '\n';
  }
  if (!out) throw std::runtime_error("write_report: write failed for " + path);
}

}  // namespace tbh
