#include "g2ldp/io.hpp"

#include <algorithm>
#include <bit>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace g2ldp {

static_assert(std::endian::native == std::endian::little,
              "binary field files are little-endian; big-endian hosts need byte swaps");

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {
std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return in;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double to_double(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (...) {
    throw std::runtime_error(std::string("bad numeric field in ") + what + ": '" + s + "'");
  }
}
}  // namespace

void write_field_csv(const std::string& path, const SpectralField& u, double alpha) {
  auto out = open_out(path);
  out << "# g2ldp field v1, N=" << u.cutoff() << ", L=" << format_double(u.side())
      << ", alpha=" << format_double(alpha) << "\n";
  out << "k1,k2,re,im\n";
  u.for_each_mode([&](int k1, int k2, std::size_t idx) {
    out << k1 << "," << k2 << "," << format_double(u[idx].real()) << ","
        << format_double(u[idx].imag()) << "\n";
  });
}

SpectralField read_field_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# g2ldp field v1", 0) != 0)
    throw std::runtime_error("not a g2ldp field file: " + path);
  int n = 0;
  double side = 0.0;
  {
    auto npos = line.find("N=");
    auto lpos = line.find("L=");
    if (npos == std::string::npos || lpos == std::string::npos)
      throw std::runtime_error("malformed field header: " + path);
    n = std::atoi(line.c_str() + npos + 2);
    side = std::atof(line.c_str() + lpos + 2);
  }
  SpectralField u(n, side);
  std::getline(in, line);  // column header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cols = split(line, ',');
    if (cols.size() != 4) throw std::runtime_error("malformed field row: " + line);
    u.set(std::atoi(cols[0].c_str()), std::atoi(cols[1].c_str()),
          Complex(to_double(cols[2], "field"), to_double(cols[3], "field")));
  }
  return u;
}

namespace {
constexpr char kFieldMagic[8] = {'G', '2', 'F', 'L', 'D', '0', '0', '1'};
}

void write_field_binary(const std::string& path, const SpectralField& u, double alpha) {
  auto out = open_out(path);
  out.write(kFieldMagic, sizeof(kFieldMagic));
  int32_t n = u.cutoff();
  double side = u.side();
  out.write(reinterpret_cast<const char*>(&n), 4);
  out.write(reinterpret_cast<const char*>(&side), 8);
  out.write(reinterpret_cast<const char*>(&alpha), 8);
  u.for_each_mode([&](int k1, int k2, std::size_t idx) {
    int32_t kk1 = k1, kk2 = k2;
    double re = u[idx].real(), im = u[idx].imag();
    out.write(reinterpret_cast<const char*>(&kk1), 4);
    out.write(reinterpret_cast<const char*>(&kk2), 4);
    out.write(reinterpret_cast<const char*>(&re), 8);
    out.write(reinterpret_cast<const char*>(&im), 8);
  });
}

SpectralField read_field_binary(const std::string& path) {
  auto in = open_in(path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kFieldMagic, 8) != 0)
    throw std::runtime_error("not a g2ldp binary field file: " + path);
  int32_t n = 0;
  double side = 0.0, alpha = 0.0;
  in.read(reinterpret_cast<char*>(&n), 4);
  in.read(reinterpret_cast<char*>(&side), 8);
  in.read(reinterpret_cast<char*>(&alpha), 8);
  if (!in || n < 1) throw std::runtime_error("malformed binary field header: " + path);
  SpectralField u(n, side);
  for (std::size_t i = 0; i < u.size(); ++i) {
    int32_t k1, k2;
    double re, im;
    in.read(reinterpret_cast<char*>(&k1), 4);
    in.read(reinterpret_cast<char*>(&k2), 4);
    in.read(reinterpret_cast<char*>(&re), 8);
    in.read(reinterpret_cast<char*>(&im), 8);
    if (!in) throw std::runtime_error("truncated binary field file: " + path);
    u.set(k1, k2, Complex(re, im));
  }
  return u;
}

void write_scalar_control_csv(const std::string& path, const ScalarControl& f) {
  auto out = open_out(path);
  out << "t_start,t_end,value\n";
  for (std::size_t i = 0; i < f.values.size(); ++i)
    out << format_double(f.times[i]) << "," << format_double(f.times[i + 1]) << ","
        << format_double(f.values[i]) << "\n";
}

ScalarControl read_scalar_control_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  std::getline(in, line);
  ScalarControl f;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cols = split(line, ',');
    if (cols.size() != 3) throw std::runtime_error("malformed control row: " + line);
    double t0 = to_double(cols[0], "control");
    double t1 = to_double(cols[1], "control");
    if (f.times.empty()) f.times.push_back(t0);
    f.times.push_back(t1);
    f.values.push_back(to_double(cols[2], "control"));
  }
  f.validate();
  return f;
}

void write_intensity_control_csv(const std::string& path, const IntensityControl& g) {
  auto out = open_out(path);
  out << "t_start,t_end,mark_index,value\n";
  for (std::size_t i = 0; i < g.intervals(); ++i)
    for (std::size_t j = 0; j < g.marks; ++j)
      out << format_double(g.times[i]) << "," << format_double(g.times[i + 1]) << "," << j + 1
          << "," << format_double(g.values[i * g.marks + j]) << "\n";
}

IntensityControl read_intensity_control_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  std::getline(in, line);
  struct Row {
    double t0, t1, v;
    std::size_t mark;
  };
  std::vector<Row> rows;
  std::size_t max_mark = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cols = split(line, ',');
    if (cols.size() != 4) throw std::runtime_error("malformed intensity row: " + line);
    Row r{to_double(cols[0], "intensity"), to_double(cols[1], "intensity"),
          to_double(cols[3], "intensity"),
          static_cast<std::size_t>(std::atoll(cols[2].c_str()))};
    if (r.mark < 1) throw std::runtime_error("intensity mark index must be 1-based");
    max_mark = std::max(max_mark, r.mark);
    rows.push_back(r);
  }
  if (rows.empty()) throw std::runtime_error("empty intensity control file: " + path);
  IntensityControl g;
  g.marks = max_mark;
  for (const auto& r : rows) {
    if (g.times.empty()) g.times.push_back(r.t0);
    if (r.t1 > g.times.back()) g.times.push_back(r.t1);
  }
  g.values.assign(g.intervals() * g.marks, -1.0);
  for (const auto& r : rows) {
    auto it = std::lower_bound(g.times.begin(), g.times.end(), r.t0 + 1e-15);
    std::size_t i = static_cast<std::size_t>(it - g.times.begin()) - 1;
    g.values[i * g.marks + (r.mark - 1)] = r.v;
  }
  g.validate();
  return g;
}

void write_mark_space_csv(const std::string& path, const MarkSpace& z) {
  auto out = open_out(path);
  out << "index,label,weight\n";
  for (std::size_t j = 0; j < z.size(); ++j)
    out << j + 1 << "," << (j < z.labels.size() ? z.labels[j] : "") << ","
        << format_double(z.weights[j]) << "\n";
}

MarkSpace read_mark_space_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  std::getline(in, line);
  MarkSpace z;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cols = split(line, ',');
    if (cols.size() != 3) throw std::runtime_error("malformed mark row: " + line);
    z.labels.push_back(cols[1]);
    z.weights.push_back(to_double(cols[2], "marks"));
  }
  z.validate();
  return z;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  auto out = open_out(path);
  out << "t,norm_v,norm_w,residual\n";
  for (std::size_t i = 0; i < traj.nodes(); ++i) {
    double r = i < traj.energy_residual.size() ? traj.energy_residual[i] : 0.0;
    out << format_double(traj.times[i]) << "," << format_double(traj.norm_v[i]) << ","
        << format_double(traj.norm_w[i]) << "," << format_double(r) << "\n";
  }
}

void write_table_csv(const std::string& path, const std::string& header,
                     const std::vector<std::vector<double>>& rows) {
  auto out = open_out(path);
  out << header << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << format_double(row[i]);
    out << "\n";
  }
}

}  // namespace g2ldp
