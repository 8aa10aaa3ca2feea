#include "octa/orbit_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "octa/errors.hpp"

namespace octa {

namespace {

constexpr const char* kHeader = "t,x,y,z,vx,vy,vz,H";

double parse_field(const std::string& field, int line) {
  if (field.empty()) throw ParseError(line, "empty field");
  const char* begin = field.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + field.size())
    throw ParseError(line, "not a number: '" + field + "'");
  return v;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_orbit_csv(const std::string& path, const PeriodicOrbit& orbit) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << kHeader << "\n";
  for (int k = 0; k < orbit.size(); ++k) {
    const State& s = orbit.samples[k];
    double ham;
    if (s.config.is_collision()) {
      ham = orbit.energy;  // the limit of H along the orbit
    } else {
      ham = energy_breakdown(s).hamiltonian;
    }
    out << format_double(orbit.times[k]) << ',' << format_double(s.config.x) << ','
        << format_double(s.config.y) << ',' << format_double(s.config.z) << ','
        << format_double(s.velocity.x) << ',' << format_double(s.velocity.y) << ','
        << format_double(s.velocity.z) << ',' << format_double(ham) << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

PeriodicOrbit read_orbit_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);

  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) throw ParseError(1, "empty file");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader)
    throw ParseError(1, std::string("expected header '") + kHeader + "'");

  PeriodicOrbit orbit;
  std::vector<double> hcol;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) throw ParseError(lineno, "blank row");
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() != 8)
      throw ParseError(lineno, "expected 8 comma-separated fields, got " +
                                   std::to_string(fields.size()));
    double v[8];
    for (int i = 0; i < 8; ++i) v[i] = parse_field(fields[i], lineno);
    if (!orbit.times.empty() && !(v[0] > orbit.times.back()))
      throw ParseError(lineno, "sample times must be strictly increasing");
    orbit.times.push_back(v[0]);
    orbit.samples.push_back({{v[1], v[2], v[3]}, {v[4], v[5], v[6]}});
    hcol.push_back(v[7]);
  }
  if (orbit.times.size() < 12) throw ParseError(lineno, "too few samples");
  if (std::fabs(orbit.times.front()) > 1e-12)
    throw ParseError(2, "first sample must sit at t = 0");

  orbit.period = orbit.times.back() + orbit.times[1];
  for (double h : hcol)
    if (std::isfinite(h)) {
      orbit.energy = h;
      break;
    }
  return orbit;
}

}  // namespace octa
