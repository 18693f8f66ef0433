#include "ppmom/config_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ppmom {

namespace {

void append_num(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

std::vector<double> split_nums(const std::string& line) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t next = line.find(',', pos);
    if (next == std::string::npos) next = line.size();
    out.push_back(std::stod(line.substr(pos, next - pos)));
    pos = next + 1;
  }
  return out;
}

}  // namespace

std::string write_configurations(std::span<const Configuration> configs) {
  std::string out;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    const Configuration& x = configs[c];
    out += "config " + std::to_string(c) + " " + to_string(x.kind) + " " +
           std::to_string(x.items.size()) + "\n";
    for (const Particle& p : x.items) {
      switch (x.kind) {
        case ParticleKind::Segment: {
          const Segment2D s = p.as_segment();
          append_num(out, s.center.x); out += ',';
          append_num(out, s.center.y); out += ',';
          append_num(out, s.length); out += ',';
          append_num(out, s.phi);
          break;
        }
        case ParticleKind::Plate:
          append_num(out, p.center.x); out += ',';
          append_num(out, p.center.y); out += ',';
          append_num(out, p.center.z); out += ',';
          append_num(out, p.size); out += ',';
          append_num(out, p.axis.x); out += ',';
          append_num(out, p.axis.y); out += ',';
          append_num(out, p.axis.z);
          break;
        case ParticleKind::Point:
          append_num(out, p.center.x); out += ',';
          append_num(out, p.center.y); out += ',';
          append_num(out, p.center.z);
          break;
      }
      out += '\n';
    }
  }
  return out;
}

std::vector<Configuration> read_configurations(const std::string& text) {
  std::vector<Configuration> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream head(line);
    std::string tag, kind_s;
    std::size_t index = 0, count = 0;
    head >> tag >> index >> kind_s >> count;
    if (tag != "config" || head.fail())
      throw std::invalid_argument("configuration file: bad header line: " + line);
    Configuration x;
    if (kind_s == "segment") x.kind = ParticleKind::Segment;
    else if (kind_s == "plate") x.kind = ParticleKind::Plate;
    else if (kind_s == "point") x.kind = ParticleKind::Point;
    else throw std::invalid_argument("configuration file: unknown kind " + kind_s);

    for (std::size_t i = 0; i < count; ++i) {
      if (!std::getline(in, line))
        throw std::invalid_argument("configuration file: truncated block");
      const auto f = split_nums(line);
      switch (x.kind) {
        case ParticleKind::Segment:
          if (f.size() != 4) throw std::invalid_argument("segment line needs 4 fields");
          x.items.push_back(make_segment_particle({f[0], f[1]}, f[2], f[3]));
          break;
        case ParticleKind::Plate:
          if (f.size() != 7) throw std::invalid_argument("plate line needs 7 fields");
          x.items.push_back(make_plate_particle({f[0], f[1], f[2]}, f[3], {f[4], f[5], f[6]}));
          break;
        case ParticleKind::Point:
          if (f.size() != 3) throw std::invalid_argument("point line needs 3 fields");
          x.items.push_back(make_point_particle({f[0], f[1], f[2]}));
          break;
      }
    }
    out.push_back(std::move(x));
  }
  return out;
}

void write_configurations_file(const std::string& path, std::span<const Configuration> configs) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << write_configurations(configs);
}

std::vector<Configuration> read_configurations_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return read_configurations(ss.str());
}

}  // namespace ppmom
