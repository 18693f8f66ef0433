#pragma once

#include <span>
#include <string>
#include <vector>

#include "ppmom/process.hpp"

namespace ppmom {

// Line-oriented text format for configurations. Each block starts with
//   config <index> <kind> <count>
// followed by one comma-separated particle per line:
//   segment: cx,cy,length,phi
//   plate:   cx,cy,cz,radius,nx,ny,nz
//   point:   cx,cy,cz
// Values are written with enough digits to round-trip exactly.
std::string write_configurations(std::span<const Configuration> configs);
std::vector<Configuration> read_configurations(const std::string& text);

void write_configurations_file(const std::string& path, std::span<const Configuration> configs);
std::vector<Configuration> read_configurations_file(const std::string& path);

}  // namespace ppmom
