#pragma once

#include "sscmg/mesh.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace sscmg {

/// ASCII mesh format, one mesh per file:
///   MESH2D <nvert> <ntri> <level> <h0>
///   v <x> <y> <bflag>          (nvert lines, index order)
///   t <i> <j> <k> <parent|-1>  (ntri lines, index order)
///   h <node> <end1> <end2>     (hanging records, resolution order)
/// Floats are written as decimal text with 17 significant digits, so a
/// write/read round trip reproduces every coordinate bit-exactly.
std::string format_mesh(const Mesh& mesh);
void write_mesh(std::ostream& os, const Mesh& mesh);
void write_mesh_file(const std::string& path, const Mesh& mesh);

std::pair<Mesh, std::vector<HangingRecord>> read_mesh(std::istream& is);
std::pair<Mesh, std::vector<HangingRecord>> read_mesh_file(const std::string& path);

/// 17-significant-digit decimal rendering used across all text outputs.
std::string format_g17(double value);

}  // namespace sscmg
