#pragma once

#include "rwb/solver.hpp"

#include <string>
#include <utility>
#include <vector>

namespace rwb {

/// A parsed run configuration together with the key = value pairs it was
/// built from, in file order.
struct ConfigFile {
    SimConfig config;
    std::vector<std::pair<std::string, std::string>> entries;
};

/// Flat `module.key = value` text, one key per line, `#` starts a comment.
/// Unknown or repeated keys and malformed values throw ConfigError with the
/// line number; cosmology.family is required.
ConfigFile parse_config(const std::string& text);
ConfigFile load_config(const std::string& path);

/// "x,y,z" -> Vec3. Throws InvalidArgument on anything else.
Vec3 parse_vec3(const std::string& text);

ScaleFactorSpec make_cosmology(const std::string& family, double c, double H, double q);

}  // namespace rwb
