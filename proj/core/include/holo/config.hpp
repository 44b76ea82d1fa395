#pragma once

#include <json.hpp>

#include <string>

#include "holo/cocycle.hpp"

// JSON config files.  One schema for geometry ("atlas" + "connection"
// blocks; expressions are DSL strings), plus blocks for paths, homotopies,
// path families, gauge morphisms and cocycle access paths.  Loader errors
// carry the JSON path of the offending entry.

namespace holo::config {

struct LoadedConnection {
  AtlasPtr atlas;  // shared copy for building paths against the same charts
  ConnectionData conn;
};

LoadedConnection load_connection_file(const std::string& filename);
LoadedConnection load_connection_json(const nlohmann::json& j, const std::string& where);

Path load_path_file(const std::string& filename, AtlasPtr atlas);
Path load_path_json(const nlohmann::json& j, const std::string& where, AtlasPtr atlas);

Homotopy load_homotopy_file(const std::string& filename, AtlasPtr atlas);

PathFamily load_family_file(const std::string& filename, AtlasPtr atlas);

GaugeMorphism load_morphism_file(const std::string& filename);

AccessPaths load_access_file(const std::string& filename, AtlasPtr atlas);

/// Extracted cocycles serialize as per-overlap sample tables inside the
/// connection schema ("transitions_sampled" block); function-valued output
/// is not finitely representable, sampled tables round-trip instead.
nlohmann::json sampled_cocycle_to_json(const SampledCocycle& sc, const Atlas& atlas);
SampledCocycle sampled_cocycle_from_json(const nlohmann::json& j, const std::string& where);

}  // namespace holo::config
