#pragma once

#include <string>

#include "aquaclear/dpp.hpp"
#include "aquaclear/model.hpp"

namespace aqua {

struct StackManifest {
  int format_version = 1;
  std::string tool_version;
  std::uint64_t spec_hash = 0;
  bool no_trade = false;
  int horizon = 0;
  int regimes = 0;
  int clamped_cells = 0;
  int nonconverged_cells = 0;
  double wall_seconds = 0.0;
};

// Persists a stack as a directory of per-layer JSON files plus manifest.json.
// Loading refits the splines from the stored grids/values, which reproduces
// evaluations bit-identically.
void save_stack(const PolicyStack& stack, const std::string& dir,
                double wall_seconds);
PolicyStack load_stack(const std::string& dir);
StackManifest load_manifest(const std::string& dir);
bool stack_exists_for(const std::string& dir, std::uint64_t hash);

}  // namespace aqua
