#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "aquaclear/model.hpp"

namespace aqua {

nlohmann::json spec_to_json(const MarketSpec& spec);
MarketSpec spec_from_json(const nlohmann::json& j);

MarketSpec load_spec_file(const std::string& path);
void save_spec_file(const MarketSpec& spec, const std::string& path);

// FNV-1a over the canonical (sorted-key) serialization; identifies the spec a
// policy stack was solved for.
std::uint64_t spec_hash(const MarketSpec& spec);
std::string hash_hex(std::uint64_t h);

// Applies {"dotted.path": value} overrides to a spec JSON document. Every path
// must resolve to an existing node (array elements by numeric index).
nlohmann::json apply_overrides(nlohmann::json base, const nlohmann::json& overrides);

}  // namespace aqua
