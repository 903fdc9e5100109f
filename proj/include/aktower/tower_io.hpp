#pragma once

#include <string>
#include <string_view>

#include "aktower/tower.hpp"

namespace aktower {

inline constexpr int kTowerSchema = 1;

// Versioned JSON document. Reals are stored as hex-floats and rationals as
// decimal "p/q" strings, so a reload is bit-exact at the recorded precision.
// The "generated_at" field is the only non-deterministic entry.
std::string tower_to_json(const Tower& t, bool timestamp = true);
Tower tower_from_json(std::string_view text);

void save_tower(const Tower& t, const std::string& path, bool timestamp = true);
Tower load_tower(const std::string& path);

// Condition report of a failed construction, schema-versioned like the tower file.
std::string failure_to_json(const ConstructionFailure& f);

// Current UTC time, ISO 8601.
std::string utc_timestamp();

}  // namespace aktower
