#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aktower/tower.hpp"

namespace aktower {

enum class CheckStatus { pass, fail, skip, asymptotic_only };
const char* status_name(CheckStatus s);

struct InvariantResult {
  std::string name;
  CheckStatus status = CheckStatus::skip;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 1;
  int samples = 200;
  long rotation_iterations = 2000;
  size_t arc_limit = size_t(1) << 16;
};

struct VerifyReport {
  std::vector<InvariantResult> results;
  bool ok() const;  // no result with status fail
  std::string text() const;
  std::string json(bool timestamp) const;
};

// Runs the invariant suite on a built or reloaded tower. Output is a pure
// function of the tower and the options.
VerifyReport verify_tower(const Tower& t, const VerifyOptions& opt);

}  // namespace aktower
