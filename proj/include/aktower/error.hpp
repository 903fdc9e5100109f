#pragma once

#include <stdexcept>
#include <string>

namespace aktower {

enum class Errc {
  invalid_argument = 1,
  domain,
  bounds,
  composition,
  non_invertible,
  numeric,
  precision,
  construction,
  parameter,
  capacity,
  target,
  parse,
  io,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace aktower
