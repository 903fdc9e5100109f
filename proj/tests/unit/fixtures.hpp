#pragma once

#include "aktower/tower.hpp"

// Towers shared by several suites; each is built once per process.
namespace fixtures {

inline const aktower::Tower& cap1000() {
  static const aktower::Tower t = [] {
    aktower::TowerConfig c;
    c.q_cap = aktower::BigInt(1000);
    return aktower::build_tower(c);
  }();
  return t;
}

inline const aktower::Tower& strict_two_stage() {
  static const aktower::Tower t = [] {
    aktower::TowerConfig c;
    c.target = "series:base=2,exponents=geometric:64";
    c.mode = aktower::TowerMode::strict;
    c.max_stage = 2;
    return aktower::build_tower(c);
  }();
  return t;
}

inline const aktower::Tower& half_holder() {
  static const aktower::Tower t = [] {
    aktower::TowerConfig c;
    c.beta = aktower::BigRational(1, 2);
    c.q_cap = aktower::BigInt(1000000);
    c.max_stage = 2;
    return aktower::build_tower(c);
  }();
  return t;
}

}  // namespace fixtures
