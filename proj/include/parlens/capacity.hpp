#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include "parlens/errors.hpp"

namespace parlens {

/// Concurrency capacity: a non-negative agent count or Unbounded.
/// Unbounded is a sentinel, not a large number; it compares greater than
/// every finite capacity and cannot be read back as a count.
class Capacity {
 public:
  constexpr Capacity() = default;

  explicit Capacity(std::int64_t count) : value_(count) {
    if (count < 0) throw DomainError("capacity must be non-negative");
  }

  static constexpr Capacity unbounded() {
    Capacity c;
    c.value_ = kUnbounded;
    return c;
  }

  constexpr bool is_unbounded() const { return value_ == kUnbounded; }

  std::int64_t count() const {
    if (is_unbounded()) throw std::logic_error("unbounded capacity has no count");
    return value_;
  }

  /// min(N, C) as a finite agent count; the form Eq-style speedup needs.
  std::int64_t clamp_to_team(int n_agents) const {
    if (is_unbounded()) return n_agents;
    return std::min<std::int64_t>(value_, n_agents);
  }

  friend constexpr bool operator==(Capacity a, Capacity b) { return a.value_ == b.value_; }
  friend constexpr bool operator<(Capacity a, Capacity b) { return a.value_ < b.value_; }
  friend constexpr bool operator>(Capacity a, Capacity b) { return b < a; }
  friend constexpr bool operator<=(Capacity a, Capacity b) { return !(b < a); }
  friend constexpr bool operator>=(Capacity a, Capacity b) { return !(a < b); }

  friend constexpr Capacity min(Capacity a, Capacity b) { return a < b ? a : b; }

  std::string str() const {
    return is_unbounded() ? "unbounded" : std::to_string(value_);
  }

 private:
  static constexpr std::int64_t kUnbounded = std::numeric_limits<std::int64_t>::max();
  std::int64_t value_ = 1;
};

}  // namespace parlens
