#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace boxtopos {

// Malformed or inconsistent input data (unknown ids, bad schemas, broken
// invariants in supplied structures). CLI maps this to exit code 1.
class InputError : public std::runtime_error {
public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// An enumeration or materialization would exceed a configured cap.
// CLI maps this to exit code 2.
class ResourceError : public std::runtime_error {
public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

// Caps for the operations whose output can blow up combinatorially.
// Everything in this library is exact and desk-scale; the caps exist so a
// hostile input fails fast with a named limit instead of exhausting memory.
struct Config {
  // Max poset size for materializing a full Alexandrov frame or a full
  // section/upper-set enumeration (2^antichain growth).
  std::size_t elements_cap = 20;
  // Max dimension (free coordinates after eliminating the equality system)
  // for polytope vertex enumeration.
  std::size_t polytope_dim_cap = 16;
  // Max atom count of a single Boolean algebra whose full element table is
  // materialized (valuation tables, colimit carriers): 2^atoms entries.
  std::size_t algebra_atoms_cap = 16;
  // Max number of deterministic vertices (2^|S|) for classicality testing.
  std::size_t deterministic_cap = 1u << 16;
  // Seed for the sampled checks used when exhaustive ones are out of reach.
  std::uint64_t seed = 0x5eed5eedULL;
};

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> diagnostics;

  void fail(std::string message) {
    ok = false;
    diagnostics.push_back(std::move(message));
  }
  explicit operator bool() const { return ok; }
};

}  // namespace boxtopos
