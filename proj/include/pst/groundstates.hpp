#pragma once

// Periodic ground states: bounded search over period cubes and an
// independent check of the conditional-Hamiltonian inequality.

#include <optional>
#include <string>
#include <vector>

#include "pst/model.hpp"

namespace pst {

struct PeriodicState {
  PeriodicPattern pattern;  // minimal period
  std::string label;        // spin symbol for constants, "p<l>:s0,s1,..." otherwise

  int period() const { return pattern.period; }
  bool is_constant() const { return pattern.period == 1 && pattern.is_constant(); }
  friend bool operator==(const PeriodicState&, const PeriodicState&) = default;
};

PeriodicState make_state(const Model& m, PeriodicPattern pattern);
PeriodicState constant_state(const Model& m, Spin s);

/// Smallest period dividing pattern.period under which the pattern repeats.
PeriodicPattern minimal_period(const PeriodicPattern& p, int dimension, int num_offsets);

/// Energy per site of the pattern on its period torus.
Rational specific_energy(const PeriodicState& p, const Model& m);

struct GroundStateSearch {
  std::vector<PeriodicState> states;  // ordered by (period, pattern)
  Rational energy;                    // common minimal specific energy
  int period_cap = 0;
  std::vector<std::size_t> count_by_period;  // ground states with period <= l, l = 1..cap
  std::vector<std::string> warnings;
};

GroundStateSearch find_ground_states(const Model& m, int period_cap, std::uint64_t pattern_cap = 1u << 22,
                                     int verify_cap = 4);

struct GroundStateWitness {
  std::vector<Site> region;
  std::vector<Spin> spins;
  Energy excited;
  Energy ground;
};

struct GroundStateVerdict {
  bool pass = true;
  int cap = 0;
  std::uint64_t regions_checked = 0;
  std::optional<GroundStateWitness> witness;
};

/// Checks H(chi | gs) >= H(gs | gs) for every L-infinity connected region of
/// at most `cap` sites (up to period translations) and every admissible chi.
/// Regions that are not L-infinity connected split into independent parts.
GroundStateVerdict verify_ground_state(const PeriodicState& p, const Model& m, int cap);

}  // namespace pst
