#pragma once

// Spin spaces, translation-invariant interaction families with values in
// R u {+inf}, boundary conditions and configurations on finite regions.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pst/energy.hpp"
#include "pst/geometry.hpp"

namespace pst {

using Spin = std::uint16_t;

class SpinSpace {
 public:
  SpinSpace() = default;
  explicit SpinSpace(std::vector<std::string> symbols);

  std::size_t size() const { return symbols_.size(); }
  const std::string& symbol(Spin s) const { return symbols_.at(s); }
  const std::vector<std::string>& symbols() const { return symbols_; }
  std::optional<Spin> find(std::string_view symbol) const;
  Spin index_of(std::string_view symbol) const;  // throws on unknown symbol

  friend bool operator==(const SpinSpace&, const SpinSpace&) = default;

 private:
  std::vector<std::string> symbols_;
};

/// Phi_A: a value for every spin pattern on the support A. The support lists
/// sites whose cell coordinates lie in {0,1}^d; the table is indexed with the
/// first support site as the most significant digit.
struct InteractionTerm {
  std::vector<Site> support;
  std::vector<Energy> values;

  std::size_t index(std::span<const Spin> pattern, std::size_t num_spins) const;
  const Energy& operator()(std::span<const Spin> pattern, std::size_t num_spins) const {
    return values.at(index(pattern, num_spins));
  }

  friend bool operator==(const InteractionTerm&, const InteractionTerm&) = default;
};

struct Model {
  std::string name;
  PointSet geometry = PointSet::cubic(2);
  SpinSpace spins;
  std::vector<InteractionTerm> terms;
  std::optional<int> collar;  // richness collar n; defaults to the radius

  int dimension() const { return geometry.dimension(); }
  int num_offsets() const { return geometry.num_offsets(); }
  std::size_t num_spins() const { return spins.size(); }

  /// Largest L1 diameter of a term support (in cell coordinates).
  int radius() const;
  int richness_collar() const { return collar.value_or(radius()); }

  /// Structural checks: supports inside the unit cell cube, total tables.
  void validate() const;

  friend bool operator==(const Model&, const Model&) = default;
};

/// A configuration of the whole point set that repeats with period p in every
/// cell direction. Spins are stored for cells [0,p)^d (row-major, first axis
/// slowest) times offsets.
struct PeriodicPattern {
  int period = 1;
  std::vector<Spin> spins;

  static PeriodicPattern constant(Spin s, int dimension, int num_offsets = 1);
  Spin at(const Site& s, int dimension, int num_offsets) const;
  bool is_constant() const;

  friend bool operator==(const PeriodicPattern&, const PeriodicPattern&) = default;
  friend auto operator<=>(const PeriodicPattern&, const PeriodicPattern&) = default;
};

struct FreeBc {
  friend bool operator==(const FreeBc&, const FreeBc&) = default;
};

struct ExplicitBc {
  std::map<Site, Spin> spins;
  friend bool operator==(const ExplicitBc&, const ExplicitBc&) = default;
};

/// Free: only terms inside the region count. Periodic: the outside follows a
/// periodic pattern (a constant ground state is the period-1 case). Explicit:
/// listed spins on a collar around the region.
using BoundaryCondition = std::variant<FreeBc, PeriodicPattern, ExplicitBc>;

BoundaryCondition constant_bc(Spin s, const Model& m);

struct Configuration {
  Region region;
  std::vector<Spin> spins;  // aligned with region.sites()
  BoundaryCondition bc = FreeBc{};

  /// Spin at a site of the region or, failing that, of the boundary condition.
  std::optional<Spin> at(const Site& s, const Model& m) const;

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

/// Conditional Hamiltonian: sum of all translated terms meeting the region,
/// with outside spins from the boundary condition (free: terms inside only).
Energy hamiltonian(const Model& m, const Configuration& c);

bool is_admissible(const Model& m, const Configuration& c);

/// Admissible configurations in lexicographic order (first site most
/// significant). Throws cap_exceeded once more than `cap` are found.
std::vector<Configuration> enumerate_admissible(const Model& m, const Region& region, const BoundaryCondition& bc,
                                                std::uint64_t cap);

// ---------------------------------------------------------------------------
// Richness
// ---------------------------------------------------------------------------

struct RichnessWitness {
  std::vector<Site> inner;            // Lambda
  std::vector<Spin> inner_spins;
  std::vector<Site> far;              // window minus Lambda minus the collar
  std::vector<Spin> far_spins;        // empty when Lambda has no admissible configuration
  bool no_inner_configuration = false;
};

struct RichnessVerdict {
  bool pass = false;
  bool partial = false;  // search stopped at the region cap
  int collar = 0;
  int window = 0;
  std::uint64_t regions_checked = 0;
  std::optional<RichnessWitness> witness;
};

/// Bounded verifier of the richness assumption on a window^d torus: every
/// subset Lambda (up to translation) must carry an admissible configuration,
/// and every admissible pair on Lambda and on the far region must extend
/// across the collar of width n to an admissible configuration of the window.
RichnessVerdict check_richness(const Model& m, int collar, int window, std::uint64_t region_cap = 1u << 20);

}  // namespace pst
