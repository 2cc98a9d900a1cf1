#pragma once

// Contours of configurations that agree with a constant ground state outside
// a finite set: a site is correct when the spins on the cube U(t) around it
// are one constant ground-state value, and contours are the L1-connected
// components of the non-correct sites together with the spins on them.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pst/frame.hpp"
#include "pst/model.hpp"

namespace pst {

/// A single-offset model on Z^d together with the constant ground states
/// used as contour labels.
struct ContourContext {
  Model model;
  std::vector<Spin> ground;
  int cube_size = 3;

  /// With an empty `ground`, the constant ground states found at period 1.
  static ContourContext make(const Model& m, std::vector<Spin> ground = {}, int cube_size = 3);

  int dimension() const { return model.dimension(); }
  int halo() const { return (cube_size - 1) / 2; }
  bool is_ground(Spin s) const;
};

struct InteriorComponent {
  std::vector<Site> sites;  // sorted
  Spin label = 0;
  friend bool operator==(const InteriorComponent&, const InteriorComponent&) = default;
};

struct Contour {
  std::vector<Site> support;  // sorted, L1-connected
  std::vector<Spin> pattern;  // aligned with support
  Spin sign = 0;              // label of the external component
  std::vector<InteriorComponent> interior;

  Contour translated(const Cell& shift, int dimension) const;
  friend bool operator==(const Contour&, const Contour&) = default;
  friend auto operator<=>(const Contour& a, const Contour& b) {
    return std::tie(a.support, a.pattern, a.sign) <=> std::tie(b.support, b.pattern, b.sign);
  }
};

struct ContourFamily {
  std::vector<Contour> contours;  // ordered by least support site
  Region region;
  Spin external = 0;
  friend bool operator==(const ContourFamily&, const ContourFamily&) = default;
};

namespace detail {
struct LocalComplement {
  std::vector<std::size_t> box;          // sub-box indices
  std::vector<int> component;            // aligned with box; -1 on the support
  std::vector<std::size_t> local_index;  // aligned with box, into local
  std::vector<std::int32_t> local;       // padded copy of the box
  std::vector<std::size_t> queue;
  int count = 0;
  Cell lo{}, hi{};
};
}  // namespace detail

/// Fast extraction, reconstruction and contour energies for one region and
/// one constant boundary label. Energies are in units of 1/scale().
class Extractor {
 public:
  static constexpr std::int64_t kInfinite = TermTable::kInfinite;

  Extractor(const ContourContext& ctx, const Region& region, Spin external);

  const Region& region() const { return region_; }
  Spin external() const { return q_; }
  std::int64_t scale() const { return terms_.scale(); }
  Rational to_rational(std::int64_t scaled) const { return Rational(scaled, scale()); }

  /// Non-correct sites of the configuration (spins aligned with region sites).
  std::vector<Site> boundary(std::span<const Spin> spins);
  ContourFamily extract(std::span<const Spin> spins);
  /// Extraction together with the sum of contour energies and the remainder.
  struct Weight {
    std::int64_t phi = 0;
    std::int64_t remainder = 0;
  };
  ContourFamily extract(std::span<const Spin> spins, Weight& weight);
  /// Spins on the region; throws incompatible_family for inconsistent input.
  std::vector<Spin> reconstruct(const ContourFamily& f);

  /// H(chi | q) - H(q | q) over all terms meeting the region.
  std::int64_t excess(std::span<const Spin> spins);
  /// Phi(Gamma) for a contour of this region's frame.
  std::int64_t contour_energy(const Contour& c);
  /// Remainder R with excess = sum of contour energies + R, assembled term by
  /// term: terms meeting no support or several supports, and the ground-state
  /// offset of terms meeting one support. Zero when all ground states agree
  /// term by term and no term meets two supports.
  std::int64_t imbalance(const ContourFamily& f);
  /// Same, with chi the configuration the family was extracted from.
  std::int64_t imbalance(const ContourFamily& f, std::span<const Spin> chi);

 private:
  struct Shape {
    std::vector<std::size_t> support;  // frame indices, sorted
    std::vector<std::vector<std::size_t>> interior;
    std::vector<Spin> labels;
    Spin sign = 0;
  };
  void load(std::span<const Spin> spins);
  void mark_correct();
  Shape shape_of(const std::vector<std::size_t>& support, const std::vector<Spin>& frame_spins);
  Contour to_contour(const Shape& s, const std::vector<Spin>& frame_spins) const;
  ContourFamily extract_impl(std::span<const Spin> spins, const Weight* want, Weight& weight);
  std::int64_t shape_energy(const Shape& s);
  std::int64_t remainder(const ContourFamily& f);
  void paint_singleton(const Contour& c, std::vector<Spin>& scratch, std::vector<std::size_t>& touched);
  std::size_t frame_index(const Site& s) const;

  ContourContext ctx_;
  Region region_;
  Spin q_;
  int h_;
  BoxGrid grid_;
  TermTable terms_;
  std::vector<std::size_t> region_index_;  // region site -> frame index
  std::vector<std::size_t> candidates_;    // frame sites whose cube meets the region
  std::vector<std::int64_t> cube_;
  std::vector<std::int64_t> neighbors_;
  std::vector<std::uint8_t> ground_;
  std::vector<std::uint8_t> in_region_;
  std::vector<Spin> spins_;
  std::vector<Spin> scratch_;
  std::vector<std::uint8_t> correct_;
  std::vector<std::int32_t> mark_;
  std::vector<std::uint32_t> visit_;
  std::uint32_t visit_gen_ = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> instances_;
  detail::LocalComplement lc_;
  std::vector<std::size_t> component_, touched_, sites_, owned_;
  std::vector<Site> frame_sites_;
  std::vector<std::int32_t> owners_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> contour_instances_;
};

/// The configuration's region must be finite and its boundary condition a
/// constant ground-state label.
std::vector<Site> boundary_of(const ContourContext& ctx, const Configuration& c);
ContourFamily extract_contours(const ContourContext& ctx, const Configuration& c);
Configuration reconstruct(const ContourContext& ctx, const ContourFamily& f);

/// Phi(Gamma) = H(chi_supp | chi) - H(gs_supp | gs) for the singleton family.
Rational contour_energy(const ContourContext& ctx, const Contour& c);

/// Throws with a reason unless the contour satisfies the structural checks:
/// connected support, non-correct support, correct complement near the
/// support, consistent labels and an admissible singleton reconstruction.
void validate_contour(const ContourContext& ctx, const Contour& c);

/// All contours with sign q, at most kmax support sites, and `anchor` as the
/// least support site.
std::vector<Contour> enumerate_contours(const ContourContext& ctx, Spin q, int kmax, const Site& anchor,
                                        std::uint64_t pattern_cap = 1u << 24);

struct SupportCount {
  std::vector<Site> support;
  std::uint64_t contours = 0;
  double log_bound = 0;  // |P| log |S|
};

struct PeierlsReport {
  int kmax = 0;
  std::optional<Rational> tau;        // min Phi / |supp|, absent when no contour exists
  std::optional<Contour> witness;     // a minimiser
  Rational witness_energy;
  std::uint64_t contours = 0;
  std::vector<std::uint64_t> by_size;  // index = support size
  std::vector<SupportCount> supports;  // every support seen, per sign
  bool entropy_bound_holds = true;
};

PeierlsReport peierls_estimate(const ContourContext& ctx, int kmax);

}  // namespace pst
