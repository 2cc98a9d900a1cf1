#pragma once

// Compiled form of the conditional Hamiltonian on one region: every translated
// term meeting the region is resolved once into a value table plus the region
// sites it reads, with boundary spins folded into a constant table offset.
// Finite values are kept as exact integers in units of 1/scale, where scale is
// the least common denominator of the model's finite values.

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pst/error.hpp"
#include "pst/model.hpp"

namespace pst {

std::int64_t energy_scale(const Model& m);

class LocalEnergy {
 public:
  static constexpr std::int64_t kInfinite = std::numeric_limits<std::int64_t>::max();

  LocalEnergy(const Model& m, const Region& region, const BoundaryCondition& bc);

  std::size_t num_sites() const { return num_sites_; }
  std::size_t num_spins() const { return num_spins_; }
  std::size_t num_instances() const { return instances_.size(); }
  std::int64_t scale() const { return scale_; }

  /// Scaled energy, or kInfinite if some term is +inf.
  std::int64_t scaled(std::span<const Spin> spins) const;
  Energy energy(std::span<const Spin> spins) const;
  bool admissible(std::span<const Spin> spins) const { return scaled(spins) != kInfinite; }
  Rational to_rational(std::int64_t scaled_energy) const { return Rational(scaled_energy, scale_); }

  /// Visits admissible configurations in lexicographic order with their
  /// scaled energy. Throws cap_exceeded after `cap` visits.
  template <class Visit>
  std::uint64_t for_each_admissible(std::uint64_t cap, Visit&& visit) const;

 private:
  struct Instance {
    std::uint32_t table = 0;
    std::uint32_t base = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> vars;  // (site index, stride)
  };

  std::int64_t close(std::size_t depth, const Spin* spins) const;
  [[noreturn]] void cap_exceeded(std::uint64_t cap) const;

  std::size_t num_sites_ = 0;
  std::size_t num_spins_ = 0;
  std::int64_t scale_ = 1;
  std::vector<std::vector<std::int64_t>> tables_;
  std::vector<Instance> instances_;
  std::vector<std::vector<std::uint32_t>> closing_;  // instances whose last variable is site i
};

inline std::int64_t LocalEnergy::close(std::size_t depth, const Spin* spins) const {
  std::int64_t e = 0;
  for (std::uint32_t id : closing_[depth]) {
    const Instance& inst = instances_[id];
    std::uint32_t code = inst.base;
    for (const auto& [site, stride] : inst.vars) code += stride * spins[site];
    const std::int64_t v = tables_[inst.table][code];
    if (v == kInfinite) return kInfinite;
    e += v;
  }
  return e;
}

template <class Visit>
std::uint64_t LocalEnergy::for_each_admissible(std::uint64_t cap, Visit&& visit) const {
  const std::size_t n = num_sites_;
  std::vector<Spin> spins(n, 0);
  if (n == 0) {
    if (cap < 1) cap_exceeded(cap);
    visit(std::span<const Spin>(spins), std::int64_t{0});
    return 1;
  }
  const auto q = static_cast<Spin>(num_spins_);
  std::vector<std::int64_t> acc(n + 1, 0);
  std::uint64_t count = 0;
  std::ptrdiff_t depth = 0;
  while (depth >= 0) {
    const auto d = static_cast<std::size_t>(depth);
    if (spins[d] == q) {
      spins[d] = 0;
      if (--depth >= 0) ++spins[static_cast<std::size_t>(depth)];
      continue;
    }
    const std::int64_t c = close(d, spins.data());
    if (c == kInfinite) {
      ++spins[d];
      continue;
    }
    const std::int64_t e = acc[d] + c;
    if (d + 1 == n) {
      if (++count > cap) cap_exceeded(cap);
      visit(std::span<const Spin>(spins), e);
      ++spins[d];
      continue;
    }
    acc[d + 1] = e;
    ++depth;
  }
  return count;
}

}  // namespace pst
