#pragma once

// Translated interaction terms resolved on a dense single-offset box grid,
// with values scaled to integers (see LocalEnergy).

#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "pst/geometry.hpp"
#include "pst/model.hpp"

namespace pst {

class TermTable {
 public:
  static constexpr std::int64_t kInfinite = std::numeric_limits<std::int64_t>::max();

  TermTable(const Model& m, const BoxGrid& grid);

  const BoxGrid& grid() const { return grid_; }
  std::size_t num_terms() const { return terms_.size(); }
  std::int64_t scale() const { return scale_; }

  bool fits(std::size_t term, std::size_t anchor) const { return terms_[term].fits[anchor] != 0; }
  std::int64_t value(std::size_t term, std::size_t anchor, const Spin* spins) const {
    const Term& t = terms_[term];
    std::uint32_t code = 0;
    for (std::size_t j = 0; j < t.deltas.size(); ++j)
      code += t.strides[j] * spins[static_cast<std::int64_t>(anchor) + t.deltas[j]];
    return t.table[code];
  }
  std::int64_t constant_value(std::size_t term, Spin s) const { return terms_[term].constant[s]; }
  std::span<const std::int64_t> deltas(std::size_t term) const { return terms_[term].deltas; }

  /// Every (term, anchor) instance that fits the grid and reads one of the
  /// given grid sites, each reported once.
  void instances_meeting(std::span<const std::size_t> sites, std::vector<std::pair<std::uint32_t, std::uint32_t>>& out) const;

 private:
  struct Term {
    std::vector<std::int64_t> deltas;
    std::vector<std::uint32_t> strides;
    std::vector<std::int64_t> table;
    std::vector<std::int64_t> constant;
    std::vector<std::uint8_t> fits;
  };
  BoxGrid grid_;
  std::int64_t scale_ = 1;
  std::vector<Term> terms_;
  mutable std::vector<std::uint32_t> stamp_;
  mutable std::uint32_t generation_ = 0;
};

}  // namespace pst
