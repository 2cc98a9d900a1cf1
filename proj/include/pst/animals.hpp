#pragma once

// Redelmeier enumeration of connected site sets ("lattice animals") that
// contain a given anchor as their least site. Every set is reported once.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pst/geometry.hpp"

namespace pst {

enum class Connectivity {
  kL1,       // sites at L1 cell distance <= 1 (same cell included)
  kLinfty,   // sites whose cells differ by at most 1 in every coordinate
};

class AnimalEnumerator {
 public:
  AnimalEnumerator(int dimension, int num_offsets, int max_size, Connectivity c);

  /// Calls visit(sites) for every connected set of size 1..max_size whose
  /// least site is `anchor`. Sites are passed in insertion order.
  /// Returning false from visit prunes all supersets grown from that set.
  void run(const Site& anchor, const std::function<bool(std::span<const Site>)>& visit) const;

  std::uint64_t count(const Site& anchor, int size) const;

 private:
  int dimension_;
  int num_offsets_;
  int max_size_;
  Cell extent_{};
  std::vector<std::int64_t> deltas_;
  std::vector<Cell> delta_cells_;
  std::vector<int> delta_k_;
  std::int64_t cell_count_ = 1;
};

}  // namespace pst
