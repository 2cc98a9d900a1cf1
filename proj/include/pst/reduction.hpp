#pragma once

// Block recoding: spins of the target model are the admissible patterns of
// an l^d block of cells (all offsets), so periodic ground states of period
// dividing l become constants and the target lives on Z^d.

#include <map>
#include <vector>

#include "pst/groundstates.hpp"
#include "pst/model.hpp"

namespace pst {

struct BlockCode {
  int l = 1;
  Model source;
  Model target;
  std::vector<std::vector<Spin>> blocks;  // target spin -> source spins on the block (Region::box order)
  std::map<std::vector<Spin>, Spin> index;

  /// Source sites of the block at block coordinate b, in block pattern order.
  std::vector<Site> block_sites(const Cell& b) const;
  std::optional<Spin> encode(std::span<const Spin> block) const;
};

/// lcm of the ground-state periods, raised to exceed the interaction radius.
int choose_block(const Model& m, const std::vector<PeriodicState>& gs);

BlockCode block_reduce(const Model& m, int l);

/// Source configuration -> target configuration. The region (and a periodic
/// boundary condition, or the torus periods) must be aligned with blocks.
Configuration lift(const BlockCode& code, const Configuration& source);
/// Target configuration -> source configuration.
Configuration project(const BlockCode& code, const Configuration& target);

/// Target state of a source periodic state; constant when the period divides l.
PeriodicState lift_state(const BlockCode& code, const PeriodicState& source);

}  // namespace pst
