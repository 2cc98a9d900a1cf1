#pragma once

// Ready-made models used by the fixtures, the tests and the acceptance suite.

#include "pst/model.hpp"

namespace pst::models {

/// Nearest-neighbour Ising model: -J s s' per bond and -h s per site, with
/// spins "plus" (index 0) and "minus". The field term is omitted when h = 0.
Model ising(Rational J = 1, Rational h = 0, int dimension = 2);

/// Hard squares: +inf on adjacent occupied pairs and -mu per occupied site.
Model hard_square(Rational mu = -1, int dimension = 2);

/// +inf unless neighbours agree, zero otherwise; fails richness.
Model equal_neighbor(int dimension = 2);

/// Ising with J = -1, whose ground states are the two checkerboards.
Model antiferromagnet(int dimension = 2);

/// Hard-core gas on the honeycomb lattice (two offsets per unit cell).
Model honeycomb_hard_core(Rational mu = -1);

}  // namespace pst::models
