#pragma once

// Line-oriented model files.
//
//   # comment (also after any line)
//   name <token>
//   dimension <d>
//   basis <d entries>            one line per row of B, d lines
//   offset <d entries>           one line per sublattice offset
//   spins <symbol>...
//   collar <n>                   optional richness collar
//   term                         one block per interaction term
//     site <t_1> ... <t_d> [k]   cell coordinates in {0,1}, offset index k
//     value <symbol>... <energy> one symbol per site
//     default <energy>           value of every pattern not listed
//   end
//
// Entries are integers, fractions ("1/3") or decimals; energies may also be
// "inf". serialize_model writes the canonical form with every pattern listed.

#include <string>
#include <string_view>

#include "pst/model.hpp"

namespace pst {

/// Throws parse_error with the offending line number.
Model parse_model(std::string_view text);
Model load_model(const std::string& path);
std::string serialize_model(const Model& m);

}  // namespace pst
