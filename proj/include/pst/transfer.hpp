#pragma once

// Row-to-row transfer matrices for two-dimensional single-offset models whose
// terms live in the unit square. Rows run along axis 1; a row state encodes
// the spins of one row with column 0 as the most significant digit, so for a
// box the row states of rows 0..rows-1 concatenate to the lexicographic site
// order. Used to extend the exact oracles past brute-force reach.

#include <cstdint>
#include <vector>

#include "pst/exact.hpp"

namespace pst {

class TransferMatrix {
 public:
  /// rows x cols torus (both periods at least 2).
  static TransferMatrix torus(const Model& m, int rows, int cols, const Rational& beta);
  /// Box [0,rows) x [0,cols) with a periodic boundary condition outside.
  static TransferMatrix box(const Model& m, int rows, int cols, const PeriodicPattern& bc, const Rational& beta);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t num_states() const { return states_; }
  Spin spin(std::size_t state, int col) const { return digits_[state * cols_ + col]; }

  Real log_partition() const;
  /// Probability of every state of one row under the Gibbs measure.
  std::vector<Real> row_marginal(int row) const;

 private:
  TransferMatrix(const Model& m, int rows, int cols, const Rational& beta, bool torus, const PeriodicPattern* bc);

  // Weight matrix between row x and row x+1. For the box, x runs over
  // -1..rows-1 and the outer rows are the single boundary state.
  std::vector<Real> edge(int x, std::size_t& na, std::size_t& nb) const;
  std::vector<Real> power(const std::vector<Real>& t, int exponent) const;
  void propagate() const;

  Model model_;
  Rational beta_;
  int rows_ = 0;
  int cols_ = 0;
  bool torus_ = false;
  PeriodicPattern bc_;
  std::size_t states_ = 0;
  std::vector<Spin> digits_;
  std::int64_t scale_ = 1;
  std::vector<std::vector<std::int64_t>> tables_;

  // Box: forward and backward vectors per row, filled on first use.
  mutable std::vector<std::vector<Real>> left_, right_;
  mutable Real z_ = -1;
};

}  // namespace pst
