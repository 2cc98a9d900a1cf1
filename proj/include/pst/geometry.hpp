#pragma once

// Lattices B*Z^d, periodic point sets, regions and L1 connectivity.
//
// A point of a periodic point set is addressed by its cell coordinate t (the
// lattice vector B*t) and the index k of the sublattice offset. All distances
// are L1 distances between cell coordinates; on a torus the minimum image is
// used. Two distinct sites are adjacent iff their distance is at most 1.

#include <array>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

#include "pst/energy.hpp"

namespace pst {

inline constexpr int kMaxDim = 4;

using Cell = std::array<std::int32_t, kMaxDim>;

struct Site {
  Cell t{};
  std::int32_t k = 0;

  friend auto operator<=>(const Site&, const Site&) = default;
};

Site make_site(std::initializer_list<std::int32_t> t, std::int32_t k = 0);

using Vector = std::vector<Rational>;
using Matrix = std::vector<Vector>;  // row-major, square

std::optional<Matrix> invert(const Matrix& m);

/// Union of finitely many disjoint translates of B*Z^d.
class PointSet {
 public:
  PointSet(Matrix basis, std::vector<Vector> offsets);

  /// Z^d with a single zero offset.
  static PointSet cubic(int dimension);

  int dimension() const { return static_cast<int>(basis_.size()); }
  int num_offsets() const { return static_cast<int>(offsets_.size()); }
  const Matrix& basis() const { return basis_; }
  const Matrix& inverse() const { return inverse_; }
  const std::vector<Vector>& offsets() const { return offsets_; }

  bool is_cubic() const;
  Vector position(const Site& s) const;

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  Matrix basis_;
  Matrix inverse_;
  std::vector<Vector> offsets_;
};

/// L1 norm of t = B^-1 s; throws if s is not a lattice vector.
std::int64_t lattice_norm(const Vector& s, const Matrix& basis);

std::int64_t cell_norm(const Cell& t, int dimension);

/// (t, k) with p = B t + offset_k; throws naming the nearest point otherwise.
Site cell_coordinates(const Vector& p, const PointSet& ps);

using Periods = std::optional<Cell>;

std::int64_t distance(const Site& a, const Site& b, int dimension, const Periods& periods = std::nullopt);
inline bool adjacent(const Site& a, const Site& b, int dimension, const Periods& periods = std::nullopt) {
  return a != b && distance(a, b, dimension, periods) <= 1;
}

/// Finite set of sites, optionally living on a torus.
class Region {
 public:
  Region() = default;
  Region(int dimension, std::vector<Site> sites, Periods periods = std::nullopt, int num_offsets = 1);

  /// Sites with lo <= t < lo + extent (componentwise), all offsets.
  static Region box(int dimension, const Cell& lo, const Cell& extent, int num_offsets = 1);
  static Region square(int side, int dimension = 2);
  static Region torus(int dimension, const Cell& periods, int num_offsets = 1);

  int dimension() const { return dimension_; }
  int num_offsets() const { return num_offsets_; }
  const std::vector<Site>& sites() const& { return sites_; }
  std::vector<Site> sites() && { return std::move(sites_); }
  std::size_t size() const { return sites_.size(); }
  bool empty() const { return sites_.empty(); }
  bool is_torus() const { return periods_.has_value(); }
  const Periods& periods() const { return periods_; }

  bool contains(const Site& s) const;
  std::optional<std::size_t> index_of(const Site& s) const;
  Site wrap(Site s) const;

  friend bool operator==(const Region&, const Region&) = default;

 private:
  int dimension_ = 2;
  int num_offsets_ = 1;
  std::vector<Site> sites_;
  Periods periods_;
};

/// Sites of a non-torus region within distance n of its complement.
Region boundary_layer(const Region& region, int n);

std::vector<std::vector<Site>> connected_components(std::span<const Site> sites, int dimension,
                                                    const Periods& periods = std::nullopt);

struct ComplementComponents {
  std::vector<std::vector<Site>> parts;
  std::size_t external = 0;  // index of the component reaching the frame
};

/// Components of the complement of a finite single-offset set inside the
/// frame one site wider than its bounding box.
ComplementComponents complement_components(std::span<const Site> sites, int dimension);

/// Sites within L-infinity distance (size-1)/2 of t; size must be odd.
Region cube(const Site& center, int size, int dimension, int num_offsets = 1);

/// Dense row-major indexing of a box of single-offset sites, used by the
/// enumeration-heavy code. Index order matches Site ordering.
class BoxGrid {
 public:
  BoxGrid() = default;
  BoxGrid(int dimension, const Cell& lo, const Cell& extent);

  int dimension() const { return dimension_; }
  std::size_t size() const { return size_; }
  const Cell& lo() const { return lo_; }
  const Cell& extent() const { return extent_; }

  bool inside(const Cell& t) const;
  std::size_t index(const Cell& t) const {
    std::int64_t idx = 0;
    for (int i = 0; i < dimension_; ++i) idx += (t[i] - lo_[i]) * stride_[i];
    return static_cast<std::size_t>(idx);
  }
  Cell cell(std::size_t index) const;
  Site site(std::size_t index) const { return Site{cell(index), 0}; }
  std::int64_t stride(int axis) const { return stride_[axis]; }
  bool on_border(std::size_t index) const;

  /// Signed index offsets of the 2*d nearest neighbours.
  std::vector<std::int64_t> neighbor_offsets() const;
  /// Signed index offsets of the cube of L-infinity radius r.
  std::vector<std::int64_t> cube_offsets(int radius) const;
  /// True if every site within L-infinity distance r lies in the grid.
  bool interior(std::size_t index, int radius) const;

 private:
  int dimension_ = 0;
  Cell lo_{};
  Cell extent_{};
  std::array<std::int64_t, kMaxDim> stride_{};
  std::size_t size_ = 0;
};

/// Componentwise bounding box of a nonempty set of sites.
std::pair<Cell, Cell> bounding_box(std::span<const Site> sites, int dimension);

}  // namespace pst
