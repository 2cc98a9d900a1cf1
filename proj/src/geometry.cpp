#include "pst/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <sstream>

#include "pst/error.hpp"

namespace pst {

Site make_site(std::initializer_list<std::int32_t> t, std::int32_t k) {
  if (t.size() > kMaxDim) throw Error(errc::kInvalidInput, "site dimension exceeds kMaxDim");
  Site s;
  std::copy(t.begin(), t.end(), s.t.begin());
  s.k = k;
  return s;
}

std::optional<Matrix> invert(const Matrix& m) {
  const std::size_t n = m.size();
  Matrix a = m;
  Matrix inv(n, Vector(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a[pivot][col].numerator() == 0) ++pivot;
    if (pivot == n) return std::nullopt;
    std::swap(a[pivot], a[col]);
    std::swap(inv[pivot], inv[col]);
    const Rational p = a[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      a[col][j] /= p;
      inv[col][j] /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col].numerator() == 0) continue;
      const Rational f = a[r][col];
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

namespace {

Vector mat_vec(const Matrix& m, const Vector& v) {
  Vector out(m.size(), Rational(0));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
  return out;
}

bool all_integer(const Vector& v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& r) { return r.denominator() == 1; });
}

std::string format_vector(const Vector& v) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << to_string(v[i]);
  os << ")";
  return os.str();
}

std::int64_t round_rational(const Rational& r) {
  return static_cast<std::int64_t>(std::llround(to_double(r)));
}

}  // namespace

PointSet::PointSet(Matrix basis, std::vector<Vector> offsets)
    : basis_(std::move(basis)), offsets_(std::move(offsets)) {
  const std::size_t d = basis_.size();
  if (d < 2 || d > kMaxDim)
    throw Error(errc::kInvalidInput, "dimension must be between 2 and " + std::to_string(kMaxDim));
  for (const auto& row : basis_)
    if (row.size() != d) throw Error(errc::kInvalidInput, "basis must be a square matrix");
  auto inv = invert(basis_);
  if (!inv) throw Error(errc::kInvalidInput, "basis matrix is singular");
  inverse_ = std::move(*inv);
  if (offsets_.empty()) throw Error(errc::kInvalidInput, "a point set needs at least one offset");
  for (const auto& o : offsets_)
    if (o.size() != d) throw Error(errc::kInvalidInput, "offset has wrong dimension");
  for (std::size_t i = 0; i < offsets_.size(); ++i)
    for (std::size_t j = i + 1; j < offsets_.size(); ++j) {
      Vector diff(d);
      for (std::size_t a = 0; a < d; ++a) diff[a] = offsets_[i][a] - offsets_[j][a];
      if (all_integer(mat_vec(inverse_, diff)))
        throw Error(errc::kInvalidInput, "offsets " + std::to_string(i) + " and " + std::to_string(j) +
                                             " describe the same translate of B*Z^d");
    }
}

PointSet PointSet::cubic(int dimension) {
  Matrix b(dimension, Vector(dimension, Rational(0)));
  for (int i = 0; i < dimension; ++i) b[i][i] = 1;
  return PointSet(std::move(b), {Vector(dimension, Rational(0))});
}

bool PointSet::is_cubic() const { return *this == cubic(dimension()); }

Vector PointSet::position(const Site& s) const {
  Vector t(dimension());
  for (int i = 0; i < dimension(); ++i) t[i] = s.t[i];
  Vector p = mat_vec(basis_, t);
  for (int i = 0; i < dimension(); ++i) p[i] += offsets_.at(s.k)[i];
  return p;
}

std::int64_t lattice_norm(const Vector& s, const Matrix& basis) {
  auto inv = invert(basis);
  if (!inv) throw Error(errc::kInvalidInput, "basis matrix is singular");
  Vector t = mat_vec(*inv, s);
  if (!all_integer(t))
    throw Error(errc::kNotLattice, format_vector(s) + " is not a lattice vector (B^-1 s = " + format_vector(t) + ")");
  std::int64_t norm = 0;
  for (const auto& x : t) norm += std::abs(x.numerator());
  return norm;
}

std::int64_t cell_norm(const Cell& t, int dimension) {
  std::int64_t n = 0;
  for (int i = 0; i < dimension; ++i) n += std::abs(static_cast<std::int64_t>(t[i]));
  return n;
}

Site cell_coordinates(const Vector& p, const PointSet& ps) {
  const int d = ps.dimension();
  if (static_cast<int>(p.size()) != d) throw Error(errc::kInvalidInput, "point has wrong dimension");
  std::optional<Vector> nearest;
  Rational best_dist(-1);
  for (int k = 0; k < ps.num_offsets(); ++k) {
    Vector rel(d);
    for (int i = 0; i < d; ++i) rel[i] = p[i] - ps.offsets()[k][i];
    Vector t = mat_vec(ps.inverse(), rel);
    if (all_integer(t)) {
      Site s;
      for (int i = 0; i < d; ++i) s.t[i] = static_cast<std::int32_t>(t[i].numerator());
      s.k = k;
      return s;
    }
    Site guess;
    for (int i = 0; i < d; ++i) guess.t[i] = static_cast<std::int32_t>(round_rational(t[i]));
    guess.k = k;
    Vector q = ps.position(guess);
    Rational dist(0);
    for (int i = 0; i < d; ++i) dist += (q[i] - p[i]) * (q[i] - p[i]);
    if (best_dist < 0 || dist < best_dist) {
      best_dist = dist;
      nearest = q;
    }
  }
  throw Error(errc::kNotLattice,
              format_vector(p) + " is not in the point set; nearest point is " + format_vector(*nearest));
}

std::int64_t distance(const Site& a, const Site& b, int dimension, const Periods& periods) {
  std::int64_t sum = 0;
  for (int i = 0; i < dimension; ++i) {
    std::int64_t diff = std::abs(static_cast<std::int64_t>(a.t[i]) - b.t[i]);
    if (periods) {
      const std::int64_t p = (*periods)[i];
      diff %= p;
      diff = std::min(diff, p - diff);
    }
    sum += diff;
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Region
// ---------------------------------------------------------------------------

Region::Region(int dimension, std::vector<Site> sites, Periods periods, int num_offsets)
    : dimension_(dimension), num_offsets_(num_offsets), sites_(std::move(sites)), periods_(periods) {
  if (dimension_ < 1 || dimension_ > kMaxDim) throw Error(errc::kInvalidInput, "bad region dimension");
  if (periods_)
    for (int i = 0; i < dimension_; ++i)
      if ((*periods_)[i] <= 0) throw Error(errc::kInvalidInput, "torus periods must be positive");
  for (auto& s : sites_) {
    if (s.k < 0 || s.k >= num_offsets_) throw Error(errc::kInvalidInput, "site offset index out of range");
    for (int i = dimension_; i < kMaxDim; ++i)
      if (s.t[i] != 0) throw Error(errc::kInvalidInput, "site has coordinates beyond the region dimension");
    s = wrap(s);
  }
  std::sort(sites_.begin(), sites_.end());
  sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());
}

Region Region::box(int dimension, const Cell& lo, const Cell& extent, int num_offsets) {
  std::vector<Site> sites;
  Cell hi{};
  std::size_t count = num_offsets;
  for (int i = 0; i < dimension; ++i) {
    if (extent[i] < 0) throw Error(errc::kInvalidInput, "negative box extent");
    count *= extent[i];
    hi[i] = lo[i] + extent[i];
  }
  sites.reserve(count);
  if (count > 0) {
    Cell t = lo;
    while (true) {
      for (int k = 0; k < num_offsets; ++k) sites.push_back(Site{t, k});
      int axis = dimension - 1;
      while (axis >= 0) {
        if (++t[axis] < hi[axis]) break;
        t[axis] = lo[axis];
        --axis;
      }
      if (axis < 0) break;
    }
  }
  return Region(dimension, std::move(sites), std::nullopt, num_offsets);
}

Region Region::square(int side, int dimension) {
  Cell extent{};
  for (int i = 0; i < dimension; ++i) extent[i] = side;
  return box(dimension, Cell{}, extent);
}

Region Region::torus(int dimension, const Cell& periods, int num_offsets) {
  Region r = box(dimension, Cell{}, periods, num_offsets);
  Cell p{};
  for (int i = 0; i < dimension; ++i) p[i] = periods[i];
  return Region(dimension, r.sites_, p, num_offsets);
}

bool Region::contains(const Site& s) const { return index_of(s).has_value(); }

std::optional<std::size_t> Region::index_of(const Site& s) const {
  const Site w = wrap(s);
  auto it = std::lower_bound(sites_.begin(), sites_.end(), w);
  if (it == sites_.end() || *it != w) return std::nullopt;
  return static_cast<std::size_t>(it - sites_.begin());
}

Site Region::wrap(Site s) const {
  if (!periods_) return s;
  for (int i = 0; i < dimension_; ++i) {
    const std::int32_t p = (*periods_)[i];
    s.t[i] = ((s.t[i] % p) + p) % p;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Boundaries, components, cubes
// ---------------------------------------------------------------------------

namespace {

// All cell displacements with L1 norm <= n.
std::vector<Cell> l1_ball(int dimension, int n) {
  std::vector<Cell> out;
  Cell c{};
  for (int i = 0; i < dimension; ++i) c[i] = -n;
  while (true) {
    if (cell_norm(c, dimension) <= n) out.push_back(c);
    int axis = dimension - 1;
    while (axis >= 0) {
      if (++c[axis] <= n) break;
      c[axis] = -n;
      --axis;
    }
    if (axis < 0) break;
  }
  return out;
}

}  // namespace

Region boundary_layer(const Region& region, int n) {
  if (region.is_torus()) throw Error(errc::kInvalidInput, "a torus has no complement, so no boundary layer");
  if (n < 0) throw Error(errc::kInvalidInput, "boundary layer width must be nonnegative");
  const int d = region.dimension();
  const auto ball = l1_ball(d, n);
  std::vector<Site> layer;
  for (const auto& s : region.sites()) {
    bool near_outside = false;
    for (const auto& delta : ball) {
      for (int k = 0; k < region.num_offsets() && !near_outside; ++k) {
        Site other{s.t, k};
        for (int i = 0; i < d; ++i) other.t[i] += delta[i];
        if (!region.contains(other)) near_outside = true;
      }
      if (near_outside) break;
    }
    if (near_outside) layer.push_back(s);
  }
  return Region(d, std::move(layer), std::nullopt, region.num_offsets());
}

std::vector<std::vector<Site>> connected_components(std::span<const Site> sites, int dimension,
                                                    const Periods& periods) {
  int max_k = 0;
  for (const auto& s : sites) max_k = std::max(max_k, s.k);
  Region region(dimension, std::vector<Site>(sites.begin(), sites.end()), periods, max_k + 1);
  const auto& all = region.sites();
  std::vector<int> comp(all.size(), -1);
  std::vector<std::vector<Site>> out;
  for (std::size_t start = 0; start < all.size(); ++start) {
    if (comp[start] >= 0) continue;
    const int id = static_cast<int>(out.size());
    out.emplace_back();
    std::deque<std::size_t> queue{start};
    comp[start] = id;
    while (!queue.empty()) {
      const std::size_t cur = queue.front();
      queue.pop_front();
      out[id].push_back(all[cur]);
      const Site& s = all[cur];
      auto visit = [&](const Site& nb) {
        if (auto idx = region.index_of(nb); idx && comp[*idx] < 0) {
          comp[*idx] = id;
          queue.push_back(*idx);
        }
      };
      for (int k = 0; k <= max_k; ++k)
        if (k != s.k) visit(Site{s.t, k});
      for (int axis = 0; axis < dimension; ++axis)
        for (int dir : {-1, 1}) {
          Site base = s;
          base.t[axis] += dir;
          for (int k = 0; k <= max_k; ++k) visit(Site{base.t, k});
        }
    }
    std::sort(out[id].begin(), out[id].end());
  }
  return out;
}

std::pair<Cell, Cell> bounding_box(std::span<const Site> sites, int dimension) {
  if (sites.empty()) throw Error(errc::kInvalidInput, "bounding box of an empty set");
  Cell lo = sites.front().t, hi = sites.front().t;
  for (const auto& s : sites)
    for (int i = 0; i < dimension; ++i) {
      lo[i] = std::min(lo[i], s.t[i]);
      hi[i] = std::max(hi[i], s.t[i]);
    }
  return {lo, hi};
}

ComplementComponents complement_components(std::span<const Site> sites, int dimension) {
  ComplementComponents result;
  if (sites.empty()) {
    result.parts.emplace_back();
    return result;
  }
  auto [lo, hi] = bounding_box(sites, dimension);
  Cell flo{}, extent{};
  for (int i = 0; i < dimension; ++i) {
    flo[i] = lo[i] - 1;
    extent[i] = hi[i] - lo[i] + 3;
  }
  BoxGrid grid(dimension, flo, extent);
  std::vector<int> comp(grid.size(), -1);
  for (const auto& s : sites) comp[grid.index(s.t)] = -2;
  const auto nbs = grid.neighbor_offsets();
  for (std::size_t start = 0; start < grid.size(); ++start) {
    if (comp[start] != -1) continue;
    const int id = static_cast<int>(result.parts.size());
    result.parts.emplace_back();
    std::deque<std::size_t> queue{start};
    comp[start] = id;
    while (!queue.empty()) {
      const std::size_t cur = queue.front();
      queue.pop_front();
      result.parts[id].push_back(grid.site(cur));
      const Cell c = grid.cell(cur);
      for (int axis = 0; axis < dimension; ++axis)
        for (int dir : {-1, 1}) {
          Cell n = c;
          n[axis] += dir;
          if (!grid.inside(n)) continue;
          const std::size_t ni = grid.index(n);
          if (comp[ni] == -1) {
            comp[ni] = id;
            queue.push_back(ni);
          }
        }
    }
    std::sort(result.parts[id].begin(), result.parts[id].end());
  }
  result.external = static_cast<std::size_t>(comp[0]);
  return result;
}

Region cube(const Site& center, int size, int dimension, int num_offsets) {
  if (size <= 0 || size % 2 == 0) throw Error(errc::kInvalidInput, "cube size must be a positive odd integer");
  const int h = (size - 1) / 2;
  Cell lo{}, extent{};
  for (int i = 0; i < dimension; ++i) {
    lo[i] = center.t[i] - h;
    extent[i] = size;
  }
  return Region::box(dimension, lo, extent, num_offsets);
}

// ---------------------------------------------------------------------------
// BoxGrid
// ---------------------------------------------------------------------------

BoxGrid::BoxGrid(int dimension, const Cell& lo, const Cell& extent)
    : dimension_(dimension), lo_(lo), extent_(extent) {
  std::int64_t s = 1;
  for (int i = dimension - 1; i >= 0; --i) {
    stride_[i] = s;
    s *= extent[i];
  }
  size_ = static_cast<std::size_t>(s);
}

bool BoxGrid::inside(const Cell& t) const {
  for (int i = 0; i < dimension_; ++i)
    if (t[i] < lo_[i] || t[i] >= lo_[i] + extent_[i]) return false;
  return true;
}

Cell BoxGrid::cell(std::size_t index) const {
  Cell t{};
  auto rem = static_cast<std::int64_t>(index);
  for (int i = 0; i < dimension_; ++i) {
    t[i] = static_cast<std::int32_t>(lo_[i] + rem / stride_[i]);
    rem %= stride_[i];
  }
  return t;
}

bool BoxGrid::on_border(std::size_t index) const { return !interior(index, 1); }

bool BoxGrid::interior(std::size_t index, int radius) const {
  const Cell t = cell(index);
  for (int i = 0; i < dimension_; ++i)
    if (t[i] - radius < lo_[i] || t[i] + radius >= lo_[i] + extent_[i]) return false;
  return true;
}

std::vector<std::int64_t> BoxGrid::neighbor_offsets() const {
  std::vector<std::int64_t> out;
  for (int i = 0; i < dimension_; ++i) {
    out.push_back(-stride_[i]);
    out.push_back(stride_[i]);
  }
  return out;
}

std::vector<std::int64_t> BoxGrid::cube_offsets(int radius) const {
  std::vector<std::int64_t> out;
  Cell c{};
  for (int i = 0; i < dimension_; ++i) c[i] = -radius;
  while (true) {
    std::int64_t off = 0;
    for (int i = 0; i < dimension_; ++i) off += c[i] * stride_[i];
    out.push_back(off);
    int axis = dimension_ - 1;
    while (axis >= 0) {
      if (++c[axis] <= radius) break;
      c[axis] = -radius;
      --axis;
    }
    if (axis < 0) break;
  }
  return out;
}

}  // namespace pst
