#include "pst/contours.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "pst/animals.hpp"
#include "pst/error.hpp"
#include "pst/groundstates.hpp"

namespace pst {

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

std::string site_text(const Site& s, int d) {
  std::string out = "(";
  for (int i = 0; i < d; ++i) out += (i ? "," : "") + std::to_string(s.t[i]);
  return out + ")";
}

// Box of cells [lo, hi] dilated by `margin` on every side.
BoxGrid dilated_grid(const Cell& lo, const Cell& hi, int margin, int d) {
  Cell flo{}, extent{};
  for (int i = 0; i < d; ++i) {
    flo[i] = lo[i] - margin;
    extent[i] = hi[i] - lo[i] + 1 + 2 * margin;
  }
  return BoxGrid(d, flo, extent);
}

// Calls fn(index, cell) for every cell of the sub-box [lo, hi], in increasing index order.
template <class Fn>
void for_each_in_box(const BoxGrid& g, const Cell& lo, const Cell& hi, Fn&& fn) {
  const int d = g.dimension();
  Cell c = lo;
  std::int64_t idx = static_cast<std::int64_t>(g.index(lo));
  while (true) {
    fn(static_cast<std::size_t>(idx), c);
    int axis = d - 1;
    while (axis >= 0) {
      if (++c[axis] <= hi[axis]) {
        idx += g.stride(axis);
        break;
      }
      idx -= (hi[axis] - lo[axis]) * g.stride(axis);
      c[axis] = lo[axis];
      --axis;
    }
    if (axis < 0) break;
  }
}

// Indices of a sub-box of a grid, in increasing order.
std::vector<std::size_t> sub_box(const BoxGrid& g, const Cell& lo, const Cell& hi) {
  std::vector<std::size_t> out;
  for_each_in_box(g, lo, hi, [&](std::size_t idx, const Cell&) { out.push_back(idx); });
  return out;
}

bool inside_box(const Cell& c, const Cell& lo, const Cell& hi, int d) {
  for (int i = 0; i < d; ++i)
    if (c[i] < lo[i] || c[i] > hi[i]) return false;
  return true;
}

// Components of the complement of `support` (grid indices) inside the box
// bbox(support)+1; component 0 is the external one. The flood fill runs on a
// local copy of the box padded by a wall layer.
void complement_in_box(const BoxGrid& g, std::span<const std::size_t> support, detail::LocalComplement& lc) {
  constexpr std::int32_t kWall = -2, kOpen = -1;
  const int d = g.dimension();
  lc.lo = g.cell(support.front());
  lc.hi = lc.lo;
  for (std::size_t s : support) {
    const Cell c = g.cell(s);
    for (int i = 0; i < d; ++i) {
      lc.lo[i] = std::min(lc.lo[i], c[i]);
      lc.hi[i] = std::max(lc.hi[i], c[i]);
    }
  }
  for (int i = 0; i < d; ++i) {
    --lc.lo[i];
    ++lc.hi[i];
  }
  std::array<std::int64_t, kMaxDim> stride{};
  std::size_t total = 1;
  for (int i = d - 1; i >= 0; --i) {
    stride[i] = static_cast<std::int64_t>(total);
    total *= static_cast<std::size_t>(lc.hi[i] - lc.lo[i] + 3);
  }
  auto local = [&](const Cell& c) {
    std::int64_t pos = 0;
    for (int i = 0; i < d; ++i) pos += (c[i] - lc.lo[i] + 1) * stride[i];
    return static_cast<std::size_t>(pos);
  };
  lc.local.assign(total, kWall);
  lc.box.clear();
  lc.local_index.clear();
  for_each_in_box(g, lc.lo, lc.hi, [&](std::size_t idx, const Cell& c) {
    lc.box.push_back(idx);
    lc.local_index.push_back(local(c));
    lc.local[lc.local_index.back()] = kOpen;
  });
  for (std::size_t s : support) lc.local[local(g.cell(s))] = kWall;
  lc.count = 0;
  for (std::size_t start : lc.local_index) {
    if (lc.local[start] != kOpen) continue;
    const std::int32_t id = lc.count++;
    lc.queue.assign(1, start);
    lc.local[start] = id;
    for (std::size_t head = 0; head < lc.queue.size(); ++head) {
      const std::size_t at = lc.queue[head];
      for (int axis = 0; axis < d; ++axis)
        for (std::size_t nb : {at - stride[axis], at + stride[axis]}) {
          if (lc.local[nb] != kOpen) continue;
          lc.local[nb] = id;
          lc.queue.push_back(nb);
        }
    }
  }
  lc.component.resize(lc.box.size());
  for (std::size_t j = 0; j < lc.box.size(); ++j) {
    const std::int32_t v = lc.local[lc.local_index[j]];
    lc.component[j] = v == kWall ? -1 : v;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Context and contours
// ---------------------------------------------------------------------------

ContourContext ContourContext::make(const Model& m, std::vector<Spin> ground, int cube_size) {
  m.validate();
  if (m.num_offsets() != 1) throw Error(errc::kInvalidInput, "contours need a single-offset model; reduce first");
  if (cube_size < 1 || cube_size % 2 == 0) throw Error(errc::kInvalidInput, "cube size must be odd");
  if (ground.empty()) {
    for (const auto& st : find_ground_states(m, 1, 1u << 22, 0).states)
      if (st.is_constant()) ground.push_back(st.pattern.spins.front());
    if (ground.empty()) throw Error(errc::kInvalidInput, "the model has no constant ground state; reduce first");
  }
  std::sort(ground.begin(), ground.end());
  ground.erase(std::unique(ground.begin(), ground.end()), ground.end());
  for (Spin s : ground)
    if (s >= m.num_spins()) throw Error(errc::kInvalidInput, "ground label out of range");
  return ContourContext{m, std::move(ground), cube_size};
}

bool ContourContext::is_ground(Spin s) const { return std::binary_search(ground.begin(), ground.end(), s); }

Contour Contour::translated(const Cell& shift, int dimension) const {
  Contour c = *this;
  auto move = [&](Site& s) {
    for (int i = 0; i < dimension; ++i) s.t[i] += shift[i];
  };
  for (auto& s : c.support) move(s);
  for (auto& comp : c.interior)
    for (auto& s : comp.sites) move(s);
  return c;
}

// ---------------------------------------------------------------------------
// Extractor
// ---------------------------------------------------------------------------

Extractor::Extractor(const ContourContext& ctx, const Region& region, Spin external)
    : ctx_(ctx), region_(region), q_(external), h_(ctx.halo()),
      grid_([&] {
        const int d = ctx.dimension();
        if (region.is_torus()) throw Error(errc::kInvalidInput, "contours need a finite region with a boundary condition");
        if (region.num_offsets() != 1 || region.dimension() != d)
          throw Error(errc::kInvalidInput, "region does not match the contour model");
        Cell lo{}, hi{};
        if (!region.empty()) std::tie(lo, hi) = bounding_box(region.sites(), d);
        return dilated_grid(lo, hi, 2 * ctx.halo() + 1, d);
      }()),
      terms_(ctx.model, grid_) {
  if (!ctx_.is_ground(q_)) throw Error(errc::kInvalidInput, "boundary label is not a constant ground state");
  const std::size_t n = grid_.size();
  for (const auto& s : region_.sites()) region_index_.push_back(grid_.index(s.t));
  in_region_.assign(n, 0);
  for (auto i : region_index_) in_region_[i] = 1;
  cube_ = grid_.cube_offsets(h_);
  neighbors_ = grid_.neighbor_offsets();
  std::vector<std::uint8_t> near(n, 0);
  for (auto i : region_index_)
    for (auto off : cube_) near[static_cast<std::int64_t>(i) + off] = 1;
  for (std::size_t i = 0; i < n; ++i)
    if (near[i]) candidates_.push_back(i);
  frame_sites_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) frame_sites_.push_back(grid_.site(i));
  ground_.assign(ctx_.model.num_spins(), 0);
  for (Spin s : ctx_.ground) ground_[s] = 1;
  spins_.assign(n, q_);
  scratch_.assign(n, q_);
  correct_.assign(n, 1);
  mark_.assign(n, -1);
  visit_.assign(n, 0);
}

std::size_t Extractor::frame_index(const Site& s) const {
  if (s.k != 0 || !grid_.inside(s.t)) return kNone;
  return grid_.index(s.t);
}

void Extractor::load(std::span<const Spin> spins) {
  if (spins.size() != region_index_.size()) throw Error(errc::kInvalidInput, "configuration size does not match the region");
  for (std::size_t i = 0; i < spins.size(); ++i) spins_[region_index_[i]] = spins[i];
}

void Extractor::mark_correct() {
  for (std::size_t idx : candidates_) {
    const Spin v = spins_[idx];
    bool ok = ground_[v] != 0;
    if (ok)
      for (auto off : cube_)
        if (spins_[static_cast<std::int64_t>(idx) + off] != v) {
          ok = false;
          break;
        }
    correct_[idx] = ok;
  }
}

std::vector<Site> Extractor::boundary(std::span<const Spin> spins) {
  load(spins);
  mark_correct();
  std::vector<Site> out;
  for (std::size_t idx : candidates_)
    if (!correct_[idx]) out.push_back(grid_.site(idx));
  return out;
}

Extractor::Shape Extractor::shape_of(const std::vector<std::size_t>& support, const std::vector<Spin>& frame_spins) {
  auto& lc = lc_;
  complement_in_box(grid_, support, lc);
  Shape shape;
  shape.support = support;
  shape.interior.resize(static_cast<std::size_t>(std::max(lc.count - 1, 0)));
  std::vector<int> labels(static_cast<std::size_t>(lc.count), -1);
  for (std::size_t j = 0; j < lc.box.size(); ++j) {
    const int comp = lc.component[j];
    if (comp > 0) shape.interior[comp - 1].push_back(lc.box[j]);
  }
  // Labels come from complement sites L1-adjacent to the support.
  for (std::size_t j = 0; j < lc.box.size(); ++j) mark_[lc.box[j]] = static_cast<std::int32_t>(j);
  for (std::size_t s : support) mark_[s] = -2;
  for (std::size_t s : support)
    for (auto off : neighbors_) {
      const auto nb = static_cast<std::size_t>(static_cast<std::int64_t>(s) + off);
      const std::int32_t pos = mark_[nb];
      if (pos < 0) continue;
      const int comp = lc.component[pos];
      const int value = frame_spins[nb];
      if (!correct_[nb] || !ground_[value])
        throw Error(errc::kInconsistent, "complement site " + site_text(grid_.site(nb), grid_.dimension()) +
                                             " next to a contour is not correct");
      if (labels[comp] == -1) {
        labels[comp] = value;
      } else if (labels[comp] != value) {
        throw Error(errc::kInconsistent, "complement component of a contour is not labelled by one ground state");
      }
    }
  for (std::size_t j : lc.box) mark_[j] = -1;
  for (std::size_t s : support) mark_[s] = -1;
  for (int comp = 0; comp < lc.count; ++comp)
    if (labels[comp] < 0) throw Error(errc::kInconsistent, "complement component without a label");
  shape.sign = static_cast<Spin>(labels[0]);
  for (int comp = 1; comp < lc.count; ++comp) shape.labels.push_back(static_cast<Spin>(labels[comp]));
  return shape;
}

Contour Extractor::to_contour(const Shape& s, const std::vector<Spin>& frame_spins) const {
  Contour c;
  c.sign = s.sign;
  c.support.reserve(s.support.size());
  c.pattern.reserve(s.support.size());
  for (std::size_t idx : s.support) {
    c.support.push_back(frame_sites_[idx]);
    c.pattern.push_back(frame_spins[idx]);
  }
  for (std::size_t m = 0; m < s.interior.size(); ++m) {
    InteriorComponent comp;
    comp.label = s.labels[m];
    comp.sites.reserve(s.interior[m].size());
    for (std::size_t idx : s.interior[m]) comp.sites.push_back(frame_sites_[idx]);
    c.interior.push_back(std::move(comp));
  }
  return c;
}

ContourFamily Extractor::extract(std::span<const Spin> spins) {
  Weight unused;
  return extract_impl(spins, nullptr, unused);
}

ContourFamily Extractor::extract(std::span<const Spin> spins, Weight& weight) {
  return extract_impl(spins, &weight, weight);
}

ContourFamily Extractor::extract_impl(std::span<const Spin> spins, const Weight* want, Weight& weight) {
  load(spins);
  mark_correct();
  ContourFamily f;
  f.region = region_;
  f.external = q_;
  weight = Weight{};
  if (++visit_gen_ == 0) {
    std::fill(visit_.begin(), visit_.end(), 0);
    visit_gen_ = 1;
  }
  auto& component = component_;
  owned_.clear();
  for (std::size_t start : candidates_) {
    if (correct_[start] || visit_[start] == visit_gen_) continue;
    component.assign(1, start);
    visit_[start] = visit_gen_;
    for (std::size_t head = 0; head < component.size(); ++head)
      for (auto off : neighbors_) {
        const auto nb = static_cast<std::size_t>(static_cast<std::int64_t>(component[head]) + off);
        if (correct_[nb] || visit_[nb] == visit_gen_) continue;
        visit_[nb] = visit_gen_;
        component.push_back(nb);
      }
    std::sort(component.begin(), component.end());
    const Shape shape = shape_of(component, spins_);
    if (want) {
      weight.phi += shape_energy(shape);
      owned_.insert(owned_.end(), component.begin(), component.end());
      owned_.push_back(kNone);
    }
    f.contours.push_back(to_contour(shape, spins_));
  }
  if (want) {
    std::int32_t id = 0;
    for (std::size_t idx : owned_) {
      if (idx == kNone) {
        ++id;
      } else {
        mark_[idx] = id;
      }
    }
    try {
      weight.remainder = remainder(f);
    } catch (...) {
      for (std::size_t idx : owned_)
        if (idx != kNone) mark_[idx] = -1;
      throw;
    }
    for (std::size_t idx : owned_)
      if (idx != kNone) mark_[idx] = -1;
  }
  return f;
}

// Singleton painting of a shape just returned by shape_of, whose complement
// box lc_ is bbox(support)+1.
std::int64_t Extractor::shape_energy(const Shape& s) {
  for (std::size_t idx : lc_.box) scratch_[idx] = s.sign;
  for (std::size_t m = 0; m < s.interior.size(); ++m)
    for (std::size_t idx : s.interior[m]) scratch_[idx] = s.labels[m];
  for (std::size_t idx : s.support) scratch_[idx] = spins_[idx];
  terms_.instances_meeting(s.support, contour_instances_);
  std::int64_t phi = 0;
  bool finite = true;
  for (const auto& [t, a] : contour_instances_) {
    const std::int64_t v = terms_.value(t, a, scratch_.data());
    if (v == kInfinite) {
      finite = false;
      break;
    }
    phi += v - terms_.constant_value(t, s.sign);
  }
  for (std::size_t idx : lc_.box) scratch_[idx] = q_;
  if (!finite) throw Error(errc::kInadmissible, "singleton reconstruction of a contour is not admissible");
  return phi;
}

std::vector<Spin> Extractor::reconstruct(const ContourFamily& f) {
  if (!(f.region == region_) || f.external != q_)
    throw Error(errc::kInvalidInput, "family belongs to a different region or boundary label");
  const int d = grid_.dimension();
  std::vector<std::size_t> touched;
  std::vector<std::size_t> order(f.contours.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::size_t> area(f.contours.size(), 0);
  auto cleanup = [&] {
    for (auto idx : touched) {
      scratch_[idx] = q_;
      mark_[idx] = -1;
    }
  };
  try {
    for (std::size_t i = 0; i < f.contours.size(); ++i) {
      const Contour& c = f.contours[i];
      if (c.pattern.size() != c.support.size()) throw Error(errc::kIncompatible, "contour pattern size mismatch");
      area[i] = c.support.size();
      for (const auto& comp : c.interior) area[i] += comp.sites.size();
      for (const auto& s : c.support) {
        const std::size_t idx = frame_index(s);
        if (idx == kNone || !grid_.interior(idx, 1))
          throw Error(errc::kIncompatible, "contour " + std::to_string(i) + " leaves the region's frame");
        if (mark_[idx] != -1)
          throw Error(errc::kIncompatible, "contours " + std::to_string(mark_[idx]) + " and " + std::to_string(i) +
                                               " share site " + site_text(s, d));
        mark_[idx] = static_cast<std::int32_t>(i);
        touched.push_back(idx);
      }
    }
    for (std::size_t i = 0; i < f.contours.size(); ++i)
      for (const auto& s : f.contours[i].support) {
        const std::size_t idx = frame_index(s);
        for (auto off : neighbors_) {
          const std::int32_t other = mark_[static_cast<std::int64_t>(idx) + off];
          if (other >= 0 && other != static_cast<std::int32_t>(i))
            throw Error(errc::kIncompatible, "contours " + std::to_string(std::min<std::int32_t>(other, i)) + " and " +
                                                 std::to_string(std::max<std::int32_t>(other, i)) + " are adjacent");
        }
      }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return area[a] > area[b]; });
    for (std::size_t i : order) {
      const Contour& c = f.contours[i];
      for (const auto& s : c.support)
        if (scratch_[frame_index(s)] != c.sign)
          throw Error(errc::kIncompatible, "sign of contour " + std::to_string(i) + " does not match its surroundings");
      for (const auto& comp : c.interior) {
        if (!ctx_.is_ground(comp.label)) throw Error(errc::kIncompatible, "interior label is not a ground state");
        for (const auto& s : comp.sites) {
          const std::size_t idx = frame_index(s);
          if (idx == kNone) throw Error(errc::kIncompatible, "interior leaves the frame");
          scratch_[idx] = comp.label;
          touched.push_back(idx);
        }
      }
    }
    for (const auto& c : f.contours)
      for (std::size_t j = 0; j < c.support.size(); ++j) scratch_[frame_index(c.support[j])] = c.pattern[j];
    for (auto idx : touched)
      if (!in_region_[idx] && scratch_[idx] != q_)
        throw Error(errc::kIncompatible, "family changes a spin outside the region at " + site_text(grid_.site(idx), d));
  } catch (...) {
    cleanup();
    throw;
  }
  std::vector<Spin> out(region_index_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = scratch_[region_index_[i]];
  cleanup();
  return out;
}

std::int64_t Extractor::excess(std::span<const Spin> spins) {
  load(spins);
  if (instances_.empty() && !region_index_.empty()) terms_.instances_meeting(region_index_, instances_);
  std::int64_t total = 0;
  for (const auto& [t, a] : instances_) {
    const std::int64_t v = terms_.value(t, a, spins_.data());
    if (v == kInfinite) return kInfinite;
    total += v - terms_.constant_value(t, q_);
  }
  return total;
}

void Extractor::paint_singleton(const Contour& c, std::vector<Spin>& scratch, std::vector<std::size_t>& touched) {
  const int d = grid_.dimension();
  auto [lo, hi] = bounding_box(c.support, d);
  for (int i = 0; i < d; ++i) {
    --lo[i];
    ++hi[i];
  }
  for (int i = 0; i < d; ++i)
    if (lo[i] < grid_.lo()[i] || hi[i] >= grid_.lo()[i] + grid_.extent()[i])
      throw Error(errc::kInvalidInput, "contour does not fit the region's frame");
  for_each_in_box(grid_, lo, hi, [&](std::size_t idx, const Cell&) {
    scratch[idx] = c.sign;
    touched.push_back(idx);
  });
  for (const auto& comp : c.interior)
    for (const auto& s : comp.sites) scratch[frame_index(s)] = comp.label;
  for (std::size_t j = 0; j < c.support.size(); ++j) scratch[frame_index(c.support[j])] = c.pattern[j];
}

std::int64_t Extractor::contour_energy(const Contour& c) {
  auto& touched = touched_;
  touched.clear();
  paint_singleton(c, scratch_, touched);
  auto& sites = sites_;
  sites.clear();
  for (const auto& s : c.support) sites.push_back(frame_index(s));
  auto& inst = contour_instances_;
  terms_.instances_meeting(sites, inst);
  std::int64_t phi = 0;
  bool finite = true;
  for (const auto& [t, a] : inst) {
    const std::int64_t v = terms_.value(t, a, scratch_.data());
    if (v == kInfinite) {
      finite = false;
      break;
    }
    phi += v - terms_.constant_value(t, c.sign);
  }
  for (auto idx : touched) scratch_[idx] = q_;
  if (!finite) throw Error(errc::kInadmissible, "singleton reconstruction of a contour is not admissible");
  return phi;
}

std::int64_t Extractor::imbalance(const ContourFamily& f) {
  const std::vector<Spin> chi = reconstruct(f);
  return imbalance(f, chi);
}

std::int64_t Extractor::imbalance(const ContourFamily& f, std::span<const Spin> chi) {
  load(chi);
  owned_.clear();
  for (std::size_t i = 0; i < f.contours.size(); ++i)
    for (const auto& s : f.contours[i].support) {
      const std::size_t idx = frame_index(s);
      mark_[idx] = static_cast<std::int32_t>(i);
      owned_.push_back(idx);
    }
  std::int64_t r = 0;
  try {
    r = remainder(f);
  } catch (...) {
    for (auto idx : owned_) mark_[idx] = -1;
    throw;
  }
  for (auto idx : owned_) mark_[idx] = -1;
  return r;
}

// Needs spins_ loaded with chi and mark_ holding the owning contour of every support site.
std::int64_t Extractor::remainder(const ContourFamily& f) {
  if (instances_.empty() && !region_index_.empty()) terms_.instances_meeting(region_index_, instances_);
  std::int64_t r = 0;
  auto& owners = owners_;
  std::vector<std::size_t> touched;
  for (const auto& [t, a] : instances_) {
    owners.clear();
    for (auto delta : terms_.deltas(t)) {
      const std::int32_t o = mark_[static_cast<std::int64_t>(a) + delta];
      if (o >= 0 && std::find(owners.begin(), owners.end(), o) == owners.end()) owners.push_back(o);
    }
    if (owners.size() == 1) {
      r += terms_.constant_value(t, f.contours[owners.front()].sign) - terms_.constant_value(t, q_);
      continue;
    }
    const std::int64_t v = terms_.value(t, a, spins_.data());
    if (v == kInfinite) throw Error(errc::kInadmissible, "family reconstructs to an inadmissible configuration");
    r += v - terms_.constant_value(t, q_);
    for (auto o : owners) {
      const Contour& c = f.contours[o];
      touched.clear();
      paint_singleton(c, scratch_, touched);
      const std::int64_t vi = terms_.value(t, a, scratch_.data());
      for (auto idx : touched) scratch_[idx] = q_;
      if (vi == kInfinite) throw Error(errc::kInadmissible, "singleton reconstruction of a contour is not admissible");
      r -= vi - terms_.constant_value(t, c.sign);
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Free functions
// ---------------------------------------------------------------------------

namespace {

Spin boundary_label(const ContourContext& ctx, const Configuration& c) {
  const auto* p = std::get_if<PeriodicPattern>(&c.bc);
  if (!p || p->period != 1 || !p->is_constant())
    throw Error(errc::kInvalidInput, "contours need a constant ground-state boundary condition");
  const Spin q = p->spins.front();
  if (!ctx.is_ground(q)) throw Error(errc::kInvalidInput, "boundary label is not a constant ground state");
  return q;
}

}  // namespace

std::vector<Site> boundary_of(const ContourContext& ctx, const Configuration& c) {
  Extractor x(ctx, c.region, boundary_label(ctx, c));
  return x.boundary(c.spins);
}

ContourFamily extract_contours(const ContourContext& ctx, const Configuration& c) {
  if (!is_admissible(ctx.model, c)) throw Error(errc::kInadmissible, "configuration is not admissible");
  Extractor x(ctx, c.region, boundary_label(ctx, c));
  return x.extract(c.spins);
}

Configuration reconstruct(const ContourContext& ctx, const ContourFamily& f) {
  Extractor x(ctx, f.region, f.external);
  return Configuration{f.region, x.reconstruct(f), constant_bc(f.external, ctx.model)};
}

namespace {

// Singleton reconstruction of a contour on its own small frame.
struct Picture {
  BoxGrid grid;
  std::vector<Spin> spins;
  std::vector<std::size_t> support;
  std::vector<std::int32_t> component;  // -2 support, 0 external, m>0 interior m-1

  Picture(const ContourContext& ctx, const Contour& c) {
    const int d = ctx.dimension();
    if (c.support.empty()) throw Error(errc::kInvalidInput, "contour with empty support");
    if (c.pattern.size() != c.support.size()) throw Error(errc::kInvalidInput, "contour pattern size mismatch");
    auto [lo, hi] = bounding_box(c.support, d);
    grid = dilated_grid(lo, hi, 2 * ctx.halo() + 1, d);
    spins.assign(grid.size(), c.sign);
    component.assign(grid.size(), 0);
    for (std::size_t m = 0; m < c.interior.size(); ++m)
      for (const auto& s : c.interior[m].sites) {
        if (s.k != 0 || !grid.inside(s.t)) throw Error(errc::kInvalidInput, "interior site outside the contour's box");
        spins[grid.index(s.t)] = c.interior[m].label;
        component[grid.index(s.t)] = static_cast<std::int32_t>(m + 1);
      }
    for (std::size_t j = 0; j < c.support.size(); ++j) {
      if (c.support[j].k != 0) throw Error(errc::kInvalidInput, "contour site with a nonzero offset");
      const std::size_t idx = grid.index(c.support[j].t);
      support.push_back(idx);
      spins[idx] = c.pattern[j];
      component[idx] = -2;
    }
  }
};

}  // namespace

Rational contour_energy(const ContourContext& ctx, const Contour& c) {
  const Picture pic(ctx, c);
  const TermTable terms(ctx.model, pic.grid);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> inst;
  terms.instances_meeting(pic.support, inst);
  std::int64_t phi = 0;
  for (const auto& [t, a] : inst) {
    const std::int64_t v = terms.value(t, a, pic.spins.data());
    if (v == TermTable::kInfinite) throw Error(errc::kInadmissible, "singleton reconstruction of a contour is not admissible");
    phi += v - terms.constant_value(t, c.sign);
  }
  return Rational(phi, terms.scale());
}

void validate_contour(const ContourContext& ctx, const Contour& c) {
  const int d = ctx.dimension();
  if (!std::is_sorted(c.support.begin(), c.support.end()) ||
      std::adjacent_find(c.support.begin(), c.support.end()) != c.support.end())
    throw Error(errc::kInvalidInput, "support must be sorted without repeats");
  if (connected_components(c.support, d).size() != 1) throw Error(errc::kInvalidInput, "support is not connected");
  if (!ctx.is_ground(c.sign)) throw Error(errc::kInvalidInput, "sign is not a constant ground state");

  const auto cc = complement_components(c.support, d);
  std::set<std::vector<Site>> expected, given;
  for (std::size_t m = 0; m < cc.parts.size(); ++m)
    if (m != cc.external) expected.insert(cc.parts[m]);
  for (const auto& comp : c.interior) {
    if (!ctx.is_ground(comp.label)) throw Error(errc::kInvalidInput, "interior label is not a constant ground state");
    given.insert(comp.sites);
  }
  if (expected != given) throw Error(errc::kInvalidInput, "interior components do not match the support");

  const Picture pic(ctx, c);
  const auto cube = pic.grid.cube_offsets(ctx.halo());
  auto correct = [&](std::size_t idx) {
    const Spin v = pic.spins[idx];
    if (!ctx.is_ground(v)) return false;
    for (auto off : cube)
      if (pic.spins[static_cast<std::int64_t>(idx) + off] != v) return false;
    return true;
  };
  for (std::size_t idx : pic.support)
    if (correct(idx)) throw Error(errc::kInvalidInput, "support site " + site_text(pic.grid.site(idx), d) + " is correct");
  std::vector<std::uint8_t> near(pic.grid.size(), 0);
  for (std::size_t idx : pic.support)
    for (auto off : cube) near[static_cast<std::int64_t>(idx) + off] = 1;
  for (std::size_t idx = 0; idx < pic.grid.size(); ++idx)
    if (near[idx] && pic.component[idx] != -2 && !correct(idx))
      throw Error(errc::kInvalidInput, "complement site " + site_text(pic.grid.site(idx), d) + " is not correct");
  (void)contour_energy(ctx, c);
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

std::vector<Contour> enumerate_contours(const ContourContext& ctx, Spin q, int kmax, const Site& anchor,
                                        std::uint64_t pattern_cap) {
  if (!ctx.is_ground(q)) throw Error(errc::kInvalidInput, "sign is not a constant ground state");
  std::vector<Contour> out;
  if (kmax < 1) return out;
  const int d = ctx.dimension();
  const int h = ctx.halo();
  const std::size_t S = ctx.model.num_spins();
  const auto& G = ctx.ground;

  // One frame for every animal: they stay within distance kmax-1 of the anchor.
  Cell lo{}, hi{};
  for (int i = 0; i < d; ++i) {
    lo[i] = anchor.t[i] - (kmax - 1);
    hi[i] = anchor.t[i] + (kmax - 1);
  }
  const BoxGrid grid = dilated_grid(lo, hi, 2 * h + 1, d);
  const TermTable terms(ctx.model, grid);
  const auto cube = grid.cube_offsets(h);
  const std::size_t n = grid.size();
  std::vector<Spin> spins(n, q);
  std::vector<std::int32_t> scratch(n, -1);
  std::vector<int> forced(n, -1);
  std::vector<int> label(n, -1);  // complement label near the animal
  std::vector<std::uint8_t> in_p(n, 0);
  std::vector<std::uint8_t> is_ground(S, 0);
  for (Spin g : G) is_ground[g] = 1;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> inst;
  std::uint64_t patterns = 0;

  const AnimalEnumerator animals(d, 1, kmax, Connectivity::kL1);
  animals.run(anchor, [&](std::span<const Site> cells) {
    std::vector<std::size_t> p;
    for (const auto& s : cells) p.push_back(grid.index(s.t));
    std::sort(p.begin(), p.end());
    for (auto i : p) in_p[i] = 1;
    detail::LocalComplement lc;
    complement_in_box(grid, p, lc);
    const int interiors = lc.count - 1;

    // Complement sites whose cube meets the animal, with their component.
    Cell nlo = lc.lo, nhi = lc.hi;
    for (int i = 0; i < d; ++i) {
      nlo[i] -= h - 1;
      nhi[i] += h - 1;
    }
    std::vector<std::size_t> ring = sub_box(grid, nlo, nhi);
    std::vector<int> ring_comp(ring.size(), 0);
    {
      std::size_t j = 0;
      for (std::size_t r = 0; r < ring.size(); ++r) {
        const Cell c = grid.cell(ring[r]);
        if (inside_box(c, lc.lo, lc.hi, d)) {
          while (lc.box[j] != ring[r]) ++j;
          ring_comp[r] = lc.component[j];
        } else {
          ring_comp[r] = 0;
        }
      }
    }

    std::vector<Spin> labels(static_cast<std::size_t>(std::max(interiors, 0)), G.front());
    std::vector<std::size_t> choice(labels.size(), 0);
    while (true) {
      for (std::size_t m = 0; m < labels.size(); ++m) labels[m] = G[choice[m]];
      auto comp_label = [&](int comp) { return comp == 0 ? q : labels[comp - 1]; };
      bool ok = true;
      std::vector<std::size_t> touched;
      for (std::size_t r = 0; r < ring.size(); ++r) {
        if (in_p[ring[r]]) continue;
        label[ring[r]] = comp_label(ring_comp[r]);
        touched.push_back(ring[r]);
      }
      for (std::size_t r = 0; r < ring.size() && ok; ++r) {
        const std::size_t c = ring[r];
        if (in_p[c]) continue;
        bool meets = false;
        for (auto off : cube)
          if (in_p[static_cast<std::int64_t>(c) + off]) {
            meets = true;
            break;
          }
        if (!meets) continue;
        for (auto off : cube) {
          const auto u = static_cast<std::size_t>(static_cast<std::int64_t>(c) + off);
          if (in_p[u]) {
            if (forced[u] != -1 && forced[u] != label[c]) ok = false;
            forced[u] = label[c];
          } else if (label[u] != -1 && label[u] != label[c]) {
            ok = false;
          }
        }
      }
      if (ok) {
        std::vector<std::size_t> free;
        for (auto i : p)
          if (forced[i] == -1) free.push_back(i);
        // Paint the complement: labels near the animal, interiors beyond.
        for (std::size_t j = 0; j < lc.box.size(); ++j)
          if (lc.component[j] > 0) spins[lc.box[j]] = comp_label(lc.component[j]);
        for (auto i : p)
          if (forced[i] != -1) spins[i] = static_cast<Spin>(forced[i]);
        terms.instances_meeting(p, inst);
        std::vector<Spin> digits(free.size(), 0);
        while (true) {
          if (++patterns > pattern_cap) throw Error(errc::kCapExceeded, "contour pattern cap exceeded");
          for (std::size_t j = 0; j < free.size(); ++j) spins[free[j]] = digits[j];
          bool valid = true;
          for (auto i : p) {
            const Spin v = spins[i];
            bool correct = is_ground[v] != 0;
            if (correct)
              for (auto off : cube)
                if (spins[static_cast<std::int64_t>(i) + off] != v) {
                  correct = false;
                  break;
                }
            if (correct) {
              valid = false;
              break;
            }
          }
          if (valid)
            for (const auto& [t, a] : inst)
              if (terms.value(t, a, spins.data()) == TermTable::kInfinite) {
                valid = false;
                break;
              }
          if (valid) {
            Contour c;
            c.sign = q;
            for (auto i : p) {
              c.support.push_back(grid.site(i));
              c.pattern.push_back(spins[i]);
            }
            for (int m = 1; m < lc.count; ++m) {
              InteriorComponent comp;
              comp.label = labels[m - 1];
              for (std::size_t j = 0; j < lc.box.size(); ++j)
                if (lc.component[j] == m) comp.sites.push_back(grid.site(lc.box[j]));
              c.interior.push_back(std::move(comp));
            }
            out.push_back(std::move(c));
          }
          std::size_t j = 0;
          while (j < digits.size() && ++digits[j] == S) digits[j++] = 0;
          if (j == digits.size()) break;
        }
        for (std::size_t j = 0; j < lc.box.size(); ++j) spins[lc.box[j]] = q;
        for (auto i : p) spins[i] = q;
      }
      for (auto i : p) forced[i] = -1;
      for (auto t : touched) label[t] = -1;
      std::size_t m = 0;
      while (m < choice.size() && ++choice[m] == G.size()) choice[m++] = 0;
      if (m == choice.size()) break;
    }
    for (auto i : p) in_p[i] = 0;
    return true;
  });
  std::sort(out.begin(), out.end());
  return out;
}

PeierlsReport peierls_estimate(const ContourContext& ctx, int kmax) {
  PeierlsReport r;
  r.kmax = kmax;
  r.by_size.assign(static_cast<std::size_t>(std::max(kmax, 0)) + 1, 0);
  const double log_s = std::log(static_cast<double>(ctx.model.num_spins()));
  for (Spin q : ctx.ground) {
    const auto contours = enumerate_contours(ctx, q, kmax, Site{});
    std::map<std::vector<Site>, std::uint64_t> per_support;
    for (const auto& c : contours) {
      ++r.contours;
      ++r.by_size[c.support.size()];
      ++per_support[c.support];
      const Rational phi = contour_energy(ctx, c);
      const Rational density = phi / static_cast<std::int64_t>(c.support.size());
      if (!r.tau || density < *r.tau) {
        r.tau = density;
        r.witness = c;
        r.witness_energy = phi;
      }
    }
    for (const auto& [support, count] : per_support) {
      const double bound = static_cast<double>(support.size()) * log_s;
      if (std::log(static_cast<double>(count)) > bound + 1e-12) r.entropy_bound_holds = false;
      r.supports.push_back(SupportCount{support, count, bound});
    }
  }
  return r;
}

}  // namespace pst
