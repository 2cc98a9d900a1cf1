#include "pst/frame.hpp"

#include "pst/error.hpp"
#include "pst/local_energy.hpp"

namespace pst {

TermTable::TermTable(const Model& m, const BoxGrid& grid) : grid_(grid), scale_(energy_scale(m)) {
  if (m.num_offsets() != 1) throw Error(errc::kInvalidInput, "dense frames need a single-offset model; reduce first");
  const int d = grid.dimension();
  const std::size_t q = m.num_spins();
  for (const auto& src : m.terms) {
    Term t;
    const std::size_t w = src.support.size();
    t.strides.assign(w, 1);
    for (std::size_t j = w; j-- > 1;) t.strides[j - 1] = t.strides[j] * static_cast<std::uint32_t>(q);
    for (const auto& a : src.support) {
      std::int64_t delta = 0;
      for (int i = 0; i < d; ++i) delta += grid.stride(i) * a.t[i];
      t.deltas.push_back(delta);
    }
    for (const auto& v : src.values)
      t.table.push_back(v.is_infinite() ? kInfinite : v.value().numerator() * (scale_ / v.value().denominator()));
    for (std::size_t s = 0; s < q; ++s) {
      std::uint32_t code = 0;
      for (std::size_t j = 0; j < w; ++j) code += t.strides[j] * static_cast<std::uint32_t>(s);
      t.constant.push_back(t.table[code]);
    }
    t.fits.assign(grid.size(), 0);
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
      const Cell c = grid.cell(idx);
      bool ok = true;
      for (const auto& a : src.support) {
        Cell x = c;
        for (int i = 0; i < d; ++i) x[i] += a.t[i];
        if (!grid.inside(x)) {
          ok = false;
          break;
        }
      }
      t.fits[idx] = ok;
    }
    terms_.push_back(std::move(t));
  }
  stamp_.assign(terms_.size() * grid.size(), 0);
}

void TermTable::instances_meeting(std::span<const std::size_t> sites,
                                  std::vector<std::pair<std::uint32_t, std::uint32_t>>& out) const {
  out.clear();
  if (++generation_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    generation_ = 1;
  }
  const auto n = static_cast<std::int64_t>(grid_.size());
  for (std::size_t ti = 0; ti < terms_.size(); ++ti) {
    const Term& t = terms_[ti];
    for (std::size_t s : sites)
      for (std::int64_t delta : t.deltas) {
        const std::int64_t a = static_cast<std::int64_t>(s) - delta;
        if (a < 0 || a >= n || !t.fits[a]) continue;
        auto& st = stamp_[ti * grid_.size() + a];
        if (st == generation_) continue;
        // A fitting anchor whose index lands on s through this delta really reads s.
        st = generation_;
        out.emplace_back(static_cast<std::uint32_t>(ti), static_cast<std::uint32_t>(a));
      }
  }
}

}  // namespace pst
