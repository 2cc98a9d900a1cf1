#include "pst/local_energy.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace pst {

std::int64_t energy_scale(const Model& m) {
  std::int64_t scale = 1;
  for (const auto& term : m.terms)
    for (const auto& v : term.values)
      if (v.is_finite()) scale = std::lcm(scale, v.value().denominator());
  return scale;
}

LocalEnergy::LocalEnergy(const Model& m, const Region& region, const BoundaryCondition& bc)
    : num_sites_(region.size()), num_spins_(m.num_spins()), scale_(energy_scale(m)) {
  const int d = m.dimension();
  if (region.dimension() != d) throw Error(errc::kInvalidInput, "region dimension does not match the model");
  if (region.num_offsets() != m.num_offsets())
    throw Error(errc::kInvalidInput, "region offsets do not match the model's point set");
  const bool free = std::holds_alternative<FreeBc>(bc);
  if (region.is_torus() && !free) throw Error(errc::kInvalidInput, "a torus takes free boundary conditions only");

  for (const auto& term : m.terms) {
    std::vector<std::int64_t> table(term.values.size());
    for (std::size_t i = 0; i < table.size(); ++i) {
      const Energy& v = term.values[i];
      table[i] = v.is_infinite() ? kInfinite : v.value().numerator() * (scale_ / v.value().denominator());
    }
    tables_.push_back(std::move(table));
  }

  std::set<Site> missing;
  std::set<std::pair<std::uint32_t, Cell>> seen;
  for (std::uint32_t ti = 0; ti < m.terms.size(); ++ti) {
    const auto& support = m.terms[ti].support;
    const std::size_t width = support.size();
    std::vector<std::uint32_t> strides(width, 1);
    for (std::size_t j = width; j-- > 1;) strides[j - 1] = strides[j] * static_cast<std::uint32_t>(num_spins_);
    for (const auto& x : region.sites()) {
      for (const auto& a : support) {
        if (a.k != x.k) continue;
        Site anchor{x.t, 0};
        for (int i = 0; i < d; ++i) anchor.t[i] -= a.t[i];
        anchor = region.wrap(anchor);
        if (!seen.insert({ti, anchor.t}).second) continue;

        Instance inst;
        inst.table = ti;
        bool keep = true;
        for (std::size_t j = 0; j < width; ++j) {
          Site s{anchor.t, support[j].k};
          for (int i = 0; i < d; ++i) s.t[i] += support[j].t[i];
          if (auto idx = region.index_of(s)) {
            inst.vars.emplace_back(static_cast<std::uint32_t>(*idx), strides[j]);
            continue;
          }
          if (free) {
            keep = false;
            break;
          }
          Spin outside = 0;
          if (const auto* p = std::get_if<PeriodicPattern>(&bc)) {
            outside = p->at(s, d, m.num_offsets());
          } else {
            const auto& ex = std::get<ExplicitBc>(bc).spins;
            auto it = ex.find(s);
            if (it == ex.end()) {
              missing.insert(s);
              continue;
            }
            outside = it->second;
          }
          inst.base += strides[j] * outside;
        }
        if (keep) instances_.push_back(std::move(inst));
      }
    }
  }
  if (!missing.empty()) {
    std::ostringstream os;
    os << "boundary condition does not cover " << missing.size() << " site(s):";
    int shown = 0;
    for (const auto& s : missing) {
      if (++shown > 8) {
        os << " ...";
        break;
      }
      os << " (";
      for (int i = 0; i < d; ++i) os << (i ? "," : "") << s.t[i];
      os << ";" << s.k << ")";
    }
    throw Error(errc::kMissingBoundary, os.str());
  }

  closing_.assign(std::max<std::size_t>(num_sites_, 1), {});
  for (std::uint32_t id = 0; id < instances_.size(); ++id) {
    std::uint32_t last = 0;
    for (const auto& v : instances_[id].vars) last = std::max(last, v.first);
    closing_[last].push_back(id);
  }
}

std::int64_t LocalEnergy::scaled(std::span<const Spin> spins) const {
  if (spins.size() != num_sites_) throw Error(errc::kInvalidInput, "configuration size does not match the region");
  std::int64_t e = 0;
  for (std::size_t i = 0; i < num_sites_; ++i) {
    const std::int64_t c = close(i, spins.data());
    if (c == kInfinite) return kInfinite;
    e += c;
  }
  return e;
}

Energy LocalEnergy::energy(std::span<const Spin> spins) const {
  const std::int64_t e = scaled(spins);
  if (e == kInfinite) return Energy::infinite();
  return Energy(to_rational(e));
}

void LocalEnergy::cap_exceeded(std::uint64_t cap) const {
  std::ostringstream os;
  os << "enumeration cap " << cap << " exceeded (at most " << num_spins_ << "^" << num_sites_
     << " configurations)";
  throw Error(errc::kCapExceeded, os.str());
}

}  // namespace pst
