#include "pst/model.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_set>

#include "pst/error.hpp"
#include "pst/local_energy.hpp"

namespace pst {

SpinSpace::SpinSpace(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  if (symbols_.empty()) throw Error(errc::kInvalidInput, "spin space must be nonempty");
  std::set<std::string> seen;
  for (const auto& s : symbols_) {
    if (s.empty()) throw Error(errc::kInvalidInput, "empty spin symbol");
    if (!seen.insert(s).second) throw Error(errc::kInvalidInput, "duplicate spin symbol '" + s + "'");
  }
  if (symbols_.size() > 0xffff) throw Error(errc::kInvalidInput, "spin space too large");
}

std::optional<Spin> SpinSpace::find(std::string_view symbol) const {
  for (std::size_t i = 0; i < symbols_.size(); ++i)
    if (symbols_[i] == symbol) return static_cast<Spin>(i);
  return std::nullopt;
}

Spin SpinSpace::index_of(std::string_view symbol) const {
  if (auto s = find(symbol)) return *s;
  throw Error(errc::kInvalidInput, "unknown spin symbol '" + std::string(symbol) + "'");
}

std::size_t InteractionTerm::index(std::span<const Spin> pattern, std::size_t num_spins) const {
  if (pattern.size() != support.size()) throw Error(errc::kInvalidInput, "pattern size does not match the support");
  std::size_t code = 0;
  for (Spin s : pattern) {
    if (s >= num_spins) throw Error(errc::kInvalidInput, "spin index out of range");
    code = code * num_spins + s;
  }
  return code;
}

int Model::radius() const {
  std::int64_t r = 0;
  for (const auto& term : terms)
    for (const auto& a : term.support)
      for (const auto& b : term.support) r = std::max(r, distance(a, b, dimension()));
  return static_cast<int>(r);
}

void Model::validate() const {
  const int d = dimension();
  if (spins.size() == 0) throw Error(errc::kInvalidInput, "model has no spins");
  if (collar && *collar < 0) throw Error(errc::kInvalidInput, "richness collar must be nonnegative");
  for (std::size_t ti = 0; ti < terms.size(); ++ti) {
    const auto& term = terms[ti];
    const std::string where = "term " + std::to_string(ti + 1);
    if (term.support.empty()) throw Error(errc::kInvalidInput, where + ": empty support");
    std::set<Site> seen;
    for (const auto& s : term.support) {
      if (s.k < 0 || s.k >= num_offsets()) throw Error(errc::kInvalidInput, where + ": offset index out of range");
      for (int i = 0; i < kMaxDim; ++i) {
        const bool ok = i < d ? (s.t[i] == 0 || s.t[i] == 1) : s.t[i] == 0;
        if (!ok) throw Error(errc::kInvalidInput, where + ": support site outside the unit cell cube");
      }
      if (!seen.insert(s).second) throw Error(errc::kInvalidInput, where + ": repeated support site");
    }
    double size = 1;
    for (std::size_t j = 0; j < term.support.size(); ++j) size *= static_cast<double>(spins.size());
    if (size > 1e8) throw Error(errc::kInvalidInput, where + ": value table too large");
    if (term.values.size() != static_cast<std::size_t>(size))
      throw Error(errc::kInvalidInput, where + ": value table is not total over all spin patterns");
  }
}

// ---------------------------------------------------------------------------
// Boundary conditions and configurations
// ---------------------------------------------------------------------------

PeriodicPattern PeriodicPattern::constant(Spin s, int dimension, int num_offsets) {
  (void)dimension;
  return PeriodicPattern{1, std::vector<Spin>(static_cast<std::size_t>(num_offsets), s)};
}

Spin PeriodicPattern::at(const Site& s, int dimension, int num_offsets) const {
  std::size_t idx = 0;
  for (int i = 0; i < dimension; ++i) idx = idx * period + static_cast<std::size_t>(((s.t[i] % period) + period) % period);
  return spins.at(idx * num_offsets + s.k);
}

bool PeriodicPattern::is_constant() const {
  return std::adjacent_find(spins.begin(), spins.end(), std::not_equal_to<>()) == spins.end();
}

BoundaryCondition constant_bc(Spin s, const Model& m) {
  if (s >= m.num_spins()) throw Error(errc::kInvalidInput, "boundary spin out of range");
  return PeriodicPattern::constant(s, m.dimension(), m.num_offsets());
}

std::optional<Spin> Configuration::at(const Site& s, const Model& m) const {
  if (auto idx = region.index_of(s)) return spins.at(*idx);
  if (const auto* p = std::get_if<PeriodicPattern>(&bc)) return p->at(s, m.dimension(), m.num_offsets());
  if (const auto* e = std::get_if<ExplicitBc>(&bc)) {
    auto it = e->spins.find(s);
    if (it != e->spins.end()) return it->second;
  }
  return std::nullopt;
}

Energy hamiltonian(const Model& m, const Configuration& c) {
  return LocalEnergy(m, c.region, c.bc).energy(c.spins);
}

bool is_admissible(const Model& m, const Configuration& c) { return hamiltonian(m, c).is_finite(); }

std::vector<Configuration> enumerate_admissible(const Model& m, const Region& region, const BoundaryCondition& bc,
                                                std::uint64_t cap) {
  LocalEnergy local(m, region, bc);
  std::vector<Configuration> out;
  local.for_each_admissible(cap, [&](std::span<const Spin> spins, std::int64_t) {
    out.push_back(Configuration{region, std::vector<Spin>(spins.begin(), spins.end()), bc});
  });
  return out;
}

// ---------------------------------------------------------------------------
// Richness
// ---------------------------------------------------------------------------

namespace {

// Site permutations of a window torus induced by cell translations.
std::vector<std::vector<std::uint32_t>> translations(const Region& torus) {
  const int d = torus.dimension();
  const Cell periods = *torus.periods();
  std::vector<std::vector<std::uint32_t>> out;
  for (const auto& shift : torus.sites()) {
    if (shift.k != 0) continue;
    std::vector<std::uint32_t> perm(torus.size());
    for (std::size_t i = 0; i < torus.size(); ++i) {
      Site s = torus.sites()[i];
      for (int a = 0; a < d; ++a) s.t[a] = (s.t[a] + shift.t[a]) % periods[a];
      perm[i] = static_cast<std::uint32_t>(*torus.index_of(s));
    }
    out.push_back(std::move(perm));
  }
  return out;
}

std::uint64_t permute_mask(std::uint64_t mask, const std::vector<std::uint32_t>& perm) {
  std::uint64_t out = 0;
  for (std::size_t i = 0; i < perm.size(); ++i)
    if (mask >> i & 1u) out |= std::uint64_t{1} << perm[i];
  return out;
}

std::vector<Site> select(const Region& torus, std::uint64_t mask) {
  std::vector<Site> out;
  for (std::size_t i = 0; i < torus.size(); ++i)
    if (mask >> i & 1u) out.push_back(torus.sites()[i]);
  return out;
}

// Admissible configurations of a subset of the window (terms inside the subset only).
std::vector<std::vector<Spin>> local_configurations(const Model& m, const Region& torus, std::uint64_t mask) {
  Region sub(torus.dimension(), select(torus, mask), torus.periods(), torus.num_offsets());
  LocalEnergy local(m, sub, FreeBc{});
  std::vector<std::vector<Spin>> out;
  local.for_each_admissible(std::uint64_t{1} << 24,
                            [&](std::span<const Spin> s, std::int64_t) { out.emplace_back(s.begin(), s.end()); });
  return out;
}

}  // namespace

RichnessVerdict check_richness(const Model& m, int collar, int window, std::uint64_t region_cap) {
  if (collar < 0) throw Error(errc::kInvalidInput, "collar width must be nonnegative");
  if (window < 1) throw Error(errc::kInvalidInput, "window must be positive");
  const int d = m.dimension();
  Cell periods{};
  for (int i = 0; i < d; ++i) periods[i] = window;
  const Region torus = Region::torus(d, periods, m.num_offsets());
  const std::size_t n = torus.size();
  if (n > 63) throw Error(errc::kInvalidInput, "richness window too large (at most 63 sites)");

  RichnessVerdict verdict;
  verdict.collar = collar;
  verdict.window = window;

  int bits = 1;
  while ((std::size_t{1} << bits) < m.num_spins()) ++bits;
  if (bits * n > 64) throw Error(errc::kInvalidInput, "richness window too large for the spin space");
  auto encode = [&](std::span<const Spin> spins, std::span<const std::uint32_t> where) {
    std::uint64_t code = 0;
    for (std::size_t j = 0; j < spins.size(); ++j) code |= std::uint64_t{spins[j]} << (bits * where[j]);
    return code;
  };
  auto field_mask = [&](std::uint64_t sites) {
    std::uint64_t out = 0;
    const std::uint64_t ones = (std::uint64_t{1} << bits) - 1;
    for (std::size_t i = 0; i < n; ++i)
      if (sites >> i & 1u) out |= ones << (bits * i);
    return out;
  };

  // Every admissible configuration of the whole window, encoded.
  std::vector<std::uint64_t> global;
  {
    LocalEnergy whole(m, torus, FreeBc{});
    std::vector<std::uint32_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = static_cast<std::uint32_t>(i);
    whole.for_each_admissible(std::uint64_t{1} << 24,
                              [&](std::span<const Spin> s, std::int64_t) { global.push_back(encode(s, all)); });
  }

  const auto perms = translations(torus);
  const std::uint64_t full = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  const bool dense = bits * n <= 26;
  std::vector<bool> seen_dense(dense ? std::size_t{1} << (bits * n) : 0);
  std::unordered_set<std::uint64_t> seen_sparse;

  for (std::uint64_t lambda = 1; lambda <= full; ++lambda) {
    bool canonical = true;
    for (const auto& p : perms)
      if (permute_mask(lambda, p) < lambda) {
        canonical = false;
        break;
      }
    if (!canonical) continue;
    if (verdict.regions_checked == region_cap) {
      verdict.partial = true;
      break;
    }
    ++verdict.regions_checked;

    const auto inner_sites = select(torus, lambda);
    std::uint64_t near = lambda;
    for (std::size_t i = 0; i < n; ++i) {
      if (lambda >> i & 1u) continue;
      for (const auto& s : inner_sites)
        if (distance(torus.sites()[i], s, d, torus.periods()) <= collar) {
          near |= std::uint64_t{1} << i;
          break;
        }
    }
    const std::uint64_t far = full & ~near;

    const auto inner_configs = local_configurations(m, torus, lambda);
    if (inner_configs.empty()) {
      verdict.witness = RichnessWitness{inner_sites, {}, select(torus, far), {}, true};
      return verdict;
    }
    const auto far_configs = far ? local_configurations(m, torus, far) : std::vector<std::vector<Spin>>{{}};

    const std::uint64_t key_mask = field_mask(lambda | far);
    std::vector<std::uint64_t> touched;
    std::size_t distinct = 0;
    for (std::uint64_t g : global) {
      const std::uint64_t key = g & key_mask;
      if (dense) {
        if (!seen_dense[key]) {
          seen_dense[key] = true;
          touched.push_back(key);
          ++distinct;
        }
      } else if (seen_sparse.insert(key).second) {
        ++distinct;
      }
    }
    auto seen = [&](std::uint64_t key) { return dense ? static_cast<bool>(seen_dense[key]) : seen_sparse.count(key) > 0; };

    if (static_cast<double>(distinct) < static_cast<double>(inner_configs.size()) * far_configs.size()) {
      std::vector<std::uint32_t> inner_idx, far_idx;
      for (std::size_t i = 0; i < n; ++i) {
        if (lambda >> i & 1u) inner_idx.push_back(static_cast<std::uint32_t>(i));
        if (far >> i & 1u) far_idx.push_back(static_cast<std::uint32_t>(i));
      }
      for (const auto& a : inner_configs)
        for (const auto& b : far_configs)
          if (!seen(encode(a, inner_idx) | encode(b, far_idx))) {
            verdict.witness = RichnessWitness{inner_sites, a, select(torus, far), b, false};
            return verdict;
          }
      throw Error(errc::kInconsistent, "richness count mismatch without a missing pair");
    }
    for (std::uint64_t key : touched) seen_dense[key] = false;
    seen_sparse.clear();
  }
  verdict.pass = true;
  return verdict;
}

}  // namespace pst
