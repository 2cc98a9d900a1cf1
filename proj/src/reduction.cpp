#include "pst/reduction.hpp"

#include <numeric>
#include <sstream>

#include "pst/error.hpp"
#include "pst/local_energy.hpp"

namespace pst {

namespace {

Cell cube_extent(int side, int dimension) {
  Cell c{};
  for (int i = 0; i < dimension; ++i) c[i] = side;
  return c;
}

std::int32_t floor_div(std::int32_t a, std::int32_t b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

Site block_of(const Site& s, int l, int d) {
  Site b;
  for (int i = 0; i < d; ++i) b.t[i] = floor_div(s.t[i], l);
  return b;
}

// Position of a source site inside its block pattern.
std::size_t offset_in_block(const Site& s, int l, int d, int K) {
  std::size_t idx = 0;
  for (int i = 0; i < d; ++i) idx = idx * l + static_cast<std::size_t>(s.t[i] - l * floor_div(s.t[i], l));
  return idx * K + s.k;
}

}  // namespace

std::vector<Site> BlockCode::block_sites(const Cell& b) const {
  const int d = source.dimension();
  Cell lo{};
  for (int i = 0; i < d; ++i) lo[i] = b[i] * l;
  return Region::box(d, lo, cube_extent(l, d), source.num_offsets()).sites();
}

std::optional<Spin> BlockCode::encode(std::span<const Spin> block) const {
  auto it = index.find(std::vector<Spin>(block.begin(), block.end()));
  if (it == index.end()) return std::nullopt;
  return it->second;
}

int choose_block(const Model& m, const std::vector<PeriodicState>& gs) {
  if (gs.empty()) throw Error(errc::kInvalidInput, "no ground states to fit into a block");
  int l = 1;
  for (const auto& s : gs) l = std::lcm(l, s.period());
  const int r = m.radius();
  const int base = l;
  while (l <= r) l += base;
  return l;
}

BlockCode block_reduce(const Model& m, int l) {
  if (l < 1) throw Error(errc::kInvalidInput, "block size must be positive");
  m.validate();
  const int d = m.dimension();
  const int K = m.num_offsets();
  BlockCode code;
  code.l = l;
  code.source = m;

  // Target spins: admissible block patterns, in lexicographic order.
  const Region block = Region::box(d, Cell{}, cube_extent(l, d), K);
  LocalEnergy inside(m, block, FreeBc{});
  std::vector<std::string> symbols;
  inside.for_each_admissible(std::uint64_t{1} << 16, [&](std::span<const Spin> s, std::int64_t) {
    code.index.emplace(std::vector<Spin>(s.begin(), s.end()), static_cast<Spin>(code.blocks.size()));
    code.blocks.emplace_back(s.begin(), s.end());
    std::string sym = "[";
    for (std::size_t i = 0; i < s.size(); ++i) sym += (i ? "," : "") + m.spins.symbol(s[i]);
    symbols.push_back(sym + "]");
  });
  if (code.blocks.empty()) throw Error(errc::kRichness, "no admissible block pattern: the target spin space is empty");

  // Each translated source term goes to the target term anchored at the
  // componentwise-minimal block it touches, keyed by the set of touched blocks.
  struct Piece {
    std::size_t term;
    Site anchor;  // inside block 0
  };
  std::map<std::vector<Site>, std::vector<Piece>> by_support;
  for (std::size_t ti = 0; ti < m.terms.size(); ++ti)
    for (const auto& a : Region::box(d, Cell{}, cube_extent(l, d)).sites()) {
      std::vector<Site> touched;
      for (const auto& s : m.terms[ti].support) {
        Site x{a.t, 0};
        for (int i = 0; i < d; ++i) x.t[i] += s.t[i];
        touched.push_back(block_of(x, l, d));
      }
      std::sort(touched.begin(), touched.end());
      touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
      by_support[touched].push_back(Piece{ti, a});
    }

  Model& t = code.target;
  t.name = m.name + "-block" + std::to_string(l);
  t.geometry = PointSet::cubic(d);
  t.spins = SpinSpace(symbols);
  t.collar = (m.richness_collar() + l - 1) / l;
  const std::size_t q = code.blocks.size();
  for (const auto& [support, pieces] : by_support) {
    std::size_t size = 1;
    for (std::size_t j = 0; j < support.size(); ++j) {
      size *= q;
      if (size > (std::size_t{1} << 24)) throw Error(errc::kCapExceeded, "target value table too large");
    }
    InteractionTerm term{support, std::vector<Energy>(size, Energy(0))};
    std::vector<Spin> pattern(support.size(), 0);
    std::vector<Spin> local;
    for (std::size_t idx = 0; idx < size; ++idx) {
      std::size_t rest = idx;
      for (std::size_t j = support.size(); j-- > 0;) {
        pattern[j] = static_cast<Spin>(rest % q);
        rest /= q;
      }
      Energy e(0);
      for (const auto& piece : pieces) {
        const auto& src = m.terms[piece.term];
        local.clear();
        for (const auto& s : src.support) {
          Site x{piece.anchor.t, s.k};
          for (int i = 0; i < d; ++i) x.t[i] += s.t[i];
          const Site b = block_of(x, l, d);
          const auto j = std::lower_bound(support.begin(), support.end(), b) - support.begin();
          local.push_back(code.blocks[pattern[j]][offset_in_block(x, l, d, K)]);
        }
        e += src(local, m.num_spins());
        if (e.is_infinite()) break;
      }
      term.values[idx] = e;
    }
    t.terms.push_back(std::move(term));
  }
  t.validate();
  return code;
}

namespace {

BoundaryCondition lift_bc(const BlockCode& code, const BoundaryCondition& bc) {
  const int d = code.source.dimension();
  const int K = code.source.num_offsets();
  const int l = code.l;
  if (std::holds_alternative<FreeBc>(bc)) return FreeBc{};
  if (const auto* p = std::get_if<PeriodicPattern>(&bc)) {
    const int big = std::lcm(p->period, l);
    const int tp = big / l;
    PeriodicPattern out{tp, {}};
    for (const auto& b : Region::box(d, Cell{}, cube_extent(tp, d)).sites()) {
      std::vector<Spin> block;
      for (const auto& s : code.block_sites(b.t)) block.push_back(p->at(s, d, K));
      auto spin = code.encode(block);
      if (!spin) throw Error(errc::kInadmissible, "boundary pattern has an inadmissible block");
      out.spins.push_back(*spin);
    }
    return out;
  }
  const auto& ex = std::get<ExplicitBc>(bc).spins;
  std::map<Site, std::vector<Spin>> partial;
  for (const auto& [s, v] : ex) partial[block_of(s, l, d)];
  ExplicitBc out;
  for (auto& [b, unused] : partial) {
    std::vector<Spin> block;
    for (const auto& s : code.block_sites(b.t)) {
      auto it = ex.find(s);
      if (it == ex.end()) throw Error(errc::kMisaligned, "explicit boundary condition does not fill whole blocks");
      block.push_back(it->second);
    }
    auto spin = code.encode(block);
    if (!spin) throw Error(errc::kInadmissible, "boundary condition has an inadmissible block");
    out.spins[b] = *spin;
  }
  return out;
}

BoundaryCondition project_bc(const BlockCode& code, const BoundaryCondition& bc) {
  const int d = code.source.dimension();
  const int K = code.source.num_offsets();
  const int l = code.l;
  if (std::holds_alternative<FreeBc>(bc)) return FreeBc{};
  if (const auto* p = std::get_if<PeriodicPattern>(&bc)) {
    PeriodicPattern out{p->period * l, {}};
    for (const auto& s : Region::box(d, Cell{}, cube_extent(out.period, d), K).sites())
      out.spins.push_back(code.blocks.at(p->at(block_of(s, l, d), d, 1))[offset_in_block(s, l, d, K)]);
    return out;
  }
  ExplicitBc out;
  for (const auto& [b, v] : std::get<ExplicitBc>(bc).spins) {
    const auto sites = code.block_sites(b.t);
    for (std::size_t i = 0; i < sites.size(); ++i) out.spins[sites[i]] = code.blocks.at(v)[i];
  }
  return out;
}

}  // namespace

Configuration lift(const BlockCode& code, const Configuration& source) {
  const int d = code.source.dimension();
  const int K = code.source.num_offsets();
  const int l = code.l;
  const Region& r = source.region;
  if (r.dimension() != d || r.num_offsets() != K) throw Error(errc::kInvalidInput, "region does not match the model");
  Periods periods;
  if (r.is_torus()) {
    Cell p{};
    for (int i = 0; i < d; ++i) {
      if ((*r.periods())[i] % l != 0) throw Error(errc::kMisaligned, "torus periods are not multiples of the block size");
      p[i] = (*r.periods())[i] / l;
    }
    periods = p;
  }
  std::map<Site, std::vector<Spin>> blocks;
  for (const auto& s : r.sites()) blocks[block_of(s, l, d)];
  std::vector<Site> target_sites;
  std::vector<Spin> spins;
  for (auto& [b, pattern] : blocks) {
    for (const auto& s : code.block_sites(b.t)) {
      auto idx = r.index_of(s);
      if (!idx) throw Error(errc::kMisaligned, "region is not a union of whole blocks");
      pattern.push_back(source.spins.at(*idx));
    }
    auto spin = code.encode(pattern);
    if (!spin) throw Error(errc::kInadmissible, "configuration contains an inadmissible block");
    target_sites.push_back(b);
    spins.push_back(*spin);
  }
  Region target(d, target_sites, periods, 1);
  // Region sorts its sites; blocks came out of a std::map so the order already matches.
  return Configuration{std::move(target), std::move(spins), lift_bc(code, source.bc)};
}

Configuration project(const BlockCode& code, const Configuration& target) {
  const int d = code.source.dimension();
  const int K = code.source.num_offsets();
  const Region& r = target.region;
  Periods periods;
  if (r.is_torus()) {
    Cell p{};
    for (int i = 0; i < d; ++i) p[i] = (*r.periods())[i] * code.l;
    periods = p;
  }
  std::map<Site, Spin> spins;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const auto sites = code.block_sites(r.sites()[i].t);
    const auto& pattern = code.blocks.at(target.spins[i]);
    for (std::size_t j = 0; j < sites.size(); ++j) spins[sites[j]] = pattern[j];
  }
  std::vector<Site> sites;
  std::vector<Spin> values;
  for (const auto& [s, v] : spins) {
    sites.push_back(s);
    values.push_back(v);
  }
  return Configuration{Region(d, sites, periods, K), std::move(values), project_bc(code, target.bc)};
}

PeriodicState lift_state(const BlockCode& code, const PeriodicState& source) {
  const auto bc = lift_bc(code, source.pattern);
  return make_state(code.target, std::get<PeriodicPattern>(bc));
}

}  // namespace pst
