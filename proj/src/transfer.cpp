#include "pst/transfer.hpp"

#include <unordered_map>

#include "pst/error.hpp"
#include "pst/local_energy.hpp"

namespace pst {

namespace {

constexpr std::size_t kMaxStates = 1u << 12;

}  // namespace

TransferMatrix TransferMatrix::torus(const Model& m, int rows, int cols, const Rational& beta) {
  if (rows < 2 || cols < 2) throw Error(errc::kInvalidInput, "transfer-matrix torus needs periods of at least 2");
  return TransferMatrix(m, rows, cols, beta, true, nullptr);
}

TransferMatrix TransferMatrix::box(const Model& m, int rows, int cols, const PeriodicPattern& bc, const Rational& beta) {
  if (rows < 1 || cols < 1) throw Error(errc::kInvalidInput, "box sides must be positive");
  return TransferMatrix(m, rows, cols, beta, false, &bc);
}

TransferMatrix::TransferMatrix(const Model& m, int rows, int cols, const Rational& beta, bool torus,
                               const PeriodicPattern* bc)
    : model_(m), beta_(beta), rows_(rows), cols_(cols), torus_(torus) {
  m.validate();
  if (m.dimension() != 2 || m.num_offsets() != 1)
    throw Error(errc::kInvalidInput, "transfer matrices need a two-dimensional single-offset model");
  if (beta < Rational(0)) throw Error(errc::kInvalidInput, "beta must be nonnegative");
  if (bc) bc_ = *bc;
  const std::size_t S = m.num_spins();
  states_ = 1;
  for (int c = 0; c < cols; ++c) {
    states_ *= S;
    if (states_ > kMaxStates) throw Error(errc::kCapExceeded, "transfer-matrix row space too large");
  }
  digits_.assign(states_ * cols, 0);
  for (std::size_t a = 0; a < states_; ++a) {
    std::size_t v = a;
    for (int c = cols; c-- > 0;) {
      digits_[a * cols + c] = static_cast<Spin>(v % S);
      v /= S;
    }
  }
  scale_ = energy_scale(m);
  for (const auto& term : m.terms) {
    std::vector<std::int64_t> table;
    for (const auto& v : term.values)
      table.push_back(v.is_infinite() ? LocalEnergy::kInfinite
                                      : v.value().numerator() * (scale_ / v.value().denominator()));
    tables_.push_back(std::move(table));
  }
}

std::vector<Real> TransferMatrix::edge(int x, std::size_t& na, std::size_t& nb) const {
  const std::size_t S = model_.num_spins();
  const bool a_fixed = !torus_ && x < 0;
  const bool b_fixed = !torus_ && x + 1 >= rows_;
  na = a_fixed ? 1 : states_;
  nb = b_fixed ? 1 : states_;

  // A read slot: 0 = row x, 1 = row x+1, 2 = boundary spin.
  struct Read {
    int slot;
    int col;
    Spin fixed;
  };
  struct Instance {
    std::size_t term;
    std::vector<Read> reads;
  };
  std::vector<Instance> instances;
  const int ylo = torus_ ? 0 : -1;
  for (int y = ylo; y < cols_; ++y)
    for (std::size_t ti = 0; ti < model_.terms.size(); ++ti) {
      Instance inst{ti, {}};
      bool meets = torus_;
      for (const auto& s : model_.terms[ti].support) {
        const int r = x + s.t[0];
        int c = y + s.t[1];
        if (torus_) c %= cols_;
        const bool in_box = torus_ || (r >= 0 && r < rows_ && c >= 0 && c < cols_);
        if (in_box) {
          meets = true;
          inst.reads.push_back(Read{s.t[0], c, 0});
        } else {
          inst.reads.push_back(Read{2, 0, bc_.at(Site{Cell{r, c}, 0}, 2, 1)});
        }
      }
      if (meets) instances.push_back(std::move(inst));
    }
  // Boundary rows are read from the pattern.
  auto row_spin = [&](int slot, std::size_t state, int col) -> Spin {
    const bool fixed = slot == 0 ? a_fixed : b_fixed;
    if (fixed) return bc_.at(Site{Cell{x + slot, col}, 0}, 2, 1);
    return digits_[state * cols_ + col];
  };

  std::unordered_map<std::int64_t, Real> weights;
  std::vector<Real> out(na * nb);
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t b = 0; b < nb; ++b) {
      std::int64_t e = 0;
      bool finite = true;
      for (const auto& inst : instances) {
        std::size_t code = 0;
        for (const auto& rd : inst.reads) {
          const Spin v = rd.slot == 2 ? rd.fixed : row_spin(rd.slot, rd.slot == 0 ? a : b, rd.col);
          code = code * S + v;
        }
        const std::int64_t t = tables_[inst.term][code];
        if (t == LocalEnergy::kInfinite) {
          finite = false;
          break;
        }
        e += t;
      }
      if (!finite) continue;
      auto it = weights.find(e);
      if (it == weights.end()) it = weights.emplace(e, boltzmann(beta_, e, scale_)).first;
      out[a * nb + b] = it->second;
    }
  return out;
}

std::vector<Real> TransferMatrix::power(const std::vector<Real>& t, int exponent) const {
  const std::size_t n = states_;
  auto multiply = [n](const std::vector<Real>& p, const std::vector<Real>& q) {
    std::vector<Real> r(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        const Real& pik = p[i * n + k];
        if (pik == 0) continue;
        for (std::size_t j = 0; j < n; ++j) r[i * n + j] += pik * q[k * n + j];
      }
    return r;
  };
  std::vector<Real> result;
  std::vector<Real> base = t;
  bool first = true;
  while (exponent > 0) {
    if (exponent & 1) {
      result = first ? base : multiply(result, base);
      first = false;
    }
    exponent >>= 1;
    if (exponent > 0) base = multiply(base, base);
  }
  return result;
}

void TransferMatrix::propagate() const {
  if (z_ >= 0) return;
  if (torus_) {
    std::size_t na = 0, nb = 0;
    const std::vector<Real> p = power(edge(0, na, nb), rows_);
    left_.assign(1, std::vector<Real>(states_));
    z_ = 0;
    for (std::size_t a = 0; a < states_; ++a) {
      left_[0][a] = p[a * states_ + a];
      z_ += left_[0][a];
    }
    return;
  }
  std::vector<std::vector<Real>> edges;
  std::vector<std::pair<std::size_t, std::size_t>> dims;
  for (int x = -1; x < rows_; ++x) {
    std::size_t na = 0, nb = 0;
    edges.push_back(edge(x, na, nb));
    dims.emplace_back(na, nb);
  }
  // edges[x + 1] joins rows x and x + 1.
  left_.assign(rows_, {});
  right_.assign(rows_, {});
  left_[0] = edges[0];
  for (int x = 0; x + 1 < rows_; ++x) {
    const auto& e = edges[x + 1];
    std::vector<Real> next(states_);
    for (std::size_t a = 0; a < states_; ++a) {
      const Real& la = left_[x][a];
      if (la == 0) continue;
      for (std::size_t b = 0; b < states_; ++b) next[b] += la * e[a * states_ + b];
    }
    left_[x + 1] = std::move(next);
  }
  right_[rows_ - 1] = edges[rows_];
  for (int x = rows_ - 2; x >= 0; --x) {
    const auto& e = edges[x + 1];
    std::vector<Real> prev(states_);
    for (std::size_t a = 0; a < states_; ++a) {
      Real s = 0;
      for (std::size_t b = 0; b < states_; ++b) s += e[a * states_ + b] * right_[x + 1][b];
      prev[a] = s;
    }
    right_[x] = std::move(prev);
  }
  z_ = 0;
  for (std::size_t a = 0; a < states_; ++a) z_ += left_[rows_ - 1][a] * right_[rows_ - 1][a];
}

Real TransferMatrix::log_partition() const {
  propagate();
  if (z_ == 0) return -std::numeric_limits<Real>::infinity();
  return log(z_);
}

std::vector<Real> TransferMatrix::row_marginal(int row) const {
  if (row < 0 || row >= rows_) throw Error(errc::kInvalidInput, "row out of range");
  propagate();
  if (z_ == 0) throw Error(errc::kInadmissible, "no admissible configuration");
  std::vector<Real> p(states_);
  for (std::size_t a = 0; a < states_; ++a)
    p[a] = torus_ ? left_[0][a] / z_ : left_[row][a] * right_[row][a] / z_;
  return p;
}

}  // namespace pst
