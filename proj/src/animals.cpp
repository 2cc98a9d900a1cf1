#include "pst/animals.hpp"

#include "pst/error.hpp"

namespace pst {

AnimalEnumerator::AnimalEnumerator(int dimension, int num_offsets, int max_size, Connectivity c)
    : dimension_(dimension), num_offsets_(num_offsets), max_size_(max_size) {
  if (max_size < 1) throw Error(errc::kInvalidInput, "animal size must be positive");
  for (int i = 0; i < dimension; ++i) {
    extent_[i] = 2 * max_size + 1;
    cell_count_ *= extent_[i];
  }
  Cell delta{};
  for (int i = 0; i < dimension; ++i) delta[i] = -1;
  while (true) {
    const std::int64_t norm = cell_norm(delta, dimension);
    const bool ok = c == Connectivity::kLinfty || norm <= 1;
    if (ok)
      for (int k = 0; k < num_offsets; ++k) {
        delta_cells_.push_back(delta);
        delta_k_.push_back(k);
      }
    int axis = dimension - 1;
    while (axis >= 0) {
      if (++delta[axis] <= 1) break;
      delta[axis] = -1;
      --axis;
    }
    if (axis < 0) break;
  }
}

void AnimalEnumerator::run(const Site& anchor, const std::function<bool(std::span<const Site>)>& visit) const {
  const int d = dimension_;
  const int K = num_offsets_;
  // Dense window centred on the anchor; an animal of size n stays within distance n-1.
  auto index = [&](const Site& s) {
    std::int64_t idx = 0;
    for (int i = 0; i < d; ++i) idx = idx * extent_[i] + (s.t[i] - anchor.t[i] + max_size_);
    return idx * K + s.k;
  };
  auto inside = [&](const Site& s) {
    for (int i = 0; i < d; ++i) {
      const std::int32_t r = s.t[i] - anchor.t[i];
      if (r < -max_size_ || r > max_size_) return false;
    }
    return true;
  };
  const std::int64_t anchor_index = index(anchor);
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(cell_count_ * K), 0);
  std::vector<Site> animal;
  animal.reserve(max_size_);

  std::function<void(std::vector<Site>)> grow = [&](std::vector<Site> untried) {
    while (!untried.empty()) {
      const Site v = untried.back();
      untried.pop_back();
      animal.push_back(v);
      const bool go_on = visit(animal);
      if (go_on && static_cast<int>(animal.size()) < max_size_) {
        std::vector<Site> next = untried;
        std::vector<std::int64_t> marked;
        for (std::size_t j = 0; j < delta_cells_.size(); ++j) {
          Site w{v.t, delta_k_[j]};
          for (int i = 0; i < d; ++i) w.t[i] += delta_cells_[j][i];
          if (w == v || !inside(w)) continue;
          const std::int64_t wi = index(w);
          if (wi <= anchor_index || seen[wi]) continue;
          seen[wi] = 1;
          marked.push_back(wi);
          next.push_back(w);
        }
        grow(std::move(next));
        for (auto wi : marked) seen[wi] = 0;
      }
      animal.pop_back();
    }
  };
  seen[anchor_index] = 1;
  grow({anchor});
}

std::uint64_t AnimalEnumerator::count(const Site& anchor, int size) const {
  std::uint64_t n = 0;
  run(anchor, [&](std::span<const Site> a) {
    if (static_cast<int>(a.size()) == size) ++n;
    return true;
  });
  return n;
}

}  // namespace pst
