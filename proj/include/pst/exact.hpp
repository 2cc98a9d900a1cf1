#pragma once

// Brute-force oracles: partition functions, Gibbs probabilities and the
// volume/boundary bounds, all by exhaustive enumeration of admissible
// configurations with 50-digit accumulation.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "pst/model.hpp"

namespace pst {

using Real = boost::multiprecision::cpp_bin_float_50;

inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 34;

/// Number of admissible configurations per energy, energies in units of 1/scale.
struct EnergyHistogram {
  std::int64_t scale = 1;
  std::map<std::int64_t, std::uint64_t> counts;

  std::uint64_t total() const;
  /// log sum of count * exp(-beta E); -inf when there is no configuration.
  Real log_partition(const Rational& beta) const;
};

/// exp(-beta * scaled / scale) without rounding the exponent first.
Real boltzmann(const Rational& beta, std::int64_t scaled, std::int64_t scale);

/// Uses the on-disk cache when PST_CACHE_DIR is set.
EnergyHistogram energy_histogram(const Model& m, const Region& region, const BoundaryCondition& bc,
                                 std::uint64_t cap = kDefaultEnumerationCap);

struct OracleReport {
  std::string quantity;
  Real value;
  std::string instance;
  std::uint64_t count = 0;  // admissible configurations enumerated
  std::vector<std::string> warnings;
};

/// log Z(region | bc) at inverse temperature beta.
OracleReport z_exact(const Region& region, const BoundaryCondition& bc, const Rational& beta, const Model& m,
                     std::uint64_t cap = kDefaultEnumerationCap);

using Event = std::function<bool(std::span<const Spin>)>;
using Observable = std::function<double(std::span<const Spin>)>;

Real gibbs_probability(const Event& event, const Region& region, const BoundaryCondition& bc, const Rational& beta,
                       const Model& m, std::uint64_t cap = kDefaultEnumerationCap);
Real gibbs_expectation(const Observable& f, const Region& region, const BoundaryCondition& bc, const Rational& beta,
                       const Model& m, std::uint64_t cap = kDefaultEnumerationCap);

struct BoundsRow {
  int side = 0;
  std::size_t volume = 0;
  std::size_t boundary = 0;     // |boundary layer of width 1|
  std::uint64_t conditions = 0; // admissible boundary conditions tried
  Real min_log_z;
  Real max_log_z;
};

struct BoundsReport {
  bool pass = false;
  Rational beta;
  int max_side = 0;
  Real volume_constant;    // min over instances of log Z / |region|
  Real boundary_constant;  // max over regions of |log Z1 - log Z2| / |boundary|
  std::vector<BoundsRow> rows;
  std::optional<std::string> witness;  // instance realising the volume constant
  std::string reason;
};

/// Cubes of side 2n+1..max_side (n the richness collar) with every admissible
/// assignment of the outside sites that terms meeting the cube can read. PASS
/// iff every partition function is positive and the volume constant is
/// strictly positive.
BoundsReport bounds_check(const Model& m, const Rational& beta, int max_side = 3,
                          std::uint64_t cap = kDefaultEnumerationCap);

/// Identifies an instance for the cache: FNV-1a of the serialized model,
/// region and boundary condition.
std::uint64_t instance_key(const Model& m, const Region& region, const BoundaryCondition& bc);
std::string describe(const Region& region, const BoundaryCondition& bc, const Model& m);

}  // namespace pst
