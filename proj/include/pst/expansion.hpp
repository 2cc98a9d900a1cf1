#pragma once

// Contour-model resummation of finite-volume partition functions, dressed
// contour weights, truncated cluster expansions of the free energy, phase
// diagnostics and correlation decay.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pst/contours.hpp"
#include "pst/exact.hpp"

namespace pst {

// ---------------------------------------------------------------------------
// Finite-volume resummation
// ---------------------------------------------------------------------------

/// Families of contours of one region and boundary label, grouped by their
/// total energy sum Phi + R (units of 1/scale).
struct ContourHistogram {
  std::int64_t scale = 1;
  std::int64_t ground = 0;  // H of the constant configuration q in the region
  std::map<std::int64_t, std::uint64_t> weights;
  std::uint64_t families = 0;
  std::uint64_t remainder_nonzero = 0;  // families with R != 0

  /// log of exp(-beta H(q)) times the sum of family weights.
  Real log_partition(const Rational& beta) const;
};

/// Called for every family: the configuration it came from, the family,
/// the sum of its contour energies and its remainder R.
using FamilyVisitor = std::function<void(std::span<const Spin>, const ContourFamily&, std::int64_t, std::int64_t)>;

/// Enumerates the families as the images of all admissible configurations
/// under extraction. Weights use contour energies only, never H(chi).
ContourHistogram contour_histogram(const ContourContext& ctx, const Region& region, Spin q,
                                   std::uint64_t cap = kDefaultEnumerationCap, const FamilyVisitor& visit = {});

struct PartitionReport {
  Real log_z;
  Real log_ground;  // -beta H(q)
  std::uint64_t families = 0;
};

PartitionReport contour_partition(const ContourContext& ctx, const Region& region, Spin q, const Rational& beta,
                                  std::uint64_t cap = kDefaultEnumerationCap);

// ---------------------------------------------------------------------------
// Weights and polymers
// ---------------------------------------------------------------------------

/// log of exp(-beta Phi) times the interior ratios Z^{q_m}(Int_m) / Z^{q}(Int_m).
Real log_dressed_weight(const ContourContext& ctx, const Contour& c, const Rational& beta,
                        std::size_t max_interior = 20);

/// A translation class of polymers, represented with its least site at the origin.
struct Polymer {
  std::vector<Site> support;  // sorted
  Real weight;
};

/// Sum over clusters of polymers (connected incompatibility graph, total
/// support size at most max_size), one per translation class, of the
/// Ursell coefficient times the product of weights. Two polymers are
/// incompatible when their supports are within L1 distance 1.
struct ClusterSum {
  Real value;
  std::uint64_t clusters = 0;
  std::vector<Real> by_size;  // index = total support size
};

ClusterSum cluster_sum(const std::vector<Polymer>& catalog, int dimension, int max_size);

/// Ursell coefficient: sum over connected spanning subgraphs of (-1)^edges,
/// for the graph on n vertices given by the adjacency bit masks.
std::int64_t connected_subgraph_sum(const std::vector<std::uint32_t>& adjacency);

// ---------------------------------------------------------------------------
// Free energies and phases
// ---------------------------------------------------------------------------

struct ConvergenceCheck {
  bool certified = false;
  double a = 0;          // witness for the criterion when certified
  double rho = 0;        // per-site entropy-weight ratio at the witness
  std::string formula;
};

/// Kotecky-Preiss style test: exists a > 0 with
///   (2d+1) * sum_{k >= k0} k rho^k <= a,  rho = e (2d-1) |S| exp(a - beta tau).
ConvergenceCheck kp_check(int dimension, std::size_t num_spins, const Rational& tau, const Rational& beta, int k0);

struct FreeEnergyReport {
  Spin label = 0;
  Rational beta;
  int kmax = 0;
  Rational ground_energy;  // e_q per site
  Real series;             // cluster sum per site
  Real free_energy;        // e_q - series / beta
  std::uint64_t contours = 0;
  std::uint64_t clusters = 0;
  std::optional<Rational> tau;
  ConvergenceCheck convergence;
};

FreeEnergyReport free_energy_truncated(const ContourContext& ctx, Spin q, const Rational& beta, int kmax);

struct PhaseEntry {
  FreeEnergyReport report;
  Real gap;  // above the minimum
  bool stable = false;
};

struct PhaseReport {
  std::vector<PhaseEntry> phases;
  double tolerance = 1e-9;
  std::vector<Spin> stable() const;
};

PhaseReport stable_phases(const ContourContext& ctx, const Rational& beta, int kmax, double tolerance = 1e-9);

// ---------------------------------------------------------------------------
// Correlations
// ---------------------------------------------------------------------------

struct CorrelationReport {
  Real exact;      // Gibbs probability from the Hamiltonian
  Real resummed;   // from contour weights
  std::vector<std::string> warnings;
};

/// Probability that the extracted family of the region contains every
/// contour of `fam`.
CorrelationReport contour_correlation(const ContourContext& ctx, const std::vector<Contour>& fam, const Region& region,
                                      Spin q, const Rational& beta, std::uint64_t cap = kDefaultEnumerationCap);

struct DecayReport {
  std::vector<int> distances;
  std::vector<Real> correlations;  // connected, at each distance
  bool determinate = false;        // every correlation nonzero
  double slope = 0;                // of log |C(r)| against r
  double intercept = 0;
  double residual_norm = 0;
  int rows = 0, cols = 0;
  int ref_row = 0, ref_col = 0;
};

/// Connected correlations of the indicator "spin differs from q" between a
/// reference site and sites along its row, on a rows x cols box with
/// boundary label q, from the transfer matrix; then a least-squares fit.
DecayReport decay_diagnostic(const Model& m, Spin q, const Rational& beta, int rows, int cols,
                             const std::vector<int>& distances);

}  // namespace pst
