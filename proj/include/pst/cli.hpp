#pragma once

// Command dispatch for the pst tool. Every command emits line-oriented
// records with a fixed field order; the table format prints the same records
// grouped by kind.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pst/energy.hpp"
#include "pst/exact.hpp"

namespace pst {

enum class OutputFormat { kRecords, kTable };

struct RunConfig {
  std::string command;
  std::string model_path;
  std::vector<Rational> betas = {Rational(1)};
  int kmax = 9;
  int box = 4;         // side of the square box (or torus)
  bool torus = false;  // zexact only
  std::string bc;      // spin symbol of the boundary label; default: first constant ground state
  int window = 4;      // richness window, bounds side cap, ground-state verification cap
  std::optional<int> collar;
  int period = 2;      // ground-state period cap
  std::optional<int> block;
  std::uint64_t cap = kDefaultEnumerationCap;
  std::vector<int> distances = {1, 2, 3, 4};
  std::vector<std::string> flips;  // "x,y" sites set to the other label (correlate)
  OutputFormat format = OutputFormat::kRecords;
};

enum ExitCode : int { kPass = 0, kFail = 1, kErrorExit = 2 };

struct Record {
  std::string kind;
  std::vector<std::pair<std::string, std::string>> fields;

  Record& add(std::string key, std::string value) {
    fields.emplace_back(std::move(key), std::move(value));
    return *this;
  }
};

void write_records(std::ostream& out, const std::vector<Record>& records, OutputFormat format);

/// Resolves a model argument: a path, or a file name under the bundled models directory.
std::string resolve_model_path(const std::string& path);

/// Runs one command and writes its report. Returns 0 on PASS-type results,
/// 1 on FAIL and 2 on errors, which are reported as an "error" record
/// carrying the reason code.
int run(const RunConfig& config, std::ostream& out);

}  // namespace pst
