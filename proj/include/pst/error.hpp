#pragma once

#include <stdexcept>
#include <string>

namespace pst {

// Every failure raised by the library carries a short machine-readable
// reason code next to the human-readable message; the CLI prints the code.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

namespace errc {
inline constexpr const char* kInvalidInput = "invalid_input";
inline constexpr const char* kParse = "parse_error";
inline constexpr const char* kCapExceeded = "cap_exceeded";
inline constexpr const char* kNotLattice = "not_lattice_vector";
inline constexpr const char* kMissingBoundary = "missing_boundary";
inline constexpr const char* kInadmissible = "inadmissible";
inline constexpr const char* kInconsistent = "internal_inconsistency";
inline constexpr const char* kIncompatible = "incompatible_family";
inline constexpr const char* kRichness = "richness_violated";
inline constexpr const char* kMisaligned = "misaligned_region";
}  // namespace errc

}  // namespace pst
