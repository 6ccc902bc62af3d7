#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace posegait {

/// Exception carrying a stable machine-readable code alongside the message.
/// Codes are short snake_case tokens ("unknown_layout", "bad_magic", ...)
/// so callers and tests can match on the failure class, not on wording.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

namespace errc {
inline constexpr const char* unknown_layout = "unknown_layout";
inline constexpr const char* invalid_graph = "invalid_graph";
inline constexpr const char* bad_magic = "bad_magic";
inline constexpr const char* short_read = "short_read";
inline constexpr const char* io = "io";
inline constexpr const char* not_permutation = "not_permutation";
inline constexpr const char* no_sequences = "no_sequences";
inline constexpr const char* constraint = "constraint";
inline constexpr const char* config = "config";
inline constexpr const char* shape = "shape";
inline constexpr const char* protocol = "protocol";
inline constexpr const char* version = "version";
inline constexpr const char* non_finite = "non_finite";
inline constexpr const char* unknown_branch = "unknown_branch";
inline constexpr const char* no_negatives = "no_negatives";
inline constexpr const char* no_positives = "no_positives";
inline constexpr const char* parse = "parse";
}  // namespace errc

}  // namespace posegait
