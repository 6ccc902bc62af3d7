#pragma once

#include <cstdint>
#include <string>

namespace posegait::sampling {

enum class SamplerKind { random, triplet, random_triplet };

std::string to_string(SamplerKind k);
SamplerKind sampler_kind_from_string(const std::string& s);

/// Batch composition spec.
///   random:          batch_size sequences, no label constraint.
///   triplet:         P subjects x K sequences each (batch_size = P*K).
///   random_triplet:  P subjects x K sequences plus c = batch_size mod P
///                    extras, with P >= 2, K >= 2 and P*K + c = batch_size.
struct SamplerSpec {
  SamplerKind kind = SamplerKind::random;
  int batch_size = 0;  // total sequences per batch
  int p = 0;           // subjects per batch (triplet kinds)
  int k = 0;           // sequences per subject (triplet kind; derived for random_triplet)
  std::uint64_t seed = 0;

  /// Remainder when batch_size is divided by P.
  int c() const { return p > 0 ? batch_size % p : 0; }
  /// Sequences per subject for random_triplet: floor(batch_size / P).
  int derived_k() const { return p > 0 ? batch_size / p : 0; }
};

/// Throws Error("constraint") when the spec violates its invariants
/// (message names the violated bound, e.g. "P >= 2").
void validate_spec(const SamplerSpec& spec);

}  // namespace posegait::sampling
