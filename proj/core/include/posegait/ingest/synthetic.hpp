#pragma once

#include <cstdint>
#include <string>

#include "posegait/sequence.hpp"

namespace posegait::ingest {

/// Parameter-controlled walking-like keypoint oscillations. Each subject
/// gets a distinct body geometry (limb scales) and gait signature
/// (stride/swing amplitudes, cadence) drawn from stratified ranges so
/// subjects stay separable; each (condition, view) sequence varies phase
/// and adds small coordinate noise. Views project a pseudo-3D walker at
/// evenly spaced yaw angles, so cross-view appearance changes while the
/// subject's vertical geometry is preserved.
struct SyntheticSpec {
  int subjects = 8;
  int views = 4;
  int frames = 60;
  int conditions = 6;  // named nm-01 .. nm-NN
  std::string layout_id = "coco17";
  std::uint64_t seed = 1;
  double noise_std = 0.004;
};

/// Deterministic in (spec, subject, condition, view_index); coordinates are
/// quantized to binary32 so PSG1 round-trips are exact.
SkeletonSequence synth_sequence(const SyntheticSpec& spec, int subject,
                                int condition, int view_index);

std::string synth_subject_name(int subject);
std::string synth_condition_name(int condition);
std::string synth_view_name(const SyntheticSpec& spec, int view_index);

/// Writes the full tree root/subject/condition/view/seq.psg1 plus an
/// "index.psgidx" file at the root. Re-running with the same spec
/// reproduces every byte.
void generate_dataset(const SyntheticSpec& spec, const std::string& out_root);

}  // namespace posegait::ingest
