#include "posegait/ingest/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "posegait/error.hpp"
#include "posegait/eval/protocol.hpp"
#include "posegait/ingest/index.hpp"
#include "posegait/ingest/psg.hpp"
#include "posegait/rng.hpp"

namespace fs = std::filesystem;

namespace posegait::ingest {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct GaitParams {
  double height;      // overall vertical scale
  double shoulder_w;  // lateral shoulder half-width
  double hip_w;
  double arm_len;
  double leg_len;
  double head_scale;
  double stride;     // leg swing amplitude (depth axis)
  double arm_swing;  // arm swing amplitude (depth axis)
  double sway;       // lateral body sway amplitude
  double cadence;    // cycles per frame
  double bob;        // vertical bounce amplitude
};

double stratified(Rng& perm_rng, Rng& jitter_rng, int subject, int subjects,
                  double lo, double hi) {
  // Subjects occupy distinct strata of each parameter range; the stratum
  // permutation decorrelates parameters across subjects.
  std::vector<int> strata(static_cast<std::size_t>(subjects));
  for (int i = 0; i < subjects; ++i) strata[static_cast<std::size_t>(i)] = i;
  perm_rng.shuffle(strata);
  const double u = 0.25 + 0.5 * jitter_rng.uniform();
  const double pos = (strata[static_cast<std::size_t>(subject)] + u) / subjects;
  return lo + pos * (hi - lo);
}

GaitParams subject_params(const SyntheticSpec& spec, int subject) {
  GaitParams p;
  int lane = 0;
  auto draw = [&](double lo, double hi) {
    Rng perm_rng(derive_seed(spec.seed, 0xA11CE, static_cast<std::uint64_t>(lane)));
    Rng jitter_rng(derive_seed(spec.seed, 0xB0B, static_cast<std::uint64_t>(lane),
                               static_cast<std::uint64_t>(subject)));
    ++lane;
    return stratified(perm_rng, jitter_rng, subject, spec.subjects, lo, hi);
  };
  p.height = draw(0.85, 1.15);
  p.shoulder_w = draw(0.16, 0.28);
  p.hip_w = draw(0.10, 0.18);
  p.arm_len = draw(0.85, 1.15);
  p.leg_len = draw(0.85, 1.15);
  p.head_scale = draw(0.8, 1.2);
  p.stride = draw(0.10, 0.26);
  p.arm_swing = draw(0.05, 0.17);
  p.sway = draw(0.015, 0.055);
  p.cadence = draw(0.055, 0.115);
  p.bob = draw(0.008, 0.030);
  return p;
}

struct Point3 {
  double x = 0, y = 0, z = 0;  // lateral, vertical, walking direction
};

// Keypoints in a canonical frame at gait phase `ph`, before view projection.
std::vector<Point3> walker_pose(const GaitParams& p, double ph, int keypoints) {
  const double leg = 0.92 * p.leg_len;
  const double swingL = std::sin(ph);
  const double swingR = std::sin(ph + kPi);
  const double armL = p.arm_swing * std::sin(ph + kPi);  // arms counter legs
  const double armR = p.arm_swing * std::sin(ph);
  const double sway = p.sway * std::sin(ph);
  const double bob = p.bob * std::sin(2.0 * ph);
  const double h = p.height;

  auto pt = [&](double x, double y, double z) {
    return Point3{x + sway, y + bob, z};
  };

  const double hipY = 0.0;
  const double kneeL_z = 0.55 * p.stride * swingL;
  const double kneeR_z = 0.55 * p.stride * swingR;
  const double ankL_z = p.stride * swingL;
  const double ankR_z = p.stride * swingR;
  // Knee lift shortens the swinging leg a little.
  const double liftL = 0.06 * p.stride * std::max(0.0, std::cos(ph));
  const double liftR = 0.06 * p.stride * std::max(0.0, -std::cos(ph));

  const Point3 nose = pt(0.0, (0.62 + 0.20 * p.head_scale) * h, 0.05);
  const Point3 eyeL = pt(0.035 * p.head_scale, (0.64 + 0.21 * p.head_scale) * h, 0.04);
  const Point3 eyeR = pt(-0.035 * p.head_scale, (0.64 + 0.21 * p.head_scale) * h, 0.04);
  const Point3 earL = pt(0.07 * p.head_scale, (0.62 + 0.20 * p.head_scale) * h, 0.0);
  const Point3 earR = pt(-0.07 * p.head_scale, (0.62 + 0.20 * p.head_scale) * h, 0.0);
  const Point3 shoL = pt(p.shoulder_w, 0.58 * h, 0.0);
  const Point3 shoR = pt(-p.shoulder_w, 0.58 * h, 0.0);
  const Point3 elbL = pt(p.shoulder_w + 0.02, 0.34 * h, 0.7 * armL);
  const Point3 elbR = pt(-p.shoulder_w - 0.02, 0.34 * h, 0.7 * armR);
  const Point3 wriL = pt(p.shoulder_w + 0.03, (0.34 - 0.24 * p.arm_len) * h, 1.6 * armL);
  const Point3 wriR = pt(-p.shoulder_w - 0.03, (0.34 - 0.24 * p.arm_len) * h, 1.6 * armR);
  const Point3 hipL = pt(p.hip_w, hipY, 0.0);
  const Point3 hipR = pt(-p.hip_w, hipY, 0.0);
  const Point3 kneL = pt(p.hip_w + 0.01, hipY - 0.5 * leg + liftL, kneeL_z);
  const Point3 kneR = pt(-p.hip_w - 0.01, hipY - 0.5 * leg + liftR, kneeR_z);
  const Point3 ankL = pt(p.hip_w + 0.02, hipY - leg + 0.8 * liftL, ankL_z);
  const Point3 ankR = pt(-p.hip_w - 0.02, hipY - leg + 0.8 * liftR, ankR_z);

  if (keypoints == 17) {
    return {nose, eyeL, eyeR, earL, earR, shoL, shoR, elbL, elbR,
            wriL, wriR, hipL, hipR, kneL, kneR, ankL, ankR};
  }
  // pose18: nose, neck, Rsho, Relb, Rwri, Lsho, Lelb, Lwri, Rhip, Rkne,
  //         Rank, Lhip, Lkne, Lank, Reye, Leye, Rear, Lear.
  const Point3 neck = pt(0.0, 0.58 * h, 0.0);
  return {nose, neck, shoR, elbR, wriR, shoL, elbL, wriL, hipR,
          kneR, ankR, hipL, kneL, ankL, eyeR, eyeL, earR, earL};
}

}  // namespace

std::string synth_subject_name(int subject) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03d", subject + 1);
  return buf;
}

std::string synth_condition_name(int condition) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "nm-%02d", condition + 1);
  return buf;
}

std::string synth_view_name(const SyntheticSpec& spec, int view_index) {
  const int deg = spec.views <= 1 ? 90 : (180 * view_index) / (spec.views - 1);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03d", deg);
  return buf;
}

SkeletonSequence synth_sequence(const SyntheticSpec& spec, int subject,
                                int condition, int view_index) {
  const SkeletonGraph graph = build_graph(spec.layout_id);
  const int kp = graph.num_keypoints;
  const GaitParams params = subject_params(spec, subject);
  Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(subject),
                      static_cast<std::uint64_t>(condition),
                      static_cast<std::uint64_t>(view_index)));
  const double phase = rng.uniform(0.0, 2.0 * kPi);
  const double cadence = params.cadence * (1.0 + 0.04 * (rng.uniform() - 0.5));
  const int deg = spec.views <= 1 ? 90 : (180 * view_index) / (spec.views - 1);
  const double theta = deg * kPi / 180.0;
  const double cos_t = std::cos(theta);
  const double sin_t = std::sin(theta);

  SkeletonSequence seq = SkeletonSequence::zeros(spec.frames, kp, 2);
  seq.subject_id = synth_subject_name(subject);
  seq.condition = synth_condition_name(condition);
  seq.view = synth_view_name(spec, view_index);
  seq.layout_id = spec.layout_id;

  for (int t = 0; t < spec.frames; ++t) {
    const double ph = phase + 2.0 * kPi * cadence * t;
    const auto pose = walker_pose(params, ph, kp);
    for (int v = 0; v < kp; ++v) {
      const Point3& q = pose[static_cast<std::size_t>(v)];
      const double x = q.x * cos_t + q.z * sin_t + spec.noise_std * rng.normal();
      const double y = q.y + spec.noise_std * rng.normal();
      seq.at(t, v, 0) = static_cast<double>(static_cast<float>(x));
      seq.at(t, v, 1) = static_cast<double>(static_cast<float>(y));
    }
  }
  return seq;
}

void generate_dataset(const SyntheticSpec& spec, const std::string& out_root) {
  if (spec.subjects < 1 || spec.views < 1 || spec.frames < 1 || spec.conditions < 1)
    throw Error(errc::config, "synthetic spec requires positive counts");
  fs::create_directories(out_root);
  for (int s = 0; s < spec.subjects; ++s)
    for (int c = 0; c < spec.conditions; ++c)
      for (int v = 0; v < spec.views; ++v) {
        const fs::path dir = fs::path(out_root) / synth_subject_name(s) /
                             synth_condition_name(c) / synth_view_name(spec, v);
        fs::create_directories(dir);
        write_sequence(synth_sequence(spec, s, c, v), (dir / "seq.psg1").string());
      }
  DatasetIndex index = build_index(out_root, eval::builtin_protocol("synthetic"));
  index.layout_id = spec.layout_id;
  write_index(index, (fs::path(out_root) / "index.psgidx").string());
}

}  // namespace posegait::ingest
