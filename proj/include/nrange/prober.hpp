#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nrange/support_geometry.hpp"

namespace nrange {

struct ProbeConfig {
  std::vector<Real> eps_list{0.5, 0.25, 0.1};
  int samples_per_eps = 20000;
  std::vector<Real> delta_grid;  // empty: 64 log-spaced points in [0.005, 1]
  int coverage_resolution = 256;
  std::uint64_t seed = 0x5eed;
  int support_grid = 256;  // angles for the cap-image support function

  std::vector<Real> deltas() const;
  void validate() const;
};

enum class ProbeVerdict { Open, NotOpen, Inconclusive };
const char* to_string(ProbeVerdict v);

struct EpsRecord {
  Real eps = 0.0;
  Real convexity_defect = 0.0;
  Real delta_max_covered = 0.0;
  bool relative_nbhd_covered = false;
  Real deficit = 0.0;  // largest distance from a relative-neighbourhood test point to the cap image
  Real noise = 0.0;    // spread of the sampled deficit over 8 splits
};

struct PreimageProbe {
  UnitVector x;
  std::string construction;
  std::vector<EpsRecord> records;
  ProbeVerdict verdict = ProbeVerdict::Inconclusive;
};

struct ProbeReport {
  Complex z;
  Real r0 = 0.0;
  Real margin = 0.0;
  std::vector<PreimageProbe> preimages;
  ProbeVerdict verdict = ProbeVerdict::Inconclusive;       // every tested preimage
  ProbeVerdict weak_verdict = ProbeVerdict::Inconclusive;  // some tested preimage
};

/// f_A over sample_cap(x, eps).
std::vector<Complex> cap_image(const Matrix& a, const UnitVector& x, Real eps, int count, std::uint64_t seed);

/// Largest distance from a midpoint of two random cloud points to the nearest
/// cloud point, over the cloud diameter; 0 for a cloud of diameter < 1e-12.
Real convexity_defect(const std::vector<Complex>& cloud, int probes = 2048, std::uint64_t seed = 0x5eed);

/// Largest delta in the grid with z + delta (w(dir) - z) in hull(cloud) for all
/// directions, w(dir) the exit point of the scanned W(A) along dir; 0 if none.
Real delta_coverage(const BoundaryModel& m, Complex z, const std::vector<Complex>& cloud, const ProbeConfig& cfg);

/// Support function of f_A({y : ||y - x|| <= eps}) at theta, with a maximizer when available.
struct CapSupport {
  Real value = 0.0;
  bool has_point = false;
  Complex point;
};
CapSupport cap_support(const Matrix& a, const UnitVector& x, Real eps, Real theta);

PreimageProbe probe_preimage(const BoundaryModel& m, Complex z, const UnitVector& x, const ProbeConfig& cfg);

/// Probes every preimage the inverse module constructs for z.
ProbeReport openness_verdict(const BoundaryModel& m, Complex z, const ProbeConfig& cfg);

}  // namespace nrange
