// Patch covers of the transformed domain and Shepard partition-of-unity
// weights built from the C2 Wendland function.

#ifndef RBFPU_PUM_HPP
#define RBFPU_PUM_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "rbfpu/geometry.hpp"

namespace rbfpu {

/// Axis-aligned elliptic patch. Members are the node indices strictly inside.
struct Patch {
  Point2 center;
  double rho1 = 0.0;  // semiaxis along xi
  double rho2 = 0.0;  // semiaxis along phi
  std::vector<std::size_t> members;

  /// Elliptic distance ratio; < 1 inside the open patch.
  double ratio(Point2 q) const noexcept;
  bool contains(Point2 q) const noexcept;
};

struct Cover {
  std::vector<Patch> patches;
  std::vector<std::vector<std::size_t>> node_patches;  // Xi(q) per node, increasing
  std::size_t max_overlap = 0;                          // K, observed

  /// Indices of patches whose open support contains q, increasing.
  std::vector<std::size_t> covering(Point2 q) const;
};

struct CoverParams {
  double patch_radius = 0.25;
  TransformParams transform;
  ClusterParams cluster;
};

/// (1 - r)^4_+ (4 r + 1).
double wendland_c2(double r) noexcept;

/// Creates a cover from patch geometries; members are filled in, empty
/// patches are dropped and full coverage of `ps` is checked.
Cover make_cover(const Pointset& ps, std::vector<Patch> patches);

/// Default cover for the shape: a cell-centred grid of circles for the
/// circle, boundary-following columns of patches otherwise. Square covers
/// follow the clustered phi distribution with elliptic patches.
Cover build_cover(const Pointset& ps, const ObstacleShape& shape, const CoverParams& params);

struct WeightValue {
  std::size_t patch;
  double w;
};

struct WeightJet {
  std::size_t patch;
  double w;
  double d1;   // d/dxi
  double d2;   // d/dphi
  double d11;
  double d22;
  double d12;
};

std::vector<WeightValue> shepard_weights(Point2 q, const Cover& cover);

std::vector<WeightJet> shepard_weight_derivatives(Point2 q, const Cover& cover);

/// Same, with the covering patch set already known.
std::vector<WeightJet> shepard_weight_derivatives(Point2 q, const Cover& cover,
                                                  std::span<const std::size_t> covering);

}  // namespace rbfpu

#endif  // RBFPU_PUM_HPP
