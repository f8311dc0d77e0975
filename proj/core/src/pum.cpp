#include "rbfpu/pum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rbfpu {

namespace {

// Nodes on a support boundary (ratio == 1) carry zero weight and are excluded.
constexpr double kInsideRatio = 1.0 - 1e-12;

struct KernelJet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d11 = 0.0;
  double d22 = 0.0;
  double d12 = 0.0;
};

KernelJet wendland_jet(const Patch& p, Point2 q) {
  KernelJet k;
  const double u1 = (q.x - p.center.x) / p.rho1;
  const double u2 = (q.y - p.center.y) / p.rho2;
  const double s = std::sqrt(u1 * u1 + u2 * u2);
  if (s >= 1.0) return k;
  const double om = 1.0 - s;
  k.value = om * om * om * om * (4.0 * s + 1.0);
  // W'(s)/s and d/ds of it; both bounded at s = 0
  const double g = -20.0 * om * om * om;
  const double gp_over_s = s > 0.0 ? 60.0 * om * om / s : 0.0;
  const double a1 = u1 / p.rho1;
  const double a2 = u2 / p.rho2;
  k.d1 = g * a1;
  k.d2 = g * a2;
  k.d11 = gp_over_s * a1 * a1 + g / (p.rho1 * p.rho1);
  k.d22 = gp_over_s * a2 * a2 + g / (p.rho2 * p.rho2);
  k.d12 = gp_over_s * a1 * a2;
  return k;
}

}  // namespace

double Patch::ratio(Point2 q) const noexcept {
  const double u1 = (q.x - center.x) / rho1;
  const double u2 = (q.y - center.y) / rho2;
  return std::sqrt(u1 * u1 + u2 * u2);
}

bool Patch::contains(Point2 q) const noexcept { return ratio(q) < kInsideRatio; }

std::vector<std::size_t> Cover::covering(Point2 q) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < patches.size(); ++i) {
    if (patches[i].contains(q)) out.push_back(i);
  }
  return out;
}

double wendland_c2(double r) noexcept {
  if (r >= 1.0) return 0.0;
  const double om = 1.0 - r;
  return om * om * om * om * (4.0 * r + 1.0);
}

Cover make_cover(const Pointset& ps, std::vector<Patch> patches) {
  Cover cover;
  for (Patch& p : patches) {
    if (!(p.rho1 > 0.0) || !(p.rho2 > 0.0)) throw AssemblyError("patch semiaxes must be positive");
    p.members.clear();
    for (std::size_t i = 0; i < ps.size(); ++i) {
      if (p.contains(ps.nodes[i].point())) p.members.push_back(i);
    }
    if (!p.members.empty()) cover.patches.push_back(std::move(p));
  }
  cover.node_patches.assign(ps.size(), {});
  for (std::size_t j = 0; j < cover.patches.size(); ++j) {
    for (std::size_t m : cover.patches[j].members) cover.node_patches[m].push_back(j);
  }
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (cover.node_patches[i].empty()) {
      std::ostringstream os;
      os << "node " << i << " at (xi=" << ps.nodes[i].xi << ", phi=" << ps.nodes[i].phi
         << ") is not covered by any patch";
      throw AssemblyError(os.str());
    }
    cover.max_overlap = std::max(cover.max_overlap, cover.node_patches[i].size());
  }
  return cover;
}

namespace {

// Cell edges splitting [lo, hi] into ceil((hi - lo)/target) equal cells.
std::vector<double> uniform_edges(double lo, double hi, double target) {
  const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / target - 1e-9)));
  std::vector<double> edges(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) edges[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / n;
  edges.back() = hi;
  return edges;
}

double min_surface_xi(const ObstacleShape& shape, double phi_lo, double phi_hi,
                      const TransformParams& t) {
  double lowest = std::min(boundary_curve(shape, phi_lo, t), boundary_curve(shape, phi_hi, t));
  constexpr int kSamples = 64;
  for (int k = 1; k < kSamples; ++k) {
    const double phi = phi_lo + (phi_hi - phi_lo) * k / kSamples;
    lowest = std::min(lowest, boundary_curve(shape, phi, t));
  }
  return lowest;
}

}  // namespace

Cover build_cover(const Pointset& ps, const ObstacleShape& shape, const CoverParams& params) {
  const double rho = params.patch_radius;
  if (!(rho > 0.0)) throw DomainError("patch radius must be positive");
  const TransformParams& t = params.transform;

  std::vector<Patch> patches;
  if (shape.is_circle()) {
    const std::vector<double> xe = uniform_edges(0.0, t.ell, rho);
    const std::vector<double> pe = uniform_edges(0.0, kPi, rho);
    for (std::size_t j = 0; j + 1 < pe.size(); ++j) {
      for (std::size_t i = 0; i + 1 < xe.size(); ++i) {
        Patch p;
        p.center = {0.5 * (xe[i] + xe[i + 1]), 0.5 * (pe[j] + pe[j + 1])};
        p.rho1 = rho;
        p.rho2 = rho;
        patches.push_back(std::move(p));
      }
    }
    return make_cover(ps, std::move(patches));
  }

  std::vector<double> pe;
  if (shape.kind() == ObstacleShape::Kind::Square) {
    int per_side = static_cast<int>(std::lround((kPi / 2) / rho)) + 1;
    if (per_side % 2 == 0) ++per_side;
    pe = square_phi_columns(std::max(per_side, 3), params.cluster);
  } else {
    pe = uniform_edges(0.0, kPi, rho);
  }
  for (std::size_t j = 0; j + 1 < pe.size(); ++j) {
    const double width = pe[j + 1] - pe[j];
    const double xi_lo = min_surface_xi(shape, pe[j], pe[j + 1], t);
    const std::vector<double> xe = uniform_edges(xi_lo, t.ell, rho);
    for (std::size_t i = 0; i + 1 < xe.size(); ++i) {
      Patch p;
      p.center = {0.5 * (xe[i] + xe[i + 1]), 0.5 * (pe[j] + pe[j + 1])};
      p.rho1 = rho;
      // follows the clustered columns: narrow at the corners, wide mid-face
      p.rho2 = shape.kind() == ObstacleShape::Kind::Square ? width : rho;
      patches.push_back(std::move(p));
    }
  }
  return make_cover(ps, std::move(patches));
}

std::vector<WeightValue> shepard_weights(Point2 q, const Cover& cover) {
  std::vector<WeightValue> out;
  double sum = 0.0;
  for (std::size_t i = 0; i < cover.patches.size(); ++i) {
    const Patch& p = cover.patches[i];
    if (!p.contains(q)) continue;
    const double phi = wendland_c2(p.ratio(q));
    out.push_back({i, phi});
    sum += phi;
  }
  if (out.empty() || !(sum > 0.0)) throw DomainError("shepard_weights: point not covered");
  for (WeightValue& w : out) w.w /= sum;
  return out;
}

std::vector<WeightJet> shepard_weight_derivatives(Point2 q, const Cover& cover) {
  const std::vector<std::size_t> cov = cover.covering(q);
  return shepard_weight_derivatives(q, cover, cov);
}

std::vector<WeightJet> shepard_weight_derivatives(Point2 q, const Cover& cover,
                                                  std::span<const std::size_t> covering) {
  std::vector<KernelJet> jets;
  jets.reserve(covering.size());
  KernelJet sum;
  for (std::size_t idx : covering) {
    KernelJet k = wendland_jet(cover.patches[idx], q);
    sum.value += k.value;
    sum.d1 += k.d1;
    sum.d2 += k.d2;
    sum.d11 += k.d11;
    sum.d22 += k.d22;
    sum.d12 += k.d12;
    jets.push_back(k);
  }
  if (jets.empty() || !(sum.value > 0.0)) {
    throw DomainError("shepard_weight_derivatives: point not covered");
  }
  // quotient rule for w = Phi / S
  const double inv = 1.0 / sum.value;
  std::vector<WeightJet> out;
  out.reserve(jets.size());
  for (std::size_t n = 0; n < jets.size(); ++n) {
    const KernelJet& k = jets[n];
    WeightJet w;
    w.patch = covering[n];
    w.w = k.value * inv;
    w.d1 = (k.d1 - w.w * sum.d1) * inv;
    w.d2 = (k.d2 - w.w * sum.d2) * inv;
    w.d11 = (k.d11 - 2.0 * w.d1 * sum.d1 - w.w * sum.d11) * inv;
    w.d22 = (k.d22 - 2.0 * w.d2 * sum.d2 - w.w * sum.d22) * inv;
    w.d12 = (k.d12 - w.d1 * sum.d2 - w.d2 * sum.d1 - w.w * sum.d12) * inv;
    out.push_back(w);
  }
  return out;
}

}  // namespace rbfpu
