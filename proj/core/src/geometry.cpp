#include "rbfpu/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <utility>

namespace rbfpu {

void TransformParams::validate() const {
  if (!(ell >= 1.0) || !std::isfinite(ell)) {
    throw DomainError("stretching factor ell must be >= 1");
  }
}

void ClusterParams::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw DomainError("cluster lambda must be > 0");
  }
}

ObstacleShape ObstacleShape::rounded_square(int alpha) {
  if (alpha < 1) {
    throw DomainError("rounded square degree alpha must be >= 1");
  }
  return ObstacleShape(Kind::RoundedSquare, alpha);
}

std::string ObstacleShape::name() const {
  switch (kind_) {
    case Kind::Circle:
      return "circle";
    case Kind::RoundedSquare:
      return "rounded:" + std::to_string(alpha_);
    case Kind::Square:
      return "square";
  }
  return "?";
}

const char* to_string(NodeTag tag) noexcept {
  switch (tag) {
    case NodeTag::Interior:
      return "interior";
    case NodeTag::Far:
      return "far";
    case NodeTag::Cylinder:
      return "cylinder";
    case NodeTag::Axis:
      return "axis";
  }
  return "?";
}

std::vector<std::size_t> Pointset::indices(NodeTag tag) const {
  std::size_t begin = 0;
  std::size_t count = 0;
  switch (tag) {
    case NodeTag::Interior:
      begin = 0;
      count = n_interior;
      break;
    case NodeTag::Far:
      begin = far_begin();
      count = n_far;
      break;
    case NodeTag::Cylinder:
      begin = cyl_begin();
      count = n_cyl;
      break;
    case NodeTag::Axis:
      begin = axis_begin();
      count = n_axis;
      break;
  }
  std::vector<std::size_t> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = begin + i;
  return out;
}

void Pointset::check_invariants() const {
  if (n_interior + n_far + n_cyl + n_axis != nodes.size()) {
    throw AssemblyError("pointset counts do not add up to N");
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    NodeTag expected = i < far_begin()   ? NodeTag::Interior
                       : i < cyl_begin() ? NodeTag::Far
                       : i < axis_begin() ? NodeTag::Cylinder
                                          : NodeTag::Axis;
    if (nodes[i].tag != expected) {
      std::ostringstream os;
      os << "pointset node " << i << " tagged " << to_string(nodes[i].tag) << ", expected "
         << to_string(expected);
      throw AssemblyError(os.str());
    }
  }
  std::set<std::pair<double, double>> seen;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!seen.emplace(nodes[i].xi, nodes[i].phi).second) {
      std::ostringstream os;
      os << "duplicate node " << i << " at (" << nodes[i].xi << ", " << nodes[i].phi << ")";
      throw AssemblyError(os.str());
    }
  }
}

Pointset Pointset::from_nodes(std::vector<Node> nodes) {
  Pointset ps;
  ps.nodes.reserve(nodes.size());
  for (NodeTag tag : {NodeTag::Interior, NodeTag::Far, NodeTag::Cylinder, NodeTag::Axis}) {
    std::size_t count = 0;
    for (const Node& n : nodes) {
      if (n.tag == tag) {
        ps.nodes.push_back(n);
        ++count;
      }
    }
    switch (tag) {
      case NodeTag::Interior:
        ps.n_interior = count;
        break;
      case NodeTag::Far:
        ps.n_far = count;
        break;
      case NodeTag::Cylinder:
        ps.n_cyl = count;
        break;
      case NodeTag::Axis:
        ps.n_axis = count;
        break;
    }
  }
  ps.check_invariants();
  return ps;
}

double compress_radius(double r, const TransformParams& t) {
  if (std::isnan(r) || r < 1.0) {
    throw DomainError("compress_radius: r < 1 lies inside the obstacle");
  }
  if (std::isinf(r)) return t.ell;
  return t.ell * (1.0 - 1.0 / r);
}

std::optional<double> decompress_radius(double xi, const TransformParams& t) {
  if (std::isnan(xi) || xi < 0.0 || xi > t.ell) {
    throw DomainError("decompress_radius: xi outside [0, ell]");
  }
  if (xi == t.ell) return std::nullopt;
  return t.ell / (t.ell - xi);
}

std::optional<Point2> physical_coords(double xi, double phi, const TransformParams& t) {
  auto r = decompress_radius(xi, t);
  if (!r) return std::nullopt;
  return Point2{*r * std::cos(phi), *r * std::sin(phi)};
}

Point2 transformed_coords(Point2 physical, const TransformParams& t) {
  const double r = std::hypot(physical.x, physical.y);
  if (r == 0.0) throw DomainError("transformed_coords: origin has no image");
  double phi = std::atan2(physical.y, physical.x);
  if (phi < 0.0) phi = 0.0;  // y = -0.0 on the axis
  return {t.ell * (1.0 - 1.0 / r), phi};
}

double boundary_radius(const ObstacleShape& shape, double phi) {
  const double c = std::abs(std::cos(phi));
  const double s = std::abs(std::sin(phi));
  switch (shape.kind()) {
    case ObstacleShape::Kind::Circle:
      return 1.0;
    case ObstacleShape::Kind::RoundedSquare: {
      if (shape.alpha() == 1) return 1.0;
      const double a2 = 2.0 * shape.alpha();
      return std::pow(std::pow(c, a2) + std::pow(s, a2), -1.0 / a2);
    }
    case ObstacleShape::Kind::Square:
      return 1.0 / std::max(c, s);
  }
  return 1.0;
}

double boundary_curve(const ObstacleShape& shape, double phi, const TransformParams& t) {
  switch (shape.kind()) {
    case ObstacleShape::Kind::Circle:
      return 0.0;
    case ObstacleShape::Kind::RoundedSquare: {
      if (shape.alpha() == 1) return 0.0;
      const double a2 = 2.0 * shape.alpha();
      const double sum = std::pow(std::abs(std::cos(phi)), a2) + std::pow(std::abs(std::sin(phi)), a2);
      return t.ell * (1.0 - std::pow(sum, 1.0 / a2));
    }
    case ObstacleShape::Kind::Square:
      if (phi < kPi / 4) return t.ell * (1.0 - std::cos(phi));
      if (phi < 3 * kPi / 4) return t.ell * (1.0 - std::sin(phi));
      return t.ell * (1.0 - std::cos(kPi - phi));
  }
  return 0.0;
}

std::vector<double> cluster_phi(int n, const ClusterParams& c, double centre) {
  if (n < 3) throw DomainError("cluster_phi needs n >= 3");
  c.validate();
  const double eta_max = std::asinh(kPi / (4.0 * c.lambda));
  std::vector<double> phi(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    // symmetric index so that mirrored points are exact negatives
    const double s = (2.0 * j - (n - 1)) / (n - 1);
    phi[static_cast<std::size_t>(j)] = centre + c.lambda * std::sinh(s * eta_max);
  }
  phi.front() = centre - kPi / 4;
  phi.back() = centre + kPi / 4;
  if (n % 2 == 1) phi[static_cast<std::size_t>(n / 2)] = centre;
  return phi;
}

std::vector<double> square_phi_columns(int n_per_side, const ClusterParams& c) {
  std::vector<double> cols = cluster_phi(n_per_side, c, kPi / 4);
  std::vector<double> upper = cluster_phi(n_per_side, c, 3 * kPi / 4);
  cols.insert(cols.end(), upper.begin() + 1, upper.end());
  cols.front() = 0.0;
  cols.back() = kPi;
  return cols;
}

namespace {

int grid_count(double length, double h) {
  return static_cast<int>(std::lround(length / h)) + 1;
}

// One body-fitted phi column: evenly spaced from the surface to xi = ell.
void push_column(std::vector<Node>& out, double phi, double xi_surface, double h,
                 const TransformParams& t, bool on_axis, int forced_count = 0) {
  const double span = t.ell - xi_surface;
  int m = forced_count;
  if (m == 0) m = static_cast<int>(std::ceil(span / h - 1e-9)) + 1;
  m = std::max(m, 2);
  for (int i = 0; i < m; ++i) {
    Node node;
    node.phi = phi;
    if (i == m - 1) {
      node.xi = t.ell;
      node.tag = NodeTag::Far;
    } else if (i == 0) {
      node.xi = xi_surface;
      node.tag = NodeTag::Cylinder;
    } else {
      node.xi = xi_surface + span * i / (m - 1);
      node.tag = on_axis ? NodeTag::Axis : NodeTag::Interior;
    }
    out.push_back(node);
  }
}

}  // namespace

Pointset generate_pointset(const ObstacleShape& shape, double h, const TransformParams& t,
                           const ClusterParams& c) {
  t.validate();
  if (!(h > 0.0) || !(h < t.ell)) throw DomainError("spacing h must satisfy 0 < h < ell");

  std::vector<double> columns;
  if (shape.kind() == ObstacleShape::Kind::Square) {
    int per_side = grid_count(kPi / 2, h);
    if (per_side % 2 == 0) ++per_side;  // keep a node column on each corner
    columns = square_phi_columns(std::max(per_side, 3), c);
  } else {
    const int n_phi = grid_count(kPi, h);
    columns.resize(static_cast<std::size_t>(n_phi));
    for (int j = 0; j < n_phi; ++j) columns[static_cast<std::size_t>(j)] = kPi * j / (n_phi - 1);
    columns.back() = kPi;
  }

  std::vector<Node> nodes;
  const int tensor_count = shape.is_circle() ? grid_count(t.ell, h) : 0;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    const double phi = columns[j];
    const bool on_axis = (j == 0 || j + 1 == columns.size());
    push_column(nodes, phi, boundary_curve(shape, phi, t), h, t, on_axis, tensor_count);
  }
  return Pointset::from_nodes(std::move(nodes));
}

}  // namespace rbfpu
