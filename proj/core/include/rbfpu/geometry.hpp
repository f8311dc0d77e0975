// Obstacle shapes, the radial compression map and pointset generation.
//
// The exterior of the obstacle in the upper half plane is mapped onto a
// bounded region of the (xi, phi) plane by xi = ell (1 - 1/r), phi being
// the polar angle measured from the downstream direction.

#ifndef RBFPU_GEOMETRY_HPP
#define RBFPU_GEOMETRY_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rbfpu {

inline constexpr double kPi = 3.14159265358979323846;

class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

class AssemblyError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Stretching factor of the compression map. Requires ell >= 1.
struct TransformParams {
  double ell = 2.0;

  void validate() const;
};

class ObstacleShape {
public:
  enum class Kind { Circle, RoundedSquare, Square };

  static ObstacleShape circle() { return ObstacleShape(Kind::Circle, 1); }
  /// x^(2 alpha) + y^(2 alpha) = 1; alpha = 1 is the circle.
  static ObstacleShape rounded_square(int alpha);
  static ObstacleShape square() { return ObstacleShape(Kind::Square, 0); }

  Kind kind() const noexcept { return kind_; }
  int alpha() const noexcept { return alpha_; }
  bool is_circle() const noexcept {
    return kind_ == Kind::Circle || (kind_ == Kind::RoundedSquare && alpha_ == 1);
  }
  std::string name() const;

private:
  ObstacleShape(Kind k, int alpha) : kind_(k), alpha_(alpha) {}
  Kind kind_;
  int alpha_;
};

enum class NodeTag { Interior, Far, Cylinder, Axis };

const char* to_string(NodeTag tag) noexcept;

struct Node {
  double xi = 0.0;
  double phi = 0.0;
  NodeTag tag = NodeTag::Interior;

  Point2 point() const noexcept { return {xi, phi}; }
};

/// Collocation nodes ordered Interior, Far, Cylinder, Axis.
struct Pointset {
  std::vector<Node> nodes;
  std::size_t n_interior = 0;
  std::size_t n_far = 0;
  std::size_t n_cyl = 0;
  std::size_t n_axis = 0;

  std::size_t size() const noexcept { return nodes.size(); }
  std::size_t n_boundary() const noexcept { return n_far + n_cyl + n_axis; }

  std::size_t far_begin() const noexcept { return n_interior; }
  std::size_t cyl_begin() const noexcept { return n_interior + n_far; }
  std::size_t axis_begin() const noexcept { return n_interior + n_far + n_cyl; }

  /// Indices of all nodes carrying `tag`, increasing.
  std::vector<std::size_t> indices(NodeTag tag) const;

  /// Checks counts, ordering, distinctness. Throws AssemblyError.
  void check_invariants() const;

  /// Builds a pointset from unordered nodes by stable partition on the tag.
  static Pointset from_nodes(std::vector<Node> nodes);
};

struct ClusterParams {
  double lambda = 0.1;

  void validate() const;
};

/// Physical radius -> transformed coordinate. r may be +infinity.
double compress_radius(double r, const TransformParams& t);

/// Transformed coordinate -> physical radius; nullopt is the point at infinity.
std::optional<double> decompress_radius(double xi, const TransformParams& t);

/// (xi, phi) -> (x, y); nullopt at xi = ell.
std::optional<Point2> physical_coords(double xi, double phi, const TransformParams& t);

/// (x, y) with y >= 0 -> (xi, phi). Does not check the obstacle.
Point2 transformed_coords(Point2 physical, const TransformParams& t);

/// xi of the obstacle surface at angle phi.
double boundary_curve(const ObstacleShape& shape, double phi, const TransformParams& t);

/// Physical radius of the obstacle surface at angle phi.
double boundary_radius(const ObstacleShape& shape, double phi);

/// n angles phi = centre + lambda sinh(eta_j), eta_j equispaced so that the
/// result spans [centre - pi/4, centre + pi/4]. Defaults to the corner pi/4.
std::vector<double> cluster_phi(int n, const ClusterParams& c, double centre = kPi / 4);

/// The phi columns used for the square cylinder: clustered on each half,
/// n_per_side points per half, the shared point pi/2 appearing once.
std::vector<double> square_phi_columns(int n_per_side, const ClusterParams& c);

/// Grid (circle) or body-fitted (rounded and square) pointset with spacing ~h.
Pointset generate_pointset(const ObstacleShape& shape, double h, const TransformParams& t,
                           const ClusterParams& c = {});

}  // namespace rbfpu

#endif  // RBFPU_GEOMETRY_HPP
