#pragma once

#include <Eigen/Core>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "crossfit/errors.hpp"

namespace crossfit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class BodyKind { ball, ellipsoid, superellipsoid, smoothed_polytope, perturbed_sphere, blend };

std::string to_string(BodyKind kind);

/// One face of a smoothed polytope: {x : <normal, x> <= offset}.
struct Halfspace {
  Vec normal;
  double offset = 0.0;
};

/// One term coeff * prod_i u_i^powers[i] of a radial perturbation on the unit sphere.
struct RadialTerm {
  std::vector<int> powers;
  double coeff = 0.0;
};

/// A body (or hypersurface) given as the zero set of a smooth level-set function f,
/// with f < 0 strictly inside and f > 0 strictly outside. Immutable; all member
/// functions are pure and safe to call concurrently.
class ImplicitBody {
 public:
  /// f(x) = |x|^2 - radius^2.
  static ImplicitBody make_ball(int dim, double radius = 1.0);
  /// f(x) = sum_i x_i^2 / a_i^2 - 1.
  static ImplicitBody make_ellipsoid(Vec semi_axes);
  /// f(x) = sum_i (x_i / a_i)^n - 1 with n even and >= 2.
  static ImplicitBody make_superellipsoid(Vec semi_axes, int exponent);
  /// Log-sum-exp smoothing of max_j(<n_j, x> - c_j): f(x) = log(sum_j exp(beta*(<n_j,x> - c_j)))/beta.
  static ImplicitBody make_smoothed_polytope(std::vector<Halfspace> faces, double sharpness);
  /// Radial graph about the origin: f(x) = |x| - r(x/|x|), r(u) = 1 + sum of terms.
  /// Requires sum |coeff| < 0.5 so the surface stays a star-shaped embedded sphere.
  static ImplicitBody make_perturbed_sphere(int dim, std::vector<RadialTerm> terms);
  /// Affine blend (1 - t) f_start + t f_end with the given interior point.
  static ImplicitBody make_blend(ImplicitBody start, ImplicitBody end, double t, Vec interior);

  BodyKind kind() const;
  int dim() const;
  bool convex() const;
  bool centrally_symmetric() const;
  const Vec& interior_point() const;

  /// Level-set value; negative strictly inside, zero on the surface, positive outside.
  double evaluate(const Vec& x) const;
  /// Analytic gradient of the level-set function.
  Vec gradient(const Vec& x) const;
  /// Smallest a > 0 with f(origin + a*direction) = 0, to residual tolerance 1e-12.
  /// origin must be strictly interior and direction unit within 1e-12.
  double ray_intersect(const Vec& origin, const Vec& direction) const;

  /// Max/min boundary distance from the interior point over sampled directions.
  /// Cheap scale proxies for seeding and degeneration thresholds, not exact radii.
  double circumradius_estimate() const;
  double inradius_estimate() const;

  // Parameter accessors (valid for the matching kind only).
  double radius() const;
  const Vec& semi_axes() const;
  int exponent() const;
  const std::vector<Halfspace>& halfspaces() const;
  double sharpness() const;
  const std::vector<RadialTerm>& radial_terms() const;

 private:
  struct Data;
  explicit ImplicitBody(std::shared_ptr<const Data> data) : data_(std::move(data)) {}
  std::shared_ptr<const Data> data_;
};

/// One-parameter family of bodies f_t = (1 - t) f_start + t f_end, t in [0, 1].
class HomotopyFamily {
 public:
  HomotopyFamily(ImplicitBody start, ImplicitBody end);

  const ImplicitBody& start() const { return start_; }
  const ImplicitBody& end() const { return end_; }
  int dim() const { return start_.dim(); }

  /// Blended body at parameter t. The interior point is taken from the start body
  /// when still valid, otherwise re-derived by damped gradient descent.
  ImplicitBody body_at(double t) const;

 private:
  ImplicitBody start_;
  ImplicitBody end_;
};

/// Parses the body JSON schema. Unknown fields and non-smooth parameter choices are
/// rejected with a ParseError carrying the offending field path.
ImplicitBody parse_body(const nlohmann::json& doc);
ImplicitBody parse_body_text(const std::string& text);

/// Inverse of parse_body for the five analytic kinds. Blends are not serializable.
nlohmann::json body_to_json(const ImplicitBody& body);

}  // namespace crossfit
