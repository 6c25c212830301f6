#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "crossfit/bodies.hpp"

namespace crossfit {

/// Dimension of the SO(d) tangent chart, d(d-1)/2.
int tangent_dim(int d);

/// Skew-symmetric matrix for a tangent vector, pairs (i < j) in lexicographic order:
/// entry (j, i) = +omega_k, entry (i, j) = -omega_k.
Mat skew_from_tangent(const Vec& omega, int d);
Vec tangent_from_skew(const Mat& s);

/// Element of SO(d): orthonormal within 1e-10 in max norm, positive determinant.
class Rotation {
 public:
  explicit Rotation(Mat m);
  static Rotation identity(int d);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Mat& matrix() const { return m_; }

  /// Nearest rotation by QR, guarding drift accumulated over many retractions.
  Rotation reorthonormalized() const;

 private:
  Mat m_;
};

/// rho * exp(S(omega)); the exponential keeps the result orthogonal to rounding.
Rotation retract(const Rotation& rho, const Vec& omega);

/// Tangent coordinates of from^T * to (principal matrix logarithm).
Vec rotation_log(const Rotation& from, const Rotation& to);

/// Haar-ish random rotation: orthonormalize a Gaussian matrix, fix det = +1 by
/// negating the last column if needed. Deterministic for a fixed seed.
Rotation random_rotation(std::uint64_t seed, int d);

/// Linear base (e_1, ..., e_d) as matrix columns; regular iff orthonormal within 1e-12.
class BaseFrame {
 public:
  explicit BaseFrame(Mat columns);
  static BaseFrame standard(int d);

  int dim() const { return static_cast<int>(m_.rows()); }
  bool regular() const { return regular_; }
  const Mat& matrix() const { return m_; }

 private:
  Mat m_;
  bool regular_;
};

/// Candidate crosspolytope: vertices are center ± scale * rotation * frame column.
struct CrossConfig {
  CrossConfig(Vec center, double scale, Rotation rotation, BaseFrame frame);

  Vec center;
  double scale;
  Rotation rotation;
  BaseFrame frame;

  int dim() const { return rotation.dim(); }
  /// Rotated frame directions rho * E, one column per axis.
  Mat axes() const { return rotation.matrix() * frame.matrix(); }
};

/// The 2d vertices in fixed order (+axis 1, -axis 1, ..., +axis d, -axis d).
std::vector<Vec> vertices(const CrossConfig& config);

/// Per-axis chord data from a candidate center p along the rotated frame.
struct ChordData {
  Vec a;  // forward lengths
  Vec b;  // backward lengths
  Vec s;  // a + b
  Vec t;  // a - b
};

enum class ResidualForm { levelset, chord };

struct ResidualValue {
  ResidualForm form;
  Vec values;  // length 2d (levelset) or 2d-1 (chord)
};

/// Level-set residual: f at each vertex, in vertex order. Zero iff inscribed.
ResidualValue residual_levelset(const ImplicitBody& body, const CrossConfig& config);

/// Chord lengths via ray casting; requires a convex body, interior p, regular frame.
ChordData chords(const ImplicitBody& body, const Vec& p, const Rotation& rho, const BaseFrame& frame);

/// Projection (t_1..t_d, s_1 - s_mean, ..., s_{d-1} - s_mean); invariant under adding
/// a constant to every s_i, which quotients out the diagonal line.
Vec chord_projection(const ChordData& data);

/// Chord residual; zero iff p centers an inscribed regular crosspolytope of scale s_mean/2.
ResidualValue residual_chord(const ImplicitBody& body, const Vec& p, const Rotation& rho,
                             const BaseFrame& frame);

/// Chart layout: center (d), then scale (levelset only), then rotation tangent.
int chart_dim(int d, ResidualForm form);

/// Moves a configuration by a chart step (retraction on the rotation block).
CrossConfig apply_chart_step(const CrossConfig& config, const Vec& step, ResidualForm form);

/// Analytic Jacobian of the residual with respect to the chart at the configuration.
/// Level-set rows use the body gradient; chord rows use implicit differentiation of
/// the ray intersections.
Mat residual_jacobian(const ImplicitBody& body, const CrossConfig& config, ResidualForm form);

/// Central-difference Jacobian over the same chart.
Mat residual_jacobian_fd(const ImplicitBody& body, const CrossConfig& config, ResidualForm form,
                         double step = 1e-6);

/// Signed permutation sigma(e_i) = sign[i] * e_{target[i]}, used for the
/// coordinate-permutation symmetry of both residual forms.
struct SignedPermutation {
  std::vector<int> target;
  std::vector<int> sign;

  int dim() const { return static_cast<int>(target.size()); }
  Mat matrix() const;
  int det() const;

  /// Index map on residual entries: residual(rho * sigma)[k] = residual(rho)[map[k]].
  std::vector<int> induced_vertex_permutation() const;

  /// Uniform random signed permutation conditioned on det = +1.
  static SignedPermutation random(std::uint64_t seed, int d);
};

nlohmann::json config_to_json(const CrossConfig& config);
CrossConfig config_from_json(const nlohmann::json& doc);

}  // namespace crossfit
