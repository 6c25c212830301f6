#include "crossfit/configuration.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace crossfit {

int tangent_dim(int d) { return d * (d - 1) / 2; }

Mat skew_from_tangent(const Vec& omega, int d) {
  if (omega.size() != tangent_dim(d))
    throw InputError("skew_from_tangent: tangent vector has wrong length");
  Mat s = Mat::Zero(d, d);
  int k = 0;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j, ++k) {
      s(j, i) = omega[k];
      s(i, j) = -omega[k];
    }
  return s;
}

Vec tangent_from_skew(const Mat& s) {
  const int d = static_cast<int>(s.rows());
  Vec omega(tangent_dim(d));
  int k = 0;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j, ++k) omega[k] = s(j, i);
  return omega;
}

Rotation::Rotation(Mat m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() < 1)
    throw InputError("Rotation: matrix must be square");
  const int d = static_cast<int>(m_.rows());
  const double defect = (m_.transpose() * m_ - Mat::Identity(d, d)).cwiseAbs().maxCoeff();
  if (defect >= 1e-10) {
    std::ostringstream os;
    os << "Rotation: matrix is not orthonormal (defect " << defect << ")";
    throw InputError(os.str());
  }
  if (m_.determinant() <= 0.0) throw InputError("Rotation: determinant must be positive");
}

Rotation Rotation::identity(int d) { return Rotation(Mat::Identity(d, d)); }

Rotation Rotation::reorthonormalized() const {
  Eigen::HouseholderQR<Mat> qr(m_);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < q.cols(); ++i)
    if (r(i, i) < 0.0) q.col(i) = -q.col(i);
  if (q.determinant() < 0.0) q.col(q.cols() - 1) = -q.col(q.cols() - 1);
  return Rotation(std::move(q));
}

Rotation retract(const Rotation& rho, const Vec& omega) {
  const Mat s = skew_from_tangent(omega, rho.dim());
  return Rotation(rho.matrix() * s.exp());
}

Vec rotation_log(const Rotation& from, const Rotation& to) {
  const Mat rel = from.matrix().transpose() * to.matrix();
  Mat l = rel.log();
  // A principal log of a rotation is skew; symmetrize away rounding.
  l = 0.5 * (l - l.transpose().eval());
  return tangent_from_skew(l);
}

Rotation random_rotation(std::uint64_t seed, int d) {
  if (d < 2) throw InputError("random_rotation: dimension must be >= 2");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = normal(rng);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i)
    if (r(i, i) < 0.0) q.col(i) = -q.col(i);
  if (q.determinant() < 0.0) q.col(d - 1) = -q.col(d - 1);
  return Rotation(std::move(q));
}

BaseFrame::BaseFrame(Mat columns) : m_(std::move(columns)) {
  if (m_.rows() != m_.cols() || m_.rows() < 1)
    throw InputError("BaseFrame: matrix must be square");
  Eigen::FullPivLU<Mat> lu(m_);
  if (!lu.isInvertible()) throw InputError("BaseFrame: columns must be linearly independent");
  const int d = static_cast<int>(m_.rows());
  const double defect = (m_.transpose() * m_ - Mat::Identity(d, d)).cwiseAbs().maxCoeff();
  regular_ = defect < 1e-12;
}

BaseFrame BaseFrame::standard(int d) { return BaseFrame(Mat::Identity(d, d)); }

CrossConfig::CrossConfig(Vec center_, double scale_, Rotation rotation_, BaseFrame frame_)
    : center(std::move(center_)),
      scale(scale_),
      rotation(std::move(rotation_)),
      frame(std::move(frame_)) {
  if (!(scale > 0.0)) throw InputError("CrossConfig: scale must be positive");
  const int d = rotation.dim();
  if (center.size() != d || frame.dim() != d)
    throw InputError("CrossConfig: center, rotation and frame dimensions must agree");
}

std::vector<Vec> vertices(const CrossConfig& config) {
  const Mat axes = config.axes();
  const int d = config.dim();
  std::vector<Vec> out;
  out.reserve(2 * d);
  for (int i = 0; i < d; ++i) {
    const Vec dir = config.scale * axes.col(i);
    out.push_back(config.center + dir);
    out.push_back(config.center - dir);
  }
  return out;
}

ResidualValue residual_levelset(const ImplicitBody& body, const CrossConfig& config) {
  if (body.dim() != config.dim())
    throw InputError("residual_levelset: body and configuration dimensions differ");
  const int d = config.dim();
  const Mat axes = config.axes();
  ResidualValue r{ResidualForm::levelset, Vec(2 * d)};
  Vec v(d);
  for (int i = 0; i < d; ++i) {
    const Vec dir = config.scale * axes.col(i);
    v = config.center + dir;
    r.values[2 * i] = body.evaluate(v);
    v = config.center - dir;
    r.values[2 * i + 1] = body.evaluate(v);
  }
  return r;
}

ChordData chords(const ImplicitBody& body, const Vec& p, const Rotation& rho,
                 const BaseFrame& frame) {
  if (!body.convex())
    throw UnsupportedFormError("chords: chord form requires a convex body");
  if (body.dim() != rho.dim() || frame.dim() != rho.dim() || p.size() != rho.dim())
    throw InputError("chords: dimension mismatch");
  if (!frame.regular()) throw PreconditionError("chords: frame must be regular (orthonormal)");
  if (!(body.evaluate(p) < 0.0))
    throw PreconditionError("chords: center is not strictly interior");
  const int d = body.dim();
  const Mat axes = rho.matrix() * frame.matrix();
  ChordData data{Vec(d), Vec(d), Vec(d), Vec(d)};
  for (int i = 0; i < d; ++i) {
    const Vec u = axes.col(i).normalized();
    data.a[i] = body.ray_intersect(p, u);
    data.b[i] = body.ray_intersect(p, -u);
  }
  data.s = data.a + data.b;
  data.t = data.a - data.b;
  return data;
}

Vec chord_projection(const ChordData& data) {
  const int d = static_cast<int>(data.s.size());
  const double mean = data.s.mean();
  Vec out(2 * d - 1);
  out.head(d) = data.t;
  for (int i = 0; i < d - 1; ++i) out[d + i] = data.s[i] - mean;
  return out;
}

ResidualValue residual_chord(const ImplicitBody& body, const Vec& p, const Rotation& rho,
                             const BaseFrame& frame) {
  return ResidualValue{ResidualForm::chord, chord_projection(chords(body, p, rho, frame))};
}

int chart_dim(int d, ResidualForm form) {
  return d + (form == ResidualForm::levelset ? 1 : 0) + tangent_dim(d);
}

CrossConfig apply_chart_step(const CrossConfig& config, const Vec& step, ResidualForm form) {
  const int d = config.dim();
  if (step.size() != chart_dim(d, form)) throw InputError("apply_chart_step: wrong step length");
  const Vec center = config.center + step.head(d);
  const double scale =
      config.scale + (form == ResidualForm::levelset ? step[d] : 0.0);
  const Vec omega = step.tail(tangent_dim(d));
  return CrossConfig(center, scale, retract(config.rotation, omega), config.frame);
}

namespace {

// Directional derivative of the rotated frame column c with respect to tangent
// coordinate k = (i < j): u_i * rho.col(j) - u_j * rho.col(i) with u = E.col(c).
Vec axis_tangent_derivative(const Mat& rho, const Mat& frame, int c, int i, int j) {
  return frame(i, c) * rho.col(j) - frame(j, c) * rho.col(i);
}

}  // namespace

Mat residual_jacobian(const ImplicitBody& body, const CrossConfig& config, ResidualForm form) {
  const int d = config.dim();
  const int t_dim = tangent_dim(d);
  const Mat& rho = config.rotation.matrix();
  const Mat& fr = config.frame.matrix();
  const Mat axes = rho * fr;

  if (form == ResidualForm::levelset) {
    if (body.dim() != d) throw InputError("residual_jacobian: dimension mismatch");
    Mat jac(2 * d, chart_dim(d, form));
    Vec v(d);
    for (int c = 0; c < d; ++c) {
      const Vec dir = axes.col(c);
      for (int sign = 0; sign < 2; ++sign) {
        const double sgn = sign == 0 ? 1.0 : -1.0;
        const int row = 2 * c + sign;
        v = config.center + sgn * config.scale * dir;
        const Vec g = body.gradient(v);
        jac.block(row, 0, 1, d) = g.transpose();
        jac(row, d) = sgn * g.dot(dir);
        int k = 0;
        for (int i = 0; i < d; ++i)
          for (int j = i + 1; j < d; ++j, ++k) {
            const Vec w = axis_tangent_derivative(rho, fr, c, i, j);
            jac(row, d + 1 + k) = sgn * config.scale * g.dot(w);
          }
      }
    }
    return jac;
  }

  // Chord form: rows are t_1..t_d then s_i - s_mean for i < d; columns center + tangent.
  const ChordData data = chords(body, config.center, config.rotation, config.frame);
  Mat da(d, d + t_dim);
  Mat db(d, d + t_dim);
  for (int c = 0; c < d; ++c) {
    const Vec u = axes.col(c).normalized();
    const Vec qf = config.center + data.a[c] * u;
    const Vec qb = config.center - data.b[c] * u;
    const Vec gf = body.gradient(qf);
    const Vec gb = body.gradient(qb);
    const double den_f = gf.dot(u);
    const double den_b = gb.dot(u);
    if (std::abs(den_f) < 1e-14 || std::abs(den_b) < 1e-14)
      throw Error("residual_jacobian: tangential chord (zero directional gradient)");
    da.block(c, 0, 1, d) = -gf.transpose() / den_f;
    db.block(c, 0, 1, d) = gb.transpose() / den_b;
    int k = 0;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j, ++k) {
        const Vec w = axis_tangent_derivative(rho, fr, c, i, j);
        da(c, d + k) = -data.a[c] * gf.dot(w) / den_f;
        db(c, d + k) = -data.b[c] * gb.dot(w) / den_b;
      }
  }
  const Mat dt = da - db;
  const Mat ds = da + db;
  const Eigen::RowVectorXd mean_row = ds.colwise().mean();
  Mat jac(2 * d - 1, d + t_dim);
  jac.topRows(d) = dt;
  for (int i = 0; i < d - 1; ++i) jac.row(d + i) = ds.row(i) - mean_row;
  return jac;
}

Mat residual_jacobian_fd(const ImplicitBody& body, const CrossConfig& config, ResidualForm form,
                         double step) {
  const int n = chart_dim(config.dim(), form);
  auto eval = [&](const CrossConfig& c) -> Vec {
    if (form == ResidualForm::levelset) return residual_levelset(body, c).values;
    return residual_chord(body, c.center, c.rotation, c.frame).values;
  };
  const int rows = form == ResidualForm::levelset ? 2 * config.dim() : 2 * config.dim() - 1;
  Mat jac(rows, n);
  Vec delta = Vec::Zero(n);
  for (int k = 0; k < n; ++k) {
    delta[k] = step;
    const Vec plus = eval(apply_chart_step(config, delta, form));
    delta[k] = -step;
    const Vec minus = eval(apply_chart_step(config, delta, form));
    delta[k] = 0.0;
    jac.col(k) = (plus - minus) / (2.0 * step);
  }
  return jac;
}

Mat SignedPermutation::matrix() const {
  const int d = dim();
  Mat m = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) m(target[i], i) = static_cast<double>(sign[i]);
  return m;
}

int SignedPermutation::det() const {
  const int d = dim();
  int parity = 1;
  std::vector<bool> seen(d, false);
  for (int i = 0; i < d; ++i) {
    if (seen[i]) continue;
    int len = 0;
    for (int j = i; !seen[j]; j = target[j]) {
      seen[j] = true;
      ++len;
    }
    if (len % 2 == 0) parity = -parity;
  }
  for (int s : sign) parity *= s;
  return parity;
}

std::vector<int> SignedPermutation::induced_vertex_permutation() const {
  const int d = dim();
  std::vector<int> map(2 * d);
  for (int i = 0; i < d; ++i) {
    const int j = target[i];
    if (sign[i] > 0) {
      map[2 * i] = 2 * j;
      map[2 * i + 1] = 2 * j + 1;
    } else {
      map[2 * i] = 2 * j + 1;
      map[2 * i + 1] = 2 * j;
    }
  }
  return map;
}

SignedPermutation SignedPermutation::random(std::uint64_t seed, int d) {
  std::mt19937_64 rng(seed);
  SignedPermutation sigma;
  sigma.target.resize(d);
  sigma.sign.resize(d);
  std::iota(sigma.target.begin(), sigma.target.end(), 0);
  std::shuffle(sigma.target.begin(), sigma.target.end(), rng);
  for (int i = 0; i < d; ++i) sigma.sign[i] = (rng() & 1) ? 1 : -1;
  if (sigma.det() < 0) sigma.sign[d - 1] = -sigma.sign[d - 1];
  return sigma;
}

nlohmann::json config_to_json(const CrossConfig& config) {
  nlohmann::json doc;
  const int d = config.dim();
  doc["center"] = std::vector<double>(config.center.data(), config.center.data() + d);
  doc["scale"] = config.scale;
  nlohmann::json rot = nlohmann::json::array();
  for (int i = 0; i < d; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < d; ++j) row.push_back(config.rotation.matrix()(i, j));
    rot.push_back(std::move(row));
  }
  doc["rotation"] = std::move(rot);
  if (!config.frame.matrix().isIdentity(0.0)) {
    nlohmann::json fr = nlohmann::json::array();
    for (int i = 0; i < d; ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (int j = 0; j < d; ++j) row.push_back(config.frame.matrix()(i, j));
      fr.push_back(std::move(row));
    }
    doc["frame"] = std::move(fr);
  }
  return doc;
}

namespace {

Mat parse_matrix(const nlohmann::json& doc, const std::string& path) {
  if (!doc.is_array() || doc.empty()) throw ParseError(path, "must be a non-empty array of rows");
  const size_t d = doc.size();
  Mat m(d, d);
  for (size_t i = 0; i < d; ++i) {
    const nlohmann::json& row = doc[i];
    if (!row.is_array() || row.size() != d)
      throw ParseError(path + "[" + std::to_string(i) + "]", "must be a row of matching length");
    for (size_t j = 0; j < d; ++j) {
      if (!row[j].is_number())
        throw ParseError(path + "[" + std::to_string(i) + "][" + std::to_string(j) + "]",
                         "must be a number");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j].get<double>();
    }
  }
  return m;
}

}  // namespace

CrossConfig config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("", "configuration must be a JSON object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& k = it.key();
    if (k != "center" && k != "scale" && k != "rotation" && k != "frame")
      throw ParseError(k, "unknown field");
  }
  if (!doc.contains("center")) throw ParseError("center", "missing");
  if (!doc.contains("scale")) throw ParseError("scale", "missing");
  if (!doc.contains("rotation")) throw ParseError("rotation", "missing");
  const nlohmann::json& c = doc.at("center");
  if (!c.is_array() || c.empty()) throw ParseError("center", "must be a non-empty array");
  Vec center(c.size());
  for (size_t i = 0; i < c.size(); ++i) {
    if (!c[i].is_number()) throw ParseError("center[" + std::to_string(i) + "]", "must be a number");
    center[static_cast<Eigen::Index>(i)] = c[i].get<double>();
  }
  if (!doc.at("scale").is_number()) throw ParseError("scale", "must be a number");
  const double scale = doc.at("scale").get<double>();
  Mat rot = parse_matrix(doc.at("rotation"), "rotation");
  try {
    Rotation rho(std::move(rot));
    BaseFrame frame = doc.contains("frame")
                          ? BaseFrame(parse_matrix(doc.at("frame"), "frame"))
                          : BaseFrame::standard(static_cast<int>(center.size()));
    return CrossConfig(std::move(center), scale, std::move(rho), std::move(frame));
  } catch (const ParseError&) {
    throw;
  } catch (const InputError& e) {
    throw ParseError("", e.what());
  }
}

}  // namespace crossfit
