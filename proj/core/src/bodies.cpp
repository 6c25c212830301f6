#include "crossfit/bodies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>

namespace crossfit {

namespace {

double ipow(double x, int n) {
  double r = 1.0;
  double base = x;
  for (int e = n; e > 0; e >>= 1) {
    if (e & 1) r *= base;
    base *= base;
  }
  return r;
}

void check_dim(int expected, const Vec& x, const char* what) {
  if (x.size() != expected) {
    std::ostringstream os;
    os << what << ": expected dimension " << expected << ", got " << x.size();
    throw InputError(os.str());
  }
}

}  // namespace

std::string to_string(BodyKind kind) {
  switch (kind) {
    case BodyKind::ball: return "ball";
    case BodyKind::ellipsoid: return "ellipsoid";
    case BodyKind::superellipsoid: return "superellipsoid";
    case BodyKind::smoothed_polytope: return "smoothed_polytope";
    case BodyKind::perturbed_sphere: return "perturbed_sphere";
    case BodyKind::blend: return "blend";
  }
  return "unknown";
}

struct ImplicitBody::Data {
  BodyKind kind = BodyKind::ball;
  int dim = 0;
  bool convex = false;
  bool symmetric = false;
  Vec interior;

  double radius = 1.0;
  Vec semi_axes;
  Vec inv_axes;  // 1/a_i, cached
  int exponent = 2;
  std::vector<Halfspace> faces;
  double sharpness = 1.0;
  std::vector<RadialTerm> terms;

  std::shared_ptr<const Data> blend_start;
  std::shared_ptr<const Data> blend_end;
  double blend_t = 0.0;

  mutable std::once_flag radii_once;
  mutable double circumradius = 0.0;
  mutable double inradius = 0.0;

  double eval(const Vec& x) const;
  void grad(const Vec& x, Vec& out) const;
};

double ImplicitBody::Data::eval(const Vec& x) const {
  const double* p = x.data();
  switch (kind) {
    case BodyKind::ball:
      return x.squaredNorm() - radius * radius;
    case BodyKind::ellipsoid: {
      double s = 0.0;
      for (int i = 0; i < dim; ++i) {
        const double z = p[i] * inv_axes[i];
        s += z * z;
      }
      return s - 1.0;
    }
    case BodyKind::superellipsoid: {
      double s = 0.0;
      for (int i = 0; i < dim; ++i) s += ipow(p[i] * inv_axes[i], exponent);
      return s - 1.0;
    }
    case BodyKind::smoothed_polytope: {
      double hmax = -std::numeric_limits<double>::infinity();
      for (const Halfspace& f : faces) {
        const double h = sharpness * (f.normal.dot(x) - f.offset);
        hmax = std::max(hmax, h);
      }
      double acc = 0.0;
      for (const Halfspace& f : faces) {
        const double h = sharpness * (f.normal.dot(x) - f.offset);
        acc += std::exp(h - hmax);
      }
      return (hmax + std::log(acc)) / sharpness;
    }
    case BodyKind::perturbed_sphere: {
      const double rho = x.norm();
      if (rho < 1e-12) return -1.0;
      double r = 1.0;
      for (const RadialTerm& t : terms) {
        double m = t.coeff;
        for (int i = 0; i < dim; ++i)
          if (t.powers[i] != 0) m *= ipow(p[i] / rho, t.powers[i]);
        r += m;
      }
      return rho - r;
    }
    case BodyKind::blend:
      return (1.0 - blend_t) * blend_start->eval(x) + blend_t * blend_end->eval(x);
  }
  return 0.0;
}

void ImplicitBody::Data::grad(const Vec& x, Vec& out) const {
  switch (kind) {
    case BodyKind::ball:
      out = 2.0 * x;
      return;
    case BodyKind::ellipsoid:
      for (int i = 0; i < dim; ++i) out[i] = 2.0 * x[i] * inv_axes[i] * inv_axes[i];
      return;
    case BodyKind::superellipsoid:
      for (int i = 0; i < dim; ++i)
        out[i] = exponent * inv_axes[i] * ipow(x[i] * inv_axes[i], exponent - 1);
      return;
    case BodyKind::smoothed_polytope: {
      double hmax = -std::numeric_limits<double>::infinity();
      for (const Halfspace& f : faces)
        hmax = std::max(hmax, sharpness * (f.normal.dot(x) - f.offset));
      double acc = 0.0;
      out.setZero();
      for (const Halfspace& f : faces) {
        const double w = std::exp(sharpness * (f.normal.dot(x) - f.offset) - hmax);
        acc += w;
        out += w * f.normal;
      }
      out /= acc;
      return;
    }
    case BodyKind::perturbed_sphere: {
      const double rho = x.norm();
      if (rho < 1e-12) {
        out.setZero();
        return;
      }
      const Vec u = x / rho;
      Vec gu = Vec::Zero(dim);
      for (const RadialTerm& t : terms) {
        for (int k = 0; k < dim; ++k) {
          if (t.powers[k] == 0) continue;
          double m = t.coeff * t.powers[k] * ipow(u[k], t.powers[k] - 1);
          for (int i = 0; i < dim; ++i)
            if (i != k && t.powers[i] != 0) m *= ipow(u[i], t.powers[i]);
          gu[k] += m;
        }
      }
      // d/dx r(x/|x|) = (I - u u^T) g_u / rho
      out = u - (gu - u * u.dot(gu)) / rho;
      return;
    }
    case BodyKind::blend: {
      Vec ge(dim);
      blend_start->grad(x, out);
      blend_end->grad(x, ge);
      out = (1.0 - blend_t) * out + blend_t * ge;
      return;
    }
  }
}

ImplicitBody ImplicitBody::make_ball(int dim, double radius) {
  if (dim < 1) throw InputError("ball: dimension must be positive");
  if (!(radius > 0.0)) throw InputError("ball: radius must be positive");
  auto d = std::make_shared<Data>();
  d->kind = BodyKind::ball;
  d->dim = dim;
  d->radius = radius;
  d->convex = true;
  d->symmetric = true;
  d->interior = Vec::Zero(dim);
  return ImplicitBody(std::move(d));
}

ImplicitBody ImplicitBody::make_ellipsoid(Vec semi_axes) {
  const int dim = static_cast<int>(semi_axes.size());
  if (dim < 1) throw InputError("ellipsoid: semi_axes must be non-empty");
  if ((semi_axes.array() <= 0.0).any()) throw InputError("ellipsoid: semi_axes must be positive");
  auto d = std::make_shared<Data>();
  d->kind = BodyKind::ellipsoid;
  d->dim = dim;
  d->semi_axes = std::move(semi_axes);
  d->inv_axes = d->semi_axes.cwiseInverse();
  d->convex = true;
  d->symmetric = true;
  d->interior = Vec::Zero(dim);
  return ImplicitBody(std::move(d));
}

ImplicitBody ImplicitBody::make_superellipsoid(Vec semi_axes, int exponent) {
  const int dim = static_cast<int>(semi_axes.size());
  if (dim < 1) throw InputError("superellipsoid: semi_axes must be non-empty");
  if ((semi_axes.array() <= 0.0).any())
    throw InputError("superellipsoid: semi_axes must be positive");
  if (exponent < 2 || exponent % 2 != 0)
    throw InputError("superellipsoid: exponent must be even and >= 2");
  auto d = std::make_shared<Data>();
  d->kind = BodyKind::superellipsoid;
  d->dim = dim;
  d->semi_axes = std::move(semi_axes);
  d->inv_axes = d->semi_axes.cwiseInverse();
  d->exponent = exponent;
  d->convex = true;
  d->symmetric = true;
  d->interior = Vec::Zero(dim);
  return ImplicitBody(std::move(d));
}

ImplicitBody ImplicitBody::make_smoothed_polytope(std::vector<Halfspace> faces, double sharpness) {
  if (faces.empty()) throw InputError("smoothed_polytope: needs at least one halfspace");
  if (!(sharpness > 0.0)) throw InputError("smoothed_polytope: sharpness must be positive");
  const int dim = static_cast<int>(faces.front().normal.size());
  if (dim < 1) throw InputError("smoothed_polytope: normals must be non-empty");
  for (const Halfspace& f : faces) {
    if (f.normal.size() != dim) throw InputError("smoothed_polytope: inconsistent normal dimensions");
    if (f.normal.norm() < 1e-12) throw InputError("smoothed_polytope: zero normal");
  }
  auto d = std::make_shared<Data>();
  d->kind = BodyKind::smoothed_polytope;
  d->dim = dim;
  d->faces = std::move(faces);
  d->sharpness = sharpness;
  d->convex = true;
  // Centrally symmetric iff the face list pairs every (n, c) with (-n, c).
  d->symmetric = true;
  for (const Halfspace& f : d->faces) {
    bool paired = false;
    for (const Halfspace& g : d->faces) {
      if ((f.normal + g.normal).lpNorm<Eigen::Infinity>() < 1e-12 &&
          std::abs(f.offset - g.offset) < 1e-12) {
        paired = true;
        break;
      }
    }
    if (!paired) {
      d->symmetric = false;
      break;
    }
  }

  // Start from the origin; descend if it is not already interior.
  Vec z = Vec::Zero(dim);
  double fz = d->eval(z);
  double step = 0.1;
  Vec g(dim), trial(dim);
  for (int it = 0; it < 1000 && fz >= 0.0; ++it) {
    d->grad(z, g);
    const double gn = g.norm();
    if (gn < 1e-14 || step < 1e-16) break;
    trial = z - (step / gn) * g;
    const double ft = d->eval(trial);
    if (ft < fz) {
      z.swap(trial);
      fz = ft;
      step *= 1.5;
    } else {
      step *= 0.5;
    }
  }
  if (fz >= 0.0) throw InputError("smoothed_polytope: could not find an interior point");
  d->interior = std::move(z);
  return ImplicitBody(std::move(d));
}

ImplicitBody ImplicitBody::make_perturbed_sphere(int dim, std::vector<RadialTerm> terms) {
  if (dim < 1) throw InputError("perturbed_sphere: dimension must be positive");
  double total = 0.0;
  bool symmetric = true;
  for (const RadialTerm& t : terms) {
    if (static_cast<int>(t.powers.size()) != dim)
      throw InputError("perturbed_sphere: monomial length must equal dimension");
    int degree = 0;
    for (int p : t.powers) {
      if (p < 0) throw InputError("perturbed_sphere: monomial powers must be non-negative");
      degree += p;
    }
    if (degree % 2 != 0 && t.coeff != 0.0) symmetric = false;
    total += std::abs(t.coeff);
  }
  if (total >= 0.5)
    throw InputError("perturbed_sphere: sum of |coeff| must be < 0.5 to keep the surface star-shaped");
  auto d = std::make_shared<Data>();
  d->kind = BodyKind::perturbed_sphere;
  d->dim = dim;
  d->terms = std::move(terms);
  d->convex = false;
  d->symmetric = symmetric;
  d->interior = Vec::Zero(dim);
  return ImplicitBody(std::move(d));
}

ImplicitBody ImplicitBody::make_blend(ImplicitBody start, ImplicitBody end, double t, Vec interior) {
  if (start.dim() != end.dim()) throw InputError("blend: dimension mismatch");
  auto d = std::make_shared<Data>();
  d->kind = BodyKind::blend;
  d->dim = start.dim();
  d->convex = start.convex() && end.convex();
  d->symmetric = start.centrally_symmetric() && end.centrally_symmetric();
  d->blend_start = start.data_;
  d->blend_end = end.data_;
  d->blend_t = t;
  d->interior = std::move(interior);
  check_dim(d->dim, d->interior, "blend interior point");
  return ImplicitBody(std::move(d));
}

BodyKind ImplicitBody::kind() const { return data_->kind; }
int ImplicitBody::dim() const { return data_->dim; }
bool ImplicitBody::convex() const { return data_->convex; }
bool ImplicitBody::centrally_symmetric() const { return data_->symmetric; }
const Vec& ImplicitBody::interior_point() const { return data_->interior; }

double ImplicitBody::evaluate(const Vec& x) const {
  check_dim(data_->dim, x, "evaluate");
  return data_->eval(x);
}

Vec ImplicitBody::gradient(const Vec& x) const {
  check_dim(data_->dim, x, "gradient");
  Vec g(data_->dim);
  data_->grad(x, g);
  return g;
}

double ImplicitBody::ray_intersect(const Vec& origin, const Vec& direction) const {
  check_dim(data_->dim, origin, "ray_intersect origin");
  check_dim(data_->dim, direction, "ray_intersect direction");
  if (std::abs(direction.norm() - 1.0) > 1e-12)
    throw InputError("ray_intersect: direction must be unit length");
  const double f0 = data_->eval(origin);
  if (!(f0 < 0.0)) throw PreconditionError("ray_intersect: origin is not strictly interior");

  if (data_->kind == BodyKind::ellipsoid) {
    // f(p + a d) is an exact quadratic in a; one positive root since f(p) < 0.
    double A = 0.0, B = 0.0;
    for (int i = 0; i < data_->dim; ++i) {
      const double w = data_->inv_axes[i] * data_->inv_axes[i];
      A += direction[i] * direction[i] * w;
      B += 2.0 * origin[i] * direction[i] * w;
    }
    const double C = f0;
    const double disc = B * B - 4.0 * A * C;
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (B + std::copysign(sq, B));
    const double r1 = q / A;
    const double r2 = (q != 0.0) ? C / q : 0.0;
    return std::max(r1, r2);
  }

  constexpr double kTol = 1e-12;
  const double a0 = 1e-3 * (1.0 + origin.norm());
  const double cap = std::ldexp(a0, 40);
  Vec x(data_->dim);
  double lo = 0.0;
  double hi = a0;
  double fhi;
  for (;;) {
    x.noalias() = origin + hi * direction;
    fhi = data_->eval(x);
    if (fhi >= 0.0) break;
    lo = hi;
    hi *= 2.0;
    if (hi > cap) throw NoIntersectionError("ray_intersect: ray never left the body (bracket cap exceeded)");
  }
  if (fhi == 0.0) return hi;

  // Safeguarded Newton within the sign-change bracket.
  double a = 0.5 * (lo + hi);
  Vec g(data_->dim);
  for (int it = 0; it < 200; ++it) {
    x.noalias() = origin + a * direction;
    const double fa = data_->eval(x);
    if (std::abs(fa) <= kTol) return a;
    if (fa > 0.0)
      hi = a;
    else
      lo = a;
    data_->grad(x, g);
    const double slope = g.dot(direction);
    double next = (slope != 0.0) ? a - fa / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    a = next;
  }
  throw Error("ray_intersect: root refinement failed to reach tolerance");
}

namespace {

void sample_radii(const ImplicitBody& body, double& circum, double& inrad) {
  const int d = body.dim();
  const Vec& p = body.interior_point();
  std::vector<Vec> dirs;
  dirs.reserve(2 * d + 32);
  for (int i = 0; i < d; ++i) {
    Vec e = Vec::Zero(d);
    e[i] = 1.0;
    dirs.push_back(e);
    dirs.push_back(-e);
  }
  std::mt19937_64 rng(0x5eedULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int k = 0; k < 32; ++k) {
    Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = normal(rng);
    const double n = v.norm();
    if (n < 1e-12) continue;
    dirs.push_back(v / n);
  }
  circum = 0.0;
  inrad = std::numeric_limits<double>::infinity();
  for (const Vec& u : dirs) {
    const double a = body.ray_intersect(p, u);
    circum = std::max(circum, a);
    inrad = std::min(inrad, a);
  }
}

}  // namespace

double ImplicitBody::circumradius_estimate() const {
  std::call_once(data_->radii_once, [this] {
    sample_radii(*this, data_->circumradius, data_->inradius);
  });
  return data_->circumradius;
}

double ImplicitBody::inradius_estimate() const {
  std::call_once(data_->radii_once, [this] {
    sample_radii(*this, data_->circumradius, data_->inradius);
  });
  return data_->inradius;
}

double ImplicitBody::radius() const { return data_->radius; }
const Vec& ImplicitBody::semi_axes() const { return data_->semi_axes; }
int ImplicitBody::exponent() const { return data_->exponent; }
const std::vector<Halfspace>& ImplicitBody::halfspaces() const { return data_->faces; }
double ImplicitBody::sharpness() const { return data_->sharpness; }
const std::vector<RadialTerm>& ImplicitBody::radial_terms() const { return data_->terms; }

HomotopyFamily::HomotopyFamily(ImplicitBody start, ImplicitBody end)
    : start_(std::move(start)), end_(std::move(end)) {
  if (start_.dim() != end_.dim()) throw InputError("HomotopyFamily: dimension mismatch");
}

ImplicitBody HomotopyFamily::body_at(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) throw InputError("body_at: t must lie in [0, 1]");
  if (t == 0.0) return start_;
  if (t == 1.0) return end_;

  ImplicitBody blended = ImplicitBody::make_blend(start_, end_, t, start_.interior_point());
  if (blended.evaluate(start_.interior_point()) < 0.0) return blended;

  // The start body's interior point left the blend; chase one by damped descent.
  Vec z = start_.interior_point();
  double fz = blended.evaluate(z);
  double step = 0.1 * (1.0 + z.norm());
  for (int it = 0; it < 1000 && fz >= 0.0; ++it) {
    Vec g = blended.gradient(z);
    const double gn = g.norm();
    if (gn < 1e-14 || step < 1e-16) break;
    Vec trial = z - (step / gn) * g;
    const double ft = blended.evaluate(trial);
    if (ft < fz) {
      z = std::move(trial);
      fz = ft;
      step *= 1.5;
    } else {
      step *= 0.5;
    }
  }
  if (fz >= 0.0)
    throw DegenerateFamilyError("body_at: blended body has no reachable interior point");
  return ImplicitBody::make_blend(start_, end_, t, std::move(z));
}

// --- JSON schema ---------------------------------------------------------

namespace {

using nlohmann::json;

void reject_unknown_fields(const json& doc, std::initializer_list<const char*> allowed) {
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    bool known = false;
    for (const char* a : allowed)
      if (it.key() == a) known = true;
    if (!known) throw ParseError(it.key(), "unknown field");
  }
}

int parse_dim_field(const json& doc) {
  const json& v = doc.at("dim");
  if (!v.is_number_integer()) throw ParseError("dim", "must be an integer");
  const long long dim = v.get<long long>();
  if (dim < 1) throw ParseError("dim", "must be a positive integer");
  return static_cast<int>(dim);
}

double parse_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ParseError(path, "must be a number");
  return v.get<double>();
}

Vec parse_vector(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) throw ParseError(path, "must be a non-empty array of numbers");
  Vec out(v.size());
  for (size_t i = 0; i < v.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = parse_number(v[i], path + "[" + std::to_string(i) + "]");
  return out;
}

int check_implied_dim(const json& doc, int implied, const std::string& source) {
  if (doc.contains("dim")) {
    const int dim = parse_dim_field(doc);
    if (dim != implied)
      throw ParseError("dim", "does not match the length of " + source);
  }
  return implied;
}

}  // namespace

ImplicitBody parse_body(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("", "body document must be a JSON object");
  if (!doc.contains("kind")) throw ParseError("kind", "missing");
  if (!doc.at("kind").is_string()) throw ParseError("kind", "must be a string");
  const std::string kind = doc.at("kind").get<std::string>();

  try {
    if (kind == "ball") {
      reject_unknown_fields(doc, {"kind", "dim", "radius"});
      if (!doc.contains("dim")) throw ParseError("dim", "missing (required for ball)");
      const int dim = parse_dim_field(doc);
      const double radius = doc.contains("radius") ? parse_number(doc.at("radius"), "radius") : 1.0;
      if (!(radius > 0.0)) throw ParseError("radius", "must be positive");
      return ImplicitBody::make_ball(dim, radius);
    }
    if (kind == "ellipsoid" || kind == "superellipsoid") {
      if (kind == "ellipsoid")
        reject_unknown_fields(doc, {"kind", "dim", "semi_axes"});
      else
        reject_unknown_fields(doc, {"kind", "dim", "semi_axes", "exponent"});
      if (!doc.contains("semi_axes")) throw ParseError("semi_axes", "missing");
      Vec axes = parse_vector(doc.at("semi_axes"), "semi_axes");
      check_implied_dim(doc, static_cast<int>(axes.size()), "semi_axes");
      if ((axes.array() <= 0.0).any()) throw ParseError("semi_axes", "entries must be positive");
      if (kind == "ellipsoid") return ImplicitBody::make_ellipsoid(std::move(axes));
      if (!doc.contains("exponent")) throw ParseError("exponent", "missing");
      if (!doc.at("exponent").is_number_integer()) throw ParseError("exponent", "must be an integer");
      const long long expn = doc.at("exponent").get<long long>();
      if (expn < 2 || expn % 2 != 0)
        throw ParseError("exponent", "must be even and >= 2 (odd powers are not smooth)");
      return ImplicitBody::make_superellipsoid(std::move(axes), static_cast<int>(expn));
    }
    if (kind == "smoothed_polytope") {
      reject_unknown_fields(doc, {"kind", "dim", "halfspaces", "sharpness"});
      if (!doc.contains("halfspaces")) throw ParseError("halfspaces", "missing");
      if (!doc.contains("sharpness")) throw ParseError("sharpness", "missing");
      const double sharpness = parse_number(doc.at("sharpness"), "sharpness");
      if (!(sharpness > 0.0)) throw ParseError("sharpness", "must be > 0");
      const json& hs = doc.at("halfspaces");
      if (!hs.is_array() || hs.empty()) throw ParseError("halfspaces", "must be a non-empty array");
      std::vector<Halfspace> faces;
      faces.reserve(hs.size());
      for (size_t j = 0; j < hs.size(); ++j) {
        const std::string path = "halfspaces[" + std::to_string(j) + "]";
        const json& h = hs[j];
        if (!h.is_object()) throw ParseError(path, "must be an object");
        reject_unknown_fields(h, {"normal", "offset"});
        if (!h.contains("normal")) throw ParseError(path + ".normal", "missing");
        if (!h.contains("offset")) throw ParseError(path + ".offset", "missing");
        Halfspace f;
        f.normal = parse_vector(h.at("normal"), path + ".normal");
        f.offset = parse_number(h.at("offset"), path + ".offset");
        faces.push_back(std::move(f));
      }
      const int implied = static_cast<int>(faces.front().normal.size());
      check_implied_dim(doc, implied, "halfspaces[0].normal");
      for (size_t j = 1; j < faces.size(); ++j)
        if (faces[j].normal.size() != implied)
          throw ParseError("halfspaces[" + std::to_string(j) + "].normal", "inconsistent dimension");
      return ImplicitBody::make_smoothed_polytope(std::move(faces), sharpness);
    }
    if (kind == "perturbed_sphere") {
      reject_unknown_fields(doc, {"kind", "dim", "coeffs"});
      std::vector<RadialTerm> terms;
      int implied = 0;
      if (doc.contains("coeffs")) {
        const json& cs = doc.at("coeffs");
        if (!cs.is_array()) throw ParseError("coeffs", "must be an array");
        for (size_t j = 0; j < cs.size(); ++j) {
          const std::string path = "coeffs[" + std::to_string(j) + "]";
          const json& c = cs[j];
          if (!c.is_object()) throw ParseError(path, "must be an object");
          reject_unknown_fields(c, {"monomial", "c"});
          if (!c.contains("monomial")) throw ParseError(path + ".monomial", "missing");
          if (!c.contains("c")) throw ParseError(path + ".c", "missing");
          const json& mono = c.at("monomial");
          if (!mono.is_array() || mono.empty())
            throw ParseError(path + ".monomial", "must be a non-empty array of integers");
          RadialTerm t;
          t.powers.reserve(mono.size());
          for (size_t i = 0; i < mono.size(); ++i) {
            if (!mono[i].is_number_integer())
              throw ParseError(path + ".monomial[" + std::to_string(i) + "]", "must be an integer");
            const long long p = mono[i].get<long long>();
            if (p < 0)
              throw ParseError(path + ".monomial[" + std::to_string(i) + "]", "must be >= 0");
            t.powers.push_back(static_cast<int>(p));
          }
          t.coeff = parse_number(c.at("c"), path + ".c");
          if (implied == 0)
            implied = static_cast<int>(t.powers.size());
          else if (static_cast<int>(t.powers.size()) != implied)
            throw ParseError(path + ".monomial", "inconsistent dimension");
          terms.push_back(std::move(t));
        }
      }
      int dim;
      if (implied > 0)
        dim = check_implied_dim(doc, implied, "coeffs[0].monomial");
      else if (doc.contains("dim"))
        dim = parse_dim_field(doc);
      else
        throw ParseError("dim", "missing (required when coeffs is empty)");
      double total = 0.0;
      for (const RadialTerm& t : terms) total += std::abs(t.coeff);
      if (total >= 0.5) throw ParseError("coeffs", "sum of |c| must be < 0.5");
      return ImplicitBody::make_perturbed_sphere(dim, std::move(terms));
    }
  } catch (const ParseError&) {
    throw;
  } catch (const InputError& e) {
    throw ParseError(kind, e.what());
  }
  throw ParseError("kind", "unknown kind '" + kind + "'");
}

ImplicitBody parse_body_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("", std::string("invalid JSON: ") + e.what());
  }
  return parse_body(doc);
}

nlohmann::json body_to_json(const ImplicitBody& body) {
  nlohmann::json doc;
  doc["kind"] = to_string(body.kind());
  switch (body.kind()) {
    case BodyKind::ball:
      doc["dim"] = body.dim();
      doc["radius"] = body.radius();
      break;
    case BodyKind::superellipsoid:
      doc["exponent"] = body.exponent();
      [[fallthrough]];
    case BodyKind::ellipsoid: {
      std::vector<double> axes(body.semi_axes().data(), body.semi_axes().data() + body.dim());
      doc["semi_axes"] = axes;
      break;
    }
    case BodyKind::smoothed_polytope: {
      doc["sharpness"] = body.sharpness();
      nlohmann::json hs = nlohmann::json::array();
      for (const Halfspace& f : body.halfspaces()) {
        std::vector<double> n(f.normal.data(), f.normal.data() + f.normal.size());
        hs.push_back({{"normal", n}, {"offset", f.offset}});
      }
      doc["halfspaces"] = std::move(hs);
      break;
    }
    case BodyKind::perturbed_sphere: {
      doc["dim"] = body.dim();
      nlohmann::json cs = nlohmann::json::array();
      for (const RadialTerm& t : body.radial_terms())
        cs.push_back({{"monomial", t.powers}, {"c", t.coeff}});
      doc["coeffs"] = std::move(cs);
      break;
    }
    case BodyKind::blend:
      throw InputError("body_to_json: blended bodies are not serializable");
  }
  return doc;
}

}  // namespace crossfit
