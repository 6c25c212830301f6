#include "obj_export.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <vector>

namespace crossfit::tools {

namespace {

struct Tri {
  int a, b, c;
};

// Unit icosphere: icosahedron subdivided with midpoint projection.
void icosphere(int levels, std::vector<Vec>& verts, std::vector<Tri>& faces) {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  const std::array<std::array<double, 3>, 12> base = {{{-1, phi, 0},
                                                       {1, phi, 0},
                                                       {-1, -phi, 0},
                                                       {1, -phi, 0},
                                                       {0, -1, phi},
                                                       {0, 1, phi},
                                                       {0, -1, -phi},
                                                       {0, 1, -phi},
                                                       {phi, 0, -1},
                                                       {phi, 0, 1},
                                                       {-phi, 0, -1},
                                                       {-phi, 0, 1}}};
  verts.clear();
  for (const auto& p : base) {
    Vec v(3);
    v << p[0], p[1], p[2];
    verts.push_back(v.normalized());
  }
  faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
           {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
           {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
           {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (int level = 0; level < levels; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int i, int j) {
      const std::pair<int, int> key{std::min(i, j), std::max(i, j)};
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      const Vec m = (verts[i] + verts[j]).normalized();
      verts.push_back(m);
      const int idx = static_cast<int>(verts.size()) - 1;
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<Tri> next;
    next.reserve(faces.size() * 4);
    for (const Tri& t : faces) {
      const int ab = mid(t.a, t.b);
      const int bc = mid(t.b, t.c);
      const int ca = mid(t.c, t.a);
      next.push_back({t.a, ab, ca});
      next.push_back({t.b, bc, ab});
      next.push_back({t.c, ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }
}

void write_vertex(std::ostringstream& os, const Vec& v) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", v[0], v[1], v[2]);
  os << buf;
}

}  // namespace

std::string export_obj(const ImplicitBody& body, const CrossConfig& config) {
  if (body.dim() != 3 || config.dim() != 3)
    throw InputError("export_obj: OBJ export requires dimension 3");

  std::ostringstream os;
  os << "o crosspolytope\n";
  const std::vector<Vec> cross = vertices(config);
  for (const Vec& v : cross) write_vertex(os, v);

  // Eight faces, one per sign orthant; vertex k of axis i is 2i + (sign < 0).
  for (int s0 = 0; s0 < 2; ++s0)
    for (int s1 = 0; s1 < 2; ++s1)
      for (int s2 = 0; s2 < 2; ++s2) {
        int ia = 2 * 0 + s0;
        int ib = 2 * 1 + s1;
        int ic = 2 * 2 + s2;
        const Eigen::Vector3d a = cross[ia];
        const Eigen::Vector3d b = cross[ib];
        const Eigen::Vector3d c = cross[ic];
        const Eigen::Vector3d normal = (b - a).cross(c - a);
        const Eigen::Vector3d centroid = (a + b + c) / 3.0;
        const Eigen::Vector3d center = config.center;
        if (normal.dot(centroid - center) < 0.0) std::swap(ib, ic);
        os << "f " << ia + 1 << ' ' << ib + 1 << ' ' << ic + 1 << '\n';
      }

  os << "o body\n";
  std::vector<Vec> sphere;
  std::vector<Tri> tris;
  icosphere(3, sphere, tris);
  const Vec& interior = body.interior_point();
  for (const Vec& dir : sphere) {
    const double a = body.ray_intersect(interior, dir);
    write_vertex(os, interior + a * dir);
  }
  const int offset = static_cast<int>(cross.size());
  for (const Tri& t : tris)
    os << "f " << t.a + offset + 1 << ' ' << t.b + offset + 1 << ' ' << t.c + offset + 1 << '\n';
  return os.str();
}

}  // namespace crossfit::tools
