#include "efie/geometry.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace efie {

namespace {

using Vec4 = Eigen::Vector4d;

constexpr int kMaxDegree = 16;

// Non-allocating basis triangle: values and first derivatives of the p+1
// non-zero functions at x; returns the first non-zero index.
int basis_derivs_stack(const KnotVector& kv, double x, double* vals, double* ders) {
  const int p = kv.degree;
  const int span = find_span(kv, x);
  const double* knots = kv.knots.data();
  double left[kMaxDegree + 1], right[kMaxDegree + 1], lower[kMaxDegree + 1];
  vals[0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    if (j == p) {  // keep the degree p-1 row for the derivatives
      for (int r = 0; r < p; ++r) lower[r] = vals[r];
    }
    left[j] = x - knots[span + 1 - j];
    right[j] = knots[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double tmp = vals[r] / (right[r + 1] + left[j - r]);
      vals[r] = saved + right[r + 1] * tmp;
      saved = left[j - r] * tmp;
    }
    vals[j] = saved;
  }
  const int first = span - p;
  for (int r = 0; r <= p; ++r) {
    if (p == 0) {
      ders[r] = 0.0;
      continue;
    }
    const int i = first + r;
    double d = 0.0;
    if (r > 0) {
      const double den = knots[i + p] - knots[i];
      if (den > 0.0) d += lower[r - 1] / den;
    }
    if (r < p) {
      const double den = knots[i + p + 1] - knots[i + 1];
      if (den > 0.0) d -= lower[r] / den;
    }
    ders[r] = p * d;
  }
  return first;
}

// homogeneous value and parameter derivatives at (u,v)
void homogeneous_eval(const NurbsPatch& p, double u, double v, Vec4& H, Vec4& Hu, Vec4& Hv) {
  double bu[kMaxDegree + 1], dbu[kMaxDegree + 1], bv[kMaxDegree + 1], dbv[kMaxDegree + 1];
  const int iu0 = basis_derivs_stack(p.knots_u, u, bu, dbu);
  const int iv0 = basis_derivs_stack(p.knots_v, v, bv, dbv);
  H.setZero();
  Hu.setZero();
  Hv.setZero();
  const int k2 = p.count_v();
  for (int a = 0; a <= p.knots_u.degree; ++a) {
    const int i = iu0 + a;
    Vec4 row = Vec4::Zero(), row_dv = Vec4::Zero();
    for (int b = 0; b <= p.knots_v.degree; ++b) {
      const int j = iv0 + b;
      const double w = p.weights[i * k2 + j];
      Vec4 cw;
      cw << p.cpts[i * k2 + j] * w, w;
      row += bv[b] * cw;
      row_dv += dbv[b] * cw;
    }
    H += bu[a] * row;
    Hu += dbu[a] * row;
    Hv += bu[a] * row_dv;
  }
}

}  // namespace

Vec3 NurbsPatch::eval(double u, double v) const {
  Vec4 H, Hu, Hv;
  homogeneous_eval(*this, u, v, H, Hu, Hv);
  return H.head<3>() / H(3);
}

Mat32 NurbsPatch::jacobian(double u, double v) const {
  Vec3 x;
  Mat32 J;
  eval_with_jacobian(u, v, x, J);
  return J;
}

void NurbsPatch::eval_with_jacobian(double u, double v, Vec3& x, Mat32& J) const {
  Vec4 H, Hu, Hv;
  homogeneous_eval(*this, u, v, H, Hu, Hv);
  const double w = H(3);
  x = H.head<3>() / w;
  J.col(0) = (Hu.head<3>() - Hu(3) * x) / w;
  J.col(1) = (Hv.head<3>() - Hv(3) * x) / w;
}

double NurbsPatch::surface_measure(double u, double v) const {
  const Mat32 J = jacobian(u, v);
  const double xi = J.col(0).cross(J.col(1)).norm();
  if (xi <= 1e-14) throw geometry_error("degenerate parametrization: surface measure ~ 0");
  return xi;
}

Vec3 NurbsPatch::unit_normal(double u, double v) const {
  const Mat32 J = jacobian(u, v);
  const Vec3 c = J.col(0).cross(J.col(1));
  const double xi = c.norm();
  if (xi <= 1e-14) throw geometry_error("degenerate parametrization: surface measure ~ 0");
  return c / xi;
}

void NurbsPatch::validate() const {
  knots_u.validate();
  knots_v.validate();
  if (knots_u.degree > 16 || knots_v.degree > 16)
    throw geometry_error("patch: degree above supported maximum (16)");
  const size_t expect = static_cast<size_t>(count_u()) * count_v();
  if (cpts.size() != expect || weights.size() != expect)
    throw geometry_error("patch: control net shape does not match knot vectors");
  for (double w : weights)
    if (!(w > 0.0)) throw geometry_error("patch: non-positive weight");
}

const char* edge_name(EdgeId e) {
  switch (e) {
    case EdgeId::u0: return "u0";
    case EdgeId::u1: return "u1";
    case EdgeId::v0: return "v0";
    default: return "v1";
  }
}

Vec2 edge_point(EdgeId e, double t) {
  switch (e) {
    case EdgeId::u0: return {0.0, t};
    case EdgeId::u1: return {1.0, t};
    case EdgeId::v0: return {t, 0.0};
    default: return {t, 1.0};
  }
}

MultipatchGeometry build_topology(std::vector<NurbsPatch> patches, double tol) {
  constexpr int kSamples = 11;
  for (const auto& p : patches) p.validate();

  struct EdgeTrace {
    int patch;
    EdgeId edge;
    std::array<Vec3, kSamples> pts;
  };
  std::vector<EdgeTrace> traces;
  for (int ip = 0; ip < static_cast<int>(patches.size()); ++ip)
    for (EdgeId e : {EdgeId::u0, EdgeId::u1, EdgeId::v0, EdgeId::v1}) {
      EdgeTrace tr{ip, e, {}};
      for (int s = 0; s < kSamples; ++s) {
        const Vec2 uv = edge_point(e, static_cast<double>(s) / (kSamples - 1));
        tr.pts[s] = patches[ip].eval(uv[0], uv[1]);
      }
      traces.push_back(tr);
    }

  auto match = [&](const EdgeTrace& a, const EdgeTrace& b, bool& reversed) {
    double fwd = 0.0, bwd = 0.0;
    for (int s = 0; s < kSamples; ++s) {
      fwd = std::max(fwd, (a.pts[s] - b.pts[s]).norm());
      bwd = std::max(bwd, (a.pts[s] - b.pts[kSamples - 1 - s]).norm());
    }
    if (fwd <= tol) {
      reversed = false;
      return true;
    }
    if (bwd <= tol) {
      reversed = true;
      return true;
    }
    return false;
  };

  MultipatchGeometry geom;
  geom.patches = std::move(patches);
  std::vector<int> partner(traces.size(), -1);
  for (size_t a = 0; a < traces.size(); ++a)
    for (size_t b = a + 1; b < traces.size(); ++b) {
      if (traces[a].patch == traces[b].patch && traces[a].edge == traces[b].edge) continue;
      bool reversed = false;
      if (!match(traces[a], traces[b], reversed)) continue;
      if (partner[a] >= 0 || partner[b] >= 0) {
        std::ostringstream msg;
        msg << "ambiguous topology: patch " << traces[a].patch << " edge "
            << edge_name(traces[a].edge) << " matches multiple partners";
        throw geometry_error(msg.str());
      }
      partner[a] = static_cast<int>(b);
      partner[b] = static_cast<int>(a);
      geom.interfaces.push_back({traces[a].patch, traces[a].edge, traces[b].patch,
                                 traces[b].edge, reversed});
    }
  for (size_t a = 0; a < traces.size(); ++a)
    if (partner[a] < 0) geom.boundary_edges.emplace_back(traces[a].patch, traces[a].edge);
  return geom;
}

// ---------------------------------------------------------------------------
// Built-in geometries
// ---------------------------------------------------------------------------

namespace {

using Quat = Eigen::Vector4d;  // (w, x, y, z)

Quat qmul(const Quat& a, const Quat& b) {
  return Quat(a(0) * b(0) - a(1) * b(1) - a(2) * b(2) - a(3) * b(3),
              a(0) * b(1) + a(1) * b(0) + a(2) * b(3) - a(3) * b(2),
              a(0) * b(2) - a(1) * b(3) + a(2) * b(0) + a(3) * b(1),
              a(0) * b(3) + a(1) * b(2) - a(2) * b(1) + a(3) * b(0));
}

// Bernstein-basis product of two (2,2) coefficient nets -> (4,4) net.
using Net3 = Eigen::Matrix3d;
using Net5 = Eigen::Matrix<double, 5, 5>;

Net5 bernstein_mul(const Net3& a, const Net3& b) {
  static const double binom2[3] = {1, 2, 1};
  static const double binom4[5] = {1, 4, 6, 4, 1};
  Net5 out = Net5::Zero();
  for (int i1 = 0; i1 < 3; ++i1)
    for (int j1 = 0; j1 < 3; ++j1)
      for (int i2 = 0; i2 < 3; ++i2)
        for (int j2 = 0; j2 < 3; ++j2)
          out(i1 + i2, j1 + j2) += a(i1, j1) * b(i2, j2) * binom2[i1] * binom2[i2] /
                                   binom4[i1 + i2] * binom2[j1] * binom2[j2] /
                                   binom4[j1 + j2];
  return out;
}

// Exact spherical-square patch: biquadratic quaternion net q(s,t), patch
// p = q k conj(q) / |q|^2. Corner quaternions rotate k onto the cube-corner
// directions; quadratic edges absorb the 15-degree gauge increment needed
// to keep all four boundary curves on great circles.
std::array<Net3, 4> canonical_quaternion_net() {
  const double s3 = std::sqrt(3.0);
  const double ch = std::sqrt((1.0 + 1.0 / s3) / 2.0);
  const double sh = std::sqrt((1.0 - 1.0 / s3) / 4.0);
  auto corner = [&](double s1, double s2) { return Quat(ch, -s2 * sh, s1 * sh, 0.0); };
  auto rotk = [](double deg) {
    const double r = deg * M_PI / 180.0;
    return Quat(std::cos(r), 0.0, 0.0, std::sin(r));
  };
  const Quat q00 = corner(-1, -1), q10 = corner(1, -1), q01 = corner(-1, 1),
             q11 = corner(1, 1);
  Quat net[3][3];
  net[0][0] = q00;
  net[2][0] = q10;
  net[0][2] = q01;
  net[2][2] = q11;
  net[1][0] = 0.5 * (qmul(q00, rotk(-15)) + qmul(q10, rotk(15)));
  net[1][2] = 0.5 * (qmul(q01, rotk(15)) + qmul(q11, rotk(-15)));
  net[0][1] = 0.5 * (qmul(q00, rotk(15)) + qmul(q01, rotk(-15)));
  net[2][1] = 0.5 * (qmul(q10, rotk(-15)) + qmul(q11, rotk(15)));
  net[1][1] = Quat(1, 0, 0, 0);

  std::array<Net3, 4> comp;
  for (int c = 0; c < 4; ++c)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) comp[c](i, j) = net[i][j](c);
  return comp;
}

NurbsPatch sphere_face(const Quat& face_rotation) {
  const auto base = canonical_quaternion_net();
  // rotate the whole quaternion net: q -> g q
  std::array<Net3, 4> comp;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const Quat q(base[0](i, j), base[1](i, j), base[2](i, j), base[3](i, j));
      const Quat r = qmul(face_rotation, q);
      for (int c = 0; c < 4; ++c) comp[c](i, j) = r(c);
    }
  const Net3 &w = comp[0], &x = comp[1], &y = comp[2], &z = comp[3];
  // q k conj(q) = (2(xz + wy), 2(yz - wx), w^2 + z^2 - x^2 - y^2), |q|^2
  const Net5 X = 2.0 * (bernstein_mul(x, z) + bernstein_mul(w, y));
  const Net5 Y = 2.0 * (bernstein_mul(y, z) - bernstein_mul(w, x));
  const Net5 Z =
      bernstein_mul(w, w) + bernstein_mul(z, z) - bernstein_mul(x, x) - bernstein_mul(y, y);
  const Net5 W =
      bernstein_mul(w, w) + bernstein_mul(z, z) + bernstein_mul(x, x) + bernstein_mul(y, y);

  NurbsPatch patch;
  patch.knots_u = KnotVector::bezier(4);
  patch.knots_v = KnotVector::bezier(4);
  patch.cpts.resize(25);
  patch.weights.resize(25);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      const double wt = W(i, j);
      patch.weights[i * 5 + j] = wt;
      patch.cpts[i * 5 + j] = Vec3(X(i, j), Y(i, j), Z(i, j)) / wt;
    }
  return patch;
}

}  // namespace

MultipatchGeometry builtin_sphere() {
  const double c = std::sqrt(0.5);
  const std::array<Quat, 6> faces = {
      Quat(1, 0, 0, 0),   // +z
      Quat(0, 1, 0, 0),   // -z
      Quat(c, 0, c, 0),   // +x
      Quat(c, 0, -c, 0),  // -x
      Quat(c, -c, 0, 0),  // +y
      Quat(c, c, 0, 0),   // -y
  };
  std::vector<NurbsPatch> patches;
  patches.reserve(6);
  for (const auto& f : faces) patches.push_back(sphere_face(f));
  return build_topology(std::move(patches));
}

namespace {

NurbsPatch flat_square(const Vec3& origin, const Vec3& e1, const Vec3& e2) {
  NurbsPatch patch;
  patch.knots_u = KnotVector::bezier(1);
  patch.knots_v = KnotVector::bezier(1);
  patch.cpts = {origin, origin + e2, origin + e1, origin + e1 + e2};
  patch.weights = {1, 1, 1, 1};
  return patch;
}

}  // namespace

MultipatchGeometry builtin_fichera() {
  const double h = 0.5;
  const Vec3 ex(1, 0, 0), ey(0, 1, 0), ez(0, 0, 1);
  std::vector<NurbsPatch> patches;

  // full faces at -h (2x2 patches each), normals -x/-y/-z
  for (double a : {-h, 0.0})
    for (double b : {-h, 0.0}) {
      patches.push_back(flat_square(Vec3(-h, a, b), h * ez, h * ey));  // n = -x
      patches.push_back(flat_square(Vec3(a, -h, b), h * ex, h * ez));  // n = -y
      patches.push_back(flat_square(Vec3(a, b, -h), h * ey, h * ex));  // n = -z
    }
  // L-shaped faces at +h (3 patches each), normals +x/+y/+z
  const std::array<std::pair<double, double>, 3> ells = {
      std::pair{-h, -h}, std::pair{0.0, -h}, std::pair{-h, 0.0}};
  for (auto [a, b] : ells) {
    patches.push_back(flat_square(Vec3(h, a, b), h * ey, h * ez));  // n = +x
    patches.push_back(flat_square(Vec3(a, h, b), h * ez, h * ex));  // n = +y
    patches.push_back(flat_square(Vec3(a, b, h), h * ex, h * ey));  // n = +z
  }
  // re-entrant faces at 0 over [0,h]^2, normals +x/+y/+z
  patches.push_back(flat_square(Vec3(0, 0, 0), h * ey, h * ez));  // n = +x
  patches.push_back(flat_square(Vec3(0, 0, 0), h * ez, h * ex));  // n = +y
  patches.push_back(flat_square(Vec3(0, 0, 0), h * ex, h * ey));  // n = +z

  return build_topology(std::move(patches));
}

// ---------------------------------------------------------------------------
// Geometry file format
// ---------------------------------------------------------------------------

void save_geometry(const MultipatchGeometry& geom, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw config_error("save_geometry: cannot open " + path);
  out << "nurbs-multipatch v1\n";
  char buf[512];
  for (size_t ip = 0; ip < geom.patches.size(); ++ip) {
    const auto& p = geom.patches[ip];
    out << "patch " << ip << "\n";
    out << "degrees " << p.knots_u.degree << " " << p.knots_v.degree << "\n";
    out << "knots_u";
    for (double k : p.knots_u.knots) {
      std::snprintf(buf, sizeof buf, " %.17g", k);
      out << buf;
    }
    out << "\nknots_v";
    for (double k : p.knots_v.knots) {
      std::snprintf(buf, sizeof buf, " %.17g", k);
      out << buf;
    }
    out << "\ncpts\n";
    for (size_t c = 0; c < p.cpts.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g\n", p.cpts[c][0], p.cpts[c][1],
                    p.cpts[c][2], p.weights[c]);
      out << buf;
    }
  }
}

namespace {

struct LineReader {
  std::istream& in;
  std::string path;
  int lineno = 0;
  bool next(std::string& line) {
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      // skip blank lines
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw config_error(path + ":" + std::to_string(lineno) + ": " + what);
  }
};

}  // namespace

MultipatchGeometry load_geometry(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("load_geometry: cannot open " + path);
  LineReader rd{in, path};
  std::string line;
  if (!rd.next(line) || line.rfind("nurbs-multipatch v1", 0) != 0)
    rd.fail("expected header 'nurbs-multipatch v1'");

  std::vector<NurbsPatch> patches;
  while (rd.next(line)) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key != "patch") rd.fail("expected 'patch <id>', got '" + key + "'");

    NurbsPatch p;
    if (!rd.next(line)) rd.fail("unexpected end of file in patch");
    {
      std::istringstream ds(line);
      int p1, p2;
      std::string kw;
      ds >> kw >> p1 >> p2;
      if (kw != "degrees" || ds.fail() || p1 < 1 || p2 < 1) rd.fail("bad 'degrees' line");
      p.knots_u.degree = p1;
      p.knots_v.degree = p2;
    }
    for (auto* kv : {&p.knots_u, &p.knots_v}) {
      if (!rd.next(line)) rd.fail("unexpected end of file in patch");
      std::istringstream ks(line);
      std::string kw;
      ks >> kw;
      if (kw != (kv == &p.knots_u ? "knots_u" : "knots_v")) rd.fail("bad knot line '" + kw + "'");
      double val;
      while (ks >> val) kv->knots.push_back(val);
      try {
        kv->validate();
      } catch (const argument_error& e) {
        rd.fail(e.what());
      }
    }
    if (!rd.next(line) || line.find("cpts") == std::string::npos) rd.fail("expected 'cpts'");
    const int total = p.count_u() * p.count_v();
    if (total <= 0) rd.fail("knot vectors give empty control net");
    for (int c = 0; c < total; ++c) {
      if (!rd.next(line)) rd.fail("control net truncated");
      std::istringstream cs(line);
      Vec3 x;
      double w;
      cs >> x[0] >> x[1] >> x[2] >> w;
      if (cs.fail()) rd.fail("bad control point line (need 'x y z w')");
      if (!(w > 0.0)) rd.fail("non-positive weight");
      p.cpts.push_back(x);
      p.weights.push_back(w);
    }
    try {
      p.validate();
    } catch (const std::exception& e) {
      rd.fail(e.what());
    }
    patches.push_back(std::move(p));
  }
  if (patches.empty()) throw config_error(path + ": no patches");
  return build_topology(std::move(patches));
}

}  // namespace efie
