#include "efie/assembly.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>

#include "superspace_basis.hpp"

namespace efie {

Complex greens_function(double kappa, const Vec3& x, const Vec3& y) {
  const double r = (x - y).norm();
  if (r == 0.0) throw numerical_error("greens_function: evaluation at x = y");
  return std::polar(1.0 / (4.0 * M_PI * r), kappa * r);
}

Vec3c greens_gradient_x(double kappa, const Vec3& x, const Vec3& y) {
  const Vec3 d = x - y;
  const double r = d.norm();
  if (r == 0.0) throw numerical_error("greens_gradient_x: evaluation at x = y");
  const Complex factor =
      std::polar(1.0 / (4.0 * M_PI * r * r * r), kappa * r) * Complex(-1.0, kappa * r);
  return factor * d.cast<Complex>();
}

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;

// Per-element far-rule data: geometry at the tensor Gauss nodes and the
// weighted basis table C = [V_x | V_y | V_z | div], column blocks of nfun.
struct ElementData {
  std::vector<Vec3> xs;
  std::vector<Vec3> normals;
  MatrixXcd C;
};

struct SingularTab {
  MatrixXd coords;  // npts x 2, element-local after the d4 map
  MatrixXd phi, div;
};

struct Context {
  const Superspace& ss;
  double kappa;
  QuadConfig quad;
  detail::LocalBasis basis;
  int qf, qs, nq;
  QuadratureRule far2d;
  QuadratureRule rules[3];  // identical, common_edge, common_vertex
  std::vector<ElementData> elements;
  // [case][d4][side]; lazily filled
  std::unique_ptr<SingularTab> tabs[3][8][2];

  Context(const Superspace& s, double k, const QuadConfig& q)
      : ss(s), kappa(k), quad(q), basis(s) {
    qf = quad.resolve_far(ss.p);
    qs = quad.resolve_singular(ss.p);
    nq = qf * qf;
    far2d = tensor_rule(qf, 2);
    rules[0] = regularized_rule(PairCase::identical, qs);
    rules[1] = regularized_rule(PairCase::common_edge, qs);
    rules[2] = regularized_rule(PairCase::common_vertex, qs);
    build_element_data();
  }

  void build_element_data() {
    const int nfun = ss.funcs_per_element();
    const int E = ss.mesh.num_elements();
    const double inv_measure = 1.0 / (ss.mesh.n * ss.mesh.n);
    elements.resize(E);
    std::vector<double> phi(nfun), div(nfun);
    for (int e = 0; e < E; ++e) {
      auto& ed = elements[e];
      ed.xs.resize(nq);
      ed.normals.resize(nq);
      ed.C.resize(nq, 4 * nfun);
      const auto c = ss.mesh.coords(e);
      const auto& patch = ss.geom->patches[c.patch];
      double u0, u1, v0, v1;
      ss.mesh.param_box(e, u0, u1, v0, v1);
      for (int k = 0; k < nq; ++k) {
        const double a = far2d.nodes(0, k), b = far2d.nodes(1, k);
        const double u = u0 + a * (u1 - u0), v = v0 + b * (v1 - v0);
        Vec3 x;
        Mat32 J;
        patch.eval_with_jacobian(u, v, x, J);
        ed.xs[k] = x;
        ed.normals[k] = J.col(0).cross(J.col(1)).normalized();
        basis.eval(ss, a, b, phi.data(), div.data());
        const double w = far2d.weights(k) * inv_measure;
        for (int I = 0; I < nfun; ++I) {
          const Vec3 V = J.col(basis.comp_of[I]) * (phi[I] * w);
          ed.C(k, 0 * nfun + I) = V[0];
          ed.C(k, 1 * nfun + I) = V[1];
          ed.C(k, 2 * nfun + I) = V[2];
          ed.C(k, 3 * nfun + I) = div[I] * w;
        }
      }
    }
  }

  const SingularTab& tab(int case_idx, int d4, int side) {
    auto& slot = tabs[case_idx][d4][side];
    if (!slot) {
      const auto& rule = rules[case_idx];
      const int npts = rule.size();
      const int nfun = ss.funcs_per_element();
      auto t = std::make_unique<SingularTab>();
      t->coords.resize(npts, 2);
      t->phi.resize(npts, nfun);
      t->div.resize(npts, nfun);
      std::vector<double> phi(nfun), div(nfun);
      for (int k = 0; k < npts; ++k) {
        const double a = rule.nodes(2 * side + 0, k), b = rule.nodes(2 * side + 1, k);
        const Vec2 m = d4_apply(d4, a, b);
        t->coords(k, 0) = m[0];
        t->coords(k, 1) = m[1];
        basis.eval(ss, m[0], m[1], phi.data(), div.data());
        for (int I = 0; I < nfun; ++I) {
          t->phi(k, I) = phi[I];
          t->div(k, I) = div[I];
        }
      }
      slot = std::move(t);
    }
    return *slot;
  }

  // Far block by separable contraction over the cached tables.
  void far_block(int e1, int e2, MatrixXcd& block) {
    const int nfun = ss.funcs_per_element();
    const auto& d1 = elements[e1];
    const auto& d2 = elements[e2];
    MatrixXcd G(nq, nq);
    for (int a2 = 0; a2 < nq; ++a2)
      for (int a1 = 0; a1 < nq; ++a1)
        G(a1, a2) = greens_function(kappa, d1.xs[a1], d2.xs[a2]);
    const MatrixXcd Y = G * d2.C;
    block.noalias() = (-kappa) * (d1.C.middleCols(0, nfun).transpose() * Y.middleCols(0, nfun));
    block.noalias() +=
        (-kappa) * (d1.C.middleCols(nfun, nfun).transpose() * Y.middleCols(nfun, nfun));
    block.noalias() +=
        (-kappa) * (d1.C.middleCols(2 * nfun, nfun).transpose() * Y.middleCols(2 * nfun, nfun));
    block.noalias() += (1.0 / kappa) *
                       (d1.C.middleCols(3 * nfun, nfun).transpose() * Y.middleCols(3 * nfun, nfun));
  }

  void singular_block(int e1, int e2, const PairConfig& cfg, MatrixXcd& block) {
    const int nfun = ss.funcs_per_element();
    const int ci = static_cast<int>(cfg.pair_case);
    const auto& rule = rules[ci];
    const auto& tabS = tab(ci, cfg.rot1, 0);
    const auto& tabT = tab(ci, cfg.rot2, 1);
    const auto c1 = ss.mesh.coords(e1);
    const auto c2 = ss.mesh.coords(e2);
    const auto& patch1 = ss.geom->patches[c1.patch];
    const auto& patch2 = ss.geom->patches[c2.patch];
    double a0, a1, b0, b1, p0, p1, q0, q1;
    ss.mesh.param_box(e1, a0, a1, b0, b1);
    ss.mesh.param_box(e2, p0, p1, q0, q1);
    const double inv_measure2 = 1.0 / std::pow(static_cast<double>(ss.mesh.n), 4);
    const double mk = -kappa, pk = 1.0 / kappa;

    block.setZero();
    std::vector<Vec3> vs(nfun), vt(nfun);
    const int npts = rule.size();
    for (int k = 0; k < npts; ++k) {
      const double us = a0 + tabS.coords(k, 0) * (a1 - a0);
      const double vs_ = b0 + tabS.coords(k, 1) * (b1 - b0);
      const double ut = p0 + tabT.coords(k, 0) * (p1 - p0);
      const double vt_ = q0 + tabT.coords(k, 1) * (q1 - q0);
      Vec3 xS, xT;
      Mat32 JS, JT;
      patch1.eval_with_jacobian(us, vs_, xS, JS);
      patch2.eval_with_jacobian(ut, vt_, xT, JT);
      const Complex wG = rule.weights(k) * inv_measure2 * greens_function(kappa, xS, xT);
      for (int I = 0; I < nfun; ++I) {
        vs[I] = JS.col(basis.comp_of[I]) * tabS.phi(k, I);
        vt[I] = JT.col(basis.comp_of[I]) * tabT.phi(k, I);
      }
      for (int I = 0; I < nfun; ++I) {
        const double dI = tabS.div(k, I);
        for (int J = 0; J < nfun; ++J) {
          const double term = mk * vs[I].dot(vt[J]) + pk * dI * tabT.div(k, J);
          block(I, J) += wG * term;
        }
      }
    }
  }

  // Runs over all unordered element pairs; sink(e1, e2, block) with e1 <= e2.
  template <class Sink>
  void for_each_block(Sink&& sink) {
    const int E = ss.mesh.num_elements();
    const int nfun = ss.funcs_per_element();
    MatrixXcd block(nfun, nfun);
    for (int e1 = 0; e1 < E; ++e1) {
      for (int e2 = e1; e2 < E; ++e2) {
        const PairConfig cfg = classify_pair_config(ss.mesh, e1, e2);
        if (cfg.pair_case == PairCase::far)
          far_block(e1, e2, block);
        else
          singular_block(e1, e2, cfg, block);
        sink(e1, e2, block);
      }
    }
  }
};

}  // namespace

Eigen::MatrixXcd assemble_matrix(const Superspace& ss, double kappa, const QuadConfig& quad) {
  if (kappa <= 0.0) throw argument_error("assemble_matrix: kappa must be positive");
  Context ctx(ss, kappa, quad);
  const int nfun = ss.funcs_per_element();
  MatrixXcd A(ss.dim(), ss.dim());
  ctx.for_each_block([&](int e1, int e2, const MatrixXcd& block) {
    A.block(e1 * nfun, e2 * nfun, nfun, nfun) = block;
    if (e1 != e2) A.block(e2 * nfun, e1 * nfun, nfun, nfun) = block.transpose();
  });
  return A;
}

namespace {

// Per-element scatter data of one transformation: rows with support on the
// element and the dense local coefficient block.
struct ScatterTable {
  std::vector<std::vector<int>> rows;       // per element
  std::vector<Eigen::MatrixXcd> local;      // per element: |rows| x nfun
};

ScatterTable build_scatter(const Eigen::SparseMatrix<double, Eigen::RowMajor>& T,
                           const Superspace& ss) {
  const int nfun = ss.funcs_per_element();
  const int E = ss.mesh.num_elements();
  ScatterTable table;
  table.rows.resize(E);
  std::vector<std::vector<std::pair<int, Eigen::RowVectorXd>>> tmp(E);
  for (int r = 0; r < T.rows(); ++r) {
    int current = -1;
    Eigen::RowVectorXd row;
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(T, r); it; ++it) {
      const int e = static_cast<int>(it.col()) / nfun;
      if (e != current) {
        if (current >= 0) tmp[current].emplace_back(r, row);
        current = e;
        row = Eigen::RowVectorXd::Zero(nfun);
      }
      row(static_cast<int>(it.col()) % nfun) = it.value();
    }
    if (current >= 0) tmp[current].emplace_back(r, row);
  }
  table.local.resize(E);
  for (int e = 0; e < E; ++e) {
    const int m = static_cast<int>(tmp[e].size());
    table.local[e].resize(m, nfun);
    table.rows[e].resize(m);
    for (int i = 0; i < m; ++i) {
      table.rows[e][i] = tmp[e][i].first;
      table.local[e].row(i) = tmp[e][i].second.cast<Complex>();
    }
  }
  return table;
}

}  // namespace

std::vector<Eigen::MatrixXcd> assemble_transformed(
    const Superspace& ss, double kappa,
    const std::vector<const Eigen::SparseMatrix<double, Eigen::RowMajor>*>& transforms,
    const QuadConfig& quad) {
  if (kappa <= 0.0) throw argument_error("assemble_transformed: kappa must be positive");
  Context ctx(ss, kappa, quad);
  std::vector<ScatterTable> tables;
  std::vector<Eigen::MatrixXcd> out;
  for (const auto* T : transforms) {
    if (T->cols() != ss.dim())
      throw argument_error("assemble_transformed: transformation does not match superspace");
    tables.push_back(build_scatter(*T, ss));
    out.emplace_back(Eigen::MatrixXcd::Zero(T->rows(), T->rows()));
  }
  ctx.for_each_block([&](int e1, int e2, const Eigen::MatrixXcd& block) {
    for (size_t t = 0; t < tables.size(); ++t) {
      const auto& rows1 = tables[t].rows[e1];
      const auto& rows2 = tables[t].rows[e2];
      if (rows1.empty() || rows2.empty()) continue;
      const Eigen::MatrixXcd contrib =
          tables[t].local[e1] * block * tables[t].local[e2].transpose();
      auto& A = out[t];
      for (size_t i = 0; i < rows1.size(); ++i)
        for (size_t j = 0; j < rows2.size(); ++j) {
          A(rows1[i], rows2[j]) += contrib(i, j);
          if (e1 != e2) A(rows2[j], rows1[i]) += contrib(i, j);
        }
    }
  });
  return out;
}

Eigen::VectorXcd assemble_excitation(const Superspace& ss,
                                     const std::function<Vec3c(const Vec3&)>& source,
                                     const QuadConfig& quad, ExcitationTrace trace) {
  Context ctx(ss, 1.0, quad);
  const int nfun = ss.funcs_per_element();
  const int E = ss.mesh.num_elements();
  VectorXcd g = VectorXcd::Zero(ss.dim());
  for (int e = 0; e < E; ++e) {
    const auto& ed = ctx.elements[e];
    for (int k = 0; k < ctx.nq; ++k) {
      Vec3c a;
      if (trace == ExcitationTrace::rotated)
        a = -ed.normals[k].cast<Complex>().cross(source(ed.xs[k]));
      else
        a = source(ed.xs[k]);
      for (int I = 0; I < nfun; ++I) {
        const Vec3c V(ed.C(k, 0 * nfun + I), ed.C(k, 1 * nfun + I), ed.C(k, 2 * nfun + I));
        g(e * nfun + I) += a.dot(V.conjugate());  // plain bilinear sum a·V
      }
    }
  }
  return g;
}

void transform_system(const Eigen::SparseMatrix<double, Eigen::RowMajor>& T,
                      const Eigen::MatrixXcd& A_star, const Eigen::VectorXcd& g_star,
                      Eigen::MatrixXcd& A, Eigen::VectorXcd& g) {
  if (T.cols() != A_star.rows() || A_star.rows() != A_star.cols() ||
      g_star.size() != A_star.rows())
    throw argument_error("transform_system: dimension mismatch");
  Eigen::SparseMatrix<Complex, Eigen::RowMajor> Tc = T.cast<Complex>();
  const Eigen::MatrixXcd B = Tc * A_star;
  A = B * Tc.transpose();
  g = Tc * g_star;
}

Eigen::MatrixXcd assemble_direct(const DiscreteSpace& space, const Superspace& ss, double kappa,
                                 const QuadConfig& quad) {
  // Evaluates the glued space basis functions from their B-spline pieces and
  // integrates with the same pair rules as the superspace route.
  Context ctx(ss, kappa, quad);
  const int ell = space.dof_count();
  const int E = ss.mesh.num_elements();
  const auto& geom = *space.geom;

  // value (2 components) and reference divergence of dof r on a patch point
  auto dof_eval = [&](int r, int patch, double u, double v, Vec2& val, double& div) {
    val.setZero();
    div = 0.0;
    const auto& d = space.dofs[r];
    auto add = [&](int pp, int comp, int i, int j, double factor) {
      if (pp != patch) return;
      const double bu = bspline_value(space.knots_u[comp], i, u);
      const double bv = bspline_value(space.knots_v[comp], j, v);
      const double du = bspline_derivative(space.knots_u[comp], i, u);
      const double dv = bspline_derivative(space.knots_v[comp], j, v);
      val[comp] += factor * bu * bv;
      div += factor * (comp == 0 ? du * bv : bu * dv);
    };
    add(d.patch, d.comp, d.i, d.j, 1.0);
    if (d.glued) add(d.partner_patch, d.partner_comp, d.partner_i, d.partner_j, d.dir);
  };

  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(ell, ell);
  const double mk = -kappa, pk = 1.0 / kappa;
  for (int e1 = 0; e1 < E; ++e1)
    for (int e2 = 0; e2 < E; ++e2) {
      const auto c1 = ss.mesh.coords(e1);
      const auto c2 = ss.mesh.coords(e2);
      const auto& patch1 = geom.patches[c1.patch];
      const auto& patch2 = geom.patches[c2.patch];
      double a0, a1, b0, b1, p0, p1, q0, q1;
      ss.mesh.param_box(e1, a0, a1, b0, b1);
      ss.mesh.param_box(e2, p0, p1, q0, q1);

      // nodes in element-local pair coordinates
      Eigen::MatrixXd nodes;
      Eigen::VectorXd weights;
      const PairConfig cfg = classify_pair_config(ss.mesh, e1, e2);
      if (cfg.pair_case == PairCase::far) {
        if (e2 < e1) {
          // handled when the mirrored pair comes up; keep symmetry exact
        }
        const QuadratureRule rule = tensor_rule(ctx.qf, 4);
        nodes = rule.nodes;
        weights = rule.weights;
      } else {
        const auto& rule = ctx.rules[static_cast<int>(cfg.pair_case)];
        nodes.resize(4, rule.size());
        weights = rule.weights;
        for (int k = 0; k < rule.size(); ++k) {
          const Vec2 s = d4_apply(cfg.rot1, rule.nodes(0, k), rule.nodes(1, k));
          const Vec2 t = d4_apply(cfg.rot2, rule.nodes(2, k), rule.nodes(3, k));
          nodes.col(k) << s[0], s[1], t[0], t[1];
        }
      }

      const double inv_measure2 = 1.0 / std::pow(static_cast<double>(ss.mesh.n), 4);
      for (int k = 0; k < nodes.cols(); ++k) {
        const double us = a0 + nodes(0, k) * (a1 - a0);
        const double vs = b0 + nodes(1, k) * (b1 - b0);
        const double ut = p0 + nodes(2, k) * (p1 - p0);
        const double vt = q0 + nodes(3, k) * (q1 - q0);
        Vec3 xS, xT;
        Mat32 JS, JT;
        patch1.eval_with_jacobian(us, vs, xS, JS);
        patch2.eval_with_jacobian(ut, vt, xT, JT);
        const Complex wG = weights(k) * inv_measure2 * greens_function(kappa, xS, xT);
        for (int r1 = 0; r1 < ell; ++r1) {
          Vec2 f1;
          double div1;
          dof_eval(r1, c1.patch, us, vs, f1, div1);
          if (f1.isZero(0.0) && div1 == 0.0) continue;
          const Vec3 v1 = JS * f1;
          for (int r2 = 0; r2 < ell; ++r2) {
            Vec2 f2;
            double div2;
            dof_eval(r2, c2.patch, ut, vt, f2, div2);
            const Vec3 v2 = JT * f2;
            A(r1, r2) += wG * (mk * v1.dot(v2) + pk * div1 * div2);
          }
        }
      }
    }
  return A;
}

void dump_system(const std::string& path, const EfieSystem& sys, uint64_t descriptor_hash) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("dump_system: cannot open " + path);
  const uint64_t ell = static_cast<uint64_t>(sys.A.rows());
  out.write("EFIESYS1", 8);
  out.write(reinterpret_cast<const char*>(&ell), 8);
  out.write(reinterpret_cast<const char*>(&sys.kappa), 8);
  out.write(reinterpret_cast<const char*>(&descriptor_hash), 8);
  out.write(reinterpret_cast<const char*>(sys.A.data()), sizeof(Complex) * sys.A.size());
  out.write(reinterpret_cast<const char*>(sys.g.data()), sizeof(Complex) * sys.g.size());
}

}  // namespace efie
