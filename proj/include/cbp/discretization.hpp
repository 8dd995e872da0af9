#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "cbp/basis.hpp"
#include "cbp/equations.hpp"
#include "cbp/errors.hpp"
#include "cbp/mesh.hpp"

namespace cbp {

/// Static operators of a collocated Gauss-Lobatto FR/DG discretization on a
/// structured segment or quad mesh.
///
/// Nodes are numbered i + (p+1) j with i along x. Solution vectors are stored
/// element-major, node-major: u[(e * nodes + i) * m + c].
struct Discretization {
  Mesh mesh;
  Basis basis;
  EquationSet eq;
  int p = 1;
  int np = 2;     // nodes per line
  int nodes = 2;  // nodes per element
  int m = 1;      // conserved variables
  int nfaces = 2;
  int face_nodes_count = 1;

  std::vector<double> D;       // np x np Lagrange derivative at GL nodes, row-major
  std::vector<double> gl, gr;  // derivatives of the left/right DG correction functions at nodes
  std::vector<double> what;    // GL line weights normalized to sum 1
  std::vector<std::vector<int>> face_nodes;  // [face][k] -> element node
  std::vector<Coord> normals;                // [face]
  std::vector<Coord> xnodes;                 // physical node coordinates [e * nodes + i]
  std::vector<double> ghost;                 // frozen boundary states [((e * nfaces + f) * fn + k) * m + c]

  int dim() const { return mesh.dim(); }
  int num_elements() const { return mesh.num_elements(); }
  size_t dofs() const { return static_cast<size_t>(num_elements()) * nodes * m; }
  size_t face_dofs() const { return static_cast<size_t>(num_elements()) * nfaces * face_nodes_count * m; }
  size_t face_slot(int e, int f, int k) const {
    return ((static_cast<size_t>(e) * nfaces + f) * face_nodes_count + k) * m;
  }
  size_t node_slot(int e, int i) const { return (static_cast<size_t>(e) * nodes + i) * m; }

  StateVec load(std::span<const double> u, int e, int i) const {
    StateVec s{};
    const size_t o = node_slot(e, i);
    for (int c = 0; c < m; ++c) s[c] = u[o + c];
    return s;
  }

  // Smallest normalized line weight (the endpoint weight 1/(p(p+1))).
  double min_weight() const { return what.front(); }

  double element_mean(std::span<const double> u, int e, int c) const {
    double s = 0.0;
    if (dim() == 1) {
      for (int i = 0; i < np; ++i) s += what[i] * u[node_slot(e, i) + c];
    } else {
      for (int j = 0; j < np; ++j)
        for (int i = 0; i < np; ++i) s += what[i] * what[j] * u[node_slot(e, i + np * j) + c];
    }
    return s;
  }

  double node_weight(int i) const { return dim() == 1 ? what[i] : what[i % np] * what[i / np]; }
};

namespace detail {

inline std::vector<double> lagrange_derivative(const std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  std::vector<double> lam(n, 1.0);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (k != j) lam[j] /= x[j] - x[k];
  std::vector<double> D(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    double diag = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double v = (lam[j] / lam[i]) / (x[i] - x[j]);
      D[i * n + j] = v;
      diag -= v;
    }
    D[i * n + i] = diag;
  }
  return D;
}

}  // namespace detail

inline Discretization make_discretization(const Mesh& mesh, int p, const EquationSet& eq) {
  if (mesh.kind == ElementKind::triangle) throw ConfigError("PDE solver supports segment and quad meshes only");
  if (eq.dim != mesh.dim()) throw ConfigError("equation dimension does not match the mesh");
  Discretization d;
  d.mesh = mesh;
  d.basis = build_basis(mesh.kind, p);
  d.eq = eq;
  d.p = p;
  d.np = p + 1;
  d.nodes = d.basis.nodal.size();
  d.m = eq.num_vars();
  const auto& x = d.basis.line_nodes;
  d.D = detail::lagrange_derivative(x);
  d.gl.resize(d.np);
  d.gr.resize(d.np);
  d.what.resize(d.np);
  const double sgn = p % 2 == 0 ? 1.0 : -1.0;
  for (int i = 0; i < d.np; ++i) {
    const double dp = legendre(p, x[i]).second;
    const double dq = legendre(p + 1, x[i]).second;
    d.gl[i] = 0.5 * sgn * (dp - dq);
    d.gr[i] = 0.5 * (dp + dq);
    d.what[i] = 0.5 * d.basis.line_weights[i];
  }
  const int np = d.np;
  if (mesh.dim() == 1) {
    d.nfaces = 2;
    d.face_nodes_count = 1;
    d.face_nodes = {{0}, {p}};
    d.normals = {{-1.0, 0.0}, {1.0, 0.0}};
  } else {
    d.nfaces = 4;
    d.face_nodes_count = np;
    d.face_nodes.assign(4, std::vector<int>(np));
    for (int k = 0; k < np; ++k) {
      d.face_nodes[0][k] = np * k;
      d.face_nodes[1][k] = p + np * k;
      d.face_nodes[2][k] = k;
      d.face_nodes[3][k] = k + np * p;
    }
    d.normals = {{-1.0, 0.0}, {1.0, 0.0}, {0.0, -1.0}, {0.0, 1.0}};
  }
  const int ne = mesh.num_elements();
  d.xnodes.resize(static_cast<size_t>(ne) * d.nodes);
  for (int e = 0; e < ne; ++e)
    for (int i = 0; i < d.nodes; ++i) d.xnodes[static_cast<size_t>(e) * d.nodes + i] = mesh.to_physical(e, d.basis.nodal.nodes[i]);
  d.ghost.assign(d.face_dofs(), 0.0);
  return d;
}

}  // namespace cbp
