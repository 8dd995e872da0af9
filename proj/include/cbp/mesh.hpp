#pragma once

#include <array>
#include <string>
#include <vector>

#include "cbp/errors.hpp"
#include "cbp/reference.hpp"

namespace cbp {

enum class BoundaryKind { periodic, dirichlet };

inline std::string to_string(BoundaryKind b) { return b == BoundaryKind::periodic ? "periodic" : "dirichlet"; }

// Neighbor across one element face. element < 0 marks a boundary face.
struct FaceLink {
  int element = -1;
  int face = -1;
  bool boundary() const { return element < 0; }
};

/// Structured interval or Cartesian quad mesh with affine element maps
/// x = center + 0.5 * size (.) x_ref.
struct Mesh {
  ElementKind kind = ElementKind::segment;
  int nx = 0;
  int ny = 1;
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{0.0, 0.0};
  BoundaryKind boundary = BoundaryKind::periodic;
  std::array<double, 2> size{0.0, 0.0};  // element widths per axis (uniform)
  std::vector<Coord> centers;
  std::vector<std::vector<FaceLink>> links;  // [element][reference face]

  int dim() const { return kind == ElementKind::segment ? 1 : 2; }
  int num_elements() const { return static_cast<int>(centers.size()); }
  int index(int i, int j = 0) const { return i + nx * j; }

  double volume() const { return kind == ElementKind::segment ? size[0] : size[0] * size[1]; }
  // Ratio of physical to reference volume (constant Jacobian determinant).
  double jacobian() const { return volume() / (kind == ElementKind::segment ? 2.0 : 4.0); }

  Coord to_physical(int e, const Coord& xr) const {
    const auto& c = centers[e];
    return {c[0] + 0.5 * size[0] * xr[0], dim() > 1 ? c[1] + 0.5 * size[1] * xr[1] : 0.0};
  }
  Coord to_reference(int e, const Coord& xp) const {
    const auto& c = centers[e];
    return {2.0 * (xp[0] - c[0]) / size[0], dim() > 1 ? 2.0 * (xp[1] - c[1]) / size[1] : 0.0};
  }
};

inline Mesh build_interval_mesh(int n, double x_lo, double x_hi, BoundaryKind bc) {
  if (n < 2) throw ConfigError("interval mesh needs at least 2 elements, got " + std::to_string(n));
  if (!(x_hi > x_lo)) throw ConfigError("interval mesh needs x_hi > x_lo");
  Mesh m;
  m.kind = ElementKind::segment;
  m.nx = n;
  m.ny = 1;
  m.lo = {x_lo, 0.0};
  m.hi = {x_hi, 0.0};
  m.boundary = bc;
  m.size = {(x_hi - x_lo) / n, 0.0};
  m.centers.resize(n);
  m.links.assign(n, std::vector<FaceLink>(2));
  for (int i = 0; i < n; ++i) {
    m.centers[i] = {x_lo + (i + 0.5) * m.size[0], 0.0};
    const bool first = i == 0, last = i == n - 1;
    const bool periodic = bc == BoundaryKind::periodic;
    m.links[i][0] = first ? (periodic ? FaceLink{n - 1, 1} : FaceLink{}) : FaceLink{i - 1, 1};
    m.links[i][1] = last ? (periodic ? FaceLink{0, 0} : FaceLink{}) : FaceLink{i + 1, 0};
  }
  return m;
}

/// Quad faces follow the reference order {-x, +x, -y, +y}.
inline Mesh build_cartesian_mesh(int nx, int ny, std::array<double, 2> lo, std::array<double, 2> hi,
                                 BoundaryKind bc) {
  if (nx < 2 || ny < 2)
    throw ConfigError("cartesian mesh needs at least 2x2 elements, got " + std::to_string(nx) + "x" +
                      std::to_string(ny));
  if (!(hi[0] > lo[0] && hi[1] > lo[1])) throw ConfigError("cartesian mesh needs a non-empty box");
  Mesh m;
  m.kind = ElementKind::quad;
  m.nx = nx;
  m.ny = ny;
  m.lo = lo;
  m.hi = hi;
  m.boundary = bc;
  m.size = {(hi[0] - lo[0]) / nx, (hi[1] - lo[1]) / ny};
  m.centers.resize(static_cast<size_t>(nx) * ny);
  m.links.assign(m.centers.size(), std::vector<FaceLink>(4));
  const bool periodic = bc == BoundaryKind::periodic;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int e = m.index(i, j);
      m.centers[e] = {lo[0] + (i + 0.5) * m.size[0], lo[1] + (j + 0.5) * m.size[1]};
      auto link = [&](int ii, int jj, int face) -> FaceLink {
        if (ii < 0 || ii >= nx || jj < 0 || jj >= ny) {
          if (!periodic) return {};
          ii = (ii + nx) % nx;
          jj = (jj + ny) % ny;
        }
        return {m.index(ii, jj), face};
      };
      m.links[e][0] = link(i - 1, j, 1);
      m.links[e][1] = link(i + 1, j, 0);
      m.links[e][2] = link(i, j - 1, 3);
      m.links[e][3] = link(i, j + 1, 2);
    }
  return m;
}

}  // namespace cbp
