#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "cbp/errors.hpp"

namespace cbp {

// Reference coordinate. Segments use only the first entry; the second stays 0.
using Coord = std::array<double, 2>;

inline constexpr double kDefaultTol = 1e-12;

enum class ElementKind { segment, quad, triangle };

inline std::string to_string(ElementKind k) {
  switch (k) {
    case ElementKind::segment: return "segment";
    case ElementKind::quad: return "quad";
    case ElementKind::triangle: return "triangle";
  }
  return "?";
}

inline int dimension_of(ElementKind k) { return k == ElementKind::segment ? 1 : 2; }

// Halfspace n.x <= b with unit outward normal n.
struct Face {
  Coord normal{};
  double offset = 0.0;
};

inline double dot(const Coord& a, const Coord& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm2(const Coord& a) { return std::sqrt(dot(a, a)); }
inline Coord operator+(const Coord& a, const Coord& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Coord operator-(const Coord& a, const Coord& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Coord operator*(double s, const Coord& a) { return {s * a[0], s * a[1]}; }

/// Convex reference domain bounded by planar faces.
///
/// Segment = [-1,1], quad = [-1,1]^2, triangle = hull of (-1,-1),(1,-1),(-1,1).
/// Face order: segment {-x, +x}; quad {-x, +x, -y, +y}; triangle {-y, -x, hypotenuse}.
struct ReferenceElement {
  ElementKind kind = ElementKind::segment;
  int dim = 1;
  std::vector<Coord> vertices;
  std::vector<Face> faces;

  static ReferenceElement make(ElementKind kind) {
    ReferenceElement e;
    e.kind = kind;
    e.dim = dimension_of(kind);
    switch (kind) {
      case ElementKind::segment:
        e.vertices = {{-1.0, 0.0}, {1.0, 0.0}};
        e.faces = {{{-1.0, 0.0}, 1.0}, {{1.0, 0.0}, 1.0}};
        break;
      case ElementKind::quad:
        e.vertices = {{-1.0, -1.0}, {1.0, -1.0}, {1.0, 1.0}, {-1.0, 1.0}};
        e.faces = {{{-1.0, 0.0}, 1.0}, {{1.0, 0.0}, 1.0}, {{0.0, -1.0}, 1.0}, {{0.0, 1.0}, 1.0}};
        break;
      case ElementKind::triangle: {
        const double s = 1.0 / std::sqrt(2.0);
        e.vertices = {{-1.0, -1.0}, {1.0, -1.0}, {-1.0, 1.0}};
        e.faces = {{{0.0, -1.0}, 1.0}, {{-1.0, 0.0}, 1.0}, {{s, s}, 0.0}};
        break;
      }
    }
    return e;
  }

  // Lebesgue measure of the reference domain.
  double measure() const { return kind == ElementKind::quad ? 4.0 : 2.0; }

  Coord centroid() const {
    Coord c{0.0, 0.0};
    for (const auto& v : vertices) c = c + v;
    return (1.0 / static_cast<double>(vertices.size())) * c;
  }
};

inline bool contains(const ReferenceElement& elem, const Coord& x, double tol = kDefaultTol) {
  for (const auto& f : elem.faces)
    if (dot(f.normal, x) > f.offset + tol) return false;
  return true;
}

inline Coord to_coord(const ReferenceElement& elem, std::span<const double> x) {
  if (static_cast<int>(x.size()) != elem.dim)
    throw UsageError("reference coordinate has dimension " + std::to_string(x.size()) +
                     ", element " + to_string(elem.kind) + " expects " + std::to_string(elem.dim));
  return {x[0], elem.dim > 1 ? x[1] : 0.0};
}

// Dimension-checked overload.
inline bool contains(const ReferenceElement& elem, std::span<const double> x, double tol = kDefaultTol) {
  return contains(elem, to_coord(elem, x), tol);
}

/// Indices of faces on which x lies (|n.x - b| <= tol), in face order.
inline std::vector<int> active_faces(const ReferenceElement& elem, const Coord& x,
                                     double tol = kDefaultTol) {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(elem.faces.size()); ++i) {
    const auto& f = elem.faces[i];
    if (std::abs(dot(f.normal, x) - f.offset) <= tol) out.push_back(i);
  }
  return out;
}

namespace detail {

// Largest eta in [0,1] keeping x + eta*d inside every face.
inline double max_feasible_fraction(const ReferenceElement& elem, const Coord& x, const Coord& d) {
  double eta = 1.0;
  for (const auto& f : elem.faces) {
    const double rate = dot(f.normal, d);
    if (rate <= 0.0) continue;
    const double slack = std::max(0.0, f.offset - dot(f.normal, x));
    eta = std::min(eta, slack / rate);
  }
  return std::clamp(eta, 0.0, 1.0);
}

}  // namespace detail

/// Restrict an optimizer step so that x1 + step stays in the element.
///
/// Inside steps pass through unchanged. From the interior, an exiting step is
/// shortened along its direction to the boundary. From a face, the outward
/// normal component is removed for each active face in index order, then the
/// result is shortened against the remaining faces. Corners that still exit
/// collapse to the zero step.
inline Coord project_step(const ReferenceElement& elem, const Coord& x1, const Coord& dx,
                          double tol = kDefaultTol) {
  if (!contains(elem, x1, tol))
    throw UsageError("project_step: start point lies outside the reference element");
  if (contains(elem, x1 + dx, tol)) return dx;

  Coord d = dx;
  if (elem.dim == 1) d[1] = 0.0;
  for (int fi : active_faces(elem, x1, tol)) {
    const auto& n = elem.faces[fi].normal;
    const double nd = dot(n, d);
    if (nd > 0.0) d = d - nd * n;
  }
  const double eta = detail::max_feasible_fraction(elem, x1, d);
  Coord out = eta * d;
  if (!contains(elem, x1 + out, tol)) return {0.0, 0.0};
  return out;
}

}  // namespace cbp
