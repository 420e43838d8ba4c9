#pragma once

// Exact descent-cone areas for weighted l1 norms in R^3 at 1-sparse points,
// and the resulting uniform / non-uniform compliance measures.
//
// The descent cone at sigma*e_i is the conic hull of {+-mu_j e_j - mu_i e_i},
// mu = 1/w. It splits into four congruent simplicial cones (one per sign
// quadrant of the two off-axis coordinates), each spanned by
// mu_j e_j - mu_i e_i, mu_l e_l - mu_i e_i and -mu_i e_i.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "regcomply/core.hpp"

namespace regcomply::geometry {

using Vec3 = std::array<double, 3>;

inline constexpr double kFullSphere = 4.0 * std::numbers::pi;

// Inverse weights mu_i = 1/w_i. For normalized weights all mu_i >= 1.
struct Mu3 {
  std::array<double, 3> mu;

  static Mu3 from_weights(const WeightVector& w) {
    check_dimension(3, w.size());
    return Mu3{{1.0 / w[0], 1.0 / w[1], 1.0 / w[2]}};
  }
  double operator[](std::size_t i) const { return mu[i]; }
};

// Area of a region of the unit sphere, in steradians.
class SolidAngle {
 public:
  explicit SolidAngle(double sr) : sr_(sr) {
    if (!(sr >= 0.0 && sr <= kFullSphere * (1.0 + 1e-12)))
      throw DomainError("solid angle outside [0, 4pi]");
  }
  double steradians() const noexcept { return sr_; }
  double sphere_fraction() const noexcept { return sr_ / kFullSphere; }

 private:
  double sr_;
};

// cos of the tetrahedron angle alpha_ij: (1 + (mu_j/mu_i)^2)^(-1/2).
inline double beta(std::size_t i, std::size_t j, const Mu3& mu) {
  if (i > 2 || j > 2) throw DomainError("axis index out of range");
  if (i == j) throw DomainError("beta(i, i) is a product of off-diagonal terms; use i != j");
  const double r = mu[j] / mu[i];
  return 1.0 / std::sqrt(1.0 + r * r);
}

// c_i = 1 + sum_{j != i} beta_ij + prod_{j != i} beta_ij, as it appears in the
// closed form 4 * atan(1 / (1 + c_i)).
inline double c_published(std::size_t i, const Mu3& mu) {
  if (i > 2) throw DomainError("axis index out of range");
  const std::size_t j = (i + 1) % 3, l = (i + 2) % 3;
  const double bj = beta(i, j, mu), bl = beta(i, l, mu);
  return 1.0 + bj + bl + bj * bl;
}

namespace detail {

inline Vec3 normalized(const Vec3& v) {
  const double len = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  if (!(len > 0.0) || !std::isfinite(len)) throw DegenerateCone("zero-length cone generator");
  return {v[0] / len, v[1] / len, v[2] / len};
}

inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline double triple(const Vec3& a, const Vec3& b, const Vec3& c) {
  return a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
         a[2] * (b[0] * c[1] - b[1] * c[0]);
}

}  // namespace detail

// Solid angle of the simplicial cone spanned by a, b, c, from the triple
// product formula tan(Omega/2) = |det[a b c]| / (1 + a.b + b.c + c.a).
inline SolidAngle tetra_solid_angle(const Vec3& a_in, const Vec3& b_in, const Vec3& c_in) {
  const Vec3 a = detail::normalized(a_in);
  const Vec3 b = detail::normalized(b_in);
  const Vec3 c = detail::normalized(c_in);
  const double det = std::abs(detail::triple(a, b, c));
  if (det < 1e-14) throw DegenerateCone("coplanar cone generators");
  const double denom = 1.0 + detail::dot(a, b) + detail::dot(b, c) + detail::dot(c, a);
  return SolidAngle(2.0 * std::atan2(det, denom));
}

// Area of T(sigma e_axis) on the unit sphere; independent of sigma.
inline SolidAngle descent_cone_area_3d(const WeightVector& w, std::size_t axis, int sign = 1) {
  check_dimension(3, w.size());
  if (axis > 2) throw DomainError("axis index out of range");
  if (sign != 1 && sign != -1) throw DomainError("sign must be +1 or -1");
  const Mu3 mu = Mu3::from_weights(w);
  const std::size_t j = (axis + 1) % 3, l = (axis + 2) % 3;
  Vec3 gj{}, gl{}, apex{};
  gj[j] = mu[j];
  gj[axis] = -mu[axis];
  gl[l] = mu[l];
  gl[axis] = -mu[axis];
  apex[axis] = -mu[axis];
  return SolidAngle(4.0 * tetra_solid_angle(gj, gl, apex).steradians());
}

// The closed form 4 * atan(1 / (1 + c_i)), kept for comparison with the exact
// area above. It omits the triple-product numerator and does not equal the
// sphere measure of the cone.
inline double published_cone_area_3d(const WeightVector& w, std::size_t axis) {
  return 4.0 * std::atan(1.0 / (1.0 + c_published(axis, Mu3::from_weights(w))));
}

inline std::array<double, 3> cone_areas_3d(const WeightVector& w) {
  return {descent_cone_area_3d(w, 0).steradians(), descent_cone_area_3d(w, 1).steradians(),
          descent_cone_area_3d(w, 2).steradians()};
}

// 1 - vol(T(Sigma_1) cap S)/vol(S). The six signed cones +-e_i overlap only on
// a null set, so their areas add.
inline double compliance_uniform_3d(const WeightVector& w) {
  const auto a = cone_areas_3d(w);
  return 1.0 - 2.0 * (a[0] + a[1] + a[2]) / kFullSphere;
}

// 1 - max_i vol(T(e_i) cap S)/vol(S).
inline double compliance_nonuniform_3d(const WeightVector& w) {
  const auto a = cone_areas_3d(w);
  return 1.0 - *std::max_element(a.begin(), a.end()) / kFullSphere;
}

// Axis with the largest descent cone (ties: lowest index).
inline std::size_t max_area_axis(const WeightVector& w) {
  const auto a = cone_areas_3d(w);
  return static_cast<std::size_t>(std::max_element(a.begin(), a.end()) - a.begin());
}

}  // namespace regcomply::geometry
