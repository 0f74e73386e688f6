#pragma once

#include <cstdint>

#include "lowner/baselines.hpp"
#include "lowner/copositive.hpp"
#include "lowner/geometry.hpp"

namespace lowner {

// Unit box centered at e/2 cut by M random hyperplanes through a shell around the center.
Polytope random_polytope(int K, int M, std::uint64_t seed);

// Simplex spanned by K+1 Gaussian points.
Polytope random_simplex(int K, std::uint64_t seed);

// {0 <= x <= e, e^T x <= sqrt(K)}
Polytope chipped_hypercube(int K);

struct ChippedPrimal {
  Ellipsoid ellipsoid;
  Certificate certificate;  // N from the closed form, F = A^2, g = A b, h = b^T b
};
ChippedPrimal chipped_closed_form_certificate(int K);

struct ChippedDual {
  SmvieDual dual;
  InscribedEllipsoid inscribed;
};
ChippedDual chipped_closed_form_dual(int K);

// det of the scaled inscribed shape K B: K^K / (K+1)^((K+1)/2)
double chipped_mvie_det(int K);
double chipped_smvie_radius(int K);

}  // namespace lowner
