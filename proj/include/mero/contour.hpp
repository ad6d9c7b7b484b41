// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "mero/linalg.hpp"

namespace mero
{

inline constexpr int kMinContourNodes = 8;
inline constexpr int kDefaultContourNodes = 256;

// Counterclockwise circle C(center; radius) discretized by the trapezoid rule
// on equispaced angles, starting at angle 0.
class Contour
{
public:
  Contour(Complex center, double radius, int nodes);

  Complex Center() const noexcept { return center_; }
  double Radius() const noexcept { return radius_; }
  int NodeCount() const noexcept { return static_cast<int>(nodes_.size()); }
  std::span<const Complex> Nodes() const noexcept { return nodes_; }
  Complex Node(int j) const { return nodes_[static_cast<std::size_t>(j)]; }

private:
  Complex center_;
  double radius_;
  std::vector<Complex> nodes_;
};

Contour MakeCircle(Complex center, double radius, int nodes = kDefaultContourNodes);

using MatrixIntegrand = std::function<ComplexMatrix(Complex)>;
using ScalarIntegrand = std::function<Complex(Complex)>;

// (1/2 pi i) * contour integral of f, approximated by
// (1/N) sum_j f(zeta_j) (zeta_j - center). Summation follows node order, so
// results are bit-reproducible. An Error thrown by f is rethrown with the
// offending node attached.
ComplexMatrix CauchyIntegral(const MatrixIntegrand &f, const Contour &c);
Complex CauchyIntegralScalar(const ScalarIntegrand &f, const Contour &c);

// Winding number of h around the contour from continuously unwrapped phase.
// Throws ZeroOnContour when |h| < floor at a node and UnderResolvedContour
// when the phase moves by more than pi/2 between adjacent nodes.
int ScalarWinding(const ScalarIntegrand &h, const Contour &c);
int ScalarWinding(const ScalarIntegrand &h, const Contour &c, double floor);

// Winding of precomputed samples h(zeta_j), in node order.
int WindingOfSamples(std::span<const Complex> samples, double floor);

}  // namespace mero
