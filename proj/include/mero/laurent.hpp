// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <vector>

#include "mero/contour.hpp"
#include "mero/matfun.hpp"

namespace mero
{

inline constexpr int kDefaultMaxPoleOrder = 16;

// Laurent data of a matrix function about `center`, extracted on a circle.
struct LaurentData
{
  Complex center;
  std::map<int, ComplexMatrix> coefficients;  // k -> M_k(center)
  int pole_order = 0;
  // Numerical ranks of M_{-pole_order}, ..., M_{-1}, in that order.
  std::vector<Eigen::Index> principal_ranks;
  double extraction_radius = 0.0;
  int node_count = 0;
  double coefficient_tolerance = 0.0;
};

// k-th Laurent coefficient (1/2 pi i) * integral of (zeta - z0)^(-k-1) M(zeta).
ComplexMatrix LaurentCoefficient(const MatrixFunction &m, Complex z0, int k, const Contour &c);

// Extracts M_{-kmax}, ..., M_{-1} on C(z0; eps). Coefficients with norm at most
// 1e-9 * (1 + max_j ||M(zeta_j)||) count as zero. Throws PoleOrderExceeded when
// M_{-kmax} is above tolerance.
LaurentData PrincipalPart(const MatrixFunction &m, Complex z0, double eps,
                          int kmax = kDefaultMaxPoleOrder, int nodes = kDefaultContourNodes);

// Extracts coefficients k = kmin..kmax (kmin may be negative).
LaurentData LaurentExpansion(const MatrixFunction &m, Complex z0, double eps, int kmin, int kmax,
                             int nodes = kDefaultContourNodes);

// Evaluates the stored truncated series at z.
ComplexMatrix EvaluateSeries(const LaurentData &data, Complex z);

struct MeromorphyReport
{
  bool meromorphic_within_kmax = false;
  int pole_order = 0;
  std::vector<Eigen::Index> principal_ranks;
};

// At matrix scale every principal-part coefficient has finite rank; the ranks
// are reported as diagnostics.
MeromorphyReport IsFinitelyMeromorphicAt(const MatrixFunction &m, Complex z0, double eps,
                                         int kmax = kDefaultMaxPoleOrder,
                                         int nodes = kDefaultContourNodes);

struct TraceSymmetry
{
  ComplexMatrix m1m2;  // (1/2 pi i) * integral of M1 M2
  ComplexMatrix m2m1;  // (1/2 pi i) * integral of M2 M1
  double residual = 0.0;
};

// Contour integrals of both products and the gap between their traces.
TraceSymmetry TracePrincipalPartSymmetry(const MatrixFunction &m1, const MatrixFunction &m2,
                                         const Contour &c);

// Error of the k-th coefficient on C(z0; radius) as the node count doubles.
struct CoefficientConvergence
{
  std::vector<int> nodes;
  // ||M_k(N) - exact|| / max(1, ||exact||), Frobenius norms.
  std::vector<double> errors;
  // Each doubling cuts the error by `ratio` until it reaches `floor`, and the
  // last error is at most `floor`.
  bool geometric = false;
};

CoefficientConvergence CoefficientErrorByNodes(const MatrixFunction &m, Complex z0, double radius,
                                               int k, const ComplexMatrix &exact,
                                               const std::vector<int> &nodes,
                                               double ratio = 1e3, double floor = 1e-12);

}  // namespace mero
