// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "mero/contour.hpp"
#include "mero/matfun.hpp"

namespace mero
{

inline constexpr int kHowlandStepLimit = 32;

struct FactorizeOptions
{
  // Radius of the Cauchy differentiation circle used for A_j'(z0) when A_j
  // has no stored derivative. Must keep A analytic on the closed disk.
  double derivative_radius = 0.1;
  int derivative_nodes = kDefaultContourNodes;
  int step_limit = kHowlandStepLimit;
};

// One degeneracy factor Q - (z - z0) P.
struct HowlandFactor
{
  ComplexMatrix p;  // orthogonal projection onto ran(A_j(z0))^perp
  ComplexMatrix q;  // I - p
  int rank = 0;     // p_j = rank p
};

struct HowlandStepResult
{
  HowlandFactor factor;
  MatrixFunction next;  // A_{j+1}
};

// Peels one factor off A at z0: A(z) = [Q - (z - z0) P] A1(z). A1(z0) is the
// closed form Q A(z0) - P A'(z0). Throws NothingToFactor when A(z0) has full
// rank and RankGapTooSmall when the rank decision is ambiguous.
HowlandStepResult HowlandStep(const MatrixFunction &a, Complex z0,
                              const FactorizeOptions &options = {});

struct HowlandFactorization
{
  Complex center;
  std::vector<HowlandFactor> steps;
  int n0 = 0;
  MatrixFunction tail;
  int nu = 0;
  std::vector<int> partial_multiplicities;  // ascending
  int kernel_dimension = 0;                 // dim ker A(z0)
};

// Iterates HowlandStep until the tail is invertible at z0 and checks the
// structural invariants (monotone p, p_1 = dim ker A(z0), nu bounds,
// idempotent projections). A(z0) invertible gives n0 = 0 and nu = 0.
HowlandFactorization HowlandFactorize(const MatrixFunction &a, Complex z0,
                                      const FactorizeOptions &options = {});

// prod_j [Q_j - (z - z0) P_j] * tail(z).
ComplexMatrix Reconstruct(const HowlandFactorization &f, Complex z);

// Conjugate partition, returned in ascending order. Input order is ignored.
std::vector<int> ConjugatePartition(std::vector<int> parts);

// nu = dim ker A(z0) holds exactly when n0 = 1; throws PreconditionFailed if
// the two characterizations disagree.
bool SimplePoleCriterion(const HowlandFactorization &f, const MatrixFunction &a);

// nu as the zero order of det F, where F is the block of T A T^{-1} on
// ran P(z0), P(z) the Riesz projection of A(z) for the eigenvalues near 0 and
// T(z) = P(z0) P(z) + Q(z0) Q(z). Throws InnerRadiusUnusable or
// NeighborhoodTooLarge when eps is too large for the block picture.
int NuViaBlockDeterminant(const MatrixFunction &a, Complex z0, double eps,
                          int nodes = kDefaultContourNodes);

// Retries NuViaBlockDeterminant with eps halved up to `halvings` times.
int NuViaBlockDeterminantShrinking(const MatrixFunction &a, Complex z0, double eps,
                                   int halvings = 20, int nodes = kDefaultContourNodes);

}  // namespace mero
