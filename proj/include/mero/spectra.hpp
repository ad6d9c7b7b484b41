// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mero/contour.hpp"
#include "mero/matfun.hpp"

namespace mero
{

// Algebraic and geometric multiplicity of an isolated eigenvalue, obtained
// from the Riesz projection on C(location; radius).
struct MultiplicityReport
{
  Complex location;
  int algebraic = 0;
  int geometric = 0;
  Complex raw_trace;
  // ||P^2 - P|| / max(1, ||P||^2), spectral norms.
  double projection_residual = 0.0;
  double radius = 0.0;
  int node_count = 0;
};

// P = -(1/2 pi i) * integral of (T - zeta)^{-1} over C(z0; eps). Throws
// EvaluationAtSpectrum when the contour meets the spectrum of T.
ComplexMatrix RieszProjection(const ComplexMatrix &t, Complex z0, double eps,
                              int nodes = kDefaultContourNodes);

// m_a = round(tr P), m_g = dim ker(T - z0). Throws IntegralityViolation
// ("ill-conditioned contour") when tr P is not within 1e-6 of an integer or
// P fails the idempotency check.
MultiplicityReport EigenMultiplicities(const ComplexMatrix &t, Complex z0, double eps,
                                       int nodes = kDefaultContourNodes);

// Trace of the logarithmic-derivative integral in both operator orders.
struct LogDerivativeTrace
{
  Complex left;   // tr (1/2 pi i) * integral of M' M^{-1}
  Complex right;  // tr (1/2 pi i) * integral of M^{-1} M'
  int value = 0;  // common rounded integer
};

// Computes both traces, checks they agree to 1e-8 and are within 1e-6 of an
// integer. The derivative is the stored one, or the Cauchy fallback on a
// circle of radius eps/4 around each node.
LogDerivativeTrace LogDerivativeIndex(const MatrixFunction &m, Complex z0, double eps,
                                      int nodes = kDefaultContourNodes);

// Multiplicity of a zero of an analytic function via the operator argument
// principle; identical integral to Index, named for the analytic case.
int ArgumentPrincipleMultiplicity(const MatrixFunction &a, Complex z0, double eps,
                                  int nodes = kDefaultContourNodes);

// Index of a meromorphic function with respect to C(z0; eps).
int Index(const MatrixFunction &m, Complex z0, double eps, int nodes = kDefaultContourNodes);

// Independent oracle: winding number of det M(zeta) around C(z0; eps).
int DetWindingOracle(const MatrixFunction &m, Complex z0, double eps,
                     int nodes = kDefaultContourNodes);

struct IndexTriple
{
  int first = 0;
  int second = 0;
  int product = 0;
};

// Indices of M1, M2 and M1 M2 about the same circle.
IndexTriple IndexAdditivityCheck(const MatrixFunction &m1, const MatrixFunction &m2, Complex z0,
                                 double eps, int nodes = kDefaultContourNodes);

// Half the distance from z0 to the nearest eigenvalue of t that is not within
// `cluster_tol` of z0. Never shrinks anything on its own; callers decide.
double SuggestRadius(const ComplexMatrix &t, Complex z0, double cluster_tol = 1e-6);

}  // namespace mero
