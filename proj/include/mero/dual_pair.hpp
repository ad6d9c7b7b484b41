// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>

#include "mero/contour.hpp"
#include "mero/matfun.hpp"

namespace mero
{

// A linear operator in C^n described through a parameter space C^m: the
// domain is {D w : C w = 0} and the operator maps D w to T w.
struct ParameterizedOperator
{
  ComplexMatrix embed;       // D, n x m
  ComplexMatrix action;      // T, n x m
  ComplexMatrix constraint;  // C, c x m (c may be 0)

  Eigen::Index AmbientDim() const noexcept { return embed.rows(); }
  Eigen::Index ParamDim() const noexcept { return embed.cols(); }
};

// Boundary triple for a dual pair: the maximal operators B^* and A^* with
// boundary maps Gamma^B = (G0B, G1B) and Gamma^A = (G0A, G1A).
struct DualPairTriple
{
  ParameterizedOperator bstar;
  ParameterizedOperator astar;
  ComplexMatrix gamma_b0;  // m_B -> h0
  ComplexMatrix gamma_b1;  // m_B -> h1
  ComplexMatrix gamma_a0;  // m_A -> h1
  ComplexMatrix gamma_a1;  // m_A -> h0
};

struct GreenReport
{
  // ||T_B^H D_A - D_B^H T_A - (G1B^H G0A - G0B^H G1A)|| relative to the
  // largest term.
  double residual = 0.0;
  // Worst relative gap of the scalar identity over random parameter pairs.
  double pointwise_residual = 0.0;
  bool b_onto = false;
  bool a_onto = false;
};

// Green identity and surjectivity of (G0; G1) on both sides. The scalar
// check uses 10 pairs from a fixed-seed generator.
GreenReport CheckGreenIdentity(const DualPairTriple &t);

// Throws ShapeMismatch unless all blocks fit together.
void ValidateShapes(const DualPairTriple &t);

enum class Side
{
  B,  // restrictions of B^*
  A,  // restrictions of A^*
};

ParameterizedOperator Restrict(const DualPairTriple &t, Side side, const ComplexMatrix &condition);
ParameterizedOperator RestrictA0(const DualPairTriple &t);  // ker G0B
ParameterizedOperator RestrictA1(const DualPairTriple &t);  // ker G1B
ParameterizedOperator RestrictB0(const DualPairTriple &t);  // ker G0A
ParameterizedOperator RestrictB1(const DualPairTriple &t);  // ker G1A
// ker(G1B - theta G0B).
ParameterizedOperator RestrictATheta(const DualPairTriple &t, const ComplexMatrix &theta);

// (T W)(D W)^{-1} for an orthonormal basis W of ker C. Throws
// NotGraphRepresentable when D W is not an invertible n x n matrix.
ComplexMatrix AsMatrix(const ParameterizedOperator &op);

// Same with a caller-supplied basis of ker C (used to test basis independence).
ComplexMatrix AsMatrixWithBasis(const ParameterizedOperator &op, const ComplexMatrix &basis);

// gamma(z) = D W(z) (G0B W(z))^{-1}, W(z) a basis of ker(T_B - z D_B).
// Throws EvaluationAtSpectrum for z in sigma(A0) and TripleDegenerate when the
// defect space has the wrong dimension.
ComplexMatrix GammaField(const DualPairTriple &t, Complex z);

// The A-side field gamma_*(z) built from ker(T_A - z D_A) and G0A.
ComplexMatrix DualGammaField(const DualPairTriple &t, Complex z);

// M(z) = G1B W(z) (G0B W(z))^{-1}, derivative gamma_*(conj z)^H gamma(z).
MatrixFunction WeylFunction(const DualPairTriple &t);

// Residual of gamma(z1) = (I + (z1 - z2)(A0 - z1)^{-1}) gamma(z2).
double CheckGammaIdentity(const DualPairTriple &t, Complex z1, Complex z2);

// Residual of M(z1) - M(z2) = (z1 - z2) gamma_*(conj z2)^H gamma(z1).
double CheckWeylIdentity(const DualPairTriple &t, Complex z1, Complex z2);

// Relative gap between (A_theta - z)^{-1} and the Krein formula
// (A0 - z)^{-1} + gamma(z) [theta - M(z)]^{-1} gamma_*(conj z)^H. Throws
// PreconditionFailed when theta - M(z) is singular or z is in sigma(A_theta).
double KreinCheck(const DualPairTriple &t, const ComplexMatrix &theta, Complex z);

// G0B' = G1B - theta G0B, G1B' = -G0B, G0A' = G1A - theta^H G0A, G1A' = -G0A.
DualPairTriple TransformedTriple(const DualPairTriple &t, const ComplexMatrix &theta);

// Relative gap between M_theta(z) of the transformed triple and
// (theta - M(z))^{-1}.
double CheckTransformedWeyl(const DualPairTriple &t, const ComplexMatrix &theta, Complex z);

struct Theorem64Report
{
  Complex z0;
  double eps = 0.0;
  int index = 0;
  int ma_theta = 0;
  int ma0 = 0;
  int det_winding = 0;
  // nu of theta - M(.) at z0, computed when z0 lies in rho(A0) and sigma(A_theta).
  std::optional<int> nu;
};

// Index of theta - M(.) around z0 against m_a(z0; A_theta) - m_a(z0; A0).
// Throws DiskConditionViolated when another eigenvalue of A0 or A_theta lies
// within 2 eps.
Theorem64Report Theorem64Check(const DualPairTriple &t, const ComplexMatrix &theta, Complex z0,
                               double eps, int nodes = kDefaultContourNodes);

// min(0.4 * gap, 0.5) with gap the distance to the rest of sigma(A0) u sigma(A_theta).
double Theorem64Radius(const DualPairTriple &t, const ComplexMatrix &theta, Complex z0);

// Distinct eigenvalues of A0 and A_theta (clustered).
std::vector<Complex> CombinedSpectrum(const DualPairTriple &t, const ComplexMatrix &theta);

// Path-graph model on sites 0..n+1 with interior sites 1..n:
//   (T_B u)_k = -u_{k-1} + 2 u_k - u_{k+1} + q_k u_k,  T_A uses conj(q),
//   G0 u = (u_0, u_{n+1}),  G1 u = (u_1 - u_0, u_n - u_{n+1}).
// With these signs theta = 0 gives the Neumann-type restriction. Throws
// PreconditionFailed if A0 or B0 is not graph-representable.
DualPairTriple DiscreteSchrodingerDualPair(int n, const ComplexVector &q);

}  // namespace mero
