// SPDX-License-Identifier: Apache-2.0

#include "mero/dual_pair.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mero/errors.hpp"
#include "mero/factorize.hpp"
#include "mero/spectra.hpp"

namespace mero
{

namespace
{

constexpr int kGreenSamples = 10;
constexpr std::uint64_t kGreenSeed = 0x5eedULL;

ComplexVector RandomVector(std::mt19937_64 &rng, Eigen::Index n)
{
  std::normal_distribution<double> normal;
  ComplexVector v(n);
  for (Eigen::Index i = 0; i < n; ++i)
  {
    const double re = normal(rng);
    const double im = normal(rng);
    v(i) = Complex(re, im);
  }
  return v;
}

Eigen::Index BoundaryDim(const DualPairTriple &t)
{
  return t.gamma_b0.rows();
}

void RequireEqualBoundaryDims(const DualPairTriple &t)
{
  if (t.gamma_b0.rows() != t.gamma_b1.rows())
  {
    Throw(ErrorKind::ShapeMismatch, "this operation needs h0 = h1");
  }
}

void RequireTheta(const DualPairTriple &t, const ComplexMatrix &theta)
{
  RequireEqualBoundaryDims(t);
  if (theta.rows() != BoundaryDim(t) || theta.cols() != BoundaryDim(t))
  {
    Throw(ErrorKind::ShapeMismatch, "theta must be a square matrix on the boundary space");
  }
}

// Basis of ker(T - z D) and the solution operator normalized by G0.
struct Defect
{
  ComplexMatrix basis;       // W(z)
  ComplexMatrix normalized;  // W(z) (G0 W(z))^{-1}
};

Defect DefectAt(const ParameterizedOperator &op, const ComplexMatrix &g0, Complex z)
{
  const ComplexMatrix pencil = op.action - z * op.embed;
  // Fast path: when [T - zD; G0] is square and well conditioned its inverse
  // applied to (0; I) is the normalized defect basis directly.
  if (op.constraint.rows() == 0 && pencil.rows() + g0.rows() == pencil.cols())
  {
    ComplexMatrix stacked(pencil.cols(), pencil.cols());
    stacked << pencil, g0;
    const Eigen::PartialPivLU<ComplexMatrix> lu(stacked);
    if (lu.rcond() > 1e-8)
    {
      ComplexMatrix rhs = ComplexMatrix::Zero(pencil.cols(), g0.rows());
      rhs.bottomRows(g0.rows()) = Identity(g0.rows());
      const ComplexMatrix w = lu.solve(rhs);
      return {w, w};
    }
  }
  const double scale = Norm2(op.action) + std::abs(z) * Norm2(op.embed);
  const ComplexMatrix w = KernelBasis(pencil, scale);
  if (w.cols() != g0.rows())
  {
    Throw(ErrorKind::TripleDegenerate,
          "defect space has dimension " + std::to_string(w.cols()) + ", expected " +
              std::to_string(g0.rows()),
          z);
  }
  const ComplexMatrix g = g0 * w;
  if (!IsNumericallyInvertible(g))
  {
    Throw(ErrorKind::EvaluationAtSpectrum, "z is an eigenvalue of the Gamma_0 restriction", z);
  }
  return {w, w * g.partialPivLu().inverse()};
}

ComplexMatrix ShiftedInverse(const ComplexMatrix &m, Complex z, ErrorKind kind, const char *what)
{
  const ComplexMatrix shifted = m - z * Identity(m.rows());
  std::optional<ComplexMatrix> inv = TryInverse(shifted);
  if (!inv)
  {
    Throw(kind, what, z);
  }
  return *inv;
}

double ClusterTolerance(const ComplexMatrix &a, const ComplexMatrix &b)
{
  return 1e-6 * (1.0 + Norm2(a) + Norm2(b));
}

}  // namespace

void ValidateShapes(const DualPairTriple &t)
{
  const auto check_op = [](const ParameterizedOperator &op, const char *name) {
    if (op.embed.rows() != op.action.rows() || op.embed.cols() != op.action.cols())
    {
      Throw(ErrorKind::ShapeMismatch, std::string(name) + ": D and T shapes differ");
    }
    if (op.constraint.size() > 0 && op.constraint.cols() != op.embed.cols())
    {
      Throw(ErrorKind::ShapeMismatch, std::string(name) + ": constraint has the wrong width");
    }
  };
  check_op(t.bstar, "B*");
  check_op(t.astar, "A*");
  if (t.bstar.AmbientDim() != t.astar.AmbientDim())
  {
    Throw(ErrorKind::ShapeMismatch, "B* and A* act in different spaces");
  }
  if (t.gamma_b0.cols() != t.bstar.ParamDim() || t.gamma_b1.cols() != t.bstar.ParamDim())
  {
    Throw(ErrorKind::ShapeMismatch, "Gamma^B does not act on the B* parameter space");
  }
  if (t.gamma_a0.cols() != t.astar.ParamDim() || t.gamma_a1.cols() != t.astar.ParamDim())
  {
    Throw(ErrorKind::ShapeMismatch, "Gamma^A does not act on the A* parameter space");
  }
  if (t.gamma_a0.rows() != t.gamma_b1.rows() || t.gamma_a1.rows() != t.gamma_b0.rows())
  {
    Throw(ErrorKind::ShapeMismatch, "boundary spaces of Gamma^B and Gamma^A do not pair up");
  }
}

GreenReport CheckGreenIdentity(const DualPairTriple &t)
{
  ValidateShapes(t);
  const ComplexMatrix &db = t.bstar.embed;
  const ComplexMatrix &tb = t.bstar.action;
  const ComplexMatrix &da = t.astar.embed;
  const ComplexMatrix &ta = t.astar.action;
  const ComplexMatrix interior_first = tb.adjoint() * da;
  const ComplexMatrix interior_second = db.adjoint() * ta;
  const ComplexMatrix boundary_first = t.gamma_b1.adjoint() * t.gamma_a0;
  const ComplexMatrix boundary_second = t.gamma_b0.adjoint() * t.gamma_a1;
  const double scale = std::max({interior_first.norm(), interior_second.norm(),
                                 boundary_first.norm(), boundary_second.norm()});
  GreenReport report;
  if (scale > 0.0)
  {
    report.residual = (interior_first - interior_second - boundary_first + boundary_second).norm() /
                      scale;
  }

  std::mt19937_64 rng(kGreenSeed);
  for (int s = 0; s < kGreenSamples; ++s)
  {
    const ComplexVector wb = RandomVector(rng, t.bstar.ParamDim());
    const ComplexVector wa = RandomVector(rng, t.astar.ParamDim());
    const Complex a1 = (tb * wb).dot(da * wa);
    const Complex a2 = (db * wb).dot(ta * wa);
    const Complex b1 = (t.gamma_b1 * wb).dot(t.gamma_a0 * wa);
    const Complex b2 = (t.gamma_b0 * wb).dot(t.gamma_a1 * wa);
    const double m = std::max({std::abs(a1), std::abs(a2), std::abs(b1), std::abs(b2)});
    if (m > 0.0)
    {
      report.pointwise_residual =
          std::max(report.pointwise_residual, std::abs((a1 - a2) - (b1 - b2)) / m);
    }
  }

  ComplexMatrix gb(t.gamma_b0.rows() + t.gamma_b1.rows(), t.bstar.ParamDim());
  gb << t.gamma_b0, t.gamma_b1;
  ComplexMatrix ga(t.gamma_a0.rows() + t.gamma_a1.rows(), t.astar.ParamDim());
  ga << t.gamma_a0, t.gamma_a1;
  const double ref_b = Norm2(tb) + Norm2(db);
  const double ref_a = Norm2(ta) + Norm2(da);
  report.b_onto = gb.rows() > 0 && NumericalRank(gb, ref_b) == gb.rows();
  report.a_onto = ga.rows() > 0 && NumericalRank(ga, ref_a) == ga.rows();
  return report;
}

ParameterizedOperator Restrict(const DualPairTriple &t, Side side, const ComplexMatrix &condition)
{
  ParameterizedOperator op = side == Side::B ? t.bstar : t.astar;
  if (condition.cols() != op.ParamDim())
  {
    Throw(ErrorKind::ShapeMismatch, "restriction condition has the wrong width");
  }
  op.constraint = condition;
  return op;
}

ParameterizedOperator RestrictA0(const DualPairTriple &t)
{
  return Restrict(t, Side::B, t.gamma_b0);
}

ParameterizedOperator RestrictA1(const DualPairTriple &t)
{
  return Restrict(t, Side::B, t.gamma_b1);
}

ParameterizedOperator RestrictB0(const DualPairTriple &t)
{
  return Restrict(t, Side::A, t.gamma_a0);
}

ParameterizedOperator RestrictB1(const DualPairTriple &t)
{
  return Restrict(t, Side::A, t.gamma_a1);
}

ParameterizedOperator RestrictATheta(const DualPairTriple &t, const ComplexMatrix &theta)
{
  RequireTheta(t, theta);
  return Restrict(t, Side::B, t.gamma_b1 - theta * t.gamma_b0);
}

ComplexMatrix AsMatrixWithBasis(const ParameterizedOperator &op, const ComplexMatrix &basis)
{
  const Eigen::Index n = op.AmbientDim();
  if (basis.rows() != op.ParamDim())
  {
    Throw(ErrorKind::ShapeMismatch, "basis does not live in the parameter space");
  }
  if (basis.cols() != n)
  {
    Throw(ErrorKind::NotGraphRepresentable,
          "restricted domain has dimension " + std::to_string(basis.cols()) + ", expected " +
              std::to_string(n));
  }
  const ComplexMatrix dw = op.embed * basis;
  const ComplexMatrix tw = op.action * basis;
  // Graph test against the size of the whole pair (D W, T W): a direction
  // with D w tiny but T w of order one is a multivalued part.
  const double pair_scale = std::max(Norm2(dw), Norm2(tw));
  if (NumericalRank(dw, DefaultTolerances().invert_rel, pair_scale) < n ||
      !IsNumericallyInvertible(dw))
  {
    Throw(ErrorKind::NotGraphRepresentable,
          "multivalued part present: restriction is not graph-representable");
  }
  return tw * dw.partialPivLu().inverse();
}

ComplexMatrix AsMatrix(const ParameterizedOperator &op)
{
  if (op.constraint.rows() == 0)
  {
    return AsMatrixWithBasis(op, Identity(op.ParamDim()));
  }
  return AsMatrixWithBasis(op, KernelBasis(op.constraint, Norm2(op.constraint)));
}

ComplexMatrix GammaField(const DualPairTriple &t, Complex z)
{
  return t.bstar.embed * DefectAt(t.bstar, t.gamma_b0, z).normalized;
}

ComplexMatrix DualGammaField(const DualPairTriple &t, Complex z)
{
  return t.astar.embed * DefectAt(t.astar, t.gamma_a0, z).normalized;
}

MatrixFunction WeylFunction(const DualPairTriple &t)
{
  ValidateShapes(t);
  RequireEqualBoundaryDims(t);
  const Eigen::Index h = BoundaryDim(t);
  auto eval = [t](Complex z) -> ComplexMatrix {
    return t.gamma_b1 * DefectAt(t.bstar, t.gamma_b0, z).normalized;
  };
  auto deriv = [t](Complex z) -> ComplexMatrix {
    return DualGammaField(t, std::conj(z)).adjoint() * GammaField(t, z);
  };
  return MatrixFunction(h, h, eval, deriv);
}

double CheckGammaIdentity(const DualPairTriple &t, Complex z1, Complex z2)
{
  const ComplexMatrix a0 = AsMatrix(RestrictA0(t));
  const ComplexMatrix r1 =
      ShiftedInverse(a0, z1, ErrorKind::EvaluationAtSpectrum, "z1 is an eigenvalue of A0");
  const ComplexMatrix lhs = GammaField(t, z1);
  const ComplexMatrix rhs = (Identity(a0.rows()) + (z1 - z2) * r1) * GammaField(t, z2);
  return RelativeResidual(lhs, rhs);
}

double CheckWeylIdentity(const DualPairTriple &t, Complex z1, Complex z2)
{
  const MatrixFunction m = WeylFunction(t);
  const ComplexMatrix lhs = m(z1) - m(z2);
  const ComplexMatrix rhs =
      (z1 - z2) * DualGammaField(t, std::conj(z2)).adjoint() * GammaField(t, z1);
  if (z1 == z2)
  {
    return lhs.norm();
  }
  // Normalize by the size of M itself so that nearby points are not penalized.
  const double scale = std::max({m(z1).norm(), m(z2).norm(), lhs.norm(), rhs.norm()});
  return scale == 0.0 ? 0.0 : (lhs - rhs).norm() / scale;
}

double KreinCheck(const DualPairTriple &t, const ComplexMatrix &theta, Complex z)
{
  RequireTheta(t, theta);
  const ComplexMatrix a0 = AsMatrix(RestrictA0(t));
  const ComplexMatrix at = AsMatrix(RestrictATheta(t, theta));
  const ComplexMatrix direct =
      ShiftedInverse(at, z, ErrorKind::PreconditionFailed, "z is an eigenvalue of A_theta");
  const ComplexMatrix r0 =
      ShiftedInverse(a0, z, ErrorKind::PreconditionFailed, "z is an eigenvalue of A0");
  const ComplexMatrix middle = theta - WeylFunction(t)(z);
  if (!IsNumericallyInvertible(middle))
  {
    Throw(ErrorKind::PreconditionFailed, "theta - M(z) is singular", z);
  }
  const ComplexMatrix krein = r0 + GammaField(t, z) * middle.partialPivLu().inverse() *
                                       DualGammaField(t, std::conj(z)).adjoint();
  return RelativeResidual(direct, krein);
}

DualPairTriple TransformedTriple(const DualPairTriple &t, const ComplexMatrix &theta)
{
  ValidateShapes(t);
  RequireTheta(t, theta);
  DualPairTriple out = t;
  out.gamma_b0 = t.gamma_b1 - theta * t.gamma_b0;
  out.gamma_b1 = -t.gamma_b0;
  out.gamma_a0 = t.gamma_a1 - theta.adjoint() * t.gamma_a0;
  out.gamma_a1 = -t.gamma_a0;
  return out;
}

double CheckTransformedWeyl(const DualPairTriple &t, const ComplexMatrix &theta, Complex z)
{
  const ComplexMatrix middle = theta - WeylFunction(t)(z);
  if (!IsNumericallyInvertible(middle))
  {
    Throw(ErrorKind::PreconditionFailed, "theta - M(z) is singular", z);
  }
  const ComplexMatrix mt = WeylFunction(TransformedTriple(t, theta))(z);
  return RelativeResidual(mt, middle.partialPivLu().inverse());
}

std::vector<Complex> CombinedSpectrum(const DualPairTriple &t, const ComplexMatrix &theta)
{
  const ComplexMatrix a0 = AsMatrix(RestrictA0(t));
  const ComplexMatrix at = AsMatrix(RestrictATheta(t, theta));
  std::vector<Complex> all = Eigenvalues(a0);
  const std::vector<Complex> et = Eigenvalues(at);
  all.insert(all.end(), et.begin(), et.end());
  std::vector<Complex> out;
  for (const EigenCluster &c : ClusterEigenvalues(all, ClusterTolerance(a0, at)))
  {
    out.push_back(c.center);
  }
  return out;
}

double Theorem64Radius(const DualPairTriple &t, const ComplexMatrix &theta, Complex z0)
{
  const ComplexMatrix a0 = AsMatrix(RestrictA0(t));
  const ComplexMatrix at = AsMatrix(RestrictATheta(t, theta));
  std::vector<Complex> all = Eigenvalues(a0);
  const std::vector<Complex> et = Eigenvalues(at);
  all.insert(all.end(), et.begin(), et.end());
  return std::min(0.4 * DistanceToOthers(z0, all, ClusterTolerance(a0, at)), 0.5);
}

Theorem64Report Theorem64Check(const DualPairTriple &t, const ComplexMatrix &theta, Complex z0,
                               double eps, int nodes)
{
  RequireTheta(t, theta);
  const ComplexMatrix a0 = AsMatrix(RestrictA0(t));
  const ComplexMatrix at = AsMatrix(RestrictATheta(t, theta));
  const double tol = ClusterTolerance(a0, at);
  for (const ComplexMatrix *m : {&a0, &at})
  {
    for (const Complex &v : Eigenvalues(*m))
    {
      const double d = std::abs(v - z0);
      if (d > tol && d < 2.0 * eps)
      {
        Throw(ErrorKind::DiskConditionViolated,
              "another eigenvalue lies within twice the contour radius", v);
      }
    }
  }
  Theorem64Report out;
  out.z0 = z0;
  out.eps = eps;
  const MatrixFunction f = Sum(Constant(theta), Scale(WeylFunction(t), -1.0));
  out.index = Index(f, z0, eps, nodes);
  out.det_winding = DetWindingOracle(f, z0, eps, nodes);
  out.ma_theta = EigenMultiplicities(at, z0, eps, nodes).algebraic;
  out.ma0 = EigenMultiplicities(a0, z0, eps, nodes).algebraic;
  if (out.ma0 == 0 && out.ma_theta > 0)
  {
    FactorizeOptions options;
    options.derivative_radius = 0.5 * eps;
    out.nu = HowlandFactorize(f, z0, options).nu;
  }
  return out;
}

DualPairTriple DiscreteSchrodingerDualPair(int n, const ComplexVector &q)
{
  if (n < 1)
  {
    Throw(ErrorKind::InvalidArgument, "chain length must be at least 1");
  }
  if (q.size() != n)
  {
    Throw(ErrorKind::ShapeMismatch, "potential must have one entry per interior site");
  }
  const Eigen::Index m = n + 2;
  ComplexMatrix d = ComplexMatrix::Zero(n, m);
  ComplexMatrix tb = ComplexMatrix::Zero(n, m);
  ComplexMatrix ta = ComplexMatrix::Zero(n, m);
  for (Eigen::Index k = 1; k <= n; ++k)
  {
    d(k - 1, k) = 1.0;
    tb(k - 1, k - 1) = ta(k - 1, k - 1) = -1.0;
    tb(k - 1, k + 1) = ta(k - 1, k + 1) = -1.0;
    tb(k - 1, k) = 2.0 + q(k - 1);
    ta(k - 1, k) = 2.0 + std::conj(q(k - 1));
  }
  ComplexMatrix g0 = ComplexMatrix::Zero(2, m);
  g0(0, 0) = 1.0;
  g0(1, n + 1) = 1.0;
  ComplexMatrix g1 = ComplexMatrix::Zero(2, m);
  g1(0, 1) = 1.0;
  g1(0, 0) = -1.0;
  g1(1, n) = 1.0;
  g1(1, n + 1) = -1.0;

  DualPairTriple t;
  t.bstar = {d, tb, ComplexMatrix(0, m)};
  t.astar = {d, ta, ComplexMatrix(0, m)};
  t.gamma_b0 = g0;
  t.gamma_b1 = g1;
  t.gamma_a0 = g0;
  t.gamma_a1 = g1;
  try
  {
    AsMatrix(RestrictA0(t));
    AsMatrix(RestrictB0(t));
  }
  catch (const Error &e)
  {
    Throw(ErrorKind::PreconditionFailed,
          std::string("A0 or B0 has empty resolvent set: ") + e.what());
  }
  return t;
}

}  // namespace mero
