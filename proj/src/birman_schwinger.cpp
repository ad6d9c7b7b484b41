// SPDX-License-Identifier: Apache-2.0

#include "mero/birman_schwinger.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mero/errors.hpp"
#include "mero/factorize.hpp"
#include "mero/spectra.hpp"

namespace mero
{

namespace
{

constexpr double kResolventAgreement = 1e-10;
constexpr double kEigenResidual = 1e-8;

ComplexMatrix R0(const FactoredPerturbation &p, Complex z)
{
  const ComplexMatrix shifted = p.H0() - z * Identity(p.Dim());
  std::optional<ComplexMatrix> inv = TryInverse(shifted);
  if (!inv)
  {
    Throw(ErrorKind::EvaluationAtSpectrum, "z is an eigenvalue of H0", z);
  }
  return *inv;
}

Eigen::PartialPivLU<ComplexMatrix> R0Lu(const FactoredPerturbation &p, Complex z)
{
  const ComplexMatrix shifted = p.H0() - z * Identity(p.Dim());
  Eigen::PartialPivLU<ComplexMatrix> lu(shifted);
  if (lu.rcond() <= 1e-8 && !IsNumericallyInvertible(shifted))
  {
    Throw(ErrorKind::EvaluationAtSpectrum, "z is an eigenvalue of H0", z);
  }
  return lu;
}

ComplexMatrix KAt(const FactoredPerturbation &p, Complex z)
{
  return -p.V1() * R0Lu(p, z).solve(p.V2().adjoint());
}

ComplexMatrix InverseIMinusK(const FactoredPerturbation &p, Complex z)
{
  const ComplexMatrix m = Identity(p.AuxDim()) - KAt(p, z);
  std::optional<ComplexMatrix> inv = TryInverse(m);
  if (!inv)
  {
    Throw(ErrorKind::BirmanSchwingerSingularity, "1 is an eigenvalue of K(z)", z);
  }
  return *inv;
}

ComplexMatrix KatoResolvent(const FactoredPerturbation &p, Complex z)
{
  const ComplexMatrix r0 = R0(p, z);
  return r0 - r0 * p.V2().adjoint() * InverseIMinusK(p, z) * p.V1() * r0;
}

ComplexMatrix DirectResolvent(const FactoredPerturbation &p, Complex z)
{
  const ComplexMatrix shifted = p.H() - z * Identity(p.Dim());
  std::optional<ComplexMatrix> inv = TryInverse(shifted);
  if (!inv)
  {
    Throw(ErrorKind::EvaluationAtSpectrum, "z is an eigenvalue of H", z);
  }
  return *inv;
}

}  // namespace

FactoredPerturbation::FactoredPerturbation(ComplexMatrix h0, ComplexMatrix v1, ComplexMatrix v2)
  : h0_(std::move(h0)), v1_(std::move(v1)), v2_(std::move(v2))
{
  if (h0_.rows() != h0_.cols() || h0_.rows() == 0)
  {
    Throw(ErrorKind::ShapeMismatch, "H0 must be a nonempty square matrix");
  }
  if (v1_.cols() != h0_.cols() || v2_.cols() != h0_.cols() || v1_.rows() != v2_.rows() ||
      v1_.rows() == 0)
  {
    Throw(ErrorKind::ShapeMismatch, "V1 and V2 must both be k x n with k >= 1");
  }
  h_ = h0_ + v2_.adjoint() * v1_;
  const double radius = 4.0 * (Norm2(h0_) + Norm2(v1_) * Norm2(v2_) + 1.0);
  bool found = false;
  for (const Complex candidate : {Complex(0.0, radius), Complex(0.0, -radius)})
  {
    try
    {
      InverseIMinusK(*this, candidate);
      probe_ = candidate;
      found = true;
      break;
    }
    catch (const Error &)
    {
    }
  }
  if (!found)
  {
    Throw(ErrorKind::HypothesisViolated, "no probe point with 1 in the resolvent set of K");
  }
  // H as defined by the resolvent formula must coincide with H0 + V2^* V1.
  if (RelativeResidual(KatoResolvent(*this, probe_), DirectResolvent(*this, probe_)) >
      kResolventAgreement)
  {
    Throw(ErrorKind::HypothesisViolated, "resolvent formula does not reproduce H0 + V2^* V1",
          probe_);
  }
}

MatrixFunction BirmanSchwingerFunction(const FactoredPerturbation &p)
{
  const Eigen::Index k = p.AuxDim();
  auto eval = [p](Complex z) -> ComplexMatrix { return KAt(p, z); };
  auto deriv = [p](Complex z) -> ComplexMatrix {
    const Eigen::PartialPivLU<ComplexMatrix> lu = R0Lu(p, z);
    return -p.V1() * lu.solve(lu.solve(p.V2().adjoint()));
  };
  return MatrixFunction(k, k, eval, deriv);
}

MatrixFunction IdentityMinusK(const FactoredPerturbation &p)
{
  const MatrixFunction k = BirmanSchwingerFunction(p);
  return Sum(Constant(Identity(p.AuxDim())), Scale(k, -1.0));
}

MatrixFunction PerturbedResolvent(const FactoredPerturbation &p)
{
  const Eigen::Index n = p.Dim();
  auto eval = [p](Complex z) -> ComplexMatrix {
    const ComplexMatrix r = KatoResolvent(p, z);
    if (RelativeResidual(r, DirectResolvent(p, z)) > kResolventAgreement)
    {
      Throw(ErrorKind::PreconditionFailed, "resolvent formula disagrees with (H - z)^{-1}", z);
    }
    return r;
  };
  return MatrixFunction(n, n, eval);
}

double ResolventAgreement(const FactoredPerturbation &p, Complex z)
{
  return RelativeResidual(KatoResolvent(p, z), DirectResolvent(p, z));
}

SecondResolventResiduals CheckSecondResolvent(const FactoredPerturbation &p, Complex z)
{
  const ComplexMatrix r0 = R0(p, z);
  const ComplexMatrix r = KatoResolvent(p, z);
  const ComplexMatrix v = p.V2().adjoint() * p.V1();
  SecondResolventResiduals out;
  out.left = RelativeResidual(r, r0 - r * v * r0);
  out.right = RelativeResidual(r, r0 - r0 * v * r);
  return out;
}

Lemma53Residuals CheckLemma53(const FactoredPerturbation &p, Complex z1, Complex z2)
{
  Lemma53Residuals out;
  const ComplexMatrix v2s = p.V2().adjoint();
  out.k_difference =
      RelativeResidual(KAt(p, z1), KAt(p, z2) + (z2 - z1) * p.V1() * R0(p, z1) * R0(p, z2) * v2s);
  out.inverse_difference = RelativeResidual(
      InverseIMinusK(p, z1), InverseIMinusK(p, z2) + (z2 - z1) * p.V1() * DirectResolvent(p, z1) *
                                                          DirectResolvent(p, z2) * v2s);
  return out;
}

double CheckInverseIdentity(const FactoredPerturbation &p, Complex z)
{
  const ComplexMatrix lhs =
      Identity(p.AuxDim()) - p.V1() * KatoResolvent(p, z) * p.V2().adjoint();
  return RelativeResidual(lhs, InverseIMinusK(p, z));
}

CorrespondenceResult BsEigenvectorMap(const FactoredPerturbation &p, Complex z0,
                                      const ComplexVector &v, CorrespondenceDirection direction,
                                      std::optional<Complex> z1)
{
  CorrespondenceResult out;
  const double vn = v.norm();
  if (vn == 0.0)
  {
    Throw(ErrorKind::PreconditionFailed, "eigenvector must be nonzero", z0);
  }
  if (direction == CorrespondenceDirection::HToK)
  {
    if (v.size() != p.Dim())
    {
      Throw(ErrorKind::ShapeMismatch, "H eigenvector has the wrong length");
    }
    if ((p.H() * v - z0 * v).norm() > kEigenResidual * vn * std::max(1.0, Norm2(p.H())))
    {
      Throw(ErrorKind::PreconditionFailed, "input is not an eigenvector of H at z0", z0);
    }
    const Complex aux = z1.value_or(p.Probe());
    if (aux == z0)
    {
      Throw(ErrorKind::PreconditionFailed, "auxiliary point must differ from z0", z0);
    }
    const ComplexVector g = InverseIMinusK(p, aux) * p.V1() * R0(p, aux) * v;
    const double gn = g.norm();
    if (gn <= 1e-12 * vn * std::max(1.0, Norm2(p.V1())))
    {
      Throw(ErrorKind::CorrespondenceDegenerate, "image of the eigenvector is numerically zero",
            z0);
    }
    out.vector = g;
    out.eigen_residual = (KAt(p, z0) * g - g).norm() / gn;
    out.alternative_residual = (g - p.V1() * v / (z0 - aux)).norm() / gn;
    return out;
  }
  if (v.size() != p.AuxDim())
  {
    Throw(ErrorKind::ShapeMismatch, "K eigenvector has the wrong length");
  }
  const ComplexMatrix k0 = KAt(p, z0);
  if ((k0 * v - v).norm() > kEigenResidual * vn * std::max(1.0, Norm2(k0)))
  {
    Throw(ErrorKind::PreconditionFailed, "input is not a fixed vector of K(z0)", z0);
  }
  const ComplexVector f = -R0(p, z0) * p.V2().adjoint() * v;
  const double fn = f.norm();
  if (fn <= 1e-12 * vn)
  {
    Throw(ErrorKind::CorrespondenceDegenerate, "image of the fixed vector is numerically zero",
          z0);
  }
  out.vector = f;
  out.eigen_residual = (p.H() * f - z0 * f).norm() / fn;
  return out;
}

GeometricPair GeometricMultiplicities(const FactoredPerturbation &p, Complex z0)
{
  GeometricPair g;
  const ComplexMatrix h = p.H() - z0 * Identity(p.Dim());
  g.h = static_cast<int>(p.Dim() - NumericalRank(h, Norm2(p.H())));
  const ComplexMatrix k = Identity(p.AuxDim()) - KAt(p, z0);
  g.k = static_cast<int>(p.AuxDim() - NumericalRank(k, 1.0));
  return g;
}

double SpectrumClusterTolerance(const FactoredPerturbation &p)
{
  return 1e-6 * (1.0 + Norm2(p.H()) + Norm2(p.H0()));
}

std::vector<Complex> CombinedSpectrum(const FactoredPerturbation &p)
{
  std::vector<Complex> all = Eigenvalues(p.H());
  const std::vector<Complex> e0 = Eigenvalues(p.H0());
  all.insert(all.end(), e0.begin(), e0.end());
  std::vector<Complex> out;
  for (const EigenCluster &c : ClusterEigenvalues(all, SpectrumClusterTolerance(p)))
  {
    out.push_back(c.center);
  }
  return out;
}

double Theorem55Radius(const FactoredPerturbation &p, Complex z0)
{
  std::vector<Complex> all = Eigenvalues(p.H());
  const std::vector<Complex> e0 = Eigenvalues(p.H0());
  all.insert(all.end(), e0.begin(), e0.end());
  const double gap = DistanceToOthers(z0, all, SpectrumClusterTolerance(p));
  return std::min(0.4 * gap, 0.5);
}

Theorem55Report Theorem55Check(const FactoredPerturbation &p, Complex z0, double eps, int nodes)
{
  const double tol = SpectrumClusterTolerance(p);
  for (const ComplexMatrix *m : {&p.H(), &p.H0()})
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
  Theorem55Report out;
  out.z0 = z0;
  out.eps = eps;
  const MatrixFunction f = IdentityMinusK(p);
  out.index = Index(f, z0, eps, nodes);
  out.det_winding = DetWindingOracle(f, z0, eps, nodes);
  out.ma_h = EigenMultiplicities(p.H(), z0, eps, nodes).algebraic;
  out.ma_h0 = EigenMultiplicities(p.H0(), z0, eps, nodes).algebraic;
  if (out.ma_h0 == 0 && out.ma_h > 0)
  {
    FactorizeOptions options;
    options.derivative_radius = 0.5 * eps;
    out.nu = HowlandFactorize(f, z0, options).nu;
  }
  return out;
}

}  // namespace mero
