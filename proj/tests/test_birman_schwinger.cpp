// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "helpers.hpp"
#include "mero/birman_schwinger.hpp"
#include "mero/families.hpp"
#include "mero/spectra.hpp"

using namespace mero;
using namespace mero::test;

namespace
{

FactoredPerturbation RankOne()
{
  return FactoredPerturbation(Diag({1.0, -1.0}), Mat({{1.0, 1.0}}), Mat({{1.0, 1.0}}));
}

FactoredPerturbation Unperturbed(const ComplexMatrix &h0, Eigen::Index k)
{
  const ComplexMatrix zero = ComplexMatrix::Zero(k, h0.rows());
  return FactoredPerturbation(h0, zero, zero);
}

}  // namespace

TEST_CASE("factored perturbation construction")
{
  const FactoredPerturbation p = RankOne();
  CHECK(Dist(p.H(), Mat({{2.0, 1.0}, {1.0, 0.0}})) == 0.0);
  CHECK(p.Dim() == 2);
  CHECK(p.AuxDim() == 1);
  CHECK(std::abs(p.Probe().real()) == 0.0);
  CHECK(IsNumericallyInvertible(IdentityMinusK(p)(p.Probe())));
  CHECK(KindOf([] {
          FactoredPerturbation(Identity(2), ComplexMatrix::Zero(1, 2), ComplexMatrix::Zero(2, 2));
        }) == ErrorKind::ShapeMismatch);
  CHECK(KindOf([] {
          FactoredPerturbation(ComplexMatrix::Zero(2, 3), ComplexMatrix::Zero(1, 3),
                               ComplexMatrix::Zero(1, 3));
        }) == ErrorKind::ShapeMismatch);
}

TEST_CASE("birman_schwinger_function examples")
{
  const MatrixFunction zero = BirmanSchwingerFunction(Unperturbed(Diag({1.0, 2.0}), 2));
  CHECK(zero(Complex(0.3, 0.2)).norm() == 0.0);

  const MatrixFunction k = BirmanSchwingerFunction(RankOne());
  for (const Complex z : {Complex(0.0, 1.0), Complex(0.5, -0.3), Complex(3.0, 0.0)})
  {
    const Complex expected = -(1.0 / (1.0 - z) + 1.0 / (-1.0 - z));
    CHECK(k(z).rows() == 1);
    CHECK(std::abs(k(z)(0, 0) - expected) < 1e-14);
  }
  // K'(i) = -(1/(1 - i)^2 + 1/(1 + i)^2) vanishes, so compare absolutely there.
  CHECK(Dist(k.Derivative(1i), FiniteDifference(k, 1i)) < 1e-6);
  CHECK(k.Derivative(1i).norm() < 1e-14);
  CHECK(RelativeResidual(k.Derivative(0.5i), FiniteDifference(k, 0.5i)) < 1e-6);
  CHECK(KindOf([&] { k(1.0); }) == ErrorKind::EvaluationAtSpectrum);
}

TEST_CASE("perturbed_resolvent examples")
{
  const FactoredPerturbation u = Unperturbed(Diag({1.0, 2.0}), 1);
  CHECK(Dist(PerturbedResolvent(u)(0.5i), Resolvent(u.H0())(0.5i)) == 0.0);

  const FactoredPerturbation p = RankOne();
  const ComplexMatrix direct = (p.H() - 1i * Identity(2)).inverse();
  CHECK(RelativeResidual(PerturbedResolvent(p)(1i), direct) < 1e-10);
  CHECK(ResolventAgreement(p, 1i) < 1e-10);

  const SecondResolventResiduals s = CheckSecondResolvent(p, 1i);
  CHECK(s.left < 1e-10);
  CHECK(s.right < 1e-10);

  // 1 + sqrt(2) is an eigenvalue of H, so 1 is an eigenvalue of K there.
  CHECK(KindOf([&] { PerturbedResolvent(p)(1.0 + std::sqrt(2.0)); }) ==
        ErrorKind::BirmanSchwingerSingularity);
}

TEST_CASE("check_lemma53 examples")
{
  const Lemma53Residuals zero = CheckLemma53(Unperturbed(Diag({1.0, 2.0}), 2), 1i, 2i);
  CHECK(zero.k_difference == 0.0);
  CHECK(zero.inverse_difference == 0.0);

  const FactoredPerturbation p = RankOne();
  const Lemma53Residuals same = CheckLemma53(p, 0.5i, 0.5i);
  CHECK(same.k_difference == 0.0);
  CHECK(same.inverse_difference == 0.0);

  const Lemma53Residuals r = CheckLemma53(p, 1i, 2i);
  CHECK(r.k_difference < 1e-10);
  CHECK(r.inverse_difference < 1e-10);
}

TEST_CASE("inverse identity examples")
{
  CHECK(CheckInverseIdentity(Unperturbed(Diag({1.0, 2.0}), 1), 0.5) == 0.0);
  CHECK(CheckInverseIdentity(RankOne(), 1i) < 1e-10);
  Rng rng(51);
  const ComplexMatrix h0 = RandomGaussian(rng, 4, 4);
  const ComplexMatrix v1 = RandomGaussian(rng, 2, 4);
  const ComplexMatrix v2 = RandomGaussian(rng, 2, 4);
  CHECK(CheckInverseIdentity(FactoredPerturbation(h0, v1, v2), Complex(3.0, 1.0)) < 1e-10);
}

TEST_CASE("bs_eigenvector_maps on the rank-one example")
{
  const FactoredPerturbation p = RankOne();
  const Complex z0 = 1.0 + std::sqrt(2.0);
  ComplexVector f(2);
  f << z0, 1.0;
  CHECK((p.H() * f - z0 * f).norm() < 1e-12);

  const CorrespondenceResult g = BsEigenvectorMap(p, z0, f, CorrespondenceDirection::HToK);
  CHECK(g.eigen_residual < 1e-8);
  CHECK(g.alternative_residual < 1e-8);
  const CorrespondenceResult back =
      BsEigenvectorMap(p, z0, g.vector, CorrespondenceDirection::KToH);
  CHECK(back.eigen_residual < 1e-8);
  // Collinear with f.
  const Complex c = f.dot(back.vector) / f.squaredNorm();
  CHECK((back.vector - c * f).norm() < 1e-8 * back.vector.norm());

  const GeometricPair gp = GeometricMultiplicities(p, z0);
  CHECK(gp.h == 1);
  CHECK(gp.k == 1);

  ComplexVector not_eigen(2);
  not_eigen << 1.0, 0.0;
  CHECK(KindOf([&] { BsEigenvectorMap(p, z0, not_eigen, CorrespondenceDirection::HToK); }) ==
        ErrorKind::PreconditionFailed);
}

TEST_CASE("theorem55_check examples")
{
  const FactoredPerturbation u = Unperturbed(Mat({{1.0, 1.0}, {0.0, 1.0}}), 1);
  const Theorem55Report r0 = Theorem55Check(u, 1.0, 0.5);
  CHECK(r0.index == 0);
  CHECK(r0.ma_h == 2);
  CHECK(r0.ma_h0 == 2);

  const FactoredPerturbation shared(Diag({0.0, 0.0, 2.0}), Mat({{0.0, 0.0, 1.0}}),
                                    Mat({{0.0, 0.0, 1.0}}));
  CHECK(Dist(shared.H(), Diag({0.0, 0.0, 3.0})) == 0.0);
  const Theorem55Report r1 = Theorem55Check(shared, 0.0, Theorem55Radius(shared, 0.0));
  CHECK(r1.index == 0);
  CHECK(r1.ma_h == 2);
  CHECK(r1.ma_h0 == 2);
  CHECK_FALSE(r1.nu.has_value());

  const FactoredPerturbation p = RankOne();
  const Complex z0 = 1.0 + std::sqrt(2.0);
  const Theorem55Report r2 = Theorem55Check(p, z0, Theorem55Radius(p, z0));
  CHECK(r2.index == 1);
  CHECK(r2.ma_h == 1);
  CHECK(r2.ma_h0 == 0);
  CHECK(r2.det_winding == 1);
  REQUIRE(r2.nu.has_value());
  CHECK(*r2.nu == 1);

  const Theorem55Report r3 = Theorem55Check(p, 1.0, Theorem55Radius(p, 1.0));
  CHECK(r3.index == -1);
  CHECK(r3.ma_h == 0);
  CHECK(r3.ma_h0 == 1);

  CHECK(Theorem55Radius(p, z0) == doctest::Approx(std::min(0.4 * (z0 - 1.0).real(), 0.5)));
  // 1 - sqrt(2) and -1 are 0.414 apart.
  CHECK(KindOf([&] { Theorem55Check(p, -1.0, 0.3); }) == ErrorKind::DiskConditionViolated);
}

TEST_CASE("index formula for factored perturbations on random instances")
{
  Rng rng(52);
  for (int trial = 0; trial < 30; ++trial)
  {
    const int n = rng.UniformInt(2, 8);
    const int k = rng.UniformInt(1, 3);
    const bool shared = rng.UniformInt(0, 2) == 0;
    const FactoredPerturbation p = RandomPerturbation(rng, n, k, shared);
    CAPTURE(trial);
    int total_h = 0;
    int total_h0 = 0;
    for (const Complex z0 : CombinedSpectrum(p))
    {
      const Theorem55Report r = Theorem55Check(p, z0, Theorem55Radius(p, z0));
      CHECK(r.index == r.ma_h - r.ma_h0);
      CHECK(r.det_winding == r.index);
      if (r.nu)
      {
        CHECK(*r.nu == r.index);
      }
      total_h += r.ma_h;
      total_h0 += r.ma_h0;
    }
    CHECK(total_h == n);
    CHECK(total_h0 == n);
  }
}

TEST_CASE("resolvent identities and eigenvector correspondence on random perturbations")
{
  Rng rng(53);
  for (int trial = 0; trial < 30; ++trial)
  {
    const int n = rng.UniformInt(2, 8);
    const int k = rng.UniformInt(1, 4);
    const FactoredPerturbation p = RandomPerturbation(rng, n, k, false);
    const Complex z1 = p.Probe() * rng.Uniform(0.5, 1.0) + rng.ComplexNormal();
    const Complex z2 = p.Probe() * rng.Uniform(0.5, 1.0) + rng.ComplexNormal();
    CHECK(ResolventAgreement(p, z1) < 1e-10);
    const SecondResolventResiduals s = CheckSecondResolvent(p, z1);
    CHECK(s.left < 1e-10);
    CHECK(s.right < 1e-10);
    const Lemma53Residuals l = CheckLemma53(p, z1, z2);
    CHECK(l.k_difference < 1e-10);
    CHECK(l.inverse_difference < 1e-10);
    CHECK(CheckInverseIdentity(p, z1) < 1e-10);
    const MatrixFunction km = BirmanSchwingerFunction(p);
    CHECK(RelativeResidual(km.Derivative(z1), FiniteDifference(km, z1)) < 1e-6);

    const std::vector<Complex> h0_spec = Eigenvalues(p.H0());
    const double tol = SpectrumClusterTolerance(p);
    for (const EigenCluster &c : ClusterEigenvalues(Eigenvalues(p.H()), tol))
    {
      if (DistanceToOthers(c.center, h0_spec, -1.0) < 1e-3 || c.count != 1)
      {
        continue;
      }
      const GeometricPair gp = GeometricMultiplicities(p, c.center);
      CHECK(gp.h == gp.k);
      const ComplexMatrix kernel = KernelBasis(p.H() - c.center * Identity(n), Norm2(p.H()));
      REQUIRE(kernel.cols() == 1);
      const CorrespondenceResult g =
          BsEigenvectorMap(p, c.center, kernel.col(0), CorrespondenceDirection::HToK);
      CHECK(g.eigen_residual < 1e-8);
      CHECK(g.alternative_residual < 1e-8);
      const CorrespondenceResult f =
          BsEigenvectorMap(p, c.center, g.vector, CorrespondenceDirection::KToH);
      CHECK(f.eigen_residual < 1e-8);
    }
  }
}
