// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "helpers.hpp"
#include "mero/factorize.hpp"
#include "mero/families.hpp"
#include "mero/laurent.hpp"
#include "mero/spectra.hpp"

using namespace mero;
using namespace mero::test;

namespace
{

MatrixFunction ZTimesIdentity(Eigen::Index n)
{
  return MatrixFunction(
      n, n, [n](Complex z) -> ComplexMatrix { return z * Identity(n); },
      [n](Complex) -> ComplexMatrix { return Identity(n); });
}

double ReconstructionError(const HowlandFactorization &f, const MatrixFunction &a, Complex z)
{
  const ComplexMatrix exact = a(z);
  return Dist(Reconstruct(f, z), exact) / exact.norm();
}

}  // namespace

TEST_CASE("howland_step examples")
{
  const HowlandStepResult d = HowlandStep(DiagonalPowers({1, 0}, 0.0), 0.0);
  CHECK(d.factor.rank == 1);
  CHECK(Dist(d.factor.p, Diag({1.0, 0.0})) < 1e-12);
  CHECK(Dist(d.factor.q, Diag({0.0, 1.0})) < 1e-12);
  CHECK(Dist(d.next(0.0), Diag({-1.0, 1.0})) < 1e-12);
  CHECK(IsNumericallyInvertible(d.next(0.0)));
  for (const Complex z : {Complex(0.3, 0.1), Complex(-0.2, 0.0)})
  {
    const ComplexMatrix factor = d.factor.q - z * d.factor.p;
    CHECK(Dist(factor * d.next(z), DiagonalPowers({1, 0}, 0.0)(z)) < 1e-12);
  }

  const HowlandStepResult s = HowlandStep(ZTimesIdentity(2), 0.0);
  CHECK(s.factor.q.norm() < 1e-12);
  CHECK(Dist(s.factor.p, Identity(2)) < 1e-12);
  CHECK(s.factor.rank == 2);
  CHECK(Dist(s.next(0.0), -Identity(2)) < 1e-12);
  CHECK(Dist(s.next(0.4), -Identity(2)) < 1e-12);

  const MatrixFunction pencil = FromPencil(J2(), Identity(2));
  const HowlandStepResult j = HowlandStep(pencil, 0.0);
  CHECK(j.factor.rank == 1);
  CHECK(Dist(j.factor.p, Diag({0.0, 1.0})) < 1e-12);
  for (const Complex z : {Complex(0.1, 0.2), Complex(0.0, -0.3)})
  {
    CHECK(Dist((j.factor.q - z * j.factor.p) * j.next(z), pencil(z)) < 1e-10);
  }
}

TEST_CASE("howland_step errors")
{
  CHECK(KindOf([] { HowlandStep(Constant(Identity(2)), 0.0); }) == ErrorKind::NothingToFactor);
  // A singular value of 1e-8 sits right at the rank threshold.
  CHECK(KindOf([] { HowlandStep(Constant(Diag({1.0, 1e-8})), 0.0); }) ==
        ErrorKind::RankGapTooSmall);
}

TEST_CASE("howland_factorize examples")
{
  const HowlandFactorization a = HowlandFactorize(DiagonalPowers({1, 0}, 0.0), 0.0);
  CHECK(a.n0 == 1);
  CHECK(a.nu == 1);
  CHECK(a.partial_multiplicities == std::vector<int>{1});

  const MatrixFunction dz = DiagonalPowers({1, 2}, 0.0);
  const HowlandFactorization b = HowlandFactorize(dz, 0.0);
  REQUIRE(b.n0 == 2);
  CHECK(b.steps[0].rank == 2);
  CHECK(b.steps[1].rank == 1);
  CHECK(b.nu == 3);
  CHECK(b.partial_multiplicities == std::vector<int>{1, 2});
  CHECK(DetWindingOracle(dz, 0.0, 0.5) == 3);

  const MatrixFunction pencil = FromPencil(J2(), Identity(2));
  const HowlandFactorization c = HowlandFactorize(pencil, 0.0);
  REQUIRE(c.n0 == 2);
  CHECK(c.steps[0].rank == 1);
  CHECK(c.steps[1].rank == 1);
  CHECK(c.nu == 2);
  CHECK(c.partial_multiplicities == std::vector<int>{2});
  CHECK(c.kernel_dimension == 1);
  CHECK(ReconstructionError(c, pencil, {0.2, 0.1}) < 1e-10);

  const HowlandFactorization regular = HowlandFactorize(pencil, 1.0);
  CHECK(regular.n0 == 0);
  CHECK(regular.nu == 0);
  CHECK(regular.partial_multiplicities.empty());
}

TEST_CASE("howland_factorize respects the step limit")
{
  FactorizeOptions options;
  options.step_limit = 1;
  CHECK(KindOf([&] { HowlandFactorize(DiagonalPowers({1, 2}, 0.0), 0.0, options); }) ==
        ErrorKind::StepLimitExceeded);
}

TEST_CASE("inverse of the first tail has pole order n0 - 1")
{
  const HowlandStepResult s = HowlandStep(DiagonalPowers({1, 3}, 0.0), 0.0);
  // A1 = diag(-1, -z^2) up to sign; its inverse has a double pole.
  CHECK(PrincipalPart(Inverse(s.next), 0.0, 0.5).pole_order == 2);
  CHECK(PrincipalPart(Inverse(DiagonalPowers({1, 3}, 0.0)), 0.0, 0.5).pole_order == 3);
}

TEST_CASE("conjugate_partition")
{
  CHECK(ConjugatePartition({2, 1}) == std::vector<int>{1, 2});
  CHECK(ConjugatePartition({1, 1}) == std::vector<int>{2});
  CHECK(ConjugatePartition({3, 1, 1}) == std::vector<int>{1, 1, 3});
  CHECK(ConjugatePartition({}).empty());
  CHECK(ConjugatePartition({1, 3, 1}) == ConjugatePartition({3, 1, 1}));
}

TEST_CASE("conjugate partition is an involution")
{
  Rng rng(41);
  for (int trial = 0; trial < 100; ++trial)
  {
    std::vector<int> parts(static_cast<std::size_t>(rng.UniformInt(0, 6)));
    for (int &p : parts)
    {
      p = rng.UniformInt(1, 5);
    }
    std::sort(parts.begin(), parts.end());
    const std::vector<int> conj = ConjugatePartition(parts);
    CHECK(ConjugatePartition(conj) == parts);
    int a = 0;
    int b = 0;
    for (const int v : parts)
    {
      a += v;
    }
    for (const int v : conj)
    {
      b += v;
    }
    CHECK(a == b);
  }
}

TEST_CASE("simple_pole_criterion examples")
{
  const MatrixFunction a = DiagonalPowers({1, 0}, 0.0);
  CHECK(SimplePoleCriterion(HowlandFactorize(a, 0.0), a));
  const MatrixFunction b = DiagonalPowers({1, 2}, 0.0);
  CHECK_FALSE(SimplePoleCriterion(HowlandFactorize(b, 0.0), b));
  const MatrixFunction c = FromPencil(J2(), Identity(2));
  CHECK_FALSE(SimplePoleCriterion(HowlandFactorize(c, 0.0), c));
  CHECK(KindOf([&] { SimplePoleCriterion(HowlandFactorize(c, 1.0), c); }) ==
        ErrorKind::PreconditionFailed);
}

TEST_CASE("nu_via_block_determinant examples")
{
  CHECK(NuViaBlockDeterminant(DiagonalPowers({1, 0}, 0.0), 0.0, 0.25) == 1);
  CHECK(KindOf([] { NuViaBlockDeterminant(DiagonalPowers({1, 0}, 0.0), 0.0, 0.5); }) ==
        ErrorKind::InnerRadiusUnusable);
  CHECK(NuViaBlockDeterminantShrinking(DiagonalPowers({1, 2}, 0.0), 0.0, 0.5) == 3);
  CHECK(NuViaBlockDeterminantShrinking(FromPencil(J2(), Identity(2)), 0.0, 0.5) == 2);
  CHECK(NuViaBlockDeterminantShrinking(ZTimesIdentity(3), 0.0, 0.5) == 3);
}

TEST_CASE("factorization invariants and the four multiplicities agree on analytic members")
{
  Rng rng(42);
  for (int trial = 0; trial < 30; ++trial)
  {
    const AnalyticMember am = RandomAnalyticMember(rng, 5);
    CAPTURE(am.kind);
    CAPTURE(trial);
    const HowlandFactorization f = HowlandFactorize(am.f, am.z0);
    CHECK(f.nu == am.nu);
    if (am.partial_multiplicities)
    {
      CHECK(f.partial_multiplicities == *am.partial_multiplicities);
    }
    REQUIRE(!f.steps.empty());
    CHECK(f.steps.front().rank == f.kernel_dimension);
    for (std::size_t j = 1; j < f.steps.size(); ++j)
    {
      CHECK(f.steps[j].rank <= f.steps[j - 1].rank);
    }
    CHECK(f.nu >= f.n0);
    CHECK(SimplePoleCriterion(f, am.f) == (f.n0 == 1));
    for (const double radius : {am.eps / 2.0, am.eps / 4.0})
    {
      for (int s = 0; s < 10; ++s)
      {
        const Complex z = am.z0 + std::polar(radius, 2.0 * M_PI * s / 10.0);
        CHECK(ReconstructionError(f, am.f, z) < 1e-8);
      }
    }
    CHECK(NuViaBlockDeterminantShrinking(am.f, am.z0, am.eps) == am.nu);
    CHECK(ArgumentPrincipleMultiplicity(am.f, am.z0, am.eps) == am.nu);
    CHECK(DetWindingOracle(am.f, am.z0, am.eps) == am.nu);
  }
}
