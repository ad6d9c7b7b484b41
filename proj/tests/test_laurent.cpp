// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "helpers.hpp"
#include "mero/families.hpp"
#include "mero/laurent.hpp"
#include "mero/spectra.hpp"

using namespace mero;
using namespace mero::test;

namespace
{

MatrixFunction IdentityOverZ(Eigen::Index n)
{
  return MatrixFunction(n, n, [n](Complex z) -> ComplexMatrix { return Identity(n) / z; });
}

ComplexMatrix E(Eigen::Index n, Eigen::Index i, Eigen::Index j)
{
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  m(i, j) = 1.0;
  return m;
}

}  // namespace

TEST_CASE("laurent_coefficient examples")
{
  const Contour c = MakeCircle(0.0, 0.5);
  CHECK(Dist(LaurentCoefficient(IdentityOverZ(2), 0.0, -1, c), Identity(2)) < 1e-10);
  CHECK(LaurentCoefficient(IdentityOverZ(2), 0.0, 0, c).norm() < 1e-10);
  CHECK(Dist(LaurentCoefficient(Resolvent(Diag({0.0, 1.0})), 0.0, -1, c), -E(2, 0, 0)) < 1e-10);
  CHECK(KindOf([&] { LaurentCoefficient(IdentityOverZ(2), 0.1, -1, c); }) ==
        ErrorKind::InvalidArgument);
}

TEST_CASE("principal_part examples")
{
  const MatrixFunction m(2, 2, [](Complex z) -> ComplexMatrix {
    return Identity(2) + E(2, 0, 1) / (z * z);
  });
  const LaurentData d = PrincipalPart(m, 0.0, 0.5);
  CHECK(d.pole_order == 2);
  REQUIRE(d.principal_ranks.size() == 2);
  CHECK(d.principal_ranks[0] == 1);
  CHECK(d.principal_ranks[1] == 0);
  CHECK(Dist(d.coefficients.at(-2), E(2, 0, 1)) < 1e-10);
  CHECK(d.coefficients.count(-3) == 0);

  const LaurentData analytic = PrincipalPart(FromPencil(J2(), Identity(2)), {0.4, -1.0}, 0.5);
  CHECK(analytic.pole_order == 0);
  CHECK(analytic.principal_ranks.empty());
  CHECK(analytic.coefficients.empty());

  // diag(z, z^2)^{-1} = diag(1/z, 1/z^2).
  const LaurentData inv = PrincipalPart(Inverse(DiagonalPowers({1, 2}, 0.0)), 0.0, 0.5);
  CHECK(inv.pole_order == 2);
  CHECK(Dist(inv.coefficients.at(-2), E(2, 1, 1)) < 1e-10);
  CHECK(Dist(inv.coefficients.at(-1), E(2, 0, 0)) < 1e-10);
  CHECK(inv.principal_ranks == std::vector<Eigen::Index>{1, 1});
}

TEST_CASE("is_finitely_meromorphic_at examples")
{
  const MeromorphyReport r = IsFinitelyMeromorphicAt(IdentityOverZ(3), 0.0, 0.5);
  CHECK(r.meromorphic_within_kmax);
  CHECK(r.pole_order == 1);
  CHECK(r.principal_ranks == std::vector<Eigen::Index>{3});

  const MeromorphyReport a = IsFinitelyMeromorphicAt(Constant(Identity(2)), 1.0, 0.5);
  CHECK(a.meromorphic_within_kmax);
  CHECK(a.pole_order == 0);

  const MatrixFunction essential(
      1, 1, [](Complex z) { return ComplexMatrix::Constant(1, 1, std::exp(1.0 / z)); });
  CHECK(KindOf([&] { IsFinitelyMeromorphicAt(essential, 0.0, 0.5, 8); }) ==
        ErrorKind::PoleOrderExceeded);
}

TEST_CASE("trace_principal_part_symmetry examples")
{
  const Contour c = MakeCircle(0.0, 0.5);
  const MatrixFunction m1(2, 2, [](Complex z) -> ComplexMatrix { return E(2, 0, 1) / z; });
  const MatrixFunction m2 = Constant(E(2, 1, 0));
  const TraceSymmetry t = TracePrincipalPartSymmetry(m1, m2, c);
  CHECK(Dist(t.m1m2, E(2, 0, 0)) < 1e-10);
  CHECK(Dist(t.m2m1, E(2, 1, 1)) < 1e-10);
  CHECK(t.residual < 1e-10);

  const MatrixFunction p = FromPencil(J2(), Identity(2));
  const TraceSymmetry analytic = TracePrincipalPartSymmetry(p, p, c);
  CHECK(analytic.m1m2.norm() < 1e-10);
  CHECK(analytic.m2m1.norm() < 1e-10);

  const TraceSymmetry second = TracePrincipalPartSymmetry(IdentityOverZ(1), IdentityOverZ(1), c);
  CHECK(std::abs(second.m1m2.trace()) < 1e-10);
  CHECK(std::abs(second.m2m1.trace()) < 1e-10);

  CHECK(KindOf([&] {
          TracePrincipalPartSymmetry(Constant(ComplexMatrix::Zero(2, 3)),
                                     Constant(ComplexMatrix::Zero(2, 3)), c);
        }) == ErrorKind::ShapeMismatch);
}

TEST_CASE("coefficient error falls by 1e3 per doubling down to a 1e-12 floor")
{
  // Pole of order 2 at 0 and simple poles at distance >= 3.
  const ComplexMatrix t = Mat({{0.0, 1.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, 3.0}});
  const MatrixFunction m = Resolvent(t);
  // Exact coefficients: R(z) = -J/z^2 - P/z + sum over the far block.
  for (const int k : {-2, -1, 0, 2})
  {
    ComplexMatrix exact = ComplexMatrix::Zero(3, 3);
    if (k == -2)
    {
      exact(0, 1) = -1.0;
    }
    else if (k == -1)
    {
      exact(0, 0) = -1.0;
      exact(1, 1) = -1.0;
    }
    else
    {
      exact(2, 2) = std::pow(3.0, -k - 1);
    }
    double previous = INFINITY;
    double err = INFINITY;
    for (const int n : {8, 16, 32, 64})
    {
      err = Dist(LaurentCoefficient(m, 0.0, k, MakeCircle(0.0, 1.0, n)), exact) /
            std::max(1.0, exact.norm());
      if (previous > 1e-12)
      {
        CHECK((err <= 1e-12 || previous / err >= 1e3));
      }
      previous = err;
    }
    CHECK(err <= 1e-12);
  }
}

TEST_CASE("truncated series reconstructs rational functions")
{
  Rng rng(21);
  for (int trial = 0; trial < 25; ++trial)
  {
    const MeromorphicMember mm = RandomMeromorphicMember(rng, 3, rng.ComplexNormal());
    const LaurentData d = LaurentExpansion(mm.f, mm.z0, mm.eps, -3, 8);
    for (int s = 0; s < 5; ++s)
    {
      const Complex w = std::polar(rng.Uniform(0.05, 0.25), rng.Uniform(0.0, 2.0 * M_PI));
      const ComplexMatrix exact = mm.f(mm.z0 + w);
      CHECK(RelativeResidual(EvaluateSeries(d, mm.z0 + w), exact) < 1e-6);
    }
  }
}

TEST_CASE("coefficients do not depend on the extraction radius")
{
  Rng rng(22);
  for (int trial = 0; trial < 25; ++trial)
  {
    const ComplexMatrix t = RandomGaussian(rng, 4, 4);
    const Complex z0 = Eigenvalues(t).front();
    const double eps = SuggestRadius(t, z0);
    const MatrixFunction r = Resolvent(t);
    for (int k = -1; k <= 2; ++k)
    {
      const ComplexMatrix a = LaurentCoefficient(r, z0, k, MakeCircle(z0, eps));
      const ComplexMatrix b = LaurentCoefficient(r, z0, k, MakeCircle(z0, eps / 2.0));
      CHECK(RelativeResidual(a, b) < 1e-8);
    }
  }
}

TEST_CASE("rank of the product residue is bounded by principal-part ranks")
{
  Rng rng(23);
  for (int trial = 0; trial < 25; ++trial)
  {
    const Complex z0 = rng.ComplexNormal();
    const MeromorphicMember a = RandomMeromorphicMember(rng, 3, z0, 2);
    const MeromorphicMember b = RandomMeromorphicMember(rng, 3, z0, 2);
    const LaurentData pa = PrincipalPart(a.f, z0, 0.5);
    const LaurentData pb = PrincipalPart(b.f, z0, 0.5);
    Eigen::Index bound = 0;
    for (const Eigen::Index r : pa.principal_ranks)
    {
      bound += r;
    }
    for (const Eigen::Index r : pb.principal_ranks)
    {
      bound += r;
    }
    const TraceSymmetry t = TracePrincipalPartSymmetry(a.f, b.f, MakeCircle(z0, 0.5));
    CHECK(NumericalRank(t.m1m2, 1e-6, 1.0) <= bound);
    CHECK(t.residual < 1e-8 * (1.0 + t.m1m2.norm()));
  }
}
