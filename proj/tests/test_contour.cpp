// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "helpers.hpp"
#include "mero/contour.hpp"
#include "mero/families.hpp"

using namespace mero;
using namespace mero::test;

TEST_CASE("make_circle rejects bad arguments")
{
  CHECK(KindOf([] { MakeCircle(0.0, 1.0, 4); }) == ErrorKind::InvalidArgument);
  CHECK(KindOf([] { MakeCircle(0.0, 0.0, 16); }) == ErrorKind::InvalidArgument);
  CHECK(KindOf([] { MakeCircle(0.0, -1.0, 16); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("make_circle node placement")
{
  const Contour c = MakeCircle(0.0, 1.0, 8);
  CHECK(c.Node(0) == Complex(1.0, 0.0));
  CHECK(c.Node(2) == Complex(0.0, 1.0));
  CHECK(c.Node(4) == Complex(-1.0, 0.0));
  CHECK(c.Node(6) == Complex(0.0, -1.0));

  const Contour shifted = MakeCircle({2.0, 1.0}, 0.5, 16);
  CHECK(shifted.Node(0) == Complex(2.5, 1.0));

  const Contour big = MakeCircle({0.3, -0.2}, 0.7, 101);
  double last = -1.0;
  for (int j = 0; j < big.NodeCount(); ++j)
  {
    CHECK(std::abs(std::abs(big.Node(j) - big.Center()) - 0.7) < 1e-15);
    double angle = std::arg(big.Node(j) - big.Center());
    if (angle < 0.0)
    {
      angle += 2.0 * M_PI;
    }
    if (j > 0)
    {
      CHECK(angle > last);
    }
    last = angle;
  }
}

TEST_CASE("cauchy_integral residues")
{
  const Contour c = MakeCircle(0.0, 1.0, 64);
  const ComplexMatrix res =
      CauchyIntegral([](Complex z) { return ComplexMatrix::Constant(1, 1, 1.0 / z); }, c);
  CHECK(std::abs(res(0, 0) - 1.0) < 1e-12);
  const ComplexMatrix zero =
      CauchyIntegral([](Complex) { return ComplexMatrix::Constant(1, 1, 1.0); }, c);
  CHECK(std::abs(zero(0, 0)) < 1e-12);

  const ComplexMatrix t = Diag({1.0, 2.0});
  const ComplexMatrix p = -CauchyIntegral(
      [&t](Complex z) -> ComplexMatrix { return (t - z * Identity(2)).inverse(); },
      MakeCircle(1.0, 0.5, 256));
  CHECK(Dist(p, Diag({1.0, 0.0})) < 1e-10);
}

TEST_CASE("cauchy_integral reports the failing node")
{
  const Contour c = MakeCircle(0.0, 1.0, 8);
  try
  {
    CauchyIntegral(
        [](Complex z) -> ComplexMatrix {
          if (z == Complex(-1.0, 0.0))
          {
            Throw(ErrorKind::NonInvertible, "boom");
          }
          return ComplexMatrix::Identity(1, 1);
        },
        c);
    FAIL("expected an error");
  }
  catch (const Error &e)
  {
    CHECK(e.Kind() == ErrorKind::NonInvertible);
    REQUIRE(e.Where().has_value());
    CHECK(*e.Where() == Complex(-1.0, 0.0));
  }
}

TEST_CASE("scalar_winding examples")
{
  CHECK(ScalarWinding([](Complex z) { return z; }, MakeCircle(0.0, 1.0)) == 1);
  CHECK(ScalarWinding([](Complex z) { return 1.0 / z; }, MakeCircle(0.0, 1.0)) == -1);
  CHECK(ScalarWinding([](Complex z) { return (z - 0.3) * (z - 0.3); }, MakeCircle(0.3, 0.1)) ==
        2);
}

TEST_CASE("scalar_winding failure modes")
{
  CHECK(KindOf([] { ScalarWinding([](Complex z) { return z - 1.0; }, MakeCircle(0.0, 1.0, 8)); }) ==
        ErrorKind::ZeroOnContour);
  // z^5 on 8 nodes turns by 5 pi / 4 per step.
  CHECK(KindOf([] {
          ScalarWinding([](Complex z) { return z * z * z * z * z; }, MakeCircle(0.0, 1.0, 8));
        }) == ErrorKind::UnderResolvedContour);
}

TEST_CASE("quadrature error falls geometrically with N")
{
  // f(z) = 1 / (z - 3) on the unit circle integrates to 0.
  double previous = INFINITY;
  for (const int n : {8, 16, 32})
  {
    const ComplexMatrix v = CauchyIntegral(
        [](Complex z) { return ComplexMatrix::Constant(1, 1, 1.0 / (z - 3.0)); },
        MakeCircle(0.0, 1.0, n));
    const double err = std::abs(v(0, 0));
    if (std::isfinite(previous) && previous > 1e-12)
    {
      CHECK((err <= 1e-12 || previous / err >= 1e3));
    }
    previous = err;
  }
  CHECK(previous < 1e-12);
}

TEST_CASE("scalar_winding is invariant under nonvanishing factors and additive")
{
  Rng rng(11);
  for (int trial = 0; trial < 40; ++trial)
  {
    const Complex z0 = rng.ComplexNormal();
    const int a = rng.UniformInt(-3, 3);
    const int b = rng.UniformInt(-3, 3);
    const Complex c = rng.ComplexNormal() + 0.1;
    const auto h1 = [z0, a](Complex z) { return IntPow(z - z0, a); };
    const auto h2 = [z0, b](Complex z) { return IntPow(z - z0 - 0.05, b); };
    const Contour circle = MakeCircle(z0, 0.5);
    const int w1 = ScalarWinding(h1, circle);
    const int w2 = ScalarWinding(h2, circle);
    CHECK(w1 == a);
    CHECK(w2 == b);
    CHECK(ScalarWinding([&](Complex z) { return c * h1(z); }, circle) == w1);
    CHECK(ScalarWinding([&](Complex z) { return std::exp(z) * h1(z); }, circle) == w1);
    CHECK(ScalarWinding([&](Complex z) { return h1(z) * h2(z); }, circle) == w1 + w2);
  }
}
