// SPDX-License-Identifier: Apache-2.0

#include "helpers.hpp"
#include "mero/families.hpp"
#include "mero/matfun.hpp"

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

}  // namespace

TEST_CASE("from_pencil")
{
  const MatrixFunction f = FromPencil(J2(), Identity(2));
  CHECK(Dist(f(0.0), J2()) == 0.0);
  CHECK(FromPencil(Identity(2), Identity(2))(1.0).norm() == 0.0);
  const ComplexMatrix b = Mat({{1.0, 2.0}, {3.0, 4.0}});
  CHECK(FromPencil(J2(), b).Derivative({0.3, 7.0}) == -b);
  CHECK(KindOf([] { FromPencil(Identity(2), Identity(3)); }) == ErrorKind::ShapeMismatch);
}

TEST_CASE("resolvent")
{
  const MatrixFunction r = Resolvent(Diag({1.0, 2.0}));
  CHECK(Dist(r(0.0), Diag({1.0, 0.5})) < 1e-15);
  CHECK(KindOf([&] { r(1.0); }) == ErrorKind::EvaluationAtSpectrum);
  CHECK(Dist(r.Derivative(0.0), Diag({1.0, 0.25})) < 1e-15);
  try
  {
    r(2.0);
  }
  catch (const Error &e)
  {
    REQUIRE(e.Where().has_value());
    CHECK(*e.Where() == Complex(2.0));
  }
}

TEST_CASE("product")
{
  const MatrixFunction f = ZTimesIdentity(2);
  const MatrixFunction ff = Product(f, f);
  CHECK(Dist(ff(2.0), 4.0 * Identity(2)) < 1e-15);
  CHECK(Dist(ff.Derivative(2.0), 4.0 * Identity(2)) < 1e-15);
  const MatrixFunction g = FromPencil(J2(), Mat({{1.0, 2.0}, {0.0, 1.0}}));
  CHECK(Dist(Product(Constant(Identity(2)), g)(0.7), g(0.7)) < 1e-15);
  CHECK(KindOf([] { Product(ZTimesIdentity(2), ZTimesIdentity(3)); }) == ErrorKind::ShapeMismatch);
}

TEST_CASE("inverse")
{
  const MatrixFunction f = DiagonalPowers({1, 0}, 0.0);
  const MatrixFunction inv = Inverse(f);
  CHECK(Dist(inv(2.0), Diag({0.5, 1.0})) < 1e-15);
  CHECK(KindOf([&] { inv(0.0); }) == ErrorKind::NonInvertible);
  const MatrixFunction g = FromPencil(Mat({{1.0, 2.0}, {3.0, 4.0}}), Identity(2));
  const Complex z(0.3, 0.4);
  CHECK(Dist(Inverse(Inverse(g))(z), g(z)) < 1e-10 * g(z).norm());
}

TEST_CASE("derivative_at")
{
  const MatrixFunction pencil = FromPencil(J2(), Identity(2));
  CHECK(Dist(DerivativeAt(pencil, 5.0, 0.01), -Identity(2)) == 0.0);

  const MatrixFunction square(1, 1, [](Complex z) { return ComplexMatrix::Constant(1, 1, z * z); });
  CHECK(std::abs(DerivativeAt(square, 1.0, 0.1)(0, 0) - 2.0) < 1e-10);

  const MatrixFunction r = Resolvent(Diag({1.0}));
  const MatrixFunction stripped(1, 1, r.Eval());
  CHECK(std::abs(DerivativeAt(stripped, 0.0, 0.25)(0, 0) - 1.0) < 1e-10);
}

TEST_CASE("stored derivatives agree with finite differences and the Cauchy fallback")
{
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial)
  {
    const ComplexMatrix t = RandomGaussian(rng, 4, 4);
    const ComplexMatrix a = RandomGaussian(rng, 4, 4);
    const MatrixFunction f = Product(Resolvent(t), FromPencil(a, Identity(4)));
    // A regular point far from the spectrum of t.
    const Complex z = Complex(0.0, 6.0) + rng.ComplexNormal();
    const ComplexMatrix exact = f.Derivative(z);
    CHECK(RelativeResidual(exact, FiniteDifference(f, z)) < 1e-6);
    const MatrixFunction stripped(4, 4, f.Eval());
    CHECK(RelativeResidual(exact, DerivativeAt(stripped, z, 0.5)) < 1e-8);
  }
}

TEST_CASE("inverse of a product reverses the order")
{
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial)
  {
    const MatrixFunction f = FromPencil(RandomGaussian(rng, 3, 3), RandomGaussian(rng, 3, 3));
    const MatrixFunction g = FromPencil(RandomGaussian(rng, 3, 3), Identity(3));
    const Complex z = rng.ComplexNormal();
    const ComplexMatrix lhs = Inverse(Product(f, g))(z);
    const ComplexMatrix rhs = Product(Inverse(g), Inverse(f))(z);
    CHECK(RelativeResidual(lhs, rhs) < 1e-10);
  }
}

TEST_CASE("evaluator shape is enforced")
{
  const MatrixFunction bad(2, 2, [](Complex) { return ComplexMatrix::Zero(3, 3); });
  CHECK(KindOf([&] { bad(0.0); }) == ErrorKind::ShapeMismatch);
}
