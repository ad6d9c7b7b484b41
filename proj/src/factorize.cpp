// SPDX-License-Identifier: Apache-2.0

#include "mero/factorize.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "mero/errors.hpp"
#include "mero/spectra.hpp"

namespace mero
{

namespace
{

constexpr int kInnerNodes = 128;
constexpr double kProjectionResidual = 1e-8;

struct PointData
{
  ComplexMatrix value;
  ComplexMatrix derivative;
  RankDecision rank;
};

PointData Inspect(const MatrixFunction &a, Complex z0, const FactorizeOptions &options)
{
  PointData d;
  d.value = a(z0);
  d.derivative = DerivativeAt(a, z0, options.derivative_radius, options.derivative_nodes);
  const double scale = Norm2(d.value) + Norm2(d.derivative);
  d.rank = DecideRank(d.value, scale);
  if (d.rank.ambiguous)
  {
    Throw(ErrorKind::RankGapTooSmall,
          "a singular value lies within a factor 10 of the rank threshold " +
              std::to_string(d.rank.threshold),
          z0);
  }
  return d;
}

HowlandStepResult StepFrom(const MatrixFunction &a, Complex z0, const PointData &d)
{
  const Eigen::Index n = a.Rows();
  const ComplexMatrix u = d.rank.left.leftCols(d.rank.rank);
  HowlandFactor factor;
  factor.q = u * u.adjoint();
  factor.p = Identity(n) - factor.q;
  factor.rank = static_cast<int>(n - d.rank.rank);

  const ComplexMatrix p = factor.p;
  const ComplexMatrix q = factor.q;
  const ComplexMatrix at_center = q * d.value - p * d.derivative;
  auto eval = [a, z0, p, q, at_center](Complex z) -> ComplexMatrix {
    if (z == z0)
    {
      return at_center;
    }
    return (q - p / (z - z0)) * a(z);
  };
  return {factor, MatrixFunction(n, n, eval)};
}

void RequireSquare(const MatrixFunction &a)
{
  if (!a.IsSquare())
  {
    Throw(ErrorKind::ShapeMismatch, "factorization needs a square matrix function");
  }
}

}  // namespace

HowlandStepResult HowlandStep(const MatrixFunction &a, Complex z0, const FactorizeOptions &options)
{
  RequireSquare(a);
  const PointData d = Inspect(a, z0, options);
  if (d.rank.rank == a.Rows())
  {
    Throw(ErrorKind::NothingToFactor, "A(z0) is invertible", z0);
  }
  return StepFrom(a, z0, d);
}

HowlandFactorization HowlandFactorize(const MatrixFunction &a, Complex z0,
                                      const FactorizeOptions &options)
{
  RequireSquare(a);
  std::vector<HowlandFactor> steps;
  MatrixFunction current = a;
  int kernel_dimension = 0;
  for (int j = 0;; ++j)
  {
    const PointData d = Inspect(current, z0, options);
    if (j == 0)
    {
      kernel_dimension = static_cast<int>(a.Rows() - d.rank.rank);
    }
    if (d.rank.rank == a.Rows())
    {
      break;
    }
    if (j == options.step_limit)
    {
      Throw(ErrorKind::StepLimitExceeded,
            "factorization did not terminate within " + std::to_string(options.step_limit) +
                " steps",
            z0);
    }
    HowlandStepResult r = StepFrom(current, z0, d);
    steps.push_back(std::move(r.factor));
    current = std::move(r.next);
  }

  int nu = 0;
  std::vector<int> p;
  for (std::size_t j = 0; j < steps.size(); ++j)
  {
    const HowlandFactor &s = steps[j];
    const double residual = Norm2(s.p * s.p - s.p);
    if (residual > kProjectionResidual)
    {
      Throw(ErrorKind::PreconditionFailed, "factor projection is not idempotent", z0);
    }
    if (j > 0 && s.rank > steps[j - 1].rank)
    {
      Throw(ErrorKind::PreconditionFailed,
            "factorization invariant violated: p_j increased at step " + std::to_string(j + 1),
            z0);
    }
    nu += s.rank;
    p.push_back(s.rank);
  }
  const int n0 = static_cast<int>(steps.size());
  if (n0 > 0 && steps.front().rank != kernel_dimension)
  {
    Throw(ErrorKind::PreconditionFailed, "factorization invariant violated: p_1 != dim ker A(z0)",
          z0);
  }
  if (nu < n0 || nu < kernel_dimension)
  {
    Throw(ErrorKind::PreconditionFailed, "factorization invariant violated: nu bounds", z0);
  }
  return HowlandFactorization{z0, std::move(steps), n0, current, nu, ConjugatePartition(p),
                              kernel_dimension};
}

ComplexMatrix Reconstruct(const HowlandFactorization &f, Complex z)
{
  const Complex w = z - f.center;
  ComplexMatrix product = Identity(f.tail.Rows());
  for (const HowlandFactor &s : f.steps)
  {
    product = product * (s.q - w * s.p);
  }
  return product * f.tail(z);
}

std::vector<int> ConjugatePartition(std::vector<int> parts)
{
  parts.erase(std::remove_if(parts.begin(), parts.end(), [](int v) { return v <= 0; }),
              parts.end());
  const int largest = parts.empty() ? 0 : *std::max_element(parts.begin(), parts.end());
  std::vector<int> out;
  for (int i = 1; i <= largest; ++i)
  {
    out.push_back(static_cast<int>(
        std::count_if(parts.begin(), parts.end(), [i](int v) { return v >= i; })));
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool SimplePoleCriterion(const HowlandFactorization &f, const MatrixFunction &a)
{
  if (f.n0 == 0)
  {
    Throw(ErrorKind::PreconditionFailed, "A(z0) is invertible; there is no zero to classify",
          f.center);
  }
  if (a.Rows() != f.tail.Rows())
  {
    Throw(ErrorKind::ShapeMismatch, "factorization belongs to a different function", f.center);
  }
  // m_g(0; A(z0)) under the rank scale |A(z0)| + |A'(z0)| used by the factorization.
  const int mg = f.kernel_dimension;
  const bool by_nu = f.nu == mg;
  const bool by_order = f.n0 == 1;
  if (by_nu != by_order)
  {
    Throw(ErrorKind::PreconditionFailed, "simple-pole characterizations disagree", f.center);
  }
  return by_nu;
}

namespace
{

// Number of eigenvalues of A(z0) in the cluster at 0, chosen at the widest
// magnitude gap at or above dim ker A(z0).
int ZeroClusterSize(const std::vector<Complex> &eigenvalues, int kernel_dim, double scale)
{
  std::vector<double> s;
  for (const Complex &v : eigenvalues)
  {
    s.push_back(std::abs(v));
  }
  std::sort(s.begin(), s.end());
  const int n = static_cast<int>(s.size());
  int best = std::max(kernel_dim, 1);
  double best_ratio = -1.0;
  for (int p = std::max(kernel_dim, 1); p <= n; ++p)
  {
    const double below = std::max(s[static_cast<std::size_t>(p - 1)], 1e-300);
    if (p > kernel_dim && below > 1e-2 * scale)
    {
      break;
    }
    const double ratio = (p == n) ? INFINITY : s[static_cast<std::size_t>(p)] / below;
    if (ratio > best_ratio)
    {
      best_ratio = ratio;
      best = p;
    }
  }
  return best;
}

void CheckInnerCircle(const std::vector<Complex> &eigenvalues, int p0, double delta, Complex z)
{
  int inside = 0;
  for (const Complex &v : eigenvalues)
  {
    const double m = std::abs(v);
    if (m > 0.7 * delta && m < 1.4 * delta)
    {
      Throw(ErrorKind::InnerRadiusUnusable,
            "an eigenvalue of A(z) lies near the inner circle; retry with a smaller radius", z);
    }
    inside += m < delta ? 1 : 0;
  }
  if (inside != p0)
  {
    Throw(ErrorKind::InnerRadiusUnusable,
          "eigenvalue count inside the inner circle changed; retry with a smaller radius", z);
  }
}

}  // namespace

int NuViaBlockDeterminant(const MatrixFunction &a, Complex z0, double eps, int nodes)
{
  RequireSquare(a);
  const Eigen::Index n = a.Rows();
  const ComplexMatrix a0 = a(z0);
  const double scale = Norm2(a0) + Norm2(DerivativeAt(a, z0, eps / 2.0));
  const int kernel_dim = static_cast<int>(n - NumericalRank(a0, scale));
  const std::vector<Complex> ev0 = Eigenvalues(a0);
  const int p0 = (scale == 0.0) ? static_cast<int>(n) : ZeroClusterSize(ev0, kernel_dim, scale);
  const Contour outer(z0, eps, nodes);

  std::function<ComplexMatrix(Complex)> block;
  if (p0 == n)
  {
    // The whole space is the zero block: F = A.
    block = [&a](Complex z) { return a(z); };
  }
  else
  {
    std::vector<double> mags;
    for (const Complex &v : ev0)
    {
      mags.push_back(std::abs(v));
    }
    std::sort(mags.begin(), mags.end());
    const double delta = 0.5 * mags[static_cast<std::size_t>(p0)];
    CheckInnerCircle(ev0, p0, delta, z0);
    const ComplexMatrix proj0 = RieszProjection(a0, 0.0, delta, kInnerNodes);
    if (std::lround(proj0.trace().real()) != p0)
    {
      Throw(ErrorKind::InnerRadiusUnusable, "zero cluster of A(z0) could not be isolated", z0);
    }
    const ComplexMatrix comp0 = Identity(n) - proj0;
    const RankDecision r = DecideRank(proj0, 1.0);
    const ComplexMatrix u = r.left.leftCols(p0);
    block = [&a, delta, p0, proj0, comp0, u, n](Complex z) -> ComplexMatrix {
      const ComplexMatrix az = a(z);
      CheckInnerCircle(Eigenvalues(az), p0, delta, z);
      const ComplexMatrix pz = RieszProjection(az, 0.0, delta, kInnerNodes);
      if (Norm2(pz - proj0) > 0.5)
      {
        Throw(ErrorKind::NeighborhoodTooLarge,
              "Riesz projection moved too far from P(z0); the transformation may be singular", z);
      }
      const ComplexMatrix t = proj0 * pz + comp0 * (Identity(n) - pz);
      if (!IsNumericallyInvertible(t))
      {
        Throw(ErrorKind::NeighborhoodTooLarge, "T(z) is not invertible", z);
      }
      const ComplexMatrix conj = t * az * t.partialPivLu().inverse();
      return u.adjoint() * conj * u;
    };
  }

  std::vector<Complex> dets;
  dets.reserve(static_cast<std::size_t>(nodes));
  double largest = 0.0;
  for (const Complex z : outer.Nodes())
  {
    dets.push_back(block(z).determinant());
    largest = std::max(largest, std::abs(dets.back()));
  }
  if (!(largest > 0.0) || !std::isfinite(largest))
  {
    Throw(ErrorKind::ZeroOnContour, "block determinant vanishes on the contour", z0);
  }
  for (Complex &d : dets)
  {
    d /= largest;
  }
  try
  {
    return WindingOfSamples(dets, DefaultTolerances().winding_floor);
  }
  catch (const Error &e)
  {
    throw Error(e.Kind(), e.what(), z0);
  }
}

int NuViaBlockDeterminantShrinking(const MatrixFunction &a, Complex z0, double eps, int halvings,
                                   int nodes)
{
  for (int i = 0;; ++i)
  {
    try
    {
      return NuViaBlockDeterminant(a, z0, eps, nodes);
    }
    catch (const Error &e)
    {
      const bool retry =
          e.Kind() == ErrorKind::InnerRadiusUnusable || e.Kind() == ErrorKind::NeighborhoodTooLarge;
      if (!retry || i >= halvings)
      {
        throw;
      }
      eps *= 0.5;
    }
  }
}

}  // namespace mero
