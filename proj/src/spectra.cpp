// SPDX-License-Identifier: Apache-2.0

#include "mero/spectra.hpp"

#include <algorithm>
#include <cmath>

#include "mero/errors.hpp"

namespace mero
{

namespace
{

constexpr double kOrderingAgreement = 1e-8;
constexpr double kProjectionResidual = 1e-8;

void RequireSquare(const ComplexMatrix &t, const char *what)
{
  if (t.rows() != t.cols())
  {
    Throw(ErrorKind::ShapeMismatch, std::string(what) + " needs a square matrix");
  }
}

void RequireSquare(const MatrixFunction &m, const char *what)
{
  if (!m.IsSquare())
  {
    Throw(ErrorKind::ShapeMismatch, std::string(what) + " needs a square matrix function");
  }
}

int RoundIntegral(Complex value, const char *what)
{
  const double rounded = std::round(value.real());
  if (std::abs(value - Complex(rounded, 0.0)) > DefaultTolerances().integrality)
  {
    Throw(ErrorKind::IntegralityViolation,
          std::string(what) + " is not integral (value " + std::to_string(value.real()) + " + " +
              std::to_string(value.imag()) + "i); ill-conditioned contour");
  }
  return static_cast<int>(rounded);
}

}  // namespace

ComplexMatrix RieszProjection(const ComplexMatrix &t, Complex z0, double eps, int nodes)
{
  RequireSquare(t, "Riesz projection");
  const Contour c(z0, eps, nodes);
  const MatrixFunction r = Resolvent(t);
  try
  {
    return -CauchyIntegral([&r](Complex z) { return r(z); }, c);
  }
  catch (const Error &e)
  {
    if (e.Kind() == ErrorKind::EvaluationAtSpectrum)
    {
      throw Error(e.Kind(), "spectrum on contour", e.Where());
    }
    throw;
  }
}

MultiplicityReport EigenMultiplicities(const ComplexMatrix &t, Complex z0, double eps, int nodes)
{
  const ComplexMatrix p = RieszProjection(t, z0, eps, nodes);
  MultiplicityReport report;
  report.location = z0;
  report.radius = eps;
  report.node_count = nodes;
  report.raw_trace = p.trace();
  const double pn = Norm2(p);
  report.projection_residual = Norm2(p * p - p) / std::max(1.0, pn * pn);
  if (report.projection_residual > kProjectionResidual)
  {
    Throw(ErrorKind::IntegralityViolation, "Riesz projection is not idempotent; ill-conditioned contour",
          z0);
  }
  report.algebraic = RoundIntegral(report.raw_trace, "trace of the Riesz projection");
  const ComplexMatrix shifted = t - z0 * Identity(t.rows());
  report.geometric = static_cast<int>(t.rows() - NumericalRank(shifted, Norm2(t)));
  return report;
}

LogDerivativeTrace LogDerivativeIndex(const MatrixFunction &m, Complex z0, double eps, int nodes)
{
  RequireSquare(m, "index");
  const Contour c(z0, eps, nodes);
  const double r = eps / 4.0;
  Complex left = 0.0;
  Complex right = 0.0;
  for (const Complex z : c.Nodes())
  {
    ComplexMatrix value;
    ComplexMatrix deriv;
    try
    {
      value = m(z);
      deriv = DerivativeAt(m, z, r);
    }
    catch (const Error &e)
    {
      throw Error(e.Kind(), std::string("contour node evaluation failed: ") + e.what(),
                  e.Where() ? e.Where() : std::optional<Complex>(z));
    }
    const ComplexMatrix inv = InverseChecked(value, z);
    const Complex weight = z - z0;
    left += weight * (deriv * inv).trace();
    right += weight * (inv * deriv).trace();
  }
  LogDerivativeTrace out;
  out.left = left / static_cast<double>(nodes);
  out.right = right / static_cast<double>(nodes);
  if (std::abs(out.left - out.right) > kOrderingAgreement)
  {
    Throw(ErrorKind::IntegralityViolation, "operator orderings of the log-derivative trace disagree",
          z0);
  }
  out.value = RoundIntegral(out.left, "log-derivative trace");
  return out;
}

int ArgumentPrincipleMultiplicity(const MatrixFunction &a, Complex z0, double eps, int nodes)
{
  return LogDerivativeIndex(a, z0, eps, nodes).value;
}

int Index(const MatrixFunction &m, Complex z0, double eps, int nodes)
{
  return LogDerivativeIndex(m, z0, eps, nodes).value;
}

int DetWindingOracle(const MatrixFunction &m, Complex z0, double eps, int nodes)
{
  RequireSquare(m, "determinant winding");
  const Contour c(z0, eps, nodes);
  std::vector<Complex> dets;
  dets.reserve(static_cast<std::size_t>(nodes));
  double largest = 0.0;
  for (const Complex z : c.Nodes())
  {
    ComplexMatrix value;
    try
    {
      value = m(z);
    }
    catch (const Error &e)
    {
      throw Error(e.Kind(), std::string("contour node evaluation failed: ") + e.what(),
                  e.Where() ? e.Where() : std::optional<Complex>(z));
    }
    dets.push_back(value.partialPivLu().determinant());
    largest = std::max(largest, std::abs(dets.back()));
  }
  if (!(largest > 0.0) || !std::isfinite(largest))
  {
    Throw(ErrorKind::ZeroOnContour, "determinant vanishes on the whole contour", z0);
  }
  // Normalize so the absolute floor measures relative smallness.
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

IndexTriple IndexAdditivityCheck(const MatrixFunction &m1, const MatrixFunction &m2, Complex z0,
                                 double eps, int nodes)
{
  IndexTriple t;
  t.first = Index(m1, z0, eps, nodes);
  t.second = Index(m2, z0, eps, nodes);
  t.product = Index(Product(m1, m2), z0, eps, nodes);
  return t;
}

double SuggestRadius(const ComplexMatrix &t, Complex z0, double cluster_tol)
{
  RequireSquare(t, "radius suggestion");
  const double d = DistanceToOthers(z0, Eigenvalues(t), cluster_tol);
  return 0.5 * d;
}

}  // namespace mero
