// SPDX-License-Identifier: Apache-2.0

#include "mero/contour.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "mero/errors.hpp"

namespace mero
{

Contour::Contour(Complex center, double radius, int nodes) : center_(center), radius_(radius)
{
  if (!(radius > 0.0) || !std::isfinite(radius))
  {
    Throw(ErrorKind::InvalidArgument, "contour radius must be positive");
  }
  if (nodes < kMinContourNodes)
  {
    std::ostringstream os;
    os << "contour needs at least " << kMinContourNodes << " nodes, got " << nodes;
    Throw(ErrorKind::InvalidArgument, os.str());
  }
  nodes_.reserve(static_cast<std::size_t>(nodes));
  for (int j = 0; j < nodes; ++j)
  {
    const double theta = 2.0 * std::numbers::pi * j / nodes;
    // Exact values at the quarter points keep symmetric cases exact.
    Complex e;
    if (4 * j % nodes == 0)
    {
      static constexpr Complex quarter[4] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
      e = quarter[(4 * j / nodes) % 4];
    }
    else
    {
      e = {std::cos(theta), std::sin(theta)};
    }
    nodes_.push_back(center + radius * e);
  }
}

Contour MakeCircle(Complex center, double radius, int nodes)
{
  return Contour(center, radius, nodes);
}

namespace
{

template <typename F>
auto EvaluateAtNode(const F &f, Complex z)
{
  try
  {
    return f(z);
  }
  catch (const Error &e)
  {
    if (e.Where())
    {
      throw;
    }
    throw Error(e.Kind(), std::string("contour node evaluation failed: ") + e.what(), z);
  }
}

}  // namespace

ComplexMatrix CauchyIntegral(const MatrixIntegrand &f, const Contour &c)
{
  ComplexMatrix sum;
  const int n = c.NodeCount();
  for (int j = 0; j < n; ++j)
  {
    const Complex z = c.Node(j);
    ComplexMatrix v = EvaluateAtNode(f, z);
    if (j == 0)
    {
      sum = ComplexMatrix::Zero(v.rows(), v.cols());
    }
    else if (v.rows() != sum.rows() || v.cols() != sum.cols())
    {
      Throw(ErrorKind::ShapeMismatch, "integrand changed shape along the contour", z);
    }
    sum += v * (z - c.Center());
  }
  return sum / static_cast<double>(n);
}

Complex CauchyIntegralScalar(const ScalarIntegrand &f, const Contour &c)
{
  Complex sum = 0.0;
  const int n = c.NodeCount();
  for (int j = 0; j < n; ++j)
  {
    const Complex z = c.Node(j);
    sum += EvaluateAtNode(f, z) * (z - c.Center());
  }
  return sum / static_cast<double>(n);
}

int WindingOfSamples(std::span<const Complex> samples, double floor)
{
  const std::size_t n = samples.size();
  for (std::size_t j = 0; j < n; ++j)
  {
    if (!(std::abs(samples[j]) >= floor) || !std::isfinite(std::abs(samples[j])))
    {
      Throw(ErrorKind::ZeroOnContour, "|h| below floor at node " + std::to_string(j));
    }
  }
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j)
  {
    const Complex a = samples[j];
    const Complex b = samples[(j + 1) % n];
    // arg(b / a) without forming the quotient explicitly.
    const double step = std::arg(b * std::conj(a));
    if (std::abs(step) > std::numbers::pi / 2)
    {
      Throw(ErrorKind::UnderResolvedContour,
            "phase jump " + std::to_string(step) + " between nodes " + std::to_string(j) +
                " and " + std::to_string((j + 1) % n));
    }
    total += step;
  }
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

int ScalarWinding(const ScalarIntegrand &h, const Contour &c)
{
  return ScalarWinding(h, c, DefaultTolerances().winding_floor);
}

int ScalarWinding(const ScalarIntegrand &h, const Contour &c, double floor)
{
  std::vector<Complex> samples;
  samples.reserve(static_cast<std::size_t>(c.NodeCount()));
  for (const Complex z : c.Nodes())
  {
    samples.push_back(EvaluateAtNode(h, z));
  }
  try
  {
    return WindingOfSamples(samples, floor);
  }
  catch (const Error &e)
  {
    // Report the contour location for zero/pole detection.
    if (e.Kind() == ErrorKind::ZeroOnContour)
    {
      for (std::size_t j = 0; j < samples.size(); ++j)
      {
        if (!(std::abs(samples[j]) >= floor))
        {
          throw Error(e.Kind(), "|h| below floor", c.Node(static_cast<int>(j)));
        }
      }
    }
    throw;
  }
}

}  // namespace mero
