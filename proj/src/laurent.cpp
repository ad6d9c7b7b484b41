// SPDX-License-Identifier: Apache-2.0

#include "mero/laurent.hpp"

#include <algorithm>

#include "mero/errors.hpp"

namespace mero
{

namespace
{

constexpr double kCoefficientRel = 1e-9;

struct Samples
{
  std::vector<ComplexMatrix> values;
  double max_norm = 0.0;
};

Samples Sample(const MatrixFunction &m, const Contour &c)
{
  Samples s;
  s.values.reserve(static_cast<std::size_t>(c.NodeCount()));
  for (const Complex z : c.Nodes())
  {
    try
    {
      s.values.push_back(m(z));
    }
    catch (const Error &e)
    {
      throw Error(e.Kind(), std::string("contour node evaluation failed: ") + e.what(), z);
    }
    s.max_norm = std::max(s.max_norm, s.values.back().norm());
  }
  return s;
}

ComplexMatrix Coefficient(const Samples &s, const Contour &c, int k)
{
  ComplexMatrix sum = ComplexMatrix::Zero(s.values.front().rows(), s.values.front().cols());
  const int n = c.NodeCount();
  for (int j = 0; j < n; ++j)
  {
    sum += IntPow(c.Node(j) - c.Center(), -k) * s.values[static_cast<std::size_t>(j)];
  }
  return sum / static_cast<double>(n);
}

}  // namespace

ComplexMatrix LaurentCoefficient(const MatrixFunction &m, Complex z0, int k, const Contour &c)
{
  if (c.Center() != z0)
  {
    Throw(ErrorKind::InvalidArgument, "contour must be centered at the expansion point", z0);
  }
  return Coefficient(Sample(m, c), c, k);
}

LaurentData LaurentExpansion(const MatrixFunction &m, Complex z0, double eps, int kmin, int kmax,
                             int nodes)
{
  if (kmin > kmax)
  {
    Throw(ErrorKind::InvalidArgument, "empty coefficient range");
  }
  const Contour c(z0, eps, nodes);
  const Samples s = Sample(m, c);
  LaurentData data;
  data.center = z0;
  data.extraction_radius = eps;
  data.node_count = nodes;
  data.coefficient_tolerance = kCoefficientRel * (1.0 + s.max_norm);
  for (int k = kmin; k <= kmax; ++k)
  {
    data.coefficients.emplace(k, Coefficient(s, c, k));
  }
  for (int k = std::min(kmax, -1); k >= kmin; --k)
  {
    if (data.coefficients.at(k).norm() > data.coefficient_tolerance)
    {
      data.pole_order = -k;
    }
  }
  double principal_scale = 0.0;
  for (int k = -data.pole_order; k <= -1; ++k)
  {
    principal_scale = std::max(principal_scale, Norm2(data.coefficients.at(k)));
  }
  for (int k = -data.pole_order; k <= -1; ++k)
  {
    const ComplexMatrix &coeff = data.coefficients.at(k);
    data.principal_ranks.push_back(
        coeff.norm() > data.coefficient_tolerance ? NumericalRank(coeff, principal_scale) : 0);
  }
  return data;
}

LaurentData PrincipalPart(const MatrixFunction &m, Complex z0, double eps, int kmax, int nodes)
{
  if (kmax < 1)
  {
    Throw(ErrorKind::InvalidArgument, "kmax must be positive");
  }
  LaurentData data = LaurentExpansion(m, z0, eps, -kmax, -1, nodes);
  if (data.pole_order >= kmax)
  {
    Throw(ErrorKind::PoleOrderExceeded,
          "coefficient of order -" + std::to_string(kmax) +
              " is above tolerance (essential singularity suspected)",
          z0);
  }
  // Drop the zero coefficients below the detected pole order.
  for (auto it = data.coefficients.begin(); it != data.coefficients.end();)
  {
    it = (it->first < -data.pole_order) ? data.coefficients.erase(it) : std::next(it);
  }
  return data;
}

ComplexMatrix EvaluateSeries(const LaurentData &data, Complex z)
{
  if (data.coefficients.empty())
  {
    Throw(ErrorKind::InvalidArgument, "empty Laurent series");
  }
  const Complex w = z - data.center;
  ComplexMatrix sum = ComplexMatrix::Zero(data.coefficients.begin()->second.rows(),
                                          data.coefficients.begin()->second.cols());
  for (const auto &[k, coeff] : data.coefficients)
  {
    sum += IntPow(w, k) * coeff;
  }
  return sum;
}

MeromorphyReport IsFinitelyMeromorphicAt(const MatrixFunction &m, Complex z0, double eps, int kmax,
                                         int nodes)
{
  const LaurentData data = PrincipalPart(m, z0, eps, kmax, nodes);
  MeromorphyReport report;
  report.meromorphic_within_kmax = true;
  report.pole_order = data.pole_order;
  report.principal_ranks = data.principal_ranks;
  return report;
}

TraceSymmetry TracePrincipalPartSymmetry(const MatrixFunction &m1, const MatrixFunction &m2,
                                         const Contour &c)
{
  if (m1.Rows() != m2.Cols() || m1.Cols() != m2.Rows())
  {
    Throw(ErrorKind::ShapeMismatch, "trace symmetry needs M1 M2 and M2 M1 to be defined");
  }
  TraceSymmetry t;
  t.m1m2 = CauchyIntegral([&](Complex z) -> ComplexMatrix { return m1(z) * m2(z); }, c);
  t.m2m1 = CauchyIntegral([&](Complex z) -> ComplexMatrix { return m2(z) * m1(z); }, c);
  t.residual = std::abs(t.m1m2.trace() - t.m2m1.trace());
  return t;
}

CoefficientConvergence CoefficientErrorByNodes(const MatrixFunction &m, Complex z0, double radius,
                                               int k, const ComplexMatrix &exact,
                                               const std::vector<int> &nodes, double ratio,
                                               double floor)
{
  if (nodes.empty())
  {
    Throw(ErrorKind::InvalidArgument, "no node counts given");
  }
  CoefficientConvergence out;
  out.nodes = nodes;
  out.geometric = true;
  const double scale = std::max(1.0, exact.norm());
  for (const int n : nodes)
  {
    const ComplexMatrix c = LaurentCoefficient(m, z0, k, Contour(z0, radius, n));
    if (c.rows() != exact.rows() || c.cols() != exact.cols())
    {
      Throw(ErrorKind::ShapeMismatch, "reference coefficient has the wrong shape");
    }
    const double err = (c - exact).norm() / scale;
    if (!out.errors.empty())
    {
      const double previous = out.errors.back();
      if (previous > floor && err > floor && previous < ratio * err)
      {
        out.geometric = false;
      }
    }
    out.errors.push_back(err);
  }
  out.geometric = out.geometric && out.errors.back() <= floor;
  return out;
}

}  // namespace mero
