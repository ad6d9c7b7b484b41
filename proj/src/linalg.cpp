// SPDX-License-Identifier: Apache-2.0

#include "mero/linalg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>

#include "mero/errors.hpp"

namespace mero
{

namespace
{

std::atomic<double> g_rank_rel{1e-8};

Eigen::JacobiSVD<ComplexMatrix> Svd(const ComplexMatrix &m, bool vectors)
{
  const unsigned options = vectors ? (Eigen::ComputeFullU | Eigen::ComputeFullV) : 0u;
  return Eigen::JacobiSVD<ComplexMatrix>(m, options);
}

}  // namespace

Tolerances DefaultTolerances()
{
  Tolerances t;
  t.rank_rel = g_rank_rel.load(std::memory_order_relaxed);
  return t;
}

void SetRankThreshold(double rank_rel)
{
  if (!(rank_rel > 0.0 && rank_rel < 1.0))
  {
    Throw(ErrorKind::InvalidArgument, "rank threshold must lie in (0, 1)");
  }
  g_rank_rel.store(rank_rel, std::memory_order_relaxed);
}

ComplexMatrix Identity(Eigen::Index n)
{
  return ComplexMatrix::Identity(n, n);
}

Complex IntPow(Complex w, int p)
{
  if (p < 0)
  {
    return 1.0 / IntPow(w, -p);
  }
  Complex result = 1.0;
  Complex base = w;
  while (p > 0)
  {
    if (p & 1)
    {
      result *= base;
    }
    base *= base;
    p >>= 1;
  }
  return result;
}

double Norm2(const ComplexMatrix &m)
{
  if (m.size() == 0)
  {
    return 0.0;
  }
  return Svd(m, false).singularValues()(0);
}

Eigen::Index NumericalRank(const ComplexMatrix &m, double scale)
{
  return NumericalRank(m, DefaultTolerances().rank_rel, scale);
}

Eigen::Index NumericalRank(const ComplexMatrix &m, double rank_rel, double scale)
{
  if (m.size() == 0)
  {
    return 0;
  }
  const Eigen::VectorXd s = Svd(m, false).singularValues();
  const double threshold = rank_rel * std::max(s(0), scale);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
  {
    if (s(i) > threshold)
    {
      ++r;
    }
  }
  return r;
}

RankDecision DecideRank(const ComplexMatrix &m, double scale)
{
  RankDecision d;
  auto svd = Svd(m, true);
  d.singular_values = svd.singularValues();
  d.left = svd.matrixU();
  d.right = svd.matrixV();
  const double smax = d.singular_values.size() ? d.singular_values(0) : 0.0;
  d.threshold = DefaultTolerances().rank_rel * std::max(smax, scale);
  for (Eigen::Index i = 0; i < d.singular_values.size(); ++i)
  {
    const double s = d.singular_values(i);
    if (s > d.threshold)
    {
      ++d.rank;
    }
    if (s > 0.1 * d.threshold && s < 10.0 * d.threshold)
    {
      d.ambiguous = true;
    }
  }
  return d;
}

ComplexMatrix KernelBasis(const ComplexMatrix &m, double scale)
{
  const RankDecision d = DecideRank(m, scale);
  const Eigen::Index n = m.cols();
  return d.right.rightCols(n - d.rank);
}

ComplexMatrix RangeProjection(const ComplexMatrix &m, double scale)
{
  const RankDecision d = DecideRank(m, scale);
  const ComplexMatrix u = d.left.leftCols(d.rank);
  return u * u.adjoint();
}

bool IsNumericallyInvertible(const ComplexMatrix &m)
{
  if (m.rows() != m.cols() || m.size() == 0)
  {
    return false;
  }
  if (!m.allFinite())
  {
    return false;
  }
  // rcond() is a cheap 1-norm estimate; only fall back to the SVD when it is
  // not comfortably above the singular-value threshold.
  Eigen::PartialPivLU<ComplexMatrix> lu(m);
  if (lu.rcond() > 1e-8)
  {
    return true;
  }
  const Eigen::VectorXd s = Svd(m, false).singularValues();
  const double smax = s(0);
  return smax > 0.0 && s(s.size() - 1) >= DefaultTolerances().invert_rel * smax;
}

std::optional<ComplexMatrix> TryInverse(const ComplexMatrix &m)
{
  if (m.rows() != m.cols() || m.size() == 0 || !m.allFinite())
  {
    return std::nullopt;
  }
  const Eigen::PartialPivLU<ComplexMatrix> lu(m);
  if (lu.rcond() <= 1e-8 && !IsNumericallyInvertible(m))
  {
    return std::nullopt;
  }
  return lu.inverse();
}

ComplexMatrix SolveChecked(const ComplexMatrix &m, const ComplexMatrix &rhs, Complex where)
{
  if (m.rows() != m.cols() || m.rows() != rhs.rows())
  {
    Throw(ErrorKind::ShapeMismatch, "SolveChecked", where);
  }
  if (m.size() == 0 || !m.allFinite())
  {
    Throw(ErrorKind::NonInvertible, "non-invertible at z", where);
  }
  const Eigen::PartialPivLU<ComplexMatrix> lu(m);
  if (lu.rcond() <= 1e-8 && !IsNumericallyInvertible(m))
  {
    Throw(ErrorKind::NonInvertible, "non-invertible at z", where);
  }
  return lu.solve(rhs);
}

ComplexMatrix InverseChecked(const ComplexMatrix &m, Complex where)
{
  return SolveChecked(m, Identity(m.rows()), where);
}

std::vector<Complex> Eigenvalues(const ComplexMatrix &m)
{
  if (m.rows() != m.cols())
  {
    Throw(ErrorKind::ShapeMismatch, "eigenvalues of a non-square matrix");
  }
  if (m.size() == 0)
  {
    return {};
  }
  Eigen::ComplexEigenSolver<ComplexMatrix> es(m, false);
  if (es.info() != Eigen::Success)
  {
    Throw(ErrorKind::PreconditionFailed, "eigenvalue iteration did not converge");
  }
  const ComplexVector ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

std::vector<EigenCluster> ClusterEigenvalues(const std::vector<Complex> &values, double tol)
{
  const std::size_t n = values.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i)
    {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  };
  for (std::size_t i = 0; i < n; ++i)
  {
    for (std::size_t j = i + 1; j < n; ++j)
    {
      if (std::abs(values[i] - values[j]) <= tol)
      {
        parent[find(i)] = find(j);
      }
    }
  }
  std::vector<EigenCluster> clusters;
  std::vector<std::size_t> root_of_cluster;
  for (std::size_t i = 0; i < n; ++i)
  {
    const std::size_t r = find(i);
    auto it = std::find(root_of_cluster.begin(), root_of_cluster.end(), r);
    if (it == root_of_cluster.end())
    {
      root_of_cluster.push_back(r);
      clusters.push_back({values[i], 1});
    }
    else
    {
      auto &c = clusters[static_cast<std::size_t>(it - root_of_cluster.begin())];
      c.center += values[i];
      ++c.count;
    }
  }
  for (auto &c : clusters)
  {
    c.center /= static_cast<double>(c.count);
  }
  std::sort(clusters.begin(), clusters.end(), [](const EigenCluster &a, const EigenCluster &b) {
    if (a.center.real() != b.center.real())
    {
      return a.center.real() < b.center.real();
    }
    return a.center.imag() < b.center.imag();
  });
  return clusters;
}

double RelativeResidual(const ComplexMatrix &lhs, const ComplexMatrix &rhs)
{
  if (lhs.rows() != rhs.rows() || lhs.cols() != rhs.cols())
  {
    Throw(ErrorKind::ShapeMismatch, "residual of matrices with different shapes");
  }
  const double denom = std::max(lhs.norm(), rhs.norm());
  if (denom == 0.0)
  {
    return 0.0;
  }
  return (lhs - rhs).norm() / denom;
}

double DistanceToOthers(Complex z, const std::vector<Complex> &points, double exclude)
{
  double best = std::numeric_limits<double>::infinity();
  for (const Complex &p : points)
  {
    const double d = std::abs(p - z);
    if (d > exclude)
    {
      best = std::min(best, d);
    }
  }
  return best;
}

}  // namespace mero
