// SPDX-License-Identifier: Apache-2.0

#include "mero/families.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mero/errors.hpp"

namespace mero
{

double Rng::Normal()
{
  return std::normal_distribution<double>(0.0, 1.0)(engine_);
}

Complex Rng::ComplexNormal()
{
  const double re = Normal();
  const double im = Normal();
  return Complex(re, im) / std::sqrt(2.0);
}

double Rng::Uniform(double lo, double hi)
{
  return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

int Rng::UniformInt(int lo, int hi)
{
  return std::uniform_int_distribution<int>(lo, hi)(engine_);
}

ComplexMatrix RandomGaussian(Rng &rng, Eigen::Index rows, Eigen::Index cols)
{
  ComplexMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
  {
    for (Eigen::Index i = 0; i < rows; ++i)
    {
      m(i, j) = rng.ComplexNormal();
    }
  }
  return m;
}

ComplexMatrix RandomUnitary(Rng &rng, Eigen::Index n)
{
  const ComplexMatrix g = RandomGaussian(rng, n, n);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, n);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < n; ++i)
  {
    const double a = std::abs(r(i, i));
    if (a > 0.0)
    {
      q.col(i) *= r(i, i) / a;
    }
  }
  return q;
}

ComplexMatrix RandomWellConditioned(Rng &rng, Eigen::Index n, double smin, double smax)
{
  const ComplexMatrix u = RandomUnitary(rng, n);
  const ComplexMatrix v = RandomUnitary(rng, n);
  Eigen::VectorXcd s(n);
  for (Eigen::Index i = 0; i < n; ++i)
  {
    s(i) = rng.Uniform(smin, smax);
  }
  return u * s.asDiagonal() * v.adjoint();
}

int PlantedEigenvalue::Algebraic() const
{
  return std::accumulate(blocks.begin(), blocks.end(), 0);
}

namespace
{

Complex PointInDisk(Rng &rng, double radius)
{
  const double r = radius * std::sqrt(rng.Uniform(0.0, 1.0));
  const double a = rng.Uniform(0.0, 2.0 * M_PI);
  return std::polar(r, a);
}

std::vector<Complex> SeparatedPoints(Rng &rng, int count, double radius, double min_gap)
{
  std::vector<Complex> pts;
  while (static_cast<int>(pts.size()) < count)
  {
    const Complex c = PointInDisk(rng, radius);
    bool ok = true;
    for (const Complex &p : pts)
    {
      ok = ok && std::abs(p - c) >= min_gap;
    }
    if (ok)
    {
      pts.push_back(c);
    }
  }
  return pts;
}

}  // namespace

PlantedMatrix RandomPlantedJordan(Rng &rng, int max_n, int max_block, double min_gap)
{
  if (max_n < 1 || max_block < 1)
  {
    Throw(ErrorKind::InvalidArgument, "planted matrix needs positive sizes");
  }
  const int n = rng.UniformInt(1, max_n);
  // Split n into blocks, then group blocks under distinct eigenvalues.
  std::vector<int> blocks;
  int left = n;
  while (left > 0)
  {
    const int b = rng.UniformInt(1, std::min(max_block, left));
    blocks.push_back(b);
    left -= b;
  }
  const int distinct = rng.UniformInt(1, static_cast<int>(blocks.size()));
  const std::vector<Complex> values = SeparatedPoints(rng, distinct, 3.0, min_gap);
  PlantedMatrix out;
  for (const Complex &v : values)
  {
    out.eigenvalues.push_back({v, {}});
  }
  for (std::size_t i = 0; i < blocks.size(); ++i)
  {
    const std::size_t owner = i < values.size()
                                  ? i
                                  : static_cast<std::size_t>(rng.UniformInt(0, distinct - 1));
    out.eigenvalues[owner].blocks.push_back(blocks[i]);
  }
  ComplexMatrix j = ComplexMatrix::Zero(n, n);
  Eigen::Index pos = 0;
  for (const PlantedEigenvalue &e : out.eigenvalues)
  {
    for (const int b : e.blocks)
    {
      for (int i = 0; i < b; ++i)
      {
        j(pos + i, pos + i) = e.value;
        if (i + 1 < b)
        {
          j(pos + i, pos + i + 1) = 1.0;
        }
      }
      pos += b;
    }
  }
  for (PlantedEigenvalue &e : out.eigenvalues)
  {
    std::sort(e.blocks.begin(), e.blocks.end());
  }
  const ComplexMatrix s = RandomWellConditioned(rng, n);
  out.t = s * j * s.inverse();
  double gap = INFINITY;
  for (std::size_t a = 0; a < values.size(); ++a)
  {
    for (std::size_t b = a + 1; b < values.size(); ++b)
    {
      gap = std::min(gap, std::abs(values[a] - values[b]));
    }
  }
  out.separation = std::isfinite(gap) ? 0.5 * gap : 1.0;
  return out;
}

namespace
{

// E1 diag((z - z0)^k) E2(z), E2(z) = E2 + 0.1 (z - z0) S analytic and
// invertible for |z - z0| < 2.5.
MatrixFunction DiagonalMember(Rng &rng, const std::vector<int> &powers, Complex z0,
                              bool analytic_right)
{
  const auto d = static_cast<Eigen::Index>(powers.size());
  const ComplexMatrix e1 = RandomWellConditioned(rng, d);
  const ComplexMatrix e2 = RandomWellConditioned(rng, d);
  MatrixFunction right = Constant(e2);
  if (analytic_right)
  {
    const ComplexMatrix s = 0.1 * RandomWellConditioned(rng, d);
    right = FromPencil(e2 - z0 * s, -s);
  }
  return Product(Product(Constant(e1), DiagonalPowers(powers, z0)), right);
}

}  // namespace

AnalyticMember RandomAnalyticMember(Rng &rng, int max_dim)
{
  const int kind = rng.UniformInt(0, 2);
  if (kind == 1)
  {
    const PlantedMatrix pm = RandomPlantedJordan(rng, max_dim);
    const int pick = rng.UniformInt(0, static_cast<int>(pm.eigenvalues.size()) - 1);
    const PlantedEigenvalue &e = pm.eigenvalues[static_cast<std::size_t>(pick)];
    const Eigen::Index n = pm.t.rows();
    return AnalyticMember{"jordan",
                          FromPencil(pm.t, ComplexMatrix::Identity(n, n)),
                          e.value,
                          std::min(0.8 * pm.separation, 0.5),
                          e.Algebraic(),
                          e.blocks};
  }
  const Complex z0 = PointInDisk(rng, 1.0);
  const auto random_powers = [&](int d) {
    std::vector<int> p(static_cast<std::size_t>(d));
    for (int &v : p)
    {
      v = rng.UniformInt(0, 2);
    }
    if (std::all_of(p.begin(), p.end(), [](int v) { return v == 0; }))
    {
      p[static_cast<std::size_t>(rng.UniformInt(0, d - 1))] = 1;
    }
    return p;
  };
  const int d = rng.UniformInt(1, std::max(1, std::min(max_dim, 4)));
  const std::vector<int> p1 = random_powers(d);
  const int nu1 = std::accumulate(p1.begin(), p1.end(), 0);
  if (kind == 0)
  {
    std::vector<int> partial;
    for (const int v : p1)
    {
      if (v > 0)
      {
        partial.push_back(v);
      }
    }
    std::sort(partial.begin(), partial.end());
    return AnalyticMember{"diagonal", DiagonalMember(rng, p1, z0, true), z0, 0.5, nu1, partial};
  }
  std::vector<int> p2(static_cast<std::size_t>(d), 0);
  p2[static_cast<std::size_t>(rng.UniformInt(0, d - 1))] = 1;
  const MatrixFunction left = DiagonalMember(rng, p1, z0, true);
  const MatrixFunction right = DiagonalMember(rng, p2, z0, false);
  const MatrixFunction f = Product(left, right);
  return AnalyticMember{"product", f, z0, 0.5, nu1 + 1, std::nullopt};
}

MeromorphicMember RandomMeromorphicMember(Rng &rng, int dim, Complex z0, int max_power)
{
  std::vector<int> powers(static_cast<std::size_t>(dim));
  for (int &v : powers)
  {
    v = rng.UniformInt(-max_power, max_power);
  }
  const int index = std::accumulate(powers.begin(), powers.end(), 0);
  return MeromorphicMember{DiagonalMember(rng, powers, z0, false), z0, 0.5, index};
}

FactoredPerturbation RandomPerturbation(Rng &rng, int n, int k, bool shared)
{
  ComplexMatrix h0;
  ComplexMatrix v1 = RandomGaussian(rng, k, n);
  const ComplexMatrix v2 = RandomGaussian(rng, k, n);
  if (!shared)
  {
    h0 = RandomGaussian(rng, n, n);
  }
  else
  {
    std::vector<Complex> values = SeparatedPoints(rng, n, 3.0, 0.3);
    if (n >= 3 && rng.UniformInt(0, 1) == 1)
    {
      values[1] = values[0];  // planted semisimple double eigenvalue
    }
    const ComplexMatrix s = RandomWellConditioned(rng, n);
    Eigen::VectorXcd lambda(n);
    for (int i = 0; i < n; ++i)
    {
      lambda(i) = values[static_cast<std::size_t>(i)];
    }
    h0 = s * lambda.asDiagonal() * s.inverse();
    const ComplexVector e = s.col(0);
    v1 = v1 * (ComplexMatrix::Identity(n, n) - e * e.adjoint() / e.squaredNorm());
  }
  return FactoredPerturbation(h0, v1, v2);
}

ComplexMatrix SharedEigenvalueTheta(Rng &rng, int n, const ComplexVector &q, Complex z0)
{
  // Solution of the interior equations with u_0 = u_1 = 1. It is independent
  // of the Dirichlet eigenvector (u_0 = 0) and has a nonzero interior part.
  std::vector<Complex> u(static_cast<std::size_t>(n + 2));
  u[0] = 1.0;
  u[1] = 1.0;
  for (int k = 1; k <= n; ++k)
  {
    const auto kk = static_cast<std::size_t>(k);
    u[kk + 1] = (2.0 + q(k - 1) - z0) * u[kk] - u[kk - 1];
  }
  ComplexVector x(2);
  x << u[0], u[static_cast<std::size_t>(n + 1)];
  ComplexVector y(2);
  y << u[1] - u[0], u[static_cast<std::size_t>(n)] - u[static_cast<std::size_t>(n + 1)];
  const double xx = x.squaredNorm();
  const ComplexMatrix proj = x * x.adjoint() / xx;
  return y * x.adjoint() / xx + RandomGaussian(rng, 2, 2) * (ComplexMatrix::Identity(2, 2) - proj);
}

ComplexVector RandomPotential(Rng &rng, int n, bool complex_valued)
{
  ComplexVector q(n);
  for (int i = 0; i < n; ++i)
  {
    const double re = rng.Uniform(-1.0, 1.0);
    const double im = complex_valued ? rng.Uniform(-1.0, 1.0) : 0.0;
    q(i) = Complex(re, im);
  }
  return q;
}

}  // namespace mero
