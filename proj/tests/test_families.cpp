// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "helpers.hpp"
#include "mero/families.hpp"

using namespace mero;
using namespace mero::test;

TEST_CASE("rng is reproducible")
{
  Rng a(5);
  Rng b(5);
  for (int i = 0; i < 10; ++i)
  {
    CHECK(a.Next() == b.Next());
  }
  CHECK(RandomGaussian(a, 3, 3) == RandomGaussian(b, 3, 3));
}

TEST_CASE("random unitary and well-conditioned matrices")
{
  Rng rng(71);
  for (int trial = 0; trial < 20; ++trial)
  {
    const Eigen::Index n = rng.UniformInt(1, 8);
    const ComplexMatrix u = RandomUnitary(rng, n);
    CHECK(Dist(u.adjoint() * u, Identity(n)) < 1e-12);
    const Eigen::VectorXd s = Eigen::JacobiSVD<ComplexMatrix>(RandomWellConditioned(rng, n))
                                  .singularValues();
    CHECK(s.maxCoeff() <= 2.0 + 1e-12);
    CHECK(s.minCoeff() >= 0.5 - 1e-12);
  }
}

TEST_CASE("planted Jordan matrices carry their structure")
{
  Rng rng(72);
  for (int trial = 0; trial < 30; ++trial)
  {
    const PlantedMatrix pm = RandomPlantedJordan(rng, 12);
    int total = 0;
    for (const PlantedEigenvalue &e : pm.eigenvalues)
    {
      CHECK(std::abs(e.value) <= 3.0);
      CHECK(std::is_sorted(e.blocks.begin(), e.blocks.end()));
      CHECK_FALSE(e.blocks.empty());
      total += e.Algebraic();
      const Eigen::Index n = pm.t.rows();
      CHECK(n - NumericalRank(pm.t - e.value * Identity(n), Norm2(pm.t)) == e.Geometric());
    }
    CHECK(total == pm.t.rows());
    CHECK(pm.t.rows() <= 12);
  }
}

TEST_CASE("shared perturbations keep an eigenvalue of H0")
{
  Rng rng(73);
  for (int trial = 0; trial < 20; ++trial)
  {
    const int n = rng.UniformInt(2, 8);
    const FactoredPerturbation p = RandomPerturbation(rng, n, rng.UniformInt(1, 4), true);
    bool shared = false;
    for (const Complex &a : Eigenvalues(p.H0()))
    {
      for (const Complex &b : Eigenvalues(p.H()))
      {
        shared = shared || std::abs(a - b) < 1e-8;
      }
    }
    CHECK(shared);
  }
}

TEST_CASE("shared-eigenvalue theta plants z0 in the spectrum of A_theta")
{
  Rng rng(74);
  for (int trial = 0; trial < 20; ++trial)
  {
    const int n = rng.UniformInt(1, 8);
    const ComplexVector q = RandomPotential(rng, n, true);
    const DualPairTriple t = DiscreteSchrodingerDualPair(n, q);
    const Complex z0 = Eigenvalues(AsMatrix(RestrictA0(t))).front();
    const ComplexMatrix theta = SharedEigenvalueTheta(rng, n, q, z0);
    const ComplexMatrix at = AsMatrix(RestrictATheta(t, theta));
    double nearest = INFINITY;
    for (const Complex &v : Eigenvalues(at))
    {
      nearest = std::min(nearest, std::abs(v - z0));
    }
    CHECK(nearest < 1e-8);
  }
}
