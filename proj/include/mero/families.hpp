// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mero/birman_schwinger.hpp"
#include "mero/dual_pair.hpp"
#include "mero/matfun.hpp"

namespace mero
{

// Seeded generator for the randomized test families. The same seed gives the
// same sequence on a given standard library.
class Rng
{
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double Normal();
  Complex ComplexNormal();  // real and imaginary parts N(0, 1/2)
  double Uniform(double lo, double hi);
  int UniformInt(int lo, int hi);  // inclusive
  std::uint64_t Next() { return engine_(); }

private:
  std::mt19937_64 engine_;
};

ComplexMatrix RandomGaussian(Rng &rng, Eigen::Index rows, Eigen::Index cols);
ComplexMatrix RandomUnitary(Rng &rng, Eigen::Index n);
// U diag(s) V^H with singular values s drawn from [smin, smax].
ComplexMatrix RandomWellConditioned(Rng &rng, Eigen::Index n, double smin = 0.5,
                                    double smax = 2.0);

struct PlantedEigenvalue
{
  Complex value;
  std::vector<int> blocks;  // Jordan block sizes
  int Algebraic() const;
  int Geometric() const { return static_cast<int>(blocks.size()); }
};

struct PlantedMatrix
{
  ComplexMatrix t;
  std::vector<PlantedEigenvalue> eigenvalues;
  // Half the smallest distance between distinct planted eigenvalues.
  double separation = 0.0;
};

// S J S^{-1} with n <= max_n, Jordan blocks of size <= max_block, distinct
// eigenvalues at least `min_gap` apart inside the disk of radius 3.
PlantedMatrix RandomPlantedJordan(Rng &rng, int max_n, int max_block = 3, double min_gap = 0.5);

// Analytic member of the rational test family with known zero data at z0.
struct AnalyticMember
{
  std::string kind;  // "diagonal", "jordan", "product"
  MatrixFunction f;
  Complex z0;
  double eps = 0.0;
  int nu = 0;
  std::optional<std::vector<int>> partial_multiplicities;  // ascending
};

AnalyticMember RandomAnalyticMember(Rng &rng, int max_dim = 6);

// E1 diag((z - z0)^{k_i}) E2 with k_i of either sign; index = sum k_i.
struct MeromorphicMember
{
  MatrixFunction f;
  Complex z0;
  double eps = 0.0;
  int index = 0;
};

MeromorphicMember RandomMeromorphicMember(Rng &rng, int dim, Complex z0, int max_power = 3);

// Gaussian H0 (optionally with a planted double eigenvalue), V1, V2 of size
// k x n. With `shared` set, V1 annihilates an eigenvector of H0 so that H and
// H0 share an eigenvalue.
FactoredPerturbation RandomPerturbation(Rng &rng, int n, int k, bool shared);

// Theta with a prescribed eigenvalue z0 of A0 (a Dirichlet eigenvalue of the
// chain) also an eigenvalue of A_theta.
ComplexMatrix SharedEigenvalueTheta(Rng &rng, int n, const ComplexVector &q, Complex z0);

ComplexVector RandomPotential(Rng &rng, int n, bool complex_valued);

}  // namespace mero
