// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace mero
{

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

using namespace std::complex_literals;

// Shared numerical thresholds. The rank threshold is mutable so that a whole
// run can be tightened or relaxed from one place (see SetRankThreshold).
struct Tolerances
{
  // Singular values below rank_rel * sigma_max count as zero.
  double rank_rel = 1e-8;
  // F(z) is non-invertible when sigma_min < invert_rel * sigma_max.
  double invert_rel = 1e-12;
  // Contour traces must land this close to an integer.
  double integrality = 1e-6;
  // |h| below this absolute floor on a contour means zero/pole on contour.
  double winding_floor = 1e-14;
};

Tolerances DefaultTolerances();
void SetRankThreshold(double rank_rel);

ComplexMatrix Identity(Eigen::Index n);

// w^p by repeated squaring; exact for p = 0 and w = 0 with p > 0.
Complex IntPow(Complex w, int p);

// Spectral (2-)norm.
double Norm2(const ComplexMatrix &m);

// Rank counting singular values above rank_rel * max(sigma_max, scale).
// `scale` lets callers anchor the threshold to a reference magnitude when the
// matrix itself may be exactly zero.
Eigen::Index NumericalRank(const ComplexMatrix &m, double scale = 0.0);
Eigen::Index NumericalRank(const ComplexMatrix &m, double rank_rel, double scale);

struct RankDecision
{
  Eigen::Index rank = 0;
  double threshold = 0.0;
  // True when some singular value sits within a factor 10 of the threshold.
  bool ambiguous = false;
  Eigen::VectorXd singular_values;
  ComplexMatrix left;   // U from the SVD
  ComplexMatrix right;  // V from the SVD
};

RankDecision DecideRank(const ComplexMatrix &m, double scale = 0.0);

// Orthonormal basis of ker(m) (columns), using the shared rank threshold.
ComplexMatrix KernelBasis(const ComplexMatrix &m, double scale = 0.0);

// Orthogonal projection onto ran(m).
ComplexMatrix RangeProjection(const ComplexMatrix &m, double scale = 0.0);

// True when sigma_min >= invert_rel * sigma_max (and m is square, nonzero).
bool IsNumericallyInvertible(const ComplexMatrix &m);

// Inverse from a single LU factorization, or nullopt when m fails the
// IsNumericallyInvertible test.
std::optional<ComplexMatrix> TryInverse(const ComplexMatrix &m);

// Solves m * x = rhs. Throws NonInvertible (carrying `where`) when m fails the
// relative smallest-singular-value test.
ComplexMatrix SolveChecked(const ComplexMatrix &m, const ComplexMatrix &rhs, Complex where);
ComplexMatrix InverseChecked(const ComplexMatrix &m, Complex where);

std::vector<Complex> Eigenvalues(const ComplexMatrix &m);

// Groups eigenvalues closer than `tol` (single linkage) and returns cluster
// centroids with their sizes. Ordering is by real part, then imaginary part.
struct EigenCluster
{
  Complex center;
  int count = 0;
};
std::vector<EigenCluster> ClusterEigenvalues(const std::vector<Complex> &values, double tol);

// ||lhs - rhs||_F / max(||lhs||_F, ||rhs||_F); 0 when both are zero.
double RelativeResidual(const ComplexMatrix &lhs, const ComplexMatrix &rhs);

// Distance from z to the nearest point of `points` farther than `exclude`
// from z. Returns +inf if there is none.
double DistanceToOthers(Complex z, const std::vector<Complex> &points, double exclude);

}  // namespace mero
