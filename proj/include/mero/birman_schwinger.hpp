// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "mero/contour.hpp"
#include "mero/matfun.hpp"

namespace mero
{

// Factored perturbation H = H0 + V2^* V1 with V1, V2 mapping C^n into an
// auxiliary space C^k. Construction fails with HypothesisViolated unless
// 1 is in the resolvent set of K at one of the probe points +-iR.
class FactoredPerturbation
{
public:
  FactoredPerturbation(ComplexMatrix h0, ComplexMatrix v1, ComplexMatrix v2);

  const ComplexMatrix &H0() const noexcept { return h0_; }
  const ComplexMatrix &V1() const noexcept { return v1_; }
  const ComplexMatrix &V2() const noexcept { return v2_; }
  const ComplexMatrix &H() const noexcept { return h_; }
  Eigen::Index Dim() const noexcept { return h0_.rows(); }
  Eigen::Index AuxDim() const noexcept { return v1_.rows(); }
  // A point z with z in rho(H0) and 1 in rho(K(z)).
  Complex Probe() const noexcept { return probe_; }

private:
  ComplexMatrix h0_;
  ComplexMatrix v1_;
  ComplexMatrix v2_;
  ComplexMatrix h_;
  Complex probe_;
};

// K(z) = -V1 (H0 - z)^{-1} V2^*, k x k, with derivative -V1 R0(z)^2 V2^*.
MatrixFunction BirmanSchwingerFunction(const FactoredPerturbation &p);

// z -> I - K(z).
MatrixFunction IdentityMinusK(const FactoredPerturbation &p);

// R(z) = R0 - R0 V2^* [I - K]^{-1} V1 R0. Each evaluation is compared with
// (H - z)^{-1}; a relative gap above 1e-10 throws PreconditionFailed. Throws
// BirmanSchwingerSingularity when 1 is an eigenvalue of K(z).
MatrixFunction PerturbedResolvent(const FactoredPerturbation &p);

// Relative gap ||R(z) - (H - z)^{-1}|| / ||(H - z)^{-1}|| for the formula above.
double ResolventAgreement(const FactoredPerturbation &p, Complex z);

struct SecondResolventResiduals
{
  double left = 0.0;   // R = R0 - R V2^* V1 R0
  double right = 0.0;  // R = R0 - R0 V2^* V1 R
};
SecondResolventResiduals CheckSecondResolvent(const FactoredPerturbation &p, Complex z);

struct Lemma53Residuals
{
  double k_difference = 0.0;        // K(z1) - K(z2) identity
  double inverse_difference = 0.0;  // [I - K]^{-1} identity
};
Lemma53Residuals CheckLemma53(const FactoredPerturbation &p, Complex z1, Complex z2);

// Residual of I - V1 R(z) V2^* = [I - K(z)]^{-1}.
double CheckInverseIdentity(const FactoredPerturbation &p, Complex z);

enum class CorrespondenceDirection
{
  HToK,
  KToH,
};

struct CorrespondenceResult
{
  ComplexVector vector;
  // ||K(z0) g - g|| / ||g|| or ||H f - z0 f|| / ||f||.
  double eigen_residual = 0.0;
  // H -> K only: ||g - (z0 - z1)^{-1} V1 f|| / ||g||.
  double alternative_residual = 0.0;
};

// Maps an eigenvector of H at z0 to a fixed vector of K(z0) (HToK, via the
// auxiliary point z1, default the probe) or back (KToH). Throws
// CorrespondenceDegenerate when the image is numerically zero and
// PreconditionFailed when the input is not an eigenvector.
CorrespondenceResult BsEigenvectorMap(const FactoredPerturbation &p, Complex z0,
                                      const ComplexVector &v, CorrespondenceDirection direction,
                                      std::optional<Complex> z1 = std::nullopt);

struct GeometricPair
{
  int h = 0;  // dim ker(H - z0)
  int k = 0;  // dim ker(I - K(z0))
};
GeometricPair GeometricMultiplicities(const FactoredPerturbation &p, Complex z0);

struct Theorem55Report
{
  Complex z0;
  double eps = 0.0;
  int index = 0;
  int ma_h = 0;
  int ma_h0 = 0;
  int det_winding = 0;
  // nu of I - K(.) at z0, computed when z0 lies in rho(H0) and sigma(H).
  std::optional<int> nu;
};

// Index of I - K(.) around z0 against m_a(z0; H) - m_a(z0; H0). Throws
// DiskConditionViolated when another eigenvalue of H or H0 lies within 2 eps.
Theorem55Report Theorem55Check(const FactoredPerturbation &p, Complex z0, double eps,
                               int nodes = kDefaultContourNodes);

// min(0.4 * gap, 0.5) with gap the distance to the rest of sigma(H) u sigma(H0).
double Theorem55Radius(const FactoredPerturbation &p, Complex z0);

// Distinct eigenvalues of H and H0 (clustered).
std::vector<Complex> CombinedSpectrum(const FactoredPerturbation &p);

// Clustering tolerance used for the spectra of H and H0.
double SpectrumClusterTolerance(const FactoredPerturbation &p);

}  // namespace mero
