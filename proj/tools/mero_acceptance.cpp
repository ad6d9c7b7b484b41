// SPDX-License-Identifier: Apache-2.0
//
// Acceptance run: one PASS/FAIL line per criterion. Usage:
//   mero_acceptance <mero_cli> <configs_dir> <scratch_dir>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "mero/birman_schwinger.hpp"
#include "mero/dual_pair.hpp"
#include "mero/factorize.hpp"
#include "mero/families.hpp"
#include "mero/laurent.hpp"
#include "mero/spectra.hpp"

using namespace mero;
namespace fs = std::filesystem;

namespace
{

// Pinned tolerances.
constexpr double kIdentityTol = 1e-10;
constexpr double kGreenTol = 1e-12;
constexpr double kReconstructionTol = 1e-8;
constexpr double kCorrespondenceTol = 1e-8;
constexpr double kDecayRatio = 1e3;
constexpr double kDecayFloor = 1e-12;

struct Outcome
{
  bool pass = true;
  std::ostringstream detail;
  int failures = 0;
  std::string first_failure;

  void Fail(const std::string &what)
  {
    pass = false;
    if (failures++ == 0)
    {
      first_failure = what;
    }
  }
};

int g_failed = 0;

void Criterion(int number, const std::string &title, double limit_s,
               const std::function<void(Outcome &)> &body)
{
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  try
  {
    body(out);
  }
  catch (const std::exception &e)
  {
    out.Fail(std::string("exception: ") + e.what());
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (limit_s > 0.0 && seconds >= limit_s)
  {
    out.Fail("runtime limit exceeded");
  }
  std::printf("[%s] %2d %s: %s; %.2f s", out.pass ? "PASS" : "FAIL", number, title.c_str(),
              out.detail.str().c_str(), seconds);
  if (limit_s > 0.0)
  {
    std::printf(" (limit %.0f s)", limit_s);
  }
  if (!out.pass)
  {
    std::printf("; %d failures, first: %s", out.failures, out.first_failure.c_str());
    ++g_failed;
  }
  std::printf("\n");
  std::fflush(stdout);
}

double ReconstructionGap(const HowlandFactorization &f, const MatrixFunction &a, Complex z0,
                         double radius)
{
  double worst = 0.0;
  for (int s = 0; s < 10; ++s)
  {
    const Complex z = z0 + std::polar(radius, 2.0 * M_PI * s / 10.0);
    worst = std::max(worst, RelativeResidual(Reconstruct(f, z), a(z)));
  }
  return worst;
}

std::string Str(Complex z)
{
  std::ostringstream os;
  os << z;
  return os.str();
}

void ArgumentPrincipleVsRiesz(Outcome &out)
{
  Rng rng(1001);
  int eigenvalues = 0;
  for (int i = 0; i < 100; ++i)
  {
    const PlantedMatrix pm = RandomPlantedJordan(rng, 12);
    const MatrixFunction pencil = FromPencil(pm.t, Identity(pm.t.rows()));
    for (const PlantedEigenvalue &e : pm.eigenvalues)
    {
      ++eigenvalues;
      const MultiplicityReport r = EigenMultiplicities(pm.t, e.value, pm.separation);
      const int ap = ArgumentPrincipleMultiplicity(pencil, e.value, pm.separation);
      if (ap != r.algebraic || r.algebraic != e.Algebraic())
      {
        out.Fail("matrix " + std::to_string(i) + " at " + Str(e.value));
      }
    }
  }
  out.detail << "100 matrices, " << eigenvalues << " eigenvalues, exact agreement";
}

void MultiplicityEqualsNu(Outcome &out)
{
  Rng rng(1002);
  std::map<std::string, int> kinds;
  for (int i = 0; i < 50; ++i)
  {
    const AnalyticMember am = RandomAnalyticMember(rng, 6);
    ++kinds[am.kind];
    const int howland = HowlandFactorize(am.f, am.z0).nu;
    const int block = NuViaBlockDeterminantShrinking(am.f, am.z0, am.eps);
    const int ap = ArgumentPrincipleMultiplicity(am.f, am.z0, am.eps);
    const int det = DetWindingOracle(am.f, am.z0, am.eps);
    if (howland != am.nu || block != am.nu || ap != am.nu || det != am.nu)
    {
      out.Fail("member " + std::to_string(i) + " (" + am.kind + ")");
    }
  }
  out.detail << "50 members (";
  for (const auto &[k, v] : kinds)
  {
    out.detail << k << " " << v << (k == kinds.rbegin()->first ? "" : ", ");
  }
  out.detail << "), howland = block = argument principle = det winding";
}

void FactorizationStructure(Outcome &out)
{
  Rng rng(1003);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i)
  {
    const AnalyticMember am = RandomAnalyticMember(rng, 6);
    const HowlandFactorization f = HowlandFactorize(am.f, am.z0);
    const std::string id = "member " + std::to_string(i);
    for (const double radius : {am.eps / 2.0, am.eps / 4.0})
    {
      const double gap = ReconstructionGap(f, am.f, am.z0, radius);
      worst = std::max(worst, gap);
      if (!(gap <= kReconstructionTol))
      {
        out.Fail(id + " reconstruction");
      }
    }
    for (std::size_t j = 1; j < f.steps.size(); ++j)
    {
      if (f.steps[j].rank > f.steps[j - 1].rank)
      {
        out.Fail(id + " p-sequence");
      }
    }
    const ComplexMatrix a0 = am.f(am.z0);
    const double scale = Norm2(a0) + Norm2(DerivativeAt(am.f, am.z0, am.eps / 2.0));
    const int kernel = static_cast<int>(a0.cols() - NumericalRank(a0, scale));
    if (f.steps.empty() || f.steps.front().rank != kernel)
    {
      out.Fail(id + " p1");
    }
    if (SimplePoleCriterion(f, am.f) != (f.n0 == 1))
    {
      out.Fail(id + " simple pole");
    }
  }
  out.detail << "50 members, worst reconstruction " << worst << " (tol " << kReconstructionTol
             << "), p monotone, p1 = dim ker, simple-pole criterion";
}

void IndexAlgebra(Outcome &out)
{
  Rng rng(1004);
  for (int i = 0; i < 100; ++i)
  {
    const Complex z0 = rng.ComplexNormal();
    const MeromorphicMember a = RandomMeromorphicMember(rng, 3, z0);
    const MeromorphicMember b = RandomMeromorphicMember(rng, 3, z0);
    const IndexTriple t = IndexAdditivityCheck(a.f, b.f, z0, 0.5);
    const int inv = Index(Inverse(a.f), z0, 0.5);
    if (t.first != a.index || t.second != b.index || t.product != t.first + t.second ||
        inv != -t.first)
    {
      out.Fail("pair " + std::to_string(i));
    }
  }
  out.detail << "100 pairs, additivity and inverse negation exact";
}

std::vector<FactoredPerturbation> PerturbationInstances()
{
  Rng rng(1005);
  std::vector<FactoredPerturbation> out;
  for (int i = 0; i < 200; ++i)
  {
    const int n = rng.UniformInt(2, 12);
    const int k = rng.UniformInt(1, 4);
    out.push_back(RandomPerturbation(rng, n, k, i % 3 == 0));
  }
  return out;
}

void BirmanSchwingerIndex(Outcome &out, const std::vector<FactoredPerturbation> &instances)
{
  int points = 0;
  int shared = 0;
  int resolvent_h = 0;
  int regular_h0 = 0;
  for (std::size_t i = 0; i < instances.size(); ++i)
  {
    const FactoredPerturbation &p = instances[i];
    int total_h = 0;
    int total_h0 = 0;
    for (const Complex z0 : CombinedSpectrum(p))
    {
      ++points;
      const Theorem55Report r = Theorem55Check(p, z0, Theorem55Radius(p, z0));
      if (r.index != r.ma_h - r.ma_h0 || r.det_winding != r.index || (r.nu && *r.nu != r.index))
      {
        out.Fail("instance " + std::to_string(i) + " at " + Str(z0));
      }
      shared += (r.ma_h > 0 && r.ma_h0 > 0) ? 1 : 0;
      resolvent_h += r.ma_h == 0 ? 1 : 0;
      regular_h0 += r.ma_h0 == 0 ? 1 : 0;
      total_h += r.ma_h;
      total_h0 += r.ma_h0;
    }
    // Eigendecomposition oracle: the multiplicities exhaust both spectra.
    if (total_h != p.Dim() || total_h0 != p.Dim())
    {
      out.Fail("instance " + std::to_string(i) + " multiplicities do not sum to n");
    }
  }
  if (shared == 0 || resolvent_h == 0 || regular_h0 == 0)
  {
    out.Fail("a case family is empty");
  }
  out.detail << instances.size() << " instances, " << points << " points (" << shared
             << " shared, " << resolvent_h << " in rho(H), " << regular_h0
             << " in rho(H0)), exact";
}

void BirmanSchwingerIdentities(Outcome &out, const std::vector<FactoredPerturbation> &instances)
{
  Rng rng(1006);
  double worst = 0.0;
  int maps = 0;
  int geometric = 0;
  const auto below = [&](double v, double tol, const std::string &what) {
    worst = std::max(worst, tol == kIdentityTol ? v : 0.0);
    if (!(v <= tol))
    {
      out.Fail(what);
    }
  };
  for (std::size_t i = 0; i < instances.size(); ++i)
  {
    const FactoredPerturbation &p = instances[i];
    const std::string id = "instance " + std::to_string(i);
    const Complex z1 = p.Probe() * rng.Uniform(0.5, 1.0) + rng.ComplexNormal();
    const Complex z2 = p.Probe() * rng.Uniform(0.5, 1.0) + rng.ComplexNormal();
    const SecondResolventResiduals s = CheckSecondResolvent(p, z1);
    below(s.left, kIdentityTol, id + " 5.9 left");
    below(s.right, kIdentityTol, id + " 5.9 right");
    below(CheckInverseIdentity(p, z1), kIdentityTol, id + " 5.10f");
    const Lemma53Residuals l = CheckLemma53(p, z1, z2);
    below(l.k_difference, kIdentityTol, id + " 5.11");
    below(l.inverse_difference, kIdentityTol, id + " 5.12");

    const Eigen::Index n = p.Dim();
    const std::vector<Complex> h0_spec = Eigenvalues(p.H0());
    for (const EigenCluster &c :
         ClusterEigenvalues(Eigenvalues(p.H()), SpectrumClusterTolerance(p)))
    {
      if (DistanceToOthers(c.center, h0_spec, -1.0) < 1e-3)
      {
        continue;
      }
      const GeometricPair gp = GeometricMultiplicities(p, c.center);
      ++geometric;
      if (gp.h != gp.k)
      {
        out.Fail(id + " 5.18 at " + Str(c.center));
      }
      if (c.count != 1 || gp.h != 1)
      {
        continue;
      }
      const ComplexMatrix kernel = KernelBasis(p.H() - c.center * Identity(n), Norm2(p.H()));
      const ComplexVector f = kernel.col(0);
      const CorrespondenceResult g =
          BsEigenvectorMap(p, c.center, f, CorrespondenceDirection::HToK);
      const CorrespondenceResult back =
          BsEigenvectorMap(p, c.center, g.vector, CorrespondenceDirection::KToH);
      const Complex coef = f.dot(back.vector) / f.squaredNorm();
      ++maps;
      below(g.eigen_residual, kCorrespondenceTol, id + " 5.16");
      below(g.alternative_residual, kCorrespondenceTol, id + " 5.16 alternative");
      below(back.eigen_residual, kCorrespondenceTol, id + " 5.17");
      below((back.vector - coef * f).norm() / back.vector.norm(), kCorrespondenceTol,
            id + " round trip");
    }
  }
  out.detail << instances.size() << " instances, worst identity residual " << worst << " (tol "
             << kIdentityTol << "), " << geometric << " geometric pairs, " << maps
             << " round trips (tol " << kCorrespondenceTol << ")";
}

void DualPairIdentities(Outcome &out)
{
  Rng rng(1007);
  double green = 0.0;
  double worst = 0.0;
  int krein = 0;
  for (int n = 1; n <= 20; ++n)
  {
    const DualPairTriple t = DiscreteSchrodingerDualPair(n, RandomPotential(rng, n, true));
    const std::string id = "n=" + std::to_string(n);
    const GreenReport g = CheckGreenIdentity(t);
    green = std::max({green, g.residual, g.pointwise_residual});
    if (!(g.residual < kGreenTol && g.pointwise_residual < kGreenTol))
    {
      out.Fail(id + " green");
    }
    const auto point = [&](bool upper) {
      const double y = rng.Uniform(0.2, 2.0);
      return Complex(rng.Uniform(-1.0, 5.0), upper ? y : -y);
    };
    const auto below = [&](double v, const std::string &what) {
      worst = std::max(worst, v);
      if (!(v < kIdentityTol))
      {
        out.Fail(id + " " + what);
      }
    };
    for (int s = 0; s < 10; ++s)
    {
      const Complex z1 = point(true);
      const Complex z2 = point(false);
      below(CheckGammaIdentity(t, z1, z2), "6.16");
      below(CheckWeylIdentity(t, z1, z2), "6.18");
    }
    for (int s = 0; s < 50; ++s)
    {
      const ComplexMatrix theta = RandomGaussian(rng, 2, 2);
      const Complex z = point(s % 2 == 0);
      below(KreinCheck(t, theta, z), "krein");
      below(CheckTransformedWeyl(t, theta, z), "M_theta");
      ++krein;
    }
  }
  out.detail << "n = 1..20 complex q, worst Green " << green << " (tol " << kGreenTol
             << "), worst identity " << worst << " (tol " << kIdentityTol << "), " << krein
             << " (theta, z) pairs";
}

void BoundaryTripleIndex(Outcome &out)
{
  const DualPairTriple chain = DiscreteSchrodingerDualPair(2, ComplexVector::Zero(2));
  const ComplexMatrix zero = ComplexMatrix::Zero(2, 2);
  const Theorem64Report hand = Theorem64Check(chain, zero, 0.0, Theorem64Radius(chain, zero, 0.0));
  if (hand.index != 1 || hand.ma_theta != 1 || hand.ma0 != 0)
  {
    out.Fail("hand case gave (" + std::to_string(hand.index) + ", " +
             std::to_string(hand.ma_theta) + ", " + std::to_string(hand.ma0) + ")");
  }

  Rng rng(1008);
  int points = 0;
  int shared = 0;
  int chains = 0;
  for (int n = 1; n <= 6; ++n)
  {
    const ComplexVector q = RandomPotential(rng, n, true);
    const DualPairTriple t = DiscreteSchrodingerDualPair(n, q);
    const std::vector<Complex> dirichlet = Eigenvalues(AsMatrix(RestrictA0(t)));
    ++chains;
    for (int j = 0; j < 50; ++j)
    {
      ComplexMatrix theta;
      if (j % 5 == 4)
      {
        theta = SharedEigenvalueTheta(
            rng, n, q, dirichlet[static_cast<std::size_t>(rng.UniformInt(0, n - 1))]);
      }
      else
      {
        theta = RandomGaussian(rng, 2, 2);
      }
      int total_theta = 0;
      int total0 = 0;
      for (const Complex z0 : CombinedSpectrum(t, theta))
      {
        ++points;
        const Theorem64Report r = Theorem64Check(t, theta, z0, Theorem64Radius(t, theta, z0));
        if (r.index != r.ma_theta - r.ma0 || r.det_winding != r.index ||
            (r.nu && *r.nu != r.index))
        {
          out.Fail("n=" + std::to_string(n) + " theta " + std::to_string(j) + " at " + Str(z0));
        }
        shared += (r.ma_theta > 0 && r.ma0 > 0) ? 1 : 0;
        total_theta += r.ma_theta;
        total0 += r.ma0;
      }
      if (total_theta != n || total0 != n)
      {
        out.Fail("n=" + std::to_string(n) + " theta " + std::to_string(j) +
                 " multiplicities do not sum to n");
      }
    }
  }
  if (shared == 0)
  {
    out.Fail("no shared-eigenvalue case exercised");
  }
  out.detail << "hand case (" << hand.index << ", " << hand.ma_theta << ", " << hand.ma0 << "), "
             << chains << " chains x 50 theta, " << points << " points (" << shared
             << " shared), exact";
}

void QuadratureQuality(Outcome &out)
{
  // Resolvent with a double pole at 0 and a simple pole at 3: exact coefficients.
  ComplexMatrix t = ComplexMatrix::Zero(3, 3);
  t(0, 1) = 1.0;
  t(2, 2) = 3.0;
  const MatrixFunction r = Resolvent(t);
  const std::vector<int> nodes = {8, 16, 32, 64, 128};
  double worst_final = 0.0;
  int series = 0;
  for (const int k : {-2, -1, 0, 1, 2})
  {
    ComplexMatrix exact = ComplexMatrix::Zero(3, 3);
    if (k == -2)
    {
      exact(0, 1) = -1.0;
    }
    else if (k == -1)
    {
      exact(0, 0) = -1.0;
      exact(1, 1) = -1.0;
    }
    else
    {
      exact(2, 2) = std::pow(3.0, -k - 1);
    }
    const CoefficientConvergence c =
        CoefficientErrorByNodes(r, 0.0, 1.0, k, exact, nodes, kDecayRatio, kDecayFloor);
    ++series;
    worst_final = std::max(worst_final, c.errors.back());
    if (!c.geometric)
    {
      out.Fail("exact resolvent, k = " + std::to_string(k));
    }
  }
  // Planted Jordan matrices: k = -1 against a 1024-node reference.
  Rng rng(1009);
  for (int i = 0; i < 20; ++i)
  {
    const PlantedMatrix pm = RandomPlantedJordan(rng, 8);
    const MatrixFunction res = Resolvent(pm.t);
    for (const PlantedEigenvalue &e : pm.eigenvalues)
    {
      const double radius = pm.separation / 2.0;
      const ComplexMatrix ref = LaurentCoefficient(res, e.value, -1, MakeCircle(e.value, radius, 1024));
      const CoefficientConvergence c =
          CoefficientErrorByNodes(res, e.value, radius, -1, ref, nodes, kDecayRatio, kDecayFloor);
      ++series;
      worst_final = std::max(worst_final, c.errors.back());
      if (!c.geometric)
      {
        out.Fail("planted matrix " + std::to_string(i) + " at " + Str(e.value));
      }
    }
  }
  out.detail << series << " coefficient series, N = 8..128, ratio >= " << kDecayRatio
             << " per doubling, worst final error " << worst_final << " (floor " << kDecayFloor
             << ")";
}

int RunCli(const std::string &cli, const std::string &args)
{
  const int status = std::system((cli + " " + args + " 2>/dev/null").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string ReadFile(const fs::path &p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void Harness(Outcome &out, const std::string &cli, const fs::path &configs, const fs::path &scratch)
{
  fs::create_directories(scratch);
  const fs::path suite = configs / "full_suite.json";
  const fs::path r1 = scratch / "suite_1.json";
  const fs::path r2 = scratch / "suite_2.json";
  const int code = RunCli(cli, "run " + suite.string() + " --jobs 1 --out " + r1.string());
  if (code != 0)
  {
    out.Fail("full_suite exit " + std::to_string(code));
  }
  RunCli(cli, "run " + suite.string() + " --jobs 4 --out " + r2.string());
  const std::string a = ReadFile(r1);
  if (a.empty() || a != ReadFile(r2))
  {
    out.Fail("reports differ between runs");
  }

  const std::vector<std::pair<std::string, std::string>> controls = {
      {"zero_gamma", "Def6.2/green"},
      {"zero_on_contour", "Eq1.2/riesz"},
      {"pole_on_contour", "Def4.2/index"},
      {"multivalued_restriction", "Eq6.9/restrict"},
  };
  for (const auto &[name, tag] : controls)
  {
    const fs::path report = scratch / (name + ".csv");
    const int rc = RunCli(cli, "run " + (configs / "controls" / (name + ".json")).string() +
                                   " --format csv --out " + report.string());
    const std::string body = ReadFile(report);
    if (rc != 2 || body.find("," + tag + ",false,") == std::string::npos)
    {
      out.Fail(name + " exit " + std::to_string(rc));
    }
  }
  out.detail << "full_suite exit " << code << ", bit-identical across runs and job counts, "
             << controls.size() << " negative controls exit 2 with the expected tag";
}

}  // namespace

int main(int argc, char **argv)
{
  if (argc != 4)
  {
    std::cerr << "usage: mero_acceptance <mero_cli> <configs_dir> <scratch_dir>\n";
    return 1;
  }
  const std::string cli = argv[1];
  const fs::path configs = argv[2];
  const fs::path scratch = argv[3];

  Criterion(1, "argument principle vs Riesz trace", 10.0, ArgumentPrincipleVsRiesz);
  Criterion(2, "m_a = nu on the rational family", 30.0, MultiplicityEqualsNu);
  Criterion(3, "factorization reconstruction and structure", 0.0, FactorizationStructure);
  Criterion(4, "index additivity and inversion", 0.0, IndexAlgebra);
  const std::vector<FactoredPerturbation> instances = PerturbationInstances();
  Criterion(5, "Birman-Schwinger index formula", 60.0,
            [&](Outcome &o) { BirmanSchwingerIndex(o, instances); });
  Criterion(6, "Birman-Schwinger identities and eigenvector maps", 0.0,
            [&](Outcome &o) { BirmanSchwingerIdentities(o, instances); });
  Criterion(7, "boundary triple identities", 0.0, DualPairIdentities);
  Criterion(8, "boundary-triple index formula", 60.0, BoundaryTripleIndex);
  Criterion(9, "quadrature convergence", 0.0, QuadratureQuality);
  Criterion(10, "harness", 0.0,
            [&](Outcome &o) { Harness(o, cli, configs, scratch); });

  std::printf("%d of 10 criteria passed\n", 10 - g_failed);
  return g_failed == 0 ? 0 : 1;
}
