// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mero/birman_schwinger.hpp"
#include "mero/dual_pair.hpp"
#include "mero/errors.hpp"
#include "mero/factorize.hpp"
#include "mero/families.hpp"
#include "mero/harness.hpp"
#include "mero/laurent.hpp"
#include "mero/spectra.hpp"

namespace mero::harness
{

namespace
{

// Exact integer checks: the Riesz trace must sit this close to an integer.
constexpr double kIntegrality = 1e-6;
constexpr double kDecayRatio = 1e3;
constexpr double kDecayFloor = 1e-12;

// One check under construction.
class Rec
{
public:
  explicit Rec(CheckRecord &r) : r_(r) {}

  void Value(const std::string &name, double v) { r_.values.push_back({name, v, std::nullopt}); }
  void Point(Complex z)
  {
    Value("z0_re", z.real());
    Value("z0_im", z.imag());
  }
  void Below(const std::string &name, double v, double tol)
  {
    r_.values.push_back({name, v, tol});
    if (!(v <= tol))
    {
      Fail(name + " above tolerance");
    }
  }
  void Equal(const std::string &name, int v, const std::string &ref_name, int ref)
  {
    Value(name, v);
    Value(ref_name, ref);
    if (v != ref)
    {
      Fail(name + " != " + ref_name);
    }
  }
  void Require(bool ok, const std::string &what)
  {
    if (!ok)
    {
      Fail(what);
    }
  }
  void Fail(const std::string &what)
  {
    r_.pass = false;
    if (r_.message.empty())
    {
      r_.message = what;
    }
  }

private:
  CheckRecord &r_;
};

// Collects the checks of one task.
class Ctx
{
public:
  Ctx(const RunConfig &config, const ScenarioConfig &scenario, std::string instance, bool timing,
      std::vector<CheckRecord> &out)
      : config_(config), scenario_(scenario), instance_(std::move(instance)), timing_(timing),
        out_(out)
  {
  }

  const Tolerances &Tol() const { return config_.tol; }
  int Nodes() const { return config_.nodes; }
  const ScenarioConfig &Scenario() const { return scenario_; }
  void SetDigest(std::string d) { digest_ = std::move(d); }

  void Check(const std::string &tag, const std::function<void(Rec &)> &body)
  {
    CheckRecord r;
    r.scenario_id = scenario_.id;
    r.tag = tag;
    r.instance = instance_;
    r.inputs_digest = digest_;
    const auto start = std::chrono::steady_clock::now();
    Rec rec(r);
    try
    {
      body(rec);
    }
    catch (const std::exception &e)
    {
      r.pass = false;
      r.message = e.what();
    }
    if (timing_)
    {
      r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                               start)
                         .count();
    }
    out_.push_back(std::move(r));
  }

private:
  const RunConfig &config_;
  const ScenarioConfig &scenario_;
  std::string instance_;
  bool timing_;
  std::string digest_;
  std::vector<CheckRecord> &out_;
};

void AddMatrix(Digest &d, const ComplexMatrix &m)
{
  d.Add(static_cast<std::uint64_t>(m.rows()));
  d.Add(static_cast<std::uint64_t>(m.cols()));
  d.Add(m.data(), static_cast<std::size_t>(m.size()) * sizeof(Complex));
}

std::string DigestOf(std::initializer_list<const ComplexMatrix *> ms)
{
  Digest d;
  for (const ComplexMatrix *m : ms)
  {
    AddMatrix(d, *m);
  }
  return d.Hex();
}

std::string DigestOf(const std::string &label, std::uint64_t seed)
{
  Digest d;
  d.Add(label);
  d.Add(seed);
  return d.Hex();
}

std::uint64_t SplitMix(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t TaskSeed(std::uint64_t seed, const std::string &scenario_id, std::uint64_t task)
{
  Digest d;
  d.Add(scenario_id);
  return SplitMix(seed ^ SplitMix(d.Value() + task));
}

double MaxRelativeGap(const std::function<ComplexMatrix(Complex)> &lhs,
                      const MatrixFunction &rhs, Complex center, double radius, int points)
{
  double worst = 0.0;
  for (int s = 0; s < points; ++s)
  {
    const Complex z = center + std::polar(radius, 2.0 * M_PI * (s + 0.5) / points);
    worst = std::max(worst, RelativeResidual(lhs(z), rhs(z)));
  }
  return worst;
}

// ---- multiplicity ----------------------------------------------------------

void EigenvalueChecks(Ctx &ctx, const ComplexMatrix &t, Complex z0, double eps, int ma, int mg)
{
  const Tolerances &tol = ctx.Tol();
  std::optional<MultiplicityReport> r;
  ctx.Check("Eq1.2/riesz", [&](Rec &rec) {
    rec.Point(z0);
    r = EigenMultiplicities(t, z0, eps, ctx.Nodes());
    rec.Below("projection_residual", r->projection_residual, tol.projection);
    rec.Below("integrality_gap", std::abs(r->raw_trace - static_cast<double>(r->algebraic)),
              kIntegrality);
  });
  const auto need = [&] {
    if (!r)
    {
      Throw(ErrorKind::PreconditionFailed, "Riesz projection unavailable", z0);
    }
  };
  ctx.Check("Eq1.1/ma", [&](Rec &rec) {
    rec.Point(z0);
    need();
    rec.Equal("m_a", r->algebraic, "planted_m_a", ma);
  });
  ctx.Check("Eq1.3/mg", [&](Rec &rec) {
    rec.Point(z0);
    need();
    rec.Equal("m_g", r->geometric, "planted_m_g", mg);
    rec.Require(r->geometric <= r->algebraic, "m_g exceeds m_a");
  });
  const MatrixFunction pencil = FromPencil(t, Identity(t.rows()));
  ctx.Check("Eq.special/pencil", [&](Rec &rec) {
    rec.Point(z0);
    need();
    rec.Equal("argument_principle", ArgumentPrincipleMultiplicity(pencil, z0, eps, ctx.Nodes()),
              "riesz_trace", r->algebraic);
  });
  ctx.Check("Eq3.10/argument", [&](Rec &rec) {
    rec.Point(z0);
    const LogDerivativeTrace tr = LogDerivativeIndex(pencil, z0, eps, ctx.Nodes());
    rec.Below("order_gap", std::abs(tr.left - tr.right), tol.projection);
    rec.Equal("index", tr.value, "det_winding", DetWindingOracle(pencil, z0, eps, ctx.Nodes()));
  });
  ctx.Check("Quad/decay", [&](Rec &rec) {
    rec.Point(z0);
    // Coefficient k = -1 of the resolvent is -P; far poles are >= 4 radii away.
    const MatrixFunction res = Resolvent(t);
    const double radius = eps / 2.0;
    const ComplexMatrix exact = LaurentCoefficient(res, z0, -1, MakeCircle(z0, radius, 1024));
    const CoefficientConvergence c = CoefficientErrorByNodes(
        res, z0, radius, -1, exact, {8, 16, 32, 64, 128}, kDecayRatio, kDecayFloor);
    for (std::size_t i = 0; i < c.nodes.size(); ++i)
    {
      rec.Value("error_n" + std::to_string(c.nodes[i]), c.errors[i]);
    }
    rec.Below("final_error", c.errors.back(), kDecayFloor);
    rec.Require(c.geometric, "error did not fall by 1e3 per doubling");
  });
}

void MultiplicityTask(Ctx &ctx, Rng &rng)
{
  const PlantedMatrix pm = RandomPlantedJordan(rng, ctx.Scenario().max_dim);
  ctx.SetDigest(DigestOf({&pm.t}));
  for (const PlantedEigenvalue &e : pm.eigenvalues)
  {
    EigenvalueChecks(ctx, pm.t, e.value, pm.separation, e.Algebraic(), e.Geometric());
  }
}

void MultiplicityReference(Ctx &ctx)
{
  ComplexMatrix j2 = ComplexMatrix::Zero(2, 2);
  j2(0, 1) = 1.0;
  ctx.SetDigest(DigestOf({&j2}));
  EigenvalueChecks(ctx, j2, 0.0, 0.5, 2, 1);
  // Companion matrix of (z - 1)^2 (z - 2).
  ComplexMatrix c(3, 3);
  c << 0.0, 0.0, 2.0, 1.0, 0.0, -5.0, 0.0, 1.0, 4.0;
  ctx.SetDigest(DigestOf({&c}));
  EigenvalueChecks(ctx, c, 1.0, 0.5, 2, 1);
  EigenvalueChecks(ctx, c, 2.0, 0.5, 1, 1);
}

void ZeroOnContourControl(Ctx &ctx)
{
  // The eigenvalue 0.5 sits on the first quadrature node of C(0; 0.5).
  ComplexMatrix t = ComplexMatrix::Zero(2, 2);
  t(0, 0) = 0.5;
  t(1, 1) = 3.0;
  ctx.SetDigest(DigestOf({&t}));
  EigenvalueChecks(ctx, t, 0.0, 0.5, 0, 0);
}

// ---- index -----------------------------------------------------------------

void IndexTask(Ctx &ctx, Rng &rng)
{
  const Tolerances &tol = ctx.Tol();
  const int dim = ctx.Scenario().max_dim;
  const int nodes = ctx.Nodes();
  const Complex z0 = rng.ComplexNormal();
  const MeromorphicMember a = RandomMeromorphicMember(rng, dim, z0);
  const MeromorphicMember b = RandomMeromorphicMember(rng, dim, z0);
  const AnalyticMember am = RandomAnalyticMember(rng, std::max(dim, 2));
  {
    const ComplexMatrix fa = a.f(z0 + a.eps * 0.3);
    const ComplexMatrix fb = b.f(z0 + b.eps * 0.3);
    ctx.SetDigest(DigestOf({&fa, &fb}));
  }
  const double eps = std::min(a.eps, b.eps);

  std::optional<LogDerivativeTrace> tr;
  ctx.Check("Def4.2/index", [&](Rec &rec) {
    rec.Point(z0);
    tr = LogDerivativeIndex(a.f, z0, a.eps, nodes);
    rec.Below("order_gap", std::abs(tr->left - tr->right), tol.projection);
    rec.Equal("index", tr->value, "planted", a.index);
    rec.Equal("det_winding", DetWindingOracle(a.f, z0, a.eps, nodes), "planted", a.index);
  });
  ctx.Check("Eq4.9/integer", [&](Rec &rec) {
    rec.Point(z0);
    if (!tr)
    {
      Throw(ErrorKind::PreconditionFailed, "index trace unavailable", z0);
    }
    rec.Below("integrality_gap", std::abs(tr->left - static_cast<double>(tr->value)),
              kIntegrality);
    rec.Below("imaginary_part", std::abs(tr->left.imag()), kIntegrality);
  });
  ctx.Check("Eq4.11/additivity", [&](Rec &rec) {
    rec.Point(z0);
    const IndexTriple t = IndexAdditivityCheck(a.f, b.f, z0, eps, nodes);
    rec.Value("first", t.first);
    rec.Value("second", t.second);
    rec.Equal("product", t.product, "sum", t.first + t.second);
  });
  ctx.Check("Eq4.12/inverse", [&](Rec &rec) {
    rec.Point(z0);
    rec.Equal("inverse_index", Index(Inverse(a.f), z0, a.eps, nodes), "negated", -a.index);
  });
  ctx.Check("Lem2.2/trace", [&](Rec &rec) {
    rec.Point(z0);
    const TraceSymmetry s = TracePrincipalPartSymmetry(a.f, b.f, MakeCircle(z0, eps, nodes));
    const double scale = 1.0 + std::max(s.m1m2.norm(), s.m2m1.norm());
    rec.Below("trace_gap", s.residual / scale, tol.projection);
  });
  ctx.Check("Lem2.2/laurent", [&](Rec &rec) {
    rec.Point(z0);
    const MeromorphyReport m = IsFinitelyMeromorphicAt(a.f, z0, a.eps, kDefaultMaxPoleOrder, nodes);
    rec.Require(m.meromorphic_within_kmax, "pole order not resolved");
    rec.Value("pole_order", m.pole_order);
    const LaurentData d = LaurentExpansion(a.f, z0, a.eps, -8, 8, nodes);
    const auto series = [&](Complex z) { return EvaluateSeries(d, z); };
    rec.Below("series_gap", MaxRelativeGap(series, a.f, z0, a.eps / 2.0, 6), tol.reconstruction);
  });
  ctx.Check("Eq.coincide/index_ma", [&](Rec &rec) {
    rec.Point(am.z0);
    rec.Value("nu", am.nu);
    rec.Equal("index", Index(am.f, am.z0, am.eps, nodes), "m_a",
              ArgumentPrincipleMultiplicity(am.f, am.z0, am.eps, nodes));
  });
}

void PoleOnContourControl(Ctx &ctx)
{
  // diag(1/(z - 0.5), 1) has its pole on the first node of C(0; 0.5).
  const MatrixFunction f = DiagonalPowers({-1, 0}, 0.5);
  ctx.SetDigest(DigestOf("pole_on_contour", 0));
  ctx.Check("Def4.2/index", [&](Rec &rec) {
    rec.Point(0.0);
    rec.Value("index", Index(f, 0.0, 0.5, ctx.Nodes()));
  });
}

// ---- factorize -------------------------------------------------------------

void FactorizationChecks(Ctx &ctx, const AnalyticMember &am)
{
  const Tolerances &tol = ctx.Tol();
  const int nodes = ctx.Nodes();
  const Complex z0 = am.z0;
  ctx.Check("Thm2.5/step", [&](Rec &rec) {
    rec.Point(z0);
    const HowlandStepResult s = HowlandStep(am.f, z0);
    const auto product = [&](Complex z) -> ComplexMatrix {
      return (s.factor.q - (z - z0) * s.factor.p) * s.next(z);
    };
    rec.Below("step_gap", MaxRelativeGap(product, am.f, z0, am.eps / 2.0, 10),
              tol.reconstruction);
    rec.Require(IsNumericallyInvertible(s.next(z0)) || s.factor.rank > 0, "empty step");
  });

  std::optional<HowlandFactorization> f;
  ctx.Check("Thm2.6/factor", [&](Rec &rec) {
    rec.Point(z0);
    f = HowlandFactorize(am.f, z0);
    const auto rebuilt = [&](Complex z) { return Reconstruct(*f, z); };
    rec.Below("reconstruction_half", MaxRelativeGap(rebuilt, am.f, z0, am.eps / 2.0, 10),
              tol.reconstruction);
    rec.Below("reconstruction_quarter", MaxRelativeGap(rebuilt, am.f, z0, am.eps / 4.0, 10),
              tol.reconstruction);
    rec.Value("n0", f->n0);
  });
  const auto need = [&] {
    if (!f)
    {
      Throw(ErrorKind::PreconditionFailed, "factorization unavailable", z0);
    }
  };
  ctx.Check("Eq2.35/monotone", [&](Rec &rec) {
    rec.Point(z0);
    need();
    bool monotone = !f->steps.empty();
    for (std::size_t j = 0; j < f->steps.size(); ++j)
    {
      rec.Value("p" + std::to_string(j + 1), f->steps[j].rank);
      monotone = monotone && f->steps[j].rank >= 1 &&
                 (j == 0 || f->steps[j].rank <= f->steps[j - 1].rank);
    }
    rec.Require(monotone, "p-sequence not nonincreasing and positive");
  });
  ctx.Check("Eq2.40/p1", [&](Rec &rec) {
    rec.Point(z0);
    need();
    const ComplexMatrix a0 = am.f(z0);
    const double scale = Norm2(a0) + Norm2(DerivativeAt(am.f, z0, am.eps / 2.0));
    const int kernel = static_cast<int>(a0.cols() - NumericalRank(a0, scale));
    rec.Equal("p1", f->steps.front().rank, "dim_ker", kernel);
  });
  ctx.Check("Eq2.41/nu_bounds", [&](Rec &rec) {
    rec.Point(z0);
    need();
    rec.Value("nu", f->nu);
    rec.Value("n0", f->n0);
    rec.Value("dim_ker", f->kernel_dimension);
    rec.Require(f->nu >= f->n0 && f->nu >= f->kernel_dimension, "nu below its bounds");
  });
  ctx.Check("Eq2.42/simple_pole", [&](Rec &rec) {
    rec.Point(z0);
    need();
    const bool simple = SimplePoleCriterion(*f, am.f);
    rec.Value("criterion", simple ? 1 : 0);
    rec.Equal("n0_is_one", f->n0 == 1 ? 1 : 0, "criterion", simple ? 1 : 0);
  });
  ctx.Check("Eq2.31/nu_block", [&](Rec &rec) {
    rec.Point(z0);
    need();
    rec.Equal("block_nu", NuViaBlockDeterminantShrinking(am.f, z0, am.eps, 20, nodes),
              "howland_nu", f->nu);
  });
  ctx.Check("Eq3.6/partial", [&](Rec &rec) {
    rec.Point(z0);
    need();
    int total = 0;
    for (const int n : f->partial_multiplicities)
    {
      total += n;
    }
    rec.Equal("sum_partial", total, "nu", f->nu);
    std::vector<int> p;
    for (const HowlandFactor &s : f->steps)
    {
      p.push_back(s.rank);
    }
    rec.Require(ConjugatePartition(f->partial_multiplicities) == ConjugatePartition(
                                                                     ConjugatePartition(p)),
                "partial multiplicities are not conjugate to the p-sequence");
    if (am.partial_multiplicities)
    {
      rec.Require(f->partial_multiplicities == *am.partial_multiplicities,
                  "partial multiplicities differ from the planted ones");
    }
  });
  ctx.Check("Thm3.4a/ma_nu", [&](Rec &rec) {
    rec.Point(z0);
    need();
    rec.Equal("howland_nu", f->nu, "planted_nu", am.nu);
    rec.Equal("argument_principle", ArgumentPrincipleMultiplicity(am.f, z0, am.eps, nodes),
              "planted_nu", am.nu);
    rec.Equal("det_winding", DetWindingOracle(am.f, z0, am.eps, nodes), "planted_nu", am.nu);
  });
}

void FactorizeTask(Ctx &ctx, Rng &rng)
{
  const AnalyticMember am = RandomAnalyticMember(rng, ctx.Scenario().max_dim);
  const ComplexMatrix a0 = am.f(am.z0);
  ctx.SetDigest(DigestOf({&a0}));
  FactorizationChecks(ctx, am);
}

void FactorizeReference(Ctx &ctx)
{
  AnalyticMember d{"diagonal", DiagonalPowers({1, 2}, 0.0), 0.0, 0.5, 3,
                   std::vector<int>{1, 2}};
  ctx.SetDigest(DigestOf("diag(z, z^2)", 0));
  FactorizationChecks(ctx, d);
  ComplexMatrix j2 = ComplexMatrix::Zero(2, 2);
  j2(0, 1) = 1.0;
  AnalyticMember j{"jordan", FromPencil(j2, Identity(2)), 0.0, 0.5, 2, std::vector<int>{2}};
  ctx.SetDigest(DigestOf({&j2}));
  FactorizationChecks(ctx, j);
}

// ---- birman_schwinger ------------------------------------------------------

void IndexCase(Ctx &ctx, const FactoredPerturbation &p, Complex z0)
{
  const double eps = Theorem55Radius(p, z0);
  std::optional<Theorem55Report> r;
  try
  {
    r = Theorem55Check(p, z0, eps, ctx.Nodes());
  }
  catch (const std::exception &e)
  {
    const std::string message = e.what();
    ctx.Check("Thm5.5/indi", [&](Rec &rec) {
      rec.Point(z0);
      rec.Fail(message);
    });
    return;
  }
  std::string tag = "Thm5.5/indi";
  if (r->ma_h0 == 0)
  {
    tag = "Thm5.5/indi0";
  }
  else if (r->ma_h == 0)
  {
    tag = "Thm5.5/indiA";
  }
  ctx.Check(tag, [&](Rec &rec) {
    rec.Point(z0);
    rec.Value("eps", eps);
    rec.Value("m_a_H", r->ma_h);
    rec.Value("m_a_H0", r->ma_h0);
    rec.Equal("index", r->index, "m_a_difference", r->ma_h - r->ma_h0);
    rec.Equal("det_winding", r->det_winding, "index", r->index);
  });
  if (r->nu)
  {
    ctx.Check("Thm5.5/indinu", [&](Rec &rec) {
      rec.Point(z0);
      rec.Equal("nu", *r->nu, "index", r->index);
      rec.Equal("m_a_H", r->ma_h, "index", r->index);
    });
  }
}

void CorrespondenceChecks(Ctx &ctx, const FactoredPerturbation &p)
{
  const Eigen::Index n = p.Dim();
  const std::vector<Complex> h0_spec = Eigenvalues(p.H0());
  const double cluster = SpectrumClusterTolerance(p);
  for (const EigenCluster &c : ClusterEigenvalues(Eigenvalues(p.H()), cluster))
  {
    if (DistanceToOthers(c.center, h0_spec, -1.0) < 1e-3)
    {
      continue;
    }
    const Complex z0 = c.center;
    std::optional<GeometricPair> gp;
    ctx.Check("Eq5.18/mg", [&](Rec &rec) {
      rec.Point(z0);
      gp = GeometricMultiplicities(p, z0);
      rec.Equal("dim_ker_H", gp->h, "dim_ker_K", gp->k);
    });
    if (c.count != 1 || !gp || gp->h != 1)
    {
      continue;
    }
    const ComplexMatrix kernel = KernelBasis(p.H() - z0 * Identity(n), Norm2(p.H()));
    if (kernel.cols() != 1)
    {
      continue;
    }
    std::optional<CorrespondenceResult> g;
    ctx.Check("Thm5.4/5.16", [&](Rec &rec) {
      rec.Point(z0);
      g = BsEigenvectorMap(p, z0, kernel.col(0), CorrespondenceDirection::HToK);
      rec.Below("eigen_residual", g->eigen_residual, ctx.Tol().projection);
      rec.Below("alternative_residual", g->alternative_residual, ctx.Tol().projection);
    });
    ctx.Check("Thm5.4/5.17", [&](Rec &rec) {
      rec.Point(z0);
      if (!g)
      {
        Throw(ErrorKind::PreconditionFailed, "forward map unavailable", z0);
      }
      const CorrespondenceResult f =
          BsEigenvectorMap(p, z0, g->vector, CorrespondenceDirection::KToH);
      rec.Below("eigen_residual", f.eigen_residual, ctx.Tol().projection);
      // The round trip must land on the span of the original eigenvector.
      const ComplexVector v = kernel.col(0);
      const Complex coef = v.dot(f.vector) / v.squaredNorm();
      rec.Below("collinearity", (f.vector - coef * v).norm() / f.vector.norm(),
                ctx.Tol().projection);
    });
  }
}

void PerturbationChecks(Ctx &ctx, const FactoredPerturbation &p, Rng *rng)
{
  const Tolerances &tol = ctx.Tol();
  const auto pick = [&](double lo) {
    return rng ? p.Probe() * rng->Uniform(lo, 1.0) + rng->ComplexNormal() : p.Probe() * lo;
  };
  const Complex z1 = pick(0.5);
  const Complex z2 = pick(0.6);
  const MatrixFunction k = BirmanSchwingerFunction(p);

  ctx.Check("Hyp5.1/probe", [&](Rec &rec) {
    rec.Point(p.Probe());
    const ComplexMatrix ik = IdentityMinusK(p)(p.Probe());
    rec.Require(IsNumericallyInvertible(ik), "I - K(probe) is singular");
    rec.Value("probe_modulus", std::abs(p.Probe()));
  });
  ctx.Check("Eq5.4/K", [&](Rec &rec) {
    rec.Point(z1);
    // det(I - K(z)) = det(H - z) / det(H0 - z).
    const Eigen::Index n = p.Dim();
    const Complex lhs = IdentityMinusK(p)(z1).determinant();
    const Complex rhs =
        (p.H() - z1 * Identity(n)).determinant() / (p.H0() - z1 * Identity(n)).determinant();
    rec.Below("determinant_gap", std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)),
              tol.identity);
  });
  ctx.Check("Eq5.11ju/Kprime", [&](Rec &rec) {
    rec.Point(z1);
    rec.Below("derivative_gap", RelativeResidual(k.Derivative(z1), FiniteDifference(k, z1)),
              tol.derivative);
  });
  ctx.Check("Thm5.2/resolvent", [&](Rec &rec) {
    rec.Point(z1);
    rec.Below("resolvent_gap", ResolventAgreement(p, z1), tol.identity);
  });
  ctx.Check("Eq5.9/second_resolvent", [&](Rec &rec) {
    rec.Point(z1);
    const SecondResolventResiduals s = CheckSecondResolvent(p, z1);
    rec.Below("left", s.left, tol.identity);
    rec.Below("right", s.right, tol.identity);
  });
  ctx.Check("Eq5.10f/inverse", [&](Rec &rec) {
    rec.Point(z1);
    rec.Below("inverse_gap", CheckInverseIdentity(p, z1), tol.identity);
  });
  std::optional<Lemma53Residuals> l;
  ctx.Check("Lem5.3/5.11", [&](Rec &rec) {
    rec.Point(z1);
    l = CheckLemma53(p, z1, z2);
    rec.Below("k_difference", l->k_difference, tol.identity);
  });
  ctx.Check("Lem5.3/5.12", [&](Rec &rec) {
    rec.Point(z1);
    if (!l)
    {
      l = CheckLemma53(p, z1, z2);
    }
    rec.Below("inverse_difference", l->inverse_difference, tol.identity);
  });
  CorrespondenceChecks(ctx, p);
  for (const Complex z0 : CombinedSpectrum(p))
  {
    IndexCase(ctx, p, z0);
  }
}

void BirmanSchwingerTask(Ctx &ctx, Rng &rng)
{
  const ScenarioConfig &s = ctx.Scenario();
  const int n = rng.UniformInt(2, s.max_dim);
  const int k = rng.UniformInt(1, s.max_rank);
  const bool shared = rng.Uniform(0.0, 1.0) < s.shared_fraction;
  const FactoredPerturbation p = RandomPerturbation(rng, n, k, shared);
  ctx.SetDigest(DigestOf({&p.H0(), &p.V1(), &p.V2()}));
  PerturbationChecks(ctx, p, &rng);
}

void BirmanSchwingerReference(Ctx &ctx)
{
  // H0 = diag(1, -1), V1 = V2 = (1, 1): H has eigenvalues 1 +- sqrt(2).
  ComplexMatrix h0 = ComplexMatrix::Zero(2, 2);
  h0(0, 0) = 1.0;
  h0(1, 1) = -1.0;
  const ComplexMatrix v = ComplexMatrix::Ones(1, 2);
  const FactoredPerturbation p(h0, v, v);
  ctx.SetDigest(DigestOf({&h0, &v, &v}));
  PerturbationChecks(ctx, p, nullptr);

  // H0 = diag(0, 0, 2), V = e3: 0 stays a double eigenvalue of H.
  ComplexMatrix g0 = ComplexMatrix::Zero(3, 3);
  g0(2, 2) = 2.0;
  ComplexMatrix e3 = ComplexMatrix::Zero(1, 3);
  e3(0, 2) = 1.0;
  const FactoredPerturbation shared(g0, e3, e3);
  ctx.SetDigest(DigestOf({&g0, &e3, &e3}));
  PerturbationChecks(ctx, shared, nullptr);
}

// ---- dual_pair -------------------------------------------------------------

Complex OffAxis(Rng &rng, bool upper)
{
  const double y = rng.Uniform(0.2, 2.0);
  return {rng.Uniform(-1.0, 5.0), upper ? y : -y};
}

void ThetaChecks(Ctx &ctx, const DualPairTriple &t, const ComplexMatrix &theta, Complex z,
                 const std::string &label)
{
  const Tolerances &tol = ctx.Tol();
  const int n = static_cast<int>(t.bstar.AmbientDim());
  ctx.Check("Eq6.9/restrict", [&](Rec &rec) {
    rec.Value("theta", std::stod(label));
    const ParameterizedOperator op = RestrictATheta(t, theta);
    const ComplexMatrix a = AsMatrix(op);
    const ComplexMatrix w = KernelBasis(op.constraint);
    // Reversing the basis order changes W by a permutation.
    const ComplexMatrix flipped = w.rowwise().reverse();
    rec.Below("basis_gap", RelativeResidual(AsMatrixWithBasis(op, flipped), a), tol.identity);
  });
  ctx.Check("Eq6.20/krein", [&](Rec &rec) {
    rec.Point(z);
    rec.Below("krein_gap", KreinCheck(t, theta, z), tol.identity);
  });
  ctx.Check("Lem6.3/triple", [&](Rec &rec) {
    const GreenReport g = CheckGreenIdentity(TransformedTriple(t, theta));
    rec.Below("green_residual", g.residual, tol.green);
    rec.Below("pointwise_residual", g.pointwise_residual, tol.green);
    if (n >= 2)
    {
      rec.Require(g.b_onto && g.a_onto, "transformed boundary map not onto");
    }
  });
  ctx.Check("Lem6.3/mt", [&](Rec &rec) {
    rec.Point(std::conj(z));
    rec.Below("weyl_gap", CheckTransformedWeyl(t, theta, std::conj(z)), tol.identity);
  });

  const MatrixFunction m = WeylFunction(t);
  const std::vector<Complex> dirichlet = Eigenvalues(AsMatrix(RestrictA0(t)));
  for (const EigenCluster &c :
       ClusterEigenvalues(Eigenvalues(AsMatrix(RestrictATheta(t, theta))), 1e-6))
  {
    if (DistanceToOthers(c.center, dirichlet, -1.0) < 1e-3)
    {
      continue;
    }
    ctx.Check("Eq6.19/point_spectrum", [&](Rec &rec) {
      rec.Point(c.center);
      const Eigen::VectorXd s =
          Eigen::JacobiSVD<ComplexMatrix>(theta - m(c.center)).singularValues();
      rec.Below("relative_smin", s(s.size() - 1) / std::max(1.0, s(0)), tol.projection);
    });
  }

  for (const Complex z0 : CombinedSpectrum(t, theta))
  {
    std::optional<Theorem64Report> r;
    std::string failure;
    try
    {
      r = Theorem64Check(t, theta, z0, Theorem64Radius(t, theta, z0), ctx.Nodes());
    }
    catch (const std::exception &e)
    {
      failure = e.what();
    }
    const std::string tag = r && r->ma0 == 0 ? "Thm6.4/indi02" : "Thm6.4/indi2";
    ctx.Check(tag, [&](Rec &rec) {
      rec.Point(z0);
      if (!r)
      {
        rec.Fail(failure);
        return;
      }
      rec.Value("eps", r->eps);
      rec.Value("m_a_theta", r->ma_theta);
      rec.Value("m_a_0", r->ma0);
      rec.Equal("index", r->index, "m_a_difference", r->ma_theta - r->ma0);
      rec.Equal("det_winding", r->det_winding, "index", r->index);
    });
    if (r && r->nu)
    {
      ctx.Check("Thm6.4/indinu2", [&](Rec &rec) {
        rec.Point(z0);
        rec.Equal("nu", *r->nu, "index", r->index);
        rec.Equal("m_a_theta", r->ma_theta, "index", r->index);
      });
    }
  }
}

void TripleChecks(Ctx &ctx, const DualPairTriple &t, Rng &rng, int pairs)
{
  const Tolerances &tol = ctx.Tol();
  const int n = static_cast<int>(t.bstar.AmbientDim());
  ctx.Check("Def6.2/green", [&](Rec &rec) {
    const GreenReport g = CheckGreenIdentity(t);
    rec.Below("green_residual", g.residual, tol.green);
    rec.Below("pointwise_residual", g.pointwise_residual, tol.green);
  });
  if (n >= 2)
  {
    ctx.Check("Def6.2/onto", [&](Rec &rec) {
      const GreenReport g = CheckGreenIdentity(t);
      rec.Value("b_onto", g.b_onto ? 1 : 0);
      rec.Value("a_onto", g.a_onto ? 1 : 0);
      rec.Require(g.b_onto && g.a_onto, "boundary map not onto");
    });
  }
  ctx.Check("Eq6.9/restrict", [&](Rec &rec) {
    const ComplexMatrix a0 = AsMatrix(RestrictA0(t));
    const ComplexMatrix b0 = AsMatrix(RestrictB0(t));
    rec.Value("dim", static_cast<double>(a0.rows()));
    // B0 is the adjoint of A0 for this pair.
    rec.Below("adjoint_gap", RelativeResidual(b0, a0.adjoint()), tol.identity);
  });
  const MatrixFunction m = WeylFunction(t);
  for (int s = 0; s < pairs; ++s)
  {
    const Complex z1 = OffAxis(rng, true);
    const Complex z2 = OffAxis(rng, false);
    ctx.Check("Eq6.16/gamma", [&](Rec &rec) {
      rec.Point(z1);
      rec.Below("gamma_gap", CheckGammaIdentity(t, z1, z2), tol.identity);
    });
    ctx.Check("Eq6.18/weyl", [&](Rec &rec) {
      rec.Point(z1);
      rec.Below("weyl_gap", CheckWeylIdentity(t, z1, z2), tol.identity);
      rec.Below("derivative_gap", RelativeResidual(m.Derivative(z1), FiniteDifference(m, z1)),
                tol.derivative);
    });
  }
}

void DualPairTask(Ctx &ctx, Rng &rng, int n)
{
  const ScenarioConfig &s = ctx.Scenario();
  const ComplexVector q = RandomPotential(rng, n, s.complex_potential);
  const DualPairTriple t = DiscreteSchrodingerDualPair(n, q);
  {
    const ComplexMatrix qm = q;
    ctx.SetDigest(DigestOf({&qm}));
  }
  TripleChecks(ctx, t, rng, 10);
  const std::vector<Complex> dirichlet = Eigenvalues(AsMatrix(RestrictA0(t)));
  for (int j = 0; j < s.thetas; ++j)
  {
    ComplexMatrix theta;
    if (j % 2 == 1)
    {
      const Complex z0 = dirichlet[static_cast<std::size_t>(rng.UniformInt(0, n - 1))];
      theta = SharedEigenvalueTheta(rng, n, q, z0);
    }
    else
    {
      theta = RandomGaussian(rng, 2, 2);
    }
    ThetaChecks(ctx, t, theta, OffAxis(rng, true), std::to_string(j));
  }
}

void DualPairReference(Ctx &ctx)
{
  const DualPairTriple t = DiscreteSchrodingerDualPair(2, ComplexVector::Zero(2));
  ctx.SetDigest(DigestOf("chain n=2 q=0", 2));
  Rng rng(0);
  TripleChecks(ctx, t, rng, 2);
  ctx.Check("Eq6.18/weyl", [&](Rec &rec) {
    rec.Point(0.0);
    ComplexMatrix expected(2, 2);
    expected << -1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, -1.0 / 3.0;
    rec.Below("weyl_at_zero_gap", RelativeResidual(WeylFunction(t)(0.0), expected),
              ctx.Tol().identity);
  });
  ctx.Check("Eq6.16/gamma", [&](Rec &rec) {
    rec.Point(0.0);
    ComplexMatrix expected(2, 2);
    expected << 2.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0;
    rec.Below("gamma_at_zero_gap", RelativeResidual(GammaField(t, 0.0), expected),
              ctx.Tol().identity);
  });
  const ComplexMatrix zero = ComplexMatrix::Zero(2, 2);
  ctx.Check("Thm6.4/indi02", [&](Rec &rec) {
    rec.Point(0.0);
    const Theorem64Report r = Theorem64Check(t, zero, 0.0, Theorem64Radius(t, zero, 0.0));
    rec.Equal("index", r.index, "hand_index", 1);
    rec.Equal("m_a_theta", r.ma_theta, "hand_m_a_theta", 1);
    rec.Equal("m_a_0", r.ma0, "hand_m_a_0", 0);
  });
  ThetaChecks(ctx, t, zero, Complex(0.5, 1.0), "0");
}

void ZeroGammaControl(Ctx &ctx)
{
  DualPairTriple t = DiscreteSchrodingerDualPair(2, ComplexVector::Zero(2));
  t.gamma_a0.setZero();
  t.gamma_a1.setZero();
  t.gamma_b0.setZero();
  t.gamma_b1.setZero();
  ctx.SetDigest(DigestOf("zero_gamma", 2));
  ctx.Check("Def6.2/green", [&](Rec &rec) {
    const GreenReport g = CheckGreenIdentity(t);
    rec.Below("green_residual", g.residual, ctx.Tol().green);
    rec.Below("pointwise_residual", g.pointwise_residual, ctx.Tol().green);
  });
  ctx.Check("Def6.2/onto", [&](Rec &rec) {
    const GreenReport g = CheckGreenIdentity(t);
    rec.Value("b_onto", g.b_onto ? 1 : 0);
    rec.Value("a_onto", g.a_onto ? 1 : 0);
    rec.Require(g.b_onto && g.a_onto, "boundary map not onto");
  });
}

void MultivaluedControl(Ctx &ctx)
{
  const int n = 3;
  const DualPairTriple t = DiscreteSchrodingerDualPair(n, ComplexVector::Zero(n));
  // Pinning every interior value leaves only boundary values: the graph
  // {(0, T w)} is not an operator.
  ComplexMatrix pin = ComplexMatrix::Zero(n, n + 2);
  for (int i = 0; i < n; ++i)
  {
    pin(i, i + 1) = 1.0;
  }
  ctx.SetDigest(DigestOf({&pin}));
  ctx.Check("Eq6.9/restrict", [&](Rec &rec) {
    const ComplexMatrix a = AsMatrix(Restrict(t, Side::B, pin));
    rec.Value("dim", static_cast<double>(a.rows()));
  });
}

// ---- task list -------------------------------------------------------------

struct Task
{
  std::size_t scenario = 0;
  std::string instance;
  std::uint64_t seed = 0;
  std::function<void(Ctx &, Rng &)> body;
};

std::vector<Task> PlanTasks(const std::vector<ScenarioConfig> &scenarios, std::uint64_t seed)
{
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < scenarios.size(); ++i)
  {
    const ScenarioConfig &s = scenarios[i];
    const auto add = [&](std::string instance, std::uint64_t index,
                         std::function<void(Ctx &, Rng &)> body) {
      tasks.push_back({i, std::move(instance), TaskSeed(seed, s.id, index), std::move(body)});
    };
    if (!s.control.empty())
    {
      std::function<void(Ctx &)> control;
      if (s.control == "zero_on_contour")
      {
        control = ZeroOnContourControl;
      }
      else if (s.control == "pole_on_contour")
      {
        control = PoleOnContourControl;
      }
      else if (s.control == "zero_gamma")
      {
        control = ZeroGammaControl;
      }
      else
      {
        control = MultivaluedControl;
      }
      add("control:" + s.control, 0, [control](Ctx &ctx, Rng &) { control(ctx); });
      continue;
    }
    std::function<void(Ctx &)> reference;
    std::function<void(Ctx &, Rng &)> random;
    switch (s.kind)
    {
      case ScenarioKind::Multiplicity:
        reference = MultiplicityReference;
        random = MultiplicityTask;
        break;
      case ScenarioKind::Index:
        random = IndexTask;
        break;
      case ScenarioKind::Factorize:
        reference = FactorizeReference;
        random = FactorizeTask;
        break;
      case ScenarioKind::BirmanSchwinger:
        reference = BirmanSchwingerReference;
        random = BirmanSchwingerTask;
        break;
      case ScenarioKind::DualPair:
        reference = DualPairReference;
        break;
      case ScenarioKind::FullSuite:
        break;
    }
    if (s.reference && reference)
    {
      add("reference", 0, [reference](Ctx &ctx, Rng &) { reference(ctx); });
    }
    if (s.kind == ScenarioKind::DualPair)
    {
      std::uint64_t index = 1;
      for (const int n : s.sizes)
      {
        for (int k = 0; k < s.instances; ++k)
        {
          add("n=" + std::to_string(n) + "#" + std::to_string(k), index++,
              [n](Ctx &ctx, Rng &rng) { DualPairTask(ctx, rng, n); });
        }
      }
      continue;
    }
    for (int k = 0; k < s.instances; ++k)
    {
      add(std::to_string(k), static_cast<std::uint64_t>(k) + 1, random);
    }
  }
  return tasks;
}

}  // namespace

std::vector<CheckRecord> RunScenarios(const RunConfig &config, const RunOptions &options)
{
  const std::vector<ScenarioConfig> scenarios = ExpandScenarios(config.scenarios);
  const std::vector<Task> tasks = PlanTasks(scenarios, config.seed.value_or(0));
  std::vector<std::vector<CheckRecord>> results(tasks.size());

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++)
    {
      const Task &task = tasks[i];
      Ctx ctx(config, scenarios[task.scenario], task.instance, options.timing, results[i]);
      ctx.SetDigest(DigestOf(task.instance, task.seed));
      Rng rng(task.seed);
      try
      {
        task.body(ctx, rng);
      }
      catch (const std::exception &e)
      {
        const std::string message = e.what();
        ctx.Check("Harness/setup", [&](Rec &rec) { rec.Fail(message); });
      }
    }
  };
  const std::size_t jobs =
      std::min<std::size_t>(std::max(1, options.jobs), std::max<std::size_t>(1, tasks.size()));
  if (jobs == 1)
  {
    worker();
  }
  else
  {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j)
    {
      pool.emplace_back(worker);
    }
    for (std::thread &t : pool)
    {
      t.join();
    }
  }

  std::vector<CheckRecord> out;
  for (std::vector<CheckRecord> &r : results)
  {
    std::move(r.begin(), r.end(), std::back_inserter(out));
  }
  return out;
}

const std::vector<ScenarioInfo> &Catalog()
{
  static const std::vector<ScenarioInfo> catalog = {
      {"multiplicity",
       "Riesz projections and the pencil argument principle on planted Jordan matrices",
       {"instances", "max_dim", "reference"},
       {"zero_on_contour"},
       {"Eq1.1/ma", "Eq1.2/riesz", "Eq1.3/mg", "Eq.special/pencil", "Eq3.10/argument",
        "Quad/decay"}},
      {"index",
       "index of meromorphic members: integrality, additivity, inversion, trace symmetry",
       {"instances", "max_dim"},
       {"pole_on_contour"},
       {"Def4.2/index", "Eq4.9/integer", "Eq4.11/additivity", "Eq4.12/inverse", "Lem2.2/trace",
        "Lem2.2/laurent", "Eq.coincide/index_ma"}},
      {"factorize",
       "Howland factorization and the four multiplicities of analytic members",
       {"instances", "max_dim", "reference"},
       {},
       {"Thm2.5/step", "Thm2.6/factor", "Eq2.35/monotone", "Eq2.40/p1", "Eq2.41/nu_bounds",
        "Eq2.42/simple_pole", "Eq2.31/nu_block", "Eq3.6/partial", "Thm3.4a/ma_nu"}},
      {"birman_schwinger",
       "factored perturbations: resolvent identities, eigenvector maps, index formula",
       {"instances", "max_dim", "max_rank", "shared_fraction", "reference"},
       {},
       {"Hyp5.1/probe", "Eq5.4/K", "Eq5.11ju/Kprime", "Thm5.2/resolvent",
        "Eq5.9/second_resolvent", "Eq5.10f/inverse", "Lem5.3/5.11", "Lem5.3/5.12",
        "Thm5.4/5.16", "Thm5.4/5.17", "Eq5.18/mg", "Thm5.5/indi0", "Thm5.5/indiA",
        "Thm5.5/indi", "Thm5.5/indinu"}},
      {"dual_pair",
       "discrete Schroedinger chains: Green identity, Weyl function, Krein formula, index "
       "formula",
       {"sizes", "instances", "thetas", "complex_potential", "reference"},
       {"zero_gamma", "multivalued_restriction"},
       {"Def6.2/green", "Def6.2/onto", "Eq6.9/restrict", "Eq6.16/gamma", "Eq6.18/weyl",
        "Eq6.19/point_spectrum", "Eq6.20/krein", "Lem6.3/triple", "Lem6.3/mt",
        "Thm6.4/indi02", "Thm6.4/indi2", "Thm6.4/indinu2"}},
      {"full_suite",
       "every kind above with default parameters",
       {"reference"},
       {},
       {}},
  };
  return catalog;
}

const std::vector<std::string> &SuiteTags()
{
  static const std::vector<std::string> tags = [] {
    std::vector<std::string> out;
    for (const ScenarioInfo &info : Catalog())
    {
      out.insert(out.end(), info.tags.begin(), info.tags.end());
    }
    return out;
  }();
  return tags;
}

std::string CatalogText()
{
  std::ostringstream os;
  for (const ScenarioInfo &info : Catalog())
  {
    os << info.kind << "\n  " << info.summary << "\n  parameters:";
    for (const std::string &p : info.parameters)
    {
      os << " " << p;
    }
    os << "\n";
    if (!info.controls.empty())
    {
      os << "  controls:";
      for (const std::string &c : info.controls)
      {
        os << " " << c;
      }
      os << "\n";
    }
    const std::vector<std::string> &tags = info.tags.empty() ? SuiteTags() : info.tags;
    os << "  tags:";
    for (const std::string &t : tags)
    {
      os << " " << t;
    }
    os << "\n";
  }
  return os.str();
}

std::string CatalogJson()
{
  nlohmann::json list = nlohmann::json::array();
  for (const ScenarioInfo &info : Catalog())
  {
    list.push_back({{"kind", info.kind},
                    {"summary", info.summary},
                    {"parameters", info.parameters},
                    {"controls", info.controls},
                    {"tags", info.tags.empty() ? SuiteTags() : info.tags}});
  }
  return nlohmann::json{{"scenarios", list}}.dump(2) + "\n";
}

}  // namespace mero::harness
