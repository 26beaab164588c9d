#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cloak/errors.hpp"
#include "cloak/variational.hpp"
#include "oracles/oracles.hpp"

using namespace cloak;
using namespace cloak::variational;
using radial::ProfileKind;

namespace {

const double kTwoPi = 2.0 * std::numbers::pi;

// Smooth random field vanishing on both radii, max |h| about `scale`.
ScalarField2D random_direction(const PolarGrid& grid, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> n(0.0, 1.0);
  const double a1 = n(rng), a2 = n(rng), a3 = n(rng), m = 1 + static_cast<int>(rng() % 3);
  const double eps = grid.epsilon();
  return ScalarField2D::from_function(grid, [=](double r, double phi) {
    const double bump = std::sin(std::numbers::pi * (r - eps) / (1 - eps));
    return scale * bump * (a1 + a2 * std::cos(m * phi) + a3 * std::sin(m * phi + 0.3)) / 3.0;
  });
}

}  // namespace

TEST(PolarGrid, GeometryAndValidation) {
  const PolarGrid g(0.1, 16, 32);
  EXPECT_EQ(g.radius(0), 0.1);
  EXPECT_EQ(g.radius(15), 1.0);
  for (int i = 1; i < 16; ++i) EXPECT_GT(g.radius(i), g.radius(i - 1));
  EXPECT_EQ(g.index(3, 32), g.index(3, 0));
  EXPECT_EQ(g.index(3, -1), g.index(3, 31));
  auto area_error = [](const PolarGrid& grid) {
    double area = 0.0;
    for (int i = 0; i < grid.n_r(); ++i) area += grid.n_phi() * grid.area_weight(i);
    return std::abs(area - std::numbers::pi * (1 - grid.epsilon() * grid.epsilon()));
  };
  EXPECT_LT(area_error(g), 0.03);
  EXPECT_GT(area_error(g) / area_error(g.refined()), 3.5);
  EXPECT_THROW(PolarGrid(0.1, 4, 32), ValidationError);
  EXPECT_THROW(PolarGrid(0.1, 16, 8), ValidationError);
}

TEST(ScalarField, LiftedArgumentHasWindingJump) {
  const PolarGrid g(0.1, 16, 32);
  const auto theta = lift_arg(g);
  EXPECT_EQ(theta.winding(), 1);
  EXPECT_NEAR(theta.at(2, 32) - theta.at(2, 0), kTwoPi, 1e-15);
  // D arg = e_theta / r.
  const Vec2 d = theta.gradient(5, 7);
  const Vec2 expect = g.e_theta(7) / g.radius(5);
  EXPECT_NEAR(d.x, expect.x, 1e-12);
  EXPECT_NEAR(d.y, expect.y, 1e-12);
  EXPECT_THROW(ScalarField2D::combine(0.5, theta, 0.0, theta), ValidationError);
}

TEST(ScalarField, OneSidedGradientIsThirdOrder) {
  auto err = [](int n) {
    const PolarGrid g(0.1, n, 16, RadialSpacing::uniform);
    const auto u = ScalarField2D::from_function(g, [](double r, double) { return std::sin(3 * r); });
    return std::abs(u.d_s(0, 0) - 3 * std::cos(0.3));
  };
  EXPECT_GT(err(16) / err(32), 7.0);
}

TEST(FunctionalFp, RadialReductionConverges) {
  const radial::AmplitudeProfile f = radial::profile_minimax(AnnulusSpec(0.1), 200);
  for (double p : {1.0, 2.0}) {
    const double exact = radial::energy_p(f, p).value;
    double prev = 0.0;
    for (int k = 0; k < 3; ++k) {
      const PolarGrid g(0.1, 64 << k, 128 << k);
      const double rel = std::abs(pair_energy(lift_profile(f, g), lift_arg(g), p) - exact) / exact;
      EXPECT_LT(rel, 0.02);
      if (k > 0) EXPECT_GT(prev / rel, 2.0);
      prev = rel;
    }
  }
}

TEST(FunctionalFp, IdentityMapAtHalf) {
  const PolarGrid g(0.5, 64, 128);
  const auto u = ScalarField2D::from_function(g, [](double r, double) { return std::log(r); });
  EXPECT_NEAR(pair_energy(u, lift_arg(g), 1.0), 1.5 * std::numbers::pi, 1e-4 * 1.5 * std::numbers::pi);
}

TEST(FunctionalFp, RejectsInadmissibleFields) {
  const PolarGrid g(0.1, 16, 32);
  const auto u = ScalarField2D::from_function(g, [](double r, double) { return -std::log(r); });
  try {
    (void)pair_energy(u, lift_arg(g), 1.0);
    FAIL() << "expected a ConstraintError";
  } catch (const ConstraintError& e) {
    EXPECT_NE(std::string(e.what()).find("(0,0)"), std::string::npos);
  }
}

TEST(FunctionalFp, IntegrandBoundedBelowByIsotropy) {
  std::mt19937_64 rng(5);
  const PolarGrid g(0.1, 32, 64);
  const auto f = radial::solve_optimal_profile(AnnulusSpec(0.1), 2.0, 200);
  for (int k = 0; k < 10; ++k) {
    const auto u = ScalarField2D::combine(1.0, lift_profile(f, g), 1.0, random_direction(g, rng, 0.05));
    for (double p : {1.0, 3.0}) {
      for (double v : fp_integrand_field(u, minus_rotated_gradient(lift_arg(g)), p)) {
        EXPECT_GE(v, std::pow(2.0, p) * (1 - 1e-14));
      }
    }
  }
}

TEST(FunctionalFp, RotationEquivariance) {
  std::mt19937_64 rng(3);
  const PolarGrid g(0.05, 24, 48);
  const auto f = radial::profile_affine(AnnulusSpec(0.05), 100);
  const auto u = ScalarField2D::combine(1.0, lift_profile(f, g), 1.0, random_direction(g, rng, 0.03));
  const auto v = minus_rotated_gradient(ScalarField2D::combine(1.0, lift_arg(g), 1.0,
                                                               random_direction(g, rng, 0.03)));
  for (double p : {1.0, 2.0}) {
    const double a = functional_Fp(u, v, p);
    const double b = functional_Fp(u.rotated_one_step(), v.rotated_one_step(), p);
    EXPECT_NEAR(a, b, 1e-12 * a);
  }
}

TEST(Gateaux, MatchesCentralDifferences) {
  std::mt19937_64 rng(17);
  const PolarGrid g(0.1, 32, 64);
  const auto f = radial::profile_affine(AnnulusSpec(0.1), 100);
  const auto u = lift_profile(f, g);
  const auto v = minus_rotated_gradient(lift_arg(g));
  const double delta = 1e-5;
  for (double p : {1.0, 2.0}) {
    for (int k = 0; k < 10; ++k) {
      const auto h = random_direction(g, rng, 1.0);
      const double fd = (functional_Fp(ScalarField2D::combine(1, u, delta, h), v, p) -
                         functional_Fp(ScalarField2D::combine(1, u, -delta, h), v, p)) /
                        (2 * delta);
      const double an = gateaux_differential(u, v, p, h);
      EXPECT_NEAR(an, fd, 1e-5 * std::abs(fd)) << "p=" << p << " k=" << k;
    }
  }
}

TEST(Flux, PairFormMatchesFunctionalForm) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 200; ++k) {
    Vec2 dpsi{u(rng), u(rng)}, dtheta{u(rng), u(rng)};
    if (cross(dpsi, dtheta) < 0.0) std::swap(dpsi, dtheta);
    if (cross(dpsi, dtheta) < 1e-3) continue;
    for (double p : {1.0, 2.0, 3.5}) {
      const Vec2 a = flux_psi(dpsi, dtheta, p);
      const Vec2 b = flux_fp(dpsi, -rotate_quarter(dtheta), p);
      EXPECT_NEAR(norm(a - b), 0.0, 1e-10 * (1 + norm(a)));
      const Vec2 c = flux_theta(dpsi, dtheta, p);
      const Vec2 d = flux_fp(dtheta, rotate_quarter(dpsi), p);
      EXPECT_NEAR(norm(c - d), 0.0, 1e-10 * (1 + norm(c)));
    }
  }
}

TEST(HessianBound, Examples) {
  for (double a : {1.0, 2.0}) {
    for (double m : {1.0, 3.0}) {
      for (double p : {1.0, 2.0, 4.0}) {
        const auto r = gp_hessian_bound_check(a, m, p, 200, 42);
        EXPECT_TRUE(r) << "A=" << a << " M=" << m << " p=" << p << " margin " << r.worst_margin;
        EXPECT_NEAR(r.bound, 4 * std::pow(a, 4) / std::pow(a * a + m * m, 3), 1e-15);
      }
    }
  }
}

TEST(HessianBound, MinimumAlongAxis) {
  for (double p : {1.0, 2.0, 3.0}) {
    for (double a : {0.5, 2.0}) {
      EXPECT_NEAR(gp_function(a, a, 0.0, p), std::pow(2.0, p), 1e-14);
      EXPECT_GT(gp_function(a, 1.1 * a, 0.0, p), std::pow(2.0, p));
      EXPECT_GT(gp_function(a, 0.9 * a, 0.0, p), std::pow(2.0, p));
      EXPECT_GT(gp_function(a, a, 0.1, p), std::pow(2.0, p));
    }
  }
}

TEST(StrictConvexity, ProbeGapsAreNonNegative) {
  const PolarGrid g(0.1, 48, 96);
  const AnnulusSpec spec(0.1);
  const auto v = minus_rotated_gradient(lift_arg(g));
  const auto u0 = lift_profile(radial::profile_minimax(spec, 200), g);
  const auto u1 = lift_profile(radial::profile_affine(spec, 200), g);
  for (double gap : strict_convexity_probe(u0, u0, v, 2.0, 5)) EXPECT_NEAR(gap, 0.0, 1e-12);
  for (double gap : strict_convexity_probe(u0, u1, v, 2.0, 9)) EXPECT_GE(gap, -1e-10);

  std::mt19937_64 rng(8);
  const auto base = lift_profile(radial::profile_p1(spec, 200), g);
  for (int k = 0; k < 5; ++k) {
    const auto a = ScalarField2D::combine(1, base, 1, random_direction(g, rng, 0.05));
    const auto b = ScalarField2D::combine(1, base, 1, random_direction(g, rng, 0.05));
    for (double gap : strict_convexity_probe(a, b, v, 1.5, 5)) EXPECT_GE(gap, -1e-10);
  }
}

TEST(StrictConvexity, ConstantForRadialDirectionField) {
  const PolarGrid g(0.1, 16, 32);
  const auto v = minus_rotated_gradient(lift_arg(g));
  // |V| = 1/r ranges over [1, 10].
  EXPECT_NEAR(convexity_constant(v, 2.0), 2.0 / std::pow(4.0 + 100.0, 3), 1e-9 * 2.0 / std::pow(104.0, 3));
}

TEST(ElResidual2d, OptimalProfileConverges) {
  const auto f = radial::solve_optimal_profile(AnnulusSpec(0.1), 2.0, 400);
  EulerLagrangeResiduals prev;
  for (int k = 0; k < 3; ++k) {
    const PolarGrid g(0.1, 32 << k, 64 << k);
    const auto r = el_residual_2d(lift_profile(f, g), lift_arg(g), 2.0);
    if (k > 0) EXPECT_GT(prev.res_psi / r.res_psi, 1.8);
    EXPECT_LT(r.res_theta, 1e-9);
    EXPECT_LT(r.res_bc, 1e-9);
    prev = r;
  }
}

TEST(ElResidual2d, AffineProfileIsNotStationary) {
  const auto f = radial::profile_affine(AnnulusSpec(0.01), 400);
  double last = 0.0;
  for (int k = 0; k < 3; ++k) {
    const PolarGrid g(0.01, 32 << k, 64 << k);
    const auto r = el_residual_2d(lift_profile(f, g), lift_arg(g), 1.0);
    EXPECT_GT(r.res_psi, 1e-2);
    EXPECT_LT(r.res_theta, 1e-9);
    EXPECT_LT(r.res_bc, 1e-9);
    last = r.res_psi;
  }
  EXPECT_GT(last, 1e-2);
}

TEST(ElResidual2d, RejectsReversedOrientation) {
  const PolarGrid g(0.1, 16, 32);
  const auto psi = ScalarField2D::from_function(g, [](double r, double) { return std::log(r); });
  const auto theta = ScalarField2D::from_function(g, [](double, double phi) { return -phi; }, -1);
  EXPECT_THROW(el_residual_2d(psi, theta, 2.0), OrientationError);
}

TEST(Perturbation, ZeroAmplitudeReproducesBaseline) {
  PerturbationOptions opt;
  opt.n_r = 32;
  opt.n_phi = 64;
  const auto a = perturb_psi_test(AnnulusSpec(0.1), 2.0, 5, 0.0, 1, opt);
  const auto b = perturb_theta_test(AnnulusSpec(0.1), ProfileKind::affine, 2.0, 5, 0.0, 1, opt);
  for (const auto* r : {&a, &b}) {
    ASSERT_EQ(r->perturbed_energies.size(), 5u);
    for (const auto& [id, e] : r->perturbed_energies) EXPECT_EQ(e, r->baseline_energy);
    EXPECT_TRUE(r->violations.empty());
  }
}

TEST(Perturbation, PsiSuiteExamples) {
  const auto r = perturb_psi_test(AnnulusSpec(0.1), 2.0, 50, 0.05, 42);
  EXPECT_TRUE(r.violations.empty());
  EXPECT_EQ(r.perturbed_energies.size(), 50u);

  const double eps = 0.01;
  const double closed = kTwoPi * (1 - eps * eps + (2.0 / 3.0) * std::pow(2 * eps - 1, 2));
  const auto s = perturb_psi_test(AnnulusSpec(eps), 1.0, 50, 0.05, 7);
  EXPECT_TRUE(s.violations.empty());
  for (const auto& [id, e] : s.perturbed_energies) EXPECT_GT(e, closed) << "perturbation " << id;
}

TEST(Perturbation, ThetaSuiteExamples) {
  for (auto [kind, p] : {std::pair{ProfileKind::affine, 2.0}, {ProfileKind::optimal, 3.0}}) {
    const auto r = perturb_theta_test(AnnulusSpec(0.1), kind, p, 50, 0.05, 42);
    EXPECT_TRUE(r.violations.empty()) << radial::to_string(kind);
    for (double gap : r.convexity_gap_estimates) EXPECT_GE(gap, -r.slack);
  }
}

TEST(Perturbation, SeededRunsRepeat) {
  PerturbationOptions opt;
  opt.n_r = 32;
  opt.n_phi = 64;
  const auto a = perturb_theta_test(AnnulusSpec(0.1), ProfileKind::minimax, 1.0, 8, 0.05, 99, opt);
  const auto b = perturb_theta_test(AnnulusSpec(0.1), ProfileKind::minimax, 1.0, 8, 0.05, 99, opt);
  EXPECT_EQ(a.perturbed_energies, b.perturbed_energies);
}

TEST(Perturbation, RetryBudgetExhaustion) {
  PerturbationOptions opt;
  opt.n_r = 16;
  opt.n_phi = 32;
  opt.retry_budget = 3;
  EXPECT_THROW(perturb_psi_test(AnnulusSpec(0.1), 2.0, 3, 50.0, 1, opt), RetryBudgetError);
}
