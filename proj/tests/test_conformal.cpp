#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cloak/conformal.hpp"
#include "cloak/errors.hpp"

using namespace cloak;
using namespace cloak::conformal;

namespace {

const double kTwoPi = 2.0 * std::numbers::pi;

std::vector<AnalyticMap> all_maps() {
  return {AnalyticMap::identity(), AnalyticMap::sinh_domain(), AnalyticMap::perturbed_power(0.2, 2),
          AnalyticMap::perturbed_power(Complex(0.05, 0.1), 3)};
}

ComposedCloakMap make(const AnalyticMap& m, const radial::AmplitudeProfile& f) { return {m, f}; }

}  // namespace

TEST(AnalyticMap, NormalizationAndRoundTrip) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> rad(0.0, 1.0), ang(0.0, kTwoPi);
  for (const auto& m : all_maps()) {
    EXPECT_EQ(m.forward(0.0), Complex(0.0)) << m.name();
    EXPECT_GT(m.scale(), 0.0);
    EXPECT_NEAR(m.derivative(0.0).imag(), 0.0, 1e-15);
    for (int k = 0; k < 200; ++k) {
      const Complex w = std::polar(std::sqrt(rad(rng)), ang(rng));
      const Complex z = m.inverse(w);
      EXPECT_LE(std::abs(m.inverse(m.forward(z)) - z), 1e-12) << m.name();
      EXPECT_LE(std::abs(m.forward(z) - w), 1e-12) << m.name();
      // Psi'(z) (Psi^{-1})'(w) = 1
      EXPECT_NEAR(std::abs(m.derivative(z) * m.inverse_derivative(w) - 1.0), 0.0, 1e-12);
    }
  }
}

TEST(AnalyticMap, DerivativesMatchDifferenceQuotients) {
  const Complex w(0.3, -0.4);
  for (const auto& m : all_maps()) {
    const double h = 1e-6;
    const Complex fd = (m.inverse(w + h) - m.inverse(w - h)) / (2 * h);
    EXPECT_NEAR(std::abs(fd - m.inverse_derivative(w)), 0.0, 1e-9) << m.name();
    const Complex z = m.inverse(w);
    const Complex fd2 = (m.forward(z + Complex(0, h)) - m.forward(z - Complex(0, h))) / Complex(0, 2 * h);
    EXPECT_NEAR(std::abs(fd2 - m.derivative(z)), 0.0, 1e-9) << m.name();
  }
}

TEST(AnalyticMap, Validation) {
  EXPECT_THROW(AnalyticMap::perturbed_power(0.6, 2), ValidationError);
  EXPECT_THROW(AnalyticMap::perturbed_power(0.1, 1), ValidationError);
  EXPECT_THROW(AnalyticMap::sinh_domain().forward(Complex(0.0, 2.0)), BranchError);
  EXPECT_NO_THROW(AnalyticMap::sinh_domain().forward(Complex(0.0, 0.84)));
  EXPECT_THROW(builtin_map("mobius"), ValidationError);
  try {
    builtin_map("mobius");
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("sinh"), std::string::npos);
  }
}

TEST(AnalyticMap, CompositeChainsBothMaps) {
  const auto outer = AnalyticMap::perturbed_power(0.1, 2);
  const auto inner = AnalyticMap::sinh_domain();
  const auto c = AnalyticMap::composite(outer, inner);
  const Complex w(0.2, 0.5);
  const Complex z = c.inverse(w);
  EXPECT_NEAR(std::abs(z - std::sinh(w + 0.1 * w * w)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(c.forward(z) - w), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(c.derivative(z) * c.inverse_derivative(w) - 1.0), 0.0, 1e-12);
}

TEST(AnalyticMap, ConformalityWitness) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> rad(0.05, 0.95), ang(0.0, kTwoPi);
  for (const auto& m : all_maps()) {
    for (int k = 0; k < 50; ++k) {
      const Vec2 x = to_vec(m.inverse(std::polar(rad(rng), ang(rng))));
      EXPECT_LE(conformality_defect(m, x), 1e-6) << m.name();
    }
  }
}

TEST(CloakMap, IdentityConjugationIsRadialMap) {
  const auto f = radial::profile_p1(AnnulusSpec(0.1), 100);
  const auto m = make(AnalyticMap::identity(), f);
  for (Vec2 x : {Vec2{0.1, 0.0}, Vec2{0.3, -0.2}, Vec2{0.0, 1.0}}) {
    const double r = norm(x);
    const Vec2 expect = std::exp(f.value_at(r)) * x / r;
    const Vec2 got = evaluate_cloak_map(m, x);
    EXPECT_EQ(got.x, expect.x);
    EXPECT_EQ(got.y, expect.y);
  }
  EXPECT_THROW(evaluate_cloak_map(m, {0.05, 0.0}), OutOfAnnulusError);
  EXPECT_THROW(evaluate_cloak_map(m, {1.01, 0.0}), OutOfAnnulusError);
}

TEST(CloakMap, BoundaryContracts) {
  for (const auto& map : all_maps()) {
    for (double eps : {0.01, 0.1}) {
      const auto m = make(map, radial::solve_optimal_profile(AnnulusSpec(eps), 2.0, 200));
      const auto d = boundary_deviation(m, 256);
      EXPECT_LE(d.outer, 1e-10) << map.name();
      EXPECT_LE(d.inner, 1e-10) << map.name();
    }
  }
}

TEST(CloakMap, AnalyticJacobianMatchesDifferences) {
  const auto f = radial::profile_minimax(AnnulusSpec(0.1), 100);
  for (const auto& map : all_maps()) {
    const auto m = make(map, f);
    const Vec2 x = to_vec(map.inverse(std::polar(0.4, 1.0)));
    const Mat2 a = cloak_jacobian(m, x);
    const Mat2 b = cloak_jacobian_fd(m, x, 1e-5);
    EXPECT_LE((a - b).norm(), 1e-8 * a.norm()) << map.name();
    EXPECT_NEAR(push_forward_tensor(b).det(), 1.0, 1e-8);
  }
}

TEST(CloakMap, StencilShrinksNearTheBoundary) {
  const auto m = make(AnalyticMap::identity(), radial::profile_minimax(AnnulusSpec(0.1), 50));
  const Vec2 x{0.1 + 1e-7, 0.0};
  const double expect = radial_trace(norm(x), m.profile.slope_at(norm(x)));
  EXPECT_NEAR(pushforward_trace_at(m, x, 1e-3), expect, 1e-5);
  EXPECT_THROW(cloak_jacobian_fd(m, {0.1, 0.0}, 1e-3), OutOfAnnulusError);
}

TEST(TraceIdentity, HoldsPointwise) {
  const AnnulusSpec spec(0.1);
  const auto fi = radial::profile_minimax(spec, 100);
  EXPECT_NEAR(pushforward_trace_at(make(AnalyticMap::identity(), fi), {0.3, 0.4}, 1e-5),
              radial_trace(0.5, fi.slope_at(0.5)), 1e-6);
  for (const auto& map : {AnalyticMap::sinh_domain(), AnalyticMap::perturbed_power(0.2, 2)}) {
    for (const auto& f : {radial::profile_p1(spec, 100), fi}) {
      EXPECT_LE(trace_identity_deviation(make(map, f), 32, 64), 1e-5) << map.name();
    }
  }
}

TEST(ModifiedEnergy, IsMapIndependent) {
  const double eps = 0.01;
  const double closed = kTwoPi * (1 - eps * eps + (2.0 / 3.0) * std::pow(2 * eps - 1, 2));
  const auto f = radial::profile_p1(AnnulusSpec(eps), 200);
  for (const auto& map : all_maps()) {
    EXPECT_NEAR(modified_energy(make(map, f), 1.0), closed, 1e-8 * closed) << map.name();
  }
  const auto f2 = radial::solve_optimal_profile(AnnulusSpec(0.1), 2.0, 200);
  const double e2 = radial::energy_p(f2, 2.0).value;
  for (const auto& map : all_maps()) {
    EXPECT_NEAR(modified_energy(make(map, f2), 2.0), e2, 1e-7 * e2) << map.name();
  }
}

TEST(ModifiedEnergy, TrivialAtHalf) {
  const auto f = radial::profile_affine(AnnulusSpec(0.5), 50);
  for (double p : {1.0, 3.0}) {
    EXPECT_NEAR(modified_energy(make(AnalyticMap::sinh_domain(), f), p),
                std::pow(2.0, p) * std::numbers::pi * 0.75, 1e-10);
  }
}

TEST(Rays, LayoutAndEndpoints) {
  const double eps = 0.1;
  const auto f = radial::profile_p1(AnnulusSpec(eps), 100);
  const auto id = sample_rays(make(AnalyticMap::identity(), f), 4, 11);
  ASSERT_EQ(id.size(), 4u);
  EXPECT_NEAR(id[0].angle, std::numbers::pi / 4, 1e-15);
  for (const auto& ray : id) {
    ASSERT_EQ(ray.source.size(), 11u);
    for (std::size_t i = 0; i < ray.source.size(); ++i) {
      EXPECT_NEAR(cross(ray.source[i], ray.source.back()), 0.0, 1e-15);
      EXPECT_NEAR(norm(ray.image[i] - ray.reference_image[i]), 0.0, 1e-15);
    }
    EXPECT_NEAR(norm(ray.image.front()), 0.5, 1e-12);
  }
  for (const auto& map : all_maps()) {
    for (const auto& ray : sample_rays(make(map, f), 19, 40)) {
      EXPECT_NEAR(std::abs(map.forward(to_complex(ray.image.front()))), 0.5, 1e-8) << map.name();
      EXPECT_NEAR(norm(ray.image.back() - ray.source.back()), 0.0, 1e-8) << map.name();
      EXPECT_NEAR(std::abs(map.forward(to_complex(ray.source.back()))), 1.0, 1e-8);
    }
  }
  EXPECT_THROW(sample_rays(make(AnalyticMap::identity(), f), 0, 10), ValidationError);
}

TEST(InnerHole, DeviationIsQuadratic) {
  EXPECT_EQ(inner_hole_deviation(AnalyticMap::identity(), 0.1).deviation, 0.0);
  const auto s = inner_hole_deviation(AnalyticMap::sinh_domain(), 0.1);
  EXPECT_LE(s.deviation, s.bound);
  EXPECT_NEAR(s.bound, 0.5 * std::sinh(0.5) * 0.01, 1e-6);
  double prev = 0.0;
  for (double eps : {0.1, 0.05, 0.025}) {
    const auto d = inner_hole_deviation(AnalyticMap::sinh_domain(), eps);
    EXPECT_LE(d.deviation, d.bound);
    const double ratio = d.deviation / (eps * eps);
    if (prev > 0.0) EXPECT_LE(ratio, prev * (1 + 1e-9));
    prev = ratio;
  }
}
