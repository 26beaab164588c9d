#include "cloak/polar_grid.hpp"

#include <cmath>
#include <numbers>

#include "cloak/errors.hpp"
#include "cloak/radial.hpp"

namespace cloak::variational {

PolarGrid::PolarGrid(double epsilon, int n_r, int n_phi, RadialSpacing spacing)
    : epsilon_(epsilon), n_r_(n_r), n_phi_(n_phi), spacing_(spacing) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ValidationError("grid needs 0 < eps < 1");
  if (n_r < 8 || n_phi < 16) throw ValidationError("grid needs n_r >= 8 and n_phi >= 16");

  const double s_max = spacing == RadialSpacing::geometric ? -std::log(epsilon) : 1.0 - epsilon;
  h_s_ = s_max / (n_r - 1);
  h_phi_ = 2.0 * std::numbers::pi / n_phi;

  radii_.resize(static_cast<std::size_t>(n_r));
  metric_.resize(radii_.size());
  area_weight_.resize(radii_.size());
  for (int i = 0; i < n_r; ++i) {
    const double s = i * h_s_;
    const auto k = static_cast<std::size_t>(i);
    if (spacing == RadialSpacing::geometric) {
      radii_[k] = epsilon * std::exp(s);
      metric_[k] = radii_[k];
    } else {
      radii_[k] = epsilon + s;
      metric_[k] = 1.0;
    }
  }
  radii_.front() = epsilon;
  radii_.back() = 1.0;
  if (spacing == RadialSpacing::geometric) {
    metric_.front() = epsilon;
    metric_.back() = 1.0;
  }
  for (int i = 0; i < n_r; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const double trap = (i == 0 || i == n_r - 1) ? 0.5 * h_s_ : h_s_;
    area_weight_[k] = trap * radii_[k] * metric_[k] * h_phi_;
  }
}

Vec2 PolarGrid::point(int i, int j) const { return radius(i) * e_r(j); }

Vec2 PolarGrid::e_r(int j) const {
  const double phi = angle(j);
  return {std::cos(phi), std::sin(phi)};
}

Vec2 PolarGrid::e_theta(int j) const { return rotate_quarter(e_r(j)); }

PolarGrid PolarGrid::refined() const { return {epsilon_, 2 * n_r_, 2 * n_phi_, spacing_}; }

// ---------------------------------------------------------------------------

ScalarField2D::ScalarField2D(PolarGrid grid, std::vector<double> values, int winding)
    : grid_(std::move(grid)), values_(std::move(values)), winding_(winding) {
  if (values_.size() != grid_.size()) {
    throw ValidationError("field size does not match the grid");
  }
}

ScalarField2D ScalarField2D::from_function(const PolarGrid& grid,
                                           const std::function<double(double, double)>& f,
                                           int winding) {
  std::vector<double> values(grid.size());
  for (int i = 0; i < grid.n_r(); ++i) {
    for (int j = 0; j < grid.n_phi(); ++j) {
      values[grid.index(i, j)] = f(grid.radius(i), grid.angle(j));
    }
  }
  return {grid, std::move(values), winding};
}

double ScalarField2D::at(int i, int j) const {
  const int n = grid_.n_phi();
  const int wrapped = grid_.wrap(j);
  const int turns = (j - wrapped) / n;
  return values_[grid_.index(i, wrapped)] +
         2.0 * std::numbers::pi * static_cast<double>(winding_) * turns;
}

double ScalarField2D::d_s(int i, int j) const {
  const double h = grid_.h_s();
  const int last = grid_.n_r() - 1;
  if (i == 0) {
    return (-11.0 * at(0, j) + 18.0 * at(1, j) - 9.0 * at(2, j) + 2.0 * at(3, j)) / (6.0 * h);
  }
  if (i == last) {
    return (11.0 * at(last, j) - 18.0 * at(last - 1, j) + 9.0 * at(last - 2, j) -
            2.0 * at(last - 3, j)) /
           (6.0 * h);
  }
  return (at(i + 1, j) - at(i - 1, j)) / (2.0 * h);
}

double ScalarField2D::d_phi(int i, int j) const {
  return (at(i, j + 1) - at(i, j - 1)) / (2.0 * grid_.h_phi());
}

Vec2 ScalarField2D::gradient(int i, int j) const {
  const double dr = d_s(i, j) / grid_.metric(i);
  const double dt = d_phi(i, j) / grid_.radius(i);
  return dr * grid_.e_r(j) + dt * grid_.e_theta(j);
}

std::vector<Vec2> ScalarField2D::gradients() const {
  std::vector<Vec2> out(grid_.size());
  for (int i = 0; i < grid_.n_r(); ++i) {
    for (int j = 0; j < grid_.n_phi(); ++j) out[grid_.index(i, j)] = gradient(i, j);
  }
  return out;
}

ScalarField2D ScalarField2D::combine(double a, const ScalarField2D& u, double b,
                                     const ScalarField2D& v) {
  if (u.grid_.size() != v.grid_.size() || u.grid_.n_phi() != v.grid_.n_phi()) {
    throw ValidationError("fields live on different grids");
  }
  const double w = a * u.winding_ + b * v.winding_;
  const double w_int = std::round(w);
  if (std::abs(w - w_int) > 1e-12) {
    throw ValidationError("combination would produce a non-integral winding number");
  }
  std::vector<double> values(u.values_.size());
  for (std::size_t k = 0; k < values.size(); ++k) values[k] = a * u.values_[k] + b * v.values_[k];
  return {u.grid_, std::move(values), static_cast<int>(w_int)};
}

ScalarField2D ScalarField2D::rotated_one_step() const {
  std::vector<double> values(values_.size());
  for (int i = 0; i < grid_.n_r(); ++i) {
    for (int j = 0; j < grid_.n_phi(); ++j) values[grid_.index(i, j)] = at(i, j + 1);
  }
  return {grid_, std::move(values), winding_};
}

VectorField2D VectorField2D::rotated_one_step() const {
  // result(i, j) = R^{-1} values(i, j + 1) with R the rotation by h_phi.
  const double c = std::cos(grid.h_phi());
  const double s = std::sin(grid.h_phi());
  VectorField2D out{grid, std::vector<Vec2>(values.size())};
  for (int i = 0; i < grid.n_r(); ++i) {
    for (int j = 0; j < grid.n_phi(); ++j) {
      const Vec2 v = at(i, j + 1);
      out.values[grid.index(i, j)] = {c * v.x + s * v.y, -s * v.x + c * v.y};
    }
  }
  return out;
}

ScalarField2D lift_profile(const radial::AmplitudeProfile& profile, const PolarGrid& grid) {
  if (std::abs(profile.epsilon() - grid.epsilon()) > 1e-15) {
    throw ValidationError("profile and grid disagree on epsilon");
  }
  std::vector<double> values(grid.size());
  for (int i = 0; i < grid.n_r(); ++i) {
    const double f = profile.value_at(grid.radius(i));
    for (int j = 0; j < grid.n_phi(); ++j) values[grid.index(i, j)] = f;
  }
  return {grid, std::move(values), 0};
}

ScalarField2D lift_arg(const PolarGrid& grid) {
  return ScalarField2D::from_function(grid, [](double, double phi) { return phi; }, 1);
}

VectorField2D minus_rotated_gradient(const ScalarField2D& theta) {
  VectorField2D out{theta.grid(), theta.gradients()};
  for (auto& v : out.values) v = -rotate_quarter(v);
  return out;
}

VectorField2D rotated_gradient(const ScalarField2D& psi) {
  VectorField2D out{psi.grid(), psi.gradients()};
  for (auto& v : out.values) v = rotate_quarter(v);
  return out;
}

}  // namespace cloak::variational
