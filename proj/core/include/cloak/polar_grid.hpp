#pragma once

// Discretization of the annulus B_1 \ B_eps on a tensor polar grid.
//
// Radii are r_i = r(s_i) for a uniform computational coordinate s.  With
// uniform spacing r = s; with geometric spacing r = eps exp(s), which
// resolves the 1/r behaviour of the cloaking profiles near the inner
// circle.  Angles phi_j = 2 pi j / n_phi wrap periodically.

#include <functional>
#include <vector>

#include "cloak/annulus.hpp"

namespace cloak::radial {
class AmplitudeProfile;
}

namespace cloak::variational {

enum class RadialSpacing { uniform, geometric };

class PolarGrid {
 public:
  // Throws ValidationError unless n_r >= 8, n_phi >= 16, 0 < eps < 1.
  PolarGrid(double epsilon, int n_r, int n_phi,
            RadialSpacing spacing = RadialSpacing::geometric);

  double epsilon() const { return epsilon_; }
  int n_r() const { return n_r_; }
  int n_phi() const { return n_phi_; }
  RadialSpacing spacing() const { return spacing_; }
  std::size_t size() const { return static_cast<std::size_t>(n_r_) * n_phi_; }

  double h_s() const { return h_s_; }
  double h_phi() const { return h_phi_; }
  double radius(int i) const { return radii_[static_cast<std::size_t>(i)]; }
  // dr/ds at node i.
  double metric(int i) const { return metric_[static_cast<std::size_t>(i)]; }
  double angle(int j) const { return h_phi_ * wrap(j); }

  int wrap(int j) const { return ((j % n_phi_) + n_phi_) % n_phi_; }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * n_phi_ + static_cast<std::size_t>(wrap(j));
  }

  Vec2 point(int i, int j) const;
  Vec2 e_r(int j) const;
  Vec2 e_theta(int j) const;

  // Area weight of node (i, j): trapezoid in s times r dr/ds, rectangle in phi.
  double area_weight(int i) const { return area_weight_[static_cast<std::size_t>(i)]; }

  // Same spacing with both dimensions doubled.
  PolarGrid refined() const;

 private:
  double epsilon_;
  int n_r_;
  int n_phi_;
  RadialSpacing spacing_;
  double h_s_;
  double h_phi_;
  std::vector<double> radii_;
  std::vector<double> metric_;
  std::vector<double> area_weight_;
};

// Scalar nodal values on a polar grid.  Angle-like fields are stored as a
// real lift with an integer winding number w: crossing phi = 2 pi adds
// 2 pi w to the stored value.
class ScalarField2D {
 public:
  ScalarField2D(PolarGrid grid, std::vector<double> values, int winding = 0);

  static ScalarField2D from_function(const PolarGrid& grid,
                                     const std::function<double(double r, double phi)>& f,
                                     int winding = 0);

  const PolarGrid& grid() const { return grid_; }
  int winding() const { return winding_; }
  bool periodic_lift() const { return winding_ != 0; }
  const std::vector<double>& values() const { return values_; }

  // Value at (i, j) with j unwrapped: j outside [0, n_phi) picks up the
  // 2 pi w jumps of the lift.
  double at(int i, int j) const;

  // Central differences inside, third-order one-sided at r = eps and r = 1.
  double d_s(int i, int j) const;
  double d_phi(int i, int j) const;
  Vec2 gradient(int i, int j) const;
  std::vector<Vec2> gradients() const;

  // a u + b v on the same grid; the winding numbers combine linearly and
  // must stay integral.
  static ScalarField2D combine(double a, const ScalarField2D& u, double b,
                               const ScalarField2D& v);

  // Data shifted by one angular step: result(i, j) = this(i, j + 1).
  ScalarField2D rotated_one_step() const;

 private:
  PolarGrid grid_;
  std::vector<double> values_;
  int winding_;
};

// Cartesian vector values at the grid nodes.
struct VectorField2D {
  PolarGrid grid;
  std::vector<Vec2> values;

  Vec2 at(int i, int j) const { return values[grid.index(i, j)]; }
  // Rotates both the data and the vectors by one angular step.
  VectorField2D rotated_one_step() const;
};

// f(|x|) sampled at the grid radii.
ScalarField2D lift_profile(const radial::AmplitudeProfile& profile, const PolarGrid& grid);
// arg x as a lift with winding 1.
ScalarField2D lift_arg(const PolarGrid& grid);

// -J D theta, the direction field that turns the trace into F_p of psi.
VectorField2D minus_rotated_gradient(const ScalarField2D& theta);
// J D psi, the direction field that turns the trace into F_p of theta.
VectorField2D rotated_gradient(const ScalarField2D& psi);

}  // namespace cloak::variational
