#pragma once

#include "vkoga_ie/ode.hpp"

namespace vkoga_ie {

// Boundary states; mu = (u_l, u_r).
struct BurgersParams {
  double u_left = 0.0;
  double u_right = 0.0;

  static BurgersParams from_vector(const Vector& mu);
  Vector to_vector() const;
};

// d uniform cells on (-r, r).
struct BurgersGrid {
  Eigen::Index cells = 200;
  double half_width = 5.0;

  void validate() const;
  double cell_size() const { return 2.0 * half_width / static_cast<double>(cells); }
  // Center of cell c, c = 0..cells-1.
  double center(Eigen::Index c) const { return -half_width + (static_cast<double>(c) + 0.5) * cell_size(); }
};

// Local Lax-Friedrichs (Rusanov) flux for f(u) = u^2/2.
double rusanov_flux(double a, double b);

Vector burgers_rhs(const Vector& u, const BurgersParams& params, const BurgersGrid& grid);
Matrix burgers_jacobian(const Vector& u, const BurgersParams& params, const BurgersGrid& grid);
// Riemann step at x = 0.
Vector burgers_initial(const BurgersParams& params, const BurgersGrid& grid);

// Fluxes through the left and right domain boundary at state u.
std::pair<double, double> burgers_boundary_fluxes(const Vector& u, const BurgersParams& params);

class BurgersProblem final : public IvpProblem {
 public:
  explicit BurgersProblem(BurgersGrid grid = {});

  std::string id() const override { return "burgers"; }
  Eigen::Index dimension() const override { return grid_.cells; }
  Eigen::Index parameter_dimension() const override { return 2; }
  Vector rhs(const Vector& u, const Vector& mu) const override;
  Vector initial_value(const Vector& mu) const override;
  Matrix jacobian(const Vector& u, const Vector& mu) const override;
  JacobianStructure jacobian_structure() const override { return JacobianStructure::Tridiagonal; }

  const BurgersGrid& grid() const noexcept { return grid_; }

 private:
  BurgersGrid grid_;
};

}  // namespace vkoga_ie
