#include "vkoga_ie/burgers.hpp"

#include <cmath>

namespace vkoga_ie {

namespace {

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

struct FluxDerivative {
  double da;
  double db;
};

// Subgradient of max(|a|, |b|): the b branch on ties, sign(0) = 0.
FluxDerivative rusanov_flux_derivative(double a, double b) {
  const double lambda = std::max(std::abs(a), std::abs(b));
  double dlambda_da = 0.0;
  double dlambda_db = 0.0;
  if (std::abs(a) > std::abs(b)) {
    dlambda_da = sign(a);
  } else {
    dlambda_db = sign(b);
  }
  const double jump = b - a;
  return {0.5 * a - 0.5 * dlambda_da * jump + 0.5 * lambda, 0.5 * b - 0.5 * dlambda_db * jump - 0.5 * lambda};
}

void check_length(const Vector& u, const BurgersGrid& grid) {
  if (u.size() != grid.cells) {
    throw InputError("burgers: state has length " + std::to_string(u.size()) + ", grid has " +
                     std::to_string(grid.cells) + " cells");
  }
}

}  // namespace

BurgersParams BurgersParams::from_vector(const Vector& mu) {
  if (mu.size() != 2) throw InputError("burgers: parameter must be (u_l, u_r)");
  return {mu(0), mu(1)};
}

Vector BurgersParams::to_vector() const { return Vector{{u_left, u_right}}; }

void BurgersGrid::validate() const {
  if (cells < 1) throw InputError("burgers grid: need at least one cell");
  if (!(half_width > 0.0)) throw InputError("burgers grid: half width must be positive");
}

double rusanov_flux(double a, double b) {
  const double lambda = std::max(std::abs(a), std::abs(b));
  return 0.5 * (0.5 * a * a + 0.5 * b * b) - 0.5 * lambda * (b - a);
}

Vector burgers_rhs(const Vector& u, const BurgersParams& params, const BurgersGrid& grid) {
  check_length(u, grid);
  const Eigen::Index d = grid.cells;
  const double inv_h = 1.0 / grid.cell_size();
  Vector out(d);
  double left = rusanov_flux(params.u_left, u(0));
  for (Eigen::Index c = 0; c < d; ++c) {
    const double right = rusanov_flux(u(c), c + 1 < d ? u(c + 1) : params.u_right);
    out(c) = -(right - left) * inv_h;
    left = right;
  }
  return out;
}

Matrix burgers_jacobian(const Vector& u, const BurgersParams& params, const BurgersGrid& grid) {
  check_length(u, grid);
  const Eigen::Index d = grid.cells;
  const double inv_h = 1.0 / grid.cell_size();
  Matrix jac = Matrix::Zero(d, d);
  // interface c sits between cells c-1 and c; interface 0 and d touch the ghost states
  FluxDerivative left = rusanov_flux_derivative(params.u_left, u(0));
  for (Eigen::Index c = 0; c < d; ++c) {
    const FluxDerivative right = rusanov_flux_derivative(u(c), c + 1 < d ? u(c + 1) : params.u_right);
    if (c > 0) jac(c, c - 1) = left.da * inv_h;
    jac(c, c) = -(right.da - left.db) * inv_h;
    if (c + 1 < d) jac(c, c + 1) = -right.db * inv_h;
    left = right;
  }
  return jac;
}

Vector burgers_initial(const BurgersParams& params, const BurgersGrid& grid) {
  grid.validate();
  Vector u(grid.cells);
  for (Eigen::Index c = 0; c < grid.cells; ++c) u(c) = grid.center(c) < 0.0 ? params.u_left : params.u_right;
  return u;
}

std::pair<double, double> burgers_boundary_fluxes(const Vector& u, const BurgersParams& params) {
  if (u.size() < 1) throw InputError("burgers: empty state");
  return {rusanov_flux(params.u_left, u(0)), rusanov_flux(u(u.size() - 1), params.u_right)};
}

BurgersProblem::BurgersProblem(BurgersGrid grid) : grid_(grid) { grid_.validate(); }

Vector BurgersProblem::rhs(const Vector& u, const Vector& mu) const {
  return burgers_rhs(u, BurgersParams::from_vector(mu), grid_);
}

Vector BurgersProblem::initial_value(const Vector& mu) const {
  return burgers_initial(BurgersParams::from_vector(mu), grid_);
}

Matrix BurgersProblem::jacobian(const Vector& u, const Vector& mu) const {
  return burgers_jacobian(u, BurgersParams::from_vector(mu), grid_);
}

}  // namespace vkoga_ie
