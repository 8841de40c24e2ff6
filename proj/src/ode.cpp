#include "vkoga_ie/ode.hpp"

#include <lapacke.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <optional>

namespace vkoga_ie {

void IvpProblem::check_state(const Vector& u) const {
  if (u.size() != dimension()) {
    throw InputError(id() + ": state has length " + std::to_string(u.size()) + ", expected " +
                     std::to_string(dimension()));
  }
}

void IvpProblem::check_parameter(const Vector& mu) const {
  if (mu.size() != parameter_dimension()) {
    throw InputError(id() + ": parameter has length " + std::to_string(mu.size()) + ", expected " +
                     std::to_string(parameter_dimension()));
  }
}

Matrix IvpProblem::jacobian(const Vector& u, const Vector& mu) const { return finite_difference_jacobian(*this, u, mu); }

Matrix finite_difference_jacobian(const IvpProblem& problem, const Vector& u, const Vector& mu, double rel_step) {
  const Eigen::Index d = u.size();
  Matrix jac(d, d);
  Vector probe = u;
  for (Eigen::Index j = 0; j < d; ++j) {
    const double h = rel_step * std::max(1.0, std::abs(u(j)));
    probe(j) = u(j) + h;
    const Vector plus = problem.rhs(probe, mu);
    probe(j) = u(j) - h;
    const Vector minus = problem.rhs(probe, mu);
    probe(j) = u(j);
    jac.col(j) = (plus - minus) / (2.0 * h);
  }
  return jac;
}

FunctionProblem::FunctionProblem(std::string id, Eigen::Index dimension, Eigen::Index parameter_dimension, Rhs rhs,
                                 Init initial, Jac jacobian)
    : id_(std::move(id)), dim_(dimension), param_dim_(parameter_dimension), rhs_(std::move(rhs)),
      init_(std::move(initial)), jac_(std::move(jacobian)) {
  if (dim_ < 1 || param_dim_ < 0) throw InputError("function problem: invalid dimensions");
  if (!rhs_ || !init_) throw InputError("function problem: rhs and initial value are required");
}

Vector FunctionProblem::rhs(const Vector& u, const Vector& mu) const { return rhs_(u, mu); }
Vector FunctionProblem::initial_value(const Vector& mu) const { return init_(mu); }
Matrix FunctionProblem::jacobian(const Vector& u, const Vector& mu) const {
  return jac_ ? jac_(u, mu) : finite_difference_jacobian(*this, u, mu);
}

void NewtonOptions::validate() const {
  if (!(tolerance > 0.0)) throw InputError("newton tolerance must be positive");
  if (max_iterations < 0) throw InputError("newton max_iterations must be >= 0");
}

std::string to_string(NewtonStatus status) {
  switch (status) {
    case NewtonStatus::Converged: return "converged";
    case NewtonStatus::MaxIterations: return "max_iterations";
    case NewtonStatus::SingularJacobian: return "singular_jacobian";
    case NewtonStatus::Diverged: return "diverged";
  }
  return "?";
}

namespace {

std::optional<Vector> try_solve_tridiagonal(const Matrix& jac, const Vector& b) {
  const Eigen::Index n = b.size();
  if (n == 1) {
    if (jac(0, 0) == 0.0) return std::nullopt;
    return Vector::Constant(1, b(0) / jac(0, 0));
  }
  std::vector<double> lower(static_cast<std::size_t>(n - 1)), diag(static_cast<std::size_t>(n)),
      upper(static_cast<std::size_t>(n - 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    diag[static_cast<std::size_t>(i)] = jac(i, i);
    if (i + 1 < n) {
      lower[static_cast<std::size_t>(i)] = jac(i + 1, i);
      upper[static_cast<std::size_t>(i)] = jac(i, i + 1);
    }
  }
  Vector x = b;
  const lapack_int info = LAPACKE_dgtsv(LAPACK_COL_MAJOR, static_cast<lapack_int>(n), 1, lower.data(), diag.data(),
                                        upper.data(), x.data(), static_cast<lapack_int>(n));
  if (info != 0) return std::nullopt;
  return x;
}

std::optional<Vector> try_solve_dense(const Matrix& jac, const Vector& b) {
  Eigen::PartialPivLU<Matrix> lu(jac);
  if ((lu.matrixLU().diagonal().array() == 0.0).any()) return std::nullopt;
  return Vector(lu.solve(b));
}

}  // namespace

Vector solve_tridiagonal(const Matrix& jacobian, const Vector& rhs) {
  if (jacobian.rows() != rhs.size() || jacobian.cols() != rhs.size()) {
    throw InputError("solve_tridiagonal: shape mismatch");
  }
  auto x = try_solve_tridiagonal(jacobian, rhs);
  if (!x) throw std::runtime_error("solve_tridiagonal: singular matrix");
  return *x;
}

NewtonResult newton_solve(const ResidualFn& residual, const JacobianFn& jacobian, Vector u_init,
                          const NewtonOptions& options) {
  options.validate();
  NewtonResult result{std::move(u_init), {}, NewtonStatus::MaxIterations};
  Vector g = residual(result.u);
  double norm = g.norm();
  result.stats.initializer_residual_norm = norm;
  result.stats.final_residual_norm = norm;
  if (!std::isfinite(norm)) {
    result.status = NewtonStatus::Diverged;
    return result;
  }
  if (norm <= options.tolerance) {
    result.stats.converged = true;
    result.status = NewtonStatus::Converged;
    return result;
  }

  for (int it = 1; it <= options.max_iterations; ++it) {
    const Matrix jac = jacobian(result.u);
    auto delta = options.linear_solver == LinearSolver::Tridiagonal ? try_solve_tridiagonal(jac, g)
                                                                    : try_solve_dense(jac, g);
    if (!delta || !delta->allFinite()) {
      result.status = NewtonStatus::SingularJacobian;
      return result;
    }
    result.u -= *delta;
    g = residual(result.u);
    norm = g.norm();
    result.stats.iterations = it;
    result.stats.final_residual_norm = norm;
    if (!std::isfinite(norm)) {
      result.status = NewtonStatus::Diverged;
      return result;
    }
    if (norm <= options.tolerance) {
      result.stats.converged = true;
      result.status = NewtonStatus::Converged;
      return result;
    }
  }
  return result;
}

Vector concat_step_input(double dt, const Vector& u) {
  Vector x(u.size() + 1);
  x(0) = dt;
  x.tail(u.size()) = u;
  return x;
}

Vector ExpansionPredictor::predict(double dt, const Vector& u_prev) const {
  return model_.evaluate(concat_step_input(dt, u_prev));
}

Initializer Initializer::surrogate(std::shared_ptr<const StepPredictor> predictor) {
  if (!predictor) throw InputError("surrogate initializer requires a model");
  return Initializer(Kind::Surrogate, std::move(predictor));
}

Initializer Initializer::surrogate(KernelExpansion model) {
  return surrogate(std::make_shared<const ExpansionPredictor>(std::move(model)));
}

void Initializer::check_compatible(Eigen::Index dimension) const {
  if (kind_ != Kind::Surrogate) return;
  if (predictor_->input_dim() != dimension + 1 || predictor_->output_dim() != dimension) {
    throw InputError("surrogate maps R^" + std::to_string(predictor_->input_dim()) + " -> R^" +
                     std::to_string(predictor_->output_dim()) + ", problem needs R^" +
                     std::to_string(dimension + 1) + " -> R^" + std::to_string(dimension));
  }
}

Vector Initializer::guess(const IvpProblem& problem, const Vector& u_prev, double dt, const Vector& mu) const {
  switch (kind_) {
    case Kind::PreviousValue: return u_prev;
    case Kind::ExplicitEuler: return u_prev + dt * problem.rhs(u_prev, mu);
    case Kind::Surrogate: return predictor_->predict(dt, u_prev);
  }
  return u_prev;
}

std::string to_string(Initializer::Kind kind) {
  switch (kind) {
    case Initializer::Kind::PreviousValue: return "previous_value";
    case Initializer::Kind::ExplicitEuler: return "explicit_euler";
    case Initializer::Kind::Surrogate: return "surrogate";
  }
  return "?";
}

NewtonResult ie_step(const IvpProblem& problem, const Vector& u_prev, double dt, const Vector& mu,
                     const Initializer& init, const NewtonOptions& options) {
  if (!(dt > 0.0)) throw InputError("ie_step: dt must be positive");
  problem.check_state(u_prev);
  problem.check_parameter(mu);
  init.check_compatible(problem.dimension());

  const auto residual = [&](const Vector& u) -> Vector { return u - u_prev - dt * problem.rhs(u, mu); };
  const auto jacobian = [&](const Vector& u) -> Matrix {
    Matrix jac = -dt * problem.jacobian(u, mu);
    jac.diagonal().array() += 1.0;
    return jac;
  };
  return newton_solve(residual, jacobian, init.guess(problem, u_prev, dt, mu), options);
}

long Trajectory::total_iterations() const {
  return std::accumulate(steps.begin(), steps.end(), 0L, [](long acc, const NewtonStats& s) { return acc + s.iterations; });
}

double Trajectory::mean_iterations() const {
  return steps.empty() ? 0.0 : static_cast<double>(total_iterations()) / static_cast<double>(steps.size());
}

double Trajectory::mean_initializer_residual() const {
  if (steps.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : steps) sum += s.initializer_residual_norm;
  return sum / static_cast<double>(steps.size());
}

std::size_t step_count(double dt, double horizon) {
  if (!(dt > 0.0) || !(horizon > 0.0)) throw InputError("dt and horizon must be positive");
  const double ratio = horizon / dt;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw InputError("horizon / dt = " + std::to_string(ratio) + " is not a positive integer");
  }
  return static_cast<std::size_t>(rounded);
}

NewtonOptions default_newton_options(const IvpProblem& problem) {
  NewtonOptions options;
  if (problem.jacobian_structure() == JacobianStructure::Tridiagonal) options.linear_solver = LinearSolver::Tridiagonal;
  return options;
}

Trajectory integrate(const IvpProblem& problem, const Vector& mu, double dt, double horizon, const Initializer& init,
                     const NewtonOptions& options) {
  const std::size_t steps = step_count(dt, horizon);
  problem.check_parameter(mu);
  init.check_compatible(problem.dimension());
  options.validate();

  Trajectory traj;
  traj.dt = dt;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.steps.reserve(steps);

  const auto start = std::chrono::steady_clock::now();
  traj.times.push_back(0.0);
  traj.states.push_back(problem.initial_value(mu));
  problem.check_state(traj.states.back());
  for (std::size_t i = 1; i <= steps; ++i) {
    NewtonResult step = ie_step(problem, traj.states.back(), dt, mu, init, options);
    traj.steps.push_back(step.stats);
    if (step.status != NewtonStatus::Converged) {
      traj.failed = true;
      traj.failure = step.status;
      traj.error = "step " + std::to_string(i) + ": newton " + to_string(step.status) + " (residual " +
                   std::to_string(step.stats.final_residual_norm) + ")";
      break;
    }
    traj.times.push_back(static_cast<double>(i) * dt);
    traj.states.push_back(std::move(step.u));
  }
  traj.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return traj;
}

}  // namespace vkoga_ie
