#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "vkoga_ie/kernel.hpp"

namespace vkoga_ie {

enum class JacobianStructure { Dense, Tridiagonal };

// Autonomous parametric initial value problem u' = f(u, mu), u(0) = u0(mu).
class IvpProblem {
 public:
  virtual ~IvpProblem() = default;

  virtual std::string id() const = 0;
  virtual Eigen::Index dimension() const = 0;
  virtual Eigen::Index parameter_dimension() const = 0;
  virtual Vector rhs(const Vector& u, const Vector& mu) const = 0;
  virtual Vector initial_value(const Vector& mu) const = 0;

  // df/du. The default is a central finite-difference approximation.
  virtual Matrix jacobian(const Vector& u, const Vector& mu) const;

  // Sparsity promise about jacobian(); lets the Newton solver use a banded solve.
  virtual JacobianStructure jacobian_structure() const { return JacobianStructure::Dense; }

  void check_state(const Vector& u) const;
  void check_parameter(const Vector& mu) const;
};

Matrix finite_difference_jacobian(const IvpProblem& problem, const Vector& u, const Vector& mu,
                                  double rel_step = 1e-6);

// Problem defined by callables; convenient for tests and bindings.
class FunctionProblem final : public IvpProblem {
 public:
  using Rhs = std::function<Vector(const Vector&, const Vector&)>;
  using Jac = std::function<Matrix(const Vector&, const Vector&)>;
  using Init = std::function<Vector(const Vector&)>;

  FunctionProblem(std::string id, Eigen::Index dimension, Eigen::Index parameter_dimension, Rhs rhs, Init initial,
                  Jac jacobian = {});

  std::string id() const override { return id_; }
  Eigen::Index dimension() const override { return dim_; }
  Eigen::Index parameter_dimension() const override { return param_dim_; }
  Vector rhs(const Vector& u, const Vector& mu) const override;
  Vector initial_value(const Vector& mu) const override;
  Matrix jacobian(const Vector& u, const Vector& mu) const override;

 private:
  std::string id_;
  Eigen::Index dim_;
  Eigen::Index param_dim_;
  Rhs rhs_;
  Init init_;
  Jac jac_;
};

enum class LinearSolver { Dense, Tridiagonal };

struct NewtonOptions {
  double tolerance = 1e-14;
  int max_iterations = 100;
  LinearSolver linear_solver = LinearSolver::Dense;

  void validate() const;
};

enum class NewtonStatus { Converged, MaxIterations, SingularJacobian, Diverged };

std::string to_string(NewtonStatus status);

struct NewtonStats {
  int iterations = 0;
  double initializer_residual_norm = 0.0;
  double final_residual_norm = 0.0;
  bool converged = false;
};

struct NewtonResult {
  Vector u;
  NewtonStats stats;
  NewtonStatus status = NewtonStatus::MaxIterations;
};

using ResidualFn = std::function<Vector(const Vector&)>;
using JacobianFn = std::function<Matrix(const Vector&)>;

// Plain Newton: u <- u - J(u)^{-1} g(u) until |g(u)|_2 <= tol. The residual is
// checked before the first update, so an exact initial guess costs 0 iterations.
NewtonResult newton_solve(const ResidualFn& residual, const JacobianFn& jacobian, Vector u_init,
                          const NewtonOptions& options = {});

// Solves J x = b for tridiagonal J (off-band entries are ignored).
Vector solve_tridiagonal(const Matrix& jacobian, const Vector& rhs);

// Maps (dt, u_prev) to a guess for the next implicit Euler state.
class StepPredictor {
 public:
  virtual ~StepPredictor() = default;
  virtual Eigen::Index input_dim() const = 0;
  virtual Eigen::Index output_dim() const = 0;
  virtual Vector predict(double dt, const Vector& u_prev) const = 0;
};

// Evaluates a kernel expansion on the concatenated input (dt, u_prev).
class ExpansionPredictor final : public StepPredictor {
 public:
  explicit ExpansionPredictor(KernelExpansion model) : model_(std::move(model)) {}
  Eigen::Index input_dim() const override { return model_.input_dim(); }
  Eigen::Index output_dim() const override { return model_.output_dim(); }
  Vector predict(double dt, const Vector& u_prev) const override;
  const KernelExpansion& model() const noexcept { return model_; }

 private:
  KernelExpansion model_;
};

Vector concat_step_input(double dt, const Vector& u);

// Initial guess strategy for each Newton solve.
class Initializer {
 public:
  enum class Kind { PreviousValue, ExplicitEuler, Surrogate };

  static Initializer previous_value() { return Initializer(Kind::PreviousValue, nullptr); }
  static Initializer explicit_euler() { return Initializer(Kind::ExplicitEuler, nullptr); }
  static Initializer surrogate(std::shared_ptr<const StepPredictor> predictor);
  static Initializer surrogate(KernelExpansion model);

  Kind kind() const noexcept { return kind_; }
  const StepPredictor* predictor() const noexcept { return predictor_.get(); }

  // Throws InputError if a surrogate does not map R^{d+1} -> R^d.
  void check_compatible(Eigen::Index dimension) const;

  Vector guess(const IvpProblem& problem, const Vector& u_prev, double dt, const Vector& mu) const;

 private:
  Initializer(Kind kind, std::shared_ptr<const StepPredictor> predictor)
      : kind_(kind), predictor_(std::move(predictor)) {}

  Kind kind_;
  std::shared_ptr<const StepPredictor> predictor_;
};

std::string to_string(Initializer::Kind kind);

// One implicit Euler step: solve u - u_prev - dt f(u, mu) = 0.
NewtonResult ie_step(const IvpProblem& problem, const Vector& u_prev, double dt, const Vector& mu,
                     const Initializer& init, const NewtonOptions& options = {});

struct Trajectory {
  double dt = 0.0;
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<NewtonStats> steps;
  // Set when a step failed; states then hold the partial trajectory.
  bool failed = false;
  NewtonStatus failure = NewtonStatus::Converged;
  std::string error;
  double wall_time_s = 0.0;

  std::size_t num_steps() const noexcept { return steps.size(); }
  long total_iterations() const;
  double mean_iterations() const;
  double mean_initializer_residual() const;
};

// Number of steps T/dt, validated to be an integer within 1e-9 relative.
std::size_t step_count(double dt, double horizon);

NewtonOptions default_newton_options(const IvpProblem& problem);

Trajectory integrate(const IvpProblem& problem, const Vector& mu, double dt, double horizon,
                     const Initializer& init, const NewtonOptions& options);
inline Trajectory integrate(const IvpProblem& problem, const Vector& mu, double dt, double horizon,
                            const Initializer& init) {
  return integrate(problem, mu, dt, horizon, init, default_newton_options(problem));
}

}  // namespace vkoga_ie
