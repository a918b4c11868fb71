#include "hardyheat/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <unsupported/Eigen/MatrixFunctions>

#include "hardyheat/errors.hpp"

namespace hardyheat {

namespace {

constexpr int kStepsPerHorizon = 200;
constexpr double kNegativeFloor = -1e-14;

void check_inputs(const Eigen::MatrixXd& H, const Eigen::VectorXd& u0, const std::vector<double>& times) {
  if (H.rows() != H.cols() || H.rows() != u0.size()) throw ContractError("evolve: size mismatch");
  if (u0.size() > 0 && u0.minCoeff() < kNegativeFloor * std::max(1.0, u0.cwiseAbs().maxCoeff())) {
    throw ContractError("evolve: initial datum has negative entries");
  }
  if (times.empty()) throw ContractError("evolve: no output times");
  for (std::size_t j = 0; j < times.size(); ++j) {
    if (!(times[j] >= 0.0) || (j > 0 && !(times[j] > times[j - 1]))) {
      throw ContractError("evolve: times must be nonnegative and strictly increasing");
    }
  }
}

// Implicit Euler / Crank-Nicolson stepper with one LU per distinct step size.
class Stepper {
 public:
  Stepper(const Eigen::MatrixXd& H, Scheme scheme) : H_(H), scheme_(scheme) {}

  Eigen::VectorXd implicit_euler(const Eigen::VectorXd& u, double dt) {
    return lu(dt, 1.0).solve(u);
  }
  Eigen::VectorXd crank_nicolson(const Eigen::VectorXd& u, double dt) {
    return lu(dt, 0.5).solve(u - 0.5 * dt * (H_ * u));
  }

  std::vector<Eigen::VectorXd> run(const Eigen::VectorXd& u0, const std::vector<double>& times,
                                   double dt_max) {
    std::vector<Eigen::VectorXd> out;
    Eigen::VectorXd u = u0;
    double t = 0.0;
    bool started = false;
    for (double target : times) {
      const double span = target - t;
      if (span > 0.0) {
        const auto steps = static_cast<long>(std::ceil(span / dt_max - 1e-9));
        const double dt = span / static_cast<double>(steps);
        for (long s = 0; s < steps; ++s) {
          if (scheme_ == Scheme::implicit_euler) {
            u = implicit_euler(u, dt);
          } else if (!started) {
            // Two damped half steps before switching to Crank-Nicolson.
            u = implicit_euler(implicit_euler(u, 0.5 * dt), 0.5 * dt);
          } else {
            u = crank_nicolson(u, dt);
          }
          started = true;
        }
      }
      out.push_back(u);
      t = target;
    }
    return out;
  }

 private:
  const Eigen::PartialPivLU<Eigen::MatrixXd>& lu(double dt, double theta) {
    const auto key = std::make_pair(dt, theta);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      Eigen::MatrixXd M = theta * dt * H_;
      M.diagonal().array() += 1.0;
      it = cache_.emplace(key, Eigen::PartialPivLU<Eigen::MatrixXd>(M)).first;
    }
    return it->second;
  }

  const Eigen::MatrixXd& H_;
  Scheme scheme_;
  std::map<std::pair<double, double>, Eigen::PartialPivLU<Eigen::MatrixXd>> cache_;
};

double relative_gap(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double scale = std::max(a.norm(), 1e-300);
  return (a - b).norm() / scale;
}

}  // namespace

const char* to_string(Scheme s) noexcept {
  switch (s) {
    case Scheme::expm: return "expm";
    case Scheme::crank_nicolson: return "crank-nicolson";
    case Scheme::implicit_euler: return "implicit-euler";
  }
  return "?";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "expm") return Scheme::expm;
  if (name == "crank-nicolson" || name == "crank_nicolson" || name == "cn") return Scheme::crank_nicolson;
  if (name == "implicit-euler" || name == "implicit_euler" || name == "ie") return Scheme::implicit_euler;
  throw ConfigError("unknown scheme '" + name + "' (expected expm, crank-nicolson or implicit-euler)");
}

Eigen::MatrixXd propagator(const Eigen::MatrixXd& M, double t) {
  if (t < 0.0) throw ContractError("propagator: negative time");
  if (t == 0.0) return Eigen::MatrixXd::Identity(M.rows(), M.cols());
  Eigen::MatrixXd E = (-t * M).exp();
  return 0.5 * (E + E.transpose());
}

const Eigen::VectorXd& Trajectory::at(double t) const {
  for (std::size_t j = 0; j < times.size(); ++j) {
    if (std::abs(times[j] - t) <= 1e-12 * std::max(1.0, std::abs(t))) return states[j];
  }
  throw ContractError("Trajectory::at: time not stored");
}

Trajectory evolve(const Eigen::MatrixXd& H, const Eigen::VectorXd& u0, const std::vector<double>& times,
                  Scheme scheme) {
  check_inputs(H, u0, times);
  Trajectory traj;
  traj.times = times;
  traj.scheme = scheme;
  if (scheme == Scheme::expm) {
    for (double t : times) traj.states.push_back(t == 0.0 ? u0 : Eigen::VectorXd(propagator(H, t) * u0));
    return traj;
  }
  const double dt_max = times.back() / kStepsPerHorizon;
  if (!(dt_max > 0.0)) {
    traj.states.assign(times.size(), u0);
    return traj;
  }
  Stepper stepper(H, scheme);
  const auto coarse = stepper.run(u0, times, dt_max);
  const auto fine = stepper.run(u0, times, 0.5 * dt_max);
  if (scheme == Scheme::crank_nicolson) {
    // One Richardson level removes the dt^2 term.
    for (std::size_t j = 0; j < times.size(); ++j) {
      traj.time_error = std::max(traj.time_error, relative_gap(fine[j], coarse[j]));
      traj.states.push_back(fine[j] + (fine[j] - coarse[j]) / 3.0);
    }
    return traj;
  }
  // Implicit Euler: two Richardson levels (dt, dt/2, dt/4) remove dt and dt^2.
  const auto finest = stepper.run(u0, times, 0.25 * dt_max);
  for (std::size_t j = 0; j < times.size(); ++j) {
    const Eigen::VectorXd r1 = 2.0 * fine[j] - coarse[j];
    const Eigen::VectorXd r2 = 2.0 * finest[j] - fine[j];
    traj.time_error = std::max(traj.time_error, relative_gap(finest[j], fine[j]));
    traj.states.push_back(r2 + (r2 - r1) / 3.0);
  }
  return traj;
}

Trajectory evolve(const DiscreteOperator& op, const Eigen::VectorXd& u0, const std::vector<double>& times,
                  Scheme scheme) {
  auto traj = evolve(op.hamiltonian(), u0, times, scheme);
  traj.c = op.strength();
  traj.k = op.truncation();
  return traj;
}

KernelMatrix heat_kernel(const DiscreteOperator& op, double t) {
  if (!(t > 0.0)) throw ContractError("heat_kernel: t must be positive");
  KernelMatrix K;
  K.t = t;
  K.c = op.strength();
  K.k = op.truncation();
  K.cell_volume = op.grid().cell_volume();
  K.entries = propagator(op.hamiltonian(), t) / K.cell_volume;
  return K;
}

std::vector<double> default_k_schedule(const DiscreteOperator& op) {
  const auto& V = op.potential();
  if (V.size() == 0 || V.maxCoeff() <= 0.0) return {1.0};
  const double cap = V.maxCoeff();
  const double floor = V.minCoeff();
  std::vector<double> ks;
  // Start at the power of 4 strictly below min V so that every node is cut.
  double k = std::pow(4.0, std::floor(std::log(floor) / std::log(4.0)));
  if (k >= floor) k *= 0.25;
  for (; k < cap; k *= 4.0) ks.push_back(k);
  ks.push_back(cap);
  ks.push_back(4.0 * cap);
  return ks;
}

MinimalSolution minimal_solution(const DiscreteOperator& op, const Eigen::VectorXd& u0,
                                 const std::vector<double>& times, std::vector<double> k_schedule,
                                 Scheme scheme) {
  if (k_schedule.empty()) k_schedule = default_k_schedule(op);
  for (std::size_t j = 0; j < k_schedule.size(); ++j) {
    if (!(k_schedule[j] > 0.0) || (j > 0 && !(k_schedule[j] > k_schedule[j - 1]))) {
      throw ConfigError("k_schedule must be positive and strictly increasing");
    }
  }
  MinimalSolution out;
  out.mode = op.strength() > op.exponents().c_star() ? MinimalSolution::Mode::divergence
                                                     : MinimalSolution::Mode::convergence;
  out.ks = k_schedule;
  out.monotonicity_tolerance = 1e-12 * std::max(1.0, u0.cwiseAbs().maxCoeff());
  out.worst_monotonicity = INFINITY;
  for (double k : k_schedule) {
    out.levels.push_back(evolve(op.with_truncation(k), u0, times, scheme));
    if (out.levels.size() < 2) continue;
    const auto& prev = out.levels[out.levels.size() - 2];
    const auto& cur = out.levels.back();
    for (std::size_t j = 0; j < times.size(); ++j) {
      const double worst = (cur.states[j] - prev.states[j]).minCoeff();
      out.worst_monotonicity = std::min(out.worst_monotonicity, worst);
      if (worst < -out.monotonicity_tolerance) {
        throw InvariantViolation("minimal_solution: u_k decreased in k by " + std::to_string(-worst) +
                                 " at t=" + std::to_string(times[j]) + ", k=" + std::to_string(k));
      }
    }
  }
  out.solution = out.levels.back();
  if (out.levels.size() >= 2) {
    const auto& prev = out.levels[out.levels.size() - 2];
    for (std::size_t j = 0; j < times.size(); ++j) {
      const double scale = std::max(out.solution.states[j].cwiseAbs().maxCoeff(), 1e-300);
      out.last_increment =
          std::max(out.last_increment, (out.solution.states[j] - prev.states[j]).cwiseAbs().maxCoeff() / scale);
    }
  } else {
    out.worst_monotonicity = 0.0;
  }
  out.converged = out.mode == MinimalSolution::Mode::convergence && out.last_increment <= 1e-6;
  return out;
}

std::vector<double> duhamel_residual(const Trajectory& traj, const Eigen::VectorXd& u0,
                                     const DiscreteOperator& op, int points) {
  if (points < 3 || points % 2 == 0) throw ConfigError("duhamel_residual: Simpson needs an odd count >= 3");
  const Eigen::MatrixXd& L0 = op.free_operator();
  const Eigen::MatrixXd H = op.hamiltonian();
  const Eigen::VectorXd W = op.truncated_potential();
  const double hd = op.grid().cell_volume();
  std::vector<double> out;
  for (std::size_t j = 0; j < traj.times.size(); ++j) {
    const double t = traj.times[j];
    const Eigen::VectorXd& u = traj.states[j];
    if (t == 0.0) {
      out.push_back(0.0);
      continue;
    }
    const double ds = t / (points - 1);
    const Eigen::MatrixXd E = propagator(L0, ds);
    const Eigen::MatrixXd F = propagator(H, ds);
    Eigen::VectorXd us = u0;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(u0.size());
    for (int m = 0; m < points; ++m) {
      const double wgt = (m == 0 || m == points - 1) ? 1.0 : (m % 2 ? 4.0 : 2.0);
      acc = E * acc + (wgt * ds / 3.0) * W.cwiseProduct(us);
      us = F * us;
    }
    const Eigen::VectorXd free = propagator(L0, t) * u0;
    const double norm_u = std::max(l2_norm(u, hd), 1e-300);
    out.push_back(l2_norm(u - free - acc, hd) / norm_u);
  }
  return out;
}

double l2_norm(const Eigen::VectorXd& f, double cell_volume) {
  return std::sqrt(cell_volume) * f.norm();
}

}  // namespace hardyheat
