#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <mutex>
#include <optional>
#include <random>
#include <thread>
#include <variant>
#include <vector>

#include "qspeed/device.hpp"
#include "qspeed/fidelity.hpp"
#include "qspeed/linalg.hpp"

namespace qspeed {

struct OptimizerConfig {
  int iterations = 5000;
  int seeds = 50;
  double learning_rate = 0.02;  // step per unit gradient, in cap-scaled units
  double momentum = 0.9;        // Nesterov momentum coefficient
  double cap = 0.0;             // amplitude bound, rad/s; <= 0 resolves to 40 g
  std::uint64_t rng_seed_base = 1;
  int segments = 40;       // segment count of the segmented protocol
  int grape_steps = 10000;  // fine-step count of the GRAPE protocol

  void validate() const {
    if (iterations < 0) throw std::invalid_argument("OptimizerConfig: iterations < 0");
    if (seeds < 1) throw std::invalid_argument("OptimizerConfig: seeds < 1");
    if (learning_rate <= 0) throw std::invalid_argument("OptimizerConfig: learning_rate <= 0");
    if (momentum < 0 || momentum >= 1) {
      throw std::invalid_argument("OptimizerConfig: momentum must be in [0, 1)");
    }
    if (segments < 1 || grape_steps < 1) {
      throw std::invalid_argument("OptimizerConfig: step counts must be positive");
    }
  }
  double resolve_cap(double g) const { return cap > 0 ? cap : 40.0 * g; }
};

struct OptimizationResult {
  std::variant<PulseSchedule, OrtPulseSchedule> best_schedule;
  double best_fidelity = 0.0;
  std::vector<double> fidelity_trace;  // per-iteration fidelity, entry 0 = initial
  std::vector<double> best_params;     // flat amplitudes of the best iterate
  std::uint64_t seed_used = 0;
  double wall_time = 0.0;  // seconds

  int iterations_run() const { return int(fidelity_trace.size()) - 1; }
  const PulseSchedule& schedule() const {
    return std::get<PulseSchedule>(best_schedule);
  }
  const OrtPulseSchedule& ort_schedule() const {
    return std::get<OrtPulseSchedule>(best_schedule);
  }
};

// A piecewise-constant control problem in a fixed operator frame: static
// Hamiltonian plus one control operator per parameter channel, evolved over
// equal time steps. Parameters are laid out step-major, channels within a
// step in the order of `controls`.
struct ControlProblem {
  Matrix h_static;
  std::vector<Matrix> controls;
  Matrix target_embedded;  // target gate embedded in the model space
  int fidelity_dim = 0;    // d entering the average-fidelity formula
  int steps = 0;
  double total_time = 0.0;
  double cap = 0.0;

  int dim() const { return int(h_static.rows()); }
  std::size_t param_count() const { return std::size_t(steps) * controls.size(); }
};

inline double sinc(double x) {
  return std::abs(x) < 1e-4 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
}

// Propagates a ControlProblem and differentiates the average gate fidelity
// through the step product analytically. Each step unitary is formed by
// Hermitian eigendecomposition; its derivative along a control operator C is
//   dU = V (A o K) V^dag,  A = V^dag C V,
// with the divided-difference kernel of exp(-i w dt)
//   K_pq = -i dt exp(-i (w_p + w_q) dt / 2) sinc((w_p - w_q) dt / 2),
// which is exact for degenerate and non-degenerate eigenvalue pairs alike.
class Propagator {
 public:
  explicit Propagator(const ControlProblem& prob) : prob_(&prob) {
    const int n = prob.steps;
    eigvals_.resize(n);
    eigvecs_.resize(n);
    unitaries_.resize(n);
  }

  // Forward pass: total unitary and fidelity.
  double fidelity(const std::vector<double>& params) {
    forward(params);
    return fidelity_value();
  }

  // Forward plus reverse pass; writes dF/dOmega (physical units, 1/(rad/s))
  // into grad. Returns the fidelity.
  double fidelity_and_gradient(const std::vector<double>& params,
                               std::vector<double>& grad) {
    forward(params);
    const double f = fidelity_value();
    const int dim = prob_->dim();
    const int n_ch = int(prob_->controls.size());
    const double dt = step_dt();
    grad.assign(prob_->param_count(), 0.0);

    const Matrix t_dag = prob_->target_embedded.adjoint();
    Matrix left = total_;                         // L_{m+1} = U_m ... U_0
    Matrix right = Matrix::Identity(dim, dim);    // R_m = U_{N-1} ... U_{m+1}
    Matrix kernel(dim, dim), w_mat(dim, dim), b(dim, dim), e(dim, dim);
    const double fid_scale =
        2.0 / (double(prob_->fidelity_dim) * (prob_->fidelity_dim + 1.0));
    const Complex c_conj = std::conj(overlap_);

    for (int m = prob_->steps - 1; m >= 0; --m) {
      const Matrix& v = eigvecs_[m];
      const Eigen::VectorXd& w = eigvals_[m];
      left = unitaries_[m].adjoint() * left;      // now L_m = U_{m-1} ... U_0
      w_mat = left * t_dag * right;               // W_m = L_m T^dag R_m
      for (int p = 0; p < dim; ++p) {
        for (int q = 0; q < dim; ++q) {
          kernel(p, q) = -IM * dt *
                         std::exp(-IM * (0.5 * (w(p) + w(q)) * dt)) *
                         sinc(0.5 * (w(p) - w(q)) * dt);
        }
      }
      b = v.adjoint() * w_mat * v;
      // dc/dtheta_k = sum_ab (C_k)_ab E_ab with E = conj(V) (B^T o K) V^T
      e = v.conjugate() * Matrix(b.transpose().cwiseProduct(kernel)) * v.transpose();
      for (int k = 0; k < n_ch; ++k) {
        const Complex dc = (prob_->controls[k].array() * e.array()).sum();
        grad[std::size_t(m) * n_ch + k] = fid_scale * (c_conj * dc).real();
      }
      right = right * unitaries_[m];
    }
    return f;
  }

  const Matrix& total_unitary() const { return total_; }

 private:
  double step_dt() const { return prob_->total_time / prob_->steps; }

  void forward(const std::vector<double>& params) {
    const int dim = prob_->dim();
    const int n_ch = int(prob_->controls.size());
    const double dt = step_dt();
    Matrix h(dim, dim);
    total_ = Matrix::Identity(dim, dim);
    for (int m = 0; m < prob_->steps; ++m) {
      h = prob_->h_static;
      for (int k = 0; k < n_ch; ++k) {
        h += params[std::size_t(m) * n_ch + k] * prob_->controls[k];
      }
      solver_.compute(h);
      if (solver_.info() != Eigen::Success) {
        throw std::runtime_error("Propagator: eigendecomposition failed");
      }
      eigvals_[m] = solver_.eigenvalues();
      eigvecs_[m] = solver_.eigenvectors();
      Vector phases(dim);
      for (int p = 0; p < dim; ++p) {
        phases(p) = std::exp(-IM * (eigvals_[m](p) * dt));
      }
      unitaries_[m] = eigvecs_[m] * phases.asDiagonal() * eigvecs_[m].adjoint();
      total_ = unitaries_[m] * total_;
    }
    overlap_ = (prob_->target_embedded.adjoint() * total_).trace();
  }

  double fidelity_value() const {
    const double d = double(prob_->fidelity_dim);
    const double a = std::abs(overlap_);
    return (a * a + d) / (d * (d + 1.0));
  }

  const ControlProblem* prob_;
  Eigen::SelfAdjointEigenSolver<Matrix> solver_;
  std::vector<Eigen::VectorXd> eigvals_;
  std::vector<Matrix> eigvecs_;
  std::vector<Matrix> unitaries_;
  Matrix total_;
  Complex overlap_{0.0, 0.0};
};

inline ControlProblem make_segmented_problem(const DeviceParams& p,
                                             const TargetGate& target,
                                             double total_time, int steps,
                                             double cap) {
  p.validate();
  if (target.dim != p.dim()) {
    throw std::invalid_argument("control problem: target dimension does not match device");
  }
  ControlProblem prob;
  prob.h_static = coupling_hamiltonian(p);
  prob.controls = control_operators(p.d_site);
  prob.target_embedded = target.matrix;
  prob.fidelity_dim = target.dim;
  prob.steps = steps;
  prob.total_time = total_time;
  prob.cap = cap;
  return prob;
}

inline ControlProblem make_ort_problem(const DeviceParams& p,
                                       const TargetGate& target,
                                       double total_time, int steps,
                                       double cap) {
  p.validate();
  if (target.dim != p.dim()) {
    throw std::invalid_argument("control problem: target dimension does not match device");
  }
  const int levels = p.ort_levels();
  ControlProblem prob;
  prob.h_static = ort_static_hamiltonian(p, levels);
  const std::array<Matrix, 2> drives = ort_drive_operators(levels);
  prob.controls = {drives[0], drives[1]};
  prob.target_embedded = embed_target(target, p.d_site, levels);
  prob.fidelity_dim = target.dim;
  prob.steps = steps;
  prob.total_time = total_time;
  prob.cap = cap;
  return prob;
}

// Exact gradient of the infidelity r = 1 - F with respect to every segment
// amplitude of a schedule, same layout as PulseSchedule::amplitudes.
inline std::vector<double> infidelity_gradient(const DeviceParams& p,
                                               const PulseSchedule& s,
                                               const TargetGate& target) {
  ControlProblem prob =
      make_segmented_problem(p, target, s.total_time, s.segments, s.cap);
  Propagator prop(prob);
  std::vector<double> grad;
  prop.fidelity_and_gradient(s.amplitudes, grad);
  for (double& g : grad) g = -g;  // dr = -dF
  return grad;
}

// Nesterov-momentum gradient descent on the infidelity of a ControlProblem,
// from a seeded uniform random initialization in [-cap/10, cap/10]. Updates
// run in cap-scaled parameter units; every update is followed by a clamp
// into [-cap, cap]. Returns the best iterate seen, not the last.
inline OptimizationResult optimize_problem(const ControlProblem& prob,
                                           const OptimizerConfig& cfg,
                                           std::uint64_t seed) {
  cfg.validate();
  const auto t_start = std::chrono::steady_clock::now();
  Propagator prop(prob);
  const std::size_t n = prob.param_count();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> init(-prob.cap / 10.0, prob.cap / 10.0);
  std::vector<double> theta(n), velocity(n, 0.0), grad(n), best(n);
  for (double& th : theta) th = init(rng);
  best = theta;

  OptimizationResult result;
  result.seed_used = seed;
  result.fidelity_trace.reserve(cfg.iterations + 1);
  double best_f = -1.0;

  for (int it = 0; it < cfg.iterations; ++it) {
    const double f = prop.fidelity_and_gradient(theta, grad);
    result.fidelity_trace.push_back(f);
    if (f > best_f) {
      best_f = f;
      best = theta;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double g_scaled = -grad[i] * prob.cap;  // dr/d(theta/cap)
      velocity[i] = cfg.momentum * velocity[i] + g_scaled;
      const double step = cfg.learning_rate * (g_scaled + cfg.momentum * velocity[i]);
      theta[i] = std::clamp(theta[i] - step * prob.cap, -prob.cap, prob.cap);
    }
  }
  const double f_final = prop.fidelity(theta);
  result.fidelity_trace.push_back(f_final);
  if (f_final > best_f) {
    best_f = f_final;
    best = theta;
  }
  result.best_fidelity = best_f;
  result.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  result.best_params = std::move(best);  // caller packs this into its schedule type
  return result;
}

// Segmented-protocol optimization of a single seed.
inline OptimizationResult optimize_quopt(const DeviceParams& p,
                                         const TargetGate& target,
                                         double total_time,
                                         const OptimizerConfig& cfg,
                                         std::uint64_t seed) {
  const double cap = cfg.resolve_cap(p.g);
  ControlProblem prob =
      make_segmented_problem(p, target, total_time, cfg.segments, cap);
  OptimizationResult result = optimize_problem(prob, cfg, seed);
  PulseSchedule s = PulseSchedule::zeros(total_time, cfg.segments, p.d_site, cap);
  s.amplitudes = result.best_params;
  result.best_schedule = std::move(s);
  return result;
}

inline OptimizationResult optimize_quopt(const DeviceParams& p,
                                         const TargetGate& target,
                                         double total_time,
                                         const OptimizerConfig& cfg) {
  return optimize_quopt(p, target, total_time, cfg, cfg.rng_seed_base);
}

// Fine-step GRAPE optimization of a single seed. With ort=false this is the
// multi-drive control set at grape_steps steps; with ort=true it is the two
// per-qudit envelopes under the anharmonic model.
inline OptimizationResult optimize_grape(const DeviceParams& p,
                                         const TargetGate& target,
                                         double total_time,
                                         const OptimizerConfig& cfg, bool ort,
                                         std::uint64_t seed) {
  const double cap = cfg.resolve_cap(p.g);
  if (ort) {
    ControlProblem prob =
        make_ort_problem(p, target, total_time, cfg.grape_steps, cap);
    OptimizationResult result = optimize_problem(prob, cfg, seed);
    OrtPulseSchedule s = OrtPulseSchedule::zeros(total_time, cfg.grape_steps);
    s.envelope = result.best_params;
    result.best_schedule = std::move(s);
    return result;
  }
  ControlProblem prob =
      make_segmented_problem(p, target, total_time, cfg.grape_steps, cap);
  OptimizationResult result = optimize_problem(prob, cfg, seed);
  PulseSchedule s =
      PulseSchedule::zeros(total_time, cfg.grape_steps, p.d_site, cap);
  s.amplitudes = result.best_params;
  result.best_schedule = std::move(s);
  return result;
}

inline OptimizationResult optimize_grape(const DeviceParams& p,
                                         const TargetGate& target,
                                         double total_time,
                                         const OptimizerConfig& cfg,
                                         bool ort) {
  return optimize_grape(p, target, total_time, cfg, ort, cfg.rng_seed_base);
}

// Worker-thread budget: QSPEED_THREADS when set, hardware concurrency
// otherwise.
inline int thread_budget() {
  if (const char* env = std::getenv("QSPEED_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return int(v);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? int(hc) : 1;
}

// Runs one optimization per seed in rng_seed_base .. rng_seed_base+seeds-1
// and keeps the best result. Ties break toward the lowest seed, so the
// outcome is independent of how many worker threads executed the seeds.
template <typename RunOne>
OptimizationResult multi_seed_search(RunOne&& run_one,
                                     const OptimizerConfig& cfg) {
  cfg.validate();
  const int n = cfg.seeds;
  std::vector<std::optional<OptimizationResult>> results(n);
  const int workers = std::min(thread_budget(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) results[i] = run_one(cfg.rng_seed_base + i);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
          try {
            results[i] = run_one(cfg.rng_seed_base + i);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
            return;
          }
        }
      });
    }
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }
  int best = 0;
  for (int i = 1; i < n; ++i) {
    if (results[i]->best_fidelity > results[best]->best_fidelity) best = i;
  }
  return std::move(*results[best]);
}

}  // namespace qspeed
