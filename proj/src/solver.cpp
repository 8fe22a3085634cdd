#include "ssnmf/solver.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "ssnmf/norms.hpp"
#include "ssnmf/objective.hpp"
#include "ssnmf/prox.hpp"
#include "ssnmf/random.hpp"

namespace ssnmf {

namespace {

// Floor for computed Lipschitz constants so step sizes stay finite when a
// block vanishes (H = 0 gives L_W = 0).
constexpr double kMinLipschitz = 1e-12;

// Power iteration approaches the spectral norm from below; the margin keeps
// 1/L on the descent side of the true constant.
constexpr double kLipschitzMargin = 1.0 + 1e-6;

// Plain-NMF presolve budget for warm starts: cheap next to the main solve.
constexpr int kWarmStartMaxIter = 200;
constexpr double kWarmStartEpsilon = 1e-3;

void validate_spec(const ModelSpec& spec, Index p) {
  if (spec.rank < 1) throw std::invalid_argument("ModelSpec: rank must be >= 1");
  if (spec.sparsity < 0)
    throw std::invalid_argument("ModelSpec: sparsity must be >= 0");
  if (is_sparse_variant(spec.variant) && spec.sparsity > p)
    throw std::invalid_argument("ModelSpec: sparsity exceeds feature count");
  if (spec.rho0 < 0.0) throw std::invalid_argument("ModelSpec: rho0 must be >= 0");
}

void validate_config(const SolverConfig& config) {
  if (!(config.epsilon > 0.0))
    throw std::invalid_argument("SolverConfig: epsilon must be > 0");
  if (config.max_iter < 1)
    throw std::invalid_argument("SolverConfig: max_iter must be >= 1");
}

bool w_feasible(const Matrix& w, const ModelSpec& spec) {
  if ((w.array() < 0.0).any()) return false;
  switch (spec.variant) {
    case Variant::kNmfL20:
    case Variant::kOnmfL20:
    case Variant::kOnmfL20FixedRho:
      return l20_norm(w) <= spec.sparsity;
    case Variant::kNmfLc0:
    case Variant::kOnmfLc0:
      for (Index j = 0; j < w.cols(); ++j)
        if ((w.col(j).array() != 0.0).count() > spec.sparsity) return false;
      return true;
    case Variant::kNmfL0:
    case Variant::kOnmfL0:
      return l0_norm(w) <= spec.sparsity * spec.rank;
    default:
      return true;
  }
}

double ensure_finite(double objective) {
  if (!std::isfinite(objective))
    throw std::runtime_error("solver: objective became non-finite");
  return objective;
}

Matrix step_h(const Matrix& x, const Matrix& w, const Matrix& h_point,
              double rho) {
  const double l = std::max(lipschitz_h(w, rho), kMinLipschitz) * kLipschitzMargin;
  return project_nonneg(h_point - (1.0 / l) * grad_h(x, w, h_point, rho));
}

Matrix step_w(const Matrix& x, const Matrix& w_point, const Matrix& h_new,
              const ModelSpec& spec) {
  const double l = std::max(lipschitz_w(h_new), kMinLipschitz) * kLipschitzMargin;
  return prox_variant(w_point - (1.0 / l) * grad_w(x, w_point, h_new), spec);
}

// Largest rho the variant's solve will apply: the end of the geometric
// schedule for continuation variants, rho0 itself for the fixed-rho variant,
// zero for penalty-free models.
double peak_rho(const ModelSpec& spec) {
  if (spec.variant == Variant::kOnmfL20FixedRho) return spec.rho0;
  if (!is_continuation_variant(spec.variant)) return 0.0;
  const int last_stage = std::max(spec.continuation_steps, 1) - 1;
  return spec.rho0 * std::pow(std::max(spec.gamma, 1.0), last_stage);
}

}  // namespace

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::kNmf: return "nmf";
    case Variant::kOnmf: return "onmf";
    case Variant::kNmfL20: return "nmf-l20";
    case Variant::kNmfLc0: return "nmf-lc0";
    case Variant::kNmfL0: return "nmf-l0";
    case Variant::kOnmfL20: return "onmf-l20";
    case Variant::kOnmfLc0: return "onmf-lc0";
    case Variant::kOnmfL0: return "onmf-l0";
    case Variant::kOnmfL20FixedRho: return "onmf-l20-rho";
  }
  throw std::logic_error("variant_name: unknown variant");
}

Variant variant_from_name(const std::string& name) {
  for (Variant v : {Variant::kNmf, Variant::kOnmf, Variant::kNmfL20,
                    Variant::kNmfLc0, Variant::kNmfL0, Variant::kOnmfL20,
                    Variant::kOnmfLc0, Variant::kOnmfL0,
                    Variant::kOnmfL20FixedRho})
    if (name == variant_name(v)) return v;
  throw std::invalid_argument("unknown model variant: " + name);
}

bool is_continuation_variant(Variant v) {
  switch (v) {
    case Variant::kOnmf:
    case Variant::kOnmfL20:
    case Variant::kOnmfLc0:
    case Variant::kOnmfL0:
      return true;
    default:
      return false;
  }
}

bool is_sparse_variant(Variant v) {
  switch (v) {
    case Variant::kNmf:
    case Variant::kOnmf:
      return false;
    default:
      return true;
  }
}

Matrix prox_variant(const Matrix& m, const ModelSpec& spec) {
  switch (spec.variant) {
    case Variant::kNmf:
    case Variant::kOnmf:
      return project_nonneg(m);
    case Variant::kNmfL20:
    case Variant::kOnmfL20:
    case Variant::kOnmfL20FixedRho:
      return prox_row_sparse_nonneg(m, spec.sparsity);
    case Variant::kNmfLc0:
    case Variant::kOnmfLc0:
      return prox_col_sparse_nonneg(m, spec.sparsity);
    case Variant::kNmfL0:
    case Variant::kOnmfL0:
      return prox_entry_sparse_nonneg(m, spec.sparsity * spec.rank);
  }
  throw std::logic_error("prox_variant: unknown variant");
}

FactorPair init_factors(const Matrix& x, const ModelSpec& spec,
                        const SolverConfig& config) {
  if (x.rows() == 0 || x.cols() == 0)
    throw std::invalid_argument("init_factors: X is empty");
  if (!x.allFinite() || (x.array() < 0.0).any())
    throw std::invalid_argument("init_factors: X must be nonnegative and finite");
  validate_spec(spec, x.rows());

  NormalSampler rng(config.seed);
  FactorPair fp;
  fp.w = abs_normal_matrix(x.rows(), spec.rank, rng);
  fp.h = abs_normal_matrix(spec.rank, x.cols(), rng);

  if (config.init == InitMethod::kNmfWarmStart) {
    ModelSpec plain;
    plain.variant = Variant::kNmf;
    plain.rank = spec.rank;
    SolverConfig warm = config;
    warm.epsilon = kWarmStartEpsilon;
    warm.max_iter = kWarmStartMaxIter;
    auto [pair, report] = detail::palm_loop(x, plain, 0.0, fp, warm, false, {});
    fp.w = std::move(pair.w);
    fp.h = std::move(pair.h);
    fp.iterations = pair.iterations;
  }

  // The raw draw may violate a sparsity constraint; solvers require feasible
  // starts, so W lands on the constraint set here.
  fp.w = prox_variant(fp.w, spec);

  // The fit term is invariant under (W, H) -> (W/s, s*H) but the coupling
  // penalty only sees H, so the starting gauge decides how strongly a given
  // rho can act on H's shape: with |W^T W|_2 large the H-step is pure least
  // squares and the penalty never reshapes H, at any stage of the schedule.
  // Start at the gauge where the H-step's fit curvature matches the peak
  // penalty coupling rho (the penalty Hessian's entries are +-rho).
  const double rho_peak = peak_rho(spec);
  if (rho_peak > 0.0) {
    const double curvature = lipschitz_h(fp.w, 0.0);
    if (curvature > 0.0) {
      const double s = std::sqrt(curvature / rho_peak);
      fp.w /= s;
      fp.h *= s;
    }
  }

  fp.objective = objective_value(x, fp.w, fp.h, 0.0);
  return fp;
}

namespace detail {

std::pair<FactorPair, SolverReport> palm_loop(const Matrix& x,
                                              const ModelSpec& spec, double rho,
                                              const FactorPair& start,
                                              const SolverConfig& config,
                                              bool accelerate,
                                              const LoopHooks& hooks) {
  validate_spec(spec, x.rows());
  validate_config(config);
  if (rho < 0.0) throw std::invalid_argument("solver: rho must be >= 0");
  if (start.w.rows() != x.rows() || start.w.cols() != spec.rank ||
      start.h.rows() != spec.rank || start.h.cols() != x.cols())
    throw std::invalid_argument("solver: start factors do not match X and rank");
  if ((start.h.array() < 0.0).any() || !w_feasible(start.w, spec))
    throw std::invalid_argument("solver: start is infeasible for the variant");

  const auto t0 = std::chrono::steady_clock::now();

  Matrix w = start.w;
  Matrix h = start.h;
  Matrix w_prev = w;
  Matrix h_prev = h;
  double objective = ensure_finite(objective_value(x, w, h, rho));
  double tau = 1.0;

  SolverReport report;
  report.trace.reserve(static_cast<std::size_t>(config.max_iter));
  FactorPair out;

  for (int t = 1; t <= config.max_iter; ++t) {
    double omega = 0.0;
    if (accelerate) {
      const double tau_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tau * tau));
      omega = (tau - 1.0) / tau_next;
      tau = tau_next;
      if (hooks.force_zero_omega) omega = 0.0;
    }

    Matrix h_next;
    Matrix w_next;
    double objective_next = 0.0;
    bool extrapolated = false;

    if (omega != 0.0) {
      // Candidate from extrapolated points; kept only if it does not raise
      // the objective. At omega = 0 the candidate is the plain step itself,
      // so skipping straight to the fallback is exact, not a shortcut.
      const Matrix h_cand = step_h(x, w, h + omega * (h - h_prev), rho);
      const Matrix w_cand =
          step_w(x, w + omega * (w - w_prev), h_cand, spec);
      const double objective_cand = objective_value(x, w_cand, h_cand, rho);
      if (objective_cand <= objective) {
        h_next = h_cand;
        w_next = w_cand;
        objective_next = objective_cand;
        extrapolated = true;
      }
    }
    if (!extrapolated) {
      h_next = step_h(x, w, h, rho);
      w_next = step_w(x, w, h_next, spec);
      objective_next = objective_value(x, w_next, h_next, rho);
    }
    ensure_finite(objective_next);

    const double change = std::sqrt((w_next - w).squaredNorm() +
                                    (h_next - h).squaredNorm());
    const double scale =
        std::sqrt(w.squaredNorm() + h.squaredNorm()) + 1e-30;
    const double relative_change = change / scale;

    w_prev = std::move(w);
    h_prev = std::move(h);
    w = std::move(w_next);
    h = std::move(h_next);
    objective = objective_next;

    if (hooks.on_accept) hooks.on_accept(w, h);
    report.trace.push_back({t, objective, relative_change, rho, extrapolated});
    out.iterations = t;
    if (relative_change < config.epsilon) {
      report.termination = Termination::kTolerance;
      break;
    }
  }

  out.w = std::move(w);
  out.h = std::move(h);
  out.objective = objective;
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return {std::move(out), std::move(report)};
}

}  // namespace detail

std::pair<FactorPair, SolverReport> palm_solve(const Matrix& x,
                                               const ModelSpec& spec, double rho,
                                               const FactorPair& start,
                                               const SolverConfig& config) {
  return detail::palm_loop(x, spec, rho, start, config, false, {});
}

std::pair<FactorPair, SolverReport> mapalm_solve(const Matrix& x,
                                                 const ModelSpec& spec,
                                                 double rho,
                                                 const FactorPair& start,
                                                 const SolverConfig& config) {
  return detail::palm_loop(x, spec, rho, start, config, true, {});
}

std::pair<FactorPair, SolverReport> continuation_solve(
    const Matrix& x, const ModelSpec& spec, const SolverConfig& config) {
  if (!is_continuation_variant(spec.variant))
    throw std::invalid_argument(
        "continuation_solve: variant has no continuation schedule");
  if (!(spec.gamma > 1.0))
    throw std::invalid_argument("continuation_solve: gamma must be > 1");
  if (spec.continuation_steps < 1)
    throw std::invalid_argument(
        "continuation_solve: continuation_steps must be >= 1");

  const auto t0 = std::chrono::steady_clock::now();
  FactorPair current = init_factors(x, spec, config);
  SolverReport combined;
  double rho = spec.rho0;
  Index total_iterations = 0;

  for (int stage = 0; stage < spec.continuation_steps; ++stage) {
    auto [pair, stage_report] = config.accelerate
                                    ? mapalm_solve(x, spec, rho, current, config)
                                    : palm_solve(x, spec, rho, current, config);
    for (TraceEntry entry : stage_report.trace) {
      entry.iteration += total_iterations;
      combined.trace.push_back(entry);
    }
    total_iterations += pair.iterations;
    combined.termination = stage_report.termination;
    combined.rho_history.push_back(rho);
    current = std::move(pair);
    rho *= spec.gamma;
  }

  current.iterations = total_iterations;
  combined.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return {std::move(current), std::move(combined)};
}

std::pair<FactorPair, SolverReport> solve_model(const Matrix& x,
                                                const ModelSpec& spec,
                                                const SolverConfig& config) {
  if (is_continuation_variant(spec.variant))
    return continuation_solve(x, spec, config);
  const double rho =
      spec.variant == Variant::kOnmfL20FixedRho ? spec.rho0 : 0.0;
  const FactorPair start = init_factors(x, spec, config);
  return config.accelerate ? mapalm_solve(x, spec, rho, start, config)
                           : palm_solve(x, spec, rho, start, config);
}

}  // namespace ssnmf
