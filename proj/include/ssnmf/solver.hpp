#ifndef SSNMF_SOLVER_HPP
#define SSNMF_SOLVER_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ssnmf/types.hpp"

namespace ssnmf {

enum class Variant {
  kNmf,             // nonnegativity only
  kOnmf,            // nonnegativity + orthogonality penalty with continuation
  kNmfL20,          // W limited to k nonzero rows
  kNmfLc0,          // W limited to k nonzeros per column
  kNmfL0,           // W limited to k*r nonzeros in total
  kOnmfL20,         // row-sparse W + penalty with continuation
  kOnmfLc0,         // column-sparse W + penalty with continuation
  kOnmfL0,          // entry-sparse W + penalty with continuation
  kOnmfL20FixedRho, // row-sparse W + penalty at one fixed weight, no schedule
};

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);

// Variants whose penalty weight follows the geometric continuation schedule.
bool is_continuation_variant(Variant v);
// Variants with a row/column/entry sparsity constraint on W.
bool is_sparse_variant(Variant v);

struct ModelSpec {
  Variant variant = Variant::kNmf;
  Index rank = 1;
  // Sparsity level k. Rows for *_L20, entries per column for *_Lc0, and for
  // *_L0 the total budget is k * rank. Ignored by NMF/ONMF.
  Index sparsity = 0;
  double rho0 = 0.1;          // first penalty weight; the fixed weight for kOnmfL20FixedRho
  double gamma = 1.5;         // penalty growth factor, > 1
  int continuation_steps = 10;
};

enum class InitMethod { kRandomNormalAbs, kNmfWarmStart };

struct SolverConfig {
  double epsilon = 1e-3;
  int max_iter = 2000;
  bool accelerate = true;
  std::uint32_t seed = 0;
  InitMethod init = InitMethod::kRandomNormalAbs;
};

struct FactorPair {
  Matrix w;  // p x r
  Matrix h;  // r x n
  double objective = 0.0;
  Index iterations = 0;
};

enum class Termination { kTolerance, kMaxIter };

struct TraceEntry {
  Index iteration = 0;
  double objective = 0.0;
  double relative_change = 0.0;
  double rho = 0.0;
  bool accepted_extrapolation = false;
};

struct SolverReport {
  std::vector<TraceEntry> trace;
  Termination termination = Termination::kMaxIter;
  double wall_time = 0.0;  // seconds; excluded from serialized reports
  std::vector<double> rho_history;
};

// Dispatch onto the variant's constraint set for W.
Matrix prox_variant(const Matrix& m, const ModelSpec& spec);

// Starting factors. kRandomNormalAbs draws |N(0,1)| entries (W first, then H,
// column by column); kNmfWarmStart runs a short plain-NMF solve from such a
// draw. Either way W is projected onto the variant's constraint set so the
// start is feasible.
FactorPair init_factors(const Matrix& x, const ModelSpec& spec,
                        const SolverConfig& config);

// Proximal alternating minimization at fixed penalty weight rho: H-step then
// W-step with 1/Lipschitz step sizes. Stops when the relative iterate change
// drops below config.epsilon or at max_iter.
std::pair<FactorPair, SolverReport> palm_solve(const Matrix& x,
                                               const ModelSpec& spec, double rho,
                                               const FactorPair& start,
                                               const SolverConfig& config);

// Accelerated variant: extrapolates both blocks with the Nesterov weight
// omega_t and accepts the candidate only if the objective does not increase,
// falling back to a plain PALM step otherwise. The tau schedule is never
// reset, fallback or not.
std::pair<FactorPair, SolverReport> mapalm_solve(const Matrix& x,
                                                 const ModelSpec& spec,
                                                 double rho,
                                                 const FactorPair& start,
                                                 const SolverConfig& config);

// Penalty continuation: continuation_steps solves with rho growing by gamma
// after each, each warm-started from the previous solution. Requires a
// continuation variant.
std::pair<FactorPair, SolverReport> continuation_solve(const Matrix& x,
                                                       const ModelSpec& spec,
                                                       const SolverConfig& config);

// Full pipeline for one seed: init_factors, then the solve the variant calls
// for (continuation schedule, fixed weight, or unpenalized).
std::pair<FactorPair, SolverReport> solve_model(const Matrix& x,
                                                const ModelSpec& spec,
                                                const SolverConfig& config);

namespace detail {

// Test hooks for the shared PALM/maPALM loop. on_accept sees every accepted
// iterate; force_zero_omega pins the extrapolation weight at 0 so maPALM must
// reproduce PALM exactly.
struct LoopHooks {
  bool force_zero_omega = false;
  std::function<void(const Matrix& w, const Matrix& h)> on_accept;
};

std::pair<FactorPair, SolverReport> palm_loop(const Matrix& x,
                                              const ModelSpec& spec, double rho,
                                              const FactorPair& start,
                                              const SolverConfig& config,
                                              bool accelerate,
                                              const LoopHooks& hooks);

}  // namespace detail

}  // namespace ssnmf

#endif
