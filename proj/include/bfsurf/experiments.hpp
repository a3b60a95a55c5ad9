// experiments.hpp -- reproduction harness: smooth and random initial data,
// inter-grid transfer, Cauchy-difference refinement study, and the spinodal
// decomposition run with its per-step diagnostics series.

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "bfsurf/stepper.hpp"

namespace bfsurf {

/// One row of the refinement study. Errors are discrete l2 Cauchy differences
/// between this level and the next finer one (attributed to the coarser grid);
/// rates compare consecutive rows, the first row has no rate (NaN).
struct ConvergenceRow {
    int grid_n = 0;
    double error_phi = 0.0;
    double rate_phi = 0.0;
    double error_rho = 0.0;
    double rate_rho = 0.0;
};

struct RunConfig {
    GridSpec grid;
    ModelParams params;
    SolverConfig solver;
    double t_final = 0.0;
    std::vector<double> snapshot_times;
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    double init_base = 0.4;
    double init_amp = 0.1;

    void validate() const;
};

/// Smooth accuracy-test data on (0,8)^2:
///   phi0 = 0.5 + 0.2 cos(pi x/2) cos(pi y/2),
///   rho0 = 0.5 + 0.2 sin(pi x/2) sin(pi y/2),
/// sampled at cell centers. Requires grid.length == 8.
State init_trig(const GridSpec& grid);

/// Random initial data base + amp * r with r drawn uniformly from [-1,1] and
/// shifted to exact zero mean; phi and rho use independent streams derived
/// from the seed (splitmix64 -> two mt19937_64 engines, phi first), values
/// drawn row-major. Requires base +- amp inside (0,1). Deterministic per seed.
State init_random(const GridSpec& grid, std::uint64_t seed, double base = 0.4,
                  double amp = 0.1);

/// Cell-centered bilinear prolongation to the doubled grid: each fine cell
/// center takes 9/16, 3/16, 3/16, 1/16 from its four nearest coarse centers
/// (periodic wrap). Exact on constants and mean-preserving.
CellField prolong_bilinear(const CellField& coarse);

/// Discrete l2 norms on the fine grid of phi_f - P(phi_c) and rho_f - P(rho_c).
/// Requires fine.n == 2 * coarse.n, equal lengths and equal times.
std::pair<double, double> cauchy_error(const State& fine, const State& coarse);

/// Observer hooks for long runs; the io layer implements a directory writer,
/// tests implement in-memory recorders.
struct RunObserver {
    virtual ~RunObserver() = default;
    virtual void on_initial(const State&, const StepDiagnostics&) {}
    virtual void on_step(const State&, const StepDiagnostics&) {}
    virtual void on_snapshot(const State&) {}
};

/// Run the accuracy test at every level (levels must double strictly) with
/// dt = c_refine * h^2 from init_trig to t_final, then form Cauchy rows
/// between consecutive levels. params.dt is ignored; solver invariants are
/// enforced on every step. `progress`, when set, receives one line per level;
/// `observer`, when set, sees every level's initial row and steps.
std::vector<ConvergenceRow> convergence_study(const std::vector<int>& levels,
                                              double c_refine, double t_final,
                                              const ModelParams& params,
                                              const SolverConfig& solver = {},
                                              std::ostream* progress = nullptr,
                                              RunObserver* observer = nullptr);

struct RunResult {
    State final_state;
    std::vector<StepDiagnostics> series; // t=0 row first, then one per step
};

/// Spinodal-decomposition run: init_random, then fixed steps of params.dt up
/// to t_final, recording diagnostics every step and snapshots at the
/// requested times (nearest step; t=0 uses the initial state).
RunResult spinodal_run(const RunConfig& cfg, RunObserver* observer = nullptr);

/// Continue a run from an existing state (checkpoint restart). Steps from
/// start.time to cfg.t_final; emits no initial diagnostics row.
RunResult continue_run(const RunConfig& cfg, const State& start,
                       RunObserver* observer = nullptr);

} // namespace bfsurf
