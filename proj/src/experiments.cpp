// experiments.cpp -- initial data, prolongation, refinement study, runs.

#include "bfsurf/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include "bfsurf/ops.hpp"

namespace bfsurf {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

std::uint64_t splitmix64_next(std::uint64_t& s) {
    s += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Uniform draw on [-1,1) from the top 53 bits of the engine output.
double uniform_pm1(std::mt19937_64& eng) {
    const double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
    return 2.0 * u - 1.0;
}

CellField random_zero_mean_field(const GridSpec& g, std::uint64_t engine_seed) {
    std::mt19937_64 eng(engine_seed);
    CellField r(g);
    double* p = r.data();
    for (std::size_t k = 0; k < r.size(); ++k) p[k] = uniform_pm1(eng);
    return sub_mean(r);
}

} // namespace

void RunConfig::validate() const {
    params.validate();
    solver.validate();
    if (!(t_final > 0.0)) throw DomainError("RunConfig: t_final must be > 0");
    for (double t : snapshot_times)
        if (t < 0.0 || t > t_final)
            throw DomainError("RunConfig: snapshot times must lie in [0, t_final]");
    if (!(init_base - init_amp > 0.0 && init_base + init_amp < 1.0))
        throw DomainError("RunConfig: init_base +- init_amp must lie inside (0,1)");
}

State init_trig(const GridSpec& grid) {
    if (std::fabs(grid.length - 8.0) > 1e-12)
        throw DomainError("init_trig: the accuracy test is posed on (0,8)^2");
    CellField phi(grid), rho(grid);
    const int n = grid.n;
    for (int i = 0; i < n; ++i) {
        const double x = grid.center(i);
        for (int j = 0; j < n; ++j) {
            const double y = grid.center(j);
            phi(i, j) = 0.5 + 0.2 * std::cos(0.5 * kPi * x) * std::cos(0.5 * kPi * y);
            rho(i, j) = 0.5 + 0.2 * std::sin(0.5 * kPi * x) * std::sin(0.5 * kPi * y);
        }
    }
    return State(std::move(phi), std::move(rho));
}

State init_random(const GridSpec& grid, std::uint64_t seed, double base, double amp) {
    if (!(amp > 0.0) || !(base - amp > 0.0 && base + amp < 1.0))
        throw DomainError("init_random: base +- amp must lie inside (0,1)");
    std::uint64_t s = seed;
    const std::uint64_t seed_phi = splitmix64_next(s);
    const std::uint64_t seed_rho = splitmix64_next(s);
    CellField r_phi = random_zero_mean_field(grid, seed_phi);
    CellField r_rho = random_zero_mean_field(grid, seed_rho);
    CellField phi(grid, base), rho(grid, base);
    axpy(phi, amp, r_phi);
    axpy(rho, amp, r_rho);
    return State(std::move(phi), std::move(rho));
}

CellField prolong_bilinear(const CellField& coarse) {
    const GridSpec cg = coarse.grid();
    const GridSpec fg(2 * cg.n, cg.length);
    CellField fine(fg);
    const int nc = cg.n;
    const double* src = coarse.data();
    double* dst = fine.data();
#pragma omp parallel for schedule(static) if (nc >= 64)
    for (int fi = 0; fi < 2 * nc; ++fi) {
        const int ci = fi >> 1;
        // Fine center i sits a quarter cell toward its coarse neighbor.
        const int ni = (fi & 1) ? (ci + 1 == nc ? 0 : ci + 1) : (ci == 0 ? nc - 1 : ci - 1);
        for (int fj = 0; fj < 2 * nc; ++fj) {
            const int cj = fj >> 1;
            const int nj = (fj & 1) ? (cj + 1 == nc ? 0 : cj + 1) : (cj == 0 ? nc - 1 : cj - 1);
            const double own_x = src[static_cast<std::size_t>(ci) * nc + cj];
            const double nbr_x = src[static_cast<std::size_t>(ni) * nc + cj];
            const double own_y = src[static_cast<std::size_t>(ci) * nc + nj];
            const double nbr_xy = src[static_cast<std::size_t>(ni) * nc + nj];
            dst[static_cast<std::size_t>(fi) * (2 * nc) + fj] =
                0.5625 * own_x + 0.1875 * nbr_x + 0.1875 * own_y + 0.0625 * nbr_xy;
        }
    }
    return fine;
}

std::pair<double, double> cauchy_error(const State& fine, const State& coarse) {
    if (fine.grid().n != 2 * coarse.grid().n ||
        fine.grid().length != coarse.grid().length)
        throw GridMismatchError("cauchy_error: fine grid must double the coarse grid");
    if (std::fabs(fine.time - coarse.time) > 1e-9 * (1.0 + std::fabs(fine.time)))
        throw DomainError("cauchy_error: states are at different times");
    const CellField dphi = add_scaled(fine.phi, -1.0, prolong_bilinear(coarse.phi));
    const CellField drho = add_scaled(fine.rho, -1.0, prolong_bilinear(coarse.rho));
    return {norm(dphi, NormKind::l2), norm(drho, NormKind::l2)};
}

std::vector<ConvergenceRow> convergence_study(const std::vector<int>& levels,
                                              double c_refine, double t_final,
                                              const ModelParams& params,
                                              const SolverConfig& solver,
                                              std::ostream* progress,
                                              RunObserver* observer) {
    if (levels.size() < 2)
        throw DomainError("convergence_study: need at least two levels");
    for (std::size_t k = 1; k < levels.size(); ++k)
        if (levels[k] != 2 * levels[k - 1])
            throw DomainError("convergence_study: levels must double strictly");
    if (!(c_refine > 0.0) || !(t_final > 0.0))
        throw DomainError("convergence_study: c_refine and t_final must be > 0");

    std::vector<State> finals;
    finals.reserve(levels.size());
    for (int n : levels) {
        const GridSpec grid(n, 8.0);
        ModelParams p = params;
        p.dt = c_refine * grid.spacing * grid.spacing;
        const long steps = std::lround(t_final / p.dt);
        if (std::fabs(static_cast<double>(steps) * p.dt - t_final) > 1e-9 * t_final)
            throw DomainError("convergence_study: t_final is not a multiple of dt at level " +
                              std::to_string(n));
        TimeStepper stepper(grid, p, solver);
        State s = init_trig(grid);
        if (observer) {
            StepDiagnostics d0;
            d0.energy = energy(s, p);
            d0.mass_phi = mean(s.phi) * grid.area();
            d0.mass_rho = mean(s.rho) * grid.area();
            d0.rho_min = min_value(s.rho);
            d0.rho_max = max_value(s.rho);
            observer->on_initial(s, d0);
        }
        const auto t0 = std::chrono::steady_clock::now();
        long newton_total = 0;
        for (long k = 0; k < steps; ++k) {
            auto [next, diag] = stepper.advance(s);
            s = std::move(next);
            newton_total += diag.newton_iters;
            if (observer) observer->on_step(s, diag);
        }
        if (progress) {
            const double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            (*progress) << "level " << n << "x" << n << ": " << steps << " steps, "
                        << newton_total << " Newton iterations, " << secs << " s\n";
        }
        finals.push_back(std::move(s));
    }

    std::vector<ConvergenceRow> rows;
    rows.reserve(levels.size() - 1);
    for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
        const auto [e_phi, e_rho] = cauchy_error(finals[k + 1], finals[k]);
        ConvergenceRow row;
        row.grid_n = levels[k];
        row.error_phi = e_phi;
        row.error_rho = e_rho;
        if (k == 0) {
            row.rate_phi = std::numeric_limits<double>::quiet_NaN();
            row.rate_rho = std::numeric_limits<double>::quiet_NaN();
        } else {
            row.rate_phi = std::log2(rows.back().error_phi / e_phi);
            row.rate_rho = std::log2(rows.back().error_rho / e_rho);
        }
        rows.push_back(row);
    }
    return rows;
}

namespace {

RunResult run_steps(const RunConfig& cfg, State state, bool emit_initial,
                    RunObserver* observer) {
    TimeStepper stepper(cfg.grid, cfg.params, cfg.solver);
    RunResult result{State(state.phi, state.rho, state.time, state.step), {}};

    std::vector<double> snaps = cfg.snapshot_times;
    std::sort(snaps.begin(), snaps.end());
    std::size_t snap_idx = 0;
    const double dt = cfg.params.dt;
    auto emit_snapshots = [&](const State& s) {
        while (snap_idx < snaps.size() && s.time >= snaps[snap_idx] - 0.5 * dt) {
            if (observer) observer->on_snapshot(s);
            ++snap_idx;
        }
    };
    // A restarted run must not re-emit snapshots the original run already
    // produced: skip every time the emission rule assigns to a state at or
    // before the start time.
    if (!emit_initial)
        while (snap_idx < snaps.size() && state.time >= snaps[snap_idx] - 0.5 * dt)
            ++snap_idx;

    if (emit_initial) {
        StepDiagnostics d0;
        d0.energy = energy(state, cfg.params);
        d0.mass_phi = mean(state.phi) * cfg.grid.area();
        d0.mass_rho = mean(state.rho) * cfg.grid.area();
        d0.rho_min = min_value(state.rho);
        d0.rho_max = max_value(state.rho);
        d0.phi_inf = norm(state.phi, NormKind::linf);
        if (observer) observer->on_initial(state, d0);
        result.series.push_back(d0);
        emit_snapshots(state);
    }

    const long total_steps = std::lround(cfg.t_final / dt);
    while (state.step < total_steps) {
        auto [next, diag] = stepper.advance(state);
        state = std::move(next);
        if (observer) observer->on_step(state, diag);
        result.series.push_back(diag);
        emit_snapshots(state);
    }
    result.final_state = std::move(state);
    return result;
}

} // namespace

RunResult spinodal_run(const RunConfig& cfg, RunObserver* observer) {
    cfg.validate();
    State initial = init_random(cfg.grid, cfg.seed, cfg.init_base, cfg.init_amp);
    return run_steps(cfg, std::move(initial), true, observer);
}

RunResult continue_run(const RunConfig& cfg, const State& start, RunObserver* observer) {
    cfg.validate();
    require_same_grid(start.grid(), cfg.grid, "continue_run");
    return run_steps(cfg, State(start.phi, start.rho, start.time, start.step), false,
                     observer);
}

} // namespace bfsurf
