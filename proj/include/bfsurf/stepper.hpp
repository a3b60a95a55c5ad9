// stepper.hpp -- damped Newton-Krylov solver for the coupled implicit system.
//
// Each step solves the nonlinear system F(phi', rho') = 0 of the
// convex-splitting scheme by inexact Newton iteration: analytic
// Jacobian-vector products, restarted GMRES preconditioned by the exact
// Fourier inverse of the constant-coefficient part of each diagonal block,
// a fraction-to-boundary rule that keeps every iterate's rho strictly
// inside (0,1), and backtracking on the merit functional (whose unique
// interior minimizer is the step solution). Accepted steps are checked
// against the three structural guarantees: mass conservation, energy decay
// and positivity; violations abort the run.

#pragma once

#include <utility>
#include <vector>

#include "bfsurf/model.hpp"
#include "bfsurf/spectral.hpp"

namespace bfsurf {

struct SolverConfig {
    /// Target for the combined l2 norm of (F_phi, F_rho). Non-positive means
    /// the default 1e-10 * |Omega|^(1/2).
    double newton_tol = 0.0;
    int newton_max_iter = 50;
    /// GMRES relative residual; tightened to 0.1x the current nonlinear
    /// residual as Newton converges.
    double linear_tol = 1e-4;
    /// Fraction-to-boundary factor: an iterate moves at most this fraction of
    /// the distance to the rho in {0,1} boundary.
    double boundary_fraction = 0.9;
    /// A step damped below this factor without a merit decrease is a failure.
    double damping_min = 1e-4;

    void validate() const;
    double resolved_newton_tol(const GridSpec& g) const;
};

/// Per-step record emitted by advance().
struct StepDiagnostics {
    EnergyBreakdown energy;
    double mass_phi = 0.0; // h^2 sum phi
    double mass_rho = 0.0;
    double rho_min = 0.0;
    double rho_max = 0.0;
    double phi_inf = 0.0;  // max |phi|, monitored but never enforced
    int newton_iters = 0;
    double final_residual = 0.0;
    double damping_used = 1.0; // smallest accepted step fraction this step
    std::vector<double> residual_history; // norm before each iteration and at exit
};

/// Largest theta in (0,1] with theta <= tau * sup{t : rho + t*d in (0,1)};
/// returns 1 when the full step stays interior (in particular for d == 0).
double safeguard_fraction(const CellField& rho, const CellField& d_rho, double tau);

/// Directional derivative of scheme_residual(., old) at `base` along
/// (d_phi, d_rho), assembled analytically. The logarithm contributes the
/// diagonal beta/(rho(1-rho)); the coupled flux is linearized in both phi
/// (through the regularized gradient magnitude) and rho.
std::pair<CellField, CellField> jacobian_apply(const State& base, const State& old,
                                               const ModelParams& p,
                                               const CellField& d_phi,
                                               const CellField& d_rho);

class TimeStepper {
public:
    TimeStepper(GridSpec grid, ModelParams params, SolverConfig cfg = {});

    const GridSpec& grid() const { return grid_; }
    const ModelParams& params() const { return params_; }
    const SolverConfig& config() const { return cfg_; }
    const SpectralPoisson& poisson() const { return poisson_; }

    /// One step of the scheme. Returns the new state (time advanced by dt,
    /// step by 1) and its diagnostics. Throws NewtonDivergenceError /
    /// StepDampedError on solver failure and InvariantViolationError if an
    /// accepted step were to break conservation, decay or positivity.
    std::pair<State, StepDiagnostics> advance(const State& old);

    /// Newton solve of the step equations from an arbitrary admissible guess
    /// whose means match the old state's. Returns the converged state fields
    /// (time/step metadata copied from `old`, not advanced).
    State newton_solve(const State& initial_guess, const State& old);

private:
    struct NewtonStats {
        int iters = 0;
        double final_residual = 0.0;
        double min_damping = 1.0;
        std::vector<double> residual_history;
        std::vector<double> damping_history;
    };

    State newton_solve_impl(const State& guess, const State& old, NewtonStats& stats);
    std::vector<double> apply_precond(const std::vector<double>& v) const;

    GridSpec grid_;
    ModelParams params_;
    SolverConfig cfg_;
    SpectralPoisson poisson_;
    std::vector<double> precond_phi_; // mode diagonal of the phi-block inverse
    std::vector<double> precond_rho_;
};

} // namespace bfsurf
