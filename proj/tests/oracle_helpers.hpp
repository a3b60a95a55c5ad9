// oracle_helpers.hpp -- independent oracles used by the solver tests:
// a safeguarded projected-gradient (Barzilai-Borwein) minimizer of the merit
// functional, plus small random-state generators. The minimizer shares only
// the merit/chemical-potential evaluations with the production code (those
// are pinned separately by finite-difference gradient tests); the descent
// itself is a different algorithm from the Newton-Krylov path it checks.

#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "bfsurf/model.hpp"
#include "bfsurf/ops.hpp"
#include "bfsurf/spectral.hpp"

namespace oracle {

using namespace bfsurf;

inline CellField random_field(const GridSpec& g, std::mt19937_64& eng, double lo,
                              double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    CellField f(g);
    for (std::size_t k = 0; k < f.size(); ++k) f.data()[k] = dist(eng);
    return f;
}

/// Random pair with prescribed means (so the merit functional is defined).
inline std::pair<CellField, CellField> random_admissible_pair(const GridSpec& g,
                                                              std::mt19937_64& eng,
                                                              double mean_phi,
                                                              double mean_rho) {
    CellField phi = random_field(g, eng, -0.4, 0.4);
    phi = sub_mean(phi);
    for (std::size_t k = 0; k < phi.size(); ++k) phi.data()[k] += mean_phi;
    CellField rho = random_field(g, eng, -0.2, 0.2);
    rho = sub_mean(rho);
    for (std::size_t k = 0; k < rho.size(); ++k) rho.data()[k] += mean_rho;
    return {std::move(phi), std::move(rho)};
}

/// Gradient of the merit functional restricted to the fixed-mean manifold.
struct MeritGradient {
    CellField g_phi;
    CellField g_rho;
    double norm2 = 0.0;
};

inline MeritGradient merit_gradient(const CellField& phi, const CellField& rho,
                                    const State& old, const ModelParams& p,
                                    const SpectralPoisson& poisson) {
    const double w = 1.0 / (p.mobility * p.dt);
    CellField gp = scaled(
        poisson.inv_neg_laplacian(sub_mean(add_scaled(phi, -1.0, old.phi))), w);
    axpy(gp, 1.0, mu_phi_convex(phi, rho, p));
    axpy(gp, 1.0, mu_phi_explicit(old.phi, p));
    gp = sub_mean(gp);
    CellField gr = scaled(
        poisson.inv_neg_laplacian(sub_mean(add_scaled(rho, -1.0, old.rho))), w);
    axpy(gr, 1.0, mu_rho_convex(phi, rho, p));
    axpy(gr, 1.0, mu_rho_explicit(old.rho, p));
    gr = sub_mean(gr);
    const double n2 = std::sqrt(inner(gp, gp) + inner(gr, gr));
    return {std::move(gp), std::move(gr), n2};
}

/// Largest step along -d keeping rho + step*d inside (0,1), scanned cell by
/// cell (independent of the solver's safeguard).
inline double interior_step_limit(const CellField& rho, const CellField& d) {
    double limit = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < rho.size(); ++k) {
        const double r = rho.data()[k];
        const double dk = d.data()[k];
        if (dk > 0.0) limit = std::min(limit, (1.0 - r) / dk);
        if (dk < 0.0) limit = std::min(limit, -r / dk);
    }
    return limit;
}

struct PgdResult {
    CellField phi;
    CellField rho;
    long iters = 0;
    double grad_norm = 0.0;
    double merit_value = 0.0;
};

/// Monotone projected-gradient descent with Barzilai-Borwein steps: from the
/// old state, walk downhill on the merit functional until the projected
/// gradient norm reaches grad_tol. Every iterate stays strictly interior.
inline PgdResult minimize_merit_pgd(const State& old, const ModelParams& p,
                                    const SpectralPoisson& poisson, double grad_tol,
                                    long max_iters) {
    CellField phi = old.phi;
    CellField rho = old.rho;
    double J = merit(phi, rho, old, p, poisson);
    MeritGradient g = merit_gradient(phi, rho, old, p, poisson);

    // Conservative inverse-curvature seed from the constant-coefficient modes.
    const auto& lam = poisson.eigenvalues();
    double lam_min = std::numeric_limits<double>::infinity(), lam_max = 0.0;
    for (std::size_t k = 1; k < lam.size(); ++k) {
        lam_min = std::min(lam_min, lam[k]);
        lam_max = std::max(lam_max, lam[k]);
    }
    const double curv = 1.0 / (p.mobility * p.dt * lam_min) +
                        p.eta * p.eta * lam_max * lam_max +
                        (p.eps + p.alpha + p.alpha / p.delta + p.xi) * lam_max +
                        1e4 * p.beta;
    double t = 1.0 / curv;

    long iters = 0;
    while (g.norm2 > grad_tol && iters < max_iters) {
        bool accepted = false;
        for (int bt = 0; bt < 80 && !accepted; ++bt) {
            // Pull the step back so rho never reaches the boundary.
            double step = t;
            const double limit = interior_step_limit(rho, scaled(g.g_rho, -1.0));
            if (t > 0.95 * limit) step = 0.95 * limit;
            CellField phi_c = add_scaled(phi, -step, g.g_phi);
            CellField rho_c = add_scaled(rho, -step, g.g_rho);
            const double J_c = merit(phi_c, rho_c, old, p, poisson);
            if (J_c <= J + 1e-15 * (1.0 + std::fabs(J))) {
                MeritGradient g_c = merit_gradient(phi_c, rho_c, old, p, poisson);
                // BB1 step from the accepted displacement.
                const CellField s_phi = add_scaled(phi_c, -1.0, phi);
                const CellField s_rho = add_scaled(rho_c, -1.0, rho);
                const CellField y_phi = add_scaled(g_c.g_phi, -1.0, g.g_phi);
                const CellField y_rho = add_scaled(g_c.g_rho, -1.0, g.g_rho);
                const double ss = inner(s_phi, s_phi) + inner(s_rho, s_rho);
                const double sy = inner(s_phi, y_phi) + inner(s_rho, y_rho);
                if (sy > 0.0 && ss > 0.0) t = std::clamp(ss / sy, 1e-18, 1e8);
                phi = std::move(phi_c);
                rho = std::move(rho_c);
                J = J_c;
                g = std::move(g_c);
                accepted = true;
            } else {
                t *= 0.5;
            }
        }
        if (!accepted) break; // merit flat to round-off
        ++iters;
    }
    return {std::move(phi), std::move(rho), iters, g.norm2, J};
}

} // namespace oracle
