// stepper.cpp -- Newton-Krylov time stepping with interior-point safeguards.

#include "bfsurf/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bfsurf/ops.hpp"

namespace bfsurf {

namespace {

const double kSqrt2 = std::sqrt(2.0);

std::vector<double> pack(const CellField& a, const CellField& b) {
    std::vector<double> v(2 * a.size());
    std::copy(a.data(), a.data() + a.size(), v.begin());
    std::copy(b.data(), b.data() + b.size(), v.begin() + static_cast<long>(a.size()));
    return v;
}

void unpack(const std::vector<double>& v, CellField& a, CellField& b) {
    std::copy(v.begin(), v.begin() + static_cast<long>(a.size()), a.data());
    std::copy(v.begin() + static_cast<long>(a.size()), v.end(), b.data());
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

double nrm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

} // namespace

void SolverConfig::validate() const {
    if (newton_max_iter < 1) throw DomainError("SolverConfig: newton_max_iter must be >= 1");
    if (!(linear_tol > 0.0)) throw DomainError("SolverConfig: linear_tol must be > 0");
    if (!(boundary_fraction > 0.0 && boundary_fraction < 1.0))
        throw DomainError("SolverConfig: boundary_fraction must lie in (0,1)");
    if (!(damping_min > 0.0)) throw DomainError("SolverConfig: damping_min must be > 0");
}

double SolverConfig::resolved_newton_tol(const GridSpec& g) const {
    return newton_tol > 0.0 ? newton_tol : 1e-10 * std::sqrt(g.area());
}

double safeguard_fraction(const CellField& rho, const CellField& d_rho, double tau) {
    require_same_grid(rho.grid(), d_rho.grid(), "safeguard_fraction");
    if (!(tau > 0.0 && tau < 1.0))
        throw DomainError("safeguard_fraction: tau must lie in (0,1)");
    const double* r = rho.data();
    const double* d = d_rho.data();
    double theta_max = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < rho.size(); ++k) {
        if (d[k] > 0.0)
            theta_max = std::min(theta_max, (1.0 - r[k]) / d[k]);
        else if (d[k] < 0.0)
            theta_max = std::min(theta_max, -r[k] / d[k]);
    }
    return std::min(1.0, tau * theta_max);
}

namespace {

/// Base-state quantities the Jacobian action reuses across a whole linear
/// solve: regularized gradient magnitude, base gradient edges, the coupled
/// flux weight, and the entropy diagonal.
struct JacobianContext {
    JacobianContext(const State& base, const ModelParams& params)
        : g(base.grid()), p(params), nmag(avg_grad_mag(base.phi, params.delta)),
          gphi(grad(base.phi)), wq(g), cubic_diag(g), entropy_diag(g),
          rho_over_n2(g), inv_n(g), phi(base.phi) {
        const int n = g.n;
        CellField q(g);
        const double* pr = base.rho.data();
        const double* pphi = base.phi.data();
        const double* pn = nmag.data();
        double* pq = q.data();
        double* pc = cubic_diag.data();
        double* pe = entropy_diag.data();
        double* pr2 = rho_over_n2.data();
        double* pin = inv_n.data();
#pragma omp parallel for schedule(static) if (n >= 64)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const std::size_t c = static_cast<std::size_t>(i) * n + j;
                pq[c] = pr[c] / pn[c] - 1.0;
                const double u0 = pphi[c] - 0.5;
                pc[c] = 3.0 / p.eps * u0 * u0;
                const double r = pr[c];
                pe[c] = p.beta / (r * (1.0 - r));
                pr2[c] = pr[c] / (pn[c] * pn[c]);
                pin[c] = 1.0 / pn[c];
            }
        wq = avg_to_edges(q);
    }

    std::pair<CellField, CellField> apply(const CellField& d_phi,
                                          const CellField& d_rho) const;

    GridSpec g;
    ModelParams p;
    CellField nmag;
    EdgeFieldPair gphi;
    EdgeFieldPair wq;
    CellField cubic_diag;
    CellField entropy_diag;
    CellField rho_over_n2;
    CellField inv_n;
    CellField phi;
};

std::pair<CellField, CellField> JacobianContext::apply(const CellField& d_phi,
                                                       const CellField& d_rho) const {
    const int n = g.n;
    const EdgeFieldPair gu = grad(d_phi);

    // dN = sum over the four surrounding edges of (D phi)(D u) / (2N), and
    // dq = v/N - rho dN / N^2.
    CellField dn(g), dq(g);
    {
        const double* gx = gphi.x_data();
        const double* gy = gphi.y_data();
        const double* ux = gu.x_data();
        const double* uy = gu.y_data();
        const double* pin = inv_n.data();
        const double* pr2 = rho_over_n2.data();
        const double* pv = d_rho.data();
        double* pd = dn.data();
        double* pdq = dq.data();
#pragma omp parallel for schedule(static) if (n >= 64)
        for (int i = 0; i < n; ++i) {
            const int im = (i == 0) ? n - 1 : i - 1;
            for (int j = 0; j < n; ++j) {
                const int jm = (j == 0) ? n - 1 : j - 1;
                const std::size_t c = static_cast<std::size_t>(i) * n + j;
                const std::size_t w = static_cast<std::size_t>(im) * n + j;
                const std::size_t s = static_cast<std::size_t>(i) * n + jm;
                const double acc = gx[c] * ux[c] + gx[w] * ux[w] + gy[c] * uy[c] +
                                   gy[s] * uy[s];
                pd[c] = 0.5 * acc * pin[c];
                pdq[c] = pv[c] * pin[c] - pr2[c] * pd[c];
            }
        }
    }

    const CellField coupled_u = weighted_div_grad(wq, d_phi);
    const CellField coupled_q = weighted_div_grad(avg_to_edges(dq), phi);
    const CellField lap_u = laplacian(d_phi);
    const CellField lap2_u = laplacian(lap_u);
    const CellField lap_v = laplacian(d_rho);

    // Directional derivatives of the convex chemical potentials.
    CellField dmu_phi(g), dmu_rho(g);
    {
        const double* pcub = cubic_diag.data();
        const double* pent = entropy_diag.data();
        const double* pu = d_phi.data();
        const double* pv = d_rho.data();
        const double* plu = lap_u.data();
        const double* pl2 = lap2_u.data();
        const double* plv = lap_v.data();
        const double* pcu = coupled_u.data();
        const double* pcq = coupled_q.data();
        const double* pd = dn.data();
        double* mp = dmu_phi.data();
        double* mr = dmu_rho.data();
        const double c_lap = p.eps + p.alpha / p.delta;
        const double c_eta = p.eta * p.eta;
#pragma omp parallel for schedule(static) if (n >= 64)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const std::size_t c = static_cast<std::size_t>(i) * n + j;
                mp[c] = pcub[c] * pu[c] - c_lap * plu[c] + c_eta * pl2[c] +
                        p.alpha * (pcu[c] + pcq[c]);
                mr[c] = -p.xi * plv[c] + pent[c] * pv[c] + kSqrt2 * p.alpha * pv[c] -
                        p.alpha * pd[c];
            }
    }

    CellField f_phi = laplacian(dmu_phi);
    CellField f_rho = laplacian(dmu_rho);
    {
        const double inv_dt = 1.0 / p.dt;
        const double* pu = d_phi.data();
        const double* pv = d_rho.data();
        double* fp = f_phi.data();
        double* fr = f_rho.data();
#pragma omp parallel for schedule(static) if (n >= 64)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const std::size_t c = static_cast<std::size_t>(i) * n + j;
                fp[c] = pu[c] * inv_dt - p.mobility * fp[c];
                fr[c] = pv[c] * inv_dt - p.mobility * fr[c];
            }
    }
    return {std::move(f_phi), std::move(f_rho)};
}

} // namespace

std::pair<CellField, CellField> jacobian_apply(const State& base, const State& old,
                                               const ModelParams& p,
                                               const CellField& d_phi,
                                               const CellField& d_rho) {
    require_same_grid(base.grid(), old.grid(), "jacobian_apply");
    require_same_grid(base.grid(), d_phi.grid(), "jacobian_apply");
    require_same_grid(base.grid(), d_rho.grid(), "jacobian_apply");
    return JacobianContext(base, p).apply(d_phi, d_rho);
}

TimeStepper::TimeStepper(GridSpec grid, ModelParams params, SolverConfig cfg)
    : grid_(grid), params_(params), cfg_(cfg), poisson_(grid) {
    params_.validate();
    cfg_.validate();
    const auto& lam = poisson_.eigenvalues();
    precond_phi_.resize(lam.size());
    precond_rho_.resize(lam.size());
    const double inv_dt = 1.0 / params_.dt;
    const double c_phi = params_.eps + params_.alpha + params_.alpha / params_.delta;
    for (std::size_t k = 0; k < lam.size(); ++k) {
        const double l = lam[k];
        precond_phi_[k] = 1.0 / (inv_dt + params_.mobility *
                                              (params_.eta * params_.eta * l * l * l +
                                               c_phi * l * l));
        // The entropy diagonal beta/(rho(1-rho)) is state dependent; its
        // constant lower bound 4*beta joins the rho-block symbol.
        precond_rho_[k] =
            1.0 / (inv_dt + params_.mobility * (params_.xi * l * l +
                                                (kSqrt2 * params_.alpha + 4.0 * params_.beta) * l));
    }
}

std::vector<double> TimeStepper::apply_precond(const std::vector<double>& v) const {
    CellField a(grid_), b(grid_);
    unpack(v, a, b);
    const auto [pa, pb] = poisson_.apply_mode_diagonal_pair(a, b, precond_phi_, precond_rho_);
    return pack(pa, pb);
}

namespace {

/// Restarted GMRES, right-preconditioned: solves A z = rhs to the given
/// relative residual. Returns the best iterate if the budget is exhausted.
template <class ApplyA, class ApplyM>
std::vector<double> gmres_right(ApplyA&& apply_a, ApplyM&& apply_m,
                                const std::vector<double>& rhs, double rel_tol) {
    const int restart = 30;
    const int max_outer = 10;
    const std::size_t m = rhs.size();
    std::vector<double> x(m, 0.0);
    const double bnorm = nrm2(rhs);
    if (bnorm == 0.0) return x;

    for (int outer = 0; outer < max_outer; ++outer) {
        std::vector<double> r = rhs;
        if (outer > 0) {
            const std::vector<double> jx = apply_a(x);
            for (std::size_t k = 0; k < m; ++k) r[k] -= jx[k];
        }
        double beta = nrm2(r);
        if (beta <= rel_tol * bnorm) return x;

        std::vector<std::vector<double>> v;
        v.reserve(static_cast<std::size_t>(restart) + 1);
        v.push_back(r);
        for (auto& e : v[0]) e /= beta;

        std::vector<std::vector<double>> h(static_cast<std::size_t>(restart) + 1,
                                           std::vector<double>(static_cast<std::size_t>(restart), 0.0));
        std::vector<double> cs(static_cast<std::size_t>(restart), 0.0);
        std::vector<double> sn(static_cast<std::size_t>(restart), 0.0);
        std::vector<double> g(static_cast<std::size_t>(restart) + 1, 0.0);
        g[0] = beta;

        int k_used = 0;
        for (int k = 0; k < restart; ++k) {
            std::vector<double> w = apply_a(apply_m(v[static_cast<std::size_t>(k)]));
            for (int i = 0; i <= k; ++i) {
                const double hik = dot(w, v[static_cast<std::size_t>(i)]);
                h[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = hik;
                for (std::size_t t = 0; t < m; ++t) w[t] -= hik * v[static_cast<std::size_t>(i)][t];
            }
            const double hk1 = nrm2(w);
            h[static_cast<std::size_t>(k) + 1][static_cast<std::size_t>(k)] = hk1;
            if (hk1 > 0.0) {
                for (auto& e : w) e /= hk1;
                v.push_back(std::move(w));
            }
            // Apply the accumulated Givens rotations, then form a new one.
            for (int i = 0; i < k; ++i) {
                const double t1 = cs[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] +
                                  sn[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i) + 1][static_cast<std::size_t>(k)];
                const double t2 = -sn[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] +
                                  cs[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i) + 1][static_cast<std::size_t>(k)];
                h[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = t1;
                h[static_cast<std::size_t>(i) + 1][static_cast<std::size_t>(k)] = t2;
            }
            const double denom = std::hypot(h[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)], hk1);
            cs[static_cast<std::size_t>(k)] = h[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)] / denom;
            sn[static_cast<std::size_t>(k)] = hk1 / denom;
            h[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)] = denom;
            g[static_cast<std::size_t>(k) + 1] = -sn[static_cast<std::size_t>(k)] * g[static_cast<std::size_t>(k)];
            g[static_cast<std::size_t>(k)] = cs[static_cast<std::size_t>(k)] * g[static_cast<std::size_t>(k)];
            k_used = k + 1;
            if (std::fabs(g[static_cast<std::size_t>(k) + 1]) <= rel_tol * bnorm || hk1 == 0.0)
                break;
        }

        // Back substitution and update x += P^{-1} (V y).
        std::vector<double> y(static_cast<std::size_t>(k_used), 0.0);
        for (int i = k_used - 1; i >= 0; --i) {
            double s = g[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < k_used; ++j)
                s -= h[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * y[static_cast<std::size_t>(j)];
            y[static_cast<std::size_t>(i)] = s / h[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
        }
        std::vector<double> z(m, 0.0);
        for (int j = 0; j < k_used; ++j)
            for (std::size_t t = 0; t < m; ++t) z[t] += y[static_cast<std::size_t>(j)] * v[static_cast<std::size_t>(j)][t];
        const std::vector<double> pz = apply_m(z);
        for (std::size_t t = 0; t < m; ++t) x[t] += pz[t];

        if (std::fabs(g[static_cast<std::size_t>(k_used)]) <= rel_tol * bnorm) return x;
    }
    return x;
}

} // namespace

State TimeStepper::newton_solve_impl(const State& guess, const State& old,
                                     NewtonStats& stats) {
    require_same_grid(guess.grid(), grid_, "newton_solve");
    require_same_grid(old.grid(), grid_, "newton_solve");
    {
        const double lo = min_value(guess.rho);
        const double hi = max_value(guess.rho);
        if (!(lo > 0.0 && hi < 1.0))
            throw DomainError("newton_solve: initial guess rho must lie strictly in (0,1)");
        const double dm_phi = mean(guess.phi) - mean(old.phi);
        const double dm_rho = mean(guess.rho) - mean(old.rho);
        if (std::fabs(dm_phi) > 1e-9 * (1.0 + std::fabs(mean(old.phi))) ||
            std::fabs(dm_rho) > 1e-9 * (1.0 + std::fabs(mean(old.rho))))
            throw DomainError("newton_solve: guess means must match the old state's");
    }

    const double tol = cfg_.resolved_newton_tol(grid_);
    State x(guess.phi, guess.rho, old.time, old.step);

    auto res = scheme_residual(x, old, params_);
    double rn = residual_norm(res);
    stats.residual_history.push_back(rn);
    double merit_base = 0.0;
    bool merit_cached = false;

    while (rn > tol) {
        if (!std::isfinite(rn))
            throw NewtonDivergenceError("newton_solve: non-finite residual",
                                        stats.residual_history, stats.damping_history);
        if (stats.iters >= cfg_.newton_max_iter)
            throw NewtonDivergenceError(
                "newton_solve: residual " + std::to_string(rn) + " above tolerance " +
                    std::to_string(tol) + " after " + std::to_string(stats.iters) +
                    " iterations",
                stats.residual_history, stats.damping_history);

        std::vector<double> rhs = pack(res.first, res.second);
        for (auto& e : rhs) e = -e;
        const double lin_tol =
            std::clamp(std::min(cfg_.linear_tol, 0.1 * rn), 1e-13, 0.9);
        const JacobianContext ctx(x, params_);
        auto apply_a = [&](const std::vector<double>& v) {
            CellField a(grid_), b(grid_);
            unpack(v, a, b);
            auto jv = ctx.apply(a, b);
            return pack(jv.first, jv.second);
        };
        auto apply_m = [&](const std::vector<double>& v) { return apply_precond(v); };
        std::vector<double> dvec = gmres_right(apply_a, apply_m, rhs, lin_tol);

        CellField d_phi(grid_), d_rho(grid_);
        unpack(dvec, d_phi, d_rho);
        // Krylov directions are mean-free up to round-off; project exactly so
        // Newton iterates conserve both means.
        d_phi = sub_mean(d_phi);
        d_rho = sub_mean(d_rho);

        double theta = safeguard_fraction(x.rho, d_rho, cfg_.boundary_fraction);
        if (!merit_cached) {
            merit_base = merit(x.phi, x.rho, old, params_, poisson_);
            merit_cached = true;
        }
        const double slack = 1e-12 * (1.0 + std::fabs(merit_base));
        for (;;) {
            CellField phi_c = add_scaled(x.phi, theta, d_phi);
            CellField rho_c = add_scaled(x.rho, theta, d_rho);
            const double merit_c = merit(phi_c, rho_c, old, params_, poisson_);
            if (merit_c <= merit_base + slack) {
                x.phi = std::move(phi_c);
                x.rho = std::move(rho_c);
                merit_base = merit_c;
                break;
            }
            theta *= 0.5;
            if (theta < cfg_.damping_min)
                throw StepDampedError("newton_solve: damping fell below damping_min without a merit decrease",
                                      stats.residual_history, stats.damping_history);
        }

        stats.iters += 1;
        stats.min_damping = std::min(stats.min_damping, theta);
        stats.damping_history.push_back(theta);
        res = scheme_residual(x, old, params_);
        rn = residual_norm(res);
        stats.residual_history.push_back(rn);
    }
    stats.final_residual = rn;
    return x;
}

State TimeStepper::newton_solve(const State& initial_guess, const State& old) {
    NewtonStats stats;
    return newton_solve_impl(initial_guess, old, stats);
}

std::pair<State, StepDiagnostics> TimeStepper::advance(const State& old) {
    const EnergyBreakdown e_old = energy(old, params_); // validates rho interior
    const double mean_phi_old = mean(old.phi);
    const double mean_rho_old = mean(old.rho);
    if (!(mean_rho_old > 0.0 && mean_rho_old < 1.0))
        throw DomainError("advance: mean(rho) must lie in (0,1)");

    NewtonStats stats;
    State next = newton_solve_impl(old, old, stats);
    next.time = old.time + params_.dt;
    next.step = old.step + 1;

    StepDiagnostics d;
    d.energy = energy(next, params_);
    d.rho_min = min_value(next.rho);
    d.rho_max = max_value(next.rho);
    d.phi_inf = norm(next.phi, NormKind::linf);
    const double mean_phi_new = mean(next.phi);
    const double mean_rho_new = mean(next.rho);
    d.mass_phi = mean_phi_new * grid_.area();
    d.mass_rho = mean_rho_new * grid_.area();
    d.newton_iters = stats.iters;
    d.final_residual = stats.final_residual;
    d.damping_used = stats.min_damping;
    d.residual_history = std::move(stats.residual_history);

    if (!(d.rho_min > 0.0 && d.rho_max < 1.0))
        throw InvariantViolationError("advance: accepted rho left (0,1)");
    const double mass_tol = 1e-12 * grid_.area();
    if (std::fabs(mean_phi_new - mean_phi_old) > mass_tol ||
        std::fabs(mean_rho_new - mean_rho_old) > mass_tol)
        throw InvariantViolationError("advance: mean drift exceeds 1e-12 |Omega|");
    if (d.energy.total > e_old.total + 1e-9 * (1.0 + std::fabs(d.energy.total)))
        throw InvariantViolationError("advance: discrete energy increased: " +
                                      std::to_string(e_old.total) + " -> " +
                                      std::to_string(d.energy.total));
    if (!next.phi.all_finite() || !next.rho.all_finite())
        throw InvariantViolationError("advance: non-finite entries in accepted state");
    return {std::move(next), d};
}

} // namespace bfsurf
