// model.cpp -- discrete energies, chemical potentials, scheme residual, merit.

#include "bfsurf/model.hpp"

#include <array>
#include <cmath>

#include "bfsurf/ops.hpp"

namespace bfsurf {

namespace {

const double kSqrt2 = std::sqrt(2.0);

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw DomainError(std::string("ModelParams: ") + name + " must be > 0");
}

void require_rho_interior(const CellField& rho, const char* what) {
    const double lo = min_value(rho);
    const double hi = max_value(rho);
    if (!(lo > 0.0) || !(hi < 1.0))
        throw DomainError(std::string(what) + ": rho must lie strictly in (0,1), range [" +
                          std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

/// Mean of the four squared edge differences around cell (i,j).
struct GradSqKernel {
    const double* s;
    int n;
    double inv_h;
    double operator()(int i, int j, int ip, int im, int jp, int jm) const {
        const double* row = s + static_cast<std::size_t>(i) * n;
        const double* rp = s + static_cast<std::size_t>(ip) * n;
        const double* rm = s + static_cast<std::size_t>(im) * n;
        const double de = (rp[j] - row[j]) * inv_h;
        const double dw = (row[j] - rm[j]) * inv_h;
        const double dn = (row[jp] - row[j]) * inv_h;
        const double ds = (row[j] - row[jm]) * inv_h;
        return 0.5 * (de * de + dw * dw + dn * dn + ds * ds);
    }
};

} // namespace

void ModelParams::validate() const {
    require_positive(eps, "eps");
    require_positive(alpha, "alpha");
    require_positive(beta, "beta");
    require_positive(eta, "eta");
    require_positive(xi, "xi");
    require_positive(delta, "delta");
    require_positive(mobility, "mobility");
    require_positive(dt, "dt");
}

CellField avg_grad_mag(const CellField& phi, double delta) {
    if (!(delta > 0.0)) throw DomainError("avg_grad_mag: delta must be > 0");
    const int n = phi.n();
    const GradSqKernel gsq{phi.data(), n, 1.0 / phi.grid().spacing};
    const double d2 = delta * delta;
    CellField out(phi.grid());
    double* o = out.data();
#pragma omp parallel for schedule(static) if (n >= 64)
    for (int i = 0; i < n; ++i) {
        const int ip = (i + 1 == n) ? 0 : i + 1;
        const int im = (i == 0) ? n - 1 : i - 1;
        double* orow = o + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            const int jp = (j + 1 == n) ? 0 : j + 1;
            const int jm = (j == 0) ? n - 1 : j - 1;
            orow[j] = std::sqrt(gsq(i, j, ip, im, jp, jm) + d2);
        }
    }
    return out;
}

namespace {

/// One fused pass accumulating every energy density; reused by energy(),
/// energy_convex() and energy_concave(). Row partials are combined in fixed
/// order so totals are thread-count independent.
struct EnergySums {
    double well = 0, dirichlet = 0, bending = 0, surf_dirichlet = 0;
    double coupling = 0, entropy = 0, convex = 0, concave = 0;
};

EnergySums accumulate_energy(const CellField& phi, const CellField& rho,
                             const ModelParams& p) {
    require_same_grid(phi.grid(), rho.grid(), "energy");
    const int n = phi.n();
    const double h2 = phi.grid().spacing * phi.grid().spacing;
    const CellField lap_phi = laplacian(phi);
    const GradSqKernel gphi{phi.data(), n, 1.0 / phi.grid().spacing};
    const GradSqKernel grho{rho.data(), n, 1.0 / rho.grid().spacing};
    const double* pphi = phi.data();
    const double* prho = rho.data();
    const double* plap = lap_phi.data();
    const double d2 = p.delta * p.delta;
    const double transfer_rho = 0.5 * p.alpha * (kSqrt2 - 1.0);
    const double transfer_grad = 0.5 * p.alpha / p.delta;

    std::vector<std::array<double, 8>> partial(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static) if (n >= 64)
    for (int i = 0; i < n; ++i) {
        const int ip = (i + 1 == n) ? 0 : i + 1;
        const int im = (i == 0) ? n - 1 : i - 1;
        std::array<double, 8> acc{};
        for (int j = 0; j < n; ++j) {
            const int jp = (j + 1 == n) ? 0 : j + 1;
            const int jm = (j == 0) ? n - 1 : j - 1;
            const std::size_t idx = static_cast<std::size_t>(i) * n + j;
            const double f = pphi[idx];
            const double r = prho[idx];
            const double u = f - 0.5;
            const double g2 = gphi(i, j, ip, im, jp, jm);
            const double r2 = grho(i, j, ip, im, jp, jm);
            const double lap = plap[idx];
            const double nmag = std::sqrt(g2 + d2);
            const double cpl = r - nmag;

            const double well = 0.25 * f * f * (1.0 - f) * (1.0 - f) / p.eps;
            const double dir = 0.5 * p.eps * g2;
            const double bend = 0.5 * p.eta * p.eta * lap * lap;
            const double sdir = 0.5 * p.xi * r2;
            const double coup = 0.5 * p.alpha * cpl * cpl;
            const double ent = p.beta * (r * std::log(r) + (1.0 - r) * std::log(1.0 - r));
            const double transfer = transfer_rho * r * r + transfer_grad * g2;
            const double u2 = u * u;

            acc[0] += well;
            acc[1] += dir;
            acc[2] += bend;
            acc[3] += sdir;
            acc[4] += coup;
            acc[5] += ent;
            acc[6] += 0.25 / p.eps * u2 * u2 + 1.0 / (64.0 * p.eps) + dir + bend + ent +
                      sdir + coup + transfer;
            acc[7] += 0.125 / p.eps * u2 + transfer;
        }
        partial[static_cast<std::size_t>(i)] = acc;
    }

    EnergySums sums;
    for (int i = 0; i < n; ++i) {
        const auto& a = partial[static_cast<std::size_t>(i)];
        sums.well += a[0];
        sums.dirichlet += a[1];
        sums.bending += a[2];
        sums.surf_dirichlet += a[3];
        sums.coupling += a[4];
        sums.entropy += a[5];
        sums.convex += a[6];
        sums.concave += a[7];
    }
    sums.well *= h2;
    sums.dirichlet *= h2;
    sums.bending *= h2;
    sums.surf_dirichlet *= h2;
    sums.coupling *= h2;
    sums.entropy *= h2;
    sums.convex *= h2;
    sums.concave *= h2;
    return sums;
}

} // namespace

EnergyBreakdown energy(const State& s, const ModelParams& p) {
    require_rho_interior(s.rho, "energy");
    const EnergySums e = accumulate_energy(s.phi, s.rho, p);
    EnergyBreakdown out;
    out.well = e.well;
    out.dirichlet = e.dirichlet;
    out.bending = e.bending;
    out.surf_dirichlet = e.surf_dirichlet;
    out.coupling = e.coupling;
    out.entropy = e.entropy;
    out.total = e.well + e.dirichlet + e.bending + e.surf_dirichlet + e.coupling + e.entropy;
    out.convex = e.convex;
    out.concave = e.concave;
    return out;
}

double energy_convex(const CellField& phi, const CellField& rho, const ModelParams& p) {
    require_rho_interior(rho, "energy_convex");
    return accumulate_energy(phi, rho, p).convex;
}

double energy_concave(const CellField& phi, const CellField& rho, const ModelParams& p) {
    return accumulate_energy(phi, rho, p).concave;
}

CellField mu_phi_convex(const CellField& phi, const CellField& rho, const ModelParams& p) {
    require_same_grid(phi.grid(), rho.grid(), "mu_phi_convex");
    const int n = phi.n();
    const CellField nmag = avg_grad_mag(phi, p.delta);
    // Edge-averaged coefficient (rho - N)/N of the coupled flux.
    CellField q(phi.grid());
    {
        const double* pr = rho.data();
        const double* pn = nmag.data();
        double* pq = q.data();
#pragma omp parallel for schedule(static) if (n >= 64)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const std::size_t idx = static_cast<std::size_t>(i) * n + j;
                pq[idx] = pr[idx] / pn[idx] - 1.0;
            }
    }
    const CellField coupled = weighted_div_grad(avg_to_edges(q), phi);
    const CellField lap = laplacian(phi);
    const CellField lap2 = laplacian(lap);

    CellField out(phi.grid());
    const double* pphi = phi.data();
    const double* pl = lap.data();
    const double* pl2 = lap2.data();
    const double* pc = coupled.data();
    double* po = out.data();
    const double c_lap = p.eps + p.alpha / p.delta;
    const double c_eta = p.eta * p.eta;
#pragma omp parallel for schedule(static) if (n >= 64)
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const std::size_t idx = static_cast<std::size_t>(i) * n + j;
            const double u = pphi[idx] - 0.5;
            po[idx] = u * u * u / p.eps - c_lap * pl[idx] + c_eta * pl2[idx] +
                      p.alpha * pc[idx];
        }
    return out;
}

CellField mu_phi_explicit(const CellField& phi_old, const ModelParams& p) {
    const int n = phi_old.n();
    const CellField lap = laplacian(phi_old);
    CellField out(phi_old.grid());
    const double* pp = phi_old.data();
    const double* pl = lap.data();
    double* po = out.data();
    const double c1 = 0.25 / p.eps;
    const double c2 = p.alpha / p.delta;
#pragma omp parallel for schedule(static) if (n >= 64)
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const std::size_t idx = static_cast<std::size_t>(i) * n + j;
            po[idx] = -c1 * (pp[idx] - 0.5) + c2 * pl[idx];
        }
    return out;
}

CellField mu_phi(const CellField& phi_new, const CellField& rho_new,
                 const CellField& phi_old, const ModelParams& p) {
    CellField out = mu_phi_convex(phi_new, rho_new, p);
    const CellField expl = mu_phi_explicit(phi_old, p);
    axpy(out, 1.0, expl);
    return out;
}

CellField mu_rho_convex(const CellField& phi, const CellField& rho, const ModelParams& p) {
    require_same_grid(phi.grid(), rho.grid(), "mu_rho_convex");
    require_rho_interior(rho, "mu_rho_convex");
    const int n = rho.n();
    const CellField nmag = avg_grad_mag(phi, p.delta);
    const CellField lap = laplacian(rho);
    CellField out(rho.grid());
    const double* pr = rho.data();
    const double* pl = lap.data();
    const double* pn = nmag.data();
    double* po = out.data();
#pragma omp parallel for schedule(static) if (n >= 64)
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const std::size_t idx = static_cast<std::size_t>(i) * n + j;
            const double r = pr[idx];
            po[idx] = -p.xi * pl[idx] + p.beta * (std::log(r) - std::log(1.0 - r)) +
                      kSqrt2 * p.alpha * r - p.alpha * pn[idx];
        }
    return out;
}

CellField mu_rho_explicit(const CellField& rho_old, const ModelParams& p) {
    return scaled(rho_old, -p.alpha * (kSqrt2 - 1.0));
}

CellField mu_rho(const CellField& phi_new, const CellField& rho_new,
                 const CellField& rho_old, const ModelParams& p) {
    CellField out = mu_rho_convex(phi_new, rho_new, p);
    axpy(out, -p.alpha * (kSqrt2 - 1.0), rho_old);
    return out;
}

std::pair<CellField, CellField> scheme_residual(const State& next, const State& old,
                                                const ModelParams& p) {
    require_same_grid(next.grid(), old.grid(), "scheme_residual");
    const CellField mphi = mu_phi(next.phi, next.rho, old.phi, p);
    const CellField mrho = mu_rho(next.phi, next.rho, old.rho, p);
    CellField f_phi = laplacian(mphi);
    CellField f_rho = laplacian(mrho);
    const int n = next.grid().n;
    const double inv_dt = 1.0 / p.dt;
    const double* pn_phi = next.phi.data();
    const double* po_phi = old.phi.data();
    const double* pn_rho = next.rho.data();
    const double* po_rho = old.rho.data();
    double* fp = f_phi.data();
    double* fr = f_rho.data();
#pragma omp parallel for schedule(static) if (n >= 64)
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const std::size_t idx = static_cast<std::size_t>(i) * n + j;
            fp[idx] = (pn_phi[idx] - po_phi[idx]) * inv_dt - p.mobility * fp[idx];
            fr[idx] = (pn_rho[idx] - po_rho[idx]) * inv_dt - p.mobility * fr[idx];
        }
    return {std::move(f_phi), std::move(f_rho)};
}

double residual_norm(const std::pair<CellField, CellField>& f) {
    return std::sqrt(inner(f.first, f.first) + inner(f.second, f.second));
}

double merit(const CellField& phi, const CellField& rho, const State& old,
             const ModelParams& p, const SpectralPoisson& poisson) {
    require_same_grid(phi.grid(), old.grid(), "merit");
    require_same_grid(rho.grid(), old.grid(), "merit");
    const double mean_phi_old = mean(old.phi);
    const double mean_rho_old = mean(old.rho);
    const double dm_phi = mean(phi) - mean_phi_old;
    const double dm_rho = mean(rho) - mean_rho_old;
    if (std::fabs(dm_phi) > 1e-9 * (1.0 + std::fabs(mean_phi_old)) ||
        std::fabs(dm_rho) > 1e-9 * (1.0 + std::fabs(mean_rho_old)))
        throw NonzeroMeanError("merit: candidate means differ from the old state's");

    const CellField d_phi = sub_mean(add_scaled(phi, -1.0, old.phi));
    const CellField d_rho = sub_mean(add_scaled(rho, -1.0, old.rho));
    const double w = 0.5 / (p.mobility * p.dt);
    const auto [np, nr] = poisson.hminus1_norm_pair(d_phi, d_rho);

    // Convex energy terms; the additive 1/(64 eps) constant of the convex
    // split is not part of J^n.
    const double ec = energy_convex(phi, rho, p) -
                      phi.grid().area() / (64.0 * p.eps);
    const double lin = inner(phi, mu_phi_explicit(old.phi, p)) +
                       inner(rho, mu_rho_explicit(old.rho, p));
    return w * (np * np + nr * nr) + ec + lin;
}

} // namespace bfsurf
