// selfcheck.cpp -- the `verify` property suite: quick structural checks that
// exercise every guarantee the scheme is built on.

#include <cmath>
#include <functional>
#include <ostream>
#include <random>

#include "bfsurf/ops.hpp"
#include "bfsurf/runner.hpp"
#include "bfsurf/stepper.hpp"

namespace bfsurf {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

CellField random_field(const GridSpec& g, std::mt19937_64& eng, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    CellField f(g);
    for (std::size_t k = 0; k < f.size(); ++k) f.data()[k] = dist(eng);
    return f;
}

EdgeFieldPair random_edges(const GridSpec& g, std::mt19937_64& eng, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    EdgeFieldPair f(g);
    for (std::size_t k = 0; k < f.size(); ++k) {
        f.x_data()[k] = dist(eng);
        f.y_data()[k] = dist(eng);
    }
    return f;
}

ModelParams accuracy_params() {
    // Parameters of the smooth accuracy experiment.
    return ModelParams{0.05, 0.001, 0.02, 0.05, 0.05, 0.001, 0.01, 1e-4};
}

struct Suite {
    std::ostream& log;
    bool all_ok = true;
    void check(const std::string& name, bool ok, const std::string& detail = "") {
        log << (ok ? "[ ok ] " : "[FAIL] ") << name;
        if (!detail.empty()) log << " (" << detail << ")";
        log << "\n";
        all_ok = all_ok && ok;
    }
};

} // namespace

bool run_property_suite(std::ostream& log) {
    Suite s{log};
    std::mt19937_64 eng(20240817u);

    const GridSpec g16(16, 8.0);
    const GridSpec g32(32, 8.0);

    // Summation by parts: <v, div f> + [grad v, f] = 0.
    {
        const CellField v = random_field(g16, eng, -1.0, 1.0);
        const EdgeFieldPair f = random_edges(g16, eng, -1.0, 1.0);
        const double a = inner(v, div(f));
        const double b = edge_inner(grad(v), f);
        const double scale = std::max(1.0, std::fabs(a));
        s.check("adjointness <v,div f> = -[grad v, f]", std::fabs(a + b) <= 1e-12 * scale);
    }

    // Fourier modes are exact eigenvectors of the 5-point Laplacian.
    {
        bool ok = true;
        for (int k : {1, 3, 5}) {
            CellField v(g32);
            for (int i = 0; i < 32; ++i)
                for (int j = 0; j < 32; ++j)
                    v(i, j) = std::cos(2.0 * kPi * k * g32.center(i) / g32.length);
            const double lam = 4.0 / (g32.spacing * g32.spacing) *
                               std::pow(std::sin(kPi * k / g32.n), 2);
            const CellField lv = laplacian(v);
            for (int i = 0; i < 32 && ok; ++i)
                for (int j = 0; j < 32 && ok; ++j)
                    ok = std::fabs(lv(i, j) + lam * v(i, j)) <= 1e-12 * (1.0 + lam);
        }
        s.check("discrete Laplacian eigenmodes", ok);
    }

    // Exact inverse: -lap(inv(v)) == v and the round trip.
    {
        CellField w = sub_mean(random_field(g32, eng, -1.0, 1.0));
        SpectralPoisson poisson(g32);
        const CellField psi = poisson.inv_neg_laplacian(w);
        const CellField back = scaled(laplacian(psi), -1.0);
        const double rel = norm(add_scaled(back, -1.0, w), NormKind::l2) /
                           norm(w, NormKind::l2);
        s.check("inv_neg_laplacian residual <= 1e-12 rel", rel <= 1e-12,
                "rel = " + std::to_string(rel));
    }

    // Energy split identity and convexity of both parts.
    {
        const ModelParams p = accuracy_params();
        bool split_ok = true, convex_ok = true;
        std::uniform_real_distribution<double> lam_dist(0.05, 0.95);
        for (int trial = 0; trial < 10; ++trial) {
            const CellField phi_a = random_field(g16, eng, -0.3, 1.3);
            const CellField rho_a = random_field(g16, eng, 0.05, 0.95);
            const CellField phi_b = random_field(g16, eng, -0.3, 1.3);
            const CellField rho_b = random_field(g16, eng, 0.05, 0.95);
            const State st(phi_a, rho_a);
            const EnergyBreakdown e = energy(st, p);
            split_ok = split_ok && std::fabs(e.total - (e.convex - e.concave)) <=
                                       1e-10 * (1.0 + std::fabs(e.total));
            const double lam = lam_dist(eng);
            const CellField phi_m = add_scaled(scaled(phi_a, lam), 1.0 - lam, phi_b);
            const CellField rho_m = add_scaled(scaled(rho_a, lam), 1.0 - lam, rho_b);
            const double ec_m = energy_convex(phi_m, rho_m, p);
            const double ec_ab = lam * energy_convex(phi_a, rho_a, p) +
                                 (1.0 - lam) * energy_convex(phi_b, rho_b, p);
            const double ee_m = energy_concave(phi_m, rho_m, p);
            const double ee_ab = lam * energy_concave(phi_a, rho_a, p) +
                                 (1.0 - lam) * energy_concave(phi_b, rho_b, p);
            convex_ok = convex_ok && ec_m <= ec_ab + 1e-10 * (1.0 + std::fabs(ec_ab)) &&
                        ee_m <= ee_ab + 1e-10 * (1.0 + std::fabs(ee_ab));
        }
        s.check("energy split E = E_c - E_e", split_ok);
        s.check("convexity of E_c and E_e", convex_ok);
    }

    // Chemical potentials are the exact energy gradients (finite differences).
    {
        const ModelParams p = accuracy_params();
        const GridSpec g8(8, 8.0);
        const CellField phi = random_field(g8, eng, 0.1, 0.9);
        const CellField rho = random_field(g8, eng, 0.2, 0.8);
        bool ok = true;
        double worst = 0.0;
        for (int trial = 0; trial < 3; ++trial) {
            const CellField u = random_field(g8, eng, -1.0, 1.0);
            const double sigma = 3e-6;
            const double fd_phi = (energy_convex(add_scaled(phi, sigma, u), rho, p) -
                                   energy_convex(add_scaled(phi, -sigma, u), rho, p)) /
                                  (2.0 * sigma);
            const double an_phi = inner(mu_phi_convex(phi, rho, p), u);
            const double fd_rho = (energy_convex(phi, add_scaled(rho, sigma, u), p) -
                                   energy_convex(phi, add_scaled(rho, -sigma, u), p)) /
                                  (2.0 * sigma);
            const double an_rho = inner(mu_rho_convex(phi, rho, p), u);
            const double r1 = std::fabs(fd_phi - an_phi) / (1.0 + std::fabs(an_phi));
            const double r2 = std::fabs(fd_rho - an_rho) / (1.0 + std::fabs(an_rho));
            worst = std::max({worst, r1, r2});
            ok = ok && r1 <= 1e-5 && r2 <= 1e-5;
        }
        s.check("mu_phi / mu_rho match finite-difference energy gradients", ok,
                "worst rel = " + std::to_string(worst));
    }

    // Safeguard arithmetic.
    {
        CellField rho(g16, 0.5), d(g16, 1.0);
        const double t1 = safeguard_fraction(rho, d, 0.9);
        CellField d0(g16, 0.0);
        const double t2 = safeguard_fraction(rho, d0, 0.9);
        rho(3, 4) = 0.99;
        CellField d3(g16, 0.1);
        const double t3 = safeguard_fraction(rho, d3, 0.9);
        s.check("fraction-to-boundary closed forms",
                std::fabs(t1 - 0.45) <= 1e-15 && t2 == 1.0 && std::fabs(t3 - 0.09) <= 1e-15);
    }

    // Constant states are exact fixed points of the scheme.
    {
        ModelParams p = accuracy_params();
        TimeStepper stepper(g16, p);
        const State c(CellField(g16, 0.3), CellField(g16, 0.6));
        auto [next, diag] = stepper.advance(c);
        const double dphi = norm(add_scaled(next.phi, -1.0, c.phi), NormKind::linf);
        const double drho = norm(add_scaled(next.rho, -1.0, c.rho), NormKind::linf);
        s.check("constant-state fixed point (0 Newton iterations)",
                diag.newton_iters == 0 && dphi == 0.0 && drho == 0.0);
    }

    // One implicit step on smooth data: energy decays, masses conserved,
    // rho stays interior.
    {
        ModelParams p = accuracy_params();
        TimeStepper stepper(g32, p);
        const State s0 = init_trig(g32);
        const EnergyBreakdown e0 = energy(s0, p);
        auto [s1, diag] = stepper.advance(s0);
        const bool decay = diag.energy.total <= e0.total + 1e-9 * (1.0 + std::fabs(e0.total));
        const bool mass = std::fabs(mean(s1.phi) - mean(s0.phi)) <= 1e-12 &&
                          std::fabs(mean(s1.rho) - mean(s0.rho)) <= 1e-12;
        const bool interior = diag.rho_min > 0.0 && diag.rho_max < 1.0;
        s.check("one implicit step: energy decay, mass conservation, positivity",
                decay && mass && interior,
                "E " + std::to_string(e0.total) + " -> " + std::to_string(diag.energy.total));
    }

    log << (s.all_ok ? "verify: all checks passed\n" : "verify: FAILURES above\n");
    return s.all_ok;
}

} // namespace bfsurf
