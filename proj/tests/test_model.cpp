// test_model.cpp -- energy split, chemical potentials as exact energy
// gradients, scheme residual, merit functional.

#include <doctest.h>

#include <cmath>
#include <random>

#include "bfsurf/model.hpp"
#include "bfsurf/ops.hpp"
#include "bfsurf/ref.hpp"
#include "oracle_helpers.hpp"

using namespace bfsurf;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Parameters of the smooth accuracy experiment.
ModelParams accuracy_params() { return ModelParams{0.05, 0.001, 0.02, 0.05, 0.05, 0.001, 0.01, 1e-4}; }

CellField random_field(const GridSpec& g, std::mt19937_64& eng, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    CellField f(g);
    for (std::size_t k = 0; k < f.size(); ++k) f.data()[k] = dist(eng);
    return f;
}

} // namespace

TEST_CASE("ModelParams rejects non-positive entries") {
    ModelParams p = accuracy_params();
    CHECK_NOTHROW(p.validate());
    p.delta = 0.0;
    CHECK_THROWS_AS(p.validate(), DomainError);
}

TEST_CASE("avg_grad_mag: constants, cosine closed form, delta monotonicity") {
    const GridSpec g(32, 8.0);

    const CellField flat = avg_grad_mag(CellField(g, 0.7), 0.01);
    for (std::size_t k = 0; k < flat.size(); ++k) CHECK(flat.data()[k] == 0.01);

    CellField phi(g);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            phi(i, j) = std::cos(2.0 * kPi * g.center(i) / g.length);
    const double h = g.spacing;
    const double amp = (2.0 / h) * std::sin(kPi * h / g.length);
    const double delta = 0.03;
    const CellField out = avg_grad_mag(phi, delta);
    for (int i = 0; i < g.n; ++i) {
        // The four squared edge differences of the sampled cosine, symbolically.
        const double de = amp * std::sin(2.0 * kPi * (g.center(i) + 0.5 * h) / g.length);
        const double dw = amp * std::sin(2.0 * kPi * (g.center(i) - 0.5 * h) / g.length);
        const double expected = std::sqrt(0.5 * (de * de + dw * dw) + delta * delta);
        for (int j = 0; j < g.n; ++j)
            CHECK(out(i, j) == doctest::Approx(expected).epsilon(1e-13));
    }
    for (std::size_t k = 0; k < out.size(); ++k) CHECK(out.data()[k] >= delta);

    std::mt19937_64 eng(31u);
    const CellField r = random_field(g, eng, -1.0, 1.0);
    const CellField a = avg_grad_mag(r, 0.02);
    const CellField b = avg_grad_mag(r, 0.05);
    for (std::size_t k = 0; k < r.size(); ++k) {
        CHECK(b.data()[k] > a.data()[k]);
        CHECK(b.data()[k] * b.data()[k] - a.data()[k] * a.data()[k] ==
              doctest::Approx(0.05 * 0.05 - 0.02 * 0.02).epsilon(1e-12));
    }

    CHECK_THROWS_AS(avg_grad_mag(r, 0.0), DomainError);
}

TEST_CASE("energy of the half-half constant state, hand evaluated") {
    const GridSpec g(32, 8.0);
    const ModelParams p = accuracy_params();
    const State s(CellField(g, 0.5), CellField(g, 0.5));
    const EnergyBreakdown e = energy(s, p);

    const double density = 1.0 / (64.0 * p.eps) +
                           0.5 * p.alpha * (0.5 - p.delta) * (0.5 - p.delta) +
                           p.beta * std::log(0.5);
    CHECK(e.total == doctest::Approx(64.0 * density).epsilon(1e-12));
    CHECK(e.well == doctest::Approx(64.0 / (64.0 * p.eps)).epsilon(1e-12));
    CHECK(e.dirichlet == 0.0);
    CHECK(e.bending == 0.0);
    CHECK(e.surf_dirichlet == 0.0);
    CHECK(e.coupling ==
          doctest::Approx(64.0 * 0.5 * p.alpha * std::pow(0.5 - p.delta, 2)).epsilon(1e-12));
    CHECK(e.entropy == doctest::Approx(64.0 * p.beta * std::log(0.5)).epsilon(1e-12));
}

TEST_CASE("double-well part vanishes at the pure phases") {
    const GridSpec g(16, 8.0);
    const ModelParams p = accuracy_params();
    for (double c : {0.0, 1.0}) {
        const State s(CellField(g, c), CellField(g, 0.5));
        CHECK(energy(s, p).well == 0.0);
    }
}

TEST_CASE("split identity total = convex - concave on random admissible states") {
    const GridSpec g(16, 8.0);
    const ModelParams p = accuracy_params();
    std::mt19937_64 eng(37u);
    for (int trial = 0; trial < 100; ++trial) {
        const State s(random_field(g, eng, -0.5, 1.5), random_field(g, eng, 0.02, 0.98));
        const EnergyBreakdown e = energy(s, p);
        CHECK(std::fabs(e.total - (e.convex - e.concave)) <=
              1e-10 * (1.0 + std::fabs(e.total)));
    }
}

TEST_CASE("energy requires rho strictly inside (0,1)") {
    const GridSpec g(8, 8.0);
    const ModelParams p = accuracy_params();
    CellField rho(g, 0.5);
    rho(2, 3) = 1.0;
    CHECK_THROWS_AS(energy(State(CellField(g, 0.5), rho), p), DomainError);
    rho(2, 3) = 0.0;
    CHECK_THROWS_AS(energy(State(CellField(g, 0.5), rho), p), DomainError);
}

TEST_CASE("energy total agrees with the serial reference evaluation") {
    const GridSpec g(48, 8.0);
    const ModelParams p = accuracy_params();
    std::mt19937_64 eng(41u);
    const CellField phi = random_field(g, eng, -0.2, 1.2);
    const CellField rho = random_field(g, eng, 0.1, 0.9);
    const double parallel = energy(State(phi, rho), p).total;
    const double serial = ref::energy_total(phi, rho, p);
    CHECK(parallel == doctest::Approx(serial).epsilon(1e-13));
}

TEST_CASE("mu_phi on constant states: zero at one half, closed form elsewhere") {
    const GridSpec g(16, 8.0);
    const ModelParams p = accuracy_params();

    const CellField half(g, 0.5);
    const CellField mu0 = mu_phi(half, CellField(g, 0.3), half, p);
    for (std::size_t k = 0; k < mu0.size(); ++k)
        CHECK(mu0.data()[k] == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));

    const CellField c08(g, 0.8);
    const CellField mu = mu_phi(c08, CellField(g, 0.4), c08, p);
    // (1/eps)(c-1/2)^3 - (1/(4 eps))(c-1/2) with c = 0.8, eps = 0.05.
    const double expected = 20.0 * 0.027 - 5.0 * 0.3;
    CHECK(expected == doctest::Approx(-0.96).epsilon(1e-14));
    for (std::size_t k = 0; k < mu.size(); ++k)
        CHECK(mu.data()[k] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("mu_rho on constant states: alpha(1/2 - delta) at rho = 1/2") {
    const GridSpec g(16, 8.0);
    ModelParams p = accuracy_params();
    p.alpha = 0.02;
    p.delta = 0.01;
    const CellField half_rho(g, 0.5);
    const CellField phi(g, 0.25);
    const CellField mu = mu_rho(phi, half_rho, half_rho, p);
    for (std::size_t k = 0; k < mu.size(); ++k)
        CHECK(mu.data()[k] == doctest::Approx(0.0098).epsilon(1e-13));

    // With alpha negligible only the entropy derivative is left; H'(1/2) = 0.
    p.alpha = 1e-14;
    const CellField mu2 = mu_rho(phi, half_rho, half_rho, p);
    for (std::size_t k = 0; k < mu2.size(); ++k)
        CHECK(std::fabs(mu2.data()[k]) <= 1e-13);

    CellField bad(g, 0.5);
    bad(1, 1) = 1.0;
    CHECK_THROWS_AS(mu_rho(phi, bad, half_rho, p), DomainError);
}

TEST_CASE("chemical potentials are the exact gradients of the discrete energies") {
    const GridSpec g(16, 8.0);
    const ModelParams p = accuracy_params();
    std::mt19937_64 eng(43u);
    const CellField phi = random_field(g, eng, 0.1, 0.9);
    const CellField rho = random_field(g, eng, 0.2, 0.8);
    const CellField phi_old = random_field(g, eng, 0.1, 0.9);
    const CellField rho_old = random_field(g, eng, 0.2, 0.8);
    const double sigma = 3e-6; // square root of round-off at these magnitudes

    for (int dir = 0; dir < 20; ++dir) {
        const CellField u = random_field(g, eng, -1.0, 1.0);

        const double fd_c_phi = (energy_convex(add_scaled(phi, sigma, u), rho, p) -
                                 energy_convex(add_scaled(phi, -sigma, u), rho, p)) /
                                (2.0 * sigma);
        const double an_c_phi = inner(mu_phi_convex(phi, rho, p), u);
        CHECK(std::fabs(fd_c_phi - an_c_phi) <= 1e-5 * (1.0 + std::fabs(an_c_phi)));

        const double fd_c_rho = (energy_convex(phi, add_scaled(rho, sigma, u), p) -
                                 energy_convex(phi, add_scaled(rho, -sigma, u), p)) /
                                (2.0 * sigma);
        const double an_c_rho = inner(mu_rho_convex(phi, rho, p), u);
        CHECK(std::fabs(fd_c_rho - an_c_rho) <= 1e-5 * (1.0 + std::fabs(an_c_rho)));

        // Explicit parts are minus the concave-energy gradients at the old state.
        const double fd_e_phi =
            (energy_concave(add_scaled(phi_old, sigma, u), rho_old, p) -
             energy_concave(add_scaled(phi_old, -sigma, u), rho_old, p)) /
            (2.0 * sigma);
        const double an_e_phi = inner(mu_phi_explicit(phi_old, p), u);
        CHECK(std::fabs(fd_e_phi + an_e_phi) <= 1e-5 * (1.0 + std::fabs(an_e_phi)));

        const double fd_e_rho =
            (energy_concave(phi_old, add_scaled(rho_old, sigma, u), p) -
             energy_concave(phi_old, add_scaled(rho_old, -sigma, u), p)) /
            (2.0 * sigma);
        const double an_e_rho = inner(mu_rho_explicit(rho_old, p), u);
        CHECK(std::fabs(fd_e_rho + an_e_rho) <= 1e-5 * (1.0 + std::fabs(an_e_rho)));
    }
}

TEST_CASE("convexity of E_c and E_e on random admissible pairs") {
    const GridSpec g(16, 8.0);
    const ModelParams p = accuracy_params();
    std::mt19937_64 eng(47u);
    std::uniform_real_distribution<double> lam_dist(0.02, 0.98);
    for (int trial = 0; trial < 20; ++trial) {
        const CellField phi_a = random_field(g, eng, -0.5, 1.5);
        const CellField rho_a = random_field(g, eng, 0.05, 0.95);
        const CellField phi_b = random_field(g, eng, -0.5, 1.5);
        const CellField rho_b = random_field(g, eng, 0.05, 0.95);
        const double lam = lam_dist(eng);
        const CellField phi_m = add_scaled(scaled(phi_a, lam), 1.0 - lam, phi_b);
        const CellField rho_m = add_scaled(scaled(rho_a, lam), 1.0 - lam, rho_b);
        const double ec_sum = lam * energy_convex(phi_a, rho_a, p) +
                              (1.0 - lam) * energy_convex(phi_b, rho_b, p);
        CHECK(energy_convex(phi_m, rho_m, p) <= ec_sum + 1e-10 * (1.0 + std::fabs(ec_sum)));
        const double ee_sum = lam * energy_concave(phi_a, rho_a, p) +
                              (1.0 - lam) * energy_concave(phi_b, rho_b, p);
        CHECK(energy_concave(phi_m, rho_m, p) <= ee_sum + 1e-10 * (1.0 + std::fabs(ee_sum)));
    }
}

TEST_CASE("scheme_residual: constant states are steady, residual means vanish") {
    const GridSpec g(16, 8.0);
    const ModelParams p = accuracy_params();

    const State c(CellField(g, 0.7), CellField(g, 0.4));
    const auto f = scheme_residual(c, c, p);
    for (std::size_t k = 0; k < f.first.size(); ++k) {
        CHECK(f.first.data()[k] == doctest::Approx(0.0).scale(1.0).epsilon(1e-13));
        CHECK(f.second.data()[k] == doctest::Approx(0.0).scale(1.0).epsilon(1e-13));
    }

    std::mt19937_64 eng(53u);
    for (int trial = 0; trial < 5; ++trial) {
        // Means must match across the step (the flow is conservative).
        const auto [phi_a, rho_a] = oracle::random_admissible_pair(g, eng, 0.5, 0.5);
        const auto [phi_b, rho_b] = oracle::random_admissible_pair(g, eng, 0.5, 0.5);
        const State a(phi_a, rho_a);
        const State b(phi_b, rho_b);
        const auto r = scheme_residual(a, b, p);
        const double scale_phi =
            std::max(1.0, norm(r.first, NormKind::linf));
        const double scale_rho =
            std::max(1.0, norm(r.second, NormKind::linf));
        CHECK(std::fabs(mean(r.first)) <= 1e-10 * scale_phi);
        CHECK(std::fabs(mean(r.second)) <= 1e-10 * scale_rho);
    }
}

TEST_CASE("merit: convexity along random chords") {
    const GridSpec g(8, 8.0);
    ModelParams p = accuracy_params();
    p.dt = 1e-3;
    const SpectralPoisson poisson(g);
    std::mt19937_64 eng(59u);

    const auto [phi_old, rho_old] = oracle::random_admissible_pair(g, eng, 0.5, 0.5);
    const State old(phi_old, rho_old);
    for (int trial = 0; trial < 20; ++trial) {
        auto [phi_a, rho_a] = oracle::random_admissible_pair(g, eng, 0.5, 0.5);
        auto [phi_b, rho_b] = oracle::random_admissible_pair(g, eng, 0.5, 0.5);
        const CellField phi_m = scaled(add_scaled(phi_a, 1.0, phi_b), 0.5);
        const CellField rho_m = scaled(add_scaled(rho_a, 1.0, rho_b), 0.5);
        const double lhs = merit(phi_m, rho_m, old, p, poisson);
        const double rhs = 0.5 * merit(phi_a, rho_a, old, p, poisson) +
                           0.5 * merit(phi_b, rho_b, old, p, poisson);
        CHECK(lhs <= rhs + 1e-10 * (1.0 + std::fabs(rhs)));
    }
}

TEST_CASE("merit lower bound from the explicit-part maxima") {
    const GridSpec g(8, 8.0);
    ModelParams p = accuracy_params();
    p.dt = 1e-3;
    const SpectralPoisson poisson(g);
    std::mt19937_64 eng(61u);
    const auto [phi_old, rho_old] = oracle::random_admissible_pair(g, eng, 0.5, 0.5);
    const State old(phi_old, rho_old);

    // J^n >= (1/(8 eps)) ||phi - 1/2||_4^4 - M3 with M3 assembled from the
    // sup norms of the explicit forcing terms.
    const double m1 = norm(mu_phi_explicit(old.phi, p), NormKind::linf);
    const double m2 = norm(mu_rho_explicit(old.rho, p), NormKind::linf);
    const double area = g.area();
    const double m3 =
        (0.5 * m1 * m1 + 0.5 * m1 + 0.5 * p.eps + p.beta * std::log(2.0) + m2) * area;

    for (int trial = 0; trial < 20; ++trial) {
        auto [phi, rho] = oracle::random_admissible_pair(g, eng, 0.5, 0.5);
        const double j = merit(phi, rho, old, p, poisson);
        CellField shifted = phi;
        for (std::size_t k = 0; k < shifted.size(); ++k) shifted.data()[k] -= 0.5;
        const double l4 = norm(shifted, NormKind::lp, 4.0);
        CHECK(j >= 1.0 / (8.0 * p.eps) * l4 * l4 * l4 * l4 - m3 - 1e-10 * (1.0 + m3));
    }
}

TEST_CASE("merit rejects mean mismatches and boundary rho") {
    const GridSpec g(8, 8.0);
    ModelParams p = accuracy_params();
    p.dt = 1e-3;
    const SpectralPoisson poisson(g);
    const State old(CellField(g, 0.5), CellField(g, 0.5));
    CHECK_THROWS_AS(merit(CellField(g, 0.6), CellField(g, 0.5), old, p, poisson),
                    NonzeroMeanError);
    CellField rho(g, 0.5);
    rho(0, 0) = 1.5;
    rho(1, 0) = -0.5; // keeps the mean at 0.5
    CHECK_THROWS_AS(merit(CellField(g, 0.5), rho, old, p, poisson), DomainError);
}
