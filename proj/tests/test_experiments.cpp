// test_experiments.cpp -- initial data, prolongation, Cauchy differences,
// short refinement and spinodal runs.

#include <doctest.h>

#include <cmath>
#include <random>

#include "bfsurf/experiments.hpp"
#include "bfsurf/ops.hpp"

using namespace bfsurf;

namespace {

ModelParams accuracy_params(double dt) {
    return ModelParams{0.05, 0.001, 0.02, 0.05, 0.05, 0.001, 0.01, dt};
}

ModelParams spinodal_params(double dt) {
    return ModelParams{0.02, 0.02, 0.02, 0.02, 0.02, 0.01, 0.01, dt};
}

} // namespace

TEST_CASE("init_trig: exact means, sample values, rho range, domain check") {
    for (int n : {16, 32, 64}) {
        const State s = init_trig(GridSpec(n, 8.0));
        CHECK(mean(s.phi) == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(mean(s.rho) == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(min_value(s.rho) >= 0.3);
        CHECK(max_value(s.rho) <= 0.7);
        CHECK(min_value(s.phi) >= 0.3);
        CHECK(max_value(s.phi) <= 0.7);
    }

    // N = 12 places a cell center exactly at (1,1), where both cosines vanish.
    const GridSpec g12(12, 8.0);
    CHECK(g12.center(1) == doctest::Approx(1.0).epsilon(1e-15));
    const State s = init_trig(g12);
    CHECK(s.phi(1, 1) == doctest::Approx(0.5).epsilon(1e-14));

    CHECK_THROWS_AS(init_trig(GridSpec(16, 4.0)), DomainError);
}

TEST_CASE("init_random: exact means, bounds, determinism, stream separation") {
    const GridSpec g(32, 6.283185307179586);

    const State a = init_random(g, 42u);
    CHECK(mean(a.phi) == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(mean(a.rho) == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(min_value(a.phi) > 0.0);
    CHECK(max_value(a.phi) < 1.0);
    CHECK(min_value(a.rho) > 0.0);
    CHECK(max_value(a.rho) < 1.0);

    const State b = init_random(g, 42u);
    CHECK(a.phi == b.phi);
    CHECK(a.rho == b.rho);

    const State c = init_random(g, 43u);
    CHECK_FALSE(a.phi == c.phi);

    // phi and rho come from distinct streams.
    CHECK_FALSE(a.phi == a.rho);

    const State d = init_random(g, 7u, 0.1, 0.05);
    CHECK(mean(d.rho) == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(min_value(d.rho) > 0.0);

    CHECK_THROWS_AS(init_random(g, 1u, 0.05, 0.1), DomainError);
}

TEST_CASE("prolong_bilinear: constants, mean preservation, spike footprint") {
    const GridSpec gc(4, 4.0);

    const CellField fc = prolong_bilinear(CellField(gc, 2.5));
    CHECK(fc.n() == 8);
    for (std::size_t k = 0; k < fc.size(); ++k)
        CHECK(fc.data()[k] == doctest::Approx(2.5).epsilon(1e-15));

    std::mt19937_64 eng(79u);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    CellField r(gc);
    for (std::size_t k = 0; k < r.size(); ++k) r.data()[k] = dist(eng);
    CHECK(mean(prolong_bilinear(r)) == doctest::Approx(mean(r)).epsilon(1e-14));

    CellField spike(gc);
    spike(1, 2) = 1.0;
    const CellField f = prolong_bilinear(spike);
    // 4x4 footprint around the doubled index with tensor weights
    // (1/4, 3/4, 3/4, 1/4) x (1/4, 3/4, 3/4, 1/4).
    const double wx[4] = {0.25, 0.75, 0.75, 0.25};
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            CHECK(f(2 * 1 - 1 + a, 2 * 2 - 1 + b) ==
                  doctest::Approx(wx[a] * wx[b]).epsilon(1e-15));
    double total = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) total += f.data()[k];
    CHECK(total == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("prolong_bilinear reproduces linear-in-x data away from the wrap") {
    const GridSpec gc(8, 8.0);
    CellField lin(gc);
    for (int i = 0; i < gc.n; ++i)
        for (int j = 0; j < gc.n; ++j) lin(i, j) = gc.center(i);
    const CellField f = prolong_bilinear(lin);
    const GridSpec gf(16, 8.0);
    // The sawtooth jump at the periodic wrap contaminates the two fine
    // columns nearest to it; everywhere else the interpolation is exact.
    for (int fi = 2; fi < gf.n - 2; ++fi)
        for (int fj = 0; fj < gf.n; ++fj)
            CHECK(f(fi, fj) == doctest::Approx(gf.center(fi)).epsilon(1e-14));
}

TEST_CASE("cauchy_error: zero on matching constants, direct-evaluation oracle") {
    const GridSpec gc(8, 8.0);
    const GridSpec gf(16, 8.0);

    const State cc(CellField(gc, 0.3), CellField(gc, 0.6));
    const State cf(CellField(gf, 0.3), CellField(gf, 0.6));
    const auto [e0_phi, e0_rho] = cauchy_error(cf, cc);
    CHECK(e0_phi <= 1e-15);
    CHECK(e0_rho <= 1e-15);

    // Single-mode data: compute the interpolation defect directly.
    constexpr double kPi = 3.141592653589793238462643383279502884;
    auto mode = [&](const GridSpec& g) {
        CellField v(g, 0.5);
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j)
                v(i, j) += 0.25 * std::cos(2.0 * kPi * g.center(i) / g.length);
        return v;
    };
    const State coarse(mode(gc), CellField(gc, 0.5));
    const State fine(mode(gf), CellField(gf, 0.5));
    const auto [e_phi, e_rho] = cauchy_error(fine, coarse);
    CHECK(e_rho <= 1e-15);

    double acc = 0.0;
    for (int fi = 0; fi < gf.n; ++fi)
        for (int fj = 0; fj < gf.n; ++fj) {
            const int ci = fi >> 1;
            const int ni = (fi & 1) ? (ci + 1) % gc.n : (ci + gc.n - 1) % gc.n;
            // 3/4 own, 1/4 neighbor in x; the data is constant in y so the
            // y-weights collapse.
            const double interp = 0.75 * coarse.phi(ci, 0) + 0.25 * coarse.phi(ni, 0);
            const double d = fine.phi(fi, fj) - interp;
            acc += d * d;
        }
    const double expected = std::sqrt(gf.spacing * gf.spacing * acc);
    CHECK(e_phi == doctest::Approx(expected).epsilon(1e-12));

    // x <-> y symmetry for symmetric data.
    auto mode_y = [&](const GridSpec& g) {
        CellField v(g, 0.5);
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j)
                v(i, j) += 0.25 * std::cos(2.0 * kPi * g.center(j) / g.length);
        return v;
    };
    const State coarse_y(mode_y(gc), CellField(gc, 0.5));
    const State fine_y(mode_y(gf), CellField(gf, 0.5));
    const auto [ey_phi, ey_rho] = cauchy_error(fine_y, coarse_y);
    CHECK(ey_phi == doctest::Approx(e_phi).epsilon(1e-13));

    CHECK_THROWS_AS(cauchy_error(cc, cc), GridMismatchError);
    const State late(CellField(gf, 0.3), CellField(gf, 0.6), 1.0, 10);
    CHECK_THROWS_AS(cauchy_error(late, cc), DomainError);
}

TEST_CASE("convergence_study on two coarse levels produces sane rows") {
    const auto rows = convergence_study({16, 32}, 0.01, 0.02, accuracy_params(0.0));
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].grid_n == 16);
    CHECK(rows[0].error_phi > 0.0);
    CHECK(rows[0].error_rho > 0.0);
    CHECK(std::isnan(rows[0].rate_phi));

    CHECK_THROWS_AS(convergence_study({16, 48}, 0.01, 0.02, accuracy_params(0.0)),
                    DomainError);
    CHECK_THROWS_AS(convergence_study({16}, 0.01, 0.02, accuracy_params(0.0)), DomainError);
}

TEST_CASE("rate definition recovers the tabulated rate from tabulated errors") {
    // log2 of the tabulated 16->32 error quotient is the tabulated rate.
    CHECK(std::log2(1.93e-1 / 5.07e-2) == doctest::Approx(1.93).epsilon(5e-3));
    CHECK(std::log2(5.07e-2 / 1.28e-2) == doctest::Approx(1.99).epsilon(5e-3));
}

TEST_CASE("short spinodal run: series shape, decay, conservation, determinism") {
    RunConfig cfg{GridSpec(32, 6.283185307179586), spinodal_params(1e-2), SolverConfig{},
                  0.05, {}, 2024u, "unused", 0.4, 0.1};

    struct Recorder : RunObserver {
        int initial = 0, steps = 0, snaps = 0;
        void on_initial(const State&, const StepDiagnostics&) override { ++initial; }
        void on_step(const State&, const StepDiagnostics&) override { ++steps; }
        void on_snapshot(const State&) override { ++snaps; }
    } rec;

    const RunResult r = spinodal_run(cfg, &rec);
    CHECK(rec.initial == 1);
    CHECK(rec.steps == 5);
    CHECK(r.series.size() == 6); // t = 0 row plus one per step

    for (std::size_t k = 1; k < r.series.size(); ++k) {
        CHECK(r.series[k].energy.total <=
              r.series[k - 1].energy.total +
                  1e-9 * (1.0 + std::fabs(r.series[k].energy.total)));
        CHECK(r.series[k].rho_min > 0.0);
        CHECK(r.series[k].rho_max < 1.0);
        CHECK(std::fabs(r.series[k].mass_phi - r.series[0].mass_phi) <=
              1e-10 * std::fabs(r.series[0].mass_phi));
        CHECK(std::fabs(r.series[k].mass_rho - r.series[0].mass_rho) <=
              1e-10 * std::fabs(r.series[0].mass_rho));
    }

    const RunResult r2 = spinodal_run(cfg);
    CHECK(r.final_state.phi == r2.final_state.phi);
    CHECK(r.final_state.rho == r2.final_state.rho);
}

TEST_CASE("snapshot times are emitted at the nearest step including t = 0") {
    RunConfig cfg{GridSpec(16, 6.283185307179586), spinodal_params(1e-2), SolverConfig{},
                  0.04, {0.0, 0.02, 0.04}, 5u, "unused", 0.4, 0.1};
    struct Recorder : RunObserver {
        std::vector<double> times;
        void on_snapshot(const State& s) override { times.push_back(s.time); }
    } rec;
    spinodal_run(cfg, &rec);
    REQUIRE(rec.times.size() == 3);
    CHECK(rec.times[0] == 0.0);
    CHECK(rec.times[1] == doctest::Approx(0.02).epsilon(1e-12));
    CHECK(rec.times[2] == doctest::Approx(0.04).epsilon(1e-12));

    RunConfig bad = cfg;
    bad.snapshot_times = {0.2};
    CHECK_THROWS_AS(spinodal_run(bad), DomainError);
}
