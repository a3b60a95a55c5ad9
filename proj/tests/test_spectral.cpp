// test_spectral.cpp -- FFT plans against a naive DFT, exact Poisson inverse,
// discrete H^-1 norm.

#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "bfsurf/ops.hpp"
#include "bfsurf/spectral.hpp"

using namespace bfsurf;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>>& x) {
    const int n = static_cast<int>(x.size());
    std::vector<std::complex<double>> out(x.size());
    for (int k = 0; k < n; ++k) {
        std::complex<double> s = 0.0;
        for (int j = 0; j < n; ++j)
            s += x[static_cast<std::size_t>(j)] *
                 std::polar(1.0, -2.0 * kPi * k * j / n);
        out[static_cast<std::size_t>(k)] = s;
    }
    return out;
}

CellField random_mean_zero(const GridSpec& g, std::mt19937_64& eng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    CellField f(g);
    for (std::size_t k = 0; k < f.size(); ++k) f.data()[k] = dist(eng);
    return sub_mean(f);
}

} // namespace

TEST_CASE("1-D FFT plans match the naive DFT (radix-2 and Bluestein sizes)") {
    std::mt19937_64 eng(101u);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int n : {4, 6, 8, 12, 16, 20, 27, 32}) {
        detail::FftPlan plan(n);
        std::vector<std::complex<double>> x(static_cast<std::size_t>(n));
        for (auto& c : x) c = {dist(eng), dist(eng)};
        const auto expected = naive_dft(x);
        std::vector<std::complex<double>> y = x;
        plan.forward(y.data());
        for (int k = 0; k < n; ++k)
            CHECK(std::abs(y[static_cast<std::size_t>(k)] -
                           expected[static_cast<std::size_t>(k)]) <= 1e-12 * n);
        plan.inverse(y.data());
        for (int k = 0; k < n; ++k)
            CHECK(std::abs(y[static_cast<std::size_t>(k)] -
                           x[static_cast<std::size_t>(k)]) <= 1e-13 * n);
    }
}

TEST_CASE("inv_neg_laplacian: zero input, round trip, residual bound") {
    const GridSpec g(32, 8.0);
    const SpectralPoisson poisson(g);
    std::mt19937_64 eng(103u);

    const CellField zero(g);
    const CellField psi0 = poisson.inv_neg_laplacian(zero);
    for (std::size_t k = 0; k < psi0.size(); ++k) CHECK(psi0.data()[k] == 0.0);

    for (int trial = 0; trial < 5; ++trial) {
        const CellField w = random_mean_zero(g, eng);
        const CellField v = scaled(laplacian(w), -1.0);
        const CellField back = poisson.inv_neg_laplacian(v);
        CHECK(norm(add_scaled(back, -1.0, w), NormKind::l2) <=
              1e-12 * norm(w, NormKind::l2));

        const CellField psi = poisson.inv_neg_laplacian(w);
        const CellField res = add_scaled(laplacian(psi), 1.0, w); // lap psi + w
        CHECK(norm(res, NormKind::l2) <= 1e-12 * norm(w, NormKind::l2));
        CHECK(std::fabs(mean(psi)) <= 1e-13 * norm(psi, NormKind::linf));
    }
}

TEST_CASE("inv_neg_laplacian divides a Fourier mode by its eigenvalue") {
    const GridSpec g(32, 8.0);
    const SpectralPoisson poisson(g);
    CellField v(g);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            v(i, j) = std::cos(2.0 * kPi * g.center(i) / g.length);
    const double lam = 4.0 / (g.spacing * g.spacing) * std::pow(std::sin(kPi / g.n), 2);
    const CellField psi = poisson.inv_neg_laplacian(v);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            CHECK(psi(i, j) == doctest::Approx(v(i, j) / lam).epsilon(1e-12));
    // Oracle: applying -lap to the claimed psi returns v.
    const CellField check = scaled(laplacian(psi), -1.0);
    CHECK(norm(add_scaled(check, -1.0, v), NormKind::l2) <= 1e-12 * norm(v, NormKind::l2));
}

TEST_CASE("inv_neg_laplacian rejects inputs with a nonzero mean") {
    const GridSpec g(16, 8.0);
    const SpectralPoisson poisson(g);
    CHECK_THROWS_AS(poisson.inv_neg_laplacian(CellField(g, 0.5)), NonzeroMeanError);
}

TEST_CASE("hminus1_norm: zero, eigenmode closed form, homogeneity") {
    const GridSpec g(32, 8.0);
    const SpectralPoisson poisson(g);
    std::mt19937_64 eng(107u);

    CHECK(poisson.hminus1_norm(CellField(g)) == 0.0);

    CellField v(g);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            v(i, j) = std::cos(2.0 * kPi * g.center(i) / g.length);
    const double lam = 4.0 / (g.spacing * g.spacing) * std::pow(std::sin(kPi / g.n), 2);
    CHECK(poisson.hminus1_norm(v) ==
          doctest::Approx(norm(v, NormKind::l2) / std::sqrt(lam)).epsilon(1e-12));

    std::uniform_real_distribution<double> cdist(-4.0, 4.0);
    for (int trial = 0; trial < 5; ++trial) {
        const CellField w = random_mean_zero(g, eng);
        const double c = cdist(eng);
        CHECK(poisson.hminus1_norm(scaled(w, c)) ==
              doctest::Approx(std::fabs(c) * poisson.hminus1_norm(w)).epsilon(1e-12));
    }

    CHECK_THROWS_AS(poisson.hminus1_norm(CellField(g, 1.0)), NonzeroMeanError);
}

TEST_CASE("Poisson solve works on non power-of-two grids") {
    const GridSpec g(12, 8.0);
    const SpectralPoisson poisson(g);
    std::mt19937_64 eng(109u);
    const CellField w = random_mean_zero(g, eng);
    const CellField v = scaled(laplacian(w), -1.0);
    const CellField back = poisson.inv_neg_laplacian(v);
    CHECK(norm(add_scaled(back, -1.0, w), NormKind::l2) <= 1e-12 * norm(w, NormKind::l2));
}

TEST_CASE("packed pair application matches two single-field applications") {
    const GridSpec g(24, 8.0); // non power-of-two exercises the Bluestein path
    const SpectralPoisson poisson(g);
    std::mt19937_64 eng(127u);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    CellField a(g), b(g);
    for (std::size_t k = 0; k < a.size(); ++k) {
        a.data()[k] = dist(eng);
        b.data()[k] = dist(eng);
    }
    // Diagonals must be functions of the (reversal-symmetric) Laplacian symbol.
    const auto& lam = poisson.eigenvalues();
    std::vector<double> da(g.cells()), db(g.cells());
    for (std::size_t k = 0; k < da.size(); ++k) {
        da[k] = 2.0 + std::sin(lam[k]);
        db[k] = 1.0 / (1.0 + lam[k]);
    }
    const auto [pa, pb] = poisson.apply_mode_diagonal_pair(a, b, da, db);
    const CellField sa = poisson.apply_mode_diagonal(a, da);
    const CellField sb = poisson.apply_mode_diagonal(b, db);
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(pa.data()[k] == doctest::Approx(sa.data()[k]).epsilon(1e-12));
        CHECK(pb.data()[k] == doctest::Approx(sb.data()[k]).epsilon(1e-12));
    }

    // The H^-1 pair agrees with the single-field norms.
    const CellField ma = sub_mean(a);
    const CellField mb = sub_mean(b);
    const auto [na, nb] = poisson.hminus1_norm_pair(ma, mb);
    CHECK(na == doctest::Approx(poisson.hminus1_norm(ma)).epsilon(1e-12));
    CHECK(nb == doctest::Approx(poisson.hminus1_norm(mb)).epsilon(1e-12));
}

TEST_CASE("apply_mode_diagonal with the identity diagonal is the identity") {
    const GridSpec g(16, 8.0);
    const SpectralPoisson poisson(g);
    std::mt19937_64 eng(113u);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    CellField v(g);
    for (std::size_t k = 0; k < v.size(); ++k) v.data()[k] = dist(eng);
    const std::vector<double> ones(g.cells(), 1.0);
    const CellField out = poisson.apply_mode_diagonal(v, ones);
    for (std::size_t k = 0; k < v.size(); ++k)
        CHECK(out.data()[k] == doctest::Approx(v.data()[k]).epsilon(1e-13));
}
