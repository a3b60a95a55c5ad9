// spectral.cpp -- radix-2 / Bluestein FFT and the exact Poisson inverse.

#include "bfsurf/spectral.hpp"

#include <cmath>

#include "bfsurf/ops.hpp"

namespace bfsurf {

namespace detail {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

int next_pow2(int n) {
    int m = 1;
    while (m < n) m <<= 1;
    return m;
}
} // namespace

FftPlan::FftPlan(int n) : n_(n), pow2_(is_pow2(n)) {
    if (pow2_) {
        bitrev_.resize(static_cast<std::size_t>(n));
        int log2n = 0;
        while ((1 << log2n) < n) ++log2n;
        for (int i = 0; i < n; ++i) {
            int r = 0;
            for (int b = 0; b < log2n; ++b)
                if (i & (1 << b)) r |= 1 << (log2n - 1 - b);
            bitrev_[static_cast<std::size_t>(i)] = r;
        }
        twiddle_.resize(static_cast<std::size_t>(n / 2));
        for (int k = 0; k < n / 2; ++k)
            twiddle_[static_cast<std::size_t>(k)] =
                std::polar(1.0, -2.0 * kPi * k / n);
    } else {
        // Bluestein: x_j e^{-i pi j^2/n} convolved with e^{+i pi j^2/n}.
        conv_n_ = next_pow2(2 * n - 1);
        chirp_.resize(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            // j^2 mod 2n keeps the phase argument small and exact.
            const long long q = (static_cast<long long>(j) * j) % (2LL * n);
            chirp_[static_cast<std::size_t>(j)] =
                std::polar(1.0, -kPi * static_cast<double>(q) / n);
        }
        std::vector<std::complex<double>> b(static_cast<std::size_t>(conv_n_), 0.0);
        for (int j = 0; j < n; ++j) {
            const std::complex<double> c = std::conj(chirp_[static_cast<std::size_t>(j)]);
            b[static_cast<std::size_t>(j)] = c;
            if (j > 0) b[static_cast<std::size_t>(conv_n_ - j)] = c;
        }
        conv_plan_ = std::make_unique<FftPlan>(conv_n_);
        conv_plan_->forward(b.data());
        chirp_spectrum_ = std::move(b);
    }
}

void FftPlan::forward_pow2(std::complex<double>* x) const {
    const int n = n_;
    for (int i = 0; i < n; ++i) {
        const int r = bitrev_[static_cast<std::size_t>(i)];
        if (r > i) std::swap(x[i], x[r]);
    }
    for (int len = 2; len <= n; len <<= 1) {
        const int half = len >> 1;
        const int step = n / len;
        for (int base = 0; base < n; base += len) {
            for (int k = 0; k < half; ++k) {
                const std::complex<double> w = twiddle_[static_cast<std::size_t>(k * step)];
                const std::complex<double> u = x[base + k];
                const std::complex<double> t = w * x[base + k + half];
                x[base + k] = u + t;
                x[base + k + half] = u - t;
            }
        }
    }
}

void FftPlan::forward(std::complex<double>* x) const {
    if (pow2_) {
        forward_pow2(x);
        return;
    }
    const int n = n_;
    std::vector<std::complex<double>> a(static_cast<std::size_t>(conv_n_), 0.0);
    for (int j = 0; j < n; ++j) a[static_cast<std::size_t>(j)] = x[j] * chirp_[static_cast<std::size_t>(j)];
    conv_plan_->forward(a.data());
    for (int j = 0; j < conv_n_; ++j) a[static_cast<std::size_t>(j)] *= chirp_spectrum_[static_cast<std::size_t>(j)];
    conv_plan_->inverse(a.data());
    for (int k = 0; k < n; ++k) x[k] = a[static_cast<std::size_t>(k)] * chirp_[static_cast<std::size_t>(k)];
}

void FftPlan::inverse(std::complex<double>* x) const {
    const int n = n_;
    for (int i = 0; i < n; ++i) x[i] = std::conj(x[i]);
    forward(x);
    const double s = 1.0 / n;
    for (int i = 0; i < n; ++i) x[i] = std::conj(x[i]) * s;
}

} // namespace detail

SpectralPoisson::SpectralPoisson(GridSpec grid) : grid_(grid), plan_(grid.n) {
    const int n = grid_.n;
    const double h = grid_.spacing;
    constexpr double pi = 3.141592653589793238462643383279502884;
    std::vector<double> axis(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double sk = std::sin(pi * k / n);
        axis[static_cast<std::size_t>(k)] = 4.0 / (h * h) * sk * sk;
    }
    lambda_.resize(grid_.cells());
    inv_lambda_.assign(grid_.cells(), 0.0);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
            const std::size_t idx = static_cast<std::size_t>(k) * n + l;
            lambda_[idx] = axis[static_cast<std::size_t>(k)] + axis[static_cast<std::size_t>(l)];
            if (idx != 0) inv_lambda_[idx] = 1.0 / lambda_[idx];
        }
}

void SpectralPoisson::fft2(std::vector<std::complex<double>>& buf, bool forward) const {
    const int n = grid_.n;
    auto pass_rows = [&](std::vector<std::complex<double>>& b) {
#pragma omp parallel for schedule(static) if (n >= 64)
        for (int i = 0; i < n; ++i) {
            std::complex<double>* row = b.data() + static_cast<std::size_t>(i) * n;
            if (forward)
                plan_.forward(row);
            else
                plan_.inverse(row);
        }
    };
    auto transpose = [&](std::vector<std::complex<double>>& b) {
#pragma omp parallel for schedule(static) if (n >= 64)
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                std::swap(b[static_cast<std::size_t>(i) * n + j],
                          b[static_cast<std::size_t>(j) * n + i]);
    };
    pass_rows(buf);
    transpose(buf);
    pass_rows(buf);
    transpose(buf);
}

CellField SpectralPoisson::apply_mode_diagonal(const CellField& v,
                                               const std::vector<double>& diag) const {
    require_same_grid(v.grid(), grid_, "apply_mode_diagonal");
    if (diag.size() != grid_.cells())
        throw DomainError("apply_mode_diagonal: diagonal size mismatch");
    std::vector<std::complex<double>> buf(grid_.cells());
    const double* s = v.data();
    for (std::size_t k = 0; k < buf.size(); ++k) buf[k] = s[k];
    fft2(buf, true);
    for (std::size_t k = 0; k < buf.size(); ++k) buf[k] *= diag[k];
    fft2(buf, false);
    CellField out(grid_);
    double* o = out.data();
    for (std::size_t k = 0; k < buf.size(); ++k) o[k] = buf[k].real();
    return out;
}

std::pair<CellField, CellField> SpectralPoisson::apply_mode_diagonal_pair(
    const CellField& a, const CellField& b, const std::vector<double>& diag_a,
    const std::vector<double>& diag_b) const {
    require_same_grid(a.grid(), grid_, "apply_mode_diagonal_pair");
    require_same_grid(b.grid(), grid_, "apply_mode_diagonal_pair");
    if (diag_a.size() != grid_.cells() || diag_b.size() != grid_.cells())
        throw DomainError("apply_mode_diagonal_pair: diagonal size mismatch");
    const int n = grid_.n;
    std::vector<std::complex<double>> z(grid_.cells());
    const double* pa = a.data();
    const double* pb = b.data();
    for (std::size_t k = 0; k < z.size(); ++k) z[k] = {pa[k], pb[k]};
    fft2(z, true);
    // With Z = A + iB and A, B Hermitian, the per-field spectra are
    // recovered from Z at a mode and its reversal:
    //   W_k = d_a (Z_k + conj(Z_rev))/2 + d_b (Z_k - conj(Z_rev))/2.
    std::vector<std::complex<double>> w(grid_.cells());
#pragma omp parallel for schedule(static) if (n >= 64)
    for (int i = 0; i < n; ++i) {
        const int ir = (n - i) % n;
        for (int j = 0; j < n; ++j) {
            const int jr = (n - j) % n;
            const std::size_t c = static_cast<std::size_t>(i) * n + j;
            const std::size_t r = static_cast<std::size_t>(ir) * n + jr;
            const std::complex<double> zc = z[c];
            const std::complex<double> zr = std::conj(z[r]);
            w[c] = 0.5 * (diag_a[c] + diag_b[c]) * zc + 0.5 * (diag_a[c] - diag_b[c]) * zr;
        }
    }
    fft2(w, false);
    CellField out_a(grid_), out_b(grid_);
    double* qa = out_a.data();
    double* qb = out_b.data();
    for (std::size_t k = 0; k < w.size(); ++k) {
        qa[k] = w[k].real();
        qb[k] = w[k].imag();
    }
    return {std::move(out_a), std::move(out_b)};
}

CellField SpectralPoisson::inv_neg_laplacian(const CellField& v) const {
    require_same_grid(v.grid(), grid_, "inv_neg_laplacian");
    const double m = mean(v);
    const double l2 = norm(v, NormKind::l2);
    if (std::fabs(m) > 1e-12 * l2)
        throw NonzeroMeanError("inv_neg_laplacian: input mean " + std::to_string(m) +
                               " exceeds 1e-12 * ||v||_2; subtract the mean first");
    // Zero mode stays zero; every other eigenvalue is strictly positive.
    return apply_mode_diagonal(v, inv_lambda_);
}

double SpectralPoisson::hminus1_norm(const CellField& v) const {
    const CellField psi = inv_neg_laplacian(v);
    const double q = inner(v, psi);
    return std::sqrt(q > 0.0 ? q : 0.0);
}

std::pair<double, double> SpectralPoisson::hminus1_norm_pair(const CellField& a,
                                                             const CellField& b) const {
    require_same_grid(a.grid(), grid_, "hminus1_norm_pair");
    require_same_grid(b.grid(), grid_, "hminus1_norm_pair");
    for (const CellField* f : {&a, &b}) {
        const double m = mean(*f);
        if (std::fabs(m) > 1e-12 * norm(*f, NormKind::l2))
            throw NonzeroMeanError("hminus1_norm_pair: input mean exceeds 1e-12 * ||v||_2");
    }
    // The mode diagonal is real, so solving for a + i b solves both fields.
    std::vector<std::complex<double>> buf(grid_.cells());
    const double* pa = a.data();
    const double* pb = b.data();
    for (std::size_t k = 0; k < buf.size(); ++k) buf[k] = {pa[k], pb[k]};
    fft2(buf, true);
    for (std::size_t k = 0; k < buf.size(); ++k) buf[k] *= inv_lambda_[k];
    fft2(buf, false);
    CellField psi_a(grid_), psi_b(grid_);
    double* qa = psi_a.data();
    double* qb = psi_b.data();
    for (std::size_t k = 0; k < buf.size(); ++k) {
        qa[k] = buf[k].real();
        qb[k] = buf[k].imag();
    }
    const double na = inner(a, psi_a);
    const double nb = inner(b, psi_b);
    return {std::sqrt(na > 0.0 ? na : 0.0), std::sqrt(nb > 0.0 ? nb : 0.0)};
}

} // namespace bfsurf
