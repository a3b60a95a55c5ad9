// spectral.hpp -- discrete Fourier diagonalization of the periodic 5-point
// Laplacian: exact mean-zero inverse solves and the induced H^-1 norm.
//
// Every discrete Fourier mode (k,l) is an eigenvector of lap_h with
// eigenvalue -(4/h^2)(sin^2(pi k/N) + sin^2(pi l/N)), so -lap_h is inverted
// exactly by dividing each nonzero mode by its eigenvalue and zeroing the
// constant mode. Power-of-two sizes use an iterative radix-2 transform;
// other sizes go through Bluestein's chirp-z construction.

#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "bfsurf/grid.hpp"

namespace bfsurf {

namespace detail {

/// 1-D complex FFT plan with precomputed twiddles (radix-2 or Bluestein).
class FftPlan {
public:
    explicit FftPlan(int n);
    int size() const { return n_; }
    void forward(std::complex<double>* x) const; // unscaled
    void inverse(std::complex<double>* x) const; // scaled by 1/n

private:
    void forward_pow2(std::complex<double>* x) const;
    int n_ = 0;
    bool pow2_ = false;
    std::vector<int> bitrev_;
    std::vector<std::complex<double>> twiddle_;
    // Bluestein machinery (only for non power-of-two sizes).
    int conv_n_ = 0;
    std::vector<std::complex<double>> chirp_;
    std::vector<std::complex<double>> chirp_spectrum_;
    std::unique_ptr<FftPlan> conv_plan_;
};

} // namespace detail

/// Spectral workspace bound to one GridSpec. Caches the 1-D plan and the
/// eigenvalue table of -lap_h; all solves are deterministic.
class SpectralPoisson {
public:
    explicit SpectralPoisson(GridSpec grid);

    const GridSpec& grid() const { return grid_; }

    /// Eigenvalues of -lap_h, lambda(k,l) >= 0, flat index k*N + l.
    const std::vector<double>& eigenvalues() const { return lambda_; }

    /// Unique mean-zero psi with -lap_h psi = v. Requires |mean(v)| <= 1e-12 ||v||_2
    /// (callers subtract the mean first); throws NonzeroMeanError otherwise.
    CellField inv_neg_laplacian(const CellField& v) const;

    /// sqrt(<v, inv_neg_laplacian(v)>); same mean-zero precondition.
    double hminus1_norm(const CellField& v) const;

    /// Both H^-1 norms from one complex transform (a rides the real part,
    /// b the imaginary part); same preconditions as hminus1_norm.
    std::pair<double, double> hminus1_norm_pair(const CellField& a, const CellField& b) const;

    /// Multiply each Fourier mode of v by diag[k*N+l] and transform back.
    /// The constant-coefficient solver/preconditioner primitive.
    CellField apply_mode_diagonal(const CellField& v, const std::vector<double>& diag) const;

    /// Apply two different real mode diagonals to two real fields with a
    /// single forward/inverse transform pair (a + i b packing; the fields are
    /// separated through the Hermitian symmetry of their spectra). Each
    /// diagonal must be symmetric under mode reversal (k,l) -> (-k,-l), which
    /// holds for any function of the Laplacian symbol.
    std::pair<CellField, CellField> apply_mode_diagonal_pair(
        const CellField& a, const CellField& b, const std::vector<double>& diag_a,
        const std::vector<double>& diag_b) const;

private:
    void fft2(std::vector<std::complex<double>>& buf, bool forward) const;

    GridSpec grid_;
    detail::FftPlan plan_;
    std::vector<double> lambda_;
    std::vector<double> inv_lambda_;
};

} // namespace bfsurf
