// model.hpp -- free energy of the binary fluid-surfactant system, its
// convex-concave split, the chemical potentials of the semi-implicit
// scheme, the nonlinear scheme residual, and the merit functional whose
// interior minimizer is the scheme solution.
//
// The continuous energy density is
//     f(phi)/eps + (eps/2)|grad phi|^2 + (eta^2/2)|lap phi|^2
//   + (xi/2)|grad rho|^2 + (alpha/2)(rho - |grad phi|_delta)^2 + beta H(rho)
// with f(phi) = phi^2 (1-phi)^2 / 4 and H(rho) = rho ln rho + (1-rho) ln(1-rho),
// where |grad phi|_delta regularizes the gradient magnitude with a floor delta.
// The split moves (sqrt(2)-1) rho^2 and (1/delta)|grad phi|^2 transfer terms
// into both parts so each part is convex while the difference reproduces the
// energy exactly.
//
// mu_phi and mu_rho are the exact discrete variational derivatives of the
// convex part at the new state minus those of the concave part at the old
// state; the energy-stability and positivity guarantees hold for exactly
// this form, and the finite-difference gradient tests pin it down.

#pragma once

#include <utility>

#include "bfsurf/grid.hpp"
#include "bfsurf/spectral.hpp"

namespace bfsurf {

/// Physical constants plus the time step. All strictly positive.
struct ModelParams {
    double eps;      // interface width
    double alpha;    // surfactant coupling strength
    double beta;     // entropy weight
    double eta;      // bending rigidity
    double xi;       // surfactant diffusion
    double delta;    // gradient-magnitude regularization
    double mobility; // shared mobility of both equations
    double dt;       // time step

    void validate() const;
};

/// Discrete state: phase field phi, surfactant concentration rho (strictly
/// inside (0,1)), simulation time and step count. phi and rho share one grid.
struct State {
    State(CellField phi_in, CellField rho_in, double time_in = 0.0, long step_in = 0)
        : phi(std::move(phi_in)), rho(std::move(rho_in)), time(time_in), step(step_in) {
        require_same_grid(phi.grid(), rho.grid(), "State");
    }

    CellField phi;
    CellField rho;
    double time = 0.0;
    long step = 0;

    const GridSpec& grid() const { return phi.grid(); }
};

/// Total energy with its convex/concave split and named density parts.
/// total == convex - concave holds identically (the transfer terms cancel).
struct EnergyBreakdown {
    double total = 0.0;
    double convex = 0.0;
    double concave = 0.0;
    double well = 0.0;           // f(phi)/eps
    double dirichlet = 0.0;      // (eps/2)|grad phi|^2
    double bending = 0.0;        // (eta^2/2)|lap phi|^2
    double surf_dirichlet = 0.0; // (xi/2)|grad rho|^2
    double coupling = 0.0;       // (alpha/2)(rho - A|grad^delta phi|)^2
    double entropy = 0.0;        // beta H(rho)
};

/// Cell-averaged regularized gradient magnitude:
/// out(i,j)^2 = (mean of the four surrounding squared edge differences) + delta^2.
/// Bounded below by delta everywhere.
CellField avg_grad_mag(const CellField& phi, double delta);

/// Discrete energy of a state. Throws DomainError if rho touches [0,1].
EnergyBreakdown energy(const State& s, const ModelParams& p);

/// Scalar convex / concave energies (used by the gradient and convexity tests).
double energy_convex(const CellField& phi, const CellField& rho, const ModelParams& p);
double energy_concave(const CellField& phi, const CellField& rho, const ModelParams& p);

/// Variational derivative of the convex energy with respect to phi at (phi, rho):
/// (1/eps)(phi-1/2)^3 - (eps + alpha + alpha/delta) lap phi + eta^2 lap^2 phi
/// + alpha div( avg((rho)/(A|grad^delta phi|)) grad phi ).
CellField mu_phi_convex(const CellField& phi, const CellField& rho, const ModelParams& p);

/// Minus the variational derivative of the concave energy with respect to phi:
/// -(1/(4 eps))(phi_old - 1/2) + (alpha/delta) lap phi_old.
CellField mu_phi_explicit(const CellField& phi_old, const ModelParams& p);

/// Chemical potential of the scheme: mu_phi_convex(new) + mu_phi_explicit(old).
CellField mu_phi(const CellField& phi_new, const CellField& rho_new,
                 const CellField& phi_old, const ModelParams& p);

/// Variational derivative of the convex energy with respect to rho:
/// -xi lap rho + beta (ln rho - ln(1-rho)) + sqrt(2) alpha rho
/// - alpha A|grad^delta phi|. Throws DomainError when rho touches [0,1].
CellField mu_rho_convex(const CellField& phi, const CellField& rho, const ModelParams& p);

/// -alpha (sqrt(2)-1) rho_old.
CellField mu_rho_explicit(const CellField& rho_old, const ModelParams& p);

CellField mu_rho(const CellField& phi_new, const CellField& rho_new,
                 const CellField& rho_old, const ModelParams& p);

/// Residual of the fully discrete scheme at (next, old):
///   F_phi = (phi' - phi)/dt - M lap mu_phi,  F_rho analogous.
/// Both components have zero mean to round-off by the conservative form.
std::pair<CellField, CellField> scheme_residual(const State& next, const State& old,
                                                const ModelParams& p);

/// Combined l2 norm sqrt(||F_phi||^2 + ||F_rho||^2) of a residual pair.
double residual_norm(const std::pair<CellField, CellField>& f);

/// Merit functional J^n(phi, rho) of the positivity argument: the H^-1
/// distance to the old state plus the convex energy terms plus the linear
/// terms carrying the explicit part. Strictly convex on the admissible set
/// {means fixed, 0 < rho < 1}; its minimizer is the scheme solution.
/// Preconditions: means of (phi, rho) match the old state's, rho interior.
double merit(const CellField& phi, const CellField& rho, const State& old,
             const ModelParams& p, const SpectralPoisson& poisson);

} // namespace bfsurf
