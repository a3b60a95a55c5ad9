// ref.cpp -- serial reference kernels (periodic indexing via operator()).

#include "bfsurf/ref.hpp"

#include <cmath>

namespace bfsurf::ref {

EdgeFieldPair grad(const CellField& v) {
    const int n = v.n();
    const double inv_h = 1.0 / v.grid().spacing;
    EdgeFieldPair out(v.grid());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            out.x(i, j) = (v(i + 1, j) - v(i, j)) * inv_h;
            out.y(i, j) = (v(i, j + 1) - v(i, j)) * inv_h;
        }
    return out;
}

CellField div(const EdgeFieldPair& f) {
    const int n = f.n();
    const double inv_h = 1.0 / f.grid().spacing;
    CellField out(f.grid());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out(i, j) = (f.x(i, j) - f.x(i - 1, j) + f.y(i, j) - f.y(i, j - 1)) * inv_h;
    return out;
}

CellField laplacian(const CellField& v) {
    const int n = v.n();
    const double inv_h2 = 1.0 / (v.grid().spacing * v.grid().spacing);
    CellField out(v.grid());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out(i, j) = (v(i + 1, j) + v(i - 1, j) + v(i, j + 1) + v(i, j - 1) -
                         4.0 * v(i, j)) * inv_h2;
    return out;
}

CellField weighted_div_grad(const EdgeFieldPair& d, const CellField& v) {
    require_same_grid(d.grid(), v.grid(), "ref::weighted_div_grad");
    const int n = v.n();
    const double inv_h2 = 1.0 / (v.grid().spacing * v.grid().spacing);
    CellField out(v.grid());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out(i, j) = (d.x(i, j) * (v(i + 1, j) - v(i, j)) -
                         d.x(i - 1, j) * (v(i, j) - v(i - 1, j)) +
                         d.y(i, j) * (v(i, j + 1) - v(i, j)) -
                         d.y(i, j - 1) * (v(i, j) - v(i, j - 1))) * inv_h2;
    return out;
}

CellField avg_grad_mag(const CellField& phi, double delta) {
    const int n = phi.n();
    const double inv_h = 1.0 / phi.grid().spacing;
    CellField out(phi.grid());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double de = (phi(i + 1, j) - phi(i, j)) * inv_h;
            const double dw = (phi(i, j) - phi(i - 1, j)) * inv_h;
            const double dn = (phi(i, j + 1) - phi(i, j)) * inv_h;
            const double ds = (phi(i, j) - phi(i, j - 1)) * inv_h;
            out(i, j) = std::sqrt(0.5 * (de * de + dw * dw + dn * dn + ds * ds) +
                                  delta * delta);
        }
    return out;
}

double inner(const CellField& a, const CellField& b) {
    require_same_grid(a.grid(), b.grid(), "ref::inner");
    const int n = a.n();
    const double h2 = a.grid().spacing * a.grid().spacing;
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s += a(i, j) * b(i, j);
    return h2 * s;
}

double edge_inner(const EdgeFieldPair& f, const EdgeFieldPair& g) {
    require_same_grid(f.grid(), g.grid(), "ref::edge_inner");
    const int n = f.n();
    const double h2 = f.grid().spacing * f.grid().spacing;
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            s += 0.5 * (f.x(i, j) * g.x(i, j) + f.x(i - 1, j) * g.x(i - 1, j));
            s += 0.5 * (f.y(i, j) * g.y(i, j) + f.y(i, j - 1) * g.y(i, j - 1));
        }
    return h2 * s;
}

double energy_total(const CellField& phi, const CellField& rho, const ModelParams& p) {
    require_same_grid(phi.grid(), rho.grid(), "ref::energy_total");
    const int n = phi.n();
    const double h2 = phi.grid().spacing * phi.grid().spacing;
    const CellField lap = ref::laplacian(phi);
    const CellField nmag = ref::avg_grad_mag(phi, p.delta);
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double f = phi(i, j);
            const double r = rho(i, j);
            const double gphi2 = nmag(i, j) * nmag(i, j) - p.delta * p.delta;
            const double de_r = (rho(i + 1, j) - rho(i, j)) / phi.grid().spacing;
            const double dw_r = (rho(i, j) - rho(i - 1, j)) / phi.grid().spacing;
            const double dn_r = (rho(i, j + 1) - rho(i, j)) / phi.grid().spacing;
            const double ds_r = (rho(i, j) - rho(i, j - 1)) / phi.grid().spacing;
            const double grho2 = 0.5 * (de_r * de_r + dw_r * dw_r + dn_r * dn_r + ds_r * ds_r);
            const double cpl = r - nmag(i, j);
            s += 0.25 * f * f * (1.0 - f) * (1.0 - f) / p.eps;
            s += 0.5 * p.eps * gphi2;
            s += 0.5 * p.eta * p.eta * lap(i, j) * lap(i, j);
            s += 0.5 * p.xi * grho2;
            s += 0.5 * p.alpha * cpl * cpl;
            s += p.beta * (r * std::log(r) + (1.0 - r) * std::log(1.0 - r));
        }
    return h2 * s;
}

} // namespace bfsurf::ref
