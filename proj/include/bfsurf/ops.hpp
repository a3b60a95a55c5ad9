// ops.hpp -- discrete calculus on the periodic staggered grid.
//
// Center-to-edge difference and average operators, gradient, divergence,
// 5-point Laplacian, variable-coefficient divergence form, grid inner
// products and the derived norms. All operators are the centered-difference
// ones; every loop is data-parallel and reductions are accumulated row by
// row in a fixed order, so results do not depend on the thread count.

#pragma once

#include "bfsurf/grid.hpp"

namespace bfsurf {

/// Discrete gradient: x(i,j) = (v(i+1,j) - v(i,j))/h, y(i,j) = (v(i,j+1) - v(i,j))/h.
EdgeFieldPair grad(const CellField& v);

/// Discrete divergence: out(i,j) = (fx(i,j) - fx(i-1,j))/h + (fy(i,j) - fy(i,j-1))/h.
/// Adjoint to -grad under the grid inner products; its mean telescopes to zero.
CellField div(const EdgeFieldPair& f);

/// Standard 5-point Laplacian, equal to div(grad(v)).
CellField laplacian(const CellField& v);

/// Two-point edge average of a cell quantity:
/// x(i,j) = (q(i+1,j)+q(i,j))/2, y(i,j) = (q(i,j+1)+q(i,j))/2.
EdgeFieldPair avg_to_edges(const CellField& q);

/// Variable-coefficient operator div(d .* grad(v)) with the weight d sampled
/// at edge midpoints. Reduces to laplacian(v) when d == 1; symmetric in the
/// cell inner product for any weight.
CellField weighted_div_grad(const EdgeFieldPair& d, const CellField& v);

/// Cell inner product <a,b> = h^2 sum a(i,j) b(i,j).
double inner(const CellField& a, const CellField& b);

/// Edge inner product [f,g] = [fx,gx]_x + [fy,gy]_y where each directional
/// part averages the edge-wise product back to cells before summing.
double edge_inner(const EdgeFieldPair& f, const EdgeFieldPair& g);

/// Mean value (h^2/|Omega|) sum v = sum v / N^2.
double mean(const CellField& v);

/// v - mean(v).
CellField sub_mean(const CellField& v);

/// || grad_h v ||_2^2 = edge_inner(grad v, grad v), fused.
double grad_norm_sq(const CellField& v);

double min_value(const CellField& v);
double max_value(const CellField& v);

enum class NormKind { l2, lp, linf, h1, h2 };

/// Grid norms; `p` is used only for NormKind::lp and must lie in [1, inf).
/// h1 adds ||grad_h v||_2^2 to the squared l2 norm, h2 further adds
/// ||lap_h v||_2^2.
double norm(const CellField& v, NormKind kind, double p = 2.0);

// Element-wise helpers used across the energy and solver modules.
CellField add_scaled(const CellField& a, double s, const CellField& b); // a + s*b
void axpy(CellField& a, double s, const CellField& b);                  // a += s*b
CellField scaled(const CellField& a, double s);

namespace detail {
/// Deterministic reduction: per-row partial sums computed in parallel, then
/// combined serially in row order.
template <class RowFn>
double reduce_rows(int n, RowFn&& row_sum) {
    std::vector<double> partial(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static) if (n >= 64)
    for (int i = 0; i < n; ++i) partial[static_cast<std::size_t>(i)] = row_sum(i);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += partial[static_cast<std::size_t>(i)];
    return s;
}
} // namespace detail

} // namespace bfsurf
