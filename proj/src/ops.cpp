// ops.cpp -- stencil kernels and grid reductions (OpenMP row-parallel).

#include "bfsurf/ops.hpp"

#include <algorithm>
#include <cmath>

namespace bfsurf {

using detail::reduce_rows;

EdgeFieldPair grad(const CellField& v) {
    const int n = v.n();
    const double inv_h = 1.0 / v.grid().spacing;
    EdgeFieldPair out(v.grid());
    const double* s = v.data();
    double* gx = out.x_data();
    double* gy = out.y_data();
#pragma omp parallel for schedule(static) if (n >= 64)
    for (int i = 0; i < n; ++i) {
        const int ip = (i + 1 == n) ? 0 : i + 1;
        const double* row = s + static_cast<std::size_t>(i) * n;
        const double* row_ip = s + static_cast<std::size_t>(ip) * n;
        double* gxr = gx + static_cast<std::size_t>(i) * n;
        double* gyr = gy + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            const int jp = (j + 1 == n) ? 0 : j + 1;
            gxr[j] = (row_ip[j] - row[j]) * inv_h;
            gyr[j] = (row[jp] - row[j]) * inv_h;
        }
    }
    return out;
}

CellField div(const EdgeFieldPair& f) {
    const int n = f.n();
    const double inv_h = 1.0 / f.grid().spacing;
    CellField out(f.grid());
    const double* fx = f.x_data();
    const double* fy = f.y_data();
    double* o = out.data();
#pragma omp parallel for schedule(static) if (n >= 64)
    for (int i = 0; i < n; ++i) {
        const int im = (i == 0) ? n - 1 : i - 1;
        const double* fxr = fx + static_cast<std::size_t>(i) * n;
        const double* fxm = fx + static_cast<std::size_t>(im) * n;
        const double* fyr = fy + static_cast<std::size_t>(i) * n;
        double* orow = o + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            const int jm = (j == 0) ? n - 1 : j - 1;
            orow[j] = (fxr[j] - fxm[j] + fyr[j] - fyr[jm]) * inv_h;
        }
    }
    return out;
}

CellField laplacian(const CellField& v) {
    const int n = v.n();
    const double h = v.grid().spacing;
    const double inv_h2 = 1.0 / (h * h);
    CellField out(v.grid());
    const double* s = v.data();
    double* o = out.data();
#pragma omp parallel for schedule(static) if (n >= 64)
    for (int i = 0; i < n; ++i) {
        const int ip = (i + 1 == n) ? 0 : i + 1;
        const int im = (i == 0) ? n - 1 : i - 1;
        const double* row = s + static_cast<std::size_t>(i) * n;
        const double* rp = s + static_cast<std::size_t>(ip) * n;
        const double* rm = s + static_cast<std::size_t>(im) * n;
        double* orow = o + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            const int jp = (j + 1 == n) ? 0 : j + 1;
            const int jm = (j == 0) ? n - 1 : j - 1;
            orow[j] = (rp[j] + rm[j] + row[jp] + row[jm] - 4.0 * row[j]) * inv_h2;
        }
    }
    return out;
}

EdgeFieldPair avg_to_edges(const CellField& q) {
    const int n = q.n();
    EdgeFieldPair out(q.grid());
    const double* s = q.data();
    double* ax = out.x_data();
    double* ay = out.y_data();
#pragma omp parallel for schedule(static) if (n >= 64)
    for (int i = 0; i < n; ++i) {
        const int ip = (i + 1 == n) ? 0 : i + 1;
        const double* row = s + static_cast<std::size_t>(i) * n;
        const double* rp = s + static_cast<std::size_t>(ip) * n;
        double* axr = ax + static_cast<std::size_t>(i) * n;
        double* ayr = ay + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            const int jp = (j + 1 == n) ? 0 : j + 1;
            axr[j] = 0.5 * (rp[j] + row[j]);
            ayr[j] = 0.5 * (row[jp] + row[j]);
        }
    }
    return out;
}

CellField weighted_div_grad(const EdgeFieldPair& d, const CellField& v) {
    require_same_grid(d.grid(), v.grid(), "weighted_div_grad");
    const int n = v.n();
    const double h = v.grid().spacing;
    const double inv_h2 = 1.0 / (h * h);
    CellField out(v.grid());
    const double* s = v.data();
    const double* dx = d.x_data();
    const double* dy = d.y_data();
    double* o = out.data();
#pragma omp parallel for schedule(static) if (n >= 64)
    for (int i = 0; i < n; ++i) {
        const int ip = (i + 1 == n) ? 0 : i + 1;
        const int im = (i == 0) ? n - 1 : i - 1;
        const double* row = s + static_cast<std::size_t>(i) * n;
        const double* rp = s + static_cast<std::size_t>(ip) * n;
        const double* rm = s + static_cast<std::size_t>(im) * n;
        const double* dxr = dx + static_cast<std::size_t>(i) * n;
        const double* dxm = dx + static_cast<std::size_t>(im) * n;
        const double* dyr = dy + static_cast<std::size_t>(i) * n;
        double* orow = o + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            const int jp = (j + 1 == n) ? 0 : j + 1;
            const int jm = (j == 0) ? n - 1 : j - 1;
            const double flux = dxr[j] * (rp[j] - row[j]) - dxm[j] * (row[j] - rm[j]) +
                                dyr[j] * (row[jp] - row[j]) - dyr[jm] * (row[j] - row[jm]);
            orow[j] = flux * inv_h2;
        }
    }
    return out;
}

double inner(const CellField& a, const CellField& b) {
    require_same_grid(a.grid(), b.grid(), "inner");
    const int n = a.n();
    const double h2 = a.grid().spacing * a.grid().spacing;
    const double* pa = a.data();
    const double* pb = b.data();
    return h2 * reduce_rows(n, [&](int i) {
               const double* ra = pa + static_cast<std::size_t>(i) * n;
               const double* rb = pb + static_cast<std::size_t>(i) * n;
               double s = 0.0;
               for (int j = 0; j < n; ++j) s += ra[j] * rb[j];
               return s;
           });
}

double edge_inner(const EdgeFieldPair& f, const EdgeFieldPair& g) {
    require_same_grid(f.grid(), g.grid(), "edge_inner");
    const int n = f.n();
    const double h2 = f.grid().spacing * f.grid().spacing;
    const double* fx = f.x_data();
    const double* fy = f.y_data();
    const double* gx = g.x_data();
    const double* gy = g.y_data();
    // [f,g]_x + [f,g]_y with the products averaged back to cell centers.
    return h2 * reduce_rows(n, [&](int i) {
               const int im = (i == 0) ? n - 1 : i - 1;
               const double* fxr = fx + static_cast<std::size_t>(i) * n;
               const double* fxm = fx + static_cast<std::size_t>(im) * n;
               const double* gxr = gx + static_cast<std::size_t>(i) * n;
               const double* gxm = gx + static_cast<std::size_t>(im) * n;
               const double* fyr = fy + static_cast<std::size_t>(i) * n;
               const double* gyr = gy + static_cast<std::size_t>(i) * n;
               double s = 0.0;
               for (int j = 0; j < n; ++j) {
                   const int jm = (j == 0) ? n - 1 : j - 1;
                   s += 0.5 * (fxr[j] * gxr[j] + fxm[j] * gxm[j]);
                   s += 0.5 * (fyr[j] * gyr[j] + fyr[jm] * gyr[jm]);
               }
               return s;
           });
}

double mean(const CellField& v) {
    const int n = v.n();
    const double* s = v.data();
    const double sum = reduce_rows(n, [&](int i) {
        const double* row = s + static_cast<std::size_t>(i) * n;
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += row[j];
        return acc;
    });
    return sum / (static_cast<double>(n) * n);
}

CellField sub_mean(const CellField& v) {
    const double m = mean(v);
    CellField out = v;
    const int n = v.n();
    double* o = out.data();
#pragma omp parallel for schedule(static) if (n >= 64)
    for (int i = 0; i < n; ++i) {
        double* row = o + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) row[j] -= m;
    }
    return out;
}

double grad_norm_sq(const CellField& v) {
    const int n = v.n();
    const double inv_h = 1.0 / v.grid().spacing;
    const double h2 = v.grid().spacing * v.grid().spacing;
    const double* s = v.data();
    // One-sided sum over each edge once; equals the averaged form by periodicity.
    return h2 * reduce_rows(n, [&](int i) {
               const int ip = (i + 1 == n) ? 0 : i + 1;
               const double* row = s + static_cast<std::size_t>(i) * n;
               const double* rp = s + static_cast<std::size_t>(ip) * n;
               double acc = 0.0;
               for (int j = 0; j < n; ++j) {
                   const int jp = (j + 1 == n) ? 0 : j + 1;
                   const double dx = (rp[j] - row[j]) * inv_h;
                   const double dy = (row[jp] - row[j]) * inv_h;
                   acc += dx * dx + dy * dy;
               }
               return acc;
           });
}

double min_value(const CellField& v) {
    const double* s = v.data();
    double m = s[0];
    for (std::size_t k = 1; k < v.size(); ++k) m = std::min(m, s[k]);
    return m;
}

double max_value(const CellField& v) {
    const double* s = v.data();
    double m = s[0];
    for (std::size_t k = 1; k < v.size(); ++k) m = std::max(m, s[k]);
    return m;
}

double norm(const CellField& v, NormKind kind, double p) {
    const int n = v.n();
    const double h2 = v.grid().spacing * v.grid().spacing;
    const double* s = v.data();
    switch (kind) {
    case NormKind::l2:
        return std::sqrt(inner(v, v));
    case NormKind::linf: {
        double m = 0.0;
        for (std::size_t k = 0; k < v.size(); ++k) m = std::max(m, std::fabs(s[k]));
        return m;
    }
    case NormKind::lp: {
        if (!(p >= 1.0) || !std::isfinite(p))
            throw DomainError("norm: lp order must lie in [1, inf)");
        const double sum = reduce_rows(n, [&](int i) {
            const double* row = s + static_cast<std::size_t>(i) * n;
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += std::pow(std::fabs(row[j]), p);
            return acc;
        });
        return std::pow(h2 * sum, 1.0 / p);
    }
    case NormKind::h1:
        return std::sqrt(inner(v, v) + grad_norm_sq(v));
    case NormKind::h2: {
        const CellField lap = laplacian(v);
        return std::sqrt(inner(v, v) + grad_norm_sq(v) + inner(lap, lap));
    }
    }
    throw DomainError("norm: unknown kind");
}

CellField add_scaled(const CellField& a, double s, const CellField& b) {
    require_same_grid(a.grid(), b.grid(), "add_scaled");
    CellField out = a;
    axpy(out, s, b);
    return out;
}

void axpy(CellField& a, double s, const CellField& b) {
    require_same_grid(a.grid(), b.grid(), "axpy");
    const int n = a.n();
    double* pa = a.data();
    const double* pb = b.data();
#pragma omp parallel for schedule(static) if (n >= 64)
    for (int i = 0; i < n; ++i) {
        double* ra = pa + static_cast<std::size_t>(i) * n;
        const double* rb = pb + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) ra[j] += s * rb[j];
    }
}

CellField scaled(const CellField& a, double s) {
    CellField out = a;
    const int n = a.n();
    double* o = out.data();
#pragma omp parallel for schedule(static) if (n >= 64)
    for (int i = 0; i < n; ++i) {
        double* row = o + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) row[j] *= s;
    }
    return out;
}

} // namespace bfsurf
