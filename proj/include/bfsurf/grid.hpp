// grid.hpp -- periodic staggered-grid containers.
//
// The domain is the square (0,L)^2 covered by N x N uniform cells of size
// h = L/N. Cell-centered values live at ((i-1/2)h, (j-1/2)h); edge-centered
// values live at the midpoints of the vertical (x) and horizontal (y) cell
// faces. All index arithmetic is periodic with period N in both directions.
//
// Storage is row-major with i (the x index) as the slow dimension, so row i
// is contiguous: value(i,j) = data[i*N + j]. An EdgeFieldPair stores the
// (i+1/2, j) x-edge value and the (i, j+1/2) y-edge value at flat index (i,j).

#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "bfsurf/errors.hpp"

namespace bfsurf {

/// Square periodic domain descriptor: N cells per side, side length L,
/// spacing h = L/N.
struct GridSpec {
    GridSpec(int n_cells, double domain_length)
        : n(n_cells), length(domain_length), spacing(domain_length / n_cells) {
        if (n_cells < 4)
            throw DomainError("GridSpec: n_cells must be >= 4, got " +
                              std::to_string(n_cells));
        if (!(domain_length > 0.0) || !std::isfinite(domain_length))
            throw DomainError("GridSpec: length must be positive and finite");
    }

    int n;
    double length;
    double spacing;

    double area() const { return length * length; }
    std::size_t cells() const { return static_cast<std::size_t>(n) * n; }

    /// x-coordinate of cell center i (same formula in y).
    double center(int i) const { return (i + 0.5) * spacing; }

    friend bool operator==(const GridSpec& a, const GridSpec& b) {
        return a.n == b.n && a.length == b.length;
    }
    friend bool operator!=(const GridSpec& a, const GridSpec& b) { return !(a == b); }
};

inline void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
    if (a != b)
        throw GridMismatchError(std::string(what) + ": grids differ (" +
                                std::to_string(a.n) + " vs " + std::to_string(b.n) + ")");
}

namespace detail {
/// Wrap an index that is at most one period out of range.
inline int wrap(int i, int n) {
    if (i >= n) i -= n;
    if (i < 0) i += n;
    return i;
}
/// Wrap an arbitrary integer index.
inline int wrap_far(int i, int n) {
    int r = i % n;
    return r < 0 ? r + n : r;
}
} // namespace detail

/// N x N real values at cell centers with periodic indexing.
class CellField {
public:
    explicit CellField(GridSpec grid, double fill = 0.0)
        : grid_(grid), v_(grid.cells(), fill) {}

    const GridSpec& grid() const { return grid_; }
    int n() const { return grid_.n; }

    /// Periodic accessors; any integer index is accepted.
    double operator()(int i, int j) const {
        const int n = grid_.n;
        return v_[static_cast<std::size_t>(detail::wrap_far(i, n)) * n +
                  detail::wrap_far(j, n)];
    }
    double& operator()(int i, int j) {
        const int n = grid_.n;
        return v_[static_cast<std::size_t>(detail::wrap_far(i, n)) * n +
                  detail::wrap_far(j, n)];
    }

    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    std::size_t size() const { return v_.size(); }

    bool all_finite() const {
        for (double x : v_)
            if (!std::isfinite(x)) return false;
        return true;
    }

    friend bool operator==(const CellField& a, const CellField& b) {
        return a.grid_ == b.grid_ && a.v_ == b.v_;
    }

private:
    GridSpec grid_;
    std::vector<double> v_;
};

/// Staggered vector field: x(i,j) sits on the (i+1/2, j) edge, y(i,j) on the
/// (i, j+1/2) edge. Both components share the grid.
class EdgeFieldPair {
public:
    explicit EdgeFieldPair(GridSpec grid, double fill = 0.0)
        : grid_(grid), x_(grid.cells(), fill), y_(grid.cells(), fill) {}

    const GridSpec& grid() const { return grid_; }
    int n() const { return grid_.n; }

    double x(int i, int j) const {
        const int n = grid_.n;
        return x_[static_cast<std::size_t>(detail::wrap_far(i, n)) * n +
                  detail::wrap_far(j, n)];
    }
    double& x(int i, int j) {
        const int n = grid_.n;
        return x_[static_cast<std::size_t>(detail::wrap_far(i, n)) * n +
                  detail::wrap_far(j, n)];
    }
    double y(int i, int j) const {
        const int n = grid_.n;
        return y_[static_cast<std::size_t>(detail::wrap_far(i, n)) * n +
                  detail::wrap_far(j, n)];
    }
    double& y(int i, int j) {
        const int n = grid_.n;
        return y_[static_cast<std::size_t>(detail::wrap_far(i, n)) * n +
                  detail::wrap_far(j, n)];
    }

    double* x_data() { return x_.data(); }
    const double* x_data() const { return x_.data(); }
    double* y_data() { return y_.data(); }
    const double* y_data() const { return y_.data(); }
    std::size_t size() const { return x_.size(); }

    bool all_finite() const {
        for (double v : x_)
            if (!std::isfinite(v)) return false;
        for (double v : y_)
            if (!std::isfinite(v)) return false;
        return true;
    }

private:
    GridSpec grid_;
    std::vector<double> x_, y_;
};

} // namespace bfsurf
