// ref.hpp -- plain serial reference implementations of the hot kernels.
//
// Straight triple-loop versions with no OpenMP and naive left-to-right
// accumulation. The unit tests check the parallel kernels against these
// (maps must agree bitwise, reductions to a few ulps), and the benchmark
// target compares their throughput.

#pragma once

#include "bfsurf/grid.hpp"
#include "bfsurf/model.hpp"

namespace bfsurf::ref {

EdgeFieldPair grad(const CellField& v);
CellField div(const EdgeFieldPair& f);
CellField laplacian(const CellField& v);
CellField weighted_div_grad(const EdgeFieldPair& d, const CellField& v);
CellField avg_grad_mag(const CellField& phi, double delta);

double inner(const CellField& a, const CellField& b);
double edge_inner(const EdgeFieldPair& f, const EdgeFieldPair& g);
double energy_total(const CellField& phi, const CellField& rho, const ModelParams& p);

} // namespace bfsurf::ref
