#pragma once

#include <span>

#include "sct/geometry.hpp"
#include "sct/types.hpp"

namespace sct {

struct TnvConfig {
    double lambda = 0.01;             // nuclear-norm weight, > 0
    int iters = 200;                  // primal-dual iterations
    double step_product_margin = 0.99; // sigma = tau = margin / ||K||
    double stop_tol = 1e-5;           // relative primal change
};

/// Singular pair of an S x 2 matrix via the 2x2 Gram eigen-decomposition.
/// Columns of V = [[v11, v12], [v21, v22]] are the right singular vectors;
/// s1 >= s2 >= 0.
struct SingularPair2 {
    double s1 = 0.0, s2 = 0.0;
    double v11 = 1.0, v12 = 0.0, v21 = 0.0, v22 = 1.0;
};

/// col_x, col_y are the two columns of the S x 2 matrix.
SingularPair2 singular_pair_2col(std::span<const double> col_x, std::span<const double> col_y);

/// Projects the S x 2 matrix onto { ||.||_2 <= radius } by clipping both
/// singular values (the dual-update resolvent of the nuclear norm). In place.
void project_spectral_norm_ball(std::span<double> col_x, std::span<double> col_y, double radius);

/// Sum over pixels of the nuclear norm of the per-pixel S x 2 spectral
/// Jacobian (forward differences, replicate boundary).
double tnv_penalty(const SpectralImage& img);

struct TnvResult {
    SpectralImage image;    // last iterate
    SpectralImage averaged; // ergodic average of the primal iterates
    int iterations = 0;     // performed
};

/// Chambolle-Pock solve of
///   min_{x >= 0}  1/2 ||A x - b||^2 + lambda * TNV(x)
/// with over-relaxation theta = 1 and sigma = tau = margin / ||K||.
/// Throws numerical_error on a non-finite iterate.
TnvResult tnv_solve(const SpectralSinogram& sino, const ScanGeometry& geo, const TnvConfig& cfg);

SpectralImage tnv_reconstruct(const SpectralSinogram& sino, const ScanGeometry& geo,
                              const TnvConfig& cfg);

/// 1/2 ||A x - b||^2 + lambda * TNV(x); used for convergence diagnostics.
double tnv_objective(const SpectralImage& x, const SpectralSinogram& sino,
                     const ScanGeometry& geo, double lambda);

} // namespace sct
