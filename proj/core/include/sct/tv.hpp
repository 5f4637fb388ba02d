#pragma once

#include <span>
#include <vector>

namespace sct {

/// Isotropic total variation with forward differences and replicate boundary:
/// sum over pixels of sqrt(dx^2 + dy^2).
double tv_value(std::span<const double> img, int height, int width);

/// Forward-difference gradient pair (dx, dy) of one channel; last column/row
/// differences are zero (replicate boundary).
void gradient_forward(std::span<const double> img, int height, int width, std::span<double> gx,
                      std::span<double> gy);

/// Exact adjoint of gradient_forward (negative divergence with matching
/// boundary handling), accumulated into out.
void gradient_adjoint(std::span<const double> gx, std::span<const double> gy, int height,
                      int width, std::span<double> out);

/// Gradient of the eps-smoothed TV, magnitude sqrt(dx^2 + dy^2 + eps^2).
void tv_gradient(std::span<const double> img, int height, int width, std::span<double> grad,
                 double eps = 1e-8);

/// steps normalized-subgradient descent steps of the given step length, the
/// TV-minimization half of the ASD-POCS alternation.
void tv_descent(std::span<double> img, int height, int width, int steps, double step_length,
                double eps = 1e-8);

} // namespace sct
