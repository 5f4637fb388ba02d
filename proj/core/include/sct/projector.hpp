#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sct/geometry.hpp"
#include "sct/types.hpp"

namespace sct {

/// One ray's sparse row of the system matrix A: pixel indices and weights.
/// Weights carry the pixel_size_cm path-length factor, so <row, image> is a
/// line integral in cm^-1 * cm units.
struct RayFootprint {
    std::vector<std::int32_t> index;
    std::vector<double> weight;

    void clear() {
        index.clear();
        weight.clear();
    }
};

/// Appends the Joseph (linear interpolation) footprint of ray (view, bin)
/// into out. The same enumeration backs the forward operator, its adjoint,
/// and the Kaczmarz sweeps, which is what makes the pair exactly matched.
void ray_footprint(const ScanGeometry& geo, int view, int bin, RayFootprint& out);

/// A x: line integrals of a single N*N channel. img must have N*N entries.
void forward_project(std::span<const double> img, const ScanGeometry& geo,
                     std::span<double> sino_out);
std::vector<double> forward_project(std::span<const double> img, const ScanGeometry& geo);

/// A^T y: exact transpose of forward_project (same weights, scattered).
void back_project(std::span<const double> sino, const ScanGeometry& geo,
                  std::span<double> img_out);
std::vector<double> back_project(std::span<const double> sino, const ScanGeometry& geo);

/// Channel-wise A applied to every spectral channel; channels never mix.
SpectralSinogram spectral_forward(const SpectralImage& img, const ScanGeometry& geo);
SpectralImage spectral_back(const SpectralSinogram& sino, const ScanGeometry& geo);

/// Power-iteration estimate of ||A||_2 on the normal operator A^T A,
/// reproducible for a fixed seed. Rayleigh-quotient estimates are
/// non-decreasing in the iteration count.
double operator_norm(const ScanGeometry& geo, int iterations, std::uint64_t seed = 0x5eed);

} // namespace sct
