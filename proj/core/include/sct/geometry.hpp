#pragma once

#include <vector>

namespace sct {

/// Parallel-beam acquisition geometry. Pixel (r, c) sits at
/// (c - (N-1)/2, r - (N-1)/2) in pixel units; detector bin b has signed offset
/// (b - (D-1)/2) * detector_spacing along (cos a, sin a), and the ray for
/// (angle a, offset s) is the line { p : p.x cos a + p.y sin a = s }.
struct ScanGeometry {
    int image_size = 0;      // N
    int num_views = 0;       // V
    int num_bins = 0;        // D
    double detector_spacing = 1.0; // in pixel units
    double pixel_size_cm = 0.1;
    std::vector<double> angles_rad;

    /// Evenly spaced views over [0, 2*pi); D = ceil(N*sqrt(2)) + 1 so the
    /// detector covers the image diagonal at every angle.
    static ScanGeometry parallel(int image_size, int num_views, double pixel_size_cm = 0.1);

    /// Same as parallel() but with an explicit bin count (test configurations).
    static ScanGeometry parallel_with_bins(int image_size, int num_views, int num_bins,
                                           double pixel_size_cm = 0.1);
};

} // namespace sct
