#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "kdn/grid.hpp"

namespace kdn {

// Spatial box window: all in-bounds j with ||i - j||_inf <= radius_px.
// Window side 2*radius_px + 1; continuous half-width h = radius_px / n.
struct WindowSpec {
    int radius_px = 0;

    int side() const { return 2 * radius_px + 1; }
    double h(int n) const { return static_cast<double>(radius_px) / n; }
};

// Square pixel patch of odd side width_px (width = round(h_P * n) + 1).
struct PatchSpec {
    int width_px = 1;
};

// Photometric gate threshold on the [0,1] intensity scale.
enum class PhotometricFamily { Yf, NlmEuclid, NlmAvg };
struct PhotometricSpec {
    PhotometricFamily family = PhotometricFamily::Yf;
    double h_y = 0.0;
};

void validate_window(const WindowSpec& w);
void validate_patch(const PatchSpec& p);
void validate_photometric(const PhotometricSpec& p);

// In-bounds linear indices of the spatial window around a 0-based
// multi-index; clipped at the image border (no padding), raster order.
std::vector<std::size_t> spatial_window(std::span<const int> index, const WindowSpec& spec,
                                        int dim, int side);

// Reflect an out-of-range axis index back into [0, n) (mirror padding that
// does not repeat the edge sample: -1 -> 1, n -> n-2).
inline int mirror_index(int j, int n)
{
    if (n == 1)
        return 0;
    while (j < 0 || j >= n) {
        if (j < 0)
            j = -j;
        else
            j = 2 * (n - 1) - j;
    }
    return j;
}

// Patch values around a pixel in raster order, mirror-padded at borders, into
// `out` (length width_px^dim).
void extract_patch(const ImageGrid& y, std::size_t pixel, const PatchSpec& spec, double* out);
std::vector<double> extract_patch(const ImageGrid& y, std::size_t pixel, const PatchSpec& spec);

// Photometric gates; all inequalities are closed (<=).
inline bool yf_gate(double y_i, double y_j, double h_y)
{
    return std::abs(y_i - y_j) <= h_y;
}

bool nlm_euclid_gate(std::span<const double> patch_i, std::span<const double> patch_j,
                     double h_y);

inline bool nlm_avg_gate(double mean_i, double mean_j, double h_y)
{
    return std::abs(mean_i - mean_j) <= h_y;
}

// Membership oracle: pixels pass iff they lie on the same side of the
// discontinuity, as recorded by the foreground mask.
inline bool mo_gate(const std::vector<std::uint8_t>& mask, std::size_t i, std::size_t j)
{
    return mask[i] == mask[j];
}

// Sentinel for boundary_distance on a uniform mask (no opposite pixels).
inline constexpr int kDistInf = std::numeric_limits<int>::max();

// Exact chessboard (L_inf) distance from every pixel to the nearest pixel of
// opposite membership, in pixel units; kDistInf when the mask is uniform.
std::vector<int> boundary_distance(const std::vector<std::uint8_t>& mask, int dim, int side);

// Bandwidth oracle gate: pass iff ||i - j||_inf < dist_i (strict), where
// dist_i is the boundary distance at i. Asymmetric in (i, j) by design.
inline bool bo_gate(int dist_i, int cheb_ij)
{
    return dist_i == kDistInf || cheb_ij < dist_i;
}

} // namespace kdn
