#include "kdn/kernels.hpp"

#include "kdn/require.hpp"

namespace kdn {

void validate_window(const WindowSpec& w)
{
    KDN_REQUIRE(w.radius_px >= 0, "window radius_px must be >= 0, got " << w.radius_px);
}

void validate_patch(const PatchSpec& p)
{
    KDN_REQUIRE(p.width_px >= 1 && p.width_px % 2 == 1,
                "patch width_px must be odd and >= 1, got " << p.width_px);
}

void validate_photometric(const PhotometricSpec& p)
{
    KDN_REQUIRE(p.h_y >= 0.0, "photometric h_y must be >= 0, got " << p.h_y);
}

std::vector<std::size_t> spatial_window(std::span<const int> index, const WindowSpec& spec,
                                        int dim, int side)
{
    validate_window(spec);
    KDN_REQUIRE(index.size() == static_cast<std::size_t>(dim),
                "spatial_window: index has " << index.size() << " components, expected " << dim);
    int lo[kMaxDim], hi[kMaxDim], cur[kMaxDim];
    for (int k = 0; k < dim; ++k) {
        KDN_REQUIRE(index[k] >= 0 && index[k] < side,
                    "spatial_window: index component " << index[k] << " out of range");
        lo[k] = std::max(0, index[k] - spec.radius_px);
        hi[k] = std::min(side - 1, index[k] + spec.radius_px);
        cur[k] = lo[k];
    }
    std::vector<std::size_t> out;
    while (true) {
        out.push_back(ravel(cur, dim, side));
        int k = dim - 1;
        while (k >= 0 && cur[k] == hi[k]) {
            cur[k] = lo[k];
            --k;
        }
        if (k < 0)
            break;
        ++cur[k];
    }
    return out;
}

void extract_patch(const ImageGrid& y, std::size_t pixel, const PatchSpec& spec, double* out)
{
    const int half = spec.width_px / 2;
    int center[kMaxDim], cur[kMaxDim], mirrored[kMaxDim];
    unravel(pixel, y.dim, y.side, center);
    for (int k = 0; k < y.dim; ++k)
        cur[k] = -half;
    std::size_t w = 0;
    while (true) {
        for (int k = 0; k < y.dim; ++k)
            mirrored[k] = mirror_index(center[k] + cur[k], y.side);
        out[w++] = y.values[ravel(mirrored, y.dim, y.side)];
        int k = y.dim - 1;
        while (k >= 0 && cur[k] == half) {
            cur[k] = -half;
            --k;
        }
        if (k < 0)
            break;
        ++cur[k];
    }
}

std::vector<double> extract_patch(const ImageGrid& y, std::size_t pixel, const PatchSpec& spec)
{
    validate_shape(y);
    validate_patch(spec);
    KDN_REQUIRE(spec.width_px <= 2 * y.side - 1,
                "patch width " << spec.width_px << " exceeds mirror-padding limit 2n-1 = "
                               << 2 * y.side - 1);
    KDN_REQUIRE(pixel < y.size(), "extract_patch: pixel index out of range");
    std::vector<double> out(grid_size(y.dim, spec.width_px));
    extract_patch(y, pixel, spec, out.data());
    return out;
}

bool nlm_euclid_gate(std::span<const double> patch_i, std::span<const double> patch_j,
                     double h_y)
{
    KDN_REQUIRE(patch_i.size() == patch_j.size(),
                "nlm_euclid_gate: patch length mismatch " << patch_i.size() << " vs "
                                                          << patch_j.size());
    const double limit = h_y * h_y;
    double acc = 0.0;
    for (std::size_t k = 0; k < patch_i.size(); ++k) {
        const double d = patch_i[k] - patch_j[k];
        acc += d * d;
        if (acc > limit)
            return false;
    }
    return acc <= limit;
}

std::vector<int> boundary_distance(const std::vector<std::uint8_t>& mask, int dim, int side)
{
    const std::size_t npix = grid_size(dim, side);
    KDN_REQUIRE(mask.size() == npix,
                "boundary_distance: mask length " << mask.size() << " != side^dim " << npix);

    std::vector<int> dist(npix, kDistInf);
    bool has0 = false, has1 = false;
    for (std::size_t i = 0; i < npix && !(has0 && has1); ++i)
        (mask[i] ? has1 : has0) = true;
    if (!has0 || !has1)
        return dist; // uniform mask: infinite distance sentinel everywhere

    // Multi-source BFS over king moves computes the exact chessboard distance:
    // seeds are all pixels whose opposite-membership neighbors we seek, i.e.
    // every pixel starts at 0 for the *other* class. Equivalently: seed the
    // frontier with all pixels adjacent to the membership boundary at
    // distance 1, after which plain level-order expansion is exact, because
    // an L_inf ball is exactly the set reachable in that many king moves.
    std::vector<std::size_t> frontier, next;
    int idx[kMaxDim], nb[kMaxDim];
    auto for_neighbors = [&](std::size_t lin, auto&& fn) {
        unravel(lin, dim, side, idx);
        int cur[kMaxDim];
        for (int k = 0; k < dim; ++k)
            cur[k] = -1;
        while (true) {
            bool zero = true, ok = true;
            for (int k = 0; k < dim; ++k) {
                nb[k] = idx[k] + cur[k];
                if (cur[k] != 0)
                    zero = false;
                if (nb[k] < 0 || nb[k] >= side)
                    ok = false;
            }
            if (!zero && ok)
                fn(ravel(nb, dim, side));
            int k = dim - 1;
            while (k >= 0 && cur[k] == 1) {
                cur[k] = -1;
                --k;
            }
            if (k < 0)
                break;
            ++cur[k];
        }
    };

    for (std::size_t i = 0; i < npix; ++i) {
        bool boundary = false;
        for_neighbors(i, [&](std::size_t j) {
            if (mask[j] != mask[i])
                boundary = true;
        });
        if (boundary) {
            dist[i] = 1;
            frontier.push_back(i);
        }
    }
    int level = 1;
    while (!frontier.empty()) {
        ++level;
        next.clear();
        for (std::size_t i : frontier)
            for_neighbors(i, [&](std::size_t j) {
                if (dist[j] == kDistInf && mask[j] == mask[i]) {
                    dist[j] = level;
                    next.push_back(j);
                }
            });
        frontier.swap(next);
    }
    return dist;
}

} // namespace kdn
