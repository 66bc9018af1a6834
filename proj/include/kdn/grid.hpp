#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace kdn {

// Highest grid dimension the geometry helpers support. The data model is
// generic in d, but windows/patches use fixed-size index arrays for speed.
inline constexpr int kMaxDim = 4;

using MultiIndex = std::array<int, kMaxDim>;

// d-dimensional scalar field sampled on the regular lattice
// x_i = ((i_1 - 1/2)/n, ..., (i_d - 1/2)/n), stored flat in row-major order
// (first axis most significant). Ground truth and clipped estimates live in
// [0,1]; noisy observations may leave that range.
struct ImageGrid {
    int dim = 0;
    int side = 0;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }

    static ImageGrid zeros(int dim, int side);
};

// side^dim as size_t, with overflow/range validation.
std::size_t grid_size(int dim, int side);

// Throws unless g.values has exactly side^dim entries.
void validate_shape(const ImageGrid& g);

// Linear index of a 0-based multi-index (first axis most significant).
inline std::size_t ravel(const int* idx, int dim, int side)
{
    std::size_t lin = 0;
    for (int k = 0; k < dim; ++k)
        lin = lin * static_cast<std::size_t>(side) + static_cast<std::size_t>(idx[k]);
    return lin;
}

// Inverse of ravel; writes dim components into idx.
inline void unravel(std::size_t lin, int dim, int side, int* idx)
{
    for (int k = dim - 1; k >= 0; --k) {
        idx[k] = static_cast<int>(lin % static_cast<std::size_t>(side));
        lin /= static_cast<std::size_t>(side);
    }
}

// Sup-norm distance between two multi-indices, in pixels.
inline int chebyshev(const int* a, const int* b, int dim)
{
    int m = 0;
    for (int k = 0; k < dim; ++k) {
        const int diff = a[k] > b[k] ? a[k] - b[k] : b[k] - a[k];
        if (diff > m)
            m = diff;
    }
    return m;
}

// Lattice coordinates of a 1-based multi-index: x_k = (i_k - 1/2)/n.
std::vector<double> lattice_point(std::span<const int> index, int side);

// Gaussian noise description. (seed, replica_index) fully determine the
// field; distinct replica indices give independent streams.
struct NoiseSpec {
    double sigma = 0.0;         // std deviation on the [0,1] intensity scale
    std::uint64_t seed = 0;
    std::uint32_t replica_index = 0;
};

// Single standard-normal draw for pixel `pixel` of the stream identified by
// (seed, replica). Counter-based (splitmix64 + Box-Muller): a pure function,
// so noise fields are bit-reproducible under any parallel partitioning.
double normal_draw(std::uint64_t seed, std::uint32_t replica, std::uint64_t pixel);

// truth + i.i.d. N(0, sigma^2); the observation is NOT clipped to [0,1].
ImageGrid add_noise(const ImageGrid& truth, const NoiseSpec& spec);

// (1/n^d) sum_i (estimate_i - truth_i)^2.
double mse(const ImageGrid& estimate, const ImageGrid& truth);

// Monte-Carlo error decomposition over replicas (see bias_variance).
struct ErrorReport {
    double mse = 0.0;      // mean over replicas of per-replica MSE
    double sq_bias = 0.0;  // mean_i (replica-mean_i - truth_i)^2
    double variance = 0.0; // mean_i of the unbiased per-pixel sample variance
    int n_replicas = 0;
};

// Decompose replica estimates into squared bias and variance. The finite-m
// identity mse == sq_bias + ((m-1)/m) * variance holds exactly (per pixel,
// algebraically); the population identity mse = sq_bias + variance is
// recovered as m grows.
ErrorReport bias_variance(const ImageGrid& truth, std::span<const ImageGrid> estimates);

} // namespace kdn
