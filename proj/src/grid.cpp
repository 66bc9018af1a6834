#include "kdn/grid.hpp"

#include <cmath>
#include <limits>

#include "kdn/require.hpp"

namespace kdn {

ImageGrid ImageGrid::zeros(int dim, int side)
{
    ImageGrid g;
    g.dim = dim;
    g.side = side;
    g.values.assign(grid_size(dim, side), 0.0);
    return g;
}

std::size_t grid_size(int dim, int side)
{
    KDN_REQUIRE(dim >= 1 && dim <= kMaxDim, "grid dimension must be in [1," << kMaxDim
                                                                            << "], got " << dim);
    KDN_REQUIRE(side >= 1, "grid side must be >= 1, got " << side);
    std::size_t total = 1;
    const std::size_t s = static_cast<std::size_t>(side);
    for (int k = 0; k < dim; ++k) {
        KDN_REQUIRE(total <= std::numeric_limits<std::size_t>::max() / s,
                    "grid size side^dim overflows: side=" << side << " dim=" << dim);
        total *= s;
    }
    return total;
}

void validate_shape(const ImageGrid& g)
{
    KDN_REQUIRE(g.values.size() == grid_size(g.dim, g.side),
                "grid value count " << g.values.size() << " does not match side^dim for side="
                                    << g.side << " dim=" << g.dim);
}

std::vector<double> lattice_point(std::span<const int> index, int side)
{
    KDN_REQUIRE(!index.empty() && index.size() <= static_cast<std::size_t>(kMaxDim),
                "lattice_point: index dimension must be in [1," << kMaxDim << "]");
    KDN_REQUIRE(side >= 1, "lattice_point: side must be >= 1");
    std::vector<double> x(index.size());
    for (std::size_t k = 0; k < index.size(); ++k) {
        KDN_REQUIRE(index[k] >= 1 && index[k] <= side,
                    "lattice_point: component " << k << " = " << index[k]
                                                << " outside {1.." << side << "}");
        x[k] = (static_cast<double>(index[k]) - 0.5) / static_cast<double>(side);
    }
    return x;
}

namespace {

// splitmix64 output finalizer (Stafford mix13 variant).
inline std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

// k-th output of the splitmix64 sequence seeded at `state`.
inline std::uint64_t counter_out(std::uint64_t state, std::uint64_t k)
{
    return mix64(state + (k + 1) * kGamma);
}

// Per-(seed, replica) stream key; replicas are splits of the master seed.
inline std::uint64_t stream_key(std::uint64_t seed, std::uint32_t replica)
{
    return counter_out(mix64(seed + kGamma), replica);
}

// 53-bit uniforms: u_open in (0,1] (safe for log), u_half in [0,1).
inline double to_unit_open(std::uint64_t bits)
{
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}
inline double to_unit_half(std::uint64_t bits)
{
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

} // namespace

double normal_draw(std::uint64_t seed, std::uint32_t replica, std::uint64_t pixel)
{
    const std::uint64_t key = stream_key(seed, replica);
    const double u1 = to_unit_open(counter_out(key, 2 * pixel));
    const double u2 = to_unit_half(counter_out(key, 2 * pixel + 1));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

ImageGrid add_noise(const ImageGrid& truth, const NoiseSpec& spec)
{
    validate_shape(truth);
    KDN_REQUIRE(spec.sigma >= 0.0, "noise sigma must be >= 0, got " << spec.sigma);
    ImageGrid out = truth;
    if (spec.sigma == 0.0)
        return out;
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] += spec.sigma * normal_draw(spec.seed, spec.replica_index, i);
    return out;
}

double mse(const ImageGrid& estimate, const ImageGrid& truth)
{
    validate_shape(estimate);
    validate_shape(truth);
    KDN_REQUIRE(estimate.dim == truth.dim && estimate.side == truth.side,
                "mse: shape mismatch (" << estimate.dim << "," << estimate.side << ") vs ("
                                        << truth.dim << "," << truth.side << ")");
    double acc = 0.0;
    for (std::size_t i = 0; i < truth.values.size(); ++i) {
        const double diff = estimate.values[i] - truth.values[i];
        acc += diff * diff;
    }
    return acc / static_cast<double>(truth.values.size());
}

ErrorReport bias_variance(const ImageGrid& truth, std::span<const ImageGrid> estimates)
{
    validate_shape(truth);
    KDN_REQUIRE(estimates.size() >= 2, "bias_variance needs >= 2 replicas, got "
                                           << estimates.size());
    const std::size_t npix = truth.values.size();
    const double m = static_cast<double>(estimates.size());

    ErrorReport report;
    report.n_replicas = static_cast<int>(estimates.size());
    for (const ImageGrid& est : estimates)
        report.mse += mse(est, truth); // also validates shapes
    report.mse /= m;

    // Two-pass per-pixel mean and unbiased sample variance across replicas.
    std::vector<double> mean(npix, 0.0);
    for (const ImageGrid& est : estimates)
        for (std::size_t i = 0; i < npix; ++i)
            mean[i] += est.values[i];
    for (std::size_t i = 0; i < npix; ++i)
        mean[i] /= m;

    double sqb = 0.0, var = 0.0;
    for (std::size_t i = 0; i < npix; ++i) {
        const double b = mean[i] - truth.values[i];
        sqb += b * b;
    }
    for (const ImageGrid& est : estimates)
        for (std::size_t i = 0; i < npix; ++i) {
            const double dev = est.values[i] - mean[i];
            var += dev * dev;
        }
    report.sq_bias = sqb / static_cast<double>(npix);
    report.variance = var / (m - 1.0) / static_cast<double>(npix);
    return report;
}

} // namespace kdn
