#include "kdn/bench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kdn/parallel.hpp"
#include "kdn/require.hpp"

namespace kdn {

namespace {

constexpr double kScale255Sq = 255.0 * 255.0;

struct CellStats {
    double mean = 0.0;
    double stderr_mean = 0.0; // sample std of per-replica MSE / sqrt(replicas)
};

// Mean/stderr of per-replica MSE for one (scene, config) cell, in 0-255^2
// units. Replicas run in parallel with single-threaded denoise calls; the
// per-replica values land in fixed slots, so the reduction is deterministic.
CellStats run_cell(const Scene& scene, const MethodConfig& cfg, double sigma255, int replicas,
                   std::uint64_t seed, std::uint32_t replica_base, int threads)
{
    KDN_REQUIRE(replicas >= 1, "bench: replicas must be >= 1");
    OracleInputs oracle;
    if (cfg.family == MethodFamily::MO || cfg.family == MethodFamily::BO)
        oracle.mask = &scene.omega_mask;

    std::vector<double> mses(static_cast<std::size_t>(replicas));
    parallel_chunks(mses.size(), resolve_threads(threads),
                    [&](std::size_t begin, std::size_t end, int) {
                        RunOptions run;
                        run.threads = 1;
                        for (std::size_t k = begin; k < end; ++k) {
                            const NoiseSpec spec{sigma255 / 255.0, seed,
                                                 replica_base + static_cast<std::uint32_t>(k)};
                            const ImageGrid y = add_noise(scene.truth, spec);
                            const DenoiseResult res = denoise(y, cfg, oracle, run);
                            mses[k] = mse(res.estimate, scene.truth) * kScale255Sq;
                        }
                    });

    CellStats out;
    for (double v : mses)
        out.mean += v;
    out.mean /= static_cast<double>(replicas);
    if (replicas >= 2) {
        double ss = 0.0;
        for (double v : mses)
            ss += (v - out.mean) * (v - out.mean);
        out.stderr_mean = std::sqrt(ss / (replicas - 1) / replicas);
    }
    return out;
}

MethodConfig config_for(MethodFamily family, double sigma255, int r, int window_side)
{
    MethodConfig cfg = default_bandwidths(family, sigma255, r);
    if (window_side > 0) {
        KDN_REQUIRE(window_side % 2 == 1, "window side must be odd, got " << window_side);
        cfg.window.radius_px = (window_side - 1) / 2;
    }
    return cfg;
}

} // namespace

SweepResult bandwidth_sweep(const Scene& scene, MethodFamily family, double sigma255, int r,
                            std::span<const int> window_sides, const BenchOptions& opt)
{
    KDN_REQUIRE(!window_sides.empty(), "bandwidth sweep needs at least one window side");
    for (std::size_t k = 0; k + 1 < window_sides.size(); ++k)
        KDN_REQUIRE(window_sides[k] < window_sides[k + 1],
                    "window sides must be strictly increasing");

    SweepResult result;
    result.rows.reserve(window_sides.size());
    double best = std::numeric_limits<double>::infinity();
    // All sides share the same replica block (common random numbers), which
    // sharpens the argmin comparison considerably.
    for (int side : window_sides) {
        const MethodConfig cfg = config_for(family, sigma255, r, side);
        const CellStats stats =
            run_cell(scene, cfg, sigma255, opt.replicas, opt.seed, 0, opt.threads);
        result.rows.push_back({side, stats.mean, stats.stderr_mean});
        if (stats.mean < best) {
            best = stats.mean;
            result.argmin_side = side;
        }
    }
    return result;
}

std::vector<TableCell> method_table(std::span<const NamedScene> scenes,
                                    std::span<const MethodFamily> families,
                                    std::span<const double> sigmas255,
                                    std::span<const int> r_values, const BenchOptions& opt)
{
    KDN_REQUIRE(!scenes.empty() && !families.empty() && !sigmas255.empty() && !r_values.empty(),
                "method table needs non-empty scene/family/sigma/degree lists");
    std::vector<TableCell> cells;
    cells.reserve(scenes.size() * families.size() * sigmas255.size() * r_values.size());
    for (const NamedScene& named : scenes) {
        KDN_REQUIRE(named.scene, "method table: null scene pointer");
        for (double sigma255 : sigmas255)
            for (int r : r_values)
                for (MethodFamily family : families) {
                    const MethodConfig cfg = config_for(family, sigma255, r, 0);
                    const CellStats stats = run_cell(*named.scene, cfg, sigma255, opt.replicas,
                                                     opt.seed, 0, opt.threads);
                    TableCell cell;
                    cell.scene = named.name;
                    cell.family = family;
                    cell.sigma255 = sigma255;
                    cell.r = r;
                    cell.window_side = 2 * cfg.window.radius_px + 1;
                    cell.mse_mean = stats.mean;
                    cell.mse_stderr = stats.stderr_mean;
                    cells.push_back(std::move(cell));
                }
    }
    return cells;
}

RateFit rate_fit(const SceneFactory& make_scene, MethodFamily family, double sigma255, int r,
                 std::span<const int> n_grid, const BenchOptions& opt)
{
    KDN_REQUIRE(n_grid.size() >= 4, "rate fit needs at least 4 grid sizes");
    for (std::size_t k = 0; k + 1 < n_grid.size(); ++k)
        KDN_REQUIRE(n_grid[k] < n_grid[k + 1], "grid sizes must be strictly increasing");
    KDN_REQUIRE(sigma255 > 0.0, "rate fit needs positive noise (zero noise is degenerate)");

    const int n0 = n_grid.front();
    const Scene scene0 = make_scene(n0);
    const int d = scene0.truth.dim;
    const double sigma = sigma255 / 255.0;

    // Bandwidth power law: h scales as (sigma^2 / n^d)^e. A jump discontinuity
    // pins the blind local filter to e = 1/(d+1); every other combination uses
    // the smoothness-driven e = 1/(d+2*alpha).
    const bool jump_limited = family == MethodFamily::LF && scene0.class_tag == SceneClass::Cartoon;
    double exponent, theory_slope;
    if (jump_limited) {
        exponent = 1.0 / (d + 1);
        theory_slope = -static_cast<double>(d) / (d + 1);
    } else {
        const double alpha = scene0.alpha;
        KDN_REQUIRE(std::isfinite(alpha) && alpha > 0.0,
                    "rate fit needs a finite positive smoothness order for this method");
        exponent = 1.0 / (d + 2.0 * alpha);
        theory_slope = -2.0 * alpha * d / (d + 2.0 * alpha);
    }
    const auto rate_term = [&](int n) {
        return std::pow(sigma * sigma / std::pow(static_cast<double>(n), d), exponent);
    };

    // Calibrate the scale constant at the smallest n with a coarse geometric
    // radius sweep (its replica block is disjoint from the measurement block,
    // so the argmin selection cannot bias the fitted point at n0).
    std::vector<int> radii;
    const int radius_cap = std::max(2, n0 / 4);
    for (double v = 1.0; static_cast<int>(v) <= radius_cap; v *= 1.35) {
        const int rad = static_cast<int>(v);
        if (radii.empty() || radii.back() != rad)
            radii.push_back(rad);
    }
    int best_radius = radii.front();
    double best_mse = std::numeric_limits<double>::infinity();
    for (int rad : radii) {
        const MethodConfig cfg = config_for(family, sigma255, r, 2 * rad + 1);
        const CellStats stats = run_cell(scene0, cfg, sigma255, opt.replicas, opt.seed,
                                         1u << 20, opt.threads);
        if (stats.mean < best_mse) {
            best_mse = stats.mean;
            best_radius = rad;
        }
    }
    const double scale_c = (static_cast<double>(best_radius) / n0) / rate_term(n0);

    RateFit fit;
    fit.theory_slope = theory_slope;
    for (int n : n_grid) {
        const Scene scene = make_scene(n);
        KDN_REQUIRE(scene.truth.side == n, "scene factory returned side " << scene.truth.side
                                                                          << " for n=" << n);
        const long wanted = std::lround(scale_c * rate_term(n) * n);
        const int radius = static_cast<int>(std::clamp<long>(wanted, 1, n - 1));
        const MethodConfig cfg = config_for(family, sigma255, r, 2 * radius + 1);
        const CellStats stats =
            run_cell(scene, cfg, sigma255, opt.replicas, opt.seed, 0, opt.threads);
        KDN_REQUIRE(stats.mean > 0.0, "rate fit degenerate: MSE is exactly zero at n="
                                          << n << " (noiseless oracle reconstruction)");
        fit.n_values.push_back(n);
        fit.window_sides.push_back(2 * radius + 1);
        fit.mse_values.push_back(stats.mean);
    }

    // Straight-line least squares on (log n, log MSE).
    const std::size_t m = fit.n_values.size();
    double sx = 0.0, sy = 0.0;
    std::vector<double> xs(m), ys(m);
    for (std::size_t k = 0; k < m; ++k) {
        xs[k] = std::log(static_cast<double>(fit.n_values[k]));
        ys[k] = std::log(fit.mse_values[k]);
        sx += xs[k];
        sy += ys[k];
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        sxx += (xs[k] - mx) * (xs[k] - mx);
        sxy += (xs[k] - mx) * (ys[k] - my);
    }
    fit.fitted_slope = sxy / sxx;
    const double intercept = my - fit.fitted_slope * mx;
    double ssr = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double resid = ys[k] - (intercept + fit.fitted_slope * xs[k]);
        ssr += resid * resid;
    }
    fit.slope_stderr = std::sqrt(ssr / (m - 2) / sxx);
    return fit;
}

std::vector<ElbowRow> elbow_probe(const Scene& scene, std::span<const double> sigma_grid255,
                                  int r, const ElbowOptions& opt)
{
    KDN_REQUIRE(!sigma_grid255.empty(), "elbow probe needs at least one sigma");
    std::vector<ElbowRow> rows;
    rows.reserve(sigma_grid255.size());
    for (double sigma255 : sigma_grid255) {
        KDN_REQUIRE(sigma255 >= 0.0, "elbow probe: sigma must be >= 0");
        ElbowRow row;
        row.sigma255 = sigma255;
        row.jnr = sigma255 > 0.0 ? scene.mu * 255.0 / sigma255
                                 : std::numeric_limits<double>::infinity();
        const auto probe = [&](MethodFamily family, int& side_out, double& mse_out) {
            const MethodConfig cfg = config_for(family, sigma255, r, opt.window_side);
            side_out = 2 * cfg.window.radius_px + 1;
            mse_out =
                run_cell(scene, cfg, sigma255, opt.replicas, opt.seed, 0, opt.threads).mean;
        };
        probe(MethodFamily::YF, row.side_yf, row.mse_yf);
        probe(MethodFamily::NLM, row.side_nlm, row.mse_nlm);
        probe(MethodFamily::NlmAvg, row.side_nlm_avg, row.mse_nlm_avg);
        probe(MethodFamily::MO, row.side_mo, row.mse_mo);
        rows.push_back(row);
    }
    return rows;
}

} // namespace kdn
