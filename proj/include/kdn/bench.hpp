#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "kdn/estimators.hpp"
#include "kdn/scenes.hpp"

namespace kdn {

// Shared knobs for the experiment harness. All results are deterministic
// given `seed`; replica noise is derived from (seed, replica index) only, so
// the thread count never changes a number.
struct BenchOptions {
    int replicas = 5;
    std::uint64_t seed = 0;
    int threads = 0; // 0 = resolve from KDN_THREADS / hardware
};

// ---------------------------------------------------------------------------
// Bandwidth sweep: mean MSE (0-255^2 units) per window side, plus the argmin.
struct SweepRow {
    int window_side = 0;
    double mse_mean = 0.0;
    double mse_stderr = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows; // window_side strictly increasing
    int argmin_side = 0;
};

SweepResult bandwidth_sweep(const Scene& scene, MethodFamily family, double sigma255, int r,
                            std::span<const int> window_sides, const BenchOptions& opt = {});

// ---------------------------------------------------------------------------
// Multi-method MSE table. One cell per (scene, family, sigma, degree);
// MSE reported in 0-255^2 units for comparability across the literature.
struct NamedScene {
    std::string name;
    const Scene* scene = nullptr;
};

struct TableCell {
    std::string scene;
    MethodFamily family = MethodFamily::LF;
    double sigma255 = 0.0;
    int r = 0;
    int window_side = 0;
    double mse_mean = 0.0;
    double mse_stderr = 0.0;
};

std::vector<TableCell> method_table(std::span<const NamedScene> scenes,
                                    std::span<const MethodFamily> families,
                                    std::span<const double> sigmas255,
                                    std::span<const int> r_values,
                                    const BenchOptions& opt = {});

// ---------------------------------------------------------------------------
// Empirical convergence rate: MSE vs n on a log-log grid with the bandwidth
// scaled by the matching power law. The scale constant is calibrated at the
// smallest n by a coarse sweep; remaining n reuse it.
struct RateFit {
    std::vector<int> n_values;
    std::vector<int> window_sides;
    std::vector<double> mse_values; // mean over replicas, 0-255^2 units
    double fitted_slope = 0.0;      // d log(mse) / d log(n), least squares
    double slope_stderr = 0.0;
    double theory_slope = 0.0;
};

using SceneFactory = std::function<Scene(int n)>;

RateFit rate_fit(const SceneFactory& make_scene, MethodFamily family, double sigma255, int r,
                 std::span<const int> n_grid, const BenchOptions& opt = {});

// ---------------------------------------------------------------------------
// Photometric-family degradation probe across noise levels at fixed n.
// One row per sigma with the four gate-based families side by side.
struct ElbowRow {
    double sigma255 = 0.0;
    double jnr = 0.0; // jump-to-noise ratio mu*255 / sigma255
    int side_yf = 0, side_nlm = 0, side_nlm_avg = 0, side_mo = 0;
    double mse_yf = 0.0, mse_nlm = 0.0, mse_nlm_avg = 0.0, mse_mo = 0.0;
};

struct ElbowOptions : BenchOptions {
    ElbowOptions() { replicas = 10; }
    int window_side = 0; // 0 = per-sigma defaults, else a fixed odd side
};

std::vector<ElbowRow> elbow_probe(const Scene& scene, std::span<const double> sigma_grid255,
                                  int r, const ElbowOptions& opt = {});

} // namespace kdn
