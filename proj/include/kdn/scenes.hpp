#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "kdn/grid.hpp"

namespace kdn {

enum class SceneClass { Cartoon, Thin, Pattern, Smooth };

// Ground truth plus the exact foreground mask and the smoothness/jump
// parameters the generators guarantee. alpha = +inf marks piecewise-constant
// pieces; mu = 0 marks a scene without a discontinuity.
struct Scene {
    ImageGrid truth;
    std::vector<std::uint8_t> omega_mask; // 1 <=> pixel center in the foreground set
    double alpha = 0.0;                   // Hoelder smoothness of the pieces
    double mu = 0.0;                      // lower bound on the cross-boundary jump
    SceneClass class_tag = SceneClass::Smooth;
};

// Jump-to-noise ratio bookkeeping.
struct JnrSpec {
    double mu = 0.0;
    double sigma = 0.0;
    double jnr() const { return mu / sigma; }
};

// Disk foreground over a constant background, both pieces constant.
// The disk must lie strictly inside the unit square; membership uses the
// pixel-center rule. |fg_level - bg_level| must be >= mu.
Scene make_blob(int n, double mu, double fg_level, double bg_level,
                std::array<double, 2> center, double radius);

// Disk foreground carrying a radial quadratic ("bowl") over an affine
// background ramp. The foreground's boundary value equals the background's
// maximum on the circle plus mu, so the jump is >= mu everywhere on the
// boundary by construction; the bowl dips by `depth` at the center.
struct BowlParams {
    std::array<double, 2> center{0.5, 0.5};
    double radius = 0.3;
    double bg_base = 0.45;              // background value at the disk center
    std::array<double, 2> bg_slope{0.15, 0.10};
    double depth = 0.45;                // center dip of the quadratic piece
};
Scene make_bowl(int n, double mu, const BowlParams& params = {});

// Closed-form truth value at the disk center for the same parameters.
double bowl_center_value(double mu, const BowlParams& params);

// Thin band of half-thickness a around the graph x2 = phi(x1) of a
// 1-Lipschitz curve; constant background, foreground = background + gap
// where the gap interpolates linearly from mu at x1=0 to mu_right at x1=1
// (mu_right <= 0 means a constant gap mu). Requires a >= 4/n.
Scene make_swoosh(int n, double mu, double a,
                  const std::function<double(double)>& phi = {},
                  double bg_level = 0.2, double mu_right = 0.0);

// Axis-aligned periodic stripes: the foreground is the union of slabs of
// width duty*period along the first axis. The period is snapped to an
// integer pixel count p = round(a*n) >= 2 so the mask is exactly periodic
// under shifts by p pixels. Levels are centered: bg = (1-mu)/2, fg = bg+mu.
Scene make_stripes(int n, double mu, double a, double duty);

// One polynomial piece of a 1-D piecewise-polynomial scene: coefficients
// c0 + c1*x + c2*x^2 + ... apply on [previous upper, upper).
struct Segment1d {
    double upper = 1.0;
    std::vector<double> coeffs;
};

// 1-D piecewise-polynomial scene. Without jump_at the mask is all-true
// (pure smoothness tests); with jump_at the mask is {x < jump_at} and mu is
// the gap between the adjacent segment limits at that point.
Scene make_smooth_1d(int n, double alpha, const std::vector<Segment1d>& segments,
                     std::optional<double> jump_at = std::nullopt);

// Two constant levels with a single jump at `split`.
Scene make_step_1d(int n, double lo_level, double hi_level, double split);

// Continuous triangle wave with `teeth` periods between lo_level and
// hi_level (slopes +-2*(hi-lo)*teeth, so the pieces are Lipschitz/alpha=1),
// optionally shifted down by `drop` on [0.5, 1) to create a jump of size
// `drop` at x = 0.5 (always a half-segment boundary).
Scene make_zigzag_1d(int n, int teeth, double lo_level, double hi_level, double drop = 0.0);

} // namespace kdn
