#include "kdn/scenes.hpp"

#include <cmath>
#include <limits>

#include "kdn/require.hpp"

namespace kdn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Pixel-center coordinate along one axis (0-based pixel index).
inline double center(int i, int n)
{
    return (static_cast<double>(i) + 0.5) / static_cast<double>(n);
}

inline double horner(const std::vector<double>& coeffs, double x)
{
    double v = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 0;)
        v = v * x + coeffs[k];
    return v;
}

void check_level(double v, const char* what)
{
    KDN_REQUIRE(v >= 0.0 && v <= 1.0, what << " value " << v << " outside [0,1]");
}

} // namespace

Scene make_blob(int n, double mu, double fg_level, double bg_level,
                std::array<double, 2> center_xy, double radius)
{
    KDN_REQUIRE(mu >= 0.0, "blob: mu must be >= 0");
    check_level(fg_level, "blob foreground");
    check_level(bg_level, "blob background");
    KDN_REQUIRE(std::abs(fg_level - bg_level) >= mu,
                "blob: level gap " << std::abs(fg_level - bg_level) << " below mu " << mu);
    KDN_REQUIRE(radius > 0.0, "blob: radius must be > 0");
    for (int k = 0; k < 2; ++k)
        KDN_REQUIRE(center_xy[k] - radius > 0.0 && center_xy[k] + radius < 1.0,
                    "blob: disk touches or exits the unit square (axis " << k << ")");

    Scene scene;
    scene.truth = ImageGrid::zeros(2, n);
    scene.omega_mask.assign(scene.truth.size(), 0);
    scene.alpha = kInf;
    scene.mu = mu;
    scene.class_tag = SceneClass::Cartoon;

    const double r2 = radius * radius;
    std::size_t lin = 0;
    for (int i0 = 0; i0 < n; ++i0) {
        const double dx0 = center(i0, n) - center_xy[0];
        for (int i1 = 0; i1 < n; ++i1, ++lin) {
            const double dx1 = center(i1, n) - center_xy[1];
            const bool in = dx0 * dx0 + dx1 * dx1 < r2; // open disk
            scene.omega_mask[lin] = in ? 1 : 0;
            scene.truth.values[lin] = in ? fg_level : bg_level;
        }
    }
    return scene;
}

double bowl_center_value(double mu, const BowlParams& p)
{
    const double slope_norm = std::hypot(p.bg_slope[0], p.bg_slope[1]);
    return p.bg_base + slope_norm * p.radius + mu - p.depth;
}

Scene make_bowl(int n, double mu, const BowlParams& p)
{
    KDN_REQUIRE(mu >= 0.0, "bowl: mu must be >= 0");
    KDN_REQUIRE(p.radius > 0.0, "bowl: radius must be > 0");
    KDN_REQUIRE(p.depth >= 0.0, "bowl: depth must be >= 0");
    for (int k = 0; k < 2; ++k)
        KDN_REQUIRE(p.center[k] - p.radius > 0.0 && p.center[k] + p.radius < 1.0,
                    "bowl: disk touches or exits the unit square (axis " << k << ")");

    // Foreground boundary value sits mu above the background's maximum on the
    // circle, so the cross-boundary jump is >= mu by construction.
    const double slope_norm = std::hypot(p.bg_slope[0], p.bg_slope[1]);
    const double v_edge = p.bg_base + slope_norm * p.radius + mu;
    const double curv = p.depth / (p.radius * p.radius);

    Scene scene;
    scene.truth = ImageGrid::zeros(2, n);
    scene.omega_mask.assign(scene.truth.size(), 0);
    scene.alpha = 2.0;
    scene.mu = mu;
    scene.class_tag = SceneClass::Cartoon;

    const double r2 = p.radius * p.radius;
    std::size_t lin = 0;
    for (int i0 = 0; i0 < n; ++i0) {
        const double dx0 = center(i0, n) - p.center[0];
        for (int i1 = 0; i1 < n; ++i1, ++lin) {
            const double dx1 = center(i1, n) - p.center[1];
            const double rr = dx0 * dx0 + dx1 * dx1;
            double v;
            if (rr < r2) {
                scene.omega_mask[lin] = 1;
                v = (v_edge - p.depth) + curv * rr; // radial quadratic
            } else {
                v = p.bg_base + p.bg_slope[0] * dx0 + p.bg_slope[1] * dx1; // affine ramp
            }
            KDN_REQUIRE(v >= 0.0 && v <= 1.0,
                        "bowl: parameters drive truth value " << v << " outside [0,1]");
            scene.truth.values[lin] = v;
        }
    }
    return scene;
}

Scene make_swoosh(int n, double mu, double a, const std::function<double(double)>& phi,
                  double bg_level, double mu_right)
{
    KDN_REQUIRE(mu > 0.0, "swoosh: mu must be > 0");
    KDN_REQUIRE(a >= 4.0 / static_cast<double>(n),
                "swoosh: thickness a=" << a << " below 4/n=" << 4.0 / n);
    check_level(bg_level, "swoosh background");
    KDN_REQUIRE(mu_right == 0.0 || mu_right >= mu,
                "swoosh: varying jump must stay >= mu (mu_right=" << mu_right << ")");

    const std::function<double(double)> curve =
        phi ? phi : [](double t) { return 0.5 + 0.15 * std::sin(2.0 * M_PI * t); };
    const double gap_right = mu_right == 0.0 ? mu : mu_right;

    Scene scene;
    scene.truth = ImageGrid::zeros(2, n);
    scene.omega_mask.assign(scene.truth.size(), 0);
    scene.alpha = kInf;
    scene.mu = mu;
    scene.class_tag = SceneClass::Thin;

    for (int i0 = 0; i0 < n; ++i0) {
        const double x0 = center(i0, n);
        const double mid = curve(x0);
        KDN_REQUIRE(mid - a > 0.0 && mid + a < 1.0,
                    "swoosh: band exits the unit square at x1=" << x0);
        const double gap = mu + (gap_right - mu) * x0;
        const double fg = bg_level + gap;
        check_level(fg, "swoosh foreground");
        for (int i1 = 0; i1 < n; ++i1) {
            const std::size_t lin = static_cast<std::size_t>(i0) * n + i1;
            const bool in = std::abs(center(i1, n) - mid) < a;
            scene.omega_mask[lin] = in ? 1 : 0;
            scene.truth.values[lin] = in ? fg : bg_level;
        }
    }
    return scene;
}

Scene make_stripes(int n, double mu, double a, double duty)
{
    KDN_REQUIRE(mu >= 0.0 && mu <= 1.0, "stripes: mu must be in [0,1]");
    KDN_REQUIRE(duty > 0.0 && duty < 1.0, "stripes: duty must be in (0,1), got " << duty);
    const long p = std::lround(a * static_cast<double>(n));
    KDN_REQUIRE(p >= 2, "stripes: period n*a must round to >= 2 pixels, got " << p);
    KDN_REQUIRE(p <= n, "stripes: period " << p << " exceeds grid side " << n);

    const double bg = (1.0 - mu) / 2.0;
    const double fg = bg + mu;
    const double dutyp = duty * static_cast<double>(p);

    Scene scene;
    scene.truth = ImageGrid::zeros(2, n);
    scene.omega_mask.assign(scene.truth.size(), 0);
    scene.alpha = kInf;
    scene.mu = mu;
    scene.class_tag = SceneClass::Pattern;

    for (int i0 = 0; i0 < n; ++i0) {
        // Pixel-center membership in the first slab of the snapped period.
        const bool in = (static_cast<double>(i0 % p) + 0.5) < dutyp;
        for (int i1 = 0; i1 < n; ++i1) {
            const std::size_t lin = static_cast<std::size_t>(i0) * n + i1;
            scene.omega_mask[lin] = in ? 1 : 0;
            scene.truth.values[lin] = in ? fg : bg;
        }
    }
    return scene;
}

Scene make_smooth_1d(int n, double alpha, const std::vector<Segment1d>& segments,
                     std::optional<double> jump_at)
{
    KDN_REQUIRE(alpha > 0.0, "smooth1d: alpha must be > 0");
    KDN_REQUIRE(!segments.empty(), "smooth1d: need at least one segment");
    double prev = 0.0;
    for (std::size_t s = 0; s < segments.size(); ++s) {
        KDN_REQUIRE(!segments[s].coeffs.empty(), "smooth1d: segment " << s << " has no coefficients");
        KDN_REQUIRE(segments[s].upper > prev,
                    "smooth1d: segment uppers must increase, got " << segments[s].upper
                                                                  << " after " << prev);
        prev = segments[s].upper;
    }
    KDN_REQUIRE(prev >= 1.0 - 1e-12, "smooth1d: last segment must reach x=1, got " << prev);

    Scene scene;
    scene.truth = ImageGrid::zeros(1, n);
    scene.omega_mask.assign(scene.truth.size(), 1);
    scene.alpha = alpha;
    scene.class_tag = SceneClass::Smooth;

    std::size_t seg = 0;
    for (int i = 0; i < n; ++i) {
        const double x = center(i, n);
        while (seg + 1 < segments.size() && x >= segments[seg].upper)
            ++seg;
        const double v = horner(segments[seg].coeffs, x);
        KDN_REQUIRE(v >= 0.0 && v <= 1.0,
                    "smooth1d: value " << v << " at x=" << x << " outside [0,1]");
        scene.truth.values[i] = v;
        if (jump_at)
            scene.omega_mask[i] = x < *jump_at ? 1 : 0;
    }

    if (jump_at) {
        KDN_REQUIRE(*jump_at > 0.0 && *jump_at < 1.0, "smooth1d: jump_at must lie in (0,1)");
        // Gap between the segment ending at jump_at and the one starting there.
        std::size_t right = 0;
        while (right + 1 < segments.size() && segments[right].upper <= *jump_at)
            ++right;
        std::size_t left = right;
        if (right > 0 && segments[right - 1].upper >= *jump_at - 1e-12)
            left = right - 1;
        const double gap = std::abs(horner(segments[left].coeffs, *jump_at) -
                                    horner(segments[right].coeffs, *jump_at));
        KDN_REQUIRE(gap > 0.0, "smooth1d: jump_at=" << *jump_at
                                                    << " does not sit on a discontinuity");
        scene.mu = gap;
        scene.class_tag = SceneClass::Cartoon;
    }
    return scene;
}

Scene make_step_1d(int n, double lo_level, double hi_level, double split)
{
    check_level(lo_level, "step1d low");
    check_level(hi_level, "step1d high");
    KDN_REQUIRE(lo_level != hi_level, "step1d: levels must differ");
    return make_smooth_1d(n, kInf, {{split, {lo_level}}, {1.0, {hi_level}}}, split);
}

Scene make_zigzag_1d(int n, int teeth, double lo_level, double hi_level, double drop)
{
    KDN_REQUIRE(teeth >= 1, "zigzag1d: teeth must be >= 1");
    KDN_REQUIRE(hi_level > lo_level, "zigzag1d: need hi_level > lo_level");
    KDN_REQUIRE(drop >= 0.0, "zigzag1d: drop must be >= 0");
    // Triangle wave: 2*teeth linear half-segments with slope magnitude
    // 2*(hi-lo)*teeth (the Lipschitz/alpha=1 constant of the pieces).
    const double slope = 2.0 * (hi_level - lo_level) * static_cast<double>(teeth);
    std::vector<Segment1d> segments;
    segments.reserve(2 * static_cast<std::size_t>(teeth));
    for (int k = 0; k < 2 * teeth; ++k) {
        const double x_lo = static_cast<double>(k) / (2.0 * teeth);
        const double x_up = static_cast<double>(k + 1) / (2.0 * teeth);
        const bool rising = (k % 2) == 0;
        const double at_lo = rising ? lo_level : hi_level;
        const double sl = rising ? slope : -slope;
        double c0 = at_lo - sl * x_lo;
        if (drop > 0.0 && x_lo >= 0.5)
            c0 -= drop;
        segments.push_back({x_up, {c0, sl}});
    }
    return make_smooth_1d(n, 1.0, segments,
                          drop > 0.0 ? std::optional<double>(0.5) : std::nullopt);
}

} // namespace kdn
