#include "kdn/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "kdn/parallel.hpp"
#include "kdn/require.hpp"

namespace kdn {

std::string family_name(MethodFamily family)
{
    switch (family) {
    case MethodFamily::LF: return "lf";
    case MethodFamily::YF: return "yf";
    case MethodFamily::NLM: return "nlm";
    case MethodFamily::NlmAvg: return "nlm-avg";
    case MethodFamily::MO: return "mo";
    case MethodFamily::BO: return "bo";
    }
    KDN_REQUIRE(false, "unknown estimator family");
    return {};
}

MethodFamily parse_family(const std::string& name)
{
    if (name == "lf") return MethodFamily::LF;
    if (name == "yf") return MethodFamily::YF;
    if (name == "nlm") return MethodFamily::NLM;
    if (name == "nlm-avg" || name == "nlm_avg") return MethodFamily::NlmAvg;
    if (name == "mo") return MethodFamily::MO;
    if (name == "bo") return MethodFamily::BO;
    KDN_REQUIRE(false, "unknown estimator family '" << name
                       << "' (expected lf|yf|nlm|nlm-avg|mo|bo)");
    return {};
}

void validate_method(const MethodConfig& cfg)
{
    validate_window(cfg.window);
    validate_lpr(cfg.lpr);
    if (cfg.patch)
        validate_patch(*cfg.patch);
    if (cfg.photometric)
        validate_photometric(*cfg.photometric);

    const char* name = "estimator";
    switch (cfg.family) {
    case MethodFamily::LF:
    case MethodFamily::BO:
        name = cfg.family == MethodFamily::LF ? "lf" : "bo";
        KDN_REQUIRE(!cfg.patch && !cfg.photometric,
                    name << " carries neither patch nor photometric spec");
        break;
    case MethodFamily::YF:
        KDN_REQUIRE(!cfg.patch, "yf carries no patch spec");
        KDN_REQUIRE(cfg.photometric && cfg.photometric->family == PhotometricFamily::Yf,
                    "yf requires a photometric spec of the yf family");
        break;
    case MethodFamily::NLM:
        KDN_REQUIRE(cfg.patch, "nlm requires a patch spec");
        KDN_REQUIRE(cfg.photometric && cfg.photometric->family == PhotometricFamily::NlmEuclid,
                    "nlm requires a photometric spec of the nlm_euclid family");
        break;
    case MethodFamily::NlmAvg:
        KDN_REQUIRE(cfg.patch, "nlm-avg requires a patch spec");
        KDN_REQUIRE(cfg.photometric && cfg.photometric->family == PhotometricFamily::NlmAvg,
                    "nlm-avg requires a photometric spec of the nlm_avg family");
        break;
    case MethodFamily::MO:
        KDN_REQUIRE(!cfg.patch, "mo carries no patch spec");
        KDN_REQUIRE(!cfg.photometric || cfg.photometric->family == PhotometricFamily::Yf,
                    "mo's optional photometric spec gates true values yf-style");
        break;
    }
}

namespace {

// Per-family gate objects. Each gate sees the pixel loop as begin(i) then
// operator()(j) for every window member; all state is per-worker.
struct LfGate {
    void begin(std::size_t) {}
    bool operator()(std::size_t) const { return true; }
};

struct YfGate {
    const double* y;
    double h_y;
    double y_i = 0.0;
    void begin(std::size_t i) { y_i = y[i]; }
    bool operator()(std::size_t j) const { return std::abs(y_i - y[j]) <= h_y; }
};

// Gate on true pixel values (oracle with access to the original image).
struct TruthValueGate {
    const double* truth;
    double h_y;
    double t_i = 0.0;
    void begin(std::size_t i) { t_i = truth[i]; }
    bool operator()(std::size_t j) const { return std::abs(t_i - truth[j]) <= h_y; }
};

struct MaskGate {
    const std::uint8_t* mask;
    std::uint8_t m_i = 0;
    void begin(std::size_t i) { m_i = mask[i]; }
    bool operator()(std::size_t j) const { return mask[j] == m_i; }
};

// Patch Euclidean gate over precomputed patch rows, with early exit once the
// running squared distance exceeds the threshold.
struct NlmGatePrecomputed {
    const double* rows;
    std::size_t patch_len;
    double limit_sq;
    const double* row_i = nullptr;
    void begin(std::size_t i) { row_i = rows + i * patch_len; }
    bool operator()(std::size_t j) const
    {
        const double* row_j = rows + j * patch_len;
        double acc = 0.0;
        for (std::size_t k = 0; k < patch_len; ++k) {
            const double d = row_i[k] - row_j[k];
            acc += d * d;
            if (acc > limit_sq)
                return false;
        }
        return true;
    }
};

// Streaming variant for grids whose patch table exceeds the memory cap.
struct NlmGateStreaming {
    const ImageGrid* y;
    PatchSpec patch;
    double limit_sq;
    std::vector<double> buf_i, buf_j;
    void begin(std::size_t i)
    {
        buf_i.resize(grid_size(y->dim, patch.width_px));
        buf_j.resize(buf_i.size());
        extract_patch(*y, i, patch, buf_i.data());
    }
    bool operator()(std::size_t j)
    {
        extract_patch(*y, j, patch, buf_j.data());
        double acc = 0.0;
        for (std::size_t k = 0; k < buf_i.size(); ++k) {
            const double d = buf_i[k] - buf_j[k];
            acc += d * d;
            if (acc > limit_sq)
                return false;
        }
        return true;
    }
};

struct AvgGate {
    const double* means;
    double h_y;
    double m_i = 0.0;
    void begin(std::size_t i) { m_i = means[i]; }
    bool operator()(std::size_t j) const { return std::abs(m_i - means[j]) <= h_y; }
};

// Iterate the clipped spatial window of `pixel` with per-pixel radius,
// invoking visit(j, offset) where offset = (x_j - x_i) in continuous units.
// The innermost axis runs contiguously in memory.
template <typename Visit>
void for_window(int dim, int n, std::size_t pixel, int radius, Visit&& visit)
{
    int ci[kMaxDim], lo[kMaxDim], hi[kMaxDim], cur[kMaxDim];
    double offset[kMaxDim];
    unravel(pixel, dim, n, ci);
    for (int k = 0; k < dim; ++k) {
        lo[k] = std::max(0, ci[k] - radius);
        hi[k] = std::min(n - 1, ci[k] + radius);
        cur[k] = lo[k];
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    const int last = dim - 1;
    while (true) {
        std::size_t base = 0;
        for (int k = 0; k < last; ++k) {
            base = base * static_cast<std::size_t>(n) + static_cast<std::size_t>(cur[k]);
            offset[k] = static_cast<double>(cur[k] - ci[k]) * inv_n;
        }
        base *= static_cast<std::size_t>(n);
        for (int jj = lo[last]; jj <= hi[last]; ++jj) {
            offset[last] = static_cast<double>(jj - ci[last]) * inv_n;
            visit(base + static_cast<std::size_t>(jj), offset);
        }
        int k = last - 1;
        while (k >= 0 && cur[k] == hi[k]) {
            cur[k] = lo[k];
            --k;
        }
        if (k < 0)
            break;
        ++cur[k];
    }
}

struct WorkerTally {
    std::size_t fallbacks = 0;
    std::size_t min_active = std::numeric_limits<std::size_t>::max();
    std::size_t max_active = 0;
    unsigned long long active_sum = 0;
};

// The whole-grid loop shared by every family. radius_at(i) yields the
// effective window radius; make_gate(worker) yields a fresh per-worker gate.
template <typename RadiusAt, typename MakeGate>
DenoiseResult run_grid(const ImageGrid& y, const MethodConfig& cfg, const RunOptions& opt,
                       RadiusAt&& radius_at, MakeGate&& make_gate)
{
    const std::size_t npix = y.size();
    const int threads = resolve_threads(opt.threads);

    DenoiseResult result;
    result.estimate = ImageGrid::zeros(y.dim, y.side);
    std::vector<WorkerTally> tallies(static_cast<std::size_t>(std::max(threads, 1)));

    parallel_chunks(npix, threads, [&](std::size_t begin, std::size_t end, int worker) {
        auto gate = make_gate(worker);
        LprSolver solver(y.dim, cfg.lpr);
        WorkerTally& tally = tallies[static_cast<std::size_t>(worker)];
        for (std::size_t i = begin; i < end; ++i) {
            gate.begin(i);
            solver.reset();
            for_window(y.dim, y.side, i, radius_at(i), [&](std::size_t j, const double* offset) {
                if (gate(j))
                    solver.add(offset, y.values[j]);
            });
            bool fell_back = false;
            result.estimate.values[i] = clip01(solver.solve(y.values[i], &fell_back));
            const std::size_t active = static_cast<std::size_t>(solver.active());
            tally.fallbacks += fell_back ? 1 : 0;
            tally.min_active = std::min(tally.min_active, active);
            tally.max_active = std::max(tally.max_active, active);
            tally.active_sum += active;
        }
    });

    ActiveStats stats;
    stats.min_size = std::numeric_limits<std::size_t>::max();
    unsigned long long total = 0;
    for (const WorkerTally& t : tallies) {
        result.fallback_count += t.fallbacks;
        stats.min_size = std::min(stats.min_size, t.min_active);
        stats.max_size = std::max(stats.max_size, t.max_active);
        total += t.active_sum;
    }
    stats.mean_size = static_cast<double>(total) / static_cast<double>(npix);
    result.active = stats;
    return result;
}

// Patch mean per pixel (mirror-padded), for the NLM-average gate.
std::vector<double> patch_means(const ImageGrid& y, const PatchSpec& patch, int threads)
{
    const std::size_t plen = grid_size(y.dim, patch.width_px);
    std::vector<double> means(y.size());
    parallel_chunks(y.size(), threads, [&](std::size_t begin, std::size_t end, int) {
        std::vector<double> buf(plen);
        for (std::size_t i = begin; i < end; ++i) {
            extract_patch(y, i, patch, buf.data());
            double acc = 0.0;
            for (double v : buf)
                acc += v;
            means[i] = acc / static_cast<double>(plen);
        }
    });
    return means;
}

// Precomputed patch table (row per pixel) when it fits under the cap.
std::vector<double> patch_rows(const ImageGrid& y, const PatchSpec& patch, int threads)
{
    const std::size_t plen = grid_size(y.dim, patch.width_px);
    std::vector<double> rows(y.size() * plen);
    parallel_chunks(y.size(), threads, [&](std::size_t begin, std::size_t end, int) {
        for (std::size_t i = begin; i < end; ++i)
            extract_patch(y, i, patch, rows.data() + i * plen);
    });
    return rows;
}

void check_oracle(const ImageGrid& y, const MethodConfig& cfg, const OracleInputs& oracle)
{
    if (cfg.family == MethodFamily::BO) {
        KDN_REQUIRE(oracle.mask, "bo requires an oracle mask");
        KDN_REQUIRE(oracle.mask->size() == y.size(), "bo oracle mask length mismatch");
        return;
    }
    KDN_REQUIRE(cfg.family == MethodFamily::MO, "internal: oracle check for non-oracle family");
    KDN_REQUIRE(oracle.mask || oracle.truth,
                "mo requires an oracle mask or a true image for value gating");
    KDN_REQUIRE(!(oracle.mask && oracle.truth),
                "mo accepts either an oracle mask or a true image, not both");
    if (oracle.mask)
        KDN_REQUIRE(oracle.mask->size() == y.size(), "mo oracle mask length mismatch");
    if (oracle.truth) {
        validate_shape(*oracle.truth);
        KDN_REQUIRE(oracle.truth->dim == y.dim && oracle.truth->side == y.side,
                    "mo true-image shape mismatch");
        KDN_REQUIRE(cfg.photometric,
                    "mo with a true image needs a photometric threshold (h_y)");
    }
}

} // namespace

DenoiseResult denoise(const ImageGrid& y, const MethodConfig& cfg, const OracleInputs& oracle,
                      const RunOptions& opt)
{
    validate_shape(y);
    validate_method(cfg);
    const int threads = resolve_threads(opt.threads);
    const auto fixed_radius = [&](std::size_t) { return cfg.window.radius_px; };

    switch (cfg.family) {
    case MethodFamily::LF:
        return run_grid(y, cfg, opt, fixed_radius, [&](int) { return LfGate{}; });

    case MethodFamily::YF: {
        const double h_y = cfg.photometric->h_y;
        return run_grid(y, cfg, opt, fixed_radius,
                        [&](int) { return YfGate{y.values.data(), h_y}; });
    }

    case MethodFamily::NLM: {
        KDN_REQUIRE(cfg.patch->width_px <= 2 * y.side - 1,
                    "nlm patch width " << cfg.patch->width_px
                                       << " exceeds mirror-padding limit 2n-1");
        const std::size_t plen = grid_size(y.dim, cfg.patch->width_px);
        const double limit_sq = cfg.photometric->h_y * cfg.photometric->h_y;
        if (y.size() * plen * sizeof(double) <= opt.patch_memory_cap_bytes) {
            const std::vector<double> rows = patch_rows(y, *cfg.patch, threads);
            return run_grid(y, cfg, opt, fixed_radius, [&](int) {
                return NlmGatePrecomputed{rows.data(), plen, limit_sq};
            });
        }
        return run_grid(y, cfg, opt, fixed_radius, [&](int) {
            return NlmGateStreaming{&y, *cfg.patch, limit_sq, {}, {}};
        });
    }

    case MethodFamily::NlmAvg: {
        KDN_REQUIRE(cfg.patch->width_px <= 2 * y.side - 1,
                    "nlm-avg patch width " << cfg.patch->width_px
                                           << " exceeds mirror-padding limit 2n-1");
        const std::vector<double> means = patch_means(y, *cfg.patch, threads);
        const double h_y = cfg.photometric->h_y;
        return run_grid(y, cfg, opt, fixed_radius,
                        [&](int) { return AvgGate{means.data(), h_y}; });
    }

    case MethodFamily::MO: {
        check_oracle(y, cfg, oracle);
        if (oracle.mask)
            return run_grid(y, cfg, opt, fixed_radius,
                            [&](int) { return MaskGate{oracle.mask->data()}; });
        const double h_y = cfg.photometric->h_y;
        return run_grid(y, cfg, opt, fixed_radius,
                        [&](int) { return TruthValueGate{oracle.truth->values.data(), h_y}; });
    }

    case MethodFamily::BO: {
        check_oracle(y, cfg, oracle);
        const std::vector<int> dist = boundary_distance(*oracle.mask, y.dim, y.side);
        const int max_radius = cfg.window.radius_px;
        const auto bo_radius = [&dist, max_radius](std::size_t i) {
            const int d = dist[i];
            return d == kDistInf ? max_radius : std::min(max_radius, d - 1);
        };
        return run_grid(y, cfg, opt, bo_radius, [&](int) { return LfGate{}; });
    }
    }
    KDN_REQUIRE(false, "unknown estimator family");
    return {};
}

std::vector<std::size_t> active_set(const ImageGrid& y, const MethodConfig& cfg,
                                    std::size_t pixel, const OracleInputs& oracle)
{
    validate_shape(y);
    validate_method(cfg);
    KDN_REQUIRE(pixel < y.size(), "active_set: pixel index out of range");

    std::vector<std::size_t> out;
    int radius = cfg.window.radius_px;
    auto collect = [&](auto&& gate) {
        gate.begin(pixel);
        for_window(y.dim, y.side, pixel, radius, [&](std::size_t j, const double*) {
            if (gate(j))
                out.push_back(j);
        });
    };

    switch (cfg.family) {
    case MethodFamily::LF:
        collect(LfGate{});
        break;
    case MethodFamily::YF:
        collect(YfGate{y.values.data(), cfg.photometric->h_y});
        break;
    case MethodFamily::NLM: {
        KDN_REQUIRE(cfg.patch->width_px <= 2 * y.side - 1,
                    "nlm patch width exceeds mirror-padding limit 2n-1");
        const double limit_sq = cfg.photometric->h_y * cfg.photometric->h_y;
        collect(NlmGateStreaming{&y, *cfg.patch, limit_sq, {}, {}});
        break;
    }
    case MethodFamily::NlmAvg: {
        const std::vector<double> means = patch_means(y, *cfg.patch, 1);
        collect(AvgGate{means.data(), cfg.photometric->h_y});
        break;
    }
    case MethodFamily::MO:
        check_oracle(y, cfg, oracle);
        if (oracle.mask)
            collect(MaskGate{oracle.mask->data()});
        else
            collect(TruthValueGate{oracle.truth->values.data(), cfg.photometric->h_y});
        break;
    case MethodFamily::BO: {
        check_oracle(y, cfg, oracle);
        const std::vector<int> dist = boundary_distance(*oracle.mask, y.dim, y.side);
        const int d = dist[pixel];
        radius = d == kDistInf ? radius : std::min(radius, d - 1);
        collect(LfGate{});
        break;
    }
    }
    return out;
}

MethodConfig default_bandwidths(MethodFamily family, double sigma255, int r)
{
    KDN_REQUIRE(sigma255 >= 0.0, "default_bandwidths: sigma must be >= 0 (0-255 scale)");
    KDN_REQUIRE(r >= 0 && r <= 2, "default_bandwidths: degree r must be in {0,1,2}");

    // Tuned window sides per (sigma column, degree); nearest column wins,
    // ties toward the lower sigma.
    static constexpr double kSigmaCols[4] = {5.0, 20.0, 50.0, 100.0};
    static constexpr int kSides[3][4] = {
        {7, 13, 23, 35},  // r = 0
        {9, 17, 25, 33},  // r = 1
        {23, 41, 59, 61}, // r = 2
    };
    int col = 0;
    for (int c = 1; c < 4; ++c)
        if (std::abs(kSigmaCols[c] - sigma255) < std::abs(kSigmaCols[col] - sigma255))
            col = c;

    const double sigma = sigma255 / 255.0;
    MethodConfig cfg;
    cfg.family = family;
    cfg.window.radius_px = (kSides[r][col] - 1) / 2;
    cfg.lpr.r = r;

    switch (family) {
    case MethodFamily::LF:
    case MethodFamily::BO:
        break;
    case MethodFamily::YF:
        cfg.photometric = PhotometricSpec{PhotometricFamily::Yf, std::sqrt(10.0) * sigma};
        break;
    case MethodFamily::NLM:
        cfg.patch = PatchSpec{7};
        cfg.photometric = PhotometricSpec{PhotometricFamily::NlmEuclid, 13.1 * sigma};
        break;
    case MethodFamily::NlmAvg:
        cfg.patch = PatchSpec{7};
        cfg.photometric = PhotometricSpec{PhotometricFamily::NlmAvg, 0.29 * sigma};
        break;
    case MethodFamily::MO:
        // Gate threshold for the value-gated oracle; ignored under mask mode.
        cfg.photometric = PhotometricSpec{PhotometricFamily::Yf, 30.0 / 255.0};
        break;
    }
    validate_method(cfg);
    return cfg;
}

} // namespace kdn
