#include <array>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "kdn/bench.hpp"
#include "kdn/estimators.hpp"
#include "kdn/grid.hpp"
#include "kdn/io.hpp"
#include "kdn/require.hpp"
#include "kdn/scenes.hpp"

namespace {

const char* class_name(kdn::SceneClass c)
{
    switch (c) {
    case kdn::SceneClass::Cartoon: return "cartoon";
    case kdn::SceneClass::Thin: return "thin";
    case kdn::SceneClass::Pattern: return "pattern";
    case kdn::SceneClass::Smooth: return "smooth";
    }
    return "unknown";
}

// Built-in scenes used by the bench subcommands, keyed by name.
kdn::Scene make_named_scene(const std::string& name, int n)
{
    if (name == "blob")
        return kdn::make_blob(n, 0.6, 0.75, 0.15, {0.5, 0.5}, 0.25);
    if (name == "bowl")
        return kdn::make_bowl(n, 0.25);
    if (name == "swoosh")
        return kdn::make_swoosh(n, 0.6, 0.05);
    if (name == "stripes")
        return kdn::make_stripes(n, 1.0, 16.0 / n, 0.5);
    if (name == "step")
        return kdn::make_step_1d(n, 0.2, 0.8, 0.5);
    if (name == "zigzag")
        return kdn::make_zigzag_1d(n, 8, 0.3, 0.9, 0.25);
    if (name == "smooth")
        return kdn::make_smooth_1d(n, 2.0, {{1.0, {0.2, 1.6, -1.6}}});
    KDN_REQUIRE(false, "unknown scene '" << name
                       << "' (expected blob|bowl|swoosh|stripes|step|zigzag|smooth)");
    return {};
}

void write_scene(const std::string& out, const std::string& kind, const kdn::Scene& scene)
{
    kdn::write_grid(out, scene.truth);
    kdn::write_mask(out + ".mask", scene.omega_mask, scene.truth.dim, scene.truth.side);
    kdn::write_meta(out + ".meta",
                    {{"scene", kind},
                     {"class", class_name(scene.class_tag)},
                     {"alpha", kdn::csv_num(scene.alpha)},
                     {"mu", kdn::csv_num(scene.mu)},
                     {"d", std::to_string(scene.truth.dim)},
                     {"n", std::to_string(scene.truth.side)}});
}

// CSV destination: '-' means stdout.
struct CsvOut {
    std::ofstream file;
    std::ostream* os = nullptr;

    explicit CsvOut(const std::string& path)
    {
        if (path == "-") {
            os = &std::cout;
            return;
        }
        file.open(path);
        KDN_REQUIRE(file, "cannot open '" << path << "' for writing");
        os = &file;
    }
};

struct GenerateArgs {
    int n = 256;
    std::string out;
    // blob
    double mu = 0.6, bg = 0.15, radius = 0.25, cx = 0.5, cy = 0.5;
    std::optional<double> fg;
    // bowl
    kdn::BowlParams bowl;
    double bowl_mu = 0.25;
    // swoosh
    double sw_mu = 0.6, half_width = 0.05, sw_bg = 0.2, mu_right = 0.0;
    // stripes
    double st_mu = 1.0, duty = 0.5;
    int period_px = 16;
    // step1d
    double lo = 0.2, hi = 0.8, split = 0.5;
    // zigzag1d
    int teeth = 8;
    double zz_lo = 0.3, zz_hi = 0.9, drop = 0.25;
    // smooth1d
    double alpha = 2.0;
};

struct DenoiseArgs {
    std::string in, out, method, mask_path, oracle_values_path, truth_path;
    double sigma255 = 0.0;
    int r = 0;
    int window_side = 0;
    int patch_side = 0;
    double hy255 = -1.0;
    int threads = 0;
};

void run_denoise(const DenoiseArgs& a)
{
    const kdn::ImageGrid y = kdn::read_grid(a.in);
    const kdn::MethodFamily family = kdn::parse_family(a.method);
    kdn::MethodConfig cfg = kdn::default_bandwidths(family, a.sigma255, a.r);
    if (a.window_side > 0) {
        KDN_REQUIRE(a.window_side % 2 == 1, "--window-side must be odd, got " << a.window_side);
        cfg.window.radius_px = (a.window_side - 1) / 2;
    }
    if (a.patch_side > 0) {
        KDN_REQUIRE(cfg.patch, "--patch-side applies only to the patch-based families");
        cfg.patch->width_px = a.patch_side;
    }
    if (a.hy255 >= 0.0) {
        KDN_REQUIRE(cfg.photometric, "--hy255 applies only to the gated families");
        cfg.photometric->h_y = a.hy255 / 255.0;
    }

    kdn::OracleInputs oracle;
    kdn::MaskData mask;
    kdn::ImageGrid oracle_values;
    if (family == kdn::MethodFamily::MO || family == kdn::MethodFamily::BO) {
        if (!a.mask_path.empty()) {
            mask = kdn::read_mask(a.mask_path);
            KDN_REQUIRE(mask.dim == y.dim && mask.side == y.side,
                        "--mask shape does not match the input grid");
            oracle.mask = &mask.mask;
        } else if (family == kdn::MethodFamily::MO && !a.oracle_values_path.empty()) {
            oracle_values = kdn::read_grid(a.oracle_values_path);
            oracle.truth = &oracle_values;
        } else {
            KDN_REQUIRE(false, a.method << " requires --mask"
                                        << (family == kdn::MethodFamily::MO
                                                ? " (or --oracle-values for value gating)"
                                                : ""));
        }
    }

    kdn::RunOptions run;
    run.threads = a.threads;
    const kdn::DenoiseResult res = kdn::denoise(y, cfg, oracle, run);
    kdn::write_grid(a.out, res.estimate);
    if (!a.truth_path.empty()) {
        const kdn::ImageGrid truth = kdn::read_grid(a.truth_path);
        std::cout << "mse255=" << kdn::csv_num(kdn::mse(res.estimate, truth) * 255.0 * 255.0)
                  << '\n';
    }
}

std::vector<std::string> row(std::initializer_list<std::string> cells)
{
    return {cells};
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Kernel denoising toolkit: synthetic scenes, gated local-polynomial "
                 "estimators, and Monte-Carlo benchmarks"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* cmd_generate = app.add_subcommand("generate", "Write a synthetic scene (grid + "
                                                        "foreground mask + metadata)");
    cmd_generate->require_subcommand(1);
    const auto add_common = [&gen](CLI::App* sub) {
        sub->add_option("--n", gen.n, "Grid side length")->capture_default_str();
        sub->add_option("--out", gen.out, "Output grid path (mask/meta sidecars appended)")
            ->required();
    };
    auto* g_blob = cmd_generate->add_subcommand("blob", "Constant disk on a constant background");
    add_common(g_blob);
    g_blob->add_option("--mu", gen.mu, "Jump size")->capture_default_str();
    g_blob->add_option("--bg", gen.bg, "Background level")->capture_default_str();
    g_blob->add_option("--fg", gen.fg, "Foreground level (default bg + mu)");
    g_blob->add_option("--radius", gen.radius, "Disk radius")->capture_default_str();
    g_blob->add_option("--cx", gen.cx, "Disk center x")->capture_default_str();
    g_blob->add_option("--cy", gen.cy, "Disk center y")->capture_default_str();

    auto* g_bowl = cmd_generate->add_subcommand("bowl", "Radial quadratic disk over an affine "
                                                        "background ramp");
    add_common(g_bowl);
    g_bowl->add_option("--mu", gen.bowl_mu, "Minimal boundary jump")->capture_default_str();
    g_bowl->add_option("--radius", gen.bowl.radius, "Disk radius")->capture_default_str();
    g_bowl->add_option("--cx", gen.bowl.center[0], "Disk center x")->capture_default_str();
    g_bowl->add_option("--cy", gen.bowl.center[1], "Disk center y")->capture_default_str();
    g_bowl->add_option("--bg-base", gen.bowl.bg_base, "Background level at the disk center")
        ->capture_default_str();
    g_bowl->add_option("--bg-slope-x", gen.bowl.bg_slope[0], "Background slope, first axis")
        ->capture_default_str();
    g_bowl->add_option("--bg-slope-y", gen.bowl.bg_slope[1], "Background slope, second axis")
        ->capture_default_str();
    g_bowl->add_option("--depth", gen.bowl.depth, "Center dip of the quadratic piece")
        ->capture_default_str();

    auto* g_swoosh = cmd_generate->add_subcommand("swoosh", "Thin curved band over a constant "
                                                            "background");
    add_common(g_swoosh);
    g_swoosh->add_option("--mu", gen.sw_mu, "Band/background gap at the left edge")
        ->capture_default_str();
    g_swoosh->add_option("--half-width", gen.half_width, "Band half-thickness")
        ->capture_default_str();
    g_swoosh->add_option("--bg", gen.sw_bg, "Background level")->capture_default_str();
    g_swoosh->add_option("--mu-right", gen.mu_right,
                         "Gap at the right edge (<= 0 keeps the gap constant)")
        ->capture_default_str();

    auto* g_stripes = cmd_generate->add_subcommand("stripes", "Axis-aligned periodic stripes");
    add_common(g_stripes);
    g_stripes->add_option("--mu", gen.st_mu, "Level gap")->capture_default_str();
    g_stripes->add_option("--period-px", gen.period_px, "Stripe period in pixels")
        ->capture_default_str();
    g_stripes->add_option("--duty", gen.duty, "Foreground fraction of each period")
        ->capture_default_str();

    auto* g_step = cmd_generate->add_subcommand("step1d", "Two constant levels with one jump");
    add_common(g_step);
    g_step->add_option("--lo", gen.lo, "Left level")->capture_default_str();
    g_step->add_option("--hi", gen.hi, "Right level")->capture_default_str();
    g_step->add_option("--split", gen.split, "Jump location")->capture_default_str();

    auto* g_zigzag = cmd_generate->add_subcommand("zigzag1d", "Triangle wave, optional mid-"
                                                              "domain drop");
    add_common(g_zigzag);
    g_zigzag->add_option("--teeth", gen.teeth, "Number of periods (even)")->capture_default_str();
    g_zigzag->add_option("--lo", gen.zz_lo, "Lower level")->capture_default_str();
    g_zigzag->add_option("--hi", gen.zz_hi, "Upper level")->capture_default_str();
    g_zigzag->add_option("--drop", gen.drop, "Jump size at x = 0.5 (0 = continuous)")
        ->capture_default_str();

    auto* g_smooth = cmd_generate->add_subcommand("smooth1d", "Smooth concave parabola");
    add_common(g_smooth);
    g_smooth->add_option("--alpha", gen.alpha, "Recorded smoothness order")->capture_default_str();

    struct {
        std::string in, out;
        double sigma255 = 0.0;
        std::uint64_t seed = 0;
        std::uint32_t replica = 0;
    } noise;
    auto* cmd_noise = app.add_subcommand("noise", "Add Gaussian noise to a grid");
    cmd_noise->add_option("--in", noise.in, "Input grid")->required();
    cmd_noise->add_option("--out", noise.out, "Output grid")->required();
    cmd_noise->add_option("--sigma255", noise.sigma255, "Noise std deviation, 0-255 scale")
        ->required();
    cmd_noise->add_option("--seed", noise.seed, "Master seed")->capture_default_str();
    cmd_noise->add_option("--replica", noise.replica, "Replica index")->capture_default_str();

    DenoiseArgs den;
    auto* cmd_denoise = app.add_subcommand("denoise", "Run one estimator over a noisy grid");
    cmd_denoise->add_option("--in", den.in, "Noisy input grid")->required();
    cmd_denoise->add_option("--out", den.out, "Estimate output grid")->required();
    cmd_denoise->add_option("--method", den.method, "lf|yf|nlm|nlm-avg|mo|bo")->required();
    cmd_denoise->add_option("--sigma255", den.sigma255, "Noise level driving the defaults")
        ->required();
    cmd_denoise->add_option("--r", den.r, "Polynomial degree")->capture_default_str();
    cmd_denoise->add_option("--window-side", den.window_side,
                            "Override the window side (odd; default from the bandwidth table)");
    cmd_denoise->add_option("--patch-side", den.patch_side, "Override the patch side (odd)");
    cmd_denoise->add_option("--hy255", den.hy255, "Override the photometric threshold, 0-255");
    cmd_denoise->add_option("--mask", den.mask_path, "Foreground mask (mo/bo oracles)");
    cmd_denoise->add_option("--oracle-values", den.oracle_values_path,
                            "True image for value-gated mo");
    cmd_denoise->add_option("--truth", den.truth_path, "True grid; prints mse255 when given");
    cmd_denoise->add_option("--threads", den.threads, "Worker threads (0 = auto)");

    struct {
        std::string in, out;
    } convert;
    auto* cmd_export = app.add_subcommand("export-pgm", "Convert a grid to 8-bit binary PGM "
                                                        "(lossy quantization)");
    cmd_export->add_option("--in", convert.in, "Input grid")->required();
    cmd_export->add_option("--out", convert.out, "Output PGM")->required();
    auto* cmd_import = app.add_subcommand("import-pgm", "Convert 8-bit binary PGM to a grid");
    cmd_import->add_option("--in", convert.in, "Input PGM")->required();
    cmd_import->add_option("--out", convert.out, "Output grid")->required();

    struct {
        std::string scene = "bowl", method = "mo", out = "-";
        double sigma255 = 5.0;
        int r = 0, n = 256, replicas = 5, threads = 0;
        std::uint64_t seed = 0;
        std::vector<int> sides{3, 5, 7, 9, 11, 15, 19, 25, 33, 43, 57};
    } sweep;
    auto* cmd_sweep = app.add_subcommand("sweep", "MSE as a function of window side");
    cmd_sweep->add_option("--scene", sweep.scene, "Built-in scene name")->capture_default_str();
    cmd_sweep->add_option("--method", sweep.method, "Estimator family")->capture_default_str();
    cmd_sweep->add_option("--sigma255", sweep.sigma255, "Noise level")->capture_default_str();
    cmd_sweep->add_option("--r", sweep.r, "Polynomial degree")->capture_default_str();
    cmd_sweep->add_option("--n", sweep.n, "Scene side length")->capture_default_str();
    cmd_sweep->add_option("--sides", sweep.sides, "Window sides to sweep")
        ->delimiter(',')
        ->capture_default_str();
    cmd_sweep->add_option("--replicas", sweep.replicas, "Noise replicas")->capture_default_str();
    cmd_sweep->add_option("--seed", sweep.seed, "Master seed")->capture_default_str();
    cmd_sweep->add_option("--out", sweep.out, "CSV path ('-' = stdout)")->capture_default_str();
    cmd_sweep->add_option("--threads", sweep.threads, "Worker threads (0 = auto)");

    struct {
        std::string method = "lf", scene, out = "-";
        int d = 1, r = 0, replicas = 20, threads = 0;
        double sigma255 = 50.0;
        std::uint64_t seed = 0;
        std::vector<int> n_grid;
    } rates;
    auto* cmd_rates = app.add_subcommand("rates", "Log-log MSE convergence rate vs grid size");
    cmd_rates->add_option("--method", rates.method, "Estimator family")->capture_default_str();
    cmd_rates->add_option("--d", rates.d, "Scene dimension")->capture_default_str();
    cmd_rates->add_option("--sigma255", rates.sigma255, "Noise level")->capture_default_str();
    cmd_rates->add_option("--n", rates.n_grid, "Grid sides (at least 4, increasing)")
        ->delimiter(',')
        ->required();
    cmd_rates->add_option("--scene", rates.scene,
                          "Built-in scene name (default: step for d=1, blob for d=2)");
    cmd_rates->add_option("--r", rates.r, "Polynomial degree")->capture_default_str();
    cmd_rates->add_option("--replicas", rates.replicas, "Noise replicas")->capture_default_str();
    cmd_rates->add_option("--seed", rates.seed, "Master seed")->capture_default_str();
    cmd_rates->add_option("--out", rates.out, "CSV path ('-' = stdout)")->capture_default_str();
    cmd_rates->add_option("--threads", rates.threads, "Worker threads (0 = auto)");

    struct {
        std::string preset, out = "-";
        std::vector<std::string> scenes, methods;
        std::vector<double> sigmas;
        std::vector<int> degrees;
        int n = 0, replicas = 5, threads = 0;
        std::uint64_t seed = 0;
    } table;
    auto* cmd_table = app.add_subcommand("table", "MSE table across scenes, methods, and noise "
                                                  "levels");
    cmd_table->add_option("--preset", table.preset, "Built-in preset: paper-table2-lite");
    cmd_table->add_option("--scenes", table.scenes, "Built-in scene names")->delimiter(',');
    cmd_table->add_option("--methods", table.methods, "Estimator families")->delimiter(',');
    cmd_table->add_option("--sigmas", table.sigmas, "Noise levels, 0-255 scale")->delimiter(',');
    cmd_table->add_option("--r", table.degrees, "Polynomial degrees")->delimiter(',');
    cmd_table->add_option("--n", table.n, "Scene side length (preset default 128)");
    cmd_table->add_option("--replicas", table.replicas, "Noise replicas")->capture_default_str();
    cmd_table->add_option("--seed", table.seed, "Master seed")->capture_default_str();
    cmd_table->add_option("--out", table.out, "CSV path ('-' = stdout)")->capture_default_str();
    cmd_table->add_option("--threads", table.threads, "Worker threads (0 = auto)");

    struct {
        std::string scene = "blob", out = "-";
        std::vector<double> sigmas{5, 10, 20, 40, 80, 160};
        int r = 0, n = 256, replicas = 10, window_side = 0, threads = 0;
        std::uint64_t seed = 0;
    } elbow;
    auto* cmd_elbow = app.add_subcommand("elbow", "Gated-family MSE across noise levels at "
                                                  "fixed n");
    cmd_elbow->add_option("--scene", elbow.scene, "Built-in scene name")->capture_default_str();
    cmd_elbow->add_option("--sigmas", elbow.sigmas, "Noise levels to probe")
        ->delimiter(',')
        ->capture_default_str();
    cmd_elbow->add_option("--r", elbow.r, "Polynomial degree")->capture_default_str();
    cmd_elbow->add_option("--n", elbow.n, "Scene side length")->capture_default_str();
    cmd_elbow->add_option("--window-side", elbow.window_side,
                          "Fixed window side (0 = per-sigma defaults)");
    cmd_elbow->add_option("--replicas", elbow.replicas, "Noise replicas")->capture_default_str();
    cmd_elbow->add_option("--seed", elbow.seed, "Master seed")->capture_default_str();
    cmd_elbow->add_option("--out", elbow.out, "CSV path ('-' = stdout)")->capture_default_str();
    cmd_elbow->add_option("--threads", elbow.threads, "Worker threads (0 = auto)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(cmd_generate)) {
            if (cmd_generate->got_subcommand(g_blob)) {
                const double fg = gen.fg ? *gen.fg : gen.bg + gen.mu;
                write_scene(gen.out, "blob",
                            kdn::make_blob(gen.n, gen.mu, fg, gen.bg, {gen.cx, gen.cy},
                                           gen.radius));
            } else if (cmd_generate->got_subcommand(g_bowl)) {
                write_scene(gen.out, "bowl", kdn::make_bowl(gen.n, gen.bowl_mu, gen.bowl));
            } else if (cmd_generate->got_subcommand(g_swoosh)) {
                write_scene(gen.out, "swoosh",
                            kdn::make_swoosh(gen.n, gen.sw_mu, gen.half_width, {}, gen.sw_bg,
                                             gen.mu_right));
            } else if (cmd_generate->got_subcommand(g_stripes)) {
                write_scene(gen.out, "stripes",
                            kdn::make_stripes(gen.n, gen.st_mu,
                                              static_cast<double>(gen.period_px) / gen.n,
                                              gen.duty));
            } else if (cmd_generate->got_subcommand(g_step)) {
                write_scene(gen.out, "step1d",
                            kdn::make_step_1d(gen.n, gen.lo, gen.hi, gen.split));
            } else if (cmd_generate->got_subcommand(g_zigzag)) {
                write_scene(gen.out, "zigzag1d",
                            kdn::make_zigzag_1d(gen.n, gen.teeth, gen.zz_lo, gen.zz_hi,
                                                gen.drop));
            } else if (cmd_generate->got_subcommand(g_smooth)) {
                write_scene(gen.out, "smooth1d",
                            kdn::make_smooth_1d(gen.n, gen.alpha, {{1.0, {0.2, 1.6, -1.6}}}));
            }
        } else if (app.got_subcommand(cmd_noise)) {
            const kdn::ImageGrid truth = kdn::read_grid(noise.in);
            kdn::write_grid(noise.out,
                            kdn::add_noise(truth, {noise.sigma255 / 255.0, noise.seed,
                                                   noise.replica}));
        } else if (app.got_subcommand(cmd_denoise)) {
            run_denoise(den);
        } else if (app.got_subcommand(cmd_export)) {
            kdn::write_pgm(convert.out, kdn::read_grid(convert.in));
        } else if (app.got_subcommand(cmd_import)) {
            kdn::write_grid(convert.out, kdn::read_pgm(convert.in));
        } else if (app.got_subcommand(cmd_sweep)) {
            const kdn::Scene scene = make_named_scene(sweep.scene, sweep.n);
            kdn::BenchOptions opt;
            opt.replicas = sweep.replicas;
            opt.seed = sweep.seed;
            opt.threads = sweep.threads;
            const kdn::SweepResult res =
                kdn::bandwidth_sweep(scene, kdn::parse_family(sweep.method), sweep.sigma255,
                                     sweep.r, sweep.sides, opt);
            CsvOut out(sweep.out);
            kdn::write_csv_row(*out.os, row({"scene", "family", "sigma255", "r", "window_side",
                                             "mse_mean", "mse_stderr", "is_argmin"}));
            for (const kdn::SweepRow& r : res.rows)
                kdn::write_csv_row(
                    *out.os,
                    row({sweep.scene, sweep.method, kdn::csv_num(sweep.sigma255),
                         std::to_string(sweep.r), std::to_string(r.window_side),
                         kdn::csv_num(r.mse_mean), kdn::csv_num(r.mse_stderr),
                         r.window_side == res.argmin_side ? "1" : "0"}));
        } else if (app.got_subcommand(cmd_rates)) {
            if (rates.scene.empty())
                rates.scene = rates.d == 1 ? "step" : "blob";
            const auto factory = [&](int n) { return make_named_scene(rates.scene, n); };
            {
                const kdn::Scene probe = factory(rates.n_grid.empty() ? 8 : rates.n_grid[0]);
                KDN_REQUIRE(probe.truth.dim == rates.d,
                            "scene '" << rates.scene << "' has dimension " << probe.truth.dim
                                      << ", but --d is " << rates.d);
            }
            kdn::BenchOptions opt;
            opt.replicas = rates.replicas;
            opt.seed = rates.seed;
            opt.threads = rates.threads;
            const kdn::RateFit fit =
                kdn::rate_fit(factory, kdn::parse_family(rates.method), rates.sigma255, rates.r,
                              rates.n_grid, opt);
            CsvOut out(rates.out);
            kdn::write_csv_row(*out.os, row({"kind", "n", "window_side", "mse_mean",
                                             "fitted_slope", "slope_stderr", "theory_slope"}));
            for (std::size_t k = 0; k < fit.n_values.size(); ++k)
                kdn::write_csv_row(*out.os,
                                   row({"point", std::to_string(fit.n_values[k]),
                                        std::to_string(fit.window_sides[k]),
                                        kdn::csv_num(fit.mse_values[k]), "", "", ""}));
            kdn::write_csv_row(*out.os, row({"fit", "", "", "", kdn::csv_num(fit.fitted_slope),
                                             kdn::csv_num(fit.slope_stderr),
                                             kdn::csv_num(fit.theory_slope)}));
        } else if (app.got_subcommand(cmd_table)) {
            if (!table.preset.empty()) {
                KDN_REQUIRE(table.preset == "paper-table2-lite",
                            "unknown preset '" << table.preset << "'");
                if (table.scenes.empty())
                    table.scenes = {"blob", "stripes"};
                if (table.methods.empty())
                    table.methods = {"lf", "yf", "nlm", "nlm-avg", "mo"};
                if (table.sigmas.empty())
                    table.sigmas = {5, 20, 50, 100};
                if (table.n == 0)
                    table.n = 128;
            }
            KDN_REQUIRE(!table.scenes.empty() && !table.methods.empty() && !table.sigmas.empty(),
                        "table needs --preset or explicit --scenes/--methods/--sigmas");
            if (table.degrees.empty())
                table.degrees = {0};
            if (table.n == 0)
                table.n = 128;
            std::vector<kdn::Scene> scenes;
            scenes.reserve(table.scenes.size());
            for (const std::string& name : table.scenes)
                scenes.push_back(make_named_scene(name, table.n));
            std::vector<kdn::NamedScene> named;
            for (std::size_t k = 0; k < scenes.size(); ++k)
                named.push_back({table.scenes[k], &scenes[k]});
            std::vector<kdn::MethodFamily> families;
            for (const std::string& m : table.methods)
                families.push_back(kdn::parse_family(m));
            kdn::BenchOptions opt;
            opt.replicas = table.replicas;
            opt.seed = table.seed;
            opt.threads = table.threads;
            const std::vector<kdn::TableCell> cells =
                kdn::method_table(named, families, table.sigmas, table.degrees, opt);
            CsvOut out(table.out);
            kdn::write_csv_row(*out.os, row({"scene", "family", "sigma255", "r", "window_side",
                                             "mse_mean", "mse_stderr"}));
            for (const kdn::TableCell& c : cells)
                kdn::write_csv_row(*out.os,
                                   row({c.scene, kdn::family_name(c.family),
                                        kdn::csv_num(c.sigma255), std::to_string(c.r),
                                        std::to_string(c.window_side), kdn::csv_num(c.mse_mean),
                                        kdn::csv_num(c.mse_stderr)}));
        } else if (app.got_subcommand(cmd_elbow)) {
            const kdn::Scene scene = make_named_scene(elbow.scene, elbow.n);
            kdn::ElbowOptions opt;
            opt.replicas = elbow.replicas;
            opt.seed = elbow.seed;
            opt.threads = elbow.threads;
            opt.window_side = elbow.window_side;
            const std::vector<kdn::ElbowRow> rows =
                kdn::elbow_probe(scene, elbow.sigmas, elbow.r, opt);
            CsvOut out(elbow.out);
            kdn::write_csv_row(*out.os,
                               row({"sigma255", "jnr", "side_yf", "mse_yf", "side_nlm",
                                    "mse_nlm", "side_nlm_avg", "mse_nlm_avg", "side_mo",
                                    "mse_mo"}));
            for (const kdn::ElbowRow& r : rows)
                kdn::write_csv_row(
                    *out.os, row({kdn::csv_num(r.sigma255), kdn::csv_num(r.jnr),
                                  std::to_string(r.side_yf), kdn::csv_num(r.mse_yf),
                                  std::to_string(r.side_nlm), kdn::csv_num(r.mse_nlm),
                                  std::to_string(r.side_nlm_avg), kdn::csv_num(r.mse_nlm_avg),
                                  std::to_string(r.side_mo), kdn::csv_num(r.mse_mo)}));
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
