#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <stdexcept>

#include "doctest.h"

#include "kdn/kernels.hpp"
#include "kdn/scenes.hpp"
#include "oracles.hpp"

using namespace kdn;

TEST_SUITE_BEGIN("kernels");

TEST_CASE("spatial_window: clipped box in raster order")
{
    const WindowSpec r1{1};

    // Interior pixel of a 4x4 grid: the full 3x3 box.
    const int interior[2] = {1, 1};
    CHECK(spatial_window(interior, r1, 2, 4) ==
          std::vector<std::size_t>{0, 1, 2, 4, 5, 6, 8, 9, 10});

    // Corner: clipped to the in-bounds quadrant.
    const int corner[2] = {0, 0};
    CHECK(spatial_window(corner, r1, 2, 4) == std::vector<std::size_t>{0, 1, 4, 5});

    // Edge row, interior column.
    const int edge[2] = {0, 2};
    CHECK(spatial_window(edge, r1, 2, 4) == std::vector<std::size_t>{1, 2, 3, 5, 6, 7});

    // Radius 0 is the singleton {i}.
    const int solo[2] = {2, 3};
    CHECK(spatial_window(solo, WindowSpec{0}, 2, 4) ==
          std::vector<std::size_t>{ravel(solo, 2, 4)});

    // 1-D left end; radius covering the whole axis clips to [0, n).
    const int left[1] = {0};
    CHECK(spatial_window(left, WindowSpec{2}, 1, 5) == std::vector<std::size_t>{0, 1, 2});
    const int mid1[1] = {1};
    CHECK(spatial_window(mid1, WindowSpec{10}, 1, 3) == std::vector<std::size_t>{0, 1, 2});

    // 3-D interior count and extremes.
    const int c3[3] = {2, 2, 2};
    const auto w3 = spatial_window(c3, r1, 3, 5);
    CHECK(w3.size() == 27);
    const int lo3[3] = {1, 1, 1}, hi3[3] = {3, 3, 3};
    CHECK(w3.front() == ravel(lo3, 3, 5));
    CHECK(w3.back() == ravel(hi3, 3, 5));

    CHECK_THROWS_AS(spatial_window(interior, WindowSpec{-1}, 2, 4), std::invalid_argument);
    const int bad[2] = {4, 0};
    CHECK_THROWS_AS(spatial_window(bad, r1, 2, 4), std::invalid_argument);
    CHECK_THROWS_AS(spatial_window(std::span<const int>(corner, 1), r1, 2, 4),
                    std::invalid_argument);
}

TEST_CASE("mirror_index reflects without repeating the edge sample")
{
    for (int j = 0; j < 5; ++j)
        CHECK(mirror_index(j, 5) == j);
    CHECK(mirror_index(-1, 5) == 1);
    CHECK(mirror_index(-2, 5) == 2);
    CHECK(mirror_index(5, 5) == 3);
    CHECK(mirror_index(6, 5) == 2);
    CHECK(mirror_index(-1, 1) == 0);
    CHECK(mirror_index(7, 1) == 0);
    CHECK(mirror_index(8, 4) == 2); // double reflection: 8 -> -2 -> 2
}

TEST_CASE("extract_patch: mirror-padded raster patches")
{
    ImageGrid y1;
    y1.dim = 1;
    y1.side = 3;
    y1.values = {1.0, 2.0, 3.0};

    CHECK(extract_patch(y1, 0, PatchSpec{1}) == std::vector<double>{1.0});
    CHECK(extract_patch(y1, 0, PatchSpec{3}) == std::vector<double>{2.0, 1.0, 2.0});
    CHECK(extract_patch(y1, 1, PatchSpec{3}) == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(extract_patch(y1, 2, PatchSpec{3}) == std::vector<double>{2.0, 3.0, 2.0});
    CHECK(extract_patch(y1, 1, PatchSpec{5}) == std::vector<double>{2.0, 1.0, 2.0, 3.0, 2.0});

    ImageGrid y2;
    y2.dim = 2;
    y2.side = 3;
    y2.values = {1, 2, 3, 4, 5, 6, 7, 8, 9};
    CHECK(extract_patch(y2, 4, PatchSpec{3}) == y2.values); // centered: the image itself
    CHECK(extract_patch(y2, 0, PatchSpec{3}) ==
          std::vector<double>{5, 4, 5, 2, 1, 2, 5, 4, 5});

    // A constant image yields constant patches whatever the padding does.
    ImageGrid c = ImageGrid::zeros(2, 4);
    for (double& v : c.values)
        v = 0.37;
    for (std::size_t i : {std::size_t{0}, std::size_t{5}, std::size_t{15}})
        for (double v : extract_patch(c, i, PatchSpec{5}))
            CHECK(v == 0.37);

    CHECK_THROWS_AS(extract_patch(y1, 0, PatchSpec{2}), std::invalid_argument); // even
    CHECK_THROWS_AS(extract_patch(y1, 0, PatchSpec{7}), std::invalid_argument); // > 2n-1
    CHECK_THROWS_AS(extract_patch(y1, 3, PatchSpec{3}), std::invalid_argument); // pixel OOR
}

TEST_CASE("photometric gates: closed thresholds")
{
    CHECK(yf_gate(0.50, 0.58, 0.10));
    CHECK_FALSE(yf_gate(0.50, 0.58, 0.05));
    CHECK(yf_gate(0.3, 0.4, 0.1 + 1e-15)); // boundary is an accept
    CHECK(yf_gate(0.7, 0.7, 0.0));
    CHECK_FALSE(yf_gate(0.7, 0.7 + 1e-12, 0.0));

    CHECK(nlm_avg_gate(0.50, 0.58, 0.10));
    CHECK_FALSE(nlm_avg_gate(0.10, 0.50, 0.29 * 20.0 / 255.0));
    CHECK(nlm_avg_gate(0.25, 0.5, 0.25));

    const std::vector<double> a{0.1, 0.2, 0.3, 0.4};
    std::vector<double> b = a;
    CHECK(nlm_euclid_gate(a, b, 0.0));
    b[2] += 0.5; // squared distance exactly 0.25
    CHECK(nlm_euclid_gate(a, b, 0.5));
    CHECK_FALSE(nlm_euclid_gate(a, b, 0.25));
}

TEST_CASE("nlm_euclid_gate: validation and early-exit consistency")
{
    const std::vector<double> a{0.1, 0.2};
    CHECK_THROWS_AS(nlm_euclid_gate(a, std::vector<double>{0.1}, 1.0), std::invalid_argument);

    std::mt19937 rng(42);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t len = 1 + rng() % 40;
        std::vector<double> p(len), q(len);
        for (std::size_t k = 0; k < len; ++k) {
            p[k] = unif(rng);
            q[k] = unif(rng);
        }
        double ssd = 0.0;
        for (std::size_t k = 0; k < len; ++k)
            ssd += (p[k] - q[k]) * (p[k] - q[k]);
        for (double scale : {0.5, 0.9, 1.1, 2.0}) {
            const double h = std::sqrt(ssd) * scale;
            if (std::abs(ssd - h * h) < 1e-12)
                continue; // skip knife-edge comparisons
            CHECK(nlm_euclid_gate(p, q, h) == (ssd <= h * h));
            CHECK(nlm_euclid_gate(p, q, h) == nlm_euclid_gate(q, p, h));
        }
    }
}

TEST_CASE("gate monotonicity in the threshold")
{
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double yi = unif(rng), yj = unif(rng), h = unif(rng) * 0.5;
        if (yf_gate(yi, yj, h))
            CHECK(yf_gate(yi, yj, 2.0 * h));
        CHECK(yf_gate(yi, yj, h) == yf_gate(yj, yi, h));
        if (nlm_avg_gate(yi, yj, h))
            CHECK(nlm_avg_gate(yi, yj, 2.0 * h));
    }
}

TEST_CASE("patch-distance acceptance matches the chi-square law")
{
    // Two independent noise patches of 49 pixels differ by a vector whose
    // squared norm is 2 sigma^2 * chi2(49). A threshold t sigma on the
    // unnormalized distance therefore accepts with probability
    // F_chi2(49, t^2/2) -- checked by Monte Carlo at two thresholds, one on
    // the flat upper tail and one near the median where errors in the
    // scaling convention would shift the rate drastically.
    const double sigma = 20.0 / 255.0;
    const int pairs = 30000, len = 49;
    std::mt19937_64 rng(20240817);
    std::normal_distribution<double> gauss(0.0, sigma);

    const double t_stock = 13.1;                  // the stock nlm threshold
    const double t_median = std::sqrt(2.0 * 49.0); // limit^2 = 2 sigma^2 * 49
    int acc_stock = 0, acc_median = 0;
    std::vector<double> p(len), q(len);
    for (int it = 0; it < pairs; ++it) {
        for (int k = 0; k < len; ++k) {
            p[k] = gauss(rng);
            q[k] = gauss(rng);
        }
        if (nlm_euclid_gate(p, q, t_stock * sigma))
            ++acc_stock;
        if (nlm_euclid_gate(p, q, t_median * sigma))
            ++acc_median;
    }

    const double want_stock = refs::chi2_cdf(49, 13.1 * 13.1 / 2.0);
    const double want_median = refs::chi2_cdf(49, 49.0);
    CHECK(want_stock > 0.995);
    CHECK(want_stock < 0.9999);
    CHECK(std::abs(static_cast<double>(acc_stock) / pairs - want_stock) <= 0.02);
    CHECK(std::abs(static_cast<double>(acc_median) / pairs - want_median) <= 0.02);
}

TEST_CASE("chi-square CDF oracle against closed forms")
{
    // dof 2: F(x) = 1 - exp(-x/2).
    for (double x : {0.1, 1.3, 4.0, 11.0})
        CHECK(refs::chi2_cdf(2, x) == doctest::Approx(1.0 - std::exp(-x / 2.0)).epsilon(1e-10));
    // dof 1: F(x) = erf(sqrt(x/2)).
    for (double x : {0.2, 1.0, 4.0})
        CHECK(refs::chi2_cdf(1, x) == doctest::Approx(std::erf(std::sqrt(x / 2.0))).epsilon(1e-10));
    CHECK(refs::chi2_cdf(49, 0.0) == 0.0);
    CHECK(refs::chi2_cdf(49, 1000.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(refs::chi2_cdf(49, 30.0) < refs::chi2_cdf(49, 50.0));
}

TEST_CASE("mo_gate compares membership bits")
{
    const std::vector<std::uint8_t> mask{1, 0, 1};
    CHECK(mo_gate(mask, 0, 2));
    CHECK_FALSE(mo_gate(mask, 0, 1));
    CHECK(mo_gate(mask, 1, 1));
}

TEST_CASE("boundary_distance: hand cases")
{
    CHECK(boundary_distance({1, 1, 1, 0}, 1, 4) == std::vector<int>{3, 2, 1, 1});
    CHECK(boundary_distance({1, 0}, 1, 2) == std::vector<int>{1, 1});

    const std::vector<int> inf4(16, kDistInf);
    CHECK(boundary_distance(std::vector<std::uint8_t>(16, 0), 2, 4) == inf4);
    CHECK(boundary_distance(std::vector<std::uint8_t>(16, 1), 2, 4) == inf4);

    // Single foreground pixel at the center of a 5x5 grid.
    std::vector<std::uint8_t> dot(25, 0);
    dot[2 * 5 + 2] = 1;
    const auto dist = boundary_distance(dot, 2, 5);
    CHECK(dist[2 * 5 + 2] == 1);  // the dot touches background immediately
    CHECK(dist[0] == 2);          // corner: chessboard distance to the dot
    CHECK(dist[2 * 5 + 0] == 2);
    CHECK(dist[1 * 5 + 1] == 1);

    CHECK_THROWS_AS(boundary_distance(std::vector<std::uint8_t>(15, 0), 2, 4),
                    std::invalid_argument);
}

TEST_CASE("boundary_distance agrees with the quadratic-scan reference")
{
    std::mt19937 rng(99);
    auto random_mask = [&](std::size_t len, double p) {
        std::vector<std::uint8_t> m(len);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (auto& b : m)
            b = unif(rng) < p ? 1 : 0;
        return m;
    };

    for (double p : {0.05, 0.2, 0.5, 0.8})
        for (int rep = 0; rep < 8; ++rep) {
            const auto m = random_mask(64, p);
            CHECK(boundary_distance(m, 2, 8) == refs::ref_boundary_distance(m, 2, 8));
        }
    for (int rep = 0; rep < 5; ++rep) {
        const auto m = random_mask(256, 0.3);
        CHECK(boundary_distance(m, 2, 16) == refs::ref_boundary_distance(m, 2, 16));
    }
    for (int rep = 0; rep < 10; ++rep) {
        const auto m = random_mask(17, 0.4);
        CHECK(boundary_distance(m, 1, 17) == refs::ref_boundary_distance(m, 1, 17));
    }
    for (int rep = 0; rep < 5; ++rep) {
        const auto m = random_mask(125, 0.5);
        CHECK(boundary_distance(m, 3, 5) == refs::ref_boundary_distance(m, 3, 5));
    }

    const Scene blob = make_blob(16, 0.6, 0.75, 0.15, {0.5, 0.5}, 0.25);
    CHECK(boundary_distance(blob.omega_mask, 2, 16) ==
          refs::ref_boundary_distance(blob.omega_mask, 2, 16));
    const Scene stripes = make_stripes(16, 1.0, 0.25, 0.5);
    CHECK(boundary_distance(stripes.omega_mask, 2, 16) ==
          refs::ref_boundary_distance(stripes.omega_mask, 2, 16));
}

TEST_CASE("bo_gate: strict inequality, infinite distance passes everything")
{
    CHECK(bo_gate(kDistInf, 0));
    CHECK(bo_gate(kDistInf, 1000000));
    CHECK(bo_gate(1, 0));        // a pixel always sees itself
    CHECK_FALSE(bo_gate(1, 1));  // boundary-adjacent pixel: only itself
    CHECK(bo_gate(3, 2));
    CHECK_FALSE(bo_gate(3, 3));  // strict: distance-3 pixel sees radius <= 2
}

TEST_SUITE_END();
