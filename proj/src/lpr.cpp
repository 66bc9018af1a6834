#include "kdn/lpr.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "kdn/require.hpp"

namespace kdn {

namespace {

// Exponent degree cap: keeps q and the power table small. Degrees above the
// exercised {0,1,2} remain available for experimentation.
constexpr int kMaxDegree = 8;

long long binomial(int n, int k)
{
    long long v = 1;
    for (int t = 1; t <= k; ++t)
        v = v * (n - k + t) / t;
    return v;
}

} // namespace

MonomialBasis basis(int dim, int degree)
{
    KDN_REQUIRE(dim >= 1 && dim <= kMaxDim, "basis: dim must be in [1," << kMaxDim << "]");
    KDN_REQUIRE(degree >= 0 && degree <= kMaxDegree,
                "basis: degree must be in [0," << kMaxDegree << "], got " << degree);
    MonomialBasis b;
    b.dim = dim;
    b.degree = degree;
    // Enumerate |s| <= degree by total degree, then lexicographically: for
    // each total t, odometer over exponent tuples summing to t.
    for (int total = 0; total <= degree; ++total) {
        MultiIndex s{};
        std::vector<MultiIndex> level;
        std::function<void(int, int)> gen = [&](int pos, int remaining) {
            if (pos == dim - 1) {
                s[pos] = remaining;
                level.push_back(s);
                return;
            }
            for (int e = 0; e <= remaining; ++e) {
                s[pos] = e;
                gen(pos + 1, remaining - e);
            }
        };
        gen(0, total);
        std::sort(level.begin(), level.end());
        for (const MultiIndex& m : level)
            b.exponents.push_back(m);
    }
    KDN_CHECK_RUNTIME(static_cast<long long>(b.exponents.size()) ==
                          binomial(degree + dim, dim),
                      "basis: enumeration does not match binomial(r+d,d)");
    return b;
}

void MonomialBasis::eval(const double* offset, double* out) const
{
    // Per-axis power table up to the degree, then products per exponent tuple.
    double pow_table[kMaxDim][kMaxDegree + 1];
    for (int k = 0; k < dim; ++k) {
        pow_table[k][0] = 1.0;
        for (int e = 1; e <= degree; ++e)
            pow_table[k][e] = pow_table[k][e - 1] * offset[k];
    }
    for (std::size_t t = 0; t < exponents.size(); ++t) {
        double v = 1.0;
        for (int k = 0; k < dim; ++k)
            v *= pow_table[k][exponents[t][k]];
        out[t] = v;
    }
}

void validate_lpr(const LprConfig& cfg)
{
    KDN_REQUIRE(cfg.r >= 0 && cfg.r <= kMaxDegree, "lpr degree r out of range: " << cfg.r);
    KDN_REQUIRE(cfg.ridge > 0.0, "lpr ridge must be > 0, got " << cfg.ridge);
}

LprSolver::LprSolver(int dim, const LprConfig& cfg)
    : basis_(basis(dim, cfg.r)), ridge_(cfg.ridge)
{
    validate_lpr(cfg);
    const std::size_t q = static_cast<std::size_t>(basis_.q());
    gram_.assign(q * q, 0.0);
    rhs_.assign(q, 0.0);
    mono_.assign(q, 0.0);
    chol_.assign(q * q, 0.0);
}

void LprSolver::reset()
{
    std::fill(gram_.begin(), gram_.end(), 0.0);
    std::fill(rhs_.begin(), rhs_.end(), 0.0);
    count_ = 0;
}

void LprSolver::add(const double* offset, double value)
{
    const int q = basis_.q();
    basis_.eval(offset, mono_.data());
    for (int a = 0; a < q; ++a) {
        const double ma = mono_[a];
        double* row = gram_.data() + static_cast<std::size_t>(a) * q;
        for (int b = a; b < q; ++b)
            row[b] += ma * mono_[b];
        rhs_[a] += ma * value;
    }
    ++count_;
}

double LprSolver::solve(double y_center, bool* fell_back)
{
    const int q = basis_.q();
    if (count_ < q) {
        if (fell_back)
            *fell_back = true;
        return y_center;
    }
    if (fell_back)
        *fell_back = false;

    // Cholesky factorization of the ridged Gram matrix (upper triangle was
    // accumulated; the matrix is symmetric positive definite for ridge > 0).
    double* c = chol_.data();
    for (int a = 0; a < q; ++a)
        for (int b = a; b < q; ++b)
            c[static_cast<std::size_t>(a) * q + b] =
                gram_[static_cast<std::size_t>(a) * q + b] + (a == b ? ridge_ : 0.0);
    for (int a = 0; a < q; ++a) {
        double* row_a = c + static_cast<std::size_t>(a) * q;
        for (int k = 0; k < a; ++k) {
            const double l = c[static_cast<std::size_t>(k) * q + a];
            const double* row_k = c + static_cast<std::size_t>(k) * q;
            for (int b = a; b < q; ++b)
                row_a[b] -= l * row_k[b];
        }
        KDN_CHECK_RUNTIME(row_a[a] > 0.0, "lpr solve: ridged normal matrix not positive "
                                          "definite (pivot " << row_a[a] << ")");
        const double inv = 1.0 / std::sqrt(row_a[a]);
        for (int b = a; b < q; ++b)
            row_a[b] *= inv;
    }
    // Forward substitution L^T z = rhs stored row-wise in the upper factor,
    // then back substitution L a = z; mono_ doubles as the solve scratch.
    double* z = mono_.data();
    for (int a = 0; a < q; ++a) {
        double v = rhs_[a];
        for (int k = 0; k < a; ++k)
            v -= c[static_cast<std::size_t>(k) * q + a] * z[k];
        z[a] = v / c[static_cast<std::size_t>(a) * q + a];
    }
    for (int a = q - 1; a >= 0; --a) {
        double v = z[a];
        const double* row_a = c + static_cast<std::size_t>(a) * q;
        for (int b = a + 1; b < q; ++b)
            v -= row_a[b] * z[b];
        z[a] = v / row_a[a];
    }
    return z[0];
}

double lpr_fit(std::span<const double> offsets, std::span<const std::uint8_t> weights,
               std::span<const double> values, int dim, const LprConfig& cfg, double y_center)
{
    validate_lpr(cfg);
    KDN_REQUIRE(dim >= 1 && dim <= kMaxDim, "lpr_fit: dim must be in [1," << kMaxDim << "]");
    KDN_REQUIRE(weights.size() == values.size() &&
                    offsets.size() == values.size() * static_cast<std::size_t>(dim),
                "lpr_fit: offsets/weights/values lengths disagree");
    LprSolver solver(dim, cfg);
    for (std::size_t j = 0; j < values.size(); ++j)
        if (weights[j])
            solver.add(offsets.data() + j * static_cast<std::size_t>(dim), values[j]);
    return solver.solve(y_center);
}

} // namespace kdn
