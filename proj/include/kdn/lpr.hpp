#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kdn/grid.hpp"

namespace kdn {

// Monomial exponent basis for degree-r polynomials in d variables: all
// multi-indices s with |s| <= r in graded lexicographic order, constant term
// first; q = binomial(r+d, d) entries.
struct MonomialBasis {
    int dim = 0;
    int degree = 0;
    std::vector<MultiIndex> exponents;

    int q() const { return static_cast<int>(exponents.size()); }

    // Evaluate all monomials offset^s into out (length q).
    void eval(const double* offset, double* out) const;
};

MonomialBasis basis(int dim, int degree);

// Ridge-stabilized weighted least squares configuration. The fallback is
// passthrough: when fewer active points than basis functions, the estimate
// is the center observation itself.
struct LprConfig {
    int r = 0;            // polynomial degree, {0,1,2} exercised
    double ridge = 1e-8;  // added to the diagonal of X^T X
};

void validate_lpr(const LprConfig& cfg);

// Streaming per-pixel weighted-least-squares accumulator: feed active
// (offset, value) pairs, then solve for the intercept. Scratch buffers are
// reused across solves, so the per-pixel loop performs no allocation; use
// one instance per worker thread.
class LprSolver {
public:
    LprSolver(int dim, const LprConfig& cfg);

    void reset();
    // Add one active sample; offset = (x_j - x_i), length dim.
    void add(const double* offset, double value);
    int active() const { return count_; }

    // Intercept of the ridged normal-equation solve, or y_center when the
    // active count is below q (fallback). Sets *fell_back accordingly.
    double solve(double y_center, bool* fell_back = nullptr);

    const MonomialBasis& monomials() const { return basis_; }

private:
    MonomialBasis basis_;
    double ridge_;
    int count_ = 0;
    std::vector<double> gram_;  // q x q, upper triangle accumulated
    std::vector<double> rhs_;   // q
    std::vector<double> mono_;  // q scratch
    std::vector<double> chol_;  // q x q factor scratch
};

// One-shot fit over explicit 0/1-weighted samples: solves
// (X^T X + ridge I) a = X^T y over rows with weight 1 and returns a_0;
// returns y_center when fewer than q rows are active. offsets is row-major
// m x dim, in continuous units (pixel offset / n). The caller clips.
double lpr_fit(std::span<const double> offsets, std::span<const std::uint8_t> weights,
               std::span<const double> values, int dim, const LprConfig& cfg, double y_center);

inline double clip01(double v)
{
    return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
}

} // namespace kdn
