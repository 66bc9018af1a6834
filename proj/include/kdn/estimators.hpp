#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kdn/grid.hpp"
#include "kdn/kernels.hpp"
#include "kdn/lpr.hpp"

namespace kdn {

enum class MethodFamily { LF, YF, NLM, NlmAvg, MO, BO };

std::string family_name(MethodFamily family);
MethodFamily parse_family(const std::string& name);

// Full estimator description: spatial window, optional patch and photometric
// gates, and the per-pixel regression degree/ridge.
//  - LF and BO carry neither patch nor photometric spec.
//  - YF carries a photometric spec only.
//  - NLM / NLM-average carry both patch and photometric specs.
//  - MO may carry a photometric spec: it is used only when the oracle gates
//    on true pixel values rather than on a membership mask.
//  - BO interprets window.radius_px as the MAXIMAL bandwidth: the effective
//    radius at pixel i is min(radius_px, boundary_distance(i) - 1).
struct MethodConfig {
    MethodFamily family = MethodFamily::LF;
    WindowSpec window;
    std::optional<PatchSpec> patch;
    std::optional<PhotometricSpec> photometric;
    LprConfig lpr;
};

void validate_method(const MethodConfig& cfg);

// Oracle side information for MO/BO. MO uses exactly one of:
//  - mask: gate passes iff both pixels share membership;
//  - truth: gate passes iff |truth_i - truth_j| <= photometric h_y
//    (the oracle that reads the original image to compute weights).
// BO requires mask.
struct OracleInputs {
    const std::vector<std::uint8_t>* mask = nullptr;
    const ImageGrid* truth = nullptr;
};

struct RunOptions {
    int threads = 0; // 0 = KDN_THREADS env var, else hardware concurrency
    // NLM patch rows are precomputed when they fit under this many bytes;
    // otherwise patches are recomputed on the fly (slower, same result).
    std::size_t patch_memory_cap_bytes = std::size_t{256} << 20;
};

struct ActiveStats {
    std::size_t min_size = 0;
    std::size_t max_size = 0;
    double mean_size = 0.0;
};

struct DenoiseResult {
    ImageGrid estimate; // clipped to [0,1]
    std::size_t fallback_count = 0;
    ActiveStats active;
};

// Run one estimator over the whole grid: per pixel, gather the spatial
// window, apply the family's gate, fit the local polynomial, clip. Gates for
// NLM families compare patches of the noisy input itself; oracle gates use
// the side information only. Bit-reproducible for any thread count.
DenoiseResult denoise(const ImageGrid& y, const MethodConfig& cfg,
                      const OracleInputs& oracle = {}, const RunOptions& opt = {});

// Active set {j in window : gate(i,j)} of a single pixel, for diagnostics
// and gate-agreement studies; raster order, always contains i.
std::vector<std::size_t> active_set(const ImageGrid& y, const MethodConfig& cfg,
                                    std::size_t pixel, const OracleInputs& oracle = {});

// Benchmark defaults: window side from the tuned bandwidth table at the
// nearest sigma column in {5,20,50,100} (0-255 scale, ties toward the lower
// column), photometric thresholds sqrt(10)*sigma (YF), 13.1*sigma (NLM),
// 0.29*sigma (NLM-average), 30/255 absolute (value-gated MO), patch side 7.
MethodConfig default_bandwidths(MethodFamily family, double sigma255, int r);

} // namespace kdn
