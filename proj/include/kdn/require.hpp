#pragma once

#include <sstream>
#include <stdexcept>

// Argument/state validation helpers. KDN_REQUIRE throws std::invalid_argument
// (bad caller input, including unusable input files; CLI exit code 2).
// KDN_CHECK_RUNTIME throws std::runtime_error (broken internal invariant,
// CLI exit code 1).
// The message argument may use ostream chaining: KDN_REQUIRE(n > 0, "n=" << n).

#define KDN_REQUIRE(cond, msg)                 \
    do {                                       \
        if (!(cond)) {                         \
            std::ostringstream oss_;           \
            oss_ << msg;                       \
            throw std::invalid_argument(oss_.str()); \
        }                                      \
    } while (0)

#define KDN_CHECK_RUNTIME(cond, msg)           \
    do {                                       \
        if (!(cond)) {                         \
            std::ostringstream oss_;           \
            oss_ << msg;                       \
            throw std::runtime_error(oss_.str()); \
        }                                      \
    } while (0)
