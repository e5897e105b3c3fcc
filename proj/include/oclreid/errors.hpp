#ifndef OCLREID_ERRORS_HPP
#define OCLREID_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace oclreid {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// part_distance with no mutually visible part.
struct DistanceUndefinedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Triplet mining needs at least one positive and one negative.
struct MiningImpossibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Confidence denominator is zero (no part both visible and trained).
struct ConfidenceUnavailableError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Replay sampling cannot produce a trainable batch.
struct ReplayUnavailableError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Keyframe loss not evaluable this period.
struct KeyframeUndecidableError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ContractViolationError : std::logic_error {
    using std::logic_error::logic_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace oclreid

#endif
