#pragma once

#include <stdexcept>
#include <string>

namespace erl {

/// Riemann data whose wave curves do not meet at positive density.
struct VacuumFormation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Solver density dropped below the breakdown floor.
struct VacuumBreakdown : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Time step collapsed below the resolvable scale.
struct CflCollapse : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Classical short-time solve could not avoid characteristic crossing.
struct CharacteristicCrossing : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SnapshotError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MagicMismatch : SnapshotError {
    using SnapshotError::SnapshotError;
};
struct VersionMismatch : SnapshotError {
    using SnapshotError::SnapshotError;
};
struct TruncatedPayload : SnapshotError {
    using SnapshotError::SnapshotError;
};
struct NanDensity : SnapshotError {
    using SnapshotError::SnapshotError;
};

/// Configuration rejected at parse or validation time. The message names the
/// offending key and the violated constraint.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace erl
