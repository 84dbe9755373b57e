#pragma once

#include <stdexcept>
#include <string>

namespace alens {

/// Base for all toolkit errors so callers can catch the whole family.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A corpus line could not be parsed (bad JSON, bad hex, missing field,
/// missing depth-0 frame). Message carries source path and 1-based line.
struct MalformedRecord : Error {
    using Error::Error;
};

/// A registry line could not be parsed.
struct MalformedRegistry : Error {
    using Error::Error;
};

/// The same token address appeared twice in a registry file.
struct DuplicateToken : Error {
    using Error::Error;
};

/// Corpus file missing or unreadable.
struct SourceUnavailable : Error {
    using Error::Error;
};

/// Two records share a (block, tx_index) position, or an event was applied
/// behind the ledger cursor.
struct OrderViolation : Error {
    using Error::Error;
};

/// Input was shuffled further than the reorder buffer can absorb.
struct ReorderWindowExceeded : Error {
    using Error::Error;
};

/// A debit could not be satisfied under the halt policy.
struct InsufficientState : Error {
    using Error::Error;
};

/// A statistic was requested for a token the snapshot does not contain.
struct TokenAbsent : Error {
    using Error::Error;
};

/// Generator parameters cannot be satisfied (e.g. more transactions than
/// blocks can hold, or more tuples than distinct address combinations).
struct InfeasibleSpec : Error {
    using Error::Error;
};

/// Brute-force behavior checking is capped; longer inputs must use the
/// production checker.
struct SequenceTooLong : Error {
    using Error::Error;
};

/// Behavior classification needs at least one event.
struct EmptySequence : Error {
    using Error::Error;
};

/// Invalid CLI/config combination. Maps to exit code 2.
struct ConfigError : Error {
    using Error::Error;
};

/// Remote node does not support a required trace method.
struct TraceUnsupported : Error {
    using Error::Error;
};

/// Transport-level RPC failure after retries were exhausted.
struct NetworkError : Error {
    using Error::Error;
};

}  // namespace alens
