#pragma once

// Line-oriented serialization: corpus records, the token registry, and the
// decoded-event diagnostic dump. One JSON object per line throughout.

#include <string>
#include <string_view>

#include "alens/types.hpp"

namespace alens {

/// Parses one corpus line. The buffer is modified (in-situ parse) and must
/// stay alive for the duration of the call only. `context` (e.g.
/// "path:lineno") prefixes error messages.
/// Throws MalformedRecord.
TxRecord parse_record(std::string& line, std::string_view context = {});

/// Canonical corpus line for a record, without the trailing newline.
/// parse_record(emit_record(r)) == r for any valid record.
std::string emit_record(const TxRecord& rec);

/// Loads a registry file (one JSON object per line; blank lines ignored).
/// Throws MalformedRegistry, DuplicateToken, SourceUnavailable.
TokenRegistry load_registry(const std::string& path);

/// One registry line (no trailing newline); load_registry reads it back
/// unchanged.
std::string emit_registry_line(const TokenInfo& info);

/// Decoded-event dump lines (no trailing newline). All three share one
/// tagged shape so a single file can carry a mixed stream.
std::string emit_event_dump(const ApprovalEvent& ev);
std::string emit_event_dump(const ExecutionEvent& ev);
std::string emit_event_dump(const TransferEvent& ev);

std::string tx_hash_hex(const std::array<uint8_t, 32>& h);

}  // namespace alens
