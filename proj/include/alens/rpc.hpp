#pragma once

// Corpus fetcher: pulls blocks, receipts, and call traces from an Ethereum
// node over JSON-RPC and writes them as a corpus file. Fetches are batched,
// retried with capped exponential backoff, and resumable through a
// checkpoint file that records the last fully written block.

#include <cstdint>
#include <string>

namespace alens {

struct FetchConfig {
    std::string endpoint;  // e.g. "http://127.0.0.1:8545" or ".../rpc/v1"
    uint64_t from_block = 0;
    uint64_t to_block = 0;
    std::string out_path;
    // Empty means out_path + ".ckpt".
    std::string checkpoint_path;
    // Blocks per JSON-RPC batch request (3 calls per block).
    uint32_t batch_size = 16;
    // Transport retries after the first attempt.
    uint32_t max_retries = 5;
    uint32_t initial_backoff_ms = 200;
    uint32_t max_backoff_ms = 5000;
    uint32_t timeout_seconds = 30;
};

struct FetchStats {
    uint64_t blocks_fetched = 0;   // fetched by this run (excludes resumed)
    uint64_t records_written = 0;  // written by this run
    uint64_t retries = 0;          // transport retries that were needed
    bool resumed = false;          // a valid checkpoint skipped some prefix
};

/// Writes every transaction of blocks [from_block, to_block] to out_path in
/// the corpus line format. An empty range (from > to) writes an empty file
/// and succeeds. If a checkpoint for the same from_block exists, the corpus
/// is truncated to the checkpointed prefix and the fetch continues after it,
/// so an interrupted run resumed yields a byte-identical corpus.
/// Throws ConfigError (bad parameters), TraceUnsupported (node lacks the
/// call tracer), NetworkError (transport failure after retries, or a
/// malformed node reply), SourceUnavailable (local file I/O).
FetchStats fetch_via_rpc(const FetchConfig& config);

}  // namespace alens
