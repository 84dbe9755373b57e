#pragma once

// Streaming corpus reader. Emits records in strictly ascending
// (block, tx_index) order while holding at most reorder_window + 1 records,
// so corpora never need to fit in memory. Input may be shuffled as long as
// no record is displaced more than reorder_window positions from its sorted
// place.

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "alens/types.hpp"

namespace alens {

struct CorpusOptions {
    uint64_t from_block = 0;
    uint64_t to_block = UINT64_MAX;
    /// Records buffered for re-sorting shuffled input.
    size_t reorder_window = 1 << 16;
};

class RecordStream {
  public:
    /// Files are read in the given order as one logical corpus.
    /// Throws SourceUnavailable if any path cannot be opened.
    explicit RecordStream(std::vector<std::string> paths, CorpusOptions options = {});

    /// Next record in canonical order, or nullopt at end of corpus.
    /// Throws MalformedRecord, OrderViolation, ReorderWindowExceeded.
    std::optional<TxRecord> next();

    /// Records emitted so far.
    uint64_t records_seen() const { return records_seen_; }

  private:
    std::optional<TxRecord> read_raw();
    TxRecord take_checked(TxRecord rec);

    std::vector<std::string> paths_;
    CorpusOptions options_;
    size_t file_idx_ = 0;
    std::ifstream in_;
    std::string line_;
    size_t lineno_ = 0;
    bool exhausted_ = false;

    std::vector<TxRecord> heap_;  // min-heap on (block, index)
    std::optional<ChainPos> last_emitted_;
    uint64_t records_seen_ = 0;
};

}  // namespace alens
