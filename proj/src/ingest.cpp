#include "alens/ingest.hpp"

#include <algorithm>

#include "alens/errors.hpp"
#include "alens/wire.hpp"

namespace alens {

namespace {

// Min-heap on chain position (std::*_heap builds a max-heap, so invert).
struct LaterPos {
    bool operator()(const TxRecord& a, const TxRecord& b) const {
        return ChainPos{b.block, b.index} < ChainPos{a.block, a.index};
    }
};

}  // namespace

RecordStream::RecordStream(std::vector<std::string> paths, CorpusOptions options)
    : paths_(std::move(paths)), options_(options) {
    // Probe every path up front so a bad argument fails before any work.
    for (const auto& p : paths_) {
        std::ifstream probe(p);
        if (!probe)
            throw SourceUnavailable("corpus: cannot open " + p);
    }
    exhausted_ = paths_.empty();
}

// Pulls the next in-range record from the files, ignoring order.
std::optional<TxRecord> RecordStream::read_raw() {
    while (true) {
        if (!in_.is_open()) {
            if (file_idx_ >= paths_.size())
                return std::nullopt;
            in_.open(paths_[file_idx_]);
            if (!in_)
                throw SourceUnavailable("corpus: cannot open " + paths_[file_idx_]);
            lineno_ = 0;
        }
        if (!std::getline(in_, line_)) {
            in_.close();
            ++file_idx_;
            continue;
        }
        ++lineno_;
        if (line_.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        std::string context = paths_[file_idx_] + ":" + std::to_string(lineno_);
        TxRecord rec = parse_record(line_, context);
        if (rec.block < options_.from_block || rec.block > options_.to_block)
            continue;
        return rec;
    }
}

// Enforces ordering against the last emitted position, then emits.
TxRecord RecordStream::take_checked(TxRecord rec) {
    ChainPos pos{rec.block, rec.index};
    if (last_emitted_) {
        if (pos == *last_emitted_)
            throw OrderViolation("corpus: duplicate position block " +
                                 std::to_string(pos.block) + " index " +
                                 std::to_string(pos.index));
        if (pos < *last_emitted_)
            throw ReorderWindowExceeded(
                "corpus: record at block " + std::to_string(pos.block) + " index " +
                std::to_string(pos.index) +
                " was displaced past the reorder window (" +
                std::to_string(options_.reorder_window) + " records)");
    }
    last_emitted_ = pos;
    ++records_seen_;
    return rec;
}

std::optional<TxRecord> RecordStream::next() {
    while (!exhausted_ && heap_.size() <= options_.reorder_window) {
        auto rec = read_raw();
        if (!rec) {
            exhausted_ = true;
            break;
        }
        heap_.push_back(std::move(*rec));
        std::push_heap(heap_.begin(), heap_.end(), LaterPos{});
    }
    if (heap_.empty())
        return std::nullopt;
    std::pop_heap(heap_.begin(), heap_.end(), LaterPos{});
    TxRecord out = std::move(heap_.back());
    heap_.pop_back();
    return take_checked(std::move(out));
}

}  // namespace alens
