#include "alens/decode.hpp"

namespace alens {

std::optional<uint32_t> frame_selector(const CallFrame& frame) {
    if (frame.input.size() < 4)
        return std::nullopt;
    return (uint32_t)frame.input[0] << 24 | (uint32_t)frame.input[1] << 16 |
           (uint32_t)frame.input[2] << 8 | (uint32_t)frame.input[3];
}

U256 default_unlimited_threshold() {
    U256 v;
    v.limbs = {0, 0, 0, 1ull << 56};  // 2^248
    return v;
}

ApprovalKind classify_approval(const U256& amount,
                               const std::optional<U256>& total_supply,
                               const UaConfig& config) {
    if (amount.is_zero())
        return ApprovalKind::Zero;
    if (amount.is_max())
        return ApprovalKind::Unlimited;
    if (total_supply && amount == *total_supply)
        return ApprovalKind::Unlimited;
    if (config.mode == UnlimitedMode::Threshold && amount >= config.threshold)
        return ApprovalKind::Unlimited;
    return ApprovalKind::Other;
}

namespace {

// Calldata layout: 4 selector bytes, then 32-byte argument words. Addresses
// occupy the low 20 bytes of their word. Extra trailing bytes are ignored;
// missing bytes make the frame malformed.
constexpr size_t kArgBase = 4;
constexpr size_t kWord = 32;

size_t args_needed(size_t words) {
    return kArgBase + words * kWord;
}

Address arg_address(const std::vector<uint8_t>& input, size_t word) {
    Address a;
    const uint8_t* src = input.data() + kArgBase + word * kWord + 12;
    std::copy(src, src + 20, a.bytes.begin());
    return a;
}

U256 arg_amount(const std::vector<uint8_t>& input, size_t word) {
    return u256_from_be(
        std::span<const uint8_t, 32>(input.data() + kArgBase + word * kWord, 32));
}

void bump(DecodeStats* stats, uint64_t DecodeStats::*counter) {
    if (stats)
        ++(stats->*counter);
}

std::optional<ExecutionEvent> execution_from_frame(const TxRecord& rec,
                                                   const CallFrame& frame,
                                                   DecodeStats* stats) {
    if (frame.input.size() < args_needed(3)) {
        bump(stats, &DecodeStats::malformed_calldata);
        return std::nullopt;
    }
    ExecutionEvent ev;
    ev.pos = {rec.block, rec.index};
    ev.tx_hash = rec.tx_hash;
    ev.token = frame.callee;
    ev.spender = frame.caller;
    ev.owner = arg_address(frame.input, 0);
    ev.receiver = arg_address(frame.input, 1);
    ev.amount = arg_amount(frame.input, 2);
    return ev;
}

std::optional<TransferEvent> transfer_from_frame(const TxRecord& rec,
                                                 const CallFrame& frame,
                                                 DecodeStats* stats) {
    if (frame.input.size() < args_needed(2)) {
        bump(stats, &DecodeStats::malformed_calldata);
        return std::nullopt;
    }
    TransferEvent ev;
    ev.pos = {rec.block, rec.index};
    ev.tx_hash = rec.tx_hash;
    ev.token = frame.callee;
    ev.from = frame.caller;
    ev.to = arg_address(frame.input, 0);
    ev.amount = arg_amount(frame.input, 1);
    return ev;
}

std::optional<ApprovalEvent> approval_from_frame(const TxRecord& rec,
                                                 const CallFrame& frame,
                                                 const TokenRegistry& registry,
                                                 const UaConfig& ua,
                                                 DecodeStats* stats) {
    if (frame.input.size() < args_needed(2)) {
        bump(stats, &DecodeStats::malformed_calldata);
        return std::nullopt;
    }
    auto meta = registry.find(frame.callee);
    if (meta != registry.end() && meta->second.standard == TokenStandard::Erc721) {
        bump(stats, &DecodeStats::erc721_filtered);
        return std::nullopt;
    }
    ApprovalEvent ev;
    ev.pos = {rec.block, rec.index};
    ev.tx_hash = rec.tx_hash;
    ev.token = frame.callee;
    ev.owner = frame.caller;
    ev.spender = arg_address(frame.input, 0);
    ev.amount = arg_amount(frame.input, 1);
    std::optional<U256> supply;
    if (meta != registry.end())
        supply = meta->second.total_supply;
    ev.kind = classify_approval(ev.amount, supply, ua);
    return ev;
}

void count_internal_approvals(const TxRecord& rec, DecodeStats* stats) {
    if (!stats)
        return;
    for (size_t i = 1; i < rec.frames.size(); ++i)
        if (frame_selector(rec.frames[i]) == kApproveSelector)
            ++stats->internal_approvals;
}

}  // namespace

std::optional<ApprovalEvent> decode_approve(const TxRecord& rec,
                                            const TokenRegistry& registry,
                                            const UaConfig& ua, DecodeStats* stats) {
    count_internal_approvals(rec, stats);
    if (frame_selector(rec.frames[0]) != kApproveSelector)
        return std::nullopt;
    return approval_from_frame(rec, rec.frames[0], registry, ua, stats);
}

std::vector<ExecutionEvent> decode_execution(const TxRecord& rec, DecodeStats* stats) {
    std::vector<ExecutionEvent> out;
    for (const auto& frame : rec.frames) {
        if (frame_selector(frame) != kTransferFromSelector)
            continue;
        if (auto ev = execution_from_frame(rec, frame, stats))
            out.push_back(std::move(*ev));
    }
    return out;
}

std::vector<TransferEvent> decode_transfer(const TxRecord& rec, DecodeStats* stats) {
    std::vector<TransferEvent> out;
    for (const auto& frame : rec.frames) {
        if (frame_selector(frame) != kTransferSelector)
            continue;
        if (auto ev = transfer_from_frame(rec, frame, stats))
            out.push_back(std::move(*ev));
    }
    return out;
}

std::vector<DecodedEvent> Decoder::decode(const TxRecord& rec) {
    std::vector<DecodedEvent> out;
    if (rec.status == TxStatus::Fail && !config_.include_failed) {
        ++stats_.failed_skipped;
        return out;
    }
    for (size_t i = 0; i < rec.frames.size(); ++i) {
        const CallFrame& frame = rec.frames[i];
        auto sel = frame_selector(frame);
        if (!sel)
            continue;
        if (*sel == kApproveSelector) {
            if (i != 0) {
                ++stats_.internal_approvals;
                continue;
            }
            if (auto ev = approval_from_frame(rec, frame, *registry_, config_.ua,
                                              &stats_))
                out.emplace_back(std::move(*ev));
        } else if (*sel == kTransferFromSelector) {
            if (auto ev = execution_from_frame(rec, frame, &stats_))
                out.emplace_back(std::move(*ev));
        } else if (*sel == kTransferSelector) {
            if (auto ev = transfer_from_frame(rec, frame, &stats_))
                out.emplace_back(std::move(*ev));
        }
    }
    return out;
}

}  // namespace alens
