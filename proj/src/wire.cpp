#include "alens/wire.hpp"

#include <fstream>

#include <rapidjson/document.h>
#include <rapidjson/error/en.h>

#include "json.hpp"

#include "alens/errors.hpp"
#include "alens/hex.hpp"

namespace alens {

namespace {

[[noreturn]] void bad_record(std::string_view context, const std::string& what) {
    throw MalformedRecord(std::string(context) + ": " + what);
}

bool parse_fixed_hex(std::string_view text, uint8_t* out, size_t n) {
    if (text.size() != 2 + n * 2 || text[0] != '0' ||
        (text[1] != 'x' && text[1] != 'X'))
        return false;
    for (size_t i = 0; i < n; ++i) {
        int hi = hex_nibble(text[2 + i * 2]);
        int lo = hex_nibble(text[3 + i * 2]);
        if (hi < 0 || lo < 0)
            return false;
        out[i] = (uint8_t)(hi << 4 | lo);
    }
    return true;
}

std::string_view member_string(const rapidjson::Value& obj, const char* name,
                               std::string_view context) {
    auto it = obj.FindMember(name);
    if (it == obj.MemberEnd())
        bad_record(context, std::string("missing field '") + name + "'");
    if (!it->value.IsString())
        bad_record(context, std::string("field '") + name + "' must be a string");
    return {it->value.GetString(), it->value.GetStringLength()};
}

uint64_t member_uint(const rapidjson::Value& obj, const char* name,
                     std::string_view context) {
    auto it = obj.FindMember(name);
    if (it == obj.MemberEnd())
        bad_record(context, std::string("missing field '") + name + "'");
    if (!it->value.IsUint64())
        bad_record(context,
                   std::string("field '") + name + "' must be a non-negative integer");
    return it->value.GetUint64();
}

constexpr char kHexDigits[] = "0123456789abcdef";

void append_hex(std::string& out, const uint8_t* data, size_t n) {
    out += "0x";
    for (size_t i = 0; i < n; ++i) {
        out += kHexDigits[data[i] >> 4];
        out += kHexDigits[data[i] & 0xf];
    }
}

void append_addr(std::string& out, const Address& a) {
    append_hex(out, a.bytes.data(), a.bytes.size());
}

}  // namespace

std::string tx_hash_hex(const std::array<uint8_t, 32>& h) {
    std::string out;
    out.reserve(66);
    append_hex(out, h.data(), h.size());
    return out;
}

TxRecord parse_record(std::string& line, std::string_view context) {
    rapidjson::Document doc;
    doc.ParseInsitu(line.data());
    if (doc.HasParseError())
        bad_record(context, std::string("invalid JSON: ") +
                                rapidjson::GetParseError_En(doc.GetParseError()));
    if (!doc.IsObject())
        bad_record(context, "record must be a JSON object");

    TxRecord rec;

    auto hash_text = member_string(doc, "tx_hash", context);
    if (!parse_fixed_hex(hash_text, rec.tx_hash.data(), 32))
        bad_record(context, "field 'tx_hash' must be 0x + 64 hex digits");

    rec.block = member_uint(doc, "block", context);
    uint64_t index = member_uint(doc, "index", context);
    if (index > UINT32_MAX)
        bad_record(context, "field 'index' out of range");
    rec.index = (uint32_t)index;
    rec.nonce = member_uint(doc, "nonce", context);

    auto status = tx_status_from_string(member_string(doc, "status", context));
    if (!status)
        bad_record(context, "field 'status' must be \"ok\" or \"fail\"");
    rec.status = *status;

    auto frames_it = doc.FindMember("frames");
    if (frames_it == doc.MemberEnd())
        bad_record(context, "missing field 'frames'");
    if (!frames_it->value.IsArray() || frames_it->value.Empty())
        bad_record(context, "field 'frames' must be a non-empty array");

    rec.frames.reserve(frames_it->value.Size());
    for (const auto& fv : frames_it->value.GetArray()) {
        if (!fv.IsObject())
            bad_record(context, "frame must be a JSON object");
        CallFrame frame;
        if (!parse_fixed_hex(member_string(fv, "caller", context),
                             frame.caller.bytes.data(), 20))
            bad_record(context, "frame field 'caller' must be 0x + 40 hex digits");
        if (!parse_fixed_hex(member_string(fv, "callee", context),
                             frame.callee.bytes.data(), 20))
            bad_record(context, "frame field 'callee' must be 0x + 40 hex digits");

        auto input_text = member_string(fv, "input", context);
        if (input_text.size() < 2 || input_text[0] != '0' || input_text[1] != 'x' ||
            input_text.size() % 2 != 0)
            bad_record(context, "frame field 'input' must be 0x-prefixed hex");
        frame.input.resize((input_text.size() - 2) / 2);
        if (!frame.input.empty() &&
            !parse_fixed_hex(input_text, frame.input.data(), frame.input.size()))
            bad_record(context, "frame field 'input' must be 0x-prefixed hex");

        uint64_t depth = member_uint(fv, "depth", context);
        if (depth > UINT32_MAX)
            bad_record(context, "frame field 'depth' out of range");
        frame.depth = (uint32_t)depth;
        rec.frames.push_back(std::move(frame));
    }

    if (rec.frames[0].depth != 0)
        bad_record(context, "frames[0] must have depth 0");

    return rec;
}

std::string emit_record(const TxRecord& rec) {
    std::string out;
    out.reserve(160 + rec.frames.size() * 160);
    out += "{\"tx_hash\":\"";
    append_hex(out, rec.tx_hash.data(), rec.tx_hash.size());
    out += "\",\"block\":";
    out += std::to_string(rec.block);
    out += ",\"index\":";
    out += std::to_string(rec.index);
    out += ",\"nonce\":";
    out += std::to_string(rec.nonce);
    out += ",\"status\":\"";
    out += to_string(rec.status);
    out += "\",\"frames\":[";
    bool first = true;
    for (const auto& frame : rec.frames) {
        if (!first)
            out += ',';
        first = false;
        out += "{\"caller\":\"";
        append_addr(out, frame.caller);
        out += "\",\"callee\":\"";
        append_addr(out, frame.callee);
        out += "\",\"input\":\"";
        append_hex(out, frame.input.data(), frame.input.size());
        out += "\",\"depth\":";
        out += std::to_string(frame.depth);
        out += '}';
    }
    out += "]}";
    return out;
}

TokenRegistry load_registry(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw SourceUnavailable("registry: cannot open " + path);

    TokenRegistry reg;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        std::string where = path + ":" + std::to_string(lineno);

        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw MalformedRegistry(where + ": invalid JSON object");

        TokenInfo info;
        if (!j.contains("address") || !j["address"].is_string())
            throw MalformedRegistry(where + ": field 'address' must be a string");
        auto addr = address_from_hex(j["address"].get<std::string>());
        if (!addr)
            throw MalformedRegistry(where + ": field 'address' must be 0x + 40 hex digits");
        info.address = *addr;

        if (!j.contains("standard") || !j["standard"].is_string())
            throw MalformedRegistry(where + ": field 'standard' must be a string");
        auto std_tag = token_standard_from_string(j["standard"].get<std::string>());
        if (!std_tag)
            throw MalformedRegistry(where + ": unknown token standard");
        info.standard = *std_tag;

        if (j.contains("total_supply") && !j["total_supply"].is_null()) {
            if (!j["total_supply"].is_string())
                throw MalformedRegistry(where + ": 'total_supply' must be a decimal string or null");
            auto supply = u256_from_decimal(j["total_supply"].get<std::string>());
            if (!supply)
                throw MalformedRegistry(where + ": 'total_supply' is not a valid decimal amount");
            info.total_supply = *supply;
        }

        if (j.contains("decimals") && !j["decimals"].is_null()) {
            if (!j["decimals"].is_number_unsigned() || j["decimals"].get<uint64_t>() > 77)
                throw MalformedRegistry(where + ": 'decimals' must be an integer in [0,77]");
            info.decimals = (uint32_t)j["decimals"].get<uint64_t>();
        }

        if (reg.contains(info.address))
            throw DuplicateToken(where + ": duplicate token " + to_hex(info.address));
        reg.emplace(info.address, std::move(info));
    }
    return reg;
}

std::string emit_registry_line(const TokenInfo& info) {
    std::string out;
    out.reserve(160);
    out += "{\"address\":\"";
    append_addr(out, info.address);
    out += "\",\"standard\":\"";
    out += to_string(info.standard);
    out += "\",\"total_supply\":";
    if (info.total_supply) {
        out += '"';
        out += to_decimal(*info.total_supply);
        out += '"';
    } else {
        out += "null";
    }
    out += ",\"decimals\":";
    out += info.decimals ? std::to_string(*info.decimals) : "null";
    out += '}';
    return out;
}

namespace {

void append_dump_tail(std::string& out, const ChainPos& pos,
                      const std::array<uint8_t, 32>& tx) {
    out += "\",\"block\":";
    out += std::to_string(pos.block);
    out += ",\"index\":";
    out += std::to_string(pos.index);
    out += ",\"tx\":\"";
    append_hex(out, tx.data(), tx.size());
    out += "\"}";
}

}  // namespace

std::string emit_event_dump(const ApprovalEvent& ev) {
    std::string out;
    out.reserve(320);
    out += "{\"type\":\"approve\",\"token\":\"";
    append_addr(out, ev.token);
    out += "\",\"owner\":\"";
    append_addr(out, ev.owner);
    out += "\",\"spender\":\"";
    append_addr(out, ev.spender);
    out += "\",\"amount\":\"";
    out += to_decimal(ev.amount);
    out += "\",\"kind\":\"";
    out += to_string(ev.kind);
    append_dump_tail(out, ev.pos, ev.tx_hash);
    return out;
}

std::string emit_event_dump(const ExecutionEvent& ev) {
    std::string out;
    out.reserve(320);
    out += "{\"type\":\"exec\",\"token\":\"";
    append_addr(out, ev.token);
    out += "\",\"owner\":\"";
    append_addr(out, ev.owner);
    out += "\",\"spender\":\"";
    append_addr(out, ev.spender);
    out += "\",\"receiver\":\"";
    append_addr(out, ev.receiver);
    out += "\",\"amount\":\"";
    out += to_decimal(ev.amount);
    append_dump_tail(out, ev.pos, ev.tx_hash);
    return out;
}

std::string emit_event_dump(const TransferEvent& ev) {
    std::string out;
    out.reserve(280);
    out += "{\"type\":\"transfer\",\"token\":\"";
    append_addr(out, ev.token);
    out += "\",\"from\":\"";
    append_addr(out, ev.from);
    out += "\",\"to\":\"";
    append_addr(out, ev.to);
    out += "\",\"amount\":\"";
    out += to_decimal(ev.amount);
    append_dump_tail(out, ev.pos, ev.tx_hash);
    return out;
}

}  // namespace alens
