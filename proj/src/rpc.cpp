#include "alens/rpc.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string_view>
#include <thread>
#include <vector>

#include "httplib.h"
#include "json.hpp"

#include "alens/address.hpp"
#include "alens/errors.hpp"
#include "alens/hex.hpp"
#include "alens/types.hpp"
#include "alens/wire.hpp"

namespace alens {
namespace {

using nlohmann::json;

struct Endpoint {
    std::string base;  // scheme://host:port
    std::string path;  // always starts with '/'
};

Endpoint split_endpoint(const std::string& url) {
    auto scheme = url.find("://");
    if (scheme == std::string::npos || scheme == 0)
        throw ConfigError("endpoint must be a URL like http://host:port, got: " + url);
    auto slash = url.find('/', scheme + 3);
    if (slash == scheme + 3)
        throw ConfigError("endpoint has no host: " + url);
    if (slash == std::string::npos)
        return {url, "/"};
    return {url.substr(0, slash), url.substr(slash)};
}

std::string hex_quantity(uint64_t n) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "0x%llx", static_cast<unsigned long long>(n));
    return buf;
}

uint64_t quantity_field(const json& v, const char* what) {
    if (!v.is_string())
        throw NetworkError(std::string("node reply: ") + what + " is not a hex quantity");
    std::string_view s = v.get_ref<const std::string&>();
    if (s.size() < 3 || s[0] != '0' || s[1] != 'x')
        throw NetworkError(std::string("node reply: bad hex quantity in ") + what);
    uint64_t out = 0;
    for (char c : s.substr(2)) {
        int nib = hex_nibble(c);
        if (nib < 0 || out > (UINT64_MAX >> 4))
            throw NetworkError(std::string("node reply: bad hex quantity in ") + what);
        out = out << 4 | static_cast<uint64_t>(nib);
    }
    return out;
}

Address address_field(const json& v, const char* what) {
    if (v.is_null())
        return kZeroAddress;  // contract creation has no callee
    if (!v.is_string())
        throw NetworkError(std::string("node reply: ") + what + " is not an address");
    auto a = address_from_hex(v.get_ref<const std::string&>());
    if (!a)
        throw NetworkError(std::string("node reply: bad address in ") + what);
    return *a;
}

std::vector<uint8_t> bytes_field(const json& v, const char* what) {
    if (v.is_null())
        return {};
    if (!v.is_string())
        throw NetworkError(std::string("node reply: ") + what + " is not hex data");
    auto b = bytes_from_hex(v.get_ref<const std::string&>());
    if (!b)
        throw NetworkError(std::string("node reply: bad hex data in ") + what);
    return std::move(*b);
}

std::array<uint8_t, 32> hash_field(const json& v, const char* what) {
    if (!v.is_string())
        throw NetworkError(std::string("node reply: ") + what + " is not a hash");
    auto b = bytes_from_hex(v.get_ref<const std::string&>());
    if (!b || b->size() != 32)
        throw NetworkError(std::string("node reply: bad 32-byte hash in ") + what);
    std::array<uint8_t, 32> out{};
    std::copy(b->begin(), b->end(), out.begin());
    return out;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z')
            c = static_cast<char>(c - 'A' + 'a');
    return out;
}

// Depth-first flatten of a call-tracer frame tree.
void flatten_frames(const json& node, uint32_t depth, std::vector<CallFrame>& out) {
    CallFrame f;
    f.caller = address_field(node.contains("from") ? node["from"] : json(), "trace frame from");
    f.callee = address_field(node.contains("to") ? node["to"] : json(), "trace frame to");
    f.input = bytes_field(node.contains("input") ? node["input"] : json(), "trace frame input");
    f.depth = depth;
    out.push_back(std::move(f));
    if (node.contains("calls") && node["calls"].is_array())
        for (const auto& child : node["calls"])
            flatten_frames(child, depth + 1, out);
}

class RpcClient {
  public:
    explicit RpcClient(const FetchConfig& config)
        : config_(config), endpoint_(split_endpoint(config.endpoint)), http_(endpoint_.base) {
        http_.set_connection_timeout(config.timeout_seconds, 0);
        http_.set_read_timeout(config.timeout_seconds, 0);
        http_.set_write_timeout(config.timeout_seconds, 0);
        http_.set_keep_alive(true);
    }

    /// One block's records, index-sorted; outer vector runs lo..hi.
    std::vector<std::vector<TxRecord>> fetch_blocks(uint64_t lo, uint64_t hi, uint64_t& retries) {
        json batch = json::array();
        uint64_t count = hi - lo + 1;
        for (uint64_t i = 0; i < count; ++i) {
            std::string tag = hex_quantity(lo + i);
            batch.push_back(request(3 * i + 1, "eth_getBlockByNumber", json::array({tag, true})));
            batch.push_back(request(3 * i + 2, "eth_getBlockReceipts", json::array({tag})));
            batch.push_back(request(3 * i + 3, "debug_traceBlockByNumber",
                                    json::array({tag, json{{"tracer", "callTracer"}}})));
        }
        json reply = post_with_retries(batch, retries);
        std::map<int64_t, const json*> by_id;
        for (const auto& r : reply)
            if (r.is_object() && r.contains("id") && r["id"].is_number_integer())
                by_id[r["id"].get<int64_t>()] = &r;
        std::vector<std::vector<TxRecord>> out;
        out.reserve(count);
        for (uint64_t i = 0; i < count; ++i) {
            const json& blk = result_of(by_id, 3 * i + 1, "eth_getBlockByNumber", false);
            const json& receipts = result_of(by_id, 3 * i + 2, "eth_getBlockReceipts", false);
            const json& traces = result_of(by_id, 3 * i + 3, "debug_traceBlockByNumber", true);
            out.push_back(build_block(lo + i, blk, receipts, traces));
        }
        return out;
    }

  private:
    static json request(uint64_t id, const char* method, json params) {
        json req;
        req["jsonrpc"] = "2.0";
        req["id"] = id;
        req["method"] = method;
        req["params"] = std::move(params);
        return req;
    }

    json post_with_retries(const json& batch, uint64_t& retries) {
        std::string body = batch.dump();
        uint32_t backoff = std::min(config_.initial_backoff_ms, config_.max_backoff_ms);
        for (uint32_t attempt = 0;; ++attempt) {
            auto res = http_.Post(endpoint_.path, body, "application/json");
            if (res && res->status == 200) {
                json reply = json::parse(res->body, nullptr, false);
                if (reply.is_discarded() || !reply.is_array())
                    throw NetworkError("node reply is not a JSON-RPC batch array");
                return reply;
            }
            if (attempt >= config_.max_retries) {
                std::string why = res ? "HTTP status " + std::to_string(res->status)
                                      : "transport error: " + httplib::to_string(res.error());
                throw NetworkError("rpc endpoint " + config_.endpoint + " failed after " +
                                   std::to_string(attempt + 1) + " attempts (" + why + ")");
            }
            ++retries;
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
            backoff = static_cast<uint32_t>(
                std::min<uint64_t>(uint64_t(backoff) * 2, config_.max_backoff_ms));
        }
    }

    /// Unwraps one batch entry. Application-level errors are not retried:
    /// a missing method will not heal, and the trace method missing gets
    /// its own error with guidance.
    const json& result_of(const std::map<int64_t, const json*>& by_id, uint64_t id,
                          const char* method, bool is_trace) {
        auto it = by_id.find(static_cast<int64_t>(id));
        if (it == by_id.end())
            throw NetworkError(std::string("node reply missing response for ") + method);
        const json& r = *it->second;
        if (r.contains("error") && !r["error"].is_null()) {
            const json& e = r["error"];
            int64_t code = e.contains("code") && e["code"].is_number_integer()
                               ? e["code"].get<int64_t>()
                               : 0;
            std::string msg = e.contains("message") && e["message"].is_string()
                                  ? e["message"].get<std::string>()
                                  : "unknown error";
            if (is_trace && code == -32601)
                throw TraceUnsupported(
                    "node does not support debug_traceBlockByNumber with the call tracer; "
                    "use a node with the debug API enabled (e.g. geth --http.api eth,debug) "
                    "or a provider that exposes call traces");
            throw NetworkError(std::string(method) + " failed: " + msg +
                               " (code " + std::to_string(code) + ")");
        }
        if (!r.contains("result"))
            throw NetworkError(std::string("node reply for ") + method + " has no result");
        return r["result"];
    }

    TxRecord build_record(uint64_t block, const json& tx,
                          const std::map<std::string, TxStatus>& status_by_hash,
                          const json* trace_frame) {
        if (!tx.is_object())
            throw NetworkError("node reply: transaction entry is not an object "
                               "(block must be requested with full transactions)");
        TxRecord rec;
        rec.tx_hash = hash_field(tx.contains("hash") ? tx["hash"] : json(), "transaction hash");
        rec.block = block;
        rec.index = static_cast<uint32_t>(quantity_field(
            tx.contains("transactionIndex") ? tx["transactionIndex"] : json(),
            "transactionIndex"));
        rec.nonce = quantity_field(tx.contains("nonce") ? tx["nonce"] : json(), "nonce");
        auto st = status_by_hash.find(lower(tx["hash"].get_ref<const std::string&>()));
        if (st == status_by_hash.end())
            throw NetworkError("node reply: no receipt for transaction " +
                               tx["hash"].get<std::string>());
        rec.status = st->second;
        if (trace_frame && trace_frame->is_object() && trace_frame->contains("from")) {
            flatten_frames(*trace_frame, 0, rec.frames);
        } else {
            // No trace for this transaction: fall back to the envelope call.
            CallFrame f;
            f.caller = address_field(tx.contains("from") ? tx["from"] : json(), "from");
            f.callee = address_field(tx.contains("to") ? tx["to"] : json(), "to");
            f.input = bytes_field(tx.contains("input") ? tx["input"] : json(), "input");
            f.depth = 0;
            rec.frames.push_back(std::move(f));
        }
        return rec;
    }

    std::vector<TxRecord> build_block(uint64_t number, const json& blk, const json& receipts,
                                      const json& traces) {
        std::string at = " for block " + std::to_string(number);
        if (blk.is_null())
            throw NetworkError("node has no block" + at);
        if (!blk.is_object() || !blk.contains("transactions") || !blk["transactions"].is_array())
            throw NetworkError("node reply: malformed block object" + at);
        if (quantity_field(blk.contains("number") ? blk["number"] : json(), "block number") !=
            number)
            throw NetworkError("node reply: block number mismatch" + at);
        const json& txs = blk["transactions"];

        if (!receipts.is_array())
            throw NetworkError("node reply: receipts are not an array" + at);
        std::map<std::string, TxStatus> status_by_hash;
        for (const auto& rc : receipts) {
            if (!rc.is_object() || !rc.contains("transactionHash"))
                throw NetworkError("node reply: malformed receipt" + at);
            uint64_t ok = quantity_field(rc.contains("status") ? rc["status"] : json(),
                                         "receipt status");
            status_by_hash[lower(rc["transactionHash"].get<std::string>())] =
                ok == 1 ? TxStatus::Ok : TxStatus::Fail;
        }

        if (!traces.is_array())
            throw NetworkError("node reply: traces are not an array" + at);
        std::map<std::string, const json*> trace_by_hash;
        std::vector<const json*> trace_by_pos;
        for (const auto& entry : traces) {
            const json* frame = &entry;
            std::string hash;
            if (entry.is_object() && entry.contains("result")) {
                frame = &entry["result"];
                if (entry.contains("txHash") && entry["txHash"].is_string())
                    hash = lower(entry["txHash"].get_ref<const std::string&>());
            }
            if (!hash.empty())
                trace_by_hash[hash] = frame;
            else
                trace_by_pos.push_back(frame);
        }

        std::vector<TxRecord> out;
        out.reserve(txs.size());
        for (size_t pos = 0; pos < txs.size(); ++pos) {
            const json& tx = txs[pos];
            const json* frame = nullptr;
            if (tx.is_object() && tx.contains("hash") && tx["hash"].is_string()) {
                auto it = trace_by_hash.find(lower(tx["hash"].get_ref<const std::string&>()));
                if (it != trace_by_hash.end())
                    frame = it->second;
            }
            if (!frame && trace_by_pos.size() == txs.size())
                frame = trace_by_pos[pos];
            out.push_back(build_record(number, tx, status_by_hash, frame));
        }
        std::sort(out.begin(), out.end(),
                  [](const TxRecord& a, const TxRecord& b) { return a.index < b.index; });
        return out;
    }

    FetchConfig config_;
    Endpoint endpoint_;
    httplib::Client http_;
};

struct Checkpoint {
    uint64_t run_from = 0;   // from_block of the run the checkpoint belongs to
    uint64_t last_done = 0;  // last block fully written to the corpus
};

std::optional<Checkpoint> read_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        return std::nullopt;
    Checkpoint cp;
    if (!(in >> cp.run_from >> cp.last_done))
        return std::nullopt;
    return cp;
}

void write_checkpoint(const std::string& path, Checkpoint cp) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << cp.run_from << ' ' << cp.last_done << '\n';
    out.flush();
    if (!out)
        throw SourceUnavailable("cannot write checkpoint file: " + path);
}

/// Byte length of the corpus prefix that holds intact records with blocks
/// inside [from, last_done]. Anything past it (torn tail from an interrupted
/// run, foreign data) gets truncated before appending resumes.
uint64_t valid_prefix_bytes(const std::string& path, uint64_t from, uint64_t last_done) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return 0;
    uint64_t offset = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (in.eof())
            break;  // no trailing newline: torn tail
        uint64_t nbytes = line.size() + 1;
        TxRecord rec;
        try {
            rec = parse_record(line);
        } catch (const MalformedRecord&) {
            break;
        }
        if (rec.block < from || rec.block > last_done)
            break;
        offset += nbytes;
    }
    return offset;
}

}  // namespace

FetchStats fetch_via_rpc(const FetchConfig& config) {
    if (config.endpoint.empty())
        throw ConfigError("fetch endpoint is required");
    if (config.out_path.empty())
        throw ConfigError("fetch output path is required");
    if (config.batch_size == 0)
        throw ConfigError("fetch batch size must be positive");
    split_endpoint(config.endpoint);  // validate eagerly, before touching files

    FetchStats stats;
    const std::string ckpt_path =
        config.checkpoint_path.empty() ? config.out_path + ".ckpt" : config.checkpoint_path;

    if (config.from_block > config.to_block) {
        std::ofstream out(config.out_path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw SourceUnavailable("cannot write corpus file: " + config.out_path);
        return stats;
    }

    uint64_t next_block = config.from_block;
    uint64_t append_at = 0;
    if (auto cp = read_checkpoint(ckpt_path);
        cp && cp->run_from == config.from_block && cp->last_done >= config.from_block) {
        uint64_t done = std::min(cp->last_done, config.to_block);
        append_at = valid_prefix_bytes(config.out_path, config.from_block, done);
        next_block = done + 1;
        stats.resumed = true;
    }

    {
        std::ofstream create(config.out_path, std::ios::binary | std::ios::app);
        if (!create)
            throw SourceUnavailable("cannot open corpus file: " + config.out_path);
    }
    std::error_code ec;
    if (std::filesystem::file_size(config.out_path, ec) != append_at && !ec)
        std::filesystem::resize_file(config.out_path, append_at, ec);
    if (ec)
        throw SourceUnavailable("cannot prepare corpus file: " + config.out_path);

    std::ofstream out(config.out_path, std::ios::binary | std::ios::app);
    if (!out)
        throw SourceUnavailable("cannot open corpus file: " + config.out_path);

    RpcClient client(config);
    while (next_block <= config.to_block) {
        uint64_t remaining = config.to_block - next_block;
        uint64_t take = remaining >= config.batch_size ? config.batch_size : remaining + 1;
        uint64_t chunk_end = next_block + take - 1;
        auto blocks = client.fetch_blocks(next_block, chunk_end, stats.retries);
        for (const auto& records : blocks)
            for (const auto& rec : records) {
                out << emit_record(rec) << '\n';
                ++stats.records_written;
            }
        out.flush();
        if (!out)
            throw SourceUnavailable("write failed on corpus file: " + config.out_path);
        stats.blocks_fetched += take;
        write_checkpoint(ckpt_path, {config.from_block, chunk_end});
        next_block = chunk_end + 1;
    }
    return stats;
}

}  // namespace alens
