#include "alens/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <utility>

#include "json.hpp"

#include "alens/errors.hpp"
#include "alens/hex.hpp"
#include "alens/ingest.hpp"
#include "alens/percent.hpp"
#include "alens/wire.hpp"

namespace alens {

namespace {

// Every CSV field below draws from a closed alphabet (hex addresses,
// decimals, enum names), so RFC 4180 quoting never triggers and plain
// joins are already compliant.

std::string json_escape(std::string_view v) {
    std::string out;
    out.reserve(v.size());
    for (char c : v) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

std::string pct(uint64_t count, uint64_t total) {
    return format_tenths(percent_tenths(count, total));
}

void write_text(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw SourceUnavailable("cannot open " + path + " for writing");
    f << body;
    f.flush();
    if (!f) throw SourceUnavailable("write failed: " + path);
}

/// Fans replay callbacks out to several sinks in registration order.
struct MultiSink : EventSink {
    std::vector<EventSink*> sinks;
    void on_approval(const ApprovalEvent& ev) override {
        for (auto* s : sinks) s->on_approval(ev);
    }
    void on_execution(const ExecutionEvent& ev) override {
        for (auto* s : sinks) s->on_execution(ev);
    }
    void on_transfer(const TransferEvent& ev) override {
        for (auto* s : sinks) s->on_transfer(ev);
    }
};

const char* error_kind(const Error& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
    if (dynamic_cast<const SourceUnavailable*>(&e)) return "SourceUnavailable";
    if (dynamic_cast<const MalformedRecord*>(&e)) return "MalformedRecord";
    if (dynamic_cast<const MalformedRegistry*>(&e)) return "MalformedRegistry";
    if (dynamic_cast<const DuplicateToken*>(&e)) return "DuplicateToken";
    if (dynamic_cast<const OrderViolation*>(&e)) return "OrderViolation";
    if (dynamic_cast<const ReorderWindowExceeded*>(&e)) return "ReorderWindowExceeded";
    if (dynamic_cast<const InsufficientState*>(&e)) return "InsufficientState";
    if (dynamic_cast<const TokenAbsent*>(&e)) return "TokenAbsent";
    if (dynamic_cast<const InfeasibleSpec*>(&e)) return "InfeasibleSpec";
    if (dynamic_cast<const SequenceTooLong*>(&e)) return "SequenceTooLong";
    if (dynamic_cast<const EmptySequence*>(&e)) return "EmptySequence";
    if (dynamic_cast<const TraceUnsupported*>(&e)) return "TraceUnsupported";
    if (dynamic_cast<const NetworkError*>(&e)) return "NetworkError";
    return "Error";
}

void emit_error(std::ostream& err, std::string_view kind, std::string_view message) {
    err << "{\"error\":\"" << json_escape(kind) << "\",\"message\":\""
        << json_escape(message) << "\"}\n";
}

}  // namespace

std::string error_json(const std::exception& e) {
    const auto* known = dynamic_cast<const Error*>(&e);
    std::string out = "{\"error\":\"";
    out += json_escape(known ? error_kind(*known) : "InternalError");
    out += "\",\"message\":\"";
    out += json_escape(e.what());
    out += "\"}";
    return out;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const InfeasibleSpec*>(&e))
        return 2;
    return 1;
}

void ApprovalSummarizer::on_approval(const ApprovalEvent& ev) {
    auto& acc = kinds_[static_cast<size_t>(ev.kind)];
    ++acc.transactions;
    acc.senders.insert(ev.owner);
    acc.spenders.insert(ev.spender);
    acc.tokens.insert(ev.token);
    ++global_.transactions;
    global_.senders.insert(ev.owner);
    global_.spenders.insert(ev.spender);
    global_.tokens.insert(ev.token);
}

ApprovalSummary ApprovalSummarizer::summary() const {
    auto pack = [](const Acc& a) {
        return KindSummary{a.transactions, a.senders.size(), a.spenders.size(),
                           a.tokens.size()};
    };
    ApprovalSummary s;
    s.unlimited = pack(kinds_[static_cast<size_t>(ApprovalKind::Unlimited)]);
    s.zero = pack(kinds_[static_cast<size_t>(ApprovalKind::Zero)]);
    s.other = pack(kinds_[static_cast<size_t>(ApprovalKind::Other)]);
    s.total_approvals = global_.transactions;
    s.global_senders = global_.senders.size();
    s.global_spenders = global_.spenders.size();
    s.global_tokens = global_.tokens.size();
    return s;
}

ApprovalSummary summarize_approvals(const std::vector<ApprovalEvent>& events) {
    ApprovalSummarizer acc;
    for (const auto& ev : events) acc.on_approval(ev);
    return acc.summary();
}

std::vector<RiskReportRow> collect_risk_rows(const ReplayResult& result) {
    std::vector<RiskReportRow> out;
    auto add_state = [&](uint64_t block, const LedgerState& st) {
        for (const auto& [token, ts] : st.tokens)
            for (auto& r : risk_rows(ts)) out.push_back({block, token, std::move(r)});
    };
    for (const auto& snap : result.snapshots) add_state(snap.block, snap.state);
    const uint64_t final_block =
        result.final_state.cursor ? result.final_state.cursor->block : 0;
    if (result.snapshots.empty() || result.snapshots.back().block != final_block)
        add_state(final_block, result.final_state);
    return out;
}

std::string render_approval_summary_csv(const ApprovalSummary& s) {
    std::string out =
        "kind,transactions,pct_transactions,senders,pct_senders,"
        "spenders,pct_spenders,tokens,pct_tokens\n";
    auto row = [&](std::string_view kind, const KindSummary& k) {
        out += kind;
        out += ',' + std::to_string(k.transactions) + ',' +
               pct(k.transactions, s.total_approvals);
        out += ',' + std::to_string(k.senders) + ',' +
               pct(k.senders, s.global_senders);
        out += ',' + std::to_string(k.spenders) + ',' +
               pct(k.spenders, s.global_spenders);
        out += ',' + std::to_string(k.tokens) + ',' +
               pct(k.tokens, s.global_tokens);
        out += '\n';
    };
    row(to_string(ApprovalKind::Unlimited), s.unlimited);
    row(to_string(ApprovalKind::Zero), s.zero);
    row(to_string(ApprovalKind::Other), s.other);
    row("all", KindSummary{s.total_approvals, s.global_senders, s.global_spenders,
                           s.global_tokens});
    return out;
}

std::string render_approval_summary_json(const ApprovalSummary& s) {
    std::string j = "{\"total_approvals\":" + std::to_string(s.total_approvals);
    j += ",\"global_unique\":{\"senders\":" + std::to_string(s.global_senders) +
         ",\"spenders\":" + std::to_string(s.global_spenders) +
         ",\"tokens\":" + std::to_string(s.global_tokens) + "}";
    j += ",\"kinds\":[";
    bool first = true;
    auto obj = [&](std::string_view kind, const KindSummary& k) {
        if (!first) j += ',';
        first = false;
        j += "{\"kind\":\"";
        j += kind;
        j += "\",\"transactions\":" + std::to_string(k.transactions) +
             ",\"pct_transactions\":" + pct(k.transactions, s.total_approvals) +
             ",\"senders\":" + std::to_string(k.senders) +
             ",\"pct_senders\":" + pct(k.senders, s.global_senders) +
             ",\"spenders\":" + std::to_string(k.spenders) +
             ",\"pct_spenders\":" + pct(k.spenders, s.global_spenders) +
             ",\"tokens\":" + std::to_string(k.tokens) +
             ",\"pct_tokens\":" + pct(k.tokens, s.global_tokens) + "}";
    };
    obj(to_string(ApprovalKind::Unlimited), s.unlimited);
    obj(to_string(ApprovalKind::Zero), s.zero);
    obj(to_string(ApprovalKind::Other), s.other);
    j += "]}\n";
    return j;
}

std::string render_risk_csv(const std::vector<RiskReportRow>& rows) {
    std::string out = "block,token,owner,spender,risk_amount,risk_level\n";
    for (const auto& r : rows) {
        out += std::to_string(r.block) + ',' + to_hex(r.token) + ',' +
               to_hex(r.row.owner) + ',' + to_hex(r.row.spender) + ',' +
               to_decimal(r.row.amount) + ',';
        out += to_string(r.row.level);
        out += '\n';
    }
    return out;
}

std::string render_risk_json(const std::vector<RiskReportRow>& rows) {
    std::string j = "[";
    bool first = true;
    for (const auto& r : rows) {
        j += first ? "\n" : ",\n";
        first = false;
        j += "{\"block\":" + std::to_string(r.block) + ",\"token\":\"" +
             to_hex(r.token) + "\",\"owner\":\"" + to_hex(r.row.owner) +
             "\",\"spender\":\"" + to_hex(r.row.spender) +
             "\",\"risk_amount\":\"" + to_decimal(r.row.amount) +
             "\",\"risk_level\":\"";
        j += to_string(r.row.level);
        j += "\"}";
    }
    j += first ? "]\n" : "\n]\n";
    return j;
}

std::string render_risk_distribution_csv(const LedgerState& state) {
    std::string out = "token,users,pct_no,pct_low,pct_high\n";
    for (const auto& [token, ts] : state.tokens) {
        const RiskDistribution d = risk_distribution(state, token);
        out += to_hex(token) + ',' + std::to_string(d.user_count) + ',' +
               format_tenths(d.tenths_no) + ',' + format_tenths(d.tenths_low) +
               ',' + format_tenths(d.tenths_high) + '\n';
    }
    return out;
}

std::string render_risk_distribution_json(const LedgerState& state) {
    std::string j = "[";
    bool first = true;
    for (const auto& [token, ts] : state.tokens) {
        const RiskDistribution d = risk_distribution(state, token);
        j += first ? "\n" : ",\n";
        first = false;
        j += "{\"token\":\"" + to_hex(token) +
             "\",\"users\":" + std::to_string(d.user_count) +
             ",\"users_no\":" + std::to_string(d.users_no) +
             ",\"users_low\":" + std::to_string(d.users_low) +
             ",\"users_high\":" + std::to_string(d.users_high) +
             ",\"pct_no\":" + format_tenths(d.tenths_no) +
             ",\"pct_low\":" + format_tenths(d.tenths_low) +
             ",\"pct_high\":" + format_tenths(d.tenths_high) + "}";
    }
    j += first ? "]\n" : "\n]\n";
    return j;
}

namespace {

std::set<Address> snapshot_tokens(const std::vector<Snapshot>& snapshots) {
    std::set<Address> tokens;
    for (const auto& snap : snapshots)
        for (const auto& [t, ts] : snap.state.tokens) tokens.insert(t);
    return tokens;
}

}  // namespace

std::string render_risk_series_csv(const std::vector<Snapshot>& snapshots) {
    std::string out = "block,token,metric,value\n";
    for (const Address& token : snapshot_tokens(snapshots)) {
        for (SeriesMetric metric :
             {SeriesMetric::SumRiskAmount, SeriesMetric::LevelCounts}) {
            for (const auto& r : risk_series(snapshots, token, metric))
                out += std::to_string(r.block) + ',' + to_hex(token) + ',' +
                       r.metric + ',' + r.value + '\n';
        }
    }
    return out;
}

std::string render_risk_series_json(const std::vector<Snapshot>& snapshots) {
    std::string j = "[";
    bool first = true;
    for (const Address& token : snapshot_tokens(snapshots)) {
        for (SeriesMetric metric :
             {SeriesMetric::SumRiskAmount, SeriesMetric::LevelCounts}) {
            for (const auto& r : risk_series(snapshots, token, metric)) {
                j += first ? "\n" : ",\n";
                first = false;
                j += "{\"block\":" + std::to_string(r.block) + ",\"token\":\"" +
                     to_hex(token) + "\",\"metric\":\"" + r.metric +
                     "\",\"value\":\"" + r.value + "\"}";
            }
        }
    }
    j += first ? "]\n" : "\n]\n";
    return j;
}

std::string render_behavior_csv(const std::vector<BehaviorSequence>& seqs) {
    std::string out =
        "owner,spender,token,n_events,mode,good_practice,first_block,last_block\n";
    for (const auto& s : seqs) {
        out += to_hex(s.owner) + ',' + to_hex(s.spender) + ',' + to_hex(s.token) +
               ',' + std::to_string(s.events.size()) + ',';
        out += to_string(s.mode);
        out += s.good_practice ? ",true," : ",false,";
        out += std::to_string(s.events.front().pos.block) + ',' +
               std::to_string(s.events.back().pos.block) + '\n';
    }
    return out;
}

std::string render_behavior_json(const std::vector<BehaviorSequence>& seqs) {
    std::string j = "[";
    bool first = true;
    for (const auto& s : seqs) {
        j += first ? "\n" : ",\n";
        first = false;
        j += "{\"owner\":\"" + to_hex(s.owner) + "\",\"spender\":\"" +
             to_hex(s.spender) + "\",\"token\":\"" + to_hex(s.token) +
             "\",\"n_events\":" + std::to_string(s.events.size()) +
             ",\"mode\":\"";
        j += to_string(s.mode);
        j += "\",\"good_practice\":";
        j += s.good_practice ? "true" : "false";
        j += ",\"first_block\":" + std::to_string(s.events.front().pos.block) +
             ",\"last_block\":" + std::to_string(s.events.back().pos.block) + "}";
    }
    j += first ? "]\n" : "\n]\n";
    return j;
}

std::string render_behavior_distribution_csv(const BehaviorDistribution& dist) {
    std::string out =
        "spender,token,identical_users,pct_m1,pct_m2,pct_m3,pct_m4,pct_m5,"
        "n_anomalous\n";
    for (const auto& row : dist.pairs) {
        out += to_hex(row.spender) + ',' + to_hex(row.token) + ',' +
               std::to_string(row.identical_users);
        for (uint32_t tenths : row.mode_tenths) out += ',' + format_tenths(tenths);
        out += ',' + std::to_string(row.n_anomalous) + '\n';
    }
    return out;
}

std::string render_behavior_distribution_json(const BehaviorDistribution& dist) {
    std::string j = "{\"pairs\":[";
    bool first = true;
    for (const auto& row : dist.pairs) {
        j += first ? "\n" : ",\n";
        first = false;
        j += "{\"spender\":\"" + to_hex(row.spender) + "\",\"token\":\"" +
             to_hex(row.token) +
             "\",\"identical_users\":" + std::to_string(row.identical_users);
        for (size_t m = 0; m < 5; ++m)
            j += ",\"pct_m" + std::to_string(m + 1) +
                 "\":" + format_tenths(row.mode_tenths[m]);
        j += ",\"n_anomalous\":" + std::to_string(row.n_anomalous) + "}";
    }
    j += first ? "]" : "\n]";

    uint64_t sequences = dist.global_anomalous;
    for (uint64_t c : dist.global_counts) sequences += c;
    j += ",\"global\":{\"sequences\":" + std::to_string(sequences);
    for (size_t m = 0; m < 5; ++m)
        j += ",\"pct_m" + std::to_string(m + 1) +
             "\":" + format_tenths(dist.global_tenths[m]);
    j += ",\"n_anomalous\":" + std::to_string(dist.global_anomalous) + "}}\n";
    return j;
}

void validate_config(const RunConfig& config) {
    if (config.corpus.empty())
        throw ConfigError("at least one corpus path is required");
    for (const auto& p : config.corpus)
        if (p.empty()) throw ConfigError("corpus path must not be empty");
    if (config.registry.empty()) throw ConfigError("a registry path is required");
    if (config.from_block > config.to_block)
        throw ConfigError("from_block exceeds to_block");
    for (size_t i = 1; i < config.checkpoints.size(); ++i)
        if (config.checkpoints[i] <= config.checkpoints[i - 1])
            throw ConfigError("checkpoints must be strictly ascending");
    if (config.out_dir.empty()) throw ConfigError("output directory must be set");
    if (config.decode.ua.mode == UnlimitedMode::Threshold &&
        config.decode.ua.threshold.is_zero())
        throw ConfigError("unlimited threshold must be positive");
}

void apply_config_file(RunConfig& config, const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file " + path + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config file " + path + ": not an object");

    try {
        for (const auto& [key, val] : j.items()) {
            if (key == "corpus") {
                config.corpus.clear();
                if (val.is_string()) {
                    config.corpus.push_back(val.get<std::string>());
                } else {
                    for (const auto& p : val)
                        config.corpus.push_back(p.get<std::string>());
                }
            } else if (key == "registry") {
                config.registry = val.get<std::string>();
            } else if (key == "from_block") {
                config.from_block = val.get<uint64_t>();
            } else if (key == "to_block") {
                config.to_block = val.get<uint64_t>();
            } else if (key == "checkpoints") {
                config.checkpoints.clear();
                for (const auto& c : val)
                    config.checkpoints.push_back(c.get<uint64_t>());
            } else if (key == "ua_mode") {
                const auto mode = val.get<std::string>();
                if (mode == "strict")
                    config.decode.ua.mode = UnlimitedMode::Strict;
                else if (mode == "threshold")
                    config.decode.ua.mode = UnlimitedMode::Threshold;
                else
                    throw ConfigError("ua_mode must be strict or threshold");
            } else if (key == "ua_threshold") {
                const auto text = val.get<std::string>();
                const auto v = u256_from_decimal(text);
                if (!v) throw ConfigError("ua_threshold is not a decimal: " + text);
                config.decode.ua.threshold = *v;
            } else if (key == "pairs") {
                config.pairs_path = val.get<std::string>();
            } else if (key == "out") {
                config.out_dir = val.get<std::string>();
            } else if (key == "format") {
                const auto fmt = val.get<std::string>();
                if (fmt == "csv")
                    config.format = OutputFormat::Csv;
                else if (fmt == "json")
                    config.format = OutputFormat::Json;
                else
                    throw ConfigError("format must be csv or json");
            } else if (key == "infinite_no_decrement") {
                config.ledger.infinite_allowance_no_decrement = val.get<bool>();
            } else if (key == "on_insufficient") {
                const auto mode = val.get<std::string>();
                if (mode == "skip")
                    config.ledger.on_insufficient = OnInsufficient::SkipAndCount;
                else if (mode == "clamp")
                    config.ledger.on_insufficient = OnInsufficient::Clamp;
                else if (mode == "halt")
                    config.ledger.on_insufficient = OnInsufficient::Halt;
                else
                    throw ConfigError("on_insufficient must be skip, clamp, or halt");
            } else if (key == "include_failed") {
                config.decode.include_failed = val.get<bool>();
            } else {
                throw ConfigError("unknown config key: " + key);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file " + path + ": " + e.what());
    }
}

BehaviorCollector::PairFilter load_pair_filter(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open pair filter " + path);
    BehaviorCollector::PairFilter filter;
    std::string line;
    size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        const auto where = path + ":" + std::to_string(lineno);
        if (comma == std::string::npos)
            throw ConfigError(where + ": expected spender,token");
        const auto spender = address_from_hex(line.substr(0, comma));
        const auto token = address_from_hex(line.substr(comma + 1));
        if (!spender || !token)
            throw ConfigError(where + ": malformed address");
        filter.insert({*spender, *token});
    }
    return filter;
}

namespace {

void print_summary(std::ostream& out, const RunConfig& config,
                   const ReplayResult& res, const ApprovalSummary& summary,
                   const std::vector<BehaviorSequence>& seqs) {
    out << "records processed : " << res.records_processed << '\n';
    out << "events decoded    : " << res.events_decoded << '\n';
    out << "malformed calldata: " << res.decode_stats.malformed_calldata << '\n';
    out << "approvals         : " << summary.total_approvals << " (unlimited "
        << summary.unlimited.transactions << ", zero " << summary.zero.transactions
        << ", other " << summary.other.transactions << ")\n";
    out << "unique senders    : " << summary.global_senders << ", spenders "
        << summary.global_spenders << ", tokens " << summary.global_tokens << '\n';

    if (config.set == ReportSet::Risk || config.set == ReportSet::Full) {
        uint64_t no = 0, low = 0, high = 0;
        for (const auto& [token, ts] : res.final_state.tokens) {
            const RiskDistribution d = risk_distribution(res.final_state, token);
            no += d.users_no;
            low += d.users_low;
            high += d.users_high;
        }
        out << "exposure (users)  : no " << no << ", low " << low << ", high "
            << high << '\n';
    }
    if (config.set == ReportSet::Behavior || config.set == ReportSet::Full) {
        uint64_t good = 0, anomalous = 0;
        for (const auto& s : seqs) {
            if (s.good_practice) ++good;
            if (s.mode == BehaviorMode::Anomalous) ++anomalous;
        }
        out << "behavior tuples   : " << seqs.size() << " (good practice " << good
            << ", anomalous " << anomalous << ")\n";
    }
    if (res.final_state.cursor)
        out << "final block       : " << res.final_state.cursor->block << '\n';
    out << "reports written to: " << config.out_dir << '\n';
}

}  // namespace

int run_pipeline(const RunConfig& config, std::ostream& out, std::ostream& err) {
    TokenRegistry registry;
    std::optional<BehaviorCollector::PairFilter> pairs;
    std::optional<RecordStream> stream;
    try {
        validate_config(config);
        registry = load_registry(config.registry);
        if (config.pairs_path) pairs = load_pair_filter(*config.pairs_path);
        CorpusOptions copts;
        copts.from_block = config.from_block;
        copts.to_block = config.to_block;
        stream.emplace(config.corpus, copts);
    } catch (const ConfigError& e) {
        emit_error(err, "ConfigError", e.what());
        return 2;
    } catch (const Error& e) {
        emit_error(err, error_kind(e), e.what());
        return 2;
    }

    try {
        ApprovalSummarizer summarizer;
        const bool want_behavior =
            config.set == ReportSet::Behavior || config.set == ReportSet::Full;
        BehaviorCollector collector =
            pairs ? BehaviorCollector(*pairs) : BehaviorCollector();
        MultiSink sink;
        sink.sinks.push_back(&summarizer);
        if (want_behavior) sink.sinks.push_back(&collector);

        const ReplayResult res = replay(*stream, registry, config.decode,
                                        config.ledger, config.checkpoints, &sink);

        std::error_code ec;
        std::filesystem::create_directories(config.out_dir, ec);
        if (ec)
            throw SourceUnavailable("cannot create output directory " +
                                    config.out_dir);
        const bool json = config.format == OutputFormat::Json;
        auto path_for = [&](const char* stem) {
            return config.out_dir + "/" + stem + (json ? ".json" : ".csv");
        };

        const ApprovalSummary summary = summarizer.summary();
        if (config.set == ReportSet::Scan || config.set == ReportSet::Full)
            write_text(path_for("approval_summary"),
                       json ? render_approval_summary_json(summary)
                            : render_approval_summary_csv(summary));

        if (config.set == ReportSet::Risk || config.set == ReportSet::Full) {
            const auto rows = collect_risk_rows(res);
            write_text(path_for("risk"),
                       json ? render_risk_json(rows) : render_risk_csv(rows));
            write_text(path_for("risk_distribution"),
                       json ? render_risk_distribution_json(res.final_state)
                            : render_risk_distribution_csv(res.final_state));
            write_text(path_for("risk_series"),
                       json ? render_risk_series_json(res.snapshots)
                            : render_risk_series_csv(res.snapshots));
        }

        std::vector<BehaviorSequence> seqs;
        if (want_behavior) {
            seqs = collector.take_sequences();
            write_text(path_for("behavior"), json ? render_behavior_json(seqs)
                                                  : render_behavior_csv(seqs));
            const BehaviorDistribution dist = behavior_distribution(seqs, pairs);
            write_text(path_for("behavior_distribution"),
                       json ? render_behavior_distribution_json(dist)
                            : render_behavior_distribution_csv(dist));
        }

        print_summary(out, config, res, summary, seqs);
        return 0;
    } catch (const Error& e) {
        emit_error(err, error_kind(e), e.what());
        return 1;
    } catch (const std::exception& e) {
        emit_error(err, "InternalError", e.what());
        return 1;
    }
}

}  // namespace alens
