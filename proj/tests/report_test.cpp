#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "json.hpp"

#include "alens/errors.hpp"
#include "alens/report.hpp"
#include "alens/synth.hpp"
#include "alens/wire.hpp"
#include "test_util.hpp"

using namespace alens;
using testutil::TempDir;
using testutil::write_lines;

namespace {

Address addr(uint8_t tag) {
    Address a;
    a.bytes[19] = tag;
    a.bytes[0] = 0x70;
    return a;
}

ApprovalEvent approval(ApprovalKind kind, uint8_t owner, uint8_t spender,
                       uint8_t token, uint64_t amount = 5) {
    ApprovalEvent ev;
    ev.pos = {1, 0};
    ev.token = addr(token);
    ev.owner = addr(owner);
    ev.spender = addr(spender);
    ev.amount = kind == ApprovalKind::Zero ? U256{} : U256{amount};
    ev.kind = kind;
    return ev;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

size_t line_count(const std::string& body) {
    size_t n = 0;
    for (char c : body)
        if (c == '\n') ++n;
    return n;
}

GenSpec small_mixed_spec() {
    GenSpec spec;
    spec.seed = 31;
    spec.n_users = 24;
    spec.n_spenders = 5;
    spec.n_tokens = 2;
    spec.n_blocks = 30;
    spec.n_filler = 150;
    spec.recipe.m1_good = 2;
    spec.recipe.m1_bad = 1;
    spec.recipe.m2_good = 1;
    spec.recipe.m2_bad = 1;
    spec.recipe.m3 = 2;
    spec.recipe.m4 = 1;
    spec.recipe.m5_good = 1;
    spec.recipe.m5_bad = 1;
    spec.recipe.anomalous = 1;
    spec.n_erc721_decoys = 1;
    spec.n_internal_approve_decoys = 1;
    spec.n_failed_decoys = 1;
    return spec;
}

struct SynthFiles {
    SynthOutput out;
    std::string corpus;
    std::string registry;
};

SynthFiles materialize(const TempDir& dir, const GenSpec& spec) {
    SynthFiles f;
    f.out = generate_corpus(spec);
    f.corpus = dir.file("corpus.jsonl");
    f.registry = dir.file("registry.jsonl");
    write_synth(f.out, f.corpus, f.registry, dir.file("truth.json"));
    return f;
}

}  // namespace

TEST_CASE("approval summary counts transactions and uniques by kind") {
    const std::vector<ApprovalEvent> events = {
        approval(ApprovalKind::Unlimited, 0x01, 0x11, 0x21),
        approval(ApprovalKind::Unlimited, 0x01, 0x12, 0x21),
        approval(ApprovalKind::Zero, 0x02, 0x11, 0x21),
    };
    const ApprovalSummary s = summarize_approvals(events);

    CHECK(s.unlimited == KindSummary{2, 1, 2, 1});
    CHECK(s.zero == KindSummary{1, 1, 1, 1});
    CHECK(s.other == KindSummary{});
    CHECK(s.total_approvals == 3);
    CHECK(s.global_senders == 2);
    CHECK(s.global_spenders == 2);
    CHECK(s.global_tokens == 1);

    CHECK(summarize_approvals({}) == ApprovalSummary{});
}

TEST_CASE("approval summary renders self-consistent tables") {
    const std::vector<ApprovalEvent> events = {
        approval(ApprovalKind::Unlimited, 0x01, 0x11, 0x21),
        approval(ApprovalKind::Unlimited, 0x01, 0x12, 0x21),
        approval(ApprovalKind::Zero, 0x02, 0x11, 0x21),
    };
    const ApprovalSummary s = summarize_approvals(events);

    SUBCASE("csv") {
        const std::string csv = render_approval_summary_csv(s);
        CHECK(csv ==
              "kind,transactions,pct_transactions,senders,pct_senders,"
              "spenders,pct_spenders,tokens,pct_tokens\n"
              "UA,2,66.7,1,50.0,2,100.0,1,100.0\n"
              "ZA,1,33.3,1,50.0,1,50.0,1,100.0\n"
              "OA,0,0.0,0,0.0,0,0.0,0,0.0\n"
              "all,3,100.0,2,100.0,2,100.0,1,100.0\n");
    }

    SUBCASE("json parses back structurally equal") {
        const auto j = nlohmann::json::parse(render_approval_summary_json(s));
        CHECK(j["total_approvals"] == 3);
        CHECK(j["global_unique"]["senders"] == 2);
        CHECK(j["global_unique"]["spenders"] == 2);
        CHECK(j["global_unique"]["tokens"] == 1);
        REQUIRE(j["kinds"].size() == 3);
        CHECK(j["kinds"][0]["kind"] == "UA");
        CHECK(j["kinds"][0]["transactions"] == 2);
        CHECK(j["kinds"][1]["kind"] == "ZA");
        CHECK(j["kinds"][2]["kind"] == "OA");
        // emitted percentages recompute from emitted counts
        for (const auto& k : j["kinds"]) {
            const double want =
                s.total_approvals
                    ? 100.0 * k["transactions"].get<double>() / s.total_approvals
                    : 0.0;
            CHECK(std::abs(k["pct_transactions"].get<double>() - want) < 0.05);
        }
    }

    SUBCASE("empty summary keeps percentages at zero") {
        const std::string csv = render_approval_summary_csv(ApprovalSummary{});
        CHECK(csv.find("all,0,0.0,0,0.0,0,0.0,0,0.0\n") != std::string::npos);
    }
}

TEST_CASE("replayed summary matches independently counted ground truth") {
    TempDir dir;
    const auto files = materialize(dir, small_mixed_spec());

    uint64_t txs[3] = {};
    std::set<Address> senders[3], spenders[3], tokens[3];
    std::set<Address> g_senders, g_spenders, g_tokens;
    uint64_t total = 0;
    for (const auto& ev : files.out.truth.events) {
        const auto* ap = std::get_if<ApprovalEvent>(&ev);
        if (!ap) continue;
        const auto k = static_cast<size_t>(ap->kind);
        ++txs[k];
        ++total;
        senders[k].insert(ap->owner);
        spenders[k].insert(ap->spender);
        tokens[k].insert(ap->token);
        g_senders.insert(ap->owner);
        g_spenders.insert(ap->spender);
        g_tokens.insert(ap->token);
    }

    RecordStream stream({files.corpus});
    ApprovalSummarizer summarizer;
    (void)replay(stream, load_registry(files.registry), {}, {}, {}, &summarizer);
    const ApprovalSummary s = summarizer.summary();

    auto expect = [&](ApprovalKind kind, const KindSummary& got) {
        const auto k = static_cast<size_t>(kind);
        CHECK(got.transactions == txs[k]);
        CHECK(got.senders == senders[k].size());
        CHECK(got.spenders == spenders[k].size());
        CHECK(got.tokens == tokens[k].size());
    };
    expect(ApprovalKind::Unlimited, s.unlimited);
    expect(ApprovalKind::Zero, s.zero);
    expect(ApprovalKind::Other, s.other);
    CHECK(s.total_approvals == total);
    CHECK(s.global_senders == g_senders.size());
    CHECK(s.global_spenders == g_spenders.size());
    CHECK(s.global_tokens == g_tokens.size());
}

TEST_CASE("risk rows cover checkpoints and final state without duplication") {
    using namespace testutil;
    TempDir dir;
    const auto corpus = dir.file("corpus.jsonl");
    const Address owner = addr(0x01), spender = addr(0x11), token = addr(0x21);
    write_lines(corpus,
                {emit_record(tx_transfer(1, 0, kZeroAddress, token, owner, U256{100})),
                 emit_record(tx_approve(1, 1, owner, token, spender, U256{40})),
                 emit_record(tx_approve(3, 0, owner, token, spender, U256{70}))});
    TokenRegistry registry;
    registry.emplace(token, TokenInfo{token, TokenStandard::Erc20, {}, {}});

    SUBCASE("checkpoint before the end adds a final section") {
        RecordStream stream({corpus});
        const auto res = replay(stream, registry, {}, {}, {2});
        const auto rows = collect_risk_rows(res);
        REQUIRE(rows.size() == 2);
        CHECK(rows[0].block == 2);
        CHECK(rows[0].row.amount == U256{40});
        CHECK(rows[0].row.level == RiskLevel::HighRisk);
        CHECK(rows[1].block == 3);
        CHECK(rows[1].row.amount == U256{70});
    }

    SUBCASE("checkpoint at the last block is not repeated") {
        RecordStream stream({corpus});
        const auto res = replay(stream, registry, {}, {}, {3});
        const auto rows = collect_risk_rows(res);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].block == 3);
        CHECK(rows[0].row.amount == U256{70});
    }
}

TEST_CASE("amounts render as full unquoted decimals") {
    std::vector<RiskReportRow> rows;
    rows.push_back({5, addr(0x21),
                    RiskRow{addr(0x01), addr(0x11), U256::max(),
                            RiskLevel::HighRisk}});
    const std::string csv = render_risk_csv(rows);
    const std::string full =
        "1157920892373161954235709850086879078532699846656405640394575840079131"
        "29639935";
    CHECK(csv.find(full) != std::string::npos);
    CHECK(csv.find('"') == std::string::npos);
    CHECK(csv.find("high_risk") != std::string::npos);

    const auto j = nlohmann::json::parse(render_risk_json(rows));
    CHECK(j[0]["risk_amount"] == full);
}

TEST_CASE("empty inputs render header-only tables") {
    CHECK(render_risk_csv({}) == "block,token,owner,spender,risk_amount,risk_level\n");
    CHECK(render_risk_distribution_csv(LedgerState{}) ==
          "token,users,pct_no,pct_low,pct_high\n");
    CHECK(render_risk_series_csv({}) == "block,token,metric,value\n");
    CHECK(render_behavior_csv({}) ==
          "owner,spender,token,n_events,mode,good_practice,first_block,last_block\n");
    CHECK(render_behavior_distribution_csv(BehaviorDistribution{}) ==
          "spender,token,identical_users,pct_m1,pct_m2,pct_m3,pct_m4,pct_m5,"
          "n_anomalous\n");
    CHECK(nlohmann::json::parse(render_risk_json({})).empty());
}

TEST_CASE("behavior table carries the block span and verdict") {
    BehaviorSequence seq;
    seq.owner = addr(0x01);
    seq.spender = addr(0x11);
    seq.token = addr(0x21);
    BehaviorEvent a;
    a.kind = BehaviorEvent::Kind::Approval;
    a.approval_kind = ApprovalKind::Other;
    a.amount = U256{9};
    a.pos = {3, 0};
    BehaviorEvent e;
    e.kind = BehaviorEvent::Kind::Execution;
    e.amount = U256{9};
    e.pos = {9, 2};
    seq.events = {a, e};
    seq.mode = BehaviorMode::OneToOne;
    seq.good_practice = true;

    const std::string csv = render_behavior_csv({seq});
    CHECK(csv.find(",2,M1,true,3,9\n") != std::string::npos);

    const auto j = nlohmann::json::parse(render_behavior_json({seq}));
    CHECK(j[0]["mode"] == "M1");
    CHECK(j[0]["good_practice"] == true);
    CHECK(j[0]["first_block"] == 3);
    CHECK(j[0]["last_block"] == 9);
}

TEST_CASE("pipeline runs write every report deterministically") {
    TempDir dir;
    const auto files = materialize(dir, small_mixed_spec());

    RunConfig cfg;
    cfg.corpus = {files.corpus};
    cfg.registry = files.registry;
    cfg.checkpoints = {10, 20};
    cfg.set = ReportSet::Full;

    const std::vector<std::string> stems = {
        "approval_summary", "risk",     "risk_distribution",
        "risk_series",      "behavior", "behavior_distribution"};

    auto run_into = [&](const std::string& out_dir, OutputFormat fmt) {
        RunConfig c = cfg;
        c.out_dir = out_dir;
        c.format = fmt;
        std::ostringstream out, err;
        const int rc = run_pipeline(c, out, err);
        CAPTURE(err.str());
        REQUIRE(rc == 0);
        CHECK(err.str().empty());
        CHECK(out.str().find("records processed") != std::string::npos);
    };

    run_into(dir.file("a"), OutputFormat::Csv);
    run_into(dir.file("b"), OutputFormat::Csv);
    for (const auto& stem : stems) {
        const auto body_a = slurp(dir.file("a") + "/" + stem + ".csv");
        const auto body_b = slurp(dir.file("b") + "/" + stem + ".csv");
        CAPTURE(stem);
        CHECK(!body_a.empty());
        CHECK(body_a == body_b);
        CHECK(body_a.back() == '\n');
    }

    run_into(dir.file("j"), OutputFormat::Json);
    for (const auto& stem : stems) {
        CAPTURE(stem);
        const auto body = slurp(dir.file("j") + "/" + stem + ".json");
        const auto parsed = nlohmann::json::parse(body, nullptr, false);
        CHECK(!parsed.is_discarded());
    }

    // report counts line up with generator ground truth
    size_t truth_approvals = 0;
    for (const auto& ev : files.out.truth.events)
        if (std::holds_alternative<ApprovalEvent>(ev)) ++truth_approvals;
    const auto summary = slurp(dir.file("a") + "/approval_summary.csv");
    CHECK(summary.find("all," + std::to_string(truth_approvals) + ",") !=
          std::string::npos);
    const auto behavior = slurp(dir.file("a") + "/behavior.csv");
    CHECK(line_count(behavior) == files.out.truth.behaviors.size() + 1);
}

TEST_CASE("pipeline failures exit with the documented codes") {
    TempDir dir;

    SUBCASE("missing registry is a config failure with no partial outputs") {
        RunConfig cfg;
        cfg.corpus = {dir.file("absent.jsonl")};
        cfg.registry = dir.file("no_such_registry.jsonl");
        cfg.out_dir = dir.file("out");
        std::ostringstream out, err;
        CHECK(run_pipeline(cfg, out, err) == 2);
        const auto j = nlohmann::json::parse(err.str());
        CHECK(j["error"] == "SourceUnavailable");
        CHECK(!std::filesystem::exists(cfg.out_dir));
    }

    SUBCASE("invalid settings are rejected before any file is touched") {
        RunConfig cfg;  // no corpus at all
        cfg.out_dir = dir.file("out");
        std::ostringstream out, err;
        CHECK(run_pipeline(cfg, out, err) == 2);
        CHECK(nlohmann::json::parse(err.str())["error"] == "ConfigError");
        CHECK(!std::filesystem::exists(cfg.out_dir));
    }

    SUBCASE("corpus corruption mid-run is a runtime failure") {
        const auto corpus = dir.file("corpus.jsonl");
        const auto registry = dir.file("registry.jsonl");
        const Address token = addr(0x21);
        write_lines(corpus, {"{ not json"});
        write_lines(registry,
                    {emit_registry_line(TokenInfo{token, TokenStandard::Erc20,
                                                  {}, {}})});
        RunConfig cfg;
        cfg.corpus = {corpus};
        cfg.registry = registry;
        cfg.out_dir = dir.file("out");
        std::ostringstream out, err;
        CHECK(run_pipeline(cfg, out, err) == 1);
        CHECK(nlohmann::json::parse(err.str())["error"] == "MalformedRecord");
    }
}

TEST_CASE("config files overlay defaults and reject junk") {
    TempDir dir;
    const auto path = dir.file("config.json");

    SUBCASE("known keys land in the right fields") {
        write_lines(path, {R"({"corpus":["a.jsonl","b.jsonl"],"registry":"r.jsonl",)"
                           R"("from_block":5,"to_block":9,"checkpoints":[6,7],)"
                           R"("ua_mode":"threshold","ua_threshold":"1000",)"
                           R"("pairs":"p.csv","out":"reports","format":"json",)"
                           R"("infinite_no_decrement":true,)"
                           R"("on_insufficient":"clamp","include_failed":true})"});
        RunConfig cfg;
        apply_config_file(cfg, path);
        CHECK(cfg.corpus == std::vector<std::string>{"a.jsonl", "b.jsonl"});
        CHECK(cfg.registry == "r.jsonl");
        CHECK(cfg.from_block == 5);
        CHECK(cfg.to_block == 9);
        CHECK(cfg.checkpoints == std::vector<uint64_t>{6, 7});
        CHECK(cfg.decode.ua.mode == UnlimitedMode::Threshold);
        CHECK(cfg.decode.ua.threshold == U256{1000});
        CHECK(cfg.pairs_path == "p.csv");
        CHECK(cfg.out_dir == "reports");
        CHECK(cfg.format == OutputFormat::Json);
        CHECK(cfg.ledger.infinite_allowance_no_decrement);
        CHECK(cfg.ledger.on_insufficient == OnInsufficient::Clamp);
        CHECK(cfg.decode.include_failed);
    }

    SUBCASE("single corpus string is accepted") {
        write_lines(path, {R"({"corpus":"only.jsonl"})"});
        RunConfig cfg;
        apply_config_file(cfg, path);
        CHECK(cfg.corpus == std::vector<std::string>{"only.jsonl"});
    }

    SUBCASE("unknown keys fail loudly") {
        write_lines(path, {R"({"corpsu":"typo.jsonl"})"});
        RunConfig cfg;
        CHECK_THROWS_AS(apply_config_file(cfg, path), ConfigError);
    }

    SUBCASE("wrong value types fail loudly") {
        write_lines(path, {R"({"from_block":"ten"})"});
        RunConfig cfg;
        CHECK_THROWS_AS(apply_config_file(cfg, path), ConfigError);
    }

    SUBCASE("bad enum values fail loudly") {
        write_lines(path, {R"({"on_insufficient":"explode"})"});
        RunConfig cfg;
        CHECK_THROWS_AS(apply_config_file(cfg, path), ConfigError);
    }
}

TEST_CASE("pair filter files parse spender,token lines") {
    TempDir dir;
    const auto path = dir.file("pairs.csv");

    SUBCASE("valid lines with a blank in between") {
        write_lines(path, {to_hex(addr(0x11)) + "," + to_hex(addr(0x21)), "",
                           to_hex(addr(0x12)) + "," + to_hex(addr(0x22))});
        const auto filter = load_pair_filter(path);
        REQUIRE(filter.size() == 2);
        CHECK(filter.count({addr(0x11), addr(0x21)}) == 1);
        CHECK(filter.count({addr(0x12), addr(0x22)}) == 1);
    }

    SUBCASE("missing comma is rejected") {
        write_lines(path, {to_hex(addr(0x11))});
        CHECK_THROWS_AS((void)load_pair_filter(path), ConfigError);
    }

    SUBCASE("short hex is rejected") {
        write_lines(path, {"0x1234," + to_hex(addr(0x21))});
        CHECK_THROWS_AS((void)load_pair_filter(path), ConfigError);
    }
}

TEST_CASE("validate_config rejects impossible settings") {
    RunConfig good;
    good.corpus = {"c.jsonl"};
    good.registry = "r.jsonl";
    CHECK_NOTHROW(validate_config(good));

    RunConfig cfg = good;
    cfg.from_block = 10;
    cfg.to_block = 5;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);

    cfg = good;
    cfg.checkpoints = {5, 5};
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);

    cfg = good;
    cfg.out_dir.clear();
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);

    cfg = good;
    cfg.decode.ua.mode = UnlimitedMode::Threshold;
    cfg.decode.ua.threshold = U256{};
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
}
