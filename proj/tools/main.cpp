#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "alens/errors.hpp"
#include "alens/report.hpp"
#include "alens/rpc.hpp"
#include "alens/synth.hpp"
#include "alens/u256.hpp"

namespace {

using namespace alens;

struct PipelineCli {
    CLI::App* cmd = nullptr;
    ReportSet set = ReportSet::Full;
    std::vector<std::string> corpus;
    std::string registry;
    uint64_t from_block = 0;
    uint64_t to_block = 0;
    std::vector<uint64_t> checkpoints;
    std::string ua_mode;
    std::string ua_threshold;
    std::string pairs;
    std::string out_dir;
    std::string format;
    std::string on_insufficient;
    bool infinite_no_decrement = false;
    bool include_failed = false;
    std::string config_path;
};

void add_pipeline_flags(PipelineCli& p) {
    auto* c = p.cmd;
    c->add_option("--corpus", p.corpus, "corpus file(s), one transaction record per line");
    c->add_option("--registry", p.registry, "token registry file");
    c->add_option("--from-block", p.from_block, "first block to analyze");
    c->add_option("--to-block", p.to_block, "last block to analyze");
    c->add_option("--checkpoints", p.checkpoints, "snapshot blocks, comma separated, ascending")
        ->delimiter(',');
    c->add_option("--ua-mode", p.ua_mode, "unlimited-approval rule")
        ->check(CLI::IsMember({"strict", "threshold"}));
    c->add_option("--ua-threshold", p.ua_threshold,
                  "threshold-mode cutoff as a decimal amount");
    c->add_option("--pairs", p.pairs, "behavior pair filter file (spender,token lines)");
    c->add_option("--out", p.out_dir, "directory for report files");
    c->add_option("--format", p.format, "report file format")
        ->check(CLI::IsMember({"csv", "json"}));
    c->add_flag("--infinite-no-decrement", p.infinite_no_decrement,
                "leave unlimited allowances undiminished by spending");
    c->add_option("--on-insufficient", p.on_insufficient,
                  "what to do when a spend exceeds balance or allowance")
        ->check(CLI::IsMember({"skip", "clamp", "halt"}));
    c->add_flag("--include-failed", p.include_failed, "decode failed transactions too");
    c->add_option("--config", p.config_path,
                  "flat JSON config file; flags override it "
                  "(default: $APPROVAL_LENS_CONFIG)");
}

RunConfig build_run_config(const PipelineCli& p) {
    RunConfig cfg;
    cfg.set = p.set;
    std::string cfile = p.config_path;
    if (cfile.empty())
        if (const char* env = std::getenv("APPROVAL_LENS_CONFIG"); env && *env)
            cfile = env;
    if (!cfile.empty())
        apply_config_file(cfg, cfile);
    auto given = [&](const char* name) { return p.cmd->count(name) > 0; };
    if (given("--corpus"))
        cfg.corpus = p.corpus;
    if (given("--registry"))
        cfg.registry = p.registry;
    if (given("--from-block"))
        cfg.from_block = p.from_block;
    if (given("--to-block"))
        cfg.to_block = p.to_block;
    if (given("--checkpoints"))
        cfg.checkpoints = p.checkpoints;
    if (given("--ua-mode"))
        cfg.decode.ua.mode =
            p.ua_mode == "threshold" ? UnlimitedMode::Threshold : UnlimitedMode::Strict;
    if (given("--ua-threshold")) {
        auto v = u256_from_decimal(p.ua_threshold);
        if (!v)
            throw ConfigError("--ua-threshold is not a decimal amount: " + p.ua_threshold);
        cfg.decode.ua.threshold = *v;
    }
    if (given("--pairs"))
        cfg.pairs_path = p.pairs;
    if (given("--out"))
        cfg.out_dir = p.out_dir;
    if (given("--format"))
        cfg.format = p.format == "json" ? OutputFormat::Json : OutputFormat::Csv;
    if (given("--infinite-no-decrement"))
        cfg.ledger.infinite_allowance_no_decrement = true;
    if (given("--on-insufficient")) {
        if (p.on_insufficient == "skip")
            cfg.ledger.on_insufficient = OnInsufficient::SkipAndCount;
        else if (p.on_insufficient == "clamp")
            cfg.ledger.on_insufficient = OnInsufficient::Clamp;
        else
            cfg.ledger.on_insufficient = OnInsufficient::Halt;
    }
    if (given("--include-failed"))
        cfg.decode.include_failed = true;
    return cfg;
}

uint32_t parse_count(const std::string& text, const std::string& what) {
    size_t pos = 0;
    unsigned long v = 0;
    try {
        v = std::stoul(text, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (text.empty() || text[0] == '-' || pos != text.size() || v > UINT32_MAX)
        throw ConfigError(what + " value is not a count: " + text);
    return static_cast<uint32_t>(v);
}

void apply_kv(const std::vector<std::string>& items,
              const std::map<std::string, uint32_t*>& slots, const std::string& what) {
    for (const auto& item : items) {
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw ConfigError(what + " entry needs key=value: " + item);
        std::string key = item.substr(0, eq);
        auto it = slots.find(key);
        if (it == slots.end())
            throw ConfigError("unknown " + what + " key: " + key);
        *it->second = parse_count(item.substr(eq + 1), what);
    }
}

struct SynthCli {
    CLI::App* cmd = nullptr;
    uint64_t seed = 0;
    uint32_t users = 8;
    uint32_t spenders = 4;
    uint32_t tokens = 2;
    uint64_t blocks = 100;
    uint64_t filler = 0;
    uint32_t max_per_block = 64;
    std::vector<std::string> recipe;
    std::vector<std::string> mix;
    uint32_t erc721_decoys = 0;
    uint32_t internal_decoys = 0;
    uint32_t failed_decoys = 0;
    std::string attack;
    uint32_t victims = 8;
    std::string out_dir = ".";
};

void add_synth_flags(SynthCli& s) {
    auto* c = s.cmd;
    c->add_option("--seed", s.seed, "generator seed (recorded in the ground truth)");
    c->add_option("--users", s.users, "owner address pool size");
    c->add_option("--spenders", s.spenders, "spender address pool size");
    c->add_option("--tokens", s.tokens, "token address pool size");
    c->add_option("--blocks", s.blocks, "number of blocks to spread over");
    c->add_option("--filler", s.filler, "extra events drawn from the mix weights");
    c->add_option("--max-per-block", s.max_per_block, "transaction capacity per block");
    c->add_option("--recipe", s.recipe,
                  "scripted tuple quotas, e.g. m1_good=3,m2_bad=1,m3=2,anomalous=1")
        ->delimiter(',');
    c->add_option("--mix", s.mix,
                  "filler weights, e.g. mint=2,approve_ua=1,approve_za=1,approve_oa=3,"
                  "exec=2,transfer=1")
        ->delimiter(',');
    c->add_option("--erc721-decoys", s.erc721_decoys, "approve calls on an erc721 token");
    c->add_option("--internal-decoys", s.internal_decoys, "approve calls in nested frames");
    c->add_option("--failed-decoys", s.failed_decoys, "approve calls in failed transactions");
    c->add_option("--attack", s.attack,
                  "generate a drain scenario instead: approvals to the attacker (model1) "
                  "or through an exploited contract (model2)")
        ->check(CLI::IsMember({"model1", "model2"}));
    c->add_option("--victims", s.victims, "victim count for --attack");
    c->add_option("--out", s.out_dir, "directory for corpus.jsonl, registry.jsonl, truth.json");
}

int do_synth(const SynthCli& s, std::ostream& out) {
    SynthOutput gen;
    if (s.cmd->count("--attack") > 0) {
        auto kind = s.attack == "model1" ? AttackKind::Model1 : AttackKind::Model2;
        gen = scenario_attack(kind, s.victims, s.seed);
    } else {
        GenSpec spec;
        spec.seed = s.seed;
        spec.n_users = s.users;
        spec.n_spenders = s.spenders;
        spec.n_tokens = s.tokens;
        spec.n_blocks = s.blocks;
        spec.n_filler = s.filler;
        spec.max_txs_per_block = s.max_per_block;
        spec.n_erc721_decoys = s.erc721_decoys;
        spec.n_internal_approve_decoys = s.internal_decoys;
        spec.n_failed_decoys = s.failed_decoys;
        apply_kv(s.recipe,
                 {{"m1_good", &spec.recipe.m1_good},
                  {"m1_bad", &spec.recipe.m1_bad},
                  {"m2_good", &spec.recipe.m2_good},
                  {"m2_bad", &spec.recipe.m2_bad},
                  {"m3", &spec.recipe.m3},
                  {"m4", &spec.recipe.m4},
                  {"m5_good", &spec.recipe.m5_good},
                  {"m5_bad", &spec.recipe.m5_bad},
                  {"anomalous", &spec.recipe.anomalous}},
                 "recipe");
        apply_kv(s.mix,
                 {{"mint", &spec.mix.mint},
                  {"approve_ua", &spec.mix.approve_ua},
                  {"approve_za", &spec.mix.approve_za},
                  {"approve_oa", &spec.mix.approve_oa},
                  {"exec", &spec.mix.exec},
                  {"transfer", &spec.mix.transfer}},
                 "mix");
        gen = generate_corpus(spec);
    }
    std::error_code ec;
    std::filesystem::create_directories(s.out_dir, ec);
    if (ec)
        throw SourceUnavailable("cannot create output directory: " + s.out_dir);
    auto path = [&](const char* stem) {
        return (std::filesystem::path(s.out_dir) / stem).string();
    };
    write_synth(gen, path("corpus.jsonl"), path("registry.jsonl"), path("truth.json"));
    out << "corpus records:   " << gen.records.size() << '\n';
    out << "registry entries: " << gen.registry.size() << '\n';
    out << "behavior tuples:  " << gen.truth.behaviors.size() << '\n';
    if (gen.truth.attack)
        out << "attack victims:   " << gen.truth.attack->victims.size()
            << " (drains start at block " << gen.truth.attack->drain_start_block << ")\n";
    out << "wrote corpus.jsonl, registry.jsonl, truth.json under " << s.out_dir << '\n';
    return 0;
}

struct FetchCli {
    CLI::App* cmd = nullptr;
    FetchConfig config;
};

void add_fetch_flags(FetchCli& f) {
    auto* c = f.cmd;
    c->add_option("--endpoint", f.config.endpoint,
                  "node RPC URL, e.g. http://127.0.0.1:8545")
        ->required();
    c->add_option("--from-block", f.config.from_block, "first block")->required();
    c->add_option("--to-block", f.config.to_block, "last block")->required();
    c->add_option("--out", f.config.out_path, "corpus file to write")->required();
    c->add_option("--checkpoint", f.config.checkpoint_path,
                  "resume checkpoint file (default: <out>.ckpt)");
    c->add_option("--batch-size", f.config.batch_size, "blocks per request batch");
    c->add_option("--max-retries", f.config.max_retries, "transport retries per batch");
}

int do_fetch(const FetchCli& f, std::ostream& out) {
    auto stats = fetch_via_rpc(f.config);
    out << "blocks fetched:  " << stats.blocks_fetched << '\n';
    out << "records written: " << stats.records_written << '\n';
    if (stats.resumed)
        out << "resumed from an earlier checkpoint\n";
    if (stats.retries)
        out << "transport retries: " << stats.retries << '\n';
    return 0;
}

int run(int argc, char** argv) {
    CLI::App app{"ERC20 approval activity analysis"};
    app.require_subcommand(1);

    PipelineCli scan;
    scan.set = ReportSet::Scan;
    scan.cmd = app.add_subcommand("scan", "decode approvals and summarize them by kind");
    add_pipeline_flags(scan);

    PipelineCli risk;
    risk.set = ReportSet::Risk;
    risk.cmd = app.add_subcommand("risk", "replay token state and quantify exposure");
    add_pipeline_flags(risk);

    PipelineCli behavior;
    behavior.set = ReportSet::Behavior;
    behavior.cmd = app.add_subcommand("behavior", "classify per-user approval usage");
    add_pipeline_flags(behavior);

    PipelineCli report;
    report.set = ReportSet::Full;
    report.cmd = app.add_subcommand("report", "run every analysis and write all reports");
    add_pipeline_flags(report);

    SynthCli synth;
    synth.cmd = app.add_subcommand("synth", "generate a labeled synthetic corpus");
    add_synth_flags(synth);

    FetchCli fetch;
    fetch.cmd = app.add_subcommand("fetch", "pull a corpus from a node over RPC");
    add_fetch_flags(fetch);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        for (PipelineCli* p : {&scan, &risk, &behavior, &report})
            if (p->cmd->parsed())
                return run_pipeline(build_run_config(*p), std::cout, std::cerr);
        if (synth.cmd->parsed())
            return do_synth(synth, std::cout);
        if (fetch.cmd->parsed())
            return do_fetch(fetch, std::cout);
    } catch (const std::exception& e) {
        std::cerr << error_json(e) << '\n';
        return exit_code_for(e);
    }
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    return run(argc, argv);
}
