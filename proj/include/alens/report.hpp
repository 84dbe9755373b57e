#pragma once

// Aggregates pipeline outputs into summary tables (CSV or JSON) and drives
// the whole ingest -> decode -> replay -> risk -> behavior flow end to end.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "alens/behavior.hpp"
#include "alens/decode.hpp"
#include "alens/ledger.hpp"
#include "alens/risk.hpp"
#include "alens/types.hpp"

namespace alens {

/// Counts for one approval kind. Uniqueness is by address bytes.
struct KindSummary {
    uint64_t transactions = 0;
    uint64_t senders = 0;
    uint64_t spenders = 0;
    uint64_t tokens = 0;

    friend bool operator==(const KindSummary&, const KindSummary&) = default;
};

/// Overall approval statistics. Per-kind unique counts can overlap (one
/// sender may issue both unlimited and zero approvals), so kind percentages
/// of the global uniques may sum above 100.
struct ApprovalSummary {
    KindSummary unlimited;
    KindSummary zero;
    KindSummary other;
    uint64_t total_approvals = 0;
    uint64_t global_senders = 0;
    uint64_t global_spenders = 0;
    uint64_t global_tokens = 0;

    friend bool operator==(const ApprovalSummary&, const ApprovalSummary&) = default;
};

/// Streaming accumulator usable as a replay sink.
class ApprovalSummarizer : public EventSink {
  public:
    void on_approval(const ApprovalEvent& ev) override;
    ApprovalSummary summary() const;

  private:
    struct Acc {
        uint64_t transactions = 0;
        std::set<Address> senders;
        std::set<Address> spenders;
        std::set<Address> tokens;
    };
    Acc kinds_[3];
    Acc global_;
};

ApprovalSummary summarize_approvals(const std::vector<ApprovalEvent>& events);

/// One exposure row bound to its measurement context.
struct RiskReportRow {
    uint64_t block = 0;
    Address token;
    RiskRow row;
};

/// Rows for every checkpoint snapshot plus the final state (skipped when it
/// would duplicate the last snapshot), tokens and owners in address order.
std::vector<RiskReportRow> collect_risk_rows(const ReplayResult& result);

/// Renderers return the complete file body, trailing newline included.
/// Amounts are full decimal strings: unquoted in CSV, quoted in JSON.
std::string render_approval_summary_csv(const ApprovalSummary& s);
std::string render_approval_summary_json(const ApprovalSummary& s);
std::string render_risk_csv(const std::vector<RiskReportRow>& rows);
std::string render_risk_json(const std::vector<RiskReportRow>& rows);
std::string render_risk_distribution_csv(const LedgerState& state);
std::string render_risk_distribution_json(const LedgerState& state);
std::string render_risk_series_csv(const std::vector<Snapshot>& snapshots);
std::string render_risk_series_json(const std::vector<Snapshot>& snapshots);
std::string render_behavior_csv(const std::vector<BehaviorSequence>& seqs);
std::string render_behavior_json(const std::vector<BehaviorSequence>& seqs);
std::string render_behavior_distribution_csv(const BehaviorDistribution& dist);
std::string render_behavior_distribution_json(const BehaviorDistribution& dist);

enum class ReportSet { Scan, Risk, Behavior, Full };
enum class OutputFormat { Csv, Json };

/// Everything one pipeline run needs. Validated before any processing.
struct RunConfig {
    std::vector<std::string> corpus;
    std::string registry;
    uint64_t from_block = 0;
    uint64_t to_block = UINT64_MAX;
    std::vector<uint64_t> checkpoints;
    DecodeConfig decode;
    LedgerConfig ledger;
    std::optional<std::string> pairs_path;
    std::string out_dir = ".";
    OutputFormat format = OutputFormat::Csv;
    ReportSet set = ReportSet::Full;
};

/// Throws ConfigError when the config cannot possibly run.
void validate_config(const RunConfig& config);

/// Overlays values from a flat key/value JSON file (keys mirror the CLI
/// flag names with underscores). Unknown keys or bad values are ConfigError.
void apply_config_file(RunConfig& config, const std::string& path);

/// Loads "spender,token" lines (hex addresses, blank lines ignored).
BehaviorCollector::PairFilter load_pair_filter(const std::string& path);

/// Runs the full pipeline per config: writes the requested report files
/// under config.out_dir, prints a one-screen summary to `out`, and returns
/// the process exit code (0 success, 1 runtime failure, 2 config error).
/// Failures emit one line of machine-readable JSON to `err`.
int run_pipeline(const RunConfig& config, std::ostream& out, std::ostream& err);

/// One-line machine-readable failure report, the same shape run_pipeline
/// writes to `err`: {"error":"<kind>","message":"..."}.
std::string error_json(const std::exception& e);

/// 2 for configuration-class failures (bad flags, infeasible generator
/// parameters), 1 for everything else.
int exit_code_for(const std::exception& e);

}  // namespace alens
