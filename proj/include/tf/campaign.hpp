#pragma once

#include <array>
#include <atomic>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "tf/mutators.hpp"

namespace tf {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SpawnError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TriggerCounter {
    std::string name;
    std::string pattern;  // ECMAScript regex; first capture group of digits
                          // adds its value, otherwise each match adds 1
};

struct HarnessSpec {
    std::vector<std::string> command;  // argv template, {input}/{pass}/{prep}
    std::string pass, prep;
    int timeout_ms = 2000;
    std::vector<TriggerCounter> counters;
    std::vector<std::string> validity_command;
    std::map<std::string, std::string> env;
};

struct CampaignConfig {
    std::string mode = "targeted";  // targeted | pipeline
    std::string grammar_path, annotation_path;
    std::string optimization_corpus_dir, seed_corpus_dir;
    HarnessSpec harness;
    long budget_iterations = -1;  // negative = unlimited
    long budget_seconds = -1;     // negative = unlimited
    uint64_t rng_seed = 0;
    std::string scheduler = "styles";  // styles | baseline-swap
    std::map<std::pair<std::string, std::string>, double> weights;  // (style,mutator)
    int workers = 1;
    std::string output_dir = "out";
};

CampaignConfig load_config(const std::string& path);

struct ExitStatus {
    enum Kind { Ok, NonZero, Signal, Timeout } kind = Ok;
    int detail = 0;  // exit code or signal number
};

struct RunResult {
    std::string input_id;
    ExitStatus exit;
    long duration_ms = 0;
    std::map<std::string, long> triggers;
    std::string crash_signature;  // nonempty iff signal or assertion pattern
    bool valid = false;
    std::string output_head;  // captured stdout+stderr (capped)
};

// Launch the harness on `program_text` written to a temp file under tmp_dir.
// Throws SpawnError when the binary cannot be executed at all.
RunResult execute(const HarnessSpec& harness, const std::string& program_text,
                  const std::string& input_id, const std::string& tmp_dir,
                  const std::string& ext);

std::string dedup_crash(const std::string& output);

// Owns everything the campaign iterates over; addresses must stay stable
// because Program keeps pointers into grammar/annotations.
struct Corpora {
    std::unique_ptr<Grammar> grammar;
    std::unique_ptr<AnnotationSet> ann;
    std::vector<Program> donors;
    std::vector<Program> recipients;
    MatchPool pool;
    int skipped = 0;
};

Corpora load_corpora(const CampaignConfig& config);

struct PlanEntry {
    long iteration = 0;
    std::string style;
    MutatorKind kind = MutatorKind::Replicate;
    const StyleMatch* match = nullptr;  // into pool
    int recipient = -1;
    uint64_t seed = 0;
};

// Admissible (style, mutator) pairs with pool support and positive weight.
std::vector<std::pair<std::string, MutatorKind>> schedule_support(
    const MatchPool& pool, const CampaignConfig& config);

PlanEntry schedule_next(const MatchPool& pool, const Corpora& corpora,
                        const CampaignConfig& config,
                        const std::vector<std::pair<std::string, MutatorKind>>& support,
                        Rng& rng);

struct PairStats {
    long attempts = 0, successes = 0;
    std::map<std::string, long> rejects;
    long triggers = 0;
};

struct CrashBucket {
    long count = 0;
    std::string reproducer_path;
    bool flaky = false;
};

struct CampaignReport {
    long iterations = 0;
    long valid_count = 0;
    double validity_rate = 0.0;
    std::map<std::string, long> triggers;
    std::map<std::string, CrashBucket> crashes;
    std::map<std::string, PairStats> per_pair;  // "Style/Mutator"
    // per-minute buckets: iterations, trigger sum, crashes
    std::vector<std::array<long, 3>> series;
    int skipped_corpus_files = 0;
};

// Runs the full campaign and writes report.json, report.csv, edits.jsonl and
// crash buckets under config.output_dir. Throws ConfigError / SpawnError.
CampaignReport run_campaign(const CampaignConfig& config);

// Cooperative interrupt flag (set from a SIGINT handler); a running campaign
// checks it between iterations and flushes its report when set.
extern std::atomic<bool> g_interrupted;

std::string report_to_json(const CampaignReport& r);
std::string report_to_csv(const CampaignReport& r);

}  // namespace tf
