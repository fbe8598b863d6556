#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "helpers.hpp"
#include "tf/campaign.hpp"

using namespace tf;
using json = nlohmann::json;
namespace fs = std::filesystem;
using tftest::fixture;
using tftest::slurp;

namespace {

fs::path scratch_dir(const std::string& tag) {
    fs::path d = fs::temp_directory_path() /
                 ("tf-test-" + std::to_string(getpid()) + "-" + tag);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string write_file(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    f << text;
    return p.string();
}

json base_config(const fs::path& out, const std::string& pass_mode) {
    json j;
    j["mode"] = "targeted";
    j["grammar"] = fixture("grammars/mini-c.g");
    j["annotations"] = fixture("annotations/mini-c.ann");
    j["optimization_corpus"] = fixture("corpus/mini-c/opt");
    j["seed_corpus"] = fixture("corpus/mini-c/seed");
    j["harness"] = {
        {"command", {TF_FAKE_PASS, "{pass}", "{input}"}},
        {"pass", pass_mode},
        {"timeout_ms", 5000},
        {"trigger_counters",
         {{{"name", "fusion"}, {"pattern", "fused: (\\d+)"}}}},
    };
    j["budget"] = {{"iterations", 20}};
    j["seed"] = 7;
    j["workers"] = 1;
    j["output_dir"] = out.string();
    return j;
}

HarnessSpec fake_harness(const std::string& mode, int timeout_ms = 5000) {
    HarnessSpec h;
    h.command = {TF_FAKE_PASS, mode, "{input}"};
    h.pass = mode;
    h.timeout_ms = timeout_ms;
    h.counters = {{"fusion", "fused: (\\d+)"}};
    return h;
}

std::vector<uint64_t> edit_hashes(const fs::path& out) {
    std::vector<uint64_t> hashes;
    std::ifstream f(out / "edits.jsonl");
    std::string line;
    while (std::getline(f, line)) {
        auto j = json::parse(line);
        hashes.push_back(j.value("text_fnv1a", 0ULL));
    }
    return hashes;
}

}  // namespace

TEST_CASE("config validation") {
    fs::path d = scratch_dir("cfg");
    CHECK_THROWS_AS(load_config((d / "absent.json").string()), ConfigError);
    CHECK_THROWS_AS(load_config(write_file(d / "bad.json", "{ nope")),
                    ConfigError);

    json good = base_config(d / "out", "fusion");
    CampaignConfig c = load_config(write_file(d / "good.json", good.dump()));
    CHECK(c.mode == "targeted");
    CHECK(c.budget_iterations == 20);
    CHECK(c.harness.counters.size() == 1);
    CHECK(c.harness.counters[0].name == "fusion");

    auto broken = [&](const char* name, json j) {
        return write_file(d / name, j.dump());
    };
    json j = good;
    j["mode"] = "sideways";
    CHECK_THROWS_AS(load_config(broken("mode.json", j)), ConfigError);
    j = good;
    j["harness"]["command"] = {TF_FAKE_PASS, "fusion"};  // no {input}
    CHECK_THROWS_AS(load_config(broken("noinput.json", j)), ConfigError);
    j = good;
    j["harness"]["timeout_ms"] = 0;
    CHECK_THROWS_AS(load_config(broken("timeout.json", j)), ConfigError);
    j = good;
    j["harness"].erase("pass");
    CHECK_THROWS_AS(load_config(broken("nopass.json", j)), ConfigError);
    j = good;
    j["scheduler"] = "mystery";
    CHECK_THROWS_AS(load_config(broken("sched.json", j)), ConfigError);
    j = good;
    j["weights"] = {{"CousinsReplicate", 1.0}};  // missing slash
    CHECK_THROWS_AS(load_config(broken("wkey.json", j)), ConfigError);
    j = good;
    j["weights"] = {{"Cousins/Replicate", -1.0}};
    CHECK_THROWS_AS(load_config(broken("wneg.json", j)), ConfigError);
    j = good;
    j["weights"] = {{"NoStyle/Replicate", 1.0}};
    CHECK_THROWS_AS(load_config(broken("wstyle.json", j)), ConfigError);
    j = good;
    j["weights"] = {{"Cousins/Replicate", 0.0}};
    CHECK_THROWS_AS(load_config(broken("wzero.json", j)), ConfigError);
}

TEST_CASE("execute counts triggers from harness output") {
    fs::path d = scratch_dir("exec");
    RunResult r = execute(fake_harness("fusion"),
                          slurp(fixture("pairs/fusion_donor.c")), "t1",
                          d.string(), ".c");
    CHECK(r.exit.kind == ExitStatus::Ok);
    CHECK(r.triggers.at("fusion") == 1);
    CHECK(r.crash_signature.empty());
}

TEST_CASE("execute reports signals with a crash signature") {
    fs::path d = scratch_dir("exec2");
    RunResult r = execute(fake_harness("crash-adjacent"),
                          slurp(fixture("pairs/fusion_donor.c")), "t1",
                          d.string(), ".c");
    CHECK(r.exit.kind == ExitStatus::Signal);
    CHECK(!r.crash_signature.empty());
}

TEST_CASE("execute flags assertion failures on nonzero exits") {
    fs::path d = scratch_dir("exec3");
    RunResult r = execute(fake_harness("fusion"),
                          "int x = 1; // __planted_assert\n", "t1", d.string(),
                          ".c");
    CHECK(r.exit.kind == ExitStatus::NonZero);
    CHECK(!r.crash_signature.empty());
}

TEST_CASE("execute enforces the timeout") {
    fs::path d = scratch_dir("exec4");
    RunResult r = execute(fake_harness("sleep", 100), "int x = 1;", "t1",
                          d.string(), ".c");
    CHECK(r.exit.kind == ExitStatus::Timeout);
    CHECK(r.duration_ms >= 100);
    CHECK(r.duration_ms < 5000);
}

TEST_CASE("execute throws when the harness binary is missing") {
    fs::path d = scratch_dir("exec5");
    HarnessSpec h;
    h.command = {"/no/such/binary-xyz", "{input}"};
    h.timeout_ms = 1000;
    CHECK_THROWS_AS(execute(h, "x", "t1", d.string(), ".c"), SpawnError);
}

TEST_CASE("crash dedup normalizes volatile details") {
    std::string a =
        "fake: /tmp/a1b2/in.c:14: Assertion `p != nullptr' failed at 0x7fff12\n";
    std::string b =
        "fake: /var/run/zz/in.c:99: Assertion `p != nullptr' failed at 0xdead\n";
    CHECK(dedup_crash(a) == dedup_crash(b));
    CHECK(dedup_crash(a) != dedup_crash("Assertion `q != 0' failed\n"));
    CHECK(dedup_crash("") == "unknown-crash");
}

TEST_CASE("load_corpora builds a pool and skips broken files") {
    fs::path d = scratch_dir("corp");
    fs::path opt = d / "opt";
    fs::create_directories(opt);
    fs::copy(fixture("corpus/mini-c/opt"), opt,
             fs::copy_options::recursive | fs::copy_options::overwrite_existing);
    write_file(opt / "broken.c", "int f( {{{{");
    json j = base_config(d / "out", "fusion");
    j["optimization_corpus"] = opt.string();
    CampaignConfig c =
        load_config(write_file(d / "cfg.json", j.dump()));
    Corpora corp = load_corpora(c);
    CHECK(corp.skipped == 1);
    CHECK(corp.recipients.size() == 20);
    CHECK(!corp.pool.for_style("Cousins").empty());

    // empty seed corpus is fatal
    fs::path empty = d / "empty";
    fs::create_directories(empty);
    json j2 = base_config(d / "out2", "fusion");
    j2["seed_corpus"] = empty.string();
    CampaignConfig c2 = load_config(write_file(d / "cfg2.json", j2.dump()));
    CHECK_THROWS_AS(load_corpora(c2), ConfigError);
}

TEST_CASE("scheduling respects weights and pool support") {
    fs::path d = scratch_dir("sched");
    json j = base_config(d / "out", "fusion");
    j["weights"] = {{"Cousins/Replicate", 1.0}};
    CampaignConfig c = load_config(write_file(d / "cfg.json", j.dump()));
    Corpora corp = load_corpora(c);

    auto support = schedule_support(corp.pool, c);
    REQUIRE(support.size() == 1);
    CHECK(support[0].first == "Cousins");
    CHECK(support[0].second == MutatorKind::Replicate);
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        PlanEntry e = schedule_next(corp.pool, corp, c, support, rng);
        CHECK(e.style == "Cousins");
        CHECK(e.kind == MutatorKind::Replicate);
        CHECK(e.match != nullptr);
        CHECK(e.recipient >= 0);
        CHECK(e.recipient < (int)corp.recipients.size());
    }

    // default weights: uniform over supported pairs, chi-square sanity
    CampaignConfig cu = c;
    cu.weights.clear();
    auto usupport = schedule_support(corp.pool, cu);
    REQUIRE(usupport.size() > 1);
    std::map<std::string, long> counts;
    Rng urng(11);
    const long N = 10000;
    for (long i = 0; i < N; ++i) {
        PlanEntry e = schedule_next(corp.pool, corp, cu, usupport, urng);
        counts[e.style + "/" + mutator_name(e.kind)]++;
    }
    double p = 1.0 / (double)usupport.size();
    double sigma = std::sqrt(N * p * (1 - p));
    for (const auto& pair : usupport) {
        long n = counts[pair.first + "/" + mutator_name(pair.second)];
        CHECK(std::abs(n - N * p) <= 3.5 * sigma);
    }
}

TEST_CASE("a small campaign produces a complete report") {
    fs::path d = scratch_dir("camp");
    json j = base_config(d / "out", "fusion");
    CampaignConfig c = load_config(write_file(d / "cfg.json", j.dump()));
    CampaignReport rep = run_campaign(c);
    CHECK(rep.iterations == 20);
    CHECK(rep.valid_count <= rep.iterations);
    CHECK(rep.validity_rate == doctest::Approx((double)rep.valid_count / 20));
    CHECK(rep.crashes.empty());
    CHECK(fs::exists(d / "out" / "report.json"));
    CHECK(fs::exists(d / "out" / "report.csv"));
    CHECK(edit_hashes(d / "out").size() == 20);
    long attempts = 0;
    for (const auto& [k, s] : rep.per_pair) attempts += s.attempts;
    CHECK(attempts == 20);
    auto parsed = json::parse(slurp((d / "out" / "report.json").string()));
    CHECK(parsed["totals"]["iterations"] == 20);
}

TEST_CASE("zero-iteration budget yields an empty report") {
    fs::path d = scratch_dir("camp0");
    json j = base_config(d / "out", "fusion");
    j["budget"] = {{"iterations", 0}};
    CampaignConfig c = load_config(write_file(d / "cfg.json", j.dump()));
    CampaignReport rep = run_campaign(c);
    CHECK(rep.iterations == 0);
    CHECK(rep.valid_count == 0);
    CHECK(rep.validity_rate == 0.0);
    CHECK(rep.triggers.empty());
}

TEST_CASE("edit sequence is seed-deterministic and worker-independent") {
    std::vector<std::vector<uint64_t>> runs;
    for (int workers : {1, 4, 1}) {
        fs::path d = scratch_dir("det" + std::to_string(runs.size()));
        json j = base_config(d / "out", "fusion");
        j["workers"] = workers;
        j["budget"] = {{"iterations", 12}};
        CampaignConfig c = load_config(write_file(d / "cfg.json", j.dump()));
        run_campaign(c);
        runs.push_back(edit_hashes(d / "out"));
    }
    CHECK(runs[0] == runs[1]);
    CHECK(runs[0] == runs[2]);
}

TEST_CASE("crashes are bucketed with a reproducing input") {
    fs::path d = scratch_dir("crash");
    json j = base_config(d / "out", "crash-adjacent");
    j["weights"] = {{"Cousins/Replicate", 1.0}, {"Cousins/Insert", 1.0}};
    j["budget"] = {{"iterations", 40}};
    CampaignConfig c = load_config(write_file(d / "cfg.json", j.dump()));
    CampaignReport rep = run_campaign(c);
    REQUIRE(!rep.crashes.empty());
    for (const auto& [sig, bucket] : rep.crashes) {
        CHECK(bucket.count >= 1);
        CHECK_FALSE(bucket.flaky);
        REQUIRE(fs::exists(bucket.reproducer_path));
        // the stored reproducer re-triggers the same signature
        RunResult r = execute(fake_harness("crash-adjacent"),
                              slurp(bucket.reproducer_path), "re",
                              (d / "re").string(), ".c");
        CHECK(r.crash_signature == sig);
        fs::path prov =
            fs::path(bucket.reproducer_path).parent_path() / "provenance.json";
        CHECK(fs::exists(prov));
    }
}

TEST_CASE("baseline scheduler swaps subtrees and reports normally") {
    fs::path d = scratch_dir("base");
    json j = base_config(d / "out", "fusion");
    j["scheduler"] = "baseline-swap";
    j["budget"] = {{"iterations", 10}};
    CampaignConfig c = load_config(write_file(d / "cfg.json", j.dump()));
    CampaignReport rep = run_campaign(c);
    CHECK(rep.iterations == 10);
    CHECK(rep.per_pair.count("baseline-swap") == 1);
    CHECK(rep.per_pair.at("baseline-swap").attempts == 10);
}
