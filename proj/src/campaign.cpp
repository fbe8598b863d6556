#include "tf/campaign.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <regex>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace tf {

std::atomic<bool> g_interrupted{false};

// ---------------------------------------------------------------------------
// Config

CampaignConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config: " + path);
    json j;
    try {
        j = json::parse(f);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config JSON: ") + e.what());
    }
    CampaignConfig c;
    try {
        c.mode = j.value("mode", "targeted");
        c.grammar_path = j.at("grammar").get<std::string>();
        c.annotation_path = j.at("annotations").get<std::string>();
        c.optimization_corpus_dir =
            j.at("optimization_corpus").get<std::string>();
        c.seed_corpus_dir = j.at("seed_corpus").get<std::string>();
        const json& h = j.at("harness");
        c.harness.command = h.at("command").get<std::vector<std::string>>();
        c.harness.pass = h.value("pass", "");
        c.harness.prep = h.value("prep", "");
        c.harness.timeout_ms = h.value("timeout_ms", 2000);
        if (h.contains("trigger_counters"))
            for (const auto& tc : h["trigger_counters"])
                c.harness.counters.push_back(
                    {tc.at("name").get<std::string>(),
                     tc.at("pattern").get<std::string>()});
        if (h.contains("validity_command"))
            c.harness.validity_command =
                h["validity_command"].get<std::vector<std::string>>();
        if (h.contains("env"))
            for (auto it = h["env"].begin(); it != h["env"].end(); ++it)
                c.harness.env[it.key()] = it.value().get<std::string>();
        if (j.contains("budget")) {
            c.budget_iterations = j["budget"].value("iterations", -1L);
            c.budget_seconds = j["budget"].value("seconds", -1L);
        }
        c.rng_seed = j.value("seed", 0ULL);
        c.scheduler = j.value("scheduler", "styles");
        c.workers = j.value("workers", 1);
        c.output_dir = j.value("output_dir", "out");
        if (j.contains("weights")) {
            for (auto it = j["weights"].begin(); it != j["weights"].end();
                 ++it) {
                std::string key = it.key();
                auto slash = key.find('/');
                if (slash == std::string::npos)
                    throw ConfigError("weight key must be Style/Mutator: " +
                                      key);
                c.weights[{key.substr(0, slash), key.substr(slash + 1)}] =
                    it.value().get<double>();
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config: ") + e.what());
    }

    if (c.mode != "targeted" && c.mode != "pipeline")
        throw ConfigError("mode must be targeted or pipeline");
    if (c.mode == "targeted" && c.harness.pass.empty())
        throw ConfigError("targeted mode requires harness.pass");
    if (c.harness.timeout_ms <= 0) throw ConfigError("timeout_ms must be > 0");
    bool has_input = false;
    for (const auto& a : c.harness.command)
        if (a.find("{input}") != std::string::npos) has_input = true;
    if (!has_input) throw ConfigError("harness.command must contain {input}");
    if (c.scheduler != "styles" && c.scheduler != "baseline-swap")
        throw ConfigError("scheduler must be styles or baseline-swap");
    if (c.workers < 1) throw ConfigError("workers must be >= 1");
    double wsum = 0;
    for (const auto& [k, v] : c.weights) {
        if (v < 0) throw ConfigError("weights must be nonnegative");
        wsum += v;
        if (!find_style(k.first)) throw ConfigError("unknown style " + k.first);
        mutator_from_name(k.second);
    }
    if (!c.weights.empty() && wsum == 0)
        throw ConfigError("weights must not be all zero");
    return c;
}

// ---------------------------------------------------------------------------
// Corpora

namespace {

std::string slurp_file(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<fs::path> sorted_files(const std::string& dir) {
    std::vector<fs::path> out;
    if (!fs::is_directory(dir))
        throw ConfigError("not a directory: " + dir);
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file()) out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

Corpora load_corpora(const CampaignConfig& config) {
    Corpora c;
    c.grammar =
        std::make_unique<Grammar>(load_grammar(slurp_file(config.grammar_path)));
    c.ann = std::make_unique<AnnotationSet>(
        load_annotations(slurp_file(config.annotation_path), *c.grammar));

    auto load_dir = [&](const std::string& dir, std::vector<Program>& out) {
        for (const auto& p : sorted_files(dir)) {
            try {
                out.push_back(analyze(*c.grammar, *c.ann, slurp_file(p),
                                      p.filename().string()));
            } catch (const std::exception& e) {
                fprintf(stderr, "warning: skipping %s: %s\n",
                        p.string().c_str(), e.what());
                ++c.skipped;
            }
        }
    };
    load_dir(config.optimization_corpus_dir, c.donors);
    load_dir(config.seed_corpus_dir, c.recipients);
    if (c.recipients.empty())
        throw ConfigError("seed corpus is empty: " + config.seed_corpus_dir);

    Bounds b;
    c.pool = extract_pool(c.donors, style_registry(), b);
    if (config.scheduler == "styles" && c.pool.size() == 0)
        throw ConfigError("optimization corpus yields no composition styles");
    return c;
}

// ---------------------------------------------------------------------------
// Scheduling

std::vector<std::pair<std::string, MutatorKind>> schedule_support(
    const MatchPool& pool, const CampaignConfig& config) {
    std::vector<std::pair<std::string, MutatorKind>> support;
    for (const auto& st : style_registry()) {
        if (pool.for_style(st.name).empty()) continue;
        for (MutatorKind k : st.allowed_mutators) {
            double w = 1.0;
            if (!config.weights.empty()) {
                auto it = config.weights.find({st.name, mutator_name(k)});
                w = it == config.weights.end() ? 0.0 : it->second;
            }
            if (w > 0) support.emplace_back(st.name, k);
        }
    }
    return support;
}

PlanEntry schedule_next(
    const MatchPool& pool, const Corpora& corpora,
    const CampaignConfig& config,
    const std::vector<std::pair<std::string, MutatorKind>>& support,
    Rng& rng) {
    PlanEntry e;
    // Weighted draw over the support.
    std::vector<double> w(support.size(), 1.0);
    if (!config.weights.empty())
        for (size_t i = 0; i < support.size(); ++i)
            w[i] = config.weights.at(
                {support[i].first, mutator_name(support[i].second)});
    double total = 0;
    for (double x : w) total += x;
    // Deterministic inverse-CDF draw on a 53-bit uniform.
    double u = (double)(rng.next() >> 11) / 9007199254740992.0 * total;
    size_t pick = 0;
    for (; pick + 1 < w.size(); ++pick) {
        if (u < w[pick]) break;
        u -= w[pick];
    }
    e.style = support[pick].first;
    e.kind = support[pick].second;
    auto matches = pool.for_style(e.style);
    e.match = matches[rng.uniform((int)matches.size())];
    e.recipient = rng.uniform((int)corpora.recipients.size());
    return e;
}

// ---------------------------------------------------------------------------
// Harness execution

namespace {

std::string substitute(std::string s, const HarnessSpec& h,
                       const std::string& input) {
    auto repl = [&](const std::string& key, const std::string& val) {
        size_t pos;
        while ((pos = s.find(key)) != std::string::npos)
            s.replace(pos, key.size(), val);
    };
    repl("{input}", input);
    repl("{pass}", h.pass);
    repl("{prep}", h.prep);
    return s;
}

constexpr size_t kOutputCap = 1 << 20;

struct ChildRun {
    ExitStatus status;
    std::string output;
    long duration_ms = 0;
};

ChildRun run_child(const std::vector<std::string>& argv,
                   const std::map<std::string, std::string>& env,
                   int timeout_ms) {
    int outp[2], failp[2];
    if (pipe(outp) != 0 || pipe(failp) != 0)
        throw SpawnError("pipe() failed");
    fcntl(failp[1], F_SETFD, FD_CLOEXEC);

    auto t0 = std::chrono::steady_clock::now();
    pid_t pid = fork();
    if (pid < 0) throw SpawnError("fork() failed");
    if (pid == 0) {
        setpgid(0, 0);
        dup2(outp[1], 1);
        dup2(outp[1], 2);
        close(outp[0]);
        close(outp[1]);
        close(failp[0]);
        for (const auto& [k, v] : env) setenv(k.c_str(), v.c_str(), 1);
        std::vector<char*> cargv;
        for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
        cargv.push_back(nullptr);
        execvp(cargv[0], cargv.data());
        int err = errno;
        (void)!write(failp[1], &err, sizeof err);
        _exit(127);
    }
    close(outp[1]);
    close(failp[1]);

    int err = 0;
    if (read(failp[0], &err, sizeof err) == sizeof err) {
        close(failp[0]);
        close(outp[0]);
        waitpid(pid, nullptr, 0);
        throw SpawnError("cannot execute " + argv[0] + ": " + strerror(err));
    }
    close(failp[0]);

    ChildRun r;
    bool timed_out = false;
    char buf[65536];
    while (true) {
        auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
        int remain = timeout_ms - (int)elapsed;
        if (remain <= 0) {
            timed_out = true;
            kill(-pid, SIGKILL);
            kill(pid, SIGKILL);
            break;
        }
        struct pollfd pfd = {outp[0], POLLIN, 0};
        int pr = poll(&pfd, 1, remain);
        if (pr <= 0) continue;  // timeout re-checked above
        ssize_t n = read(outp[0], buf, sizeof buf);
        if (n <= 0) break;  // EOF: child closed its end
        if (r.output.size() < kOutputCap)
            r.output.append(buf, buf + std::min((size_t)n,
                                                kOutputCap - r.output.size()));
    }
    close(outp[0]);
    int status = 0;
    waitpid(pid, &status, 0);
    r.duration_ms = (long)std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    if (timed_out) {
        r.status.kind = ExitStatus::Timeout;
    } else if (WIFSIGNALED(status)) {
        r.status.kind = ExitStatus::Signal;
        r.status.detail = WTERMSIG(status);
    } else {
        int code = WIFEXITED(status) ? WEXITSTATUS(status) : 0;
        r.status.kind = code == 0 ? ExitStatus::Ok : ExitStatus::NonZero;
        r.status.detail = code;
    }
    return r;
}

const std::regex& assertion_re() {
    static const std::regex re(
        "Assertion.*failed|assert(ion)? fail|UNREACHABLE|PLEASE submit a bug",
        std::regex::icase);
    return re;
}

}  // namespace

std::string dedup_crash(const std::string& output) {
    static const std::regex line_pick(
        "Assertion|assert|Segmentation|SIGSEGV|SIGABRT|Aborted|UNREACHABLE|"
        "Stack dump|#[0-9]+ |ERROR|FATAL|failed");
    static const std::regex addr("0x[0-9a-fA-F]+");
    static const std::regex path("(/[A-Za-z0-9_.+~-]+)+");
    static const std::regex lineno(":[0-9]+");

    std::vector<std::string> lines, picked;
    std::stringstream ss(output);
    std::string l;
    while (std::getline(ss, l))
        if (!l.empty()) lines.push_back(l);
    for (const auto& ln : lines)
        if (std::regex_search(ln, line_pick)) picked.push_back(ln);
    if (picked.empty()) picked = lines;
    if (picked.empty()) return "unknown-crash";
    if (picked.size() > 5) picked.resize(5);

    uint64_t h = 1469598103934665603ULL;  // FNV-1a
    for (auto& ln : picked) {
        ln = std::regex_replace(ln, addr, "0xX");
        ln = std::regex_replace(ln, path, "PATH");
        ln = std::regex_replace(ln, lineno, ":N");
        for (char ch : ln) {
            h ^= (unsigned char)ch;
            h *= 1099511628211ULL;
        }
        h ^= '\n';
        h *= 1099511628211ULL;
    }
    char buf[17];
    snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
    return buf;
}

RunResult execute(const HarnessSpec& harness, const std::string& program_text,
                  const std::string& input_id, const std::string& tmp_dir,
                  const std::string& ext) {
    fs::create_directories(tmp_dir);
    fs::path input = fs::path(tmp_dir) / (input_id + ext);
    {
        std::ofstream f(input, std::ios::binary);
        f << program_text;
    }
    std::vector<std::string> argv;
    for (const auto& a : harness.command)
        argv.push_back(substitute(a, harness, input.string()));

    ChildRun cr = run_child(argv, harness.env, harness.timeout_ms);

    RunResult r;
    r.input_id = input_id;
    r.exit = cr.status;
    r.duration_ms = cr.duration_ms;
    r.output_head = cr.output;

    if (cr.status.kind == ExitStatus::Ok ||
        cr.status.kind == ExitStatus::NonZero) {
        for (const auto& tc : harness.counters) {
            std::regex re(tc.pattern);
            long sum = 0;
            auto begin =
                std::sregex_iterator(cr.output.begin(), cr.output.end(), re);
            for (auto it = begin; it != std::sregex_iterator(); ++it) {
                const std::smatch& m = *it;
                if (m.size() > 1 && m[1].matched) {
                    try {
                        sum += std::stol(m[1].str());
                    } catch (...) {
                        sum += 1;
                    }
                } else {
                    sum += 1;
                }
            }
            r.triggers[tc.name] = sum;
        }
    }
    bool assertion = std::regex_search(cr.output, assertion_re());
    if (cr.status.kind == ExitStatus::Signal ||
        (cr.status.kind == ExitStatus::NonZero && assertion))
        r.crash_signature = dedup_crash(cr.output);

    if (!harness.validity_command.empty()) {
        std::vector<std::string> vargv;
        for (const auto& a : harness.validity_command)
            vargv.push_back(substitute(a, harness, input.string()));
        ChildRun v = run_child(vargv, harness.env, harness.timeout_ms);
        r.valid = v.status.kind == ExitStatus::Ok;
    }
    std::error_code ec;
    fs::remove(input, ec);
    return r;
}

// ---------------------------------------------------------------------------
// Baseline scheduler: uniform random same-kind parse-subtree swap.

namespace {

std::string baseline_swap(const Program& p, Rng& rng) {
    // Non-leaf nodes with nonempty spans, grouped by rule kind.
    std::map<std::string, std::vector<int>> by_kind;
    for (int i = 0; i < (int)p.pt.nodes.size(); ++i) {
        const ParseNode& n = p.pt.nodes[i];
        if (n.token >= 0 || n.first_token > n.last_token) continue;
        by_kind[n.kind].push_back(i);
    }
    // All disjoint same-kind pairs.
    std::vector<std::pair<int, int>> pairs;
    for (const auto& [kind, nodes] : by_kind)
        for (size_t i = 0; i < nodes.size(); ++i)
            for (size_t j = i + 1; j < nodes.size(); ++j) {
                auto [as, ae] = p.pt.byte_span(nodes[i]);
                auto [bs, be] = p.pt.byte_span(nodes[j]);
                if (ae <= bs || be <= as) pairs.emplace_back(nodes[i], nodes[j]);
            }
    if (pairs.empty()) return p.pt.source;
    auto [a, c] = pairs[rng.uniform((int)pairs.size())];
    auto [as, ae] = p.pt.byte_span(a);
    auto [bs, be] = p.pt.byte_span(c);
    if (as > bs) {
        std::swap(as, bs);
        std::swap(ae, be);
    }
    std::string sa = p.pt.source.substr(as, ae - as);
    std::string sb = p.pt.source.substr(bs, be - bs);
    std::string out = p.pt.source;
    out.replace(bs, be - bs, sa);
    out.replace(as, ae - as, sb);
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Reports

std::string report_to_json(const CampaignReport& r) {
    json j;
    j["totals"] = {{"iterations", r.iterations},
                   {"valid_count", r.valid_count},
                   {"validity_rate", r.validity_rate},
                   {"triggers", r.triggers},
                   {"skipped_corpus_files", r.skipped_corpus_files}};
    json crashes = json::object();
    for (const auto& [sig, b] : r.crashes)
        crashes[sig] = {{"count", b.count},
                        {"reproducer", b.reproducer_path},
                        {"flaky", b.flaky}};
    j["crashes"] = crashes;
    json pairs = json::object();
    for (const auto& [key, s] : r.per_pair)
        pairs[key] = {{"attempts", s.attempts},
                      {"successes", s.successes},
                      {"rejects", s.rejects},
                      {"triggers", s.triggers}};
    j["per_pair"] = pairs;
    json series = json::array();
    for (size_t i = 0; i < r.series.size(); ++i)
        series.push_back({{"minute", i},
                          {"iterations", r.series[i][0]},
                          {"triggers", r.series[i][1]},
                          {"crashes", r.series[i][2]}});
    j["series"] = series;
    return j.dump(2);
}

std::string report_to_csv(const CampaignReport& r) {
    std::string out = "minute,iterations,triggers,crashes\n";
    for (size_t i = 0; i < r.series.size(); ++i)
        out += std::to_string(i) + "," + std::to_string(r.series[i][0]) + "," +
               std::to_string(r.series[i][1]) + "," +
               std::to_string(r.series[i][2]) + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// Campaign loop

namespace {

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ULL;
    for (char c : s) {
        h ^= (unsigned char)c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string lang_ext(const std::string& language) {
    if (language == "mini-c") return ".c";
    if (language == "mini-ir") return ".mlir";
    return ".txt";
}

struct Job {
    long iteration = 0;
    std::string pair_key;     // "Style/Mutator" or "baseline-swap"
    bool has_program = false;
    bool valid = false;
    std::string text;
    std::string reject = "None";
    json edit_record;
};

}  // namespace

CampaignReport run_campaign(const CampaignConfig& config) {
    Corpora corp = load_corpora(config);
    CampaignReport rep;
    rep.skipped_corpus_files = corp.skipped;

    fs::create_directories(config.output_dir);
    fs::create_directories(fs::path(config.output_dir) / "crashes");
    std::string tmp_dir = (fs::path(config.output_dir) / "tmp").string();
    std::string ext = lang_ext(corp.ann->language);

    std::vector<std::pair<std::string, MutatorKind>> support;
    if (config.scheduler == "styles") {
        support = schedule_support(corp.pool, config);
        if (support.empty())
            throw ConfigError("no (style, mutator) pair has pool support and "
                              "positive weight");
    }

    Rng sched_rng(config.rng_seed);
    Bounds bounds;
    std::ofstream edits(fs::path(config.output_dir) / "edits.jsonl");

    auto t0 = std::chrono::steady_clock::now();
    auto elapsed_ms = [&] {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - t0)
            .count();
    };
    auto budget_left = [&](long iter) {
        if (config.budget_iterations >= 0 && iter >= config.budget_iterations)
            return false;
        if (config.budget_seconds >= 0 &&
            elapsed_ms() >= config.budget_seconds * 1000)
            return false;
        return true;
    };

    long iter = 0;
    while (!g_interrupted.load() && budget_left(iter)) {
        // Build one batch of plans sequentially (seed-deterministic), then
        // execute the surviving programs in parallel.
        std::vector<Job> batch;
        for (int w = 0; w < config.workers && budget_left(iter) &&
                        !g_interrupted.load();
             ++w, ++iter) {
            Job job;
            job.iteration = iter;
            uint64_t seed = mix_seed(config.rng_seed, (uint64_t)iter);
            if (config.scheduler == "styles") {
                PlanEntry plan =
                    schedule_next(corp.pool, corp, config, support, sched_rng);
                plan.iteration = iter;
                plan.seed = seed;
                job.pair_key = plan.style + "/" + mutator_name(plan.kind);
                const Program& donor = corp.donors[plan.match->program_index];
                const Program& recip = corp.recipients[plan.recipient];
                MutationOutcome out = mutate(donor, recip, *plan.match,
                                             plan.kind, seed, bounds);
                job.has_program = out.ok;
                job.valid = out.ok && out.prog.reparse_ok;
                job.text = out.prog.text;
                job.reject = reject_name(out.reject);
                job.edit_record = {{"iteration", iter},
                                   {"style", plan.style},
                                   {"mutator", mutator_name(plan.kind)},
                                   {"donor", donor.id},
                                   {"recipient", recip.id},
                                   {"seed", seed},
                                   {"ok", out.ok},
                                   {"reject", job.reject},
                                   {"text_fnv1a", out.ok ? fnv1a(out.prog.text)
                                                         : 0}};
            } else {
                int ri = sched_rng.uniform((int)corp.recipients.size());
                const Program& recip = corp.recipients[ri];
                Rng jr(seed);
                job.pair_key = "baseline-swap";
                job.text = baseline_swap(recip, jr);
                job.has_program = true;
                try {
                    parse(*corp.grammar, job.text);
                    job.valid = true;
                } catch (const std::exception&) {
                    job.valid = false;
                }
                job.edit_record = {{"iteration", iter},
                                   {"style", "baseline-swap"},
                                   {"recipient", recip.id},
                                   {"seed", seed},
                                   {"ok", true},
                                   {"text_fnv1a", fnv1a(job.text)}};
            }
            batch.push_back(std::move(job));
        }

        // Execute in parallel.
        std::vector<std::future<RunResult>> futs(batch.size());
        for (size_t i = 0; i < batch.size(); ++i) {
            if (!batch[i].has_program) continue;
            const Job& job = batch[i];
            futs[i] = std::async(std::launch::async, [&, i] {
                return execute(config.harness, batch[i].text,
                               "it" + std::to_string(batch[i].iteration),
                               tmp_dir, ext);
            });
        }

        // Aggregate in iteration order.
        for (size_t i = 0; i < batch.size(); ++i) {
            Job& job = batch[i];
            ++rep.iterations;
            PairStats& ps = rep.per_pair[job.pair_key];
            ++ps.attempts;
            long minute = elapsed_ms() / 60000;
            if ((long)rep.series.size() <= minute)
                rep.series.resize(minute + 1, {0, 0, 0});
            rep.series[minute][0]++;

            if (!job.has_program) {
                ++ps.rejects[job.reject];
                edits << job.edit_record.dump() << "\n";
                continue;
            }
            ++ps.successes;
            if (job.valid) ++rep.valid_count;

            RunResult rr = futs[i].get();
            long trig_sum = 0;
            for (const auto& [name, n] : rr.triggers) {
                rep.triggers[name] += n;
                trig_sum += n;
            }
            ps.triggers += trig_sum;
            rep.series[minute][1] += trig_sum;

            if (!rr.crash_signature.empty()) {
                rep.series[minute][2]++;
                CrashBucket& b = rep.crashes[rr.crash_signature];
                ++b.count;
                if (b.reproducer_path.empty()) {
                    fs::path dir = fs::path(config.output_dir) / "crashes" /
                                   rr.crash_signature;
                    fs::create_directories(dir);
                    fs::path repro = dir / ("reproducer" + ext);
                    {
                        std::ofstream f(repro, std::ios::binary);
                        f << job.text;
                    }
                    {
                        std::ofstream f(dir / "provenance.json");
                        f << job.edit_record.dump(2) << "\n";
                    }
                    b.reproducer_path = repro.string();
                    // One re-check; mismatch marks the bucket flaky.
                    RunResult again =
                        execute(config.harness, job.text,
                                "recheck-" + rr.crash_signature, tmp_dir, ext);
                    if (again.crash_signature != rr.crash_signature)
                        b.flaky = true;
                }
            }
            job.edit_record["triggers"] = trig_sum;
            edits << job.edit_record.dump() << "\n";
        }
    }

    rep.validity_rate =
        rep.iterations > 0 ? (double)rep.valid_count / rep.iterations : 0.0;
    {
        std::ofstream f(fs::path(config.output_dir) / "report.json");
        f << report_to_json(rep) << "\n";
    }
    {
        std::ofstream f(fs::path(config.output_dir) / "report.csv");
        f << report_to_csv(rep);
    }
    std::error_code ec;
    fs::remove_all(tmp_dir, ec);
    return rep;
}

}  // namespace tf
