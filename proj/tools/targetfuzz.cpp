#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tf/campaign.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace tf;

namespace {

// Exit codes: 0 ok, 1 input-data failure, 2 usage/config, 3 environment,
// 4 edit rejected.
constexpr int kOk = 0, kDataError = 1, kUsage = 2, kEnv = 3, kRejected = 4;

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct Lang {
    Grammar g;
    AnnotationSet ann;
};

Lang load_lang(const std::string& grammar_path, const std::string& ann_path) {
    Lang l;
    l.g = load_grammar(slurp(grammar_path));
    l.ann = load_annotations(slurp(ann_path), l.g);
    return l;
}

json parse_tree_json(const ParseTree& t, int node) {
    const ParseNode& n = t.nodes[node];
    json j;
    j["kind"] = n.kind;
    auto [s, e] = t.byte_span(node);
    j["byte_start"] = s;
    j["byte_end"] = e;
    if (n.token >= 0) {
        j["text"] = t.tokens[n.token].text;
    } else {
        j["alt"] = n.alt_index;
        json kids = json::array();
        for (int c : n.children) kids.push_back(parse_tree_json(t, c));
        j["children"] = kids;
    }
    return j;
}

json construct_tree_json(const Program& p, int node) {
    const ConstructNode& n = p.ct.nodes[node];
    json j;
    j["type"] = n.ctype;
    auto [s, e] = p.pt.byte_span(n.parse_ref);
    j["byte_start"] = s;
    j["byte_end"] = e;
    json kids = json::array();
    for (int c : n.children) kids.push_back(construct_tree_json(p, c));
    j["children"] = kids;
    return j;
}

json decl_use_json(const Program& p) {
    json defs = json::array();
    for (const auto& d : p.chains.defs)
        defs.push_back({{"name", d.name},
                        {"type", d.type_label},
                        {"scope_type", p.ct.nodes[d.scope].ctype},
                        {"token", d.name_token}});
    json uses = json::array();
    for (const auto& u : p.chains.uses)
        uses.push_back(
            {{"name", u.name}, {"token", u.name_token}, {"def", u.def}});
    return {{"defs", defs}, {"uses", uses}};
}

int parse_bounds(const std::string& spec, Bounds& b) {
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) {
            std::cerr << "bad bounds item: " << item << "\n";
            return kUsage;
        }
        std::string key = item.substr(0, eq);
        int val;
        try {
            val = std::stoi(item.substr(eq + 1));
        } catch (...) {
            std::cerr << "bad bounds value: " << item << "\n";
            return kUsage;
        }
        if (key == "k") {
            b.cousins_k = val;
        } else if (key == "d") {
            b.cousins_d = b.nesting_d = b.balanced_d = val;
        } else if (key == "l") {
            b.sequence_min = b.exists_min_tokens = val;
        } else if (key == "cap") {
            b.cap = val;
        } else {
            std::cerr << "unknown bounds key: " << key << "\n";
            return kUsage;
        }
    }
    return kOk;
}

void handle_sigint(int) { g_interrupted.store(true); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Grammar-driven compiler-optimization fuzzer"};
    app.require_subcommand(1);

    // ---- parse ----
    auto* cmd_parse = app.add_subcommand("parse", "Parse one program and dump trees");
    std::string p_grammar, p_ann, p_file, p_emit = "construct-tree";
    cmd_parse->add_option("--grammar", p_grammar)->required();
    cmd_parse->add_option("--annotations", p_ann)->required();
    cmd_parse->add_option("program", p_file)->required();
    cmd_parse->add_option("--emit", p_emit)
        ->check(CLI::IsMember({"parse-tree", "construct-tree", "decl-use"}));

    // ---- scan ----
    auto* cmd_scan = app.add_subcommand("scan", "Scan a corpus for style matches");
    std::string s_grammar, s_ann, s_path, s_style, s_bounds;
    cmd_scan->add_option("--grammar", s_grammar)->required();
    cmd_scan->add_option("--annotations", s_ann)->required();
    cmd_scan->add_option("corpus", s_path)->required();
    cmd_scan->add_option("--style", s_style)->required();
    cmd_scan->add_option("--bounds", s_bounds);

    // ---- mutate ----
    auto* cmd_mutate = app.add_subcommand("mutate", "Apply one mutation");
    std::string m_grammar, m_ann, m_donor, m_recipient, m_style, m_mutator;
    std::string m_out, m_prov;
    uint64_t m_seed = 0;
    int m_index = 0;
    cmd_mutate->add_option("--grammar", m_grammar)->required();
    cmd_mutate->add_option("--annotations", m_ann)->required();
    cmd_mutate->add_option("--donor", m_donor)->required();
    cmd_mutate->add_option("--recipient", m_recipient)->required();
    cmd_mutate->add_option("--style", m_style)->required();
    cmd_mutate->add_option("--mutator", m_mutator)->required();
    cmd_mutate->add_option("--seed", m_seed);
    cmd_mutate->add_option("--match-index", m_index);
    cmd_mutate->add_option("-o,--output", m_out);
    cmd_mutate->add_option("--provenance", m_prov);

    // ---- fuzz ----
    auto* cmd_fuzz = app.add_subcommand("fuzz", "Run a fuzzing campaign");
    std::string f_config;
    cmd_fuzz->add_option("config", f_config)->required();

    // ---- report ----
    auto* cmd_report = app.add_subcommand("report", "Summarize campaign output");
    std::string r_dir, r_format = "table";
    cmd_report->add_option("output_dir", r_dir)->required();
    cmd_report->add_option("--format", r_format)
        ->check(CLI::IsMember({"table", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        if (*cmd_parse) {
            Lang l = load_lang(p_grammar, p_ann);
            Program prog;
            try {
                prog = analyze(l.g, l.ann, slurp(p_file), p_file);
            } catch (const std::exception& e) {
                std::cerr << e.what() << "\n";
                return kDataError;
            }
            json out;
            if (p_emit == "parse-tree")
                out = parse_tree_json(prog.pt, prog.pt.root);
            else if (p_emit == "construct-tree")
                out = construct_tree_json(prog, 0);
            else
                out = decl_use_json(prog);
            std::cout << out.dump(2) << "\n";
            return kOk;
        }

        if (*cmd_scan) {
            const CompositionStyle* style = find_style(s_style);
            if (!style) {
                std::cerr << "unknown style: " << s_style << "\n";
                return kUsage;
            }
            Bounds b;
            if (!s_bounds.empty()) {
                int rc = parse_bounds(s_bounds, b);
                if (rc != kOk) return rc;
            }
            Lang l = load_lang(s_grammar, s_ann);
            std::vector<std::string> files;
            if (fs::is_directory(s_path)) {
                for (const auto& e : fs::directory_iterator(s_path))
                    if (e.is_regular_file()) files.push_back(e.path().string());
                std::sort(files.begin(), files.end());
            } else {
                files.push_back(s_path);
            }
            for (const auto& file : files) {
                Program prog;
                try {
                    prog = analyze(l.g, l.ann, slurp(file), file);
                } catch (const std::exception& e) {
                    std::cerr << "warning: skipping " << file << ": "
                              << e.what() << "\n";
                    continue;
                }
                for (const auto& m : scan(*style, prog, b))
                    std::cout << match_to_jsonl(prog, m) << "\n";
            }
            return kOk;
        }

        if (*cmd_mutate) {
            const CompositionStyle* style = find_style(m_style);
            if (!style) {
                std::cerr << "unknown style: " << m_style << "\n";
                return kUsage;
            }
            MutatorKind kind;
            try {
                kind = mutator_from_name(m_mutator);
            } catch (const std::exception&) {
                std::cerr << "unknown mutator: " << m_mutator << "\n";
                return kUsage;
            }
            if (!style->allows(kind)) {
                std::cerr << "mutator not allowed for style\n";
                return kUsage;
            }
            Lang l = load_lang(m_grammar, m_ann);
            Program donor, recip;
            try {
                donor = analyze(l.g, l.ann, slurp(m_donor), m_donor);
                recip = analyze(l.g, l.ann, slurp(m_recipient), m_recipient);
            } catch (const std::exception& e) {
                std::cerr << e.what() << "\n";
                return kDataError;
            }
            Bounds b;
            auto matches = scan(*style, donor, b);
            if (matches.empty() || m_index < 0 ||
                m_index >= (int)matches.size()) {
                std::cerr << "no " << m_style << " match at index " << m_index
                          << " in donor\n";
                return kDataError;
            }
            MutationOutcome out =
                mutate(donor, recip, matches[m_index], kind, m_seed, b);
            json prov = {{"donor", donor.id},
                         {"recipient", recip.id},
                         {"style", m_style},
                         {"mutator", m_mutator},
                         {"seed", m_seed},
                         {"ok", out.ok},
                         {"reject", reject_name(out.reject)}};
            json rebinds = json::array();
            for (const auto& rb : out.prog.rebinds)
                rebinds.push_back({{"from", rb.name}, {"to", rb.new_name}});
            prov["rebinds"] = rebinds;
            if (!m_prov.empty()) {
                std::ofstream f(m_prov);
                f << prov.dump(2) << "\n";
            }
            if (!out.ok) {
                std::cerr << "edit rejected: " << reject_name(out.reject)
                          << "\n";
                return kRejected;
            }
            if (m_out.empty()) {
                std::cout << out.prog.text;
            } else {
                std::ofstream f(m_out, std::ios::binary);
                f << out.prog.text;
            }
            return kOk;
        }

        if (*cmd_fuzz) {
            CampaignConfig config;
            try {
                config = load_config(f_config);
            } catch (const ConfigError& e) {
                std::cerr << e.what() << "\n";
                return kUsage;
            }
            std::signal(SIGINT, handle_sigint);
            CampaignReport rep;
            try {
                rep = run_campaign(config);
            } catch (const ConfigError& e) {
                std::cerr << e.what() << "\n";
                return kUsage;
            } catch (const SpawnError& e) {
                std::cerr << e.what() << "\n";
                return kEnv;
            }
            long trig = 0;
            for (const auto& [k, v] : rep.triggers) trig += v;
            std::cout << "iterations=" << rep.iterations
                      << " validity_rate=" << rep.validity_rate
                      << " triggers=" << trig
                      << " crash_buckets=" << rep.crashes.size() << "\n";
            return kOk;
        }

        if (*cmd_report) {
            fs::path rp = fs::path(r_dir) / "report.json";
            if (!fs::exists(rp)) {
                std::cerr << "no report found\n";
                return kDataError;
            }
            json j = json::parse(slurp(rp.string()));
            if (r_format == "csv") {
                std::cout << slurp((fs::path(r_dir) / "report.csv").string());
                return kOk;
            }
            std::cout << "iterations: " << j["totals"]["iterations"] << "\n"
                      << "validity_rate: " << j["totals"]["validity_rate"]
                      << "\n";
            std::cout << "triggers:";
            for (auto it = j["totals"]["triggers"].begin();
                 it != j["totals"]["triggers"].end(); ++it)
                std::cout << " " << it.key() << "=" << *it;
            std::cout << "\n";
            std::cout << "pair                          attempts successes triggers\n";
            for (auto it = j["per_pair"].begin(); it != j["per_pair"].end();
                 ++it) {
                char line[128];
                snprintf(line, sizeof line, "%-29s %8ld %9ld %8ld",
                         it.key().c_str(),
                         (long)(*it)["attempts"].get<long>(),
                         (long)(*it)["successes"].get<long>(),
                         (long)(*it)["triggers"].get<long>());
                std::cout << line << "\n";
            }
            std::cout << "crash buckets: " << j["crashes"].size() << "\n";
            return kOk;
        }
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kDataError;
    }
    return kUsage;
}
