#include <doctest.h>

#include <json.hpp>

#include "helpers.hpp"
#include "oracle.hpp"
#include "tf/styles.hpp"

using namespace tf;
using tftest::fixture;
using tftest::slurp;

namespace {

Bounds uncapped() {
    Bounds b;
    b.cap = 1 << 20;
    return b;
}

}  // namespace

TEST_CASE("style registry matches the shipped mutator table") {
    const auto& reg = style_registry();
    REQUIRE(reg.size() == 6);
    auto* cousins = find_style("Cousins");
    auto* nesting = find_style("Nesting");
    auto* precedes = find_style("Precedes");
    auto* balanced = find_style("Balanced");
    auto* sequence = find_style("Sequence");
    auto* exists = find_style("Exists");
    for (auto* s : {cousins, nesting, balanced})
        for (auto k : {MutatorKind::Replicate, MutatorKind::Move,
                       MutatorKind::Insert, MutatorKind::Replace})
            CHECK(s->allows(k));
    CHECK_FALSE(precedes->allows(MutatorKind::Replicate));
    CHECK(precedes->allows(MutatorKind::Move));
    CHECK_FALSE(sequence->allows(MutatorKind::Move));
    CHECK(sequence->allows(MutatorKind::Replicate));
    CHECK_FALSE(exists->allows(MutatorKind::Replicate));
    CHECK_FALSE(exists->allows(MutatorKind::Move));
    CHECK(exists->allows(MutatorKind::Insert));
    // Replicate only where matched constructs share a type
    for (const auto& s : reg)
        if (s.allows(MutatorKind::Replicate)) CHECK(s.same_type_required);
    CHECK(find_style("NoSuchStyle") == nullptr);
}

TEST_CASE("cousins finds the adjacent loop pair") {
    auto l = tftest::load_lang("mini-c");
    Program p = tftest::analyze(*l, slurp(fixture("pairs/fusion_donor.c")));
    Bounds b;
    b.cousins_k = 0;
    b.cousins_d = 0;
    auto ms = scan(*find_style("Cousins"), p, b);
    REQUIRE(ms.size() == 1);
    CHECK(p.ann->is_a(p.ct.nodes[ms[0].nodes[0]].ctype, "LOOPS_"));
    CHECK(p.ann->is_a(p.ct.nodes[ms[0].nodes[1]].ctype, "LOOPS_"));
    CHECK(p.ann->is_a(p.ct.nodes[ms[0].ctx].ctype, "FUNC_"));
    CHECK(ms[0].predicate_values.at("k") == 0);
    CHECK(ms[0].predicate_values.at("d") == 0);
    CHECK(ms[0].donor_id == "test");
}

TEST_CASE("cousins on a single loop is empty") {
    auto l = tftest::load_lang("mini-c");
    Program p = tftest::analyze(*l, slurp(fixture("pairs/fusion_recipient.c")));
    Bounds b;
    b.cousins_k = 0;
    b.cousins_d = 0;
    CHECK(scan(*find_style("Cousins"), p, b).empty());
}

TEST_CASE("nesting match uses the outer loop as context") {
    auto l = tftest::load_lang("mini-c");
    Program p = tftest::analyze(*l,
        "int f() {\n"
        "  for (int i = 0; i < 4; i = i + 1) {\n"
        "    for (int j = 0; j < 4; j = j + 1) { int t = 0; }\n"
        "  }\n"
        "  return 0;\n"
        "}\n");
    auto ms = scan(*find_style("Nesting"), p, Bounds{});
    REQUIRE(ms.size() == 1);
    CHECK(ms[0].nodes[0] == ms[0].ctx);  // outer loop is also the ctx
    CHECK(ms[0].predicate_values.at("d") == 1);
    CHECK(p.ct.descendant_or_self(ms[0].nodes[1], ms[0].nodes[0]));
}

TEST_CASE("balanced pairs same-type descendants across branches") {
    auto l = tftest::load_lang("mini-c");
    // the if-else must be self-contained: any use resolving to a def outside
    // it would break the containment requirement
    Program p = tftest::analyze(*l,
        "int f() {\n"
        "  if (1) { g(2 % 3); } else { g(4 % 5); }\n"
        "  return 0;\n"
        "}\n");
    auto ms = scan(*find_style("Balanced"), p, Bounds{});
    REQUIRE(!ms.empty());
    for (const auto& m : ms) {
        REQUIRE(m.nodes.size() == 3);
        CHECK(p.ann->is_a(p.ct.nodes[m.nodes[0]].ctype, "IF_ELSE_"));
        const std::string ca = p.ct.nodes[m.nodes[1]].ctype;
        const std::string cb = p.ct.nodes[m.nodes[2]].ctype;
        CHECK(ca == cb);
        // the two descendants live in different branches
        int lca = p.ct.lca(m.nodes[1], m.nodes[2]);
        CHECK(lca == m.nodes[0]);
    }
}

TEST_CASE("exists matches arithmetic and call nodes with proper-ancestor ctx") {
    auto l = tftest::load_lang("mini-c");
    Program p = tftest::analyze(*l,
        "int f() { int x = 1 + 2; return f(); }");
    auto ms = scan(*find_style("Exists"), p, uncapped());
    bool saw_arith = false, saw_call = false;
    for (const auto& m : ms) {
        const std::string& t = p.ct.nodes[m.nodes[0]].ctype;
        if (p.ann->is_a(t, "ARITH_EXPR_")) saw_arith = true;
        if (p.ann->is_a(t, "FUNC_CALL_")) saw_call = true;
        CHECK(m.ctx != m.nodes[0]);  // ctx is a proper ancestor
        CHECK(p.ct.descendant_or_self(m.nodes[0], m.ctx));
    }
    CHECK(saw_arith);
    CHECK(saw_call);
}

TEST_CASE("sequence reports maximal runs only") {
    auto l = tftest::load_lang("mini-c");
    Program p = tftest::analyze(*l,
        "int f() {\n"
        "  int a = 0;\n"
        "  for (int i = 0; i < 2; i = i + 1) { a = a + 1; }\n"
        "  for (int j = 0; j < 2; j = j + 1) { a = a + 2; }\n"
        "  for (int k = 0; k < 2; k = k + 1) { a = a + 3; }\n"
        "  return a;\n"
        "}\n");
    auto ms = scan(*find_style("Sequence"), p, Bounds{});
    // exactly one run of three loops; the embedded 2-runs are not maximal
    std::vector<StyleMatch> loops;
    for (auto& m : ms) {
        bool all_loops = true;
        for (int n : m.nodes)
            if (!p.ann->is_a(p.ct.nodes[n].ctype, "LOOPS_")) all_loops = false;
        if (all_loops) loops.push_back(m);
    }
    REQUIRE(loops.size() == 1);
    CHECK(loops[0].nodes.size() == 3);
    CHECK(loops[0].predicate_values.at("l") == 3);
}

TEST_CASE("scan equals the brute-force oracle on every fixture") {
    for (const char* lang : {"mini-c", "mini-ir"}) {
        auto l = tftest::load_lang(lang);
        for (auto& [path, src] : tftest::corpus_files(lang)) {
            Program p = tftest::analyze(*l, src, path);
            for (const auto& st : style_registry()) {
                CAPTURE(path);
                CAPTURE(st.name);
                auto got = tforacle::canon(p, scan(st, p, uncapped()));
                auto want = tforacle::canon(p, tforacle::oracle_scan(st, p, uncapped()));
                CHECK(got == want);
            }
        }
    }
}

TEST_CASE("loosening a bound never removes a match") {
    auto l = tftest::load_lang("mini-c");
    for (auto& [path, src] : tftest::corpus_files("mini-c")) {
        Program p = tftest::analyze(*l, src, path);
        Bounds tight = uncapped();
        tight.cousins_k = 0;
        tight.cousins_d = 0;
        tight.nesting_d = 1;
        tight.balanced_d = 1;
        tight.sequence_min = 3;
        tight.exists_min_tokens = 4;
        Bounds loose = uncapped();
        loose.cousins_k = 3;
        loose.cousins_d = 8;
        loose.nesting_d = 4;
        loose.balanced_d = 4;
        loose.sequence_min = 2;
        loose.exists_min_tokens = 1;
        for (const auto& st : style_registry()) {
            if (st.name == "Sequence") continue;  // runs split, not subsets
            CAPTURE(path);
            CAPTURE(st.name);
            auto a = tforacle::canon(p, scan(st, p, tight));
            auto b = tforacle::canon(p, scan(st, p, loose));
            CHECK(std::includes(b.begin(), b.end(), a.begin(), a.end()));
        }
        // Sequence: every run found under a higher minimum persists
        Bounds hi = uncapped();
        hi.sequence_min = 3;
        auto a = tforacle::canon(p, scan(*find_style("Sequence"), p, hi));
        Bounds lo = uncapped();
        lo.sequence_min = 2;
        auto b = tforacle::canon(p, scan(*find_style("Sequence"), p, lo));
        CHECK(std::includes(b.begin(), b.end(), a.begin(), a.end()));
    }
}

TEST_CASE("scan output is ordered and capped") {
    auto l = tftest::load_lang("mini-c");
    Program p = tftest::analyze(*l, slurp(fixture("corpus/mini-c/opt/triple_seq.c")));
    const auto& st = *find_style("Exists");
    auto full = scan(st, p, uncapped());
    for (size_t i = 1; i < full.size(); ++i)
        CHECK(p.ct.nodes[full[i - 1].nodes[0]].pre <=
              p.ct.nodes[full[i].nodes[0]].pre);
    Bounds capped;
    capped.cap = 2;
    auto cut = scan(st, p, capped);
    REQUIRE(cut.size() == std::min<size_t>(2, full.size()));
    for (size_t i = 0; i < cut.size(); ++i)
        CHECK(cut[i].nodes == full[i].nodes);  // cap keeps the first in order
}

TEST_CASE("extract_pool aggregates per-program scans") {
    auto l = tftest::load_lang("mini-c");
    std::vector<Program> corpus;
    for (auto& [path, src] : tftest::corpus_files("mini-c"))
        corpus.push_back(tftest::analyze(*l, src, path));
    Bounds b;  // shipped defaults, cap 64
    MatchPool pool = extract_pool(corpus, style_registry(), b);
    size_t expected = 0;
    for (const auto& p : corpus)
        for (const auto& st : style_registry())
            expected += std::min<size_t>(
                b.cap, tforacle::oracle_scan(st, p, uncapped()).size());
    CHECK(pool.size() == expected);
    CHECK(!pool.for_style("Cousins").empty());
    for (const StyleMatch* m : pool.for_style("Cousins")) {
        CHECK(m->style == "Cousins");
        CHECK(m->program_index >= 0);
        CHECK(!m->donor_id.empty());
    }

    MatchPool empty_pool = extract_pool({}, style_registry(), b);
    CHECK(empty_pool.size() == 0);
}

TEST_CASE("match records serialize to JSON lines") {
    auto l = tftest::load_lang("mini-c");
    Program p = tftest::analyze(*l, slurp(fixture("pairs/fusion_donor.c")));
    auto ms = scan(*find_style("Cousins"), p, Bounds{});
    REQUIRE(!ms.empty());
    auto j = nlohmann::json::parse(match_to_jsonl(p, ms[0]));
    CHECK(j["style"] == "Cousins");
    CHECK(j["nodes"].size() == 2);
    CHECK(j["ctx"].contains("byte_start"));
    CHECK(j["predicates"].contains("k"));
}
