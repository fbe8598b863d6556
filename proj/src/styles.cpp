#include "tf/styles.hpp"

#include <algorithm>
#include <stdexcept>

#include <json.hpp>

namespace tf {

const char* mutator_name(MutatorKind k) {
    switch (k) {
        case MutatorKind::Replicate: return "Replicate";
        case MutatorKind::Move: return "Move";
        case MutatorKind::Insert: return "Insert";
        case MutatorKind::Replace: return "Replace";
    }
    return "?";
}

MutatorKind mutator_from_name(const std::string& s) {
    if (s == "Replicate") return MutatorKind::Replicate;
    if (s == "Move") return MutatorKind::Move;
    if (s == "Insert") return MutatorKind::Insert;
    if (s == "Replace") return MutatorKind::Replace;
    throw std::invalid_argument("unknown mutator: " + s);
}

bool CompositionStyle::allows(MutatorKind k) const {
    return std::find(allowed_mutators.begin(), allowed_mutators.end(), k) !=
           allowed_mutators.end();
}

const std::vector<CompositionStyle>& style_registry() {
    using M = MutatorKind;
    static const std::vector<MutatorKind> kAll = {M::Replicate, M::Move,
                                                  M::Insert, M::Replace};
    static const std::vector<CompositionStyle> reg = {
        {"Cousins", 2,
         {"LOOPS_", "FUNC_CALL_", "ARITH_EXPR_", "LOGIC_EXPR_"}, "",
         {"IF_ELSE_", "LOOPS_", "FUNC_"}, true, kAll},
        {"Nesting", 2,
         {"LOOPS_", "IF_ELSE_"}, "",
         {"LOOPS_", "FUNC_"}, true, kAll},
        {"Precedes", 2,
         {"FUNC_CALL_", "MEM_REF_", "ARITH_EXPR_"}, "",
         {"LOOPS_", "FUNC_"}, false,
         {M::Move, M::Insert, M::Replace}},
        {"Balanced", 3,
         {"LOOPS_", "FUNC_CALL_", "ARITH_EXPR_", "MEM_REF_"}, "IF_ELSE_",
         {"IF_ELSE_", "LOOPS_", "FUNC_"}, true, kAll},
        {"Sequence", -1,
         {"LOOPS_", "FUNC_CALL_", "VECTOR_EXPR_", "ARITH_EXPR_"}, "",
         {"LOOPS_", "FUNC_"}, true,
         {M::Replicate, M::Insert, M::Replace}},
        {"Exists", 1,
         {"FUNC_", "LOOPS_", "IF_ELSE_", "FUNC_CALL_", "MEM_REF_",
          "VECTOR_EXPR_", "ARITH_EXPR_"}, "",
         {"VECTOR_EXPR_", "LOOPS_", "IF_ELSE_", "FUNC_", "PROGRAM_"}, false,
         {M::Insert, M::Replace}},
    };
    return reg;
}

const CompositionStyle* find_style(const std::string& name) {
    for (const auto& s : style_registry())
        if (s.name == name) return &s;
    return nullptr;
}

std::string category_of(const AnnotationSet& ann, const std::string& label,
                        const std::vector<std::string>& admissible) {
    for (const auto& a : admissible)
        if (ann.is_a(label, a)) return a;
    return "";
}

int ctx_above(const Program& p, int node,
              const std::vector<std::string>& ctx_types, bool proper) {
    int cur = proper ? p.ct.nodes[node].parent : node;
    while (cur >= 0) {
        if (p.ann->type_in(p.ct.nodes[cur].ctype, ctx_types)) return cur;
        cur = p.ct.nodes[cur].parent;
    }
    return -1;
}

int token_distance(const ConstructTree& ct, int a, int b) {
    if (ct.nodes[a].first_token > ct.nodes[b].first_token) std::swap(a, b);
    return std::max(0, ct.nodes[b].first_token - ct.nodes[a].last_token - 1);
}

namespace {

// ctx of a node group: climb from the construct-tree LCA to the nearest
// (ancestor-or-self) node of an admissible ctx type; -1 if none. The match is
// only kept when the containment check passes.
int group_ctx(const Program& p, const std::vector<int>& nodes,
              const std::vector<std::string>& ctx_types) {
    int l = nodes[0];
    for (size_t i = 1; i < nodes.size(); ++i) l = p.ct.lca(l, nodes[i]);
    return ctx_above(p, l, ctx_types);
}

bool admissible_match(const Program& p, const std::vector<int>& nodes,
                      int ctx) {
    if (ctx < 0) return false;
    for (int n : nodes)
        if (!p.ct.descendant_or_self(n, ctx)) return false;
    return contains(p.ct, p.chains, ctx, nodes);
}

// Nodes of the program whose type maps into the admissible set, preorder,
// paired with their category.
std::vector<std::pair<int, std::string>> typed_nodes(
    const Program& p, const std::vector<std::string>& admissible) {
    std::vector<std::pair<int, std::string>> out;
    for (int i = 1; i < (int)p.ct.nodes.size(); ++i) {
        std::string cat = category_of(*p.ann, p.ct.nodes[i].ctype, admissible);
        if (!cat.empty()) out.emplace_back(i, cat);
    }
    return out;
}

bool disjoint_before(const ConstructTree& ct, int a, int b) {
    return ct.nodes[a].last_token < ct.nodes[b].first_token;
}

void scan_cousins(const CompositionStyle& st, const Program& p,
                  const Bounds& b, std::vector<StyleMatch>& out) {
    auto nodes = typed_nodes(p, st.admissible);
    for (size_t i = 0; i < nodes.size(); ++i) {
        for (size_t j = i + 1; j < nodes.size(); ++j) {
            auto [a, ca] = nodes[i];
            auto [c, cc] = nodes[j];
            if (ca != cc) continue;
            if (!disjoint_before(p.ct, a, c)) continue;
            int ctx = group_ctx(p, {a, c}, st.ctx_types);
            if (!admissible_match(p, {a, c}, ctx)) continue;
            int k = std::max(p.ct.nodes[a].depth, p.ct.nodes[c].depth) -
                    p.ct.nodes[ctx].depth - 1;
            int d = token_distance(p.ct, a, c);
            if (k > b.cousins_k || d > b.cousins_d) continue;
            StyleMatch m;
            m.style = st.name;
            m.nodes = {a, c};
            m.ctx = ctx;
            m.predicate_values = {{"k", k}, {"d", d}};
            out.push_back(std::move(m));
        }
    }
}

void scan_nesting(const CompositionStyle& st, const Program& p,
                  const Bounds& b, std::vector<StyleMatch>& out) {
    auto nodes = typed_nodes(p, st.admissible);
    for (auto& [anc, ca] : nodes) {
        for (auto& [desc, cd] : nodes) {
            if (anc == desc || ca != cd) continue;
            if (!p.ct.descendant_or_self(desc, anc)) continue;
            // Nesting depth: admissible-typed nodes on the path from the
            // descendant up to (excluding) the ancestor.
            int d = 0;
            for (int x = desc; x != anc; x = p.ct.nodes[x].parent)
                if (!category_of(*p.ann, p.ct.nodes[x].ctype, st.admissible)
                         .empty())
                    ++d;
            if (d < 1 || d > b.nesting_d) continue;
            int ctx = group_ctx(p, {anc, desc}, st.ctx_types);
            if (!admissible_match(p, {anc, desc}, ctx)) continue;
            StyleMatch m;
            m.style = st.name;
            m.nodes = {anc, desc};
            m.ctx = ctx;
            m.predicate_values = {{"d", d}};
            out.push_back(std::move(m));
        }
    }
}

void scan_precedes(const CompositionStyle& st, const Program& p,
                   const Bounds&, std::vector<StyleMatch>& out) {
    auto nodes = typed_nodes(p, st.admissible);
    for (size_t i = 0; i < nodes.size(); ++i) {
        for (size_t j = 0; j < nodes.size(); ++j) {
            if (i == j) continue;
            int l = nodes[i].first, r = nodes[j].first;
            if (!disjoint_before(p.ct, l, r)) continue;
            int ctx = group_ctx(p, {l, r}, st.ctx_types);
            if (!admissible_match(p, {l, r}, ctx)) continue;
            StyleMatch m;
            m.style = st.name;
            m.nodes = {l, r};
            m.ctx = ctx;
            out.push_back(std::move(m));
        }
    }
}

void scan_balanced(const CompositionStyle& st, const Program& p,
                   const Bounds& b, std::vector<StyleMatch>& out) {
    const std::string& branch_t = p.ann->branch_type;
    for (int ie = 1; ie < (int)p.ct.nodes.size(); ++ie) {
        if (!p.ann->is_a(p.ct.nodes[ie].ctype, st.first_type)) continue;
        // Direct branch children of this if-else.
        std::vector<int> branches;
        for (int c : p.ct.nodes[ie].children)
            if (!branch_t.empty() && p.ann->is_a(p.ct.nodes[c].ctype, branch_t))
                branches.push_back(c);
        if (branches.size() < 2) continue;
        // Candidate descendants per branch, with branch depth.
        struct Cand { int node; int branch; int d; std::string cat; };
        std::vector<Cand> cands;
        for (size_t bi = 0; bi < branches.size(); ++bi) {
            int br = branches[bi];
            for (int n = 1; n < (int)p.ct.nodes.size(); ++n) {
                if (n == br || !p.ct.descendant_or_self(n, br)) continue;
                std::string cat =
                    category_of(*p.ann, p.ct.nodes[n].ctype, st.admissible);
                if (cat.empty()) continue;
                int d = p.ct.nodes[n].depth - p.ct.nodes[br].depth;
                if (d < 1 || d > b.balanced_d) continue;
                cands.push_back({n, (int)bi, d, cat});
            }
        }
        for (size_t i = 0; i < cands.size(); ++i) {
            for (size_t j = 0; j < cands.size(); ++j) {
                if (cands[i].branch >= cands[j].branch) continue;
                if (cands[i].cat != cands[j].cat) continue;
                std::vector<int> ns = {ie, cands[i].node, cands[j].node};
                int ctx = group_ctx(p, ns, st.ctx_types);
                if (!admissible_match(p, ns, ctx)) continue;
                StyleMatch m;
                m.style = st.name;
                m.nodes = ns;
                m.ctx = ctx;
                m.predicate_values = {{"d", std::max(cands[i].d, cands[j].d)}};
                out.push_back(std::move(m));
            }
        }
    }
}

void scan_sequence(const CompositionStyle& st, const Program& p,
                   const Bounds& b, std::vector<StyleMatch>& out) {
    auto nodes = typed_nodes(p, st.admissible);
    std::sort(nodes.begin(), nodes.end(), [&](const auto& x, const auto& y) {
        return p.ct.nodes[x.first].pre < p.ct.nodes[y.first].pre;
    });
    std::vector<bool> used(nodes.size(), false);
    for (size_t i = 0; i < nodes.size(); ++i) {
        if (used[i]) continue;
        // Maximal run: i must not extend an earlier node of the same category.
        std::vector<int> run = {nodes[i].first};
        const std::string& cat = nodes[i].second;
        bool extendable_left = false;
        for (size_t h = 0; h < i; ++h)
            if (nodes[h].second == cat &&
                p.ct.nodes[nodes[h].first].last_token + 1 ==
                    p.ct.nodes[run[0]].first_token)
                extendable_left = true;
        if (extendable_left) continue;
        size_t cur = i;
        while (true) {
            bool grew = false;
            for (size_t j = cur + 1; j < nodes.size(); ++j) {
                if (nodes[j].second != cat) continue;
                if (p.ct.nodes[nodes[j].first].first_token ==
                    p.ct.nodes[run.back()].last_token + 1) {
                    run.push_back(nodes[j].first);
                    used[j] = true;
                    cur = j;
                    grew = true;
                    break;
                }
            }
            if (!grew) break;
        }
        if ((int)run.size() < b.sequence_min) continue;
        int ctx = group_ctx(p, run, st.ctx_types);
        if (!admissible_match(p, run, ctx)) continue;
        StyleMatch m;
        m.style = st.name;
        m.nodes = run;
        m.ctx = ctx;
        m.predicate_values = {{"l", (int)run.size()}};
        out.push_back(std::move(m));
    }
}

void scan_exists(const CompositionStyle& st, const Program& p,
                 const Bounds& b, std::vector<StyleMatch>& out) {
    for (int n = 1; n < (int)p.ct.nodes.size(); ++n) {
        std::string cat =
            category_of(*p.ann, p.ct.nodes[n].ctype, st.admissible);
        if (cat.empty()) continue;
        if (p.ct.span_tokens(n) < b.exists_min_tokens) continue;
        int ctx = ctx_above(p, n, st.ctx_types, /*proper=*/true);
        if (!admissible_match(p, {n}, ctx)) continue;
        StyleMatch m;
        m.style = st.name;
        m.nodes = {n};
        m.ctx = ctx;
        m.predicate_values = {{"l", p.ct.span_tokens(n)}};
        out.push_back(std::move(m));
    }
}

}  // namespace

std::vector<StyleMatch> scan(const CompositionStyle& style, const Program& p,
                             const Bounds& bounds) {
    std::vector<StyleMatch> out;
    if (style.name == "Cousins") scan_cousins(style, p, bounds, out);
    else if (style.name == "Nesting") scan_nesting(style, p, bounds, out);
    else if (style.name == "Precedes") scan_precedes(style, p, bounds, out);
    else if (style.name == "Balanced") scan_balanced(style, p, bounds, out);
    else if (style.name == "Sequence") scan_sequence(style, p, bounds, out);
    else if (style.name == "Exists") scan_exists(style, p, bounds, out);
    else throw std::invalid_argument("unknown style: " + style.name);

    std::stable_sort(out.begin(), out.end(),
                     [&](const StyleMatch& a, const StyleMatch& c) {
                         for (size_t i = 0;
                              i < a.nodes.size() && i < c.nodes.size(); ++i) {
                             int pa = p.ct.nodes[a.nodes[i]].pre;
                             int pc = p.ct.nodes[c.nodes[i]].pre;
                             if (pa != pc) return pa < pc;
                         }
                         return a.nodes.size() < c.nodes.size();
                     });
    for (auto& m : out) m.donor_id = p.id;
    if ((int)out.size() > bounds.cap) out.resize(bounds.cap);
    return out;
}

std::string match_signature(const Program& p, const StyleMatch& m) {
    std::string sig;
    const CompositionStyle* st = find_style(m.style);
    for (int n : m.nodes) {
        if (!sig.empty()) sig += ',';
        std::string cat =
            st ? category_of(*p.ann, p.ct.nodes[n].ctype, st->admissible) : "";
        if (cat.empty() && st && !st->first_type.empty() &&
            p.ann->is_a(p.ct.nodes[n].ctype, st->first_type))
            cat = st->first_type;
        sig += cat.empty() ? p.ct.nodes[n].ctype : cat;
    }
    return sig;
}

size_t MatchPool::size() const {
    size_t n = 0;
    for (const auto& [k, v] : groups) n += v.size();
    return n;
}

std::vector<const StyleMatch*> MatchPool::for_style(
    const std::string& style) const {
    std::vector<const StyleMatch*> out;
    for (const auto& [k, v] : groups)
        if (k.first == style)
            for (const auto& m : v) out.push_back(&m);
    return out;
}

MatchPool extract_pool(const std::vector<Program>& corpus,
                       const std::vector<CompositionStyle>& styles,
                       const Bounds& bounds) {
    MatchPool pool;
    for (size_t pi = 0; pi < corpus.size(); ++pi) {
        for (const auto& st : styles) {
            for (auto& m : scan(st, corpus[pi], bounds)) {
                m.program_index = (int)pi;
                pool.groups[{st.name, match_signature(corpus[pi], m)}]
                    .push_back(std::move(m));
            }
        }
    }
    return pool;
}

std::string match_to_jsonl(const Program& p, const StyleMatch& m) {
    nlohmann::json j;
    j["style"] = m.style;
    j["donor_id"] = m.donor_id;
    nlohmann::json spans = nlohmann::json::array();
    for (int n : m.nodes) {
        auto [b, e] = p.pt.byte_span(p.ct.nodes[n].parse_ref);
        spans.push_back({{"type", p.ct.nodes[n].ctype},
                         {"byte_start", b},
                         {"byte_end", e}});
    }
    j["nodes"] = spans;
    auto [cb, ce] = p.pt.byte_span(p.ct.nodes[m.ctx].parse_ref);
    j["ctx"] = {{"type", p.ct.nodes[m.ctx].ctype},
                {"byte_start", cb},
                {"byte_end", ce}};
    j["predicates"] = m.predicate_values;
    return j.dump();
}

}  // namespace tf
