#include "tf/mutators.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <set>
#include <stdexcept>

namespace tf {

uint64_t mix_seed(uint64_t base, uint64_t index) {
    // splitmix64 over base + index
    uint64_t z = base + index * 0x9E3779B97F4A7C15ULL + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

const char* reject_name(RejectReason r) {
    switch (r) {
        case RejectReason::None: return "None";
        case RejectReason::NoCandidateContext: return "NoCandidateContext";
        case RejectReason::NoAnchorMatch: return "NoAnchorMatch";
        case RejectReason::RebindFailure: return "RebindFailure";
        case RejectReason::MoveNoCandidate: return "MoveNoCandidate";
        case RejectReason::ReparseFailure: return "ReparseFailure";
        case RejectReason::RebuildCheckFailed: return "RebuildCheckFailed";
    }
    return "?";
}

int levenshtein(const std::string& a, const std::string& b) {
    std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
    for (size_t j = 0; j <= b.size(); ++j) prev[j] = (int)j;
    for (size_t i = 1; i <= a.size(); ++i) {
        cur[0] = (int)i;
        for (size_t j = 1; j <= b.size(); ++j) {
            int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::vector<int> removable_positions(const CompositionStyle& style,
                                     const StyleMatch& match) {
    if (style.name == "Cousins" || style.name == "Precedes") return {0, 1};
    if (style.name == "Nesting") return {1};
    if (style.name == "Balanced") return {1, 2};
    if (style.name == "Sequence") {
        std::vector<int> all((size_t)match.nodes.size());
        for (size_t i = 0; i < all.size(); ++i) all[i] = (int)i;
        return all;
    }
    return {};
}

PartialContext partialize(const Program& donor, const StyleMatch& match, int i,
                          Rng& rng) {
    if (match.nodes.size() < 2)
        throw std::logic_error("partialization requires k >= 2");
    const CompositionStyle* style = find_style(match.style);
    if (!style) throw std::invalid_argument("unknown style " + match.style);
    std::vector<int> removable = removable_positions(*style, match);
    if (removable.empty())
        throw std::logic_error("partialization requires k >= 2");
    if (i < 0) i = removable[rng.uniform((int)removable.size())];
    if (std::find(removable.begin(), removable.end(), i) == removable.end())
        throw std::logic_error("position not removable for this style");

    PartialContext pc;
    pc.removed_index = i;
    pc.removed_node = match.nodes[i];
    for (size_t j = 0; j < match.nodes.size(); ++j)
        if ((int)j != i) pc.anchors.push_back(match.nodes[j]);
    pc.hole_parent = donor.ct.nodes[pc.removed_node].parent;
    if (pc.hole_parent >= 0) {
        const auto& kids = donor.ct.nodes[pc.hole_parent].children;
        pc.hole_ordinal =
            (int)(std::find(kids.begin(), kids.end(), pc.removed_node) -
                  kids.begin());
    }
    return pc;
}

namespace {

std::vector<std::string> label_env(const ConstructTree& t, int node, int k_anc,
                                   int l_sib, int r_sib) {
    std::vector<std::string> env = {t.nodes[node].ctype};
    const std::string& root_label = t.nodes[0].ctype;
    int cur = node;
    for (int i = 0; i < k_anc; ++i) {
        cur = cur >= 0 ? t.nodes[cur].parent : -1;
        env.push_back(cur >= 0 ? t.nodes[cur].ctype : root_label);
    }
    int parent = t.nodes[node].parent;
    int idx = 0;
    if (parent >= 0) {
        const auto& kids = t.nodes[parent].children;
        idx = (int)(std::find(kids.begin(), kids.end(), node) - kids.begin());
    }
    for (int i = 1; i <= l_sib; ++i) {
        int s = idx - i;
        env.push_back(parent >= 0 && s >= 0
                          ? t.nodes[t.nodes[parent].children[s]].ctype
                          : "");
    }
    for (int i = 1; i <= r_sib; ++i) {
        int s = idx + i;
        env.push_back(parent >= 0 &&
                              s < (int)t.nodes[parent].children.size()
                          ? t.nodes[t.nodes[parent].children[s]].ctype
                          : "");
    }
    return env;
}

}  // namespace

double structural_similarity(const ConstructTree& ta, int a,
                             const ConstructTree& tb, int b, int k_anc,
                             int l_sib, int r_sib) {
    auto ea = label_env(ta, a, k_anc, l_sib, r_sib);
    auto eb = label_env(tb, b, k_anc, l_sib, r_sib);
    int eq = 0;
    for (size_t i = 0; i < ea.size(); ++i)
        if (ea[i] == eb[i]) ++eq;
    return (double)eq / (double)ea.size();
}

namespace {

// Matching category for a donor match node: the admissible-set element it
// falls under, or (Balanced position 0) the fixed ancestor type.
std::string node_category(const Program& p, const CompositionStyle& style,
                          int node) {
    std::string cat =
        category_of(*p.ann, p.ct.nodes[node].ctype, style.admissible);
    if (cat.empty() && !style.first_type.empty() &&
        p.ann->is_a(p.ct.nodes[node].ctype, style.first_type))
        cat = style.first_type;
    return cat;
}

size_t node_end_byte(const Program& p, int cnode) {
    return p.pt.tokens[p.ct.nodes[cnode].last_token].byte_end;
}
size_t node_start_byte(const Program& p, int cnode) {
    return p.pt.tokens[p.ct.nodes[cnode].first_token].byte_start;
}
bool empty_span(const Program& p, int cnode) {
    return p.ct.nodes[cnode].first_token > p.ct.nodes[cnode].last_token;
}

// Hole placement mirroring the donor's ordering of the removed node relative
// to its anchors (see match_context contract).
size_t place_hole(const Program& recipient, const Program& donor,
                  const StyleMatch& match, const PartialContext& pc,
                  const CompositionStyle& style, const ContextBinding& b) {
    auto mapped = [&](int donor_node) {
        for (auto& [dn, rn] : b.anchor_map)
            if (dn == donor_node) return rn;
        return -1;
    };

    if (style.name == "Balanced") {
        // Clone/move lands in the branch of the mapped if-else that lacks a
        // same-type descendant; fall back to the last branch.
        int rec_ie = mapped(match.nodes[0]);
        std::string cat = node_category(donor, style, pc.removed_node);
        std::vector<int> branches;
        for (int c : recipient.ct.nodes[rec_ie].children)
            if (!recipient.ann->branch_type.empty() &&
                recipient.ann->is_a(recipient.ct.nodes[c].ctype,
                                    recipient.ann->branch_type) &&
                !empty_span(recipient, c))
                branches.push_back(c);
        int target = -1;
        for (int br : branches) {
            bool has_same = false;
            for (int n = br + 1; n < (int)recipient.ct.nodes.size(); ++n) {
                if (!recipient.ct.descendant_or_self(n, br) || n == br) continue;
                if (node_category(recipient, style, n) == cat) has_same = true;
            }
            if (!has_same) { target = br; break; }
        }
        if (target < 0 && !branches.empty()) target = branches.back();
        if (target >= 0)
            return recipient.pt
                .tokens[recipient.ct.nodes[target].last_token]
                .byte_start;
        // No usable branch: before the if-else's closing token.
        return recipient.pt.tokens[recipient.ct.nodes[rec_ie].last_token]
            .byte_start;
    }

    // Removed node nested inside an anchor (Nesting): before the mapped
    // anchor's final token.
    for (int a : pc.anchors) {
        if (donor.ct.descendant_or_self(pc.removed_node, a) &&
            pc.removed_node != a) {
            int rn = mapped(a);
            return recipient.pt.tokens[recipient.ct.nodes[rn].last_token]
                .byte_start;
        }
    }

    int rtok = donor.ct.nodes[pc.removed_node].first_token;
    int prev = -1, next = -1;
    for (int a : pc.anchors) {
        if (donor.ct.nodes[a].last_token < rtok) {
            if (prev < 0 ||
                donor.ct.nodes[a].first_token > donor.ct.nodes[prev].first_token)
                prev = a;
        } else if (donor.ct.nodes[a].first_token >
                   donor.ct.nodes[pc.removed_node].last_token) {
            if (next < 0 ||
                donor.ct.nodes[a].first_token < donor.ct.nodes[next].first_token)
                next = a;
        }
    }
    if (prev >= 0) return node_end_byte(recipient, mapped(prev));
    if (next >= 0) return node_start_byte(recipient, mapped(next));
    // Anchor overlaps oddly; default to end of ctx interior.
    return recipient.pt.tokens[recipient.ct.nodes[b.recipient_ctx].last_token]
        .byte_start;
}

}  // namespace

MatchResult match_context(const Program& recipient, const Program& donor,
                          const StyleMatch& match, const PartialContext& pc,
                          const CompositionStyle& style, Rng& rng) {
    MatchResult res;
    std::vector<int> ctx_cands;
    for (int n = 0; n < (int)recipient.ct.nodes.size(); ++n)
        if (recipient.ann->type_in(recipient.ct.nodes[n].ctype, style.ctx_types))
            ctx_cands.push_back(n);
    if (ctx_cands.empty()) {
        res.reject = RejectReason::NoCandidateContext;
        return res;
    }

    std::optional<ContextBinding> best;
    for (int ctx : ctx_cands) {
        ContextBinding b;
        b.recipient_ctx = ctx;
        b.similarity_score =
            structural_similarity(donor.ct, match.ctx, recipient.ct, ctx);
        std::set<int> used;
        bool ok = true;
        for (int a : pc.anchors) {
            std::string cat = node_category(donor, style, a);
            int pick = -1;
            double pick_sim = -1.0;
            for (int n = ctx; n < (int)recipient.ct.nodes.size(); ++n) {
                if (!recipient.ct.descendant_or_self(n, ctx)) continue;
                if (used.count(n)) continue;
                if (node_category(recipient, style, n) != cat) continue;
                if (empty_span(recipient, n)) continue;
                double sim =
                    structural_similarity(donor.ct, a, recipient.ct, n);
                if (sim > pick_sim) {
                    pick_sim = sim;
                    pick = n;
                }
            }
            if (pick < 0) { ok = false; break; }
            used.insert(pick);
            b.anchor_map.emplace_back(a, pick);
        }
        if (!ok) continue;
        if (!best || b.similarity_score > best->similarity_score) best = b;
        // Ties keep the earliest-preorder ctx (scan order of ctx_cands).
    }
    if (!best) {
        res.reject = RejectReason::NoAnchorMatch;
        return res;
    }
    if (pc.removed_index >= 0)
        best->insert_byte =
            place_hole(recipient, donor, match, pc, style, *best);
    else if (!best->anchor_map.empty())
        best->insert_byte = node_end_byte(recipient, best->anchor_map.back().second);
    res.binding = std::move(best);
    return res;
}

namespace {

struct FreeUse {
    int use_index;  // into material_prog.chains.uses
    std::string name;
    int def;               // original def index or -1
    std::string use_type;  // "" when unknown
};

std::vector<FreeUse> free_uses(const Program& mat, int material_node) {
    std::vector<FreeUse> out;
    for (int ui : mat.chains.uses_under(mat.ct, material_node)) {
        const UseInfo& u = mat.chains.uses[ui];
        if (u.def >= 0 &&
            mat.ct.descendant_or_self(mat.chains.defs[u.def].cnode,
                                      material_node))
            continue;  // def travels with the material
        FreeUse f;
        f.use_index = ui;
        f.name = u.name;
        f.def = u.def;
        f.use_type = u.def >= 0 ? mat.chains.defs[u.def].type_label : "";
        out.push_back(std::move(f));
    }
    return out;
}

// Defs of the recipient visible at (target_ctx, insert_byte).
std::vector<int> visible_defs(const Program& r, int target_ctx,
                              size_t insert_byte) {
    std::set<int> scopes;
    int cur = target_ctx;
    while (cur >= 0) {
        if (r.ann->scope_forming(r.ct.nodes[cur].ctype)) scopes.insert(cur);
        cur = r.ct.nodes[cur].parent;
    }
    std::vector<int> out;
    for (int i = 0; i < (int)r.chains.defs.size(); ++i) {
        const DefInfo& d = r.chains.defs[i];
        if (!scopes.count(d.scope)) continue;
        if (r.pt.tokens[d.name_token].byte_start >= insert_byte) continue;
        out.push_back(i);
    }
    return out;
}

}  // namespace

RebindResult reparameterize(const Program& material_prog, int material_node,
                            const Program& recipient, int target_ctx,
                            size_t insert_byte, Rng& rng) {
    RebindResult res;
    std::vector<Rebind> map;
    auto frees = free_uses(material_prog, material_node);

    // Group by (name, def) in deterministic order.
    std::map<std::pair<std::string, int>, std::string> groups;
    for (const auto& f : frees) groups[{f.name, f.def}] = f.use_type;

    std::vector<int> vis = visible_defs(recipient, target_ctx, insert_byte);
    for (const auto& [key, use_type] : groups) {
        std::vector<int> cands;
        for (int di : vis) {
            const DefInfo& d = recipient.chains.defs[di];
            if (!use_type.empty() &&
                !(d.type_label == use_type ||
                  recipient.ann->compatible(use_type, d.type_label)))
                continue;
            cands.push_back(di);
        }
        if (cands.empty()) {
            res.reject = RejectReason::RebindFailure;
            return res;
        }
        // Prefer defs living inside the target ctx (keeps the containment
        // relation of the rebuilt match), then names different from the
        // original use.
        std::vector<int> inside;
        for (int di : cands)
            if (recipient.ct.descendant_or_self(
                    recipient.chains.defs[di].cnode, target_ctx))
                inside.push_back(di);
        if (!inside.empty()) cands = inside;
        std::vector<int> fresh;
        for (int di : cands)
            if (recipient.chains.defs[di].name != key.first)
                fresh.push_back(di);
        if (!fresh.empty()) cands = fresh;
        // Collapse duplicate names so the draw is over distinct targets.
        std::vector<std::string> names;
        for (int di : cands) {
            const std::string& nm = recipient.chains.defs[di].name;
            if (std::find(names.begin(), names.end(), nm) == names.end())
                names.push_back(nm);
        }
        Rebind rb;
        rb.name = key.first;
        rb.def = key.second;
        rb.new_name = names[rng.uniform((int)names.size())];
        if (rb.new_name != rb.name) map.push_back(std::move(rb));
    }
    res.map = std::move(map);
    return res;
}

namespace {

// Material text: source bytes of the node with rebound names substituted.
std::string materialize(const Program& mat, int material_node,
                        const std::vector<Rebind>& rebinds) {
    auto [ms, me] = mat.pt.byte_span(mat.ct.nodes[material_node].parse_ref);
    std::string text = mat.pt.source.substr(ms, me - ms);
    // Collect per-use byte edits, applied back-to-front.
    struct Edit { size_t start, end; const std::string* repl; };
    std::vector<Edit> edits;
    for (int ui : mat.chains.uses_under(mat.ct, material_node)) {
        const UseInfo& u = mat.chains.uses[ui];
        for (const auto& rb : rebinds) {
            if (u.name != rb.name || u.def != rb.def) continue;
            const Token& t = mat.pt.tokens[u.name_token];
            edits.push_back({t.byte_start - ms, t.byte_end - ms, &rb.new_name});
        }
    }
    std::sort(edits.begin(), edits.end(),
              [](const Edit& a, const Edit& b) { return a.start > b.start; });
    for (const auto& e : edits)
        text.replace(e.start, e.end - e.start, *e.repl);
    return text;
}

struct ByteEdit {
    size_t start, end;  // [start, end) replaced
    std::string repl;
};

std::string apply_edits(const std::string& src, std::vector<ByteEdit> edits) {
    std::sort(edits.begin(), edits.end(),
              [](const ByteEdit& a, const ByteEdit& b) {
                  return a.start > b.start;
              });
    std::string out = src;
    for (const auto& e : edits)
        out.replace(e.start, e.end - e.start, e.repl);
    return out;
}

// Expected post-edit byte span of a pre-edit span under a set of edits.
std::pair<size_t, size_t> shift_span(std::pair<size_t, size_t> span,
                                     const std::vector<ByteEdit>& edits) {
    long long s = (long long)span.first, e = (long long)span.second;
    for (const auto& ed : edits) {
        long long delta =
            (long long)ed.repl.size() - (long long)(ed.end - ed.start);
        bool strictly_before =
            ed.end < span.first || (ed.end == span.first && ed.start < ed.end);
        if (strictly_before) {
            s += delta;
            e += delta;
        } else if (ed.start >= span.first && ed.start <= span.second) {
            e += delta;  // inside (insertions at either boundary extend)
        }
    }
    return {(size_t)s, (size_t)e};
}

bool rebuild_check(const Program& donor, const StyleMatch& match,
                   const CompositionStyle& style, const Program& mutated,
                   std::pair<size_t, size_t> expected_ctx,
                   const Bounds& bounds) {
    Bounds generous = bounds;
    generous.cap = 1 << 20;
    for (const auto& m : scan(style, mutated, generous)) {
        auto span =
            mutated.pt.byte_span(mutated.ct.nodes[m.ctx].parse_ref);
        if (span == expected_ctx) return true;
    }
    return false;
}

}  // namespace

MutationOutcome mutate(const Program& donor, const Program& recipient,
                       const StyleMatch& match, MutatorKind kind,
                       uint64_t seed, const Bounds& bounds) {
    const CompositionStyle* stp = find_style(match.style);
    if (!stp) throw std::invalid_argument("unknown style " + match.style);
    const CompositionStyle& style = *stp;
    if (!style.allows(kind))
        throw std::invalid_argument(std::string("style ") + style.name +
                                    " does not allow " + mutator_name(kind));

    MutationOutcome out;
    out.prog.donor_id = donor.id;
    out.prog.recipient_id = recipient.id;
    out.prog.style = style.name;
    out.prog.kind = kind;
    out.prog.rng_seed = seed;
    Rng rng(seed);

    bool is_mutation =
        kind == MutatorKind::Replicate || kind == MutatorKind::Move;

    PartialContext pc;
    if (is_mutation) {
        pc = partialize(donor, match, -1, rng);
    } else {
        pc.removed_index = -1;
        pc.anchors = match.nodes;
    }

    MatchResult mr = match_context(recipient, donor, match, pc, style, rng);
    if (!mr.binding) {
        out.reject = mr.reject;
        return out;
    }
    const ContextBinding& b = *mr.binding;
    auto ctx_span =
        recipient.pt.byte_span(recipient.ct.nodes[b.recipient_ctx].parse_ref);

    std::vector<ByteEdit> edits;
    bool check_rebuild = false;

    if (kind == MutatorKind::Replicate) {
        std::string cat = node_category(donor, style, pc.removed_node);
        std::vector<int> clone_cands;
        for (auto& [dn, rn] : b.anchor_map)
            if (node_category(donor, style, dn) == cat)
                clone_cands.push_back(rn);
        if (clone_cands.empty()) {
            out.reject = RejectReason::NoAnchorMatch;
            return out;
        }
        int a = clone_cands[rng.uniform((int)clone_cands.size())];
        RebindResult rr = reparameterize(recipient, a, recipient,
                                         b.recipient_ctx, b.insert_byte, rng);
        if (!rr.map) {
            out.reject = rr.reject;
            return out;
        }
        out.prog.rebinds = *rr.map;
        std::string material = materialize(recipient, a, *rr.map);
        edits.push_back({b.insert_byte, b.insert_byte,
                         "\n" + material + "\n"});
        check_rebuild = true;
    } else if (kind == MutatorKind::Move) {
        std::string cat = node_category(donor, style, pc.removed_node);
        std::string removed_text =
            donor.pt.token_text(donor.ct.nodes[pc.removed_node].parse_ref);
        std::set<int> anchor_nodes;
        for (auto& [dn, rn] : b.anchor_map) anchor_nodes.insert(rn);
        int best = -1, best_dist = 0;
        for (int n = 1; n < (int)recipient.ct.nodes.size(); ++n) {
            if (node_category(recipient, style, n) != cat) continue;
            if (anchor_nodes.count(n)) continue;
            if (empty_span(recipient, n)) continue;
            auto [xs, xe] =
                recipient.pt.byte_span(recipient.ct.nodes[n].parse_ref);
            if (xs <= b.insert_byte && b.insert_byte <= xe) continue;
            int d = levenshtein(
                recipient.pt.token_text(recipient.ct.nodes[n].parse_ref),
                removed_text);
            if (best < 0 || d < best_dist) {
                best = n;
                best_dist = d;
            }
        }
        if (best < 0) {
            out.reject = RejectReason::MoveNoCandidate;
            return out;
        }
        RebindResult rr = reparameterize(recipient, best, recipient,
                                         b.recipient_ctx, b.insert_byte, rng);
        if (!rr.map) {
            out.reject = rr.reject;
            return out;
        }
        out.prog.rebinds = *rr.map;
        std::string material = materialize(recipient, best, *rr.map);

        // Repair the original site: remove the node's parse subtree, widening
        // to successive parse ancestors until the result re-parses.
        int site = recipient.ct.nodes[best].parse_ref;
        while (site >= 0) {
            auto [rs, re] = recipient.pt.byte_span(site);
            if (rs <= b.insert_byte && b.insert_byte <= re) break;
            std::vector<ByteEdit> attempt = {
                {rs, re, ""},
                {b.insert_byte, b.insert_byte, "\n" + material + "\n"}};
            std::string text = apply_edits(recipient.pt.source, attempt);
            try {
                Program m2 = analyze(*recipient.grammar, *recipient.ann, text,
                                     recipient.id + "+mut");
                out.prog.text = text;
                out.prog.reparse_ok = true;
                out.ok = true;
                return out;
            } catch (const std::exception&) {
                site = recipient.pt.nodes[site].parent;
            }
        }
        out.reject = RejectReason::ReparseFailure;
        return out;
    } else if (kind == MutatorKind::Insert) {
        for (auto& [dn, rn] : b.anchor_map) {
            size_t at = node_end_byte(recipient, rn);
            RebindResult rr =
                reparameterize(donor, dn, recipient, b.recipient_ctx, at, rng);
            if (!rr.map) {
                out.reject = rr.reject;
                return out;
            }
            for (auto& r : *rr.map) out.prog.rebinds.push_back(r);
            std::string material = materialize(donor, dn, *rr.map);
            edits.push_back({at, at, "\n" + material + "\n"});
        }
        check_rebuild = true;
    } else {  // Replace
        // Outermost targets only; nested replacements would overlap.
        std::vector<std::pair<int, int>> targets;
        for (auto& [dn, rn] : b.anchor_map) {
            bool nested = false;
            for (auto& [dn2, rn2] : b.anchor_map)
                if (rn2 != rn && recipient.ct.descendant_or_self(rn, rn2))
                    nested = true;
            if (!nested) targets.emplace_back(dn, rn);
        }
        for (auto& [dn, rn] : targets) {
            auto [rs, re] =
                recipient.pt.byte_span(recipient.ct.nodes[rn].parse_ref);
            RebindResult rr =
                reparameterize(donor, dn, recipient, b.recipient_ctx, rs, rng);
            if (!rr.map) {
                out.reject = rr.reject;
                return out;
            }
            for (auto& r : *rr.map) out.prog.rebinds.push_back(r);
            edits.push_back({rs, re, materialize(donor, dn, *rr.map)});
        }
    }

    std::string text = apply_edits(recipient.pt.source, edits);
    Program mutated;
    try {
        mutated = analyze(*recipient.grammar, *recipient.ann, text,
                          recipient.id + "+mut");
    } catch (const std::exception&) {
        out.reject = RejectReason::ReparseFailure;
        out.prog.text = text;
        return out;
    }
    out.prog.text = text;
    out.prog.reparse_ok = true;

    if (check_rebuild) {
        auto expected = shift_span(ctx_span, edits);
        if (!rebuild_check(donor, match, style, mutated, expected, bounds)) {
            out.reject = RejectReason::RebuildCheckFailed;
            out.prog.reparse_ok = true;
            return out;
        }
    }
    out.ok = true;
    return out;
}

}  // namespace tf
