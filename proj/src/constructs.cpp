#include "tf/constructs.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace tf {

// ---------------------------------------------------------------------------
// Predicate library

namespace {

bool span_has_token(const ParseTree& pt, int node,
                    const std::set<std::string>& texts) {
    const ParseNode& n = pt.nodes[node];
    for (int t = n.first_token; t <= n.last_token; ++t)
        if (texts.count(pt.tokens[t].text)) return true;
    return false;
}

bool is_numeric_text(const std::string& s) {
    return !s.empty() && (isdigit((unsigned char)s[0]));
}

bool all_tokens_numeric(const ParseTree& pt, int node) {
    const ParseNode& n = pt.nodes[node];
    if (n.first_token > n.last_token) return false;
    for (int t = n.first_token; t <= n.last_token; ++t)
        if (!is_numeric_text(pt.tokens[t].text)) return false;
    return true;
}

}  // namespace

const std::map<std::string, PredicateFn>& predicate_library() {
    static const std::map<std::string, PredicateFn> lib = {
        {"isarith",
         [](const ParseTree& pt, int n) {
             static const std::set<std::string> ops{"+", "-", "*", "/", "%"};
             return span_has_token(pt, n, ops) || all_tokens_numeric(pt, n);
         }},
        {"islogical",
         [](const ParseTree& pt, int n) {
             static const std::set<std::string> ops{"&&", "||", "!",  "<",
                                                    ">",  "<=", ">=", "==",
                                                    "!="};
             return span_has_token(pt, n, ops);
         }},
        {"is_literal_array",
         [](const ParseTree& pt, int n) {
             const ParseNode& node = pt.nodes[n];
             if (node.first_token > node.last_token) return false;
             const std::string& first = pt.tokens[node.first_token].text;
             return first == "{" || first == "dense";
         }},
        {"is_array_access",
         [](const ParseTree& pt, int n) {
             return span_has_token(pt, n, {"["});
         }},
        {"is_call",
         [](const ParseTree& pt, int n) {
             const ParseNode& node = pt.nodes[n];
             if (node.first_token >= node.last_token) return false;
             const std::string& first = pt.tokens[node.first_token].text;
             if (first.find("call") != std::string::npos) return true;
             return (isalpha((unsigned char)first[0]) || first[0] == '_') &&
                    pt.tokens[node.first_token + 1].text == "(";
         }},
        {"is_memref",
         [](const ParseTree& pt, int n) {
             const ParseNode& node = pt.nodes[n];
             for (int t = node.first_token; t <= node.last_token; ++t)
                 if (pt.tokens[t].text.rfind("memref", 0) == 0) return true;
             return span_has_token(pt, n, {"["});
         }},
    };
    return lib;
}

// ---------------------------------------------------------------------------
// AnnotationSet queries

const ConstructDef* AnnotationSet::find(const std::string& name) const {
    for (const auto& d : defs)
        if (d.name == name) return &d;
    return nullptr;
}

bool AnnotationSet::is_a(const std::string& label,
                         const std::string& ancestor) const {
    if (label == ancestor) return true;
    const ConstructDef* d = find(ancestor);
    if (!d || d->matcher != MatcherKind::Union) return false;
    for (const auto& m : d->members)
        if (is_a(label, m)) return true;
    return false;
}

bool AnnotationSet::type_in(const std::string& label,
                            const std::vector<std::string>& set) const {
    for (const auto& t : set)
        if (is_a(label, t)) return true;
    return false;
}

bool AnnotationSet::compatible(const std::string& have,
                               const std::string& want) const {
    if (have == want) return true;
    for (const auto& [from, to] : typecompat)
        if (from == have && to == want) return true;
    return false;
}

bool AnnotationSet::scope_forming(const std::string& label) const {
    if (label == kProgramRoot) return true;
    return type_in(label, scope_types);
}

// ---------------------------------------------------------------------------
// Annotation file reader

namespace {

struct ACursor {
    const std::string& text;
    size_t pos = 0;
    int line = 1;

    explicit ACursor(const std::string& t) : text(t) {}
    bool eof() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }
    void advance() {
        if (text[pos] == '\n') ++line;
        ++pos;
    }
    void skip_ws() {
        while (!eof()) {
            char c = peek();
            if (isspace((unsigned char)c)) {
                advance();
            } else if (c == '#') {
                while (!eof() && peek() != '\n') advance();
            } else {
                break;
            }
        }
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw AnnotationError("annotations:" + std::to_string(line) + ": " +
                              msg);
    }
    std::string ident() {
        skip_ws();
        if (eof() || !(isalnum((unsigned char)peek()) || peek() == '_'))
            fail("expected identifier");
        std::string out;
        while (!eof() && (isalnum((unsigned char)peek()) || peek() == '_' ||
                          peek() == '-' || peek() == '.' || peek() == '<' ||
                          peek() == '>'))
        {
            // '-' only continues an identifier when not starting '->'
            if (peek() == '-' && pos + 1 < text.size() && text[pos + 1] == '>')
                break;
            if (peek() == '>') break;
            if (peek() == '<') {
                // allow type names like vector<4xi32>
                size_t close = text.find('>', pos);
                if (close == std::string::npos) fail("unterminated '<'");
                out += text.substr(pos, close - pos + 1);
                while (pos <= close) advance();
                continue;
            }
            out += peek();
            advance();
        }
        if (out.empty()) fail("expected identifier");
        return out;
    }
    void expect(char c) {
        skip_ws();
        if (eof() || peek() != c) fail(std::string("expected '") + c + "'");
        advance();
    }
    bool try_consume(char c) {
        skip_ws();
        if (!eof() && peek() == c) {
            advance();
            return true;
        }
        return false;
    }
    bool try_word(const std::string& w) {
        skip_ws();
        if (text.compare(pos, w.size(), w) == 0) {
            for (size_t i = 0; i < w.size(); ++i) advance();
            return true;
        }
        return false;
    }
    std::vector<std::string> ident_list(char close) {
        std::vector<std::string> out;
        out.push_back(ident());
        while (try_consume(',')) out.push_back(ident());
        if (close) expect(close);
        return out;
    }
};

}  // namespace

AnnotationSet load_annotations(const std::string& text, const Grammar& g) {
    AnnotationSet ann;
    ACursor c(text);

    auto check_rules = [&](const std::vector<std::string>& names) {
        for (const auto& n : names)
            if (!g.has_rule(n))
                c.fail("unknown rule name " + n);
    };

    while (true) {
        c.skip_ws();
        if (c.eof()) break;
        std::string kw = c.ident();
        if (kw == "language") {
            ann.language = c.ident();
            c.expect(';');
        } else if (kw == "construct") {
            ConstructDef d;
            d.name = c.ident();
            if (ann.find(d.name)) c.fail("duplicate construct " + d.name);
            c.expect('=');
            std::string m = c.ident();
            c.expect('(');
            if (m == "rules") {
                d.matcher = MatcherKind::RuleSet;
                d.rule_set = c.ident_list(')');
                check_rules(d.rule_set);
            } else if (m == "union") {
                d.matcher = MatcherKind::Union;
                d.members = c.ident_list(')');
                for (const auto& mem : d.members)
                    if (!ann.find(mem))
                        c.fail("undefined union member " + mem);
            } else if (m == "pred") {
                d.matcher = MatcherKind::Predicate;
                d.predicate = c.ident();
                if (!predicate_library().count(d.predicate))
                    c.fail("unknown predicate " + d.predicate);
                if (!c.try_word("on")) c.fail("expected 'on'");
                d.rule_set = c.ident_list(')');
                check_rules(d.rule_set);
            } else {
                c.fail("expected rules(...), union(...) or pred(...)");
            }
            c.expect(';');
            ann.defs.push_back(std::move(d));
        } else if (kw == "role") {
            std::string name = c.ident();
            if (!ann.find(name)) c.fail("role for undefined construct " + name);
            std::string tag = c.ident();
            c.expect(';');
            RoleTag role;
            std::string* slot;
            if (tag == "use") {
                role = RoleTag::Use;
                slot = &ann.uses_label;
            } else if (tag == "def") {
                role = RoleTag::Def;
                slot = &ann.defs_label;
            } else if (tag == "type") {
                role = RoleTag::Type;
                slot = &ann.types_label;
            } else {
                c.fail("role must be use, def or type");
            }
            if (!slot->empty()) c.fail("duplicate role tag " + tag);
            *slot = name;
            for (auto& d : ann.defs)
                if (d.name == name) d.role = role;
        } else if (kw == "scopes") {
            ann.scope_types = c.ident_list(';');
        } else if (kw == "branches") {
            ann.branch_type = c.ident();
            c.expect(';');
        } else if (kw == "typecompat") {
            std::string from = c.ident();
            if (!c.try_word("->")) c.fail("expected '->'");
            std::string to = c.ident();
            c.expect(';');
            ann.typecompat.emplace_back(from, to);
        } else {
            c.fail("unknown directive " + kw);
        }
    }

    for (const auto& d : ann.defs)
        for (const auto& r : d.rule_set)
            ann.construct_type_map[r].push_back(d.name);
    return ann;
}

// ---------------------------------------------------------------------------
// Translation

int ConstructTree::lca(int a, int b) const {
    while (!descendant_or_self(b, a)) a = nodes[a].parent;
    return a;
}

namespace {

// Most specific matching def for a parse node, or nullptr. Unions never label
// nodes directly (their members always match with higher specificity).
const ConstructDef* match_node(const ParseTree& pt, int node,
                               const AnnotationSet& ann) {
    const ConstructDef* best = nullptr;
    int best_rank = -1;
    const std::string& kind = pt.nodes[node].kind;
    for (const auto& d : ann.defs) {
        int rank;
        if (d.matcher == MatcherKind::Predicate) {
            rank = 2;
        } else if (d.matcher == MatcherKind::RuleSet) {
            rank = 1;
        } else {
            continue;
        }
        if (std::find(d.rule_set.begin(), d.rule_set.end(), kind) ==
            d.rule_set.end())
            continue;
        if (d.matcher == MatcherKind::Predicate &&
            !predicate_library().at(d.predicate)(pt, node))
            continue;
        if (rank > best_rank) {
            best_rank = rank;
            best = &d;
        }
    }
    return best;
}

void translate_walk(const ParseTree& pt, int pnode, const AnnotationSet& ann,
                    ConstructTree& ct, int cparent) {
    const ConstructDef* def = match_node(pt, pnode, ann);
    int attach = cparent;
    if (def) {
        ConstructNode cn;
        cn.ctype = def->name;
        cn.parse_ref = pnode;
        cn.parent = cparent;
        cn.first_token = pt.nodes[pnode].first_token;
        cn.last_token = pt.nodes[pnode].last_token;
        cn.depth = ct.nodes[cparent].depth + 1;
        ct.nodes.push_back(std::move(cn));
        attach = (int)ct.nodes.size() - 1;
        ct.nodes[cparent].children.push_back(attach);
    }
    for (int ch : pt.nodes[pnode].children)
        translate_walk(pt, ch, ann, ct, attach);
}

void number_preorder(ConstructTree& ct, int node, int& counter) {
    ct.nodes[node].pre = counter++;
    for (int c : ct.nodes[node].children) number_preorder(ct, c, counter);
    ct.nodes[node].post = counter;
}

}  // namespace

ConstructTree translate(const ParseTree& pt, const AnnotationSet& ann) {
    ConstructTree ct;
    ConstructNode root;
    root.ctype = kProgramRoot;
    root.parse_ref = pt.root;
    root.first_token = pt.root >= 0 ? pt.nodes[pt.root].first_token : 0;
    root.last_token = pt.root >= 0 ? pt.nodes[pt.root].last_token : -1;
    ct.nodes.push_back(std::move(root));
    if (pt.root >= 0)
        for (int ch : pt.nodes[pt.root].children)
            translate_walk(pt, ch, ann, ct, 0);
    // Also consider the root parse node itself (it may match a def).
    int counter = 0;
    number_preorder(ct, 0, counter);
    return ct;
}

// ---------------------------------------------------------------------------
// Declaration-use resolution

namespace {

// First non-literal token in a node's span; the defined/used name.
int name_token_of(const ParseTree& pt, int pnode) {
    const ParseNode& n = pt.nodes[pnode];
    for (int t = n.first_token; t <= n.last_token; ++t)
        if (!pt.tokens[t].is_literal) return t;
    return n.first_token;
}

int parse_depth(const ParseTree& pt, int node) {
    int d = 0;
    while (pt.nodes[node].parent >= 0) {
        node = pt.nodes[node].parent;
        ++d;
    }
    return d;
}

// Depth of the LCA of two parse nodes.
int parse_lca_depth(const ParseTree& pt, int a, int b) {
    std::set<int> anc;
    int x = a;
    while (x >= 0) {
        anc.insert(x);
        x = pt.nodes[x].parent;
    }
    x = b;
    while (x >= 0 && !anc.count(x)) x = pt.nodes[x].parent;
    return x >= 0 ? parse_depth(pt, x) : -1;
}

}  // namespace

std::vector<int> DeclUseChains::uses_under(const ConstructTree& ct,
                                           int node) const {
    std::vector<int> out;
    for (int i = 0; i < (int)uses.size(); ++i)
        if (ct.descendant_or_self(uses[i].cnode, node)) out.push_back(i);
    return out;
}

std::map<std::string, int> DeclUseChains::unresolved_names() const {
    std::map<std::string, int> out;
    for (const auto& u : uses)
        if (u.def < 0) ++out[u.name];
    return out;
}

DeclUseChains resolve_decl_use(const ParseTree& pt, const ConstructTree& ct,
                               const AnnotationSet& ann) {
    DeclUseChains chains;
    if (!ann.has_roles()) return chains;

    std::vector<int> type_nodes;
    for (int i = 0; i < (int)ct.nodes.size(); ++i) {
        const auto& cn = ct.nodes[i];
        if (ann.is_a(cn.ctype, ann.types_label)) type_nodes.push_back(i);
    }

    auto owning_scope = [&](int cnode) {
        int p = ct.nodes[cnode].parent;
        while (p > 0 && !ann.scope_forming(ct.nodes[p].ctype))
            p = ct.nodes[p].parent;
        return p < 0 ? 0 : p;
    };

    for (int i = 0; i < (int)ct.nodes.size(); ++i) {
        const auto& cn = ct.nodes[i];
        if (ann.is_a(cn.ctype, ann.defs_label)) {
            DefInfo d;
            d.cnode = i;
            d.name_token = name_token_of(pt, cn.parse_ref);
            d.name = pt.tokens[d.name_token].text;
            d.scope = owning_scope(i);
            // Associate the TYPES_ node sharing the deepest parse ancestor;
            // ties go to the nearest in token distance.
            int best = -1, best_depth = -1, best_dist = 1 << 30;
            for (int t : type_nodes) {
                int depth = parse_lca_depth(pt, cn.parse_ref,
                                            ct.nodes[t].parse_ref);
                int dist = std::abs(ct.nodes[t].first_token - cn.first_token);
                if (depth > best_depth ||
                    (depth == best_depth && dist < best_dist)) {
                    best = t;
                    best_depth = depth;
                    best_dist = dist;
                }
            }
            if (best >= 0) d.type_label = pt.token_text(ct.nodes[best].parse_ref);
            // Array declarators get a distinct label.
            const ParseNode& pn = pt.nodes[cn.parse_ref];
            for (int t = pn.first_token; t <= pn.last_token; ++t)
                if (pt.tokens[t].text == "[") {
                    d.type_label += "[]";
                    break;
                }
            chains.scope_defs[d.scope].push_back((int)chains.defs.size());
            chains.defs.push_back(std::move(d));
        } else if (ann.is_a(cn.ctype, ann.uses_label)) {
            UseInfo u;
            u.cnode = i;
            u.name_token = name_token_of(pt, cn.parse_ref);
            u.name = pt.tokens[u.name_token].text;
            chains.uses.push_back(std::move(u));
        }
    }

    // Resolve: innermost enclosing scope first; within a scope, the latest
    // preceding declaration of the name wins.
    for (auto& u : chains.uses) {
        int scope = ct.nodes[u.cnode].parent < 0
                        ? 0
                        : [&] {
                              int p = u.cnode;
                              while (p > 0 && !ann.scope_forming(ct.nodes[p].ctype))
                                  p = ct.nodes[p].parent;
                              return p < 0 ? 0 : p;
                          }();
        for (int s = scope; s >= 0;
             s = (s == 0 ? -1 : [&] {
                 int p = ct.nodes[s].parent;
                 while (p > 0 && !ann.scope_forming(ct.nodes[p].ctype))
                     p = ct.nodes[p].parent;
                 return p < 0 ? 0 : p;
             }())) {
            auto it = chains.scope_defs.find(s);
            if (it != chains.scope_defs.end()) {
                int found = -1;
                for (int di : it->second) {
                    const DefInfo& d = chains.defs[di];
                    if (d.name == u.name && d.name_token <= u.name_token)
                        found = di;  // latest preceding wins
                }
                if (found >= 0) {
                    u.def = found;
                    break;
                }
            }
            if (s == 0) break;
        }
    }
    return chains;
}

bool contains(const ConstructTree& ct, const DeclUseChains& chains, int ctx,
              const std::vector<int>& nodes) {
    for (int n : nodes) {
        if (!ct.descendant_or_self(n, ctx))
            throw std::logic_error("contains: node is not under ctx");
        for (const auto& u : chains.uses) {
            if (!ct.descendant_or_self(u.cnode, n)) continue;
            if (u.def < 0) return false;
            int dn = chains.defs[u.def].cnode;
            if (!ct.descendant_or_self(dn, ctx) &&
                !ct.descendant_or_self(dn, n))
                return false;
        }
    }
    return true;
}

Program analyze(const Grammar& g, const AnnotationSet& ann,
                const std::string& source, const std::string& id) {
    Program p;
    p.id = id;
    p.pt = parse(g, source);
    p.ct = translate(p.pt, ann);
    p.chains = resolve_decl_use(p.pt, p.ct, ann);
    p.grammar = &g;
    p.ann = &ann;
    return p;
}

}  // namespace tf
