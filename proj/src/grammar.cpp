#include "tf/grammar.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace tf {

bool Grammar::has_token_class(const std::string& n) const {
    for (const auto& tc : token_classes)
        if (tc.name == n) return true;
    return false;
}

// ---------------------------------------------------------------------------
// Grammar file reader

namespace {

struct GCursor {
    const std::string& text;
    size_t pos = 0;
    int line = 1;
    int col = 1;

    explicit GCursor(const std::string& t) : text(t) {}

    bool eof() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }

    void advance() {
        if (text[pos] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++pos;
    }

    void skip_ws() {
        while (!eof()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '#') {
                while (!eof() && peek() != '\n') advance();
            } else {
                break;
            }
        }
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw GrammarError("grammar:" + std::to_string(line) + ":" +
                               std::to_string(col) + ": " + msg,
                           line, col);
    }

    std::string ident() {
        skip_ws();
        if (eof() || !(isalpha((unsigned char)peek()) || peek() == '_'))
            fail("expected identifier");
        std::string out;
        while (!eof() && (isalnum((unsigned char)peek()) || peek() == '_' ||
                          peek() == '.')) {
            out += peek();
            advance();
        }
        return out;
    }

    void expect(char c) {
        skip_ws();
        if (eof() || peek() != c)
            fail(std::string("expected '") + c + "'");
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

    std::string quoted() {
        expect('\'');
        std::string out;
        while (!eof() && peek() != '\'') {
            char c = peek();
            if (c == '\\') {
                advance();
                if (eof()) fail("unterminated literal");
                c = peek();
            }
            out += c;
            advance();
        }
        if (eof()) fail("unterminated literal");
        advance();  // closing quote
        if (out.empty()) fail("empty literal");
        return out;
    }

    std::string slashed_pattern() {
        skip_ws();
        if (eof() || peek() != '/') fail("expected /pattern/");
        advance();
        std::string out;
        while (!eof() && peek() != '/') {
            char c = peek();
            if (c == '\\') {
                advance();
                if (eof()) fail("unterminated pattern");
                if (peek() == '/') {
                    out += '/';
                } else {
                    out += '\\';
                    out += peek();
                }
                advance();
                continue;
            }
            out += c;
            advance();
        }
        if (eof()) fail("unterminated pattern");
        advance();
        return out;
    }
};

std::regex compile_pattern(GCursor& c, const std::string& pat) {
    try {
        return std::regex(pat, std::regex::ECMAScript | std::regex::optimize);
    } catch (const std::regex_error& e) {
        c.fail(std::string("bad pattern: ") + e.what());
    }
}

}  // namespace

Grammar load_grammar(const std::string& text) {
    Grammar g;
    GCursor c(text);
    std::set<std::string> literal_set;

    while (true) {
        c.skip_ws();
        if (c.eof()) break;
        std::string name = c.ident();

        if (name == "start") {
            g.start_rule = c.ident();
            c.expect(';');
        } else if (name == "token") {
            TokenClassDef tc;
            tc.name = c.ident();
            if (g.has_token_class(tc.name))
                c.fail("duplicate token class " + tc.name);
            tc.pattern = c.slashed_pattern();
            c.skip_ws();
            std::string kw = c.ident();
            if (kw != "priority") c.fail("expected 'priority'");
            c.skip_ws();
            std::string num;
            bool neg = c.try_consume('-');
            while (!c.eof() && isdigit((unsigned char)c.peek())) {
                num += c.peek();
                c.advance();
            }
            if (num.empty()) c.fail("expected priority number");
            tc.priority = (neg ? -1 : 1) * std::stoi(num);
            tc.re = compile_pattern(c, tc.pattern);
            c.expect(';');
            g.token_classes.push_back(std::move(tc));
        } else if (name == "skip") {
            std::string pat = c.slashed_pattern();
            g.skips.emplace_back(pat, compile_pattern(c, pat));
            c.expect(';');
        } else {
            // rule definition
            if (g.rule_index.count(name))
                c.fail("duplicate rule name " + name);
            Rule r;
            r.name = name;
            c.expect(':');
            Alternative alt;
            while (true) {
                c.skip_ws();
                if (c.eof()) c.fail("unterminated rule " + name);
                char ch = c.peek();
                if (ch == ';') {
                    c.advance();
                    r.alts.push_back(std::move(alt));
                    break;
                }
                if (ch == '|') {
                    c.advance();
                    r.alts.push_back(std::move(alt));
                    alt = {};
                    continue;
                }
                if (ch == '\'') {
                    std::string lit = c.quoted();
                    literal_set.insert(lit);
                    alt.push_back({SymbolKind::Literal, lit});
                } else {
                    std::string sym = c.ident();
                    // Kind resolved after all declarations are read.
                    alt.push_back({SymbolKind::RuleRef, sym});
                }
            }
            g.rule_index[r.name] = (int)g.rules.size();
            g.rules.push_back(std::move(r));
        }
    }

    if (g.start_rule.empty())
        throw GrammarError("grammar: missing 'start' declaration", 0, 0);
    if (!g.has_rule(g.start_rule))
        throw GrammarError("grammar: undefined rule " + g.start_rule +
                               " named as start",
                           0, 0);

    // Resolve bare identifiers: declared token class or rule; else error.
    for (auto& r : g.rules) {
        for (auto& alt : r.alts) {
            for (auto& sym : alt) {
                if (sym.kind != SymbolKind::RuleRef) continue;
                if (g.has_token_class(sym.text)) {
                    sym.kind = SymbolKind::TokenClass;
                } else if (!g.has_rule(sym.text)) {
                    throw GrammarError(
                        "grammar: undefined rule " + sym.text + " referenced by " +
                            r.name,
                        0, 0);
                }
            }
        }
    }

    g.literals.assign(literal_set.begin(), literal_set.end());
    return g;
}

// ---------------------------------------------------------------------------
// Tokenizer

std::vector<Token> tokenize(const Grammar& g, const std::string& source) {
    std::vector<Token> out;
    size_t pos = 0;
    std::string pending_ws;

    auto match_regex = [&](const std::regex& re, size_t at) -> size_t {
        std::smatch m;
        auto begin = source.cbegin() + (long)at;
        if (std::regex_search(begin, source.cend(), m, re,
                              std::regex_constants::match_continuous))
            return (size_t)m.length(0);
        return 0;
    };

    while (pos < source.size()) {
        // Skip classes.
        size_t best_skip = 0;
        for (const auto& [pat, re] : g.skips)
            best_skip = std::max(best_skip, match_regex(re, pos));
        if (best_skip > 0) {
            pending_ws += source.substr(pos, best_skip);
            pos += best_skip;
            continue;
        }

        // Literals and token classes: longest match, literal beats class,
        // then higher priority, then declaration order.
        size_t best_len = 0;
        bool best_is_lit = false;
        int best_prio = 0;
        int best_class = -1;
        std::string best_lit;

        for (const auto& lit : g.literals) {
            if (lit.size() > best_len &&
                source.compare(pos, lit.size(), lit) == 0) {
                best_len = lit.size();
                best_is_lit = true;
                best_lit = lit;
            } else if (lit.size() == best_len && best_len > 0 && !best_is_lit &&
                       source.compare(pos, lit.size(), lit) == 0) {
                best_is_lit = true;
                best_lit = lit;
            }
        }
        for (int i = 0; i < (int)g.token_classes.size(); ++i) {
            size_t len = match_regex(g.token_classes[i].re, pos);
            if (len == 0) continue;
            bool better = false;
            if (len > best_len) {
                better = true;
            } else if (len == best_len && !best_is_lit) {
                better = best_class < 0 || g.token_classes[i].priority > best_prio;
            }
            if (better) {
                best_len = len;
                best_is_lit = false;
                best_class = i;
                best_prio = g.token_classes[i].priority;
            }
        }

        if (best_len == 0)
            throw TokenizeError("unrecognized character '" +
                                    std::string(1, source[pos]) +
                                    "' at offset " + std::to_string(pos),
                                pos);

        Token t;
        t.is_literal = best_is_lit;
        t.cls = best_is_lit ? best_lit : g.token_classes[best_class].name;
        t.text = source.substr(pos, best_len);
        t.index = (int)out.size();
        t.byte_start = pos;
        t.byte_end = pos + best_len;
        t.leading_ws = std::move(pending_ws);
        pending_ws.clear();
        out.push_back(std::move(t));
        pos += best_len;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Earley parser

namespace {

struct EarleyItem {
    int rule;
    int alt;
    int dot;
    int origin;
    bool operator==(const EarleyItem&) const = default;
};

struct ItemHash {
    size_t operator()(const EarleyItem& it) const {
        size_t h = (size_t)it.rule;
        h = h * 1315423911u ^ (size_t)it.alt;
        h = h * 1315423911u ^ (size_t)it.dot;
        h = h * 1315423911u ^ (size_t)it.origin;
        return h;
    }
};

struct PairHash {
    size_t operator()(const std::pair<int, int>& p) const {
        return (size_t)p.first * 1000003u + (size_t)p.second;
    }
};

bool terminal_matches(const Symbol& sym, const Token& tok) {
    if (sym.kind == SymbolKind::Literal)
        return tok.is_literal && tok.text == sym.text;
    return !tok.is_literal && tok.cls == sym.text;
}

class Parser {
  public:
    Parser(const Grammar& g, std::vector<Token> toks, std::string src)
        : g_(g) {
        tree_.source = std::move(src);
        tree_.tokens = std::move(toks);
        compute_nullable();
    }

    ParseTree run() {
        recognize();
        int n = (int)tree_.tokens.size();
        int start = g_.rule_index.at(g_.start_rule);
        bool accepted = n == 0 && nullable_[start];
        for (int a = 0; !accepted && a < (int)g_.rules[start].alts.size(); ++a) {
            auto it = completed_.find({pack(start, a), 0});
            accepted = it != completed_.end() && it->second.count(n);
        }
        if (!accepted) report_failure();

        in_progress_.clear();
        int root = build(start, 0, n);
        if (root < 0) report_failure();
        tree_.root = root;
        set_parents(root, -1);
        return std::move(tree_);
    }

  private:
    struct CompHash {
        size_t operator()(const std::pair<long long, int>& p) const {
            return (size_t)p.first * 1000003u + (size_t)p.second;
        }
    };

    const Grammar& g_;
    ParseTree tree_;
    std::vector<bool> nullable_;
    // completed_[{packed(rule,alt), origin}] = set of end positions
    std::unordered_map<std::pair<long long, int>, std::set<int>, CompHash>
        completed_;
    std::unordered_set<long long> in_progress_;
    int furthest_ = 0;
    std::set<std::string> expected_at_furthest_;

    static long long pack(int rule, int alt) {
        return (long long)rule * 1000 + alt;
    }

    void compute_nullable() {
        nullable_.assign(g_.rules.size(), false);
        bool changed = true;
        while (changed) {
            changed = false;
            for (size_t i = 0; i < g_.rules.size(); ++i) {
                if (nullable_[i]) continue;
                for (const auto& alt : g_.rules[i].alts) {
                    bool all = true;
                    for (const auto& sym : alt) {
                        if (sym.kind != SymbolKind::RuleRef ||
                            !nullable_[g_.rule_index.at(sym.text)]) {
                            all = false;
                            break;
                        }
                    }
                    if (all) {
                        nullable_[i] = true;
                        changed = true;
                        break;
                    }
                }
            }
        }
    }

    const Alternative& alt_of(const EarleyItem& it) const {
        return g_.rules[it.rule].alts[it.alt];
    }

    void recognize() {
        int n = (int)tree_.tokens.size();
        std::vector<std::vector<EarleyItem>> sets(n + 1);
        std::vector<std::unordered_set<EarleyItem, ItemHash>> seen(n + 1);

        auto add = [&](int at, EarleyItem it) {
            if (seen[at].insert(it).second) sets[at].push_back(it);
        };

        int start = g_.rule_index.at(g_.start_rule);
        for (int a = 0; a < (int)g_.rules[start].alts.size(); ++a)
            add(0, {start, a, 0, 0});

        for (int i = 0; i <= n; ++i) {
            for (size_t qi = 0; qi < sets[i].size(); ++qi) {
                EarleyItem it = sets[i][qi];
                const auto& alt = alt_of(it);
                if (it.dot == (int)alt.size()) {
                    // Completion
                    completed_[{pack(it.rule, it.alt), it.origin}].insert(i);
                    const std::string& name = g_.rules[it.rule].name;
                    for (size_t wi = 0; wi < sets[it.origin].size(); ++wi) {
                        EarleyItem wait = sets[it.origin][wi];
                        const auto& walt = alt_of(wait);
                        if (wait.dot < (int)walt.size() &&
                            walt[wait.dot].kind == SymbolKind::RuleRef &&
                            walt[wait.dot].text == name)
                            add(i, {wait.rule, wait.alt, wait.dot + 1,
                                    wait.origin});
                    }
                    continue;
                }
                const Symbol& sym = alt[it.dot];
                if (sym.kind == SymbolKind::RuleRef) {
                    int r = g_.rule_index.at(sym.text);
                    for (int a = 0; a < (int)g_.rules[r].alts.size(); ++a)
                        add(i, {r, a, 0, i});
                    // Aycock-Horspool nullable shortcut
                    if (nullable_[r])
                        add(i, {it.rule, it.alt, it.dot + 1, it.origin});
                } else {
                    // Scan
                    if (i >= furthest_) {
                        if (i > furthest_) expected_at_furthest_.clear();
                        furthest_ = i;
                        expected_at_furthest_.insert(
                            sym.kind == SymbolKind::Literal ? "'" + sym.text + "'"
                                                            : sym.text);
                    }
                    if (i < n && terminal_matches(sym, tree_.tokens[i]))
                        add(i + 1, {it.rule, it.alt, it.dot + 1, it.origin});
                }
            }
        }
    }

    [[noreturn]] void report_failure() {
        std::ostringstream msg;
        msg << "parse error at token " << furthest_;
        if (furthest_ < (int)tree_.tokens.size())
            msg << " ('" << tree_.tokens[furthest_].text << "')";
        else
            msg << " (end of input)";
        msg << "; expected one of:";
        for (const auto& e : expected_at_furthest_) msg << " " << e;
        throw ParseError(msg.str(), furthest_,
                         {expected_at_furthest_.begin(),
                          expected_at_furthest_.end()});
    }

    int make_leaf(int tok_index) {
        ParseNode node;
        const Token& t = tree_.tokens[tok_index];
        node.kind = t.cls;
        node.token = tok_index;
        node.first_token = tok_index;
        node.last_token = tok_index;
        tree_.nodes.push_back(std::move(node));
        return (int)tree_.nodes.size() - 1;
    }

    int make_node(int rule, int alt, std::vector<int> children, int first,
                  int last) {
        ParseNode node;
        node.kind = g_.rules[rule].name;
        node.alt_index = alt;
        node.children = std::move(children);
        node.first_token = first;
        node.last_token = last;
        tree_.nodes.push_back(std::move(node));
        return (int)tree_.nodes.size() - 1;
    }

    // Build an empty derivation for a nullable rule.
    int build_empty(int rule, int at) {
        const auto& alts = g_.rules[rule].alts;
        for (int a = 0; a < (int)alts.size(); ++a) {
            bool all = true;
            for (const auto& sym : alts[a]) {
                if (sym.kind != SymbolKind::RuleRef ||
                    !nullable_[g_.rule_index.at(sym.text)]) {
                    all = false;
                    break;
                }
            }
            if (!all) continue;
            std::vector<int> kids;
            bool ok = true;
            for (const auto& sym : alts[a]) {
                int k = build_empty(g_.rule_index.at(sym.text), at);
                if (k < 0) {
                    ok = false;
                    break;
                }
                kids.push_back(k);
            }
            if (ok) return make_node(rule, a, std::move(kids), at, at - 1);
        }
        return -1;
    }

    // Deterministic derivation: alternatives in declaration order, symbols
    // greedily longest-first, backtracking within the Earley chart.
    int build(int rule, int i, int j) {
        if (i == j && nullable_[rule]) {
            // Prefer a completed non-empty? An empty span can only derive empty.
            int e = build_empty(rule, i);
            if (e >= 0) return e;
        }
        long long key = ((long long)rule << 40) ^ ((long long)i << 20) ^ j;
        if (in_progress_.count(key)) return -1;
        in_progress_.insert(key);

        const auto& alts = g_.rules[rule].alts;
        int result = -1;
        for (int a = 0; a < (int)alts.size() && result < 0; ++a) {
            auto it = completed_.find({pack(rule, a), i});
            if (it == completed_.end() || !it->second.count(j)) continue;
            std::vector<int> kids;
            if (match_seq(alts[a], 0, i, j, kids))
                result = make_node(rule, a, std::move(kids), i, j - 1);
        }
        in_progress_.erase(key);
        return result;
    }

    bool match_seq(const Alternative& alt, int idx, int pos, int end,
                   std::vector<int>& kids) {
        if (idx == (int)alt.size()) return pos == end;
        const Symbol& sym = alt[idx];
        if (sym.kind != SymbolKind::RuleRef) {
            if (pos < end && terminal_matches(sym, tree_.tokens[pos])) {
                kids.push_back(make_leaf(pos));
                if (match_seq(alt, idx + 1, pos + 1, end, kids)) return true;
                pop_subtree(kids);
            }
            return false;
        }
        int r = g_.rule_index.at(sym.text);
        // Candidate end positions, longest first.
        std::vector<int> cands;
        for (int a = 0; a < (int)g_.rules[r].alts.size(); ++a) {
            auto it = completed_.find({pack(r, a), pos});
            if (it == completed_.end()) continue;
            for (int e : it->second)
                if (e <= end) cands.push_back(e);
        }
        if (nullable_[r]) cands.push_back(pos);
        std::sort(cands.begin(), cands.end(), std::greater<int>());
        cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
        for (int e : cands) {
            size_t mark = tree_.nodes.size();
            int child = build(r, pos, e);
            if (child < 0) {
                tree_.nodes.resize(mark);
                continue;
            }
            kids.push_back(child);
            if (match_seq(alt, idx + 1, e, end, kids)) return true;
            kids.pop_back();
            tree_.nodes.resize(mark);
        }
        return false;
    }

    void pop_subtree(std::vector<int>& kids) {
        tree_.nodes.pop_back();
        kids.pop_back();
    }

    void set_parents(int node, int parent) {
        tree_.nodes[node].parent = parent;
        for (int c : tree_.nodes[node].children) set_parents(c, node);
    }
};

}  // namespace

ParseTree parse(const Grammar& g, const std::string& source) {
    Parser p(g, tokenize(g, source), source);
    return p.run();
}

std::pair<size_t, size_t> ParseTree::byte_span(int i) const {
    const ParseNode& n = nodes[i];
    if (n.first_token > n.last_token) {
        size_t at = n.first_token < (int)tokens.size()
                        ? tokens[n.first_token].byte_start
                        : source.size();
        return {at, at};
    }
    return {tokens[n.first_token].byte_start, tokens[n.last_token].byte_end};
}

std::string ParseTree::token_text(int i) const {
    const ParseNode& n = nodes[i];
    std::string out;
    for (int t = n.first_token; t <= n.last_token; ++t) {
        if (!out.empty()) out += ' ';
        out += tokens[t].text;
    }
    return out;
}

namespace {

bool shape_eq(const ParseTree& a, int na, const ParseTree& b, int nb) {
    const ParseNode& x = a.nodes[na];
    const ParseNode& y = b.nodes[nb];
    if (x.kind != y.kind || x.alt_index != y.alt_index ||
        x.children.size() != y.children.size())
        return false;
    if ((x.token >= 0) != (y.token >= 0)) return false;
    if (x.token >= 0 && a.tokens[x.token].text != b.tokens[y.token].text)
        return false;
    for (size_t i = 0; i < x.children.size(); ++i)
        if (!shape_eq(a, x.children[i], b, y.children[i])) return false;
    return true;
}

}  // namespace

bool same_shape(const ParseTree& a, const ParseTree& b) {
    if (a.root < 0 || b.root < 0) return a.root == b.root;
    return shape_eq(a, a.root, b, b.root);
}

std::string render_tokens(const std::vector<Token>& toks, bool verbatim) {
    static const std::string no_space_before = ";),";
    std::string out;
    const Token* prev = nullptr;
    for (const auto& t : toks) {
        bool glue = false;
        if (prev == nullptr) {
            glue = true;
        } else if (verbatim && t.index == prev->index + 1 &&
                   !t.leading_ws.empty() &&
                   prev->byte_end <= t.byte_start) {
            out += t.leading_ws;
            glue = true;
        } else if (verbatim && t.index == prev->index + 1 &&
                   prev->byte_end == t.byte_start) {
            glue = true;  // originally adjacent with no gap
        } else if (t.text.size() == 1 &&
                   no_space_before.find(t.text[0]) != std::string::npos) {
            glue = true;
        } else if (prev->text == "(") {
            glue = true;
        }
        if (!glue) out += ' ';
        out += t.text;
        prev = &t;
    }
    return out;
}

std::string unparse(const ParseTree& t) {
    std::vector<Token> seq;
    std::vector<std::pair<int, size_t>> st;
    if (t.root >= 0) st.push_back({t.root, 0});
    while (!st.empty()) {
        auto& [node, ci] = st.back();
        const ParseNode& n = t.nodes[node];
        if (n.token >= 0) {
            seq.push_back(t.tokens[n.token]);
            st.pop_back();
            continue;
        }
        if (ci >= n.children.size()) {
            st.pop_back();
            continue;
        }
        int child = n.children[ci++];
        st.push_back({child, 0});
    }
    return render_tokens(seq, true);
}

}  // namespace tf
