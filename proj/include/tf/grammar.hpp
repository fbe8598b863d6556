#pragma once

#include <map>
#include <optional>
#include <regex>
#include <stdexcept>
#include <string>
#include <vector>

namespace tf {

// ---------------------------------------------------------------------------
// Errors

struct GrammarError : std::runtime_error {
    int line = 0;
    int column = 0;
    GrammarError(const std::string& msg, int line_, int col_)
        : std::runtime_error(msg), line(line_), column(col_) {}
};

struct TokenizeError : std::runtime_error {
    size_t offset = 0;
    TokenizeError(const std::string& msg, size_t off)
        : std::runtime_error(msg), offset(off) {}
};

struct ParseError : std::runtime_error {
    // Index of the furthest token the parser consumed before failing.
    int furthest_token = 0;
    std::vector<std::string> expected;
    ParseError(const std::string& msg, int tok, std::vector<std::string> exp)
        : std::runtime_error(msg), furthest_token(tok), expected(std::move(exp)) {}
};

// ---------------------------------------------------------------------------
// Grammar

enum class SymbolKind { RuleRef, Literal, TokenClass };

struct Symbol {
    SymbolKind kind;
    std::string text;  // rule name, literal text, or token-class name
    bool operator==(const Symbol&) const = default;
};

using Alternative = std::vector<Symbol>;

struct Rule {
    std::string name;
    std::vector<Alternative> alts;
};

struct TokenClassDef {
    std::string name;
    std::string pattern;  // ECMAScript regex source
    int priority = 0;     // larger wins on equal-length matches
    std::regex re;
};

struct Grammar {
    std::vector<Rule> rules;                 // declaration order
    std::map<std::string, int> rule_index;   // name -> index into rules
    std::vector<TokenClassDef> token_classes;
    std::vector<std::pair<std::string, std::regex>> skips;  // pattern source + compiled
    std::vector<std::string> literals;       // every quoted terminal used by any rule
    std::string start_rule;

    bool has_rule(const std::string& n) const { return rule_index.count(n) > 0; }
    const Rule& rule(const std::string& n) const { return rules[rule_index.at(n)]; }
    bool has_token_class(const std::string& n) const;
};

// Parses the repo's grammar file format:
//   start ruleName;
//   token NAME /pattern/ priority N;
//   skip /pattern/;
//   ruleName : sym sym | sym ;
// Quoted terminals ('for') are literals; bare identifiers refer to rules or
// declared token classes. Patterns are ECMAScript regexes ("\/" escapes a slash).
Grammar load_grammar(const std::string& text);

// ---------------------------------------------------------------------------
// Tokens

struct Token {
    std::string cls;         // token-class name; literals use their own text
    bool is_literal = false;
    std::string text;
    int index = 0;
    size_t byte_start = 0;
    size_t byte_end = 0;     // half-open
    std::string leading_ws;  // skipped text directly before this token
};

// Longest match wins; ties go to literals, then higher priority, then
// declaration order. Skip classes compete like token classes but emit nothing.
std::vector<Token> tokenize(const Grammar& g, const std::string& source);

// ---------------------------------------------------------------------------
// Parse trees

struct ParseTree;

struct ParseNode {
    std::string kind;        // rule name; for leaves, token-class name or literal text
    int alt_index = -1;      // which alternative produced this node; -1 for leaves
    std::vector<int> children;
    int token = -1;          // leaf only: index into ParseTree::tokens
    int first_token = 0;     // inclusive token span; empty span: first > last
    int last_token = -1;
    int parent = -1;
};

struct ParseTree {
    std::string source;
    std::vector<Token> tokens;
    std::vector<ParseNode> nodes;  // preorder-ish arena; nodes[root] is the root
    int root = -1;

    const ParseNode& at(int i) const { return nodes[i]; }
    bool leaf(int i) const { return nodes[i].token >= 0; }
    int span_tokens(int i) const {
        return nodes[i].last_token - nodes[i].first_token + 1;
    }
    // Byte span of a node's token range in the original source; empty spans
    // collapse to a point.
    std::pair<size_t, size_t> byte_span(int i) const;
    std::string token_text(int i) const;  // whitespace-normalized token text of node i
};

// Earley-based parser for arbitrary CFGs. Ambiguity is resolved
// deterministically: alternatives are tried in declaration order and each
// symbol greedily takes the longest viable span.
ParseTree parse(const Grammar& g, const std::string& source);

// Shape comparison: kinds, alt indexes, child counts, leaf token texts.
bool same_shape(const ParseTree& a, const ParseTree& b);

// ---------------------------------------------------------------------------
// Unparse

// Serializes the leaves of a (possibly edited) token sequence. Single space
// between tokens except none before ';' ')' ',' and none after '('. Adjacent
// tokens that came from the same source keep their original spacing.
std::string unparse(const ParseTree& t);

// Renders a plain token sequence with the same spacing policy. `verbatim`
// keeps original leading whitespace for tokens that directly followed their
// predecessor in the source they came from.
std::string render_tokens(const std::vector<Token>& toks, bool verbatim = true);

}  // namespace tf
