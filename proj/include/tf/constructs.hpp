#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "tf/grammar.hpp"

namespace tf {

struct AnnotationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Annotations

enum class MatcherKind { RuleSet, Union, Predicate };
enum class RoleTag { None, Use, Def, Type };

struct ConstructDef {
    std::string name;
    MatcherKind matcher = MatcherKind::RuleSet;
    std::vector<std::string> rule_set;  // RuleSet / Predicate base rules
    std::vector<std::string> members;   // Union
    std::string predicate;              // Predicate name
    RoleTag role = RoleTag::None;
};

struct AnnotationSet {
    std::string language;
    std::vector<ConstructDef> defs;
    // Derived: grammar rule -> candidate construct names, in annotation order.
    std::map<std::string, std::vector<std::string>> construct_type_map;
    std::vector<std::string> scope_types;  // scope-forming construct labels
    std::string branch_type;               // label marking if-else branches, or ""
    // (from, to): a value of type `from` is acceptable where `to` is expected.
    std::vector<std::pair<std::string, std::string>> typecompat;
    std::string uses_label, defs_label, types_label;

    const ConstructDef* find(const std::string& name) const;
    // True if `label` equals `ancestor` or is reachable through union membership.
    bool is_a(const std::string& label, const std::string& ancestor) const;
    bool type_in(const std::string& label,
                 const std::vector<std::string>& set) const;
    bool compatible(const std::string& have, const std::string& want) const;
    bool scope_forming(const std::string& label) const;
    bool has_roles() const {
        return !uses_label.empty() && !defs_label.empty() && !types_label.empty();
    }
};

// Registered predicate library. Predicates are pure functions of a parse node.
using PredicateFn = std::function<bool(const ParseTree&, int)>;
const std::map<std::string, PredicateFn>& predicate_library();

AnnotationSet load_annotations(const std::string& text, const Grammar& g);

// ---------------------------------------------------------------------------
// Construct tree

inline constexpr const char* kProgramRoot = "PROGRAM_";

struct ConstructNode {
    std::string ctype;
    int parse_ref = -1;
    int parent = -1;
    std::vector<int> children;
    int first_token = 0;
    int last_token = -1;
    int depth = 0;
    int pre = 0;   // preorder index
    int post = 0;  // subtree end (exclusive) in preorder numbering
};

struct ConstructTree {
    std::vector<ConstructNode> nodes;  // preorder; nodes[0] is PROGRAM_ root

    const ConstructNode& at(int i) const { return nodes[i]; }
    int root() const { return 0; }
    bool descendant_or_self(int node, int anc) const {
        return nodes[anc].pre <= nodes[node].pre &&
               nodes[node].pre < nodes[anc].post;
    }
    int lca(int a, int b) const;
    int span_tokens(int i) const {
        return nodes[i].last_token - nodes[i].first_token + 1;
    }
};

// Keeps exactly the parse nodes matched by some ConstructDef; when several
// defs match one parse node the most specific wins (predicate > rule-set >
// union), ties broken by annotation order.
ConstructTree translate(const ParseTree& pt, const AnnotationSet& ann);

// ---------------------------------------------------------------------------
// Declaration-use chains

struct DefInfo {
    std::string name;
    std::string type_label;  // "" when untyped
    int cnode = -1;
    int scope = -1;       // owning scope construct node
    int name_token = -1;  // token index of the defined name
};

struct UseInfo {
    std::string name;
    int cnode = -1;
    int def = -1;  // index into defs, or -1 if unresolved
    int name_token = -1;
};

struct DeclUseChains {
    std::vector<DefInfo> defs;
    std::vector<UseInfo> uses;
    std::map<int, std::vector<int>> scope_defs;  // scope cnode -> owned defs

    std::vector<int> uses_under(const ConstructTree& ct, int node) const;
    std::map<std::string, int> unresolved_names() const;  // name -> count
};

DeclUseChains resolve_decl_use(const ParseTree& pt, const ConstructTree& ct,
                               const AnnotationSet& ann);

// True iff every use inside every node resolves to a def that lies inside ctx
// (or inside the node itself). Nodes must be descendants-or-self of ctx.
bool contains(const ConstructTree& ct, const DeclUseChains& chains, int ctx,
              const std::vector<int>& nodes);

// ---------------------------------------------------------------------------
// Analyzed program bundle

struct Program {
    std::string id;
    ParseTree pt;
    ConstructTree ct;
    DeclUseChains chains;
    const Grammar* grammar = nullptr;
    const AnnotationSet* ann = nullptr;
};

Program analyze(const Grammar& g, const AnnotationSet& ann,
                const std::string& source, const std::string& id);

}  // namespace tf
