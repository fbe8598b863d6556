#pragma once

#include <map>
#include <string>
#include <vector>

#include "tf/constructs.hpp"

namespace tf {

enum class MutatorKind { Replicate, Move, Insert, Replace };

const char* mutator_name(MutatorKind k);
MutatorKind mutator_from_name(const std::string& s);  // throws on unknown

// Tunable predicate bounds with the shipped defaults.
struct Bounds {
    int cousins_k = 1;        // max generation distance
    int cousins_d = 2;        // max token distance between cousins
    int nesting_d = 2;        // max nesting depth
    int balanced_d = 2;       // max branch depth
    int sequence_min = 2;     // min run length
    int exists_min_tokens = 1;
    int cap = 64;             // per-(program, style) match cap
};

struct CompositionStyle {
    std::string name;
    int arity;  // fixed arity; -1 for variable (Sequence)
    // Admissible construct categories. Same-type styles use one shared set;
    // Balanced stores the fixed first-position type in `first_type`.
    std::vector<std::string> admissible;
    std::string first_type;  // Balanced only: the required ancestor type
    std::vector<std::string> ctx_types;
    bool same_type_required = false;
    std::vector<MutatorKind> allowed_mutators;

    bool allows(MutatorKind k) const;
};

// The six shipped styles, in fixed registry order.
const std::vector<CompositionStyle>& style_registry();
const CompositionStyle* find_style(const std::string& name);  // null if absent

struct StyleMatch {
    std::string style;
    std::vector<int> nodes;  // construct-node indices, relation order
    int ctx = -1;            // construct-node index
    std::map<std::string, int> predicate_values;
    std::string donor_id;
    int program_index = -1;  // index into the owning corpus, -1 if standalone
};

// Construct category: the admissible-set element `label` maps into via the
// annotation type hierarchy, or "" when none.
std::string category_of(const AnnotationSet& ann, const std::string& label,
                        const std::vector<std::string>& admissible);

// Nearest ancestor-or-self of `node` whose type is in ctx_types; -1 if none.
// `proper` starts from the parent instead.
int ctx_above(const Program& p, int node, const std::vector<std::string>& ctx_types,
              bool proper = false);

// Tokens strictly between two disjoint construct spans.
int token_distance(const ConstructTree& ct, int a, int b);

// All maximal matches of `style` in `p`, deterministic preorder order,
// capped at bounds.cap per call.
std::vector<StyleMatch> scan(const CompositionStyle& style, const Program& p,
                             const Bounds& bounds);

struct MatchPool {
    // (style name, construct-type signature) -> matches across the corpus.
    std::map<std::pair<std::string, std::string>, std::vector<StyleMatch>> groups;

    size_t size() const;
    std::vector<const StyleMatch*> for_style(const std::string& style) const;
};

std::string match_signature(const Program& p, const StyleMatch& m);

MatchPool extract_pool(const std::vector<Program>& corpus,
                       const std::vector<CompositionStyle>& styles,
                       const Bounds& bounds);

// One JSON-lines record for the scan report.
std::string match_to_jsonl(const Program& p, const StyleMatch& m);

}  // namespace tf
