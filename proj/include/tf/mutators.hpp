#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tf/styles.hpp"

namespace tf {

// Deterministic random source. All draws go through hand-rolled bounded
// sampling so results are identical across platforms and standard libraries.
class Rng {
  public:
    explicit Rng(uint64_t seed) : eng_(seed) {}
    uint64_t next() { return eng_(); }
    // Uniform in [0, n); n > 0.
    int uniform(int n) {
        uint64_t limit = UINT64_MAX - UINT64_MAX % (uint64_t)n;
        uint64_t v;
        do { v = eng_(); } while (v >= limit);
        return (int)(v % (uint64_t)n);
    }
    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[uniform((int)v.size())];
    }

  private:
    std::mt19937_64 eng_;
};

// Stateless seed mixer for deriving per-task seeds from a campaign seed.
uint64_t mix_seed(uint64_t base, uint64_t index);

enum class RejectReason {
    None,
    NoCandidateContext,  // no recipient node of the style's ctx type
    NoAnchorMatch,       // some anchor type absent under every candidate ctx
    RebindFailure,       // a free use has zero compatible visible defs
    MoveNoCandidate,     // no same-type node elsewhere in the recipient
    ReparseFailure,      // edited text no longer parses
    RebuildCheckFailed,  // post-edit scan lost the intended match (bug guard)
};
const char* reject_name(RejectReason r);

struct PartialContext {
    int removed_index = -1;   // position in match.nodes
    int removed_node = -1;    // donor construct node
    std::vector<int> anchors; // remaining donor construct nodes, match order
    int hole_parent = -1;     // donor construct parent of the removed node
    int hole_ordinal = -1;    // child ordinal of the removed node
};

// Remove one matched construct, keeping the rest as anchors. `i` < 0 draws
// the removed position uniformly among the style's removable positions.
// Throws std::logic_error on arity-1 matches.
PartialContext partialize(const Program& donor, const StyleMatch& match, int i,
                          Rng& rng);

// Positions of `match.nodes` that partialization may remove for this style.
std::vector<int> removable_positions(const CompositionStyle& style,
                                     const StyleMatch& match);

// Label-environment similarity: fraction of equal labels over the node's own
// label, k_anc ancestors (padded with the root label), and l_sib/r_sib
// neighbouring siblings (padded with "").
double structural_similarity(const ConstructTree& ta, int a,
                             const ConstructTree& tb, int b, int k_anc = 2,
                             int l_sib = 1, int r_sib = 1);

struct ContextBinding {
    int recipient_ctx = -1;
    // (donor node, recipient node) pairs covering the anchors, match order.
    std::vector<std::pair<int, int>> anchor_map;
    size_t insert_byte = 0;  // recipient byte offset of the hole
    double similarity_score = 0.0;
};

struct MatchResult {
    std::optional<ContextBinding> binding;
    RejectReason reject = RejectReason::None;
};

// Bind a partialized donor context into the recipient: choose the most
// similar admissible ctx, map each anchor to a same-type recipient node
// maximizing similarity, and place the hole so donor ordering is preserved.
MatchResult match_context(const Program& recipient, const Program& donor,
                          const StyleMatch& match, const PartialContext& pc,
                          const CompositionStyle& style, Rng& rng);

// One use-group rebinding: all uses of `name` bound to the same original def
// are renamed together.
struct Rebind {
    std::string name;       // original name
    int def = -1;           // original def index (material program), -1 unresolved
    std::string new_name;
};

struct RebindResult {
    std::optional<std::vector<Rebind>> map;
    RejectReason reject = RejectReason::None;
};

// Choose replacement names for every free use of the material subtree (a use
// whose def does not travel with the material), drawing uniformly among
// visible type-compatible defs at the insertion point and preferring names
// different from the original.
RebindResult reparameterize(const Program& material_prog, int material_node,
                            const Program& recipient, int target_ctx,
                            size_t insert_byte, Rng& rng);

struct MutatedProgram {
    std::string text;
    std::string donor_id, recipient_id, style;
    MutatorKind kind = MutatorKind::Replicate;
    uint64_t rng_seed = 0;
    bool reparse_ok = false;
    std::vector<Rebind> rebinds;
};

struct MutationOutcome {
    bool ok = false;
    RejectReason reject = RejectReason::None;
    MutatedProgram prog;
};

// Full pipeline for one edit: partialize (mutations), bind context,
// reparameterize, apply the edit, re-validate, and (Replicate/Insert) check
// that the style match was rebuilt at the bound ctx.
MutationOutcome mutate(const Program& donor, const Program& recipient,
                       const StyleMatch& match, MutatorKind kind,
                       uint64_t seed, const Bounds& bounds);

// Character-level Levenshtein distance (Move candidate ranking).
int levenshtein(const std::string& a, const std::string& b);

}  // namespace tf
