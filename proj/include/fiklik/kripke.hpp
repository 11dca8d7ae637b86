#ifndef FIKLIK_KRIPKE_HPP
#define FIKLIK_KRIPKE_HPP

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fiklik/formula.hpp"

namespace fiklik {

// Worlds are indices 0..size-1; sets of worlds are fixed-width bitmasks.
// 256 bits cover every desk-scale frame, including saturated models, which
// can grow well past 64 tips.
struct WorldMask {
    std::array<std::uint64_t, 4> limbs{};

    constexpr WorldMask() = default;
    constexpr WorldMask(std::uint64_t low) : limbs{low, 0, 0, 0} {}  // NOLINT: implicit

    friend constexpr WorldMask operator&(WorldMask a, const WorldMask& b) {
        for (int i = 0; i < 4; ++i) a.limbs[i] &= b.limbs[i];
        return a;
    }
    friend constexpr WorldMask operator|(WorldMask a, const WorldMask& b) {
        for (int i = 0; i < 4; ++i) a.limbs[i] |= b.limbs[i];
        return a;
    }
    friend constexpr WorldMask operator~(WorldMask a) {
        for (int i = 0; i < 4; ++i) a.limbs[i] = ~a.limbs[i];
        return a;
    }
    WorldMask& operator&=(const WorldMask& b) { return *this = *this & b; }
    WorldMask& operator|=(const WorldMask& b) { return *this = *this | b; }
    friend constexpr bool operator==(const WorldMask&, const WorldMask&) = default;
    friend constexpr bool operator<(const WorldMask& a, const WorldMask& b) {
        for (int i = 3; i >= 0; --i)
            if (a.limbs[i] != b.limbs[i]) return a.limbs[i] < b.limbs[i];
        return false;
    }
    constexpr explicit operator bool() const {
        return (limbs[0] | limbs[1] | limbs[2] | limbs[3]) != 0;
    }
    constexpr bool none() const { return !static_cast<bool>(*this); }
};

constexpr int kMaxWorlds = 256;

inline constexpr WorldMask bit(int w) {
    WorldMask m;
    m.limbs[w >> 6] = std::uint64_t{1} << (w & 63);
    return m;
}
inline constexpr bool has(const WorldMask& m, int w) {
    return (m.limbs[w >> 6] >> (w & 63)) & 1;
}
// Index of the lowest clear bit (the first world missing from the mask).
int lowest_clear_bit(const WorldMask& m);

// Finite birelational frame: le is stored reflexive-transitively closed.
struct Frame {
    std::vector<std::string> world_names;
    std::vector<WorldMask> le;  // le[i] = worlds j with w_i <= w_j (includes i)
    std::vector<WorldMask> r;   // r[i]  = R-successors of w_i

    int size() const { return static_cast<int>(world_names.size()); }
    WorldMask all() const {
        WorldMask m;
        for (int i = 0; i < size(); ++i) m |= bit(i);
        return m;
    }
    bool le_holds(int i, int j) const { return has(le[i], j); }
    bool r_holds(int i, int j) const { return has(r[i], j); }
    // Strict order: i <= j and not j <= i.
    bool lt_holds(int i, int j) const { return le_holds(i, j) && !le_holds(j, i); }
    int world_index(const std::string& name) const;  // -1 if unknown

    static std::vector<std::string> default_names(int n);
};

using Valuation = std::map<std::string, WorldMask>;

struct Model {
    Frame frame;
    Valuation val;  // every mask must be le-closed

    WorldMask atom_mask(const std::string& p) const {
        auto it = val.find(p);
        return it == val.end() ? 0 : it->second;
    }
};

enum class Confluence : std::uint8_t { Forward = 1, Backward = 2, Downward = 4, Upward = 8 };

// A conjunction of confluence requirements on (W, <=, R).
struct FrameClass {
    std::uint8_t bits = 0;

    static FrameClass all() { return {0}; }
    static FrameClass fc() { return {static_cast<std::uint8_t>(Confluence::Forward)}; }
    static FrameClass bc() { return {static_cast<std::uint8_t>(Confluence::Backward)}; }
    static FrameClass dc() { return {static_cast<std::uint8_t>(Confluence::Downward)}; }
    static FrameClass uc() { return {static_cast<std::uint8_t>(Confluence::Upward)}; }
    static FrameClass fdc() { return join(fc(), dc()); }
    static FrameClass fuc() { return join(fc(), uc()); }
    static FrameClass fduc() { return join(fdc(), uc()); }
    static FrameClass join(FrameClass a, FrameClass b) {
        return {static_cast<std::uint8_t>(a.bits | b.bits)};
    }

    bool needs(Confluence c) const { return bits & static_cast<std::uint8_t>(c); }
    std::string name() const;                               // "all", "fc", "fdc", ...
    static std::optional<FrameClass> from_name(const std::string&);
};

struct ConfluenceViolation {
    Confluence which;
    int s, t, u;  // the worlds of the defining condition, in its quantifier order
};

struct ClassCheckResult {
    bool ok;
    std::optional<ConfluenceViolation> witness;
    explicit operator bool() const { return ok; }
};

// Reflexive-transitive closure of the given pairs over n worlds.
std::vector<WorldMask> preorder_closure(const std::vector<std::pair<int, int>>& pairs, int n);

bool one_confluence_holds(const Frame& f, Confluence c, ConfluenceViolation* out);
ClassCheckResult frame_class_check(const Frame& f, FrameClass c);

enum class Semantics : std::uint8_t { Standard, FischerServi, Wijesekera };

std::string semantics_name(Semantics s);
std::optional<Semantics> semantics_from_name(const std::string&);

// Satisfaction per the birelational clauses; the variants differ on Dia only.
bool satisfies(const Model& m, int world, const Formula& f, Semantics sem = Semantics::Standard);

// Memoizing evaluator: the set of worlds satisfying each (sub)formula.
class ModelEvaluator {
public:
    explicit ModelEvaluator(const Model& m, Semantics sem = Semantics::Standard)
        : m_(&m), sem_(sem) {}
    WorldMask eval(const Formula& f);

private:
    const Model* m_;
    Semantics sem_;
    std::map<Formula, WorldMask> memo_;
};

bool true_in_model(const Model& m, const Formula& a);

struct ValidityResult {
    bool valid;
    std::optional<Valuation> countervaluation;  // over atoms_of(a)
    std::optional<int> world;
    explicit operator bool() const { return valid; }
};

// Validity in a frame: quantifies over all le-closed valuations of the atoms
// occurring in a (lexicographic canonical order) and all worlds.
ValidityResult valid_in_frame(const Frame& f, const Formula& a);

// All up-sets of the frame's preorder, in ascending mask order.
std::vector<WorldMask> upsets_of(const Frame& f);

// Streams every assignment of up-sets to the given atoms, lexicographically
// (first atom most significant).
class ValuationEnumerator {
public:
    ValuationEnumerator(const Frame& f, std::vector<std::string> atoms);
    std::optional<Valuation> next();
    std::uint64_t count() const;

private:
    std::vector<std::string> atoms_;
    std::vector<WorldMask> upsets_;
    std::vector<std::size_t> idx_;
    bool done_ = false;
};

// Streams all labeled frames of the given size in the class, in canonical
// order: preorder adjacency mask ascending, then relation mask ascending.
class FrameEnumerator {
public:
    FrameEnumerator(int size, FrameClass c);
    std::optional<Frame> next();

    // Sequence number of the last frame returned, counting from 1 within
    // this enumeration (used for canonical tie-breaking across workers).
    std::uint64_t seq() const { return seq_; }

private:
    int n_;
    FrameClass class_;
    std::vector<std::vector<WorldMask>> preorders_;
    std::size_t pre_idx_ = 0;
    std::uint64_t rel_mask_ = 0;
    std::uint64_t rel_end_;
    std::uint64_t seq_ = 0;
};

// All preorders on n labeled points as row masks, canonical order.
std::vector<std::vector<WorldMask>> enumerate_preorders(int n);

// Deterministic pseudo-random model whose frame satisfies c and whose
// valuation is le-closed by construction.
Model random_model(std::uint64_t seed, int size, FrameClass c,
                   const std::vector<std::string>& atoms);

// Collapses <=-clusters (s ~ t iff s <= t and t <= s). The result's order is
// antisymmetric; satisfaction of every formula is preserved at corresponding
// worlds, and every confluence property of the input is preserved.
struct QuotientResult {
    Model model;
    std::vector<int> world_map;  // old world index -> new world index
};
QuotientResult quotient_clusters(const Model& m);

}  // namespace fiklik

#endif
