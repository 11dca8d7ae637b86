#ifndef FIKLIK_SATURATION_HPP
#define FIKLIK_SATURATION_HPP

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fiklik/formula.hpp"
#include "fiklik/kripke.hpp"
#include "fiklik/logic.hpp"

namespace fiklik {

// A tip is a named copy of a base-model world carrying the set of formulas
// (topic) it is still responsible for, its modal depth (rank) and its
// position in the order dimension (height).
struct Tip {
    int name;
    int world;  // index into the base model
    FormulaSet topic;
    int rank;
    int height;
};

// A clip is a finite set of tips with an order-successor relation (ll) and a
// modal-successor relation (tr), interpreted over a fixed base model.
//
// Engine-produced clips keep tips[i].name == i; edges reference tip names.
struct Clip {
    std::vector<Tip> tips;
    std::vector<std::pair<int, int>> ll;  // order edges, sorted
    std::vector<std::pair<int, int>> tr;  // modal edges, sorted
    Model base;
    Formula root;
    LogicId logic;

    const Tip* tip_by_name(int name) const;
    std::vector<int> ll_succs(int name) const;
    std::vector<int> ll_preds(int name) const;
    std::vector<int> tr_succs(int name) const;
    std::vector<int> tr_preds(int name) const;
};

enum class DefectKind : std::uint8_t { ImplMax, BoxMax, BoxAcc, DiaAcc, DownConf, FwdConf };

std::string defect_kind_name(DefectKind k);

// The spec-level groupings: maximality = {ImplMax, BoxMax},
// accessibility = {BoxAcc, DiaAcc}.
enum class PassGroup : std::uint8_t { Maximality, Accessibility, Downward, Forward };

std::string pass_group_name(PassGroup g);
std::set<DefectKind> kinds_of(PassGroup g);
std::set<DefectKind> all_defect_kinds();

struct Defect {
    DefectKind kind;
    int anchor;  // tip name i
    // Confluence kinds: the (j, k) tips of the pattern; -1 otherwise.
    int mid = -1;
    int end = -1;
    // Witness formulas: ImplMax carries (b, c) with b->c in the topic;
    // BoxMax/BoxAcc carry b with Box b in the topic; DiaAcc carries b with
    // Dia b in the topic.
    std::optional<Formula> b, c;
    int rank = 0;
    int height = 0;
};

struct ClipViolation {
    std::string stage;  // "coherence", "regularity", "cleanness", "frame", "truth"
    std::string detail;
};

struct ValidationReport {
    bool coherent = false;
    bool regular = false;
    bool clean = false;
    bool frame_class_ok = false;
    bool truth_lemma_ok = false;
    std::vector<ClipViolation> violations;
    bool all_ok() const {
        return coherent && regular && clean && frame_class_ok && truth_lemma_ok;
    }
};

struct TraceRecord {
    std::string pass;
    int rank;
    int height;
    std::string defect_kind;
    int anchor_tip;
    int new_tip;
    std::string witness_world;
};

struct SaturateOptions {
    std::uint64_t fuel = 0;  // 0: default cap of 4^(Card(Sigma_A)+2) repairs
};

struct SaturationResult {
    Clip clip;
    std::vector<TraceRecord> trace;
    std::uint64_t repairs = 0;
};

std::uint64_t default_fuel(std::size_t sigma_card);

// Single-tip clip (0, s0, Sigma_a, 0, 0) with empty relations. Requires the
// base frame to be in the logic's class and s0 to falsify a.
Clip initial_clip(const Model& m, int s0, const Formula& a, LogicId l);

// Number of topic members the tip's world falsifies without being maximal
// with respect to them.
int degree(const Tip& t, const Model& m);

// Is s maximal with respect to b: every strict <=-successor satisfies b.
bool maximal_wrt(const Model& m, int s, const Formula& b);

// A strict successor of s falsifying b and maximal with respect to b;
// deepest cluster first, then lowest world index. Throws NO_WITNESS if s is
// already maximal with respect to b.
int find_strict_maximal_witness(const Model& m, int s, const Formula& b);

// All defects of the given kinds and rank (and height, if given), ordered by
// anchor name, then witness formula, then (mid, end). DownConf defects exist
// only when c.logic == LIK.
std::vector<Defect> find_defects(const Clip& c, const std::set<DefectKind>& kinds, int rank,
                                 std::optional<int> height = std::nullopt);

std::vector<Defect> find_all_defects(const Clip& c);
bool is_clean(const Clip& c);

// Max height among rank-alpha tips; 0 if the stratum is empty.
int h_alpha(const Clip& c, int rank);

// Repairs one current defect: adds exactly one tip and the prescribed
// edge(s). Throws NOT_A_DEFECT if d is not a current defect of c and
// WITNESS_NOT_FOUND if the base model lacks the required witness.
Clip repair_defect(const Clip& c, const Defect& d);

// One pass of the given group at the given rank; heights ascend from 0
// (descend from h_alpha for Downward). Returns a clip with no defects of the
// group at that rank.
Clip run_pass(const Clip& c, PassGroup group, int rank);

// Full saturation: cluster-quotients the base model, builds the initial clip
// and repairs rank 0, 1, ... until clean. The result's clip.base is the
// quotient model.
SaturationResult saturate(const Model& m, int s0, const Formula& a, LogicId l,
                          const SaturateOptions& opts = {});

// Worlds = tips, order = reflexive-transitive closure of ll, modal = tr,
// atoms true at a tip iff true at its base world. Requires a clean clip.
Model extract_saturated_model(const Clip& c);

// The clip's own frame (tips, closure of ll, tr) with worlds named t<i>.
Frame clip_frame(const Clip& c);

// Coherence, regularity and cleanness, plus the derived checks that the
// world projection is a homomorphism into the base and that the clip frame
// is upward confluent.
ValidationReport validate_clip(const Clip& c);

// validate_clip plus: extracted frame lies in the logic's upgraded class,
// every topic member agrees between a tip and its base world, and tip 0
// falsifies the root formula.
ValidationReport verify_truth_lemma(const Clip& c, const Model& extracted);

}  // namespace fiklik

#endif
