#include "fiklik/saturation.hpp"

#include <algorithm>

namespace fiklik {

const Tip* Clip::tip_by_name(int name) const {
    if (name >= 0 && name < static_cast<int>(tips.size()) && tips[name].name == name)
        return &tips[name];
    for (const Tip& t : tips)
        if (t.name == name) return &t;
    return nullptr;
}

static std::vector<int> edge_ends(const std::vector<std::pair<int, int>>& edges, int from) {
    std::vector<int> out;
    for (auto [a, b] : edges)
        if (a == from) out.push_back(b);
    std::sort(out.begin(), out.end());
    return out;
}

static std::vector<int> edge_starts(const std::vector<std::pair<int, int>>& edges, int to) {
    std::vector<int> out;
    for (auto [a, b] : edges)
        if (b == to) out.push_back(a);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> Clip::ll_succs(int name) const { return edge_ends(ll, name); }
std::vector<int> Clip::ll_preds(int name) const { return edge_starts(ll, name); }
std::vector<int> Clip::tr_succs(int name) const { return edge_ends(tr, name); }
std::vector<int> Clip::tr_preds(int name) const { return edge_starts(tr, name); }

std::string defect_kind_name(DefectKind k) {
    switch (k) {
        case DefectKind::ImplMax: return "impl-maximality";
        case DefectKind::BoxMax: return "box-maximality";
        case DefectKind::BoxAcc: return "box-accessibility";
        case DefectKind::DiaAcc: return "dia-accessibility";
        case DefectKind::DownConf: return "downward-confluence";
        case DefectKind::FwdConf: return "forward-confluence";
    }
    return "?";
}

std::string pass_group_name(PassGroup g) {
    switch (g) {
        case PassGroup::Maximality: return "maximality";
        case PassGroup::Accessibility: return "accessibility";
        case PassGroup::Downward: return "downward";
        case PassGroup::Forward: return "forward";
    }
    return "?";
}

std::set<DefectKind> kinds_of(PassGroup g) {
    switch (g) {
        case PassGroup::Maximality: return {DefectKind::ImplMax, DefectKind::BoxMax};
        case PassGroup::Accessibility: return {DefectKind::BoxAcc, DefectKind::DiaAcc};
        case PassGroup::Downward: return {DefectKind::DownConf};
        case PassGroup::Forward: return {DefectKind::FwdConf};
    }
    return {};
}

std::set<DefectKind> all_defect_kinds() {
    return {DefectKind::ImplMax, DefectKind::BoxMax,   DefectKind::BoxAcc,
            DefectKind::DiaAcc,  DefectKind::DownConf, DefectKind::FwdConf};
}

std::uint64_t default_fuel(std::size_t sigma_card) {
    std::uint64_t exp = 2 * (sigma_card + 2);  // 4^(card+2) = 2^(2*(card+2))
    if (exp >= 62) return std::uint64_t{1} << 62;
    return std::uint64_t{1} << exp;
}

// ---------------------------------------------------------------------------
// Derived facts about (base model, root formula), shared by a whole run.
// ---------------------------------------------------------------------------

namespace {

struct BaseFacts {
    const Model* base;
    ModelEvaluator ev;
    std::size_t sigma_card;
    std::vector<FormulaSet> strata;       // strata[a] = Sigma_A^a; last entry empty
    std::vector<WorldMask> strict_succ;   // strict <=-successors per world
    std::map<Formula, WorldMask> maximal_memo;

    BaseFacts(const Model& m, const Formula& root) : base(&m), ev(m) {
        ClosureSet cs = closure_of(root);
        sigma_card = cs.members.size();
        strata.push_back(cs.members);
        while (!strata.back().empty()) strata.push_back(modal_step(strata.back()));
        int n = m.frame.size();
        strict_succ.resize(n);
        for (int s = 0; s < n; ++s) {
            WorldMask mask = 0;
            for (int t = 0; t < n; ++t)
                if (m.frame.lt_holds(s, t)) mask |= bit(t);
            strict_succ[s] = mask;
        }
    }

    const FormulaSet& stratum(int rank) const {
        static const FormulaSet empty;
        if (rank < 0 || rank >= static_cast<int>(strata.size())) return empty;
        return strata[rank];
    }

    bool sat(int world, const Formula& f) { return has(ev.eval(f), world); }

    // Worlds maximal with respect to b: all strict successors satisfy b.
    WorldMask maximal_mask(const Formula& b) {
        auto it = maximal_memo.find(b);
        if (it != maximal_memo.end()) return it->second;
        WorldMask sb = ev.eval(b);
        WorldMask res = 0;
        for (int s = 0; s < base->frame.size(); ++s)
            if ((strict_succ[s] & ~sb) == 0) res |= bit(s);
        maximal_memo.emplace(b, res);
        return res;
    }

    bool maximal(int world, const Formula& b) { return has(maximal_mask(b), world); }

    int degree_of(const Tip& t) {
        int d = 0;
        for (const Formula& f : t.topic)
            if (!sat(t.world, f) && !maximal(t.world, f)) ++d;
        return d;
    }
};

[[noreturn]] void internal(const std::string& what) {
    throw Error("INTERNAL_INVARIANT", "saturation invariant violated: " + what);
}

// Tips ordered by name; positions into c.tips.
std::vector<int> tips_by_name(const Clip& c) {
    std::vector<int> idx(c.tips.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return c.tips[a].name < c.tips[b].name; });
    return idx;
}

bool defect_holds(const Clip& c, BaseFacts& fx, const Defect& d) {
    const Tip* anchor = c.tip_by_name(d.anchor);
    if (!anchor || anchor->rank != d.rank || anchor->height != d.height) return false;
    int s = anchor->world;
    switch (d.kind) {
        case DefectKind::ImplMax:
        case DefectKind::BoxMax: {
            if (!d.b || (d.kind == DefectKind::ImplMax && !d.c)) return false;
            Formula fm = d.kind == DefectKind::ImplMax ? Formula::impl(*d.b, *d.c)
                                                       : Formula::box(*d.b);
            if (!anchor->topic.count(fm)) return false;
            if (fx.sat(s, fm) || fx.maximal(s, fm)) return false;
            for (int j : c.ll_succs(d.anchor))
                if (const Tip* tj = c.tip_by_name(j); tj && !fx.sat(tj->world, fm)) return false;
            return true;
        }
        case DefectKind::BoxAcc: {
            if (!d.b) return false;
            Formula fm = Formula::box(*d.b);
            if (!anchor->topic.count(fm)) return false;
            if (fx.sat(s, fm) || !fx.maximal(s, fm)) return false;
            for (int j : c.tr_succs(d.anchor))
                if (const Tip* tj = c.tip_by_name(j); tj && !fx.sat(tj->world, *d.b)) return false;
            return true;
        }
        case DefectKind::DiaAcc: {
            if (!d.b) return false;
            Formula fm = Formula::dia(*d.b);
            if (!anchor->topic.count(fm)) return false;
            if (!fx.sat(s, fm)) return false;
            for (int j : c.tr_succs(d.anchor))
                if (const Tip* tj = c.tip_by_name(j); tj && fx.sat(tj->world, *d.b)) return false;
            return true;
        }
        case DefectKind::DownConf: {
            if (c.logic != LogicId::LIK) return false;
            auto succ = c.ll_succs(d.anchor);
            if (std::find(succ.begin(), succ.end(), d.mid) == succ.end()) return false;
            auto tr_mid = c.tr_succs(d.mid);
            if (std::find(tr_mid.begin(), tr_mid.end(), d.end) == tr_mid.end()) return false;
            for (int l : c.tr_succs(d.anchor)) {
                auto l_ll = c.ll_succs(l);
                if (std::find(l_ll.begin(), l_ll.end(), d.end) != l_ll.end()) return false;
            }
            return true;
        }
        case DefectKind::FwdConf: {
            auto preds = c.ll_preds(d.anchor);
            if (std::find(preds.begin(), preds.end(), d.mid) == preds.end()) return false;
            auto tr_mid = c.tr_succs(d.mid);
            if (std::find(tr_mid.begin(), tr_mid.end(), d.end) == tr_mid.end()) return false;
            for (int l : c.tr_succs(d.anchor)) {
                auto k_ll = c.ll_succs(d.end);
                if (std::find(k_ll.begin(), k_ll.end(), l) != k_ll.end()) return false;
            }
            return true;
        }
    }
    return false;
}

std::vector<Defect> find_defects_impl(const Clip& c, BaseFacts& fx,
                                      const std::set<DefectKind>& kinds, int rank,
                                      std::optional<int> height) {
    std::vector<Defect> out;
    for (int pos : tips_by_name(c)) {
        const Tip& tip = c.tips[pos];
        if (tip.rank != rank) continue;
        if (height && tip.height != *height) continue;
        int i = tip.name;
        int s = tip.world;

        for (const Formula& fm : tip.topic) {
            if (fm.is(Conn::Impl) && kinds.count(DefectKind::ImplMax)) {
                if (!fx.sat(s, fm) && !fx.maximal(s, fm)) {
                    bool obligated = true;
                    for (int j : c.ll_succs(i))
                        if (const Tip* tj = c.tip_by_name(j); tj && !fx.sat(tj->world, fm))
                            obligated = false;
                    if (obligated)
                        out.push_back({DefectKind::ImplMax, i, -1, -1, fm.left(), fm.right(),
                                       tip.rank, tip.height});
                }
            } else if (fm.is(Conn::Box)) {
                if (!fx.sat(s, fm)) {
                    if (!fx.maximal(s, fm) && kinds.count(DefectKind::BoxMax)) {
                        bool obligated = true;
                        for (int j : c.ll_succs(i))
                            if (const Tip* tj = c.tip_by_name(j); tj && !fx.sat(tj->world, fm))
                                obligated = false;
                        if (obligated)
                            out.push_back({DefectKind::BoxMax, i, -1, -1, fm.body(), std::nullopt,
                                           tip.rank, tip.height});
                    } else if (fx.maximal(s, fm) && kinds.count(DefectKind::BoxAcc)) {
                        bool obligated = true;
                        for (int j : c.tr_succs(i))
                            if (const Tip* tj = c.tip_by_name(j); tj && !fx.sat(tj->world, fm.body()))
                                obligated = false;
                        if (obligated)
                            out.push_back({DefectKind::BoxAcc, i, -1, -1, fm.body(), std::nullopt,
                                           tip.rank, tip.height});
                    }
                }
            } else if (fm.is(Conn::Dia) && kinds.count(DefectKind::DiaAcc)) {
                if (fx.sat(s, fm)) {
                    bool obligated = true;
                    for (int j : c.tr_succs(i))
                        if (const Tip* tj = c.tip_by_name(j); tj && fx.sat(tj->world, fm.body()))
                            obligated = false;
                    if (obligated)
                        out.push_back({DefectKind::DiaAcc, i, -1, -1, fm.body(), std::nullopt,
                                       tip.rank, tip.height});
                }
            }
        }

        if (kinds.count(DefectKind::DownConf) && c.logic == LogicId::LIK) {
            for (int j : c.ll_succs(i))
                for (int k : c.tr_succs(j)) {
                    bool closed = false;
                    for (int l : c.tr_succs(i)) {
                        auto l_ll = c.ll_succs(l);
                        if (std::find(l_ll.begin(), l_ll.end(), k) != l_ll.end()) closed = true;
                    }
                    if (!closed)
                        out.push_back({DefectKind::DownConf, i, j, k, std::nullopt, std::nullopt,
                                       tip.rank, tip.height});
                }
        }
        if (kinds.count(DefectKind::FwdConf)) {
            for (int j : c.ll_preds(i))
                for (int k : c.tr_succs(j)) {
                    bool closed = false;
                    for (int l : c.tr_succs(i)) {
                        auto k_ll = c.ll_succs(k);
                        if (std::find(k_ll.begin(), k_ll.end(), l) != k_ll.end()) closed = true;
                    }
                    if (!closed)
                        out.push_back({DefectKind::FwdConf, i, j, k, std::nullopt, std::nullopt,
                                       tip.rank, tip.height});
                }
        }
    }
    return out;
}

int next_name(const Clip& c) {
    int n = -1;
    for (const Tip& t : c.tips) n = std::max(n, t.name);
    return n + 1;
}

// Applies one repair in place; returns the new tip's name.
int do_repair(Clip& c, BaseFacts& fx, const Defect& d, const std::string& pass,
              std::vector<TraceRecord>* trace) {
    const Tip* anchor = c.tip_by_name(d.anchor);
    if (!anchor) internal("repair anchor tip missing");
    const Tip a = *anchor;  // copy: c.tips may reallocate
    int fresh = next_name(c);
    Tip nt;
    nt.name = fresh;

    switch (d.kind) {
        case DefectKind::ImplMax:
        case DefectKind::BoxMax: {
            Formula fm = d.kind == DefectKind::ImplMax ? Formula::impl(*d.b, *d.c)
                                                       : Formula::box(*d.b);
            nt.world = find_strict_maximal_witness(*fx.base, a.world, fm);
            nt.topic = a.topic;
            nt.rank = a.rank;
            nt.height = a.height + 1;
            c.tips.push_back(nt);
            c.ll.emplace_back(a.name, fresh);
            if (fx.degree_of(nt) >= fx.degree_of(a)) internal("maximality repair did not decrease degree");
            break;
        }
        case DefectKind::BoxAcc:
        case DefectKind::DiaAcc: {
            bool want = d.kind == DefectKind::DiaAcc;  // BoxAcc needs a falsifier
            int witness = -1;
            for (int u = 0; u < fx.base->frame.size(); ++u)
                if (fx.base->frame.r_holds(a.world, u) && fx.sat(u, *d.b) == want) {
                    witness = u;
                    break;
                }
            if (witness < 0)
                throw Error("WITNESS_NOT_FOUND",
                            "no modal witness for " + defect_kind_name(d.kind) + " at tip " +
                                std::to_string(a.name) +
                                "; base model outside the logic's class or engine bug");
            nt.world = witness;
            nt.topic = modal_step(a.topic);
            nt.rank = a.rank + 1;
            nt.height = a.height;
            c.tips.push_back(nt);
            c.tr.emplace_back(a.name, fresh);
            break;
        }
        case DefectKind::DownConf:
        case DefectKind::FwdConf: {
            const Tip* end = c.tip_by_name(d.end);
            if (!end) internal("confluence defect end tip missing");
            int witness = -1;
            for (int v = 0; v < fx.base->frame.size(); ++v) {
                if (!fx.base->frame.r_holds(a.world, v)) continue;
                bool fits = d.kind == DefectKind::DownConf
                                ? fx.base->frame.le_holds(v, end->world)
                                : fx.base->frame.le_holds(end->world, v);
                if (fits) {
                    witness = v;
                    break;
                }
            }
            if (witness < 0)
                throw Error("WITNESS_NOT_FOUND",
                            "no confluence witness for " + defect_kind_name(d.kind) + " at tip " +
                                std::to_string(a.name) +
                                "; base model outside the logic's class or engine bug");
            nt.world = witness;
            nt.topic = modal_step(a.topic);
            nt.rank = a.rank + 1;
            nt.height = a.height;
            if (nt.topic != end->topic) internal("confluence repair topic mismatch");
            if (nt.rank != end->rank) internal("confluence repair rank mismatch");
            int expected_end_height = d.kind == DefectKind::DownConf ? nt.height + 1 : nt.height - 1;
            if (end->height != expected_end_height) internal("confluence repair height mismatch");
            c.tips.push_back(nt);
            c.tr.emplace_back(a.name, fresh);
            if (d.kind == DefectKind::DownConf)
                c.ll.emplace_back(fresh, d.end);
            else
                c.ll.emplace_back(d.end, fresh);
            break;
        }
    }
    std::sort(c.ll.begin(), c.ll.end());
    std::sort(c.tr.begin(), c.tr.end());

    // Topic invariant: whenever the anchor tracked its stratum, so must the
    // new tip (Lemma-29-style bookkeeping).
    if (a.topic == fx.stratum(a.rank) && c.tips.back().topic != fx.stratum(c.tips.back().rank))
        internal("topic left the stratum ladder");
    if (d.kind != DefectKind::ImplMax && d.kind != DefectKind::BoxMax) {
        if (c.tips.back().rank != d.rank + 1 || c.tips.back().height != d.height)
            internal("repair created a tip outside rank+1/height");
    }

    if (trace)
        trace->push_back({pass, d.rank, d.height, defect_kind_name(d.kind), d.anchor, fresh,
                          fx.base->frame.world_names[nt.world]});
    return fresh;
}

int max_height(const Clip& c) {
    int h = 0;
    for (const Tip& t : c.tips) h = std::max(h, t.height);
    return h;
}

void pass_impl(Clip& c, BaseFacts& fx, PassGroup group, int rank,
               std::vector<TraceRecord>* trace, std::uint64_t& budget) {
    if (group == PassGroup::Downward && c.logic != LogicId::LIK) return;
    auto kinds = kinds_of(group);
    int X = group == PassGroup::Downward ? h_alpha(c, rank) : 0;
    while (true) {
        if (find_defects_impl(c, fx, kinds, rank, std::nullopt).empty()) break;
        int bound = max_height(c) + static_cast<int>(fx.sigma_card) + 2;
        if (group == PassGroup::Downward ? X < 0 : X > bound)
            internal(pass_group_name(group) + " pass swept past every defect height");
        auto batch = find_defects_impl(c, fx, kinds, rank, X);
        for (const Defect& d : batch) {
            if (!defect_holds(c, fx, d)) continue;  // repaired as a side effect earlier
            if (budget == 0)
                throw Error("FUEL_EXHAUSTED", "repair budget exhausted during " +
                                                  pass_group_name(group) + " pass");
            --budget;
            do_repair(c, fx, d, pass_group_name(group), trace);
        }
        X += group == PassGroup::Downward ? -1 : 1;
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------------

Clip initial_clip(const Model& m, int s0, const Formula& a, LogicId l) {
    if (s0 < 0 || s0 >= m.frame.size())
        throw Error("MODEL_BAD_REF", "initial world index out of range");
    if (!frame_class_check(m.frame, frame_class_of(l)).ok)
        throw Error("BASE_MODEL_WRONG_CLASS",
                    "base model is not in " + frame_class_of(l).name() + " as required by " +
                        logic_name(l));
    if (satisfies(m, s0, a))
        throw Error("BASE_MODEL_SATISFIES_A",
                    "world " + m.frame.world_names[s0] + " satisfies the formula; nothing to saturate");
    Clip c{{}, {}, {}, m, a, l};
    c.tips.push_back({0, s0, closure_of(a).members, 0, 0});
    return c;
}

int degree(const Tip& t, const Model& m) {
    int d = 0;
    for (const Formula& f : t.topic)
        if (!satisfies(m, t.world, f) && !maximal_wrt(m, t.world, f)) ++d;
    return d;
}

bool maximal_wrt(const Model& m, int s, const Formula& b) {
    for (int t = 0; t < m.frame.size(); ++t)
        if (m.frame.lt_holds(s, t) && !satisfies(m, t, b)) return false;
    return true;
}

int find_strict_maximal_witness(const Model& m, int s, const Formula& b) {
    const Frame& fr = m.frame;
    int n = fr.size();
    ModelEvaluator ev(m);
    WorldMask sb = ev.eval(b);

    std::vector<int> candidates;  // strict successors falsifying b
    for (int t = 0; t < n; ++t)
        if (fr.lt_holds(s, t) && !has(sb, t)) candidates.push_back(t);
    if (candidates.empty())
        throw Error("NO_WITNESS", "world " + fr.world_names[s] +
                                      " is already maximal with respect to " + render(b));

    // Valid witnesses: candidates all of whose strict successors satisfy b.
    std::vector<int> valid;
    for (int t : candidates) {
        bool ok = true;
        for (int u = 0; u < n && ok; ++u)
            if (fr.lt_holds(t, u) && !has(sb, u)) ok = false;
        if (ok) valid.push_back(t);
    }
    if (valid.empty()) internal("finite maximal-witness search found no maximal candidate");

    // Deepest cluster first (longest strict chain below), then lowest index.
    std::vector<int> depth(n, -1);
    auto cluster_depth = [&](auto&& self, int w) -> int {
        if (depth[w] >= 0) return depth[w];
        depth[w] = 0;  // guards cluster cycles; members share a depth anyway
        int d = 0;
        for (int u = 0; u < n; ++u)
            if (fr.lt_holds(u, w)) d = std::max(d, self(self, u) + 1);
        depth[w] = d;
        return d;
    };
    int best = valid[0];
    for (int t : valid)
        if (cluster_depth(cluster_depth, t) > cluster_depth(cluster_depth, best)) best = t;
    return best;
}

std::vector<Defect> find_defects(const Clip& c, const std::set<DefectKind>& kinds, int rank,
                                 std::optional<int> height) {
    BaseFacts fx(c.base, c.root);
    return find_defects_impl(c, fx, kinds, rank, height);
}

std::vector<Defect> find_all_defects(const Clip& c) {
    BaseFacts fx(c.base, c.root);
    std::vector<Defect> out;
    int max_rank = 0;
    for (const Tip& t : c.tips) max_rank = std::max(max_rank, t.rank);
    for (int rank = 0; rank <= max_rank; ++rank) {
        auto d = find_defects_impl(c, fx, all_defect_kinds(), rank, std::nullopt);
        out.insert(out.end(), d.begin(), d.end());
    }
    return out;
}

bool is_clean(const Clip& c) { return find_all_defects(c).empty(); }

int h_alpha(const Clip& c, int rank) {
    int h = 0;
    for (const Tip& t : c.tips)
        if (t.rank == rank) h = std::max(h, t.height);
    return h;
}

Clip repair_defect(const Clip& c, const Defect& d) {
    Clip out = c;
    BaseFacts fx(out.base, out.root);
    if (!defect_holds(out, fx, d))
        throw Error("NOT_A_DEFECT", "the given defect is not a current defect of the clip");
    do_repair(out, fx, d, "manual", nullptr);
    return out;
}

Clip run_pass(const Clip& c, PassGroup group, int rank) {
    Clip out = c;
    BaseFacts fx(out.base, out.root);
    std::uint64_t budget = default_fuel(fx.sigma_card);
    pass_impl(out, fx, group, rank, nullptr, budget);
    return out;
}

SaturationResult saturate(const Model& m, int s0, const Formula& a, LogicId l,
                          const SaturateOptions& opts) {
    if (s0 < 0 || s0 >= m.frame.size())
        throw Error("MODEL_BAD_REF", "initial world index out of range");
    if (!frame_class_check(m.frame, frame_class_of(l)).ok)
        throw Error("BASE_MODEL_WRONG_CLASS",
                    "base model is not in " + frame_class_of(l).name() + " as required by " +
                        logic_name(l));
    if (satisfies(m, s0, a))
        throw Error("BASE_MODEL_SATISFIES_A",
                    "world " + m.frame.world_names[s0] + " satisfies the formula; nothing to saturate");

    // The maximal-world and box-accessibility witness arguments need an
    // antisymmetric order; collapsing <=-clusters preserves satisfaction and
    // the frame class, so run over the quotient.
    QuotientResult q = quotient_clusters(m);

    SaturationResult res;
    res.clip = initial_clip(q.model, q.world_map[s0], a, l);
    BaseFacts fx(res.clip.base, res.clip.root);
    std::uint64_t budget = opts.fuel ? opts.fuel : default_fuel(fx.sigma_card);
    int card = static_cast<int>(fx.sigma_card);

    int alpha = 0;
    while (!find_all_defects(res.clip).empty()) {
        if (alpha > card + 1) internal("rank exceeded Card(Sigma_A)+1 without reaching cleanness");
        pass_impl(res.clip, fx, PassGroup::Maximality, alpha, &res.trace, budget);
        pass_impl(res.clip, fx, PassGroup::Accessibility, alpha, &res.trace, budget);
        pass_impl(res.clip, fx, PassGroup::Downward, alpha, &res.trace, budget);
        pass_impl(res.clip, fx, PassGroup::Forward, alpha, &res.trace, budget);
        ++alpha;
    }
    res.repairs = res.trace.size();

    for (const Tip& t : res.clip.tips) {
        if (t.topic != fx.stratum(t.rank)) internal("final topic differs from its stratum");
        if (t.rank > card - static_cast<int>(t.topic.size()))
            internal("final rank exceeds Card(Sigma_A) - Card(topic)");
    }
    return res;
}

Frame clip_frame(const Clip& c) {
    int n = static_cast<int>(c.tips.size());
    if (n > kMaxWorlds) throw Error("CLIP_TOO_LARGE", "clip exceeds the supported world count");
    Frame fr;
    std::map<int, int> pos;  // name -> position
    for (int i = 0; i < n; ++i) {
        fr.world_names.push_back("t" + std::to_string(c.tips[i].name));
        pos.emplace(c.tips[i].name, i);
    }
    std::vector<std::pair<int, int>> ll_pairs;
    for (auto [a, b] : c.ll) ll_pairs.emplace_back(pos.at(a), pos.at(b));
    fr.le = preorder_closure(ll_pairs, n);
    fr.r.assign(n, 0);
    for (auto [a, b] : c.tr) fr.r[pos.at(a)] |= bit(pos.at(b));
    return fr;
}

Model extract_saturated_model(const Clip& c) {
    ValidationReport rep = validate_clip(c);
    if (!rep.coherent || !rep.regular || !rep.clean)
        throw Error("CLIP_NOT_CLEAN", "saturated-model extraction requires a coherent, regular, "
                                      "clean clip");
    Model out{clip_frame(c), {}};
    std::set<std::string> atoms;
    for (const auto& [p, mask] : c.base.val) atoms.insert(p);
    for (const auto& p : atoms_of(c.root)) atoms.insert(p);
    for (const auto& p : atoms) {
        WorldMask mask = 0;
        for (std::size_t i = 0; i < c.tips.size(); ++i)
            if (has(c.base.atom_mask(p), c.tips[i].world)) mask |= bit(static_cast<int>(i));
        for (int i = 0; i < out.frame.size(); ++i)
            if (has(mask, i) && (out.frame.le[i] & ~mask))
                throw Error("INTERNAL_INVARIANT", "extracted valuation is not order-closed");
        out.val[p] = mask;
    }
    return out;
}

ValidationReport validate_clip(const Clip& c) {
    ValidationReport rep;
    rep.coherent = true;
    rep.regular = true;
    auto flag = [&](bool& b, const std::string& stage, const std::string& detail) {
        b = false;
        rep.violations.push_back({stage, detail});
    };

    // Coherence clause 1: equal names imply equal tuples.
    for (std::size_t i = 0; i < c.tips.size(); ++i)
        for (std::size_t j = i + 1; j < c.tips.size(); ++j) {
            const Tip &a = c.tips[i], &b = c.tips[j];
            if (a.name == b.name && (a.world != b.world || a.topic != b.topic ||
                                     a.rank != b.rank || a.height != b.height))
                flag(rep.coherent, "coherence",
                     "tips named " + std::to_string(a.name) + " differ");
        }
    auto tip_of = [&](int name) { return c.tip_by_name(name); };
    for (auto [i, j] : c.ll) {
        const Tip *a = tip_of(i), *b = tip_of(j);
        if (!a || !b) {
            flag(rep.coherent, "coherence", "order edge references a missing tip");
            continue;
        }
        if (i == j) flag(rep.coherent, "coherence", "order edge is a self-loop");
        if (!c.base.frame.le_holds(a->world, b->world))
            flag(rep.coherent, "coherence", "order edge not mirrored by base <=");
        if (a->topic.empty()) flag(rep.coherent, "coherence", "order edge from empty topic");
        if (b->topic != a->topic) flag(rep.coherent, "coherence", "order edge changes the topic");
        if (b->rank != a->rank) flag(rep.coherent, "coherence", "order edge changes the rank");
        if (b->height != a->height + 1)
            flag(rep.coherent, "coherence", "order edge must raise height by exactly 1");
    }
    for (auto [i, j] : c.tr) {
        const Tip *a = tip_of(i), *b = tip_of(j);
        if (!a || !b) {
            flag(rep.coherent, "coherence", "modal edge references a missing tip");
            continue;
        }
        if (i == j) flag(rep.coherent, "coherence", "modal edge is a self-loop");
        if (!c.base.frame.r_holds(a->world, b->world))
            flag(rep.coherent, "coherence", "modal edge not mirrored by base R");
        if (a->topic.empty()) flag(rep.coherent, "coherence", "modal edge from empty topic");
        if (b->topic != modal_step(a->topic))
            flag(rep.coherent, "coherence", "modal edge target topic is not the one-step topic");
        if (b->rank != a->rank + 1)
            flag(rep.coherent, "coherence", "modal edge must raise rank by exactly 1");
        if (b->height != a->height)
            flag(rep.coherent, "coherence", "modal edge must preserve height");
    }

    // Regularity: in-degree 1 per relation, plus the mixed square law.
    for (const Tip& t : c.tips) {
        auto lp = c.ll_preds(t.name);
        lp.erase(std::unique(lp.begin(), lp.end()), lp.end());
        if (lp.size() > 1)
            flag(rep.regular, "regularity",
                 "tip " + std::to_string(t.name) + " has two order predecessors");
        auto tp = c.tr_preds(t.name);
        tp.erase(std::unique(tp.begin(), tp.end()), tp.end());
        if (tp.size() > 1)
            flag(rep.regular, "regularity",
                 "tip " + std::to_string(t.name) + " has two modal predecessors");
    }
    for (auto [i, k1] : c.tr)
        for (auto [j, k2] : c.ll) {
            if (k1 != k2) continue;
            bool closed = false;
            for (int l : c.ll_preds(i)) {
                auto ls = c.tr_succs(l);
                if (std::find(ls.begin(), ls.end(), j) != ls.end()) closed = true;
            }
            if (!closed)
                flag(rep.regular, "regularity",
                     "unclosed square at tip " + std::to_string(k1));
        }

    if (!rep.coherent || !rep.regular) {
        rep.clean = false;
        rep.frame_class_ok = false;
        rep.truth_lemma_ok = false;
        rep.violations.push_back({"cleanness", "skipped: clip not coherent and regular"});
        return rep;
    }

    auto defects = find_all_defects(c);
    rep.clean = defects.empty();
    for (const Defect& d : defects)
        rep.violations.push_back({"cleanness", defect_kind_name(d.kind) + " defect at tip " +
                                                   std::to_string(d.anchor)});

    // Derived checks: the world projection is a homomorphism into the base,
    // and the clip frame is upward confluent.
    rep.frame_class_ok = true;
    Frame cf = clip_frame(c);
    std::map<int, int> pos;
    for (std::size_t i = 0; i < c.tips.size(); ++i) pos.emplace(c.tips[i].name, static_cast<int>(i));
    for (std::size_t i = 0; i < c.tips.size(); ++i)
        for (std::size_t j = 0; j < c.tips.size(); ++j) {
            if (cf.le_holds(static_cast<int>(i), static_cast<int>(j)) &&
                !c.base.frame.le_holds(c.tips[i].world, c.tips[j].world))
                flag(rep.frame_class_ok, "frame", "world projection breaks <= homomorphism");
            if (cf.r_holds(static_cast<int>(i), static_cast<int>(j)) &&
                !c.base.frame.r_holds(c.tips[i].world, c.tips[j].world))
                flag(rep.frame_class_ok, "frame", "world projection breaks R homomorphism");
        }
    if (!one_confluence_holds(cf, Confluence::Upward, nullptr))
        flag(rep.frame_class_ok, "frame", "clip frame is not upward confluent");

    rep.truth_lemma_ok = true;  // not evaluated here; see verify_truth_lemma
    return rep;
}

ValidationReport verify_truth_lemma(const Clip& c, const Model& extracted) {
    ValidationReport rep = validate_clip(c);
    if (!rep.coherent || !rep.regular) {
        rep.truth_lemma_ok = false;
        rep.violations.push_back({"truth", "skipped: clip rejected before the truth-lemma stage"});
        return rep;
    }

    auto chk = frame_class_check(extracted.frame, upgraded_class_of(c.logic));
    if (!chk.ok) {
        rep.frame_class_ok = false;
        rep.violations.push_back(
            {"frame", "extracted frame misses " + upgraded_class_of(c.logic).name()});
    }

    ModelEvaluator base_ev(c.base);
    ModelEvaluator ext_ev(extracted);
    rep.truth_lemma_ok = true;
    int pos0 = -1;
    for (std::size_t i = 0; i < c.tips.size(); ++i) {
        const Tip& t = c.tips[i];
        if (t.name == 0) pos0 = static_cast<int>(i);
        for (const Formula& fm : t.topic) {
            bool in_ext = has(ext_ev.eval(fm), static_cast<int>(i));
            bool in_base = has(base_ev.eval(fm), t.world);
            if (in_ext != in_base) {
                rep.truth_lemma_ok = false;
                rep.violations.push_back({"truth", "tip " + std::to_string(t.name) +
                                                       " disagrees with its world on " + render(fm)});
            }
        }
    }
    if (pos0 < 0) {
        rep.truth_lemma_ok = false;
        rep.violations.push_back({"truth", "no tip named 0"});
    } else if (has(ext_ev.eval(c.root), pos0)) {
        rep.truth_lemma_ok = false;
        rep.violations.push_back({"truth", "tip 0 satisfies the root formula"});
    }
    return rep;
}

}  // namespace fiklik
