#include "fiklik/decide.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <mutex>
#include <thread>

#include "fiklik/json_io.hpp"

namespace fiklik {

using nlohmann::json;

std::string verdict_name(Verdict v) {
    return v == Verdict::NonTheorem ? "non-theorem" : "no-countermodel-up-to-bound";
}

namespace {

// Earliest falsifying (valuation, world) of a within one frame, or nullopt.
std::optional<std::pair<std::uint64_t, int>> first_hit_in_frame(const Frame& fr, const Formula& a,
                                                                const std::vector<std::string>& atoms,
                                                                Semantics sem,
                                                                std::uint64_t* vals_seen) {
    ValuationEnumerator vals(fr, atoms);
    std::uint64_t idx = 0;
    while (auto v = vals.next()) {
        Model m{fr, *v};
        ModelEvaluator ev(m, sem);
        WorldMask sat = ev.eval(a);
        if (vals_seen) ++*vals_seen;
        if (sat != fr.all()) return std::make_pair(idx, lowest_clear_bit(sat));
        ++idx;
    }
    return std::nullopt;
}

struct SizeScanResult {
    // Canonical coordinates of the earliest hit at this size, if any.
    std::optional<std::tuple<std::uint64_t, std::uint64_t, int, Frame, Valuation>> hit;
    std::uint64_t valuations = 0;  // valuations inspected (exhaustive part)
};

Valuation valuation_at(const Frame& fr, const std::vector<std::string>& atoms,
                       std::uint64_t target_idx) {
    ValuationEnumerator vals(fr, atoms);
    std::uint64_t idx = 0;
    while (auto v = vals.next()) {
        if (idx == target_idx) return *v;
        ++idx;
    }
    throw Error("INTERNAL", "valuation index out of range");
}

// Scans all frames of one size; workers split the preorders and skip any
// candidate beyond the best hit found so far, so the reported hit is the
// canonical-first one regardless of scheduling.
SizeScanResult scan_size(int n, FrameClass cls, const Formula& a,
                         const std::vector<std::string>& atoms, Semantics sem, int jobs,
                         const std::vector<std::vector<WorldMask>>& preorders) {
    std::uint64_t rel_count = std::uint64_t{1} << (n * n);

    std::atomic<std::uint64_t> best_key{~std::uint64_t{0}};
    std::mutex mtx;
    SizeScanResult result;
    std::vector<std::uint64_t> val_counts(std::max(1, jobs), 0);

    auto worker = [&](int wid) {
        for (std::size_t pi = wid; pi < preorders.size(); pi += std::max(1, jobs)) {
            for (std::uint64_t rel = 0; rel < rel_count; ++rel) {
                std::uint64_t key = pi * rel_count + rel;
                // A worker's keys only grow, so anything at or past the best
                // hit can be dropped without losing the canonical minimum.
                if (key >= best_key.load(std::memory_order_relaxed)) break;
                Frame fr;
                fr.world_names = Frame::default_names(n);
                fr.le = preorders[pi];
                fr.r.resize(n);
                for (int i = 0; i < n; ++i)
                    fr.r[i] = static_cast<WorldMask>((rel >> (i * n)) &
                                                     ((std::uint64_t{1} << n) - 1));
                if (!frame_class_check(fr, cls).ok) continue;
                auto hit = first_hit_in_frame(fr, a, atoms, sem, &val_counts[wid]);
                if (!hit) continue;
                std::lock_guard<std::mutex> lock(mtx);
                if (key < best_key.load()) {
                    best_key.store(key);
                    result.hit = std::make_tuple(key + 1, hit->first, hit->second, fr,
                                                 valuation_at(fr, atoms, hit->first));
                }
                break;  // nothing later in this preorder can beat this key
            }
        }
    };

    if (jobs <= 1) {
        worker(0);
    } else {
        std::vector<std::thread> threads;
        for (int w = 0; w < jobs; ++w) threads.emplace_back(worker, w);
        for (auto& t : threads) t.join();
    }
    for (auto v : val_counts) result.valuations += v;
    return result;
}

}  // namespace

std::optional<CountermodelHit> search_countermodel(const Formula& a, LogicId l,
                                                   const SearchConfig& cfg, SearchStats* stats) {
    if (cfg.max_frame_size < 1) throw Error("CONFIG", "max_frame_size must be at least 1");
    FrameClass cls = frame_class_of(l);
    auto atoms = atoms_of(a);
    std::uint64_t frames_before = 0;
    std::uint64_t vals_total = 0;

    for (int n = 1; n <= cfg.max_frame_size; ++n) {
        auto preorders = enumerate_preorders(n);
        SizeScanResult r = scan_size(n, cls, a, atoms, cfg.semantics, cfg.jobs, preorders);
        std::uint64_t candidates = preorders.size() * (std::uint64_t{1} << (n * n));
        if (r.hit) {
            auto& [seq, val_idx, world, fr, val] = *r.hit;
            if (stats) {
                stats->frames_examined = frames_before + seq;
                stats->valuations_examined = val_idx + 1;
            }
            return CountermodelHit{Model{fr, val}, world, n, seq, val_idx};
        }
        frames_before += candidates;
        vals_total += r.valuations;
    }
    if (stats) {
        stats->frames_examined = frames_before;
        stats->valuations_examined = vals_total;
    }
    return std::nullopt;
}

Certificate decide(const Formula& a, LogicId l, const SearchConfig& cfg) {
    Certificate cert;
    cert.formula = a;
    cert.logic = l;
    cert.bound = cfg.max_frame_size;

    SearchStats stats;
    auto hit = search_countermodel(a, l, cfg, &stats);
    cert.frames_examined = stats.frames_examined;
    cert.valuations_examined = stats.valuations_examined;

    if (!hit) {
        cert.verdict = Verdict::NoCountermodelUpToBound;
        return cert;
    }
    cert.verdict = Verdict::NonTheorem;
    cert.model = hit->model;
    cert.world = hit->world;

    if (cfg.run_saturation) {
        try {
            SaturationResult sr = saturate(*cert.model, cert.world, a, l, {cfg.fuel});
            Model extracted = extract_saturated_model(sr.clip);
            ValidationReport rep = verify_truth_lemma(sr.clip, extracted);
            cert.saturated = std::move(extracted);
            for (const Tip& t : sr.clip.tips)
                cert.tips.push_back({t.name, sr.clip.base.frame.world_names[t.world], t.rank,
                                     t.height});
            cert.report = rep;
            cert.trace = std::move(sr.trace);
            if (!rep.all_ok()) {
                cert.saturation_failed = true;
                cert.saturation_diagnostic = "saturation validation reported violations";
            }
        } catch (const Error& e) {
            cert.saturation_failed = true;
            cert.saturation_diagnostic = e.code + ": " + e.what();
            cert.saturated.reset();
            cert.tips.clear();
            cert.report.reset();
        }
    }
    return cert;
}

namespace {

bool valuation_closed(const Model& m) {
    for (const auto& [p, mask] : m.val)
        for (int i = 0; i < m.frame.size(); ++i)
            if (has(mask, i) && (m.frame.le[i] & ~mask)) return false;
    return true;
}

bool verify_saturated_part(const Certificate& c) {
    const Model& sat = *c.saturated;
    int n = sat.frame.size();
    if (static_cast<int>(c.tips.size()) != n) return false;
    if (!valuation_closed(sat)) return false;
    if (!frame_class_check(sat.frame, upgraded_class_of(c.logic)).ok) return false;

    // Resolve provenance against the cluster-collapsed base, exactly as the
    // saturation engine built it.
    Model base = quotient_clusters(*c.model).model;
    std::vector<int> world_of(n);
    for (int i = 0; i < n; ++i) {
        world_of[i] = base.frame.world_index(c.tips[i].world);
        if (world_of[i] < 0) return false;
        if (c.tips[i].rank < 0 || c.tips[i].height < 0) return false;
    }

    // Structural laws visible in the extracted frame: modal edges raise the
    // rank by one, preserve height, have in-degree at most one, and are
    // mirrored in the base; distinct comparable tips share a rank, climb in
    // height and are mirrored in the base order.
    for (int i = 0; i < n; ++i) {
        int preds = 0;
        for (int j = 0; j < n; ++j) {
            if (sat.frame.r_holds(j, i)) ++preds;
            if (sat.frame.r_holds(i, j)) {
                if (c.tips[j].rank != c.tips[i].rank + 1) return false;
                if (c.tips[j].height != c.tips[i].height) return false;
                if (!base.frame.r_holds(world_of[i], world_of[j])) return false;
            }
            if (i != j && sat.frame.le_holds(i, j)) {
                if (c.tips[j].rank != c.tips[i].rank) return false;
                if (c.tips[j].height <= c.tips[i].height) return false;
                if (!base.frame.le_holds(world_of[i], world_of[j])) return false;
            }
        }
        if (preds > 1) return false;
    }

    // Truth lemma over the stratum topics, reconstructed from the ranks.
    ClosureSet cs = closure_of(c.formula);
    std::vector<FormulaSet> strata{cs.members};
    while (!strata.back().empty()) strata.push_back(modal_step(strata.back()));
    ModelEvaluator base_ev(base);
    ModelEvaluator sat_ev(sat);
    int pos0 = -1;
    for (int i = 0; i < n; ++i) {
        if (c.tips[i].name == 0) {
            if (pos0 >= 0) return false;
            pos0 = i;
        }
        if (c.tips[i].rank >= static_cast<int>(strata.size())) return false;
        for (const Formula& fm : strata[c.tips[i].rank])
            if (has(sat_ev.eval(fm), i) != has(base_ev.eval(fm), world_of[i])) return false;
    }
    if (pos0 < 0 || c.tips[pos0].rank != 0) return false;
    if (has(sat_ev.eval(c.formula), pos0)) return false;
    return true;
}

}  // namespace

bool verify_certificate(const Certificate& c) {
    try {
        if (c.verdict == Verdict::NoCountermodelUpToBound) return c.bound >= 1;
        if (!c.model) return false;
        const Model& m = *c.model;
        if (c.world < 0 || c.world >= m.frame.size()) return false;
        if (!valuation_closed(m)) return false;
        if (!frame_class_check(m.frame, frame_class_of(c.logic)).ok) return false;
        if (satisfies(m, c.world, c.formula)) return false;
        if (c.saturated && !verify_saturated_part(c)) return false;
        return true;
    } catch (const Error&) {
        return false;
    }
}

json validation_report_to_json(const ValidationReport& r) {
    json v = json::array();
    for (const auto& x : r.violations) v.push_back({{"stage", x.stage}, {"detail", x.detail}});
    return json{{"coherent", r.coherent},
                {"regular", r.regular},
                {"clean", r.clean},
                {"frame_class_ok", r.frame_class_ok},
                {"truth_lemma_ok", r.truth_lemma_ok},
                {"violations", v}};
}

ValidationReport validation_report_from_json(const json& j) {
    ValidationReport r;
    r.coherent = j.value("coherent", false);
    r.regular = j.value("regular", false);
    r.clean = j.value("clean", false);
    r.frame_class_ok = j.value("frame_class_ok", false);
    r.truth_lemma_ok = j.value("truth_lemma_ok", false);
    for (const auto& v : j.value("violations", json::array()))
        r.violations.push_back({v.value("stage", ""), v.value("detail", "")});
    return r;
}

json trace_record_to_json(const TraceRecord& t) {
    return json{{"pass", t.pass},           {"rank", t.rank},
                {"height", t.height},       {"defect", t.defect_kind},
                {"anchor_tip", t.anchor_tip}, {"new_tip", t.new_tip},
                {"witness_world", t.witness_world}};
}

json saturated_model_to_json(const Model& extracted, const std::vector<TipProvenance>& tips) {
    json j = model_to_json(extracted);
    json tp = json::array();
    for (const auto& t : tips)
        tp.push_back({{"tip",
                       {{"name", t.name}, {"world", t.world}, {"rank", t.rank},
                        {"height", t.height}}}});
    j["tips"] = std::move(tp);
    return j;
}

json certificate_to_json(const Certificate& c) {
    json j;
    j["verdict"] = verdict_name(c.verdict);
    j["formula"] = render(c.formula);
    j["logic"] = logic_name(c.logic);
    j["bound"] = c.bound;
    j["frames_examined"] = c.frames_examined;
    j["valuations_examined"] = c.valuations_examined;
    if (c.model) {
        j["model"] = model_to_json(*c.model);
        if (c.world >= 0 && c.world < c.model->frame.size())
            j["world"] = c.model->frame.world_names[c.world];
    }
    if (c.saturated) {
        j["saturated"] = saturated_model_to_json(*c.saturated, c.tips);
        if (c.report) j["report"] = validation_report_to_json(*c.report);
    }
    if (c.saturation_failed) {
        j["saturation_failed"] = true;
        j["saturation_diagnostic"] = c.saturation_diagnostic;
    }
    if (!c.trace_path.empty()) j["trace"] = c.trace_path;
    return j;
}

Certificate certificate_from_json(const json& j) {
    Certificate c;
    std::string verdict = j.value("verdict", "");
    if (verdict == verdict_name(Verdict::NonTheorem))
        c.verdict = Verdict::NonTheorem;
    else if (verdict == verdict_name(Verdict::NoCountermodelUpToBound))
        c.verdict = Verdict::NoCountermodelUpToBound;
    else
        throw Error("CERT_PARSE", "unknown verdict '" + verdict + "'");
    c.formula = parse_formula(j.at("formula").get<std::string>());
    auto logic = logic_from_name(j.value("logic", ""));
    if (!logic) throw Error("CERT_PARSE", "unknown logic in certificate");
    c.logic = *logic;
    c.bound = j.value("bound", 0);
    c.frames_examined = j.value("frames_examined", std::uint64_t{0});
    c.valuations_examined = j.value("valuations_examined", std::uint64_t{0});
    if (j.contains("model")) {
        // Lenient load: verification, not the loader, judges the artifacts.
        c.model = model_from_json(j["model"], /*strict=*/false);
        std::string w = j.value("world", "");
        c.world = c.model->frame.world_index(w);
    }
    if (j.contains("saturated")) {
        c.saturated = model_from_json(j["saturated"], /*strict=*/false);
        for (const auto& e : j["saturated"].value("tips", json::array())) {
            const json& t = e.at("tip");
            c.tips.push_back({t.value("name", -1), t.value("world", ""), t.value("rank", -1),
                              t.value("height", -1)});
        }
        if (j.contains("report")) c.report = validation_report_from_json(j["report"]);
    }
    c.saturation_failed = j.value("saturation_failed", false);
    c.saturation_diagnostic = j.value("saturation_diagnostic", "");
    c.trace_path = j.value("trace", "");
    return c;
}

}  // namespace fiklik
