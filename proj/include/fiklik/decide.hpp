#ifndef FIKLIK_DECIDE_HPP
#define FIKLIK_DECIDE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fiklik/formula.hpp"
#include "fiklik/kripke.hpp"
#include "fiklik/logic.hpp"
#include "fiklik/saturation.hpp"

namespace fiklik {

struct SearchConfig {
    int max_frame_size = 3;
    Semantics semantics = Semantics::Standard;
    bool run_saturation = false;
    std::uint64_t fuel = 0;   // 0: saturation default
    std::uint64_t seed = 0;   // reserved; the pipeline is fully deterministic
    int jobs = 1;
};

enum class Verdict : std::uint8_t { NonTheorem, NoCountermodelUpToBound };

std::string verdict_name(Verdict v);

struct CountermodelHit {
    Model model;
    int world;
    int size;
    std::uint64_t frame_seq;  // candidate (preorder, relation) position, 1-based
    std::uint64_t val_idx;    // valuation position within the frame, 0-based
};

struct SearchStats {
    std::uint64_t frames_examined = 0;      // candidate frames, cumulative over sizes
    std::uint64_t valuations_examined = 0;  // see decide module docs
};

// Scans frames of size 1..max in the logic's class, canonically ordered, all
// le-closed valuations over the formula's atoms, all worlds; returns the
// first falsifying pair. Deterministic for any cfg.jobs.
std::optional<CountermodelHit> search_countermodel(const Formula& a, LogicId l,
                                                   const SearchConfig& cfg,
                                                   SearchStats* stats = nullptr);

struct TipProvenance {
    int name;
    std::string world;  // base-model world (after cluster collapse)
    int rank;
    int height;
};

struct Certificate {
    Verdict verdict;
    Formula formula;
    LogicId logic;
    int bound;

    // NonTheorem evidence
    std::optional<Model> model;
    int world = -1;
    std::optional<Model> saturated;
    std::vector<TipProvenance> tips;  // aligned with the saturated model's worlds
    std::optional<ValidationReport> report;
    std::vector<TraceRecord> trace;
    bool saturation_failed = false;
    std::string saturation_diagnostic;
    std::string trace_path;

    std::uint64_t frames_examined = 0;
    std::uint64_t valuations_examined = 0;
};

Certificate decide(const Formula& a, LogicId l, const SearchConfig& cfg);

// Re-checks the certificate from its stored artifacts only: frame class,
// falsification at the stored world, valuation closure, and (when present)
// the saturated model's class, structure and truth-lemma agreement.
bool verify_certificate(const Certificate& c);

nlohmann::json certificate_to_json(const Certificate& c);
Certificate certificate_from_json(const nlohmann::json& j);

nlohmann::json validation_report_to_json(const ValidationReport& r);
ValidationReport validation_report_from_json(const nlohmann::json& j);
nlohmann::json trace_record_to_json(const TraceRecord& t);

// Saturated model with per-tip provenance annotations.
nlohmann::json saturated_model_to_json(const Model& extracted,
                                       const std::vector<TipProvenance>& tips);

}  // namespace fiklik

#endif
