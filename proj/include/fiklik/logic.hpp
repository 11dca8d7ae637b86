#ifndef FIKLIK_LOGIC_HPP
#define FIKLIK_LOGIC_HPP

#include <optional>
#include <string>
#include <vector>

#include "fiklik/formula.hpp"
#include "fiklik/kripke.hpp"

namespace fiklik {

enum class LogicId : std::uint8_t { FIK, LIK };

std::string logic_name(LogicId l);
std::optional<LogicId> logic_from_name(const std::string&);

// Frame class the logic is complete for, and the class its saturated models
// land in.
FrameClass frame_class_of(LogicId l);     // FIK -> fc, LIK -> fdc
FrameClass upgraded_class_of(LogicId l);  // FIK -> fuc, LIK -> fduc

// An axiom schema over the schematic atoms p, q, r.
struct AxiomSchema {
    std::string name;
    Formula pattern;
};

// Core schemata plus Af (FIK) or Af and Ad (LIK), in stable order.
std::vector<AxiomSchema> axiom_schemata(LogicId l);

// All eight named schemata (includes Ab and Ad regardless of logic).
const std::vector<AxiomSchema>& all_schemata();
std::optional<AxiomSchema> schema_by_name(const std::string&);

struct InferenceRule {
    std::string name;
    std::vector<Formula> premises;  // patterns over schematic atoms
    Formula conclusion;
};

// MP, RBox, RDia, RI.
const std::vector<InferenceRule>& inference_rules();
std::optional<InferenceRule> rule_by_name(const std::string&);

// Applies the binding to the schema pattern. Throws MISSING_BINDING if a
// schematic atom of the pattern is not covered.
Formula instantiate_schema(const AxiomSchema& s, const std::map<std::string, Formula>& binding);

// True iff one substitution simultaneously matches every premise pattern to
// the corresponding premise and the conclusion pattern to the conclusion.
bool check_rule_instance(const InferenceRule& r, const std::vector<Formula>& premises,
                         const Formula& conclusion);

// Pattern matching over schematic atoms; extends binding in place.
bool match_pattern(const Formula& pattern, const Formula& target,
                   std::map<std::string, Formula>& binding);

}  // namespace fiklik

#endif
