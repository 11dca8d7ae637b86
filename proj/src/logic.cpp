#include "fiklik/logic.hpp"

namespace fiklik {

std::string logic_name(LogicId l) { return l == LogicId::FIK ? "fik" : "lik"; }

std::optional<LogicId> logic_from_name(const std::string& n) {
    if (n == "fik" || n == "FIK") return LogicId::FIK;
    if (n == "lik" || n == "LIK") return LogicId::LIK;
    return std::nullopt;
}

FrameClass frame_class_of(LogicId l) {
    return l == LogicId::FIK ? FrameClass::fc() : FrameClass::fdc();
}

FrameClass upgraded_class_of(LogicId l) {
    return l == LogicId::FIK ? FrameClass::fuc() : FrameClass::fduc();
}

const std::vector<AxiomSchema>& all_schemata() {
    static const std::vector<AxiomSchema> schemata = [] {
        Formula p = Formula::atom("p");
        Formula q = Formula::atom("q");
        std::vector<AxiomSchema> v;
        v.push_back({"DBox", Formula::impl(Formula::conj(Formula::box(p), Formula::box(q)),
                                           Formula::box(Formula::conj(p, q)))});
        v.push_back({"DDia", Formula::impl(Formula::dia(Formula::disj(p, q)),
                                           Formula::disj(Formula::dia(p), Formula::dia(q)))});
        v.push_back({"NBox", Formula::box(Formula::top())});
        v.push_back({"NDia", Formula::neg(Formula::dia(Formula::bot()))});
        v.push_back({"wCD", Formula::impl(
                                Formula::box(Formula::disj(p, q)),
                                Formula::impl(Formula::impl(Formula::dia(p), Formula::box(q)),
                                              Formula::box(q)))});
        v.push_back({"Af", Formula::impl(Formula::dia(Formula::impl(p, q)),
                                         Formula::impl(Formula::box(p), Formula::dia(q)))});
        v.push_back({"Ab", Formula::impl(Formula::impl(Formula::dia(p), Formula::box(q)),
                                         Formula::box(Formula::impl(p, q)))});
        v.push_back({"Ad", Formula::impl(Formula::box(Formula::disj(p, q)),
                                         Formula::disj(Formula::dia(p), Formula::box(q)))});
        return v;
    }();
    return schemata;
}

std::optional<AxiomSchema> schema_by_name(const std::string& name) {
    for (const auto& s : all_schemata())
        if (s.name == name) return s;
    return std::nullopt;
}

std::vector<AxiomSchema> axiom_schemata(LogicId l) {
    std::vector<AxiomSchema> out;
    for (const char* name : {"DBox", "DDia", "NBox", "NDia", "wCD", "Af"})
        out.push_back(*schema_by_name(name));
    if (l == LogicId::LIK) out.push_back(*schema_by_name("Ad"));
    return out;
}

const std::vector<InferenceRule>& inference_rules() {
    static const std::vector<InferenceRule> rules = [] {
        Formula p = Formula::atom("p");
        Formula q = Formula::atom("q");
        Formula r = Formula::atom("r");
        std::vector<InferenceRule> v;
        v.push_back({"MP", {p, Formula::impl(p, q)}, q});
        v.push_back({"RBox",
                     {Formula::impl(p, q)},
                     Formula::impl(Formula::box(p), Formula::box(q))});
        v.push_back({"RDia",
                     {Formula::impl(p, q)},
                     Formula::impl(Formula::dia(p), Formula::dia(q))});
        v.push_back({"RI",
                     {Formula::impl(Formula::dia(p),
                                    Formula::disj(q, Formula::box(Formula::impl(p, r))))},
                     Formula::impl(Formula::dia(p), Formula::disj(q, Formula::dia(r)))});
        return v;
    }();
    return rules;
}

std::optional<InferenceRule> rule_by_name(const std::string& name) {
    for (const auto& r : inference_rules())
        if (r.name == name) return r;
    return std::nullopt;
}

Formula instantiate_schema(const AxiomSchema& s, const std::map<std::string, Formula>& binding) {
    for (const auto& a : atoms_of(s.pattern))
        if (!binding.count(a))
            throw Error("MISSING_BINDING",
                        "schema " + s.name + " needs a binding for '" + a + "'");
    return substitute(s.pattern, binding);
}

bool match_pattern(const Formula& pattern, const Formula& target,
                   std::map<std::string, Formula>& binding) {
    if (pattern.is(Conn::Atom)) {
        auto [it, inserted] = binding.emplace(pattern.atom_name(), target);
        return inserted || it->second == target;
    }
    if (pattern.kind() != target.kind()) return false;
    switch (pattern.kind()) {
        case Conn::Top:
        case Conn::Bot:
            return true;
        case Conn::Box:
        case Conn::Dia:
            return match_pattern(pattern.body(), target.body(), binding);
        default:
            return match_pattern(pattern.left(), target.left(), binding) &&
                   match_pattern(pattern.right(), target.right(), binding);
    }
}

bool check_rule_instance(const InferenceRule& r, const std::vector<Formula>& premises,
                         const Formula& conclusion) {
    if (premises.size() != r.premises.size()) return false;
    std::map<std::string, Formula> binding;
    for (std::size_t i = 0; i < premises.size(); ++i)
        if (!match_pattern(r.premises[i], premises[i], binding)) return false;
    return match_pattern(r.conclusion, conclusion, binding);
}

}  // namespace fiklik
