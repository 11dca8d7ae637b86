#include <doctest.h>

#include "fiklik/decide.hpp"
#include "fiklik/json_io.hpp"

using namespace fiklik;

namespace {

Formula fm(const char* s) { return parse_formula(s); }

SearchConfig cfg_sized(int n) {
    SearchConfig cfg;
    cfg.max_frame_size = n;
    return cfg;
}

}  // namespace

TEST_CASE("search: excluded middle falls at the two-world chain") {
    auto hit = search_countermodel(fm("p | ~p"), LogicId::FIK, cfg_sized(3));
    REQUIRE(hit.has_value());
    CHECK(hit->size == 2);
    // canonical-first hit: chain w0 <= w1, empty R, val(p) = {w1}, world w0
    CHECK(hit->model.frame.le[0] == 0b11);
    CHECK(hit->model.frame.le[1] == 0b10);
    CHECK(hit->model.frame.r == std::vector<WorldMask>{0, 0});
    CHECK(hit->model.val.at("p") == 0b10);
    CHECK(hit->world == 0);
    CHECK(hit->frame_seq == 17);  // regression: second preorder, first relation
    CHECK(hit->val_idx == 1);
}

TEST_CASE("search: Box p -> p falls at the single world with no successors") {
    auto hit = search_countermodel(fm("[]p -> p"), LogicId::FIK, cfg_sized(2));
    REQUIRE(hit.has_value());
    CHECK(hit->size == 1);
    CHECK(hit->frame_seq == 1);
    CHECK(hit->model.frame.r == std::vector<WorldMask>{0});
    CHECK(hit->model.val.at("p") == 0);
    CHECK(hit->world == 0);
}

TEST_CASE("search: theorems yield nothing up to the bound") {
    CHECK_FALSE(search_countermodel(fm("[]true"), LogicId::FIK, cfg_sized(3)).has_value());
    CHECK_FALSE(search_countermodel(fm("~<>false"), LogicId::FIK, cfg_sized(3)).has_value());
    CHECK_FALSE(
        search_countermodel(fm("[](p & q) -> []p"), LogicId::FIK, cfg_sized(3)).has_value());
}

TEST_CASE("search: an Ad instance falls in C_fc but not in C_fdc (size <= 4)") {
    Formula ad = fm("[](p | q) -> <>p | []q");
    auto hit = search_countermodel(ad, LogicId::FIK, cfg_sized(4));
    REQUIRE(hit.has_value());
    CHECK(hit->size <= 3);
    CHECK(frame_class_check(hit->model.frame, FrameClass::fc()).ok);
    CHECK_FALSE(satisfies(hit->model, hit->world, ad));
    // Ad is an axiom of LIK: no C_fdc countermodel
    CHECK_FALSE(search_countermodel(ad, LogicId::LIK, cfg_sized(3)).has_value());
}

TEST_CASE("search monotonicity: larger bounds return the same early witness") {
    auto h2 = search_countermodel(fm("p | ~p"), LogicId::FIK, cfg_sized(2));
    auto h3 = search_countermodel(fm("p | ~p"), LogicId::FIK, cfg_sized(3));
    REQUIRE(h2.has_value());
    REQUIRE(h3.has_value());
    CHECK(h2->size == h3->size);
    CHECK(h2->frame_seq == h3->frame_seq);
    CHECK(h2->val_idx == h3->val_idx);
    CHECK(h2->world == h3->world);
    CHECK(model_to_json(h2->model) == model_to_json(h3->model));
}

TEST_CASE("parallel scan returns the canonical witness") {
    for (const char* s : {"p | ~p", "<>p -> []p", "[](p | q) -> <>p | []q"}) {
        SearchConfig seq = cfg_sized(3);
        SearchConfig par = cfg_sized(3);
        par.jobs = 4;
        auto a = search_countermodel(fm(s), LogicId::FIK, seq);
        auto b = search_countermodel(fm(s), LogicId::FIK, par);
        REQUIRE(a.has_value());
        REQUIRE(b.has_value());
        CHECK(a->frame_seq == b->frame_seq);
        CHECK(a->val_idx == b->val_idx);
        CHECK(a->world == b->world);
        CHECK(model_to_json(a->model) == model_to_json(b->model));
    }
}

TEST_CASE("decide: non-theorem certificates verify") {
    Certificate cert = decide(fm("[]p -> p"), LogicId::FIK, cfg_sized(3));
    CHECK(cert.verdict == Verdict::NonTheorem);
    REQUIRE(cert.model.has_value());
    CHECK(cert.model->frame.size() <= 2);
    CHECK(verify_certificate(cert));

    // the full verdict survives a JSON round trip
    Certificate back = certificate_from_json(certificate_to_json(cert));
    CHECK(verify_certificate(back));
    CHECK(certificate_to_json(back) == certificate_to_json(cert));
}

TEST_CASE("decide: theorems report the exhausted bound") {
    for (const char* s : {"[](p & q) -> []p", "~<>false", "[]true"}) {
        Certificate cert = decide(fm(s), LogicId::FIK, cfg_sized(3));
        CHECK(cert.verdict == Verdict::NoCountermodelUpToBound);
        CHECK(cert.bound == 3);
        CHECK(cert.frames_examined > 0);
        CHECK(verify_certificate(cert));
    }
}

TEST_CASE("decide with saturation attaches a verified upgraded model") {
    SearchConfig cfg = cfg_sized(3);
    cfg.run_saturation = true;
    Certificate cert = decide(fm("p | ~p"), LogicId::FIK, cfg);
    CHECK(cert.verdict == Verdict::NonTheorem);
    CHECK_FALSE(cert.saturation_failed);
    REQUIRE(cert.saturated.has_value());
    REQUIRE(cert.report.has_value());
    CHECK(cert.report->all_ok());
    CHECK(frame_class_check(cert.saturated->frame, FrameClass::fuc()).ok);
    CHECK(cert.tips.size() == static_cast<std::size_t>(cert.saturated->frame.size()));
    CHECK(verify_certificate(cert));

    Certificate back = certificate_from_json(certificate_to_json(cert));
    CHECK(verify_certificate(back));

    // LIK run lands in C_fduc
    Certificate lik = decide(fm("<>p -> []p"), LogicId::LIK, cfg);
    REQUIRE(lik.saturated.has_value());
    CHECK(frame_class_check(lik.saturated->frame, FrameClass::fduc()).ok);
    CHECK(verify_certificate(lik));
}

TEST_CASE("verify_certificate rejects tampered evidence") {
    SearchConfig cfg = cfg_sized(3);
    cfg.run_saturation = true;
    Certificate cert = decide(fm("p | ~p"), LogicId::FIK, cfg);
    REQUIRE(verify_certificate(cert));

    // valuation made non-up-closed: val(p) = {w0} under w0 <= w1
    nlohmann::json j = certificate_to_json(cert);
    j["model"]["val"]["p"] = {"w0"};
    CHECK_FALSE(verify_certificate(certificate_from_json(j)));

    // model satisfying the formula at the stored world
    nlohmann::json j2 = certificate_to_json(cert);
    j2["model"]["val"]["p"] = {"w0", "w1"};
    CHECK_FALSE(verify_certificate(certificate_from_json(j2)));

    // world outside the model
    nlohmann::json j3 = certificate_to_json(cert);
    j3["world"] = "nope";
    CHECK_FALSE(verify_certificate(certificate_from_json(j3)));

    // saturated frame swapped for one outside the upgraded class
    nlohmann::json j4 = certificate_to_json(cert);
    j4["saturated"]["le"] = nlohmann::json::parse(R"([["t1","t0"]])");
    CHECK_FALSE(verify_certificate(certificate_from_json(j4)));

    // tampered tip provenance breaks the truth-lemma re-check
    nlohmann::json j5 = certificate_to_json(cert);
    j5["saturated"]["tips"][0]["tip"]["world"] = j5["saturated"]["tips"][1]["tip"]["world"];
    CHECK_FALSE(verify_certificate(certificate_from_json(j5)));
}

TEST_CASE("decide downgrades saturation failures to a flagged non-theorem") {
    SearchConfig cfg = cfg_sized(3);
    cfg.run_saturation = true;
    cfg.fuel = 1;  // far below what the Ad countermodel needs
    Certificate cert = decide(fm("[](p | q) -> <>p | []q"), LogicId::FIK, cfg);
    CHECK(cert.verdict == Verdict::NonTheorem);
    CHECK(cert.saturation_failed);
    CHECK(cert.saturation_diagnostic.find("FUEL_EXHAUSTED") != std::string::npos);
    CHECK_FALSE(cert.saturated.has_value());
    CHECK(verify_certificate(cert));  // the countermodel itself still verifies
}

TEST_CASE("decide never refutes the logic's own axioms (size <= 2 smoke)") {
    for (auto l : {LogicId::FIK, LogicId::LIK})
        for (const auto& s : axiom_schemata(l)) {
            Certificate cert = decide(s.pattern, l, cfg_sized(2));
            CHECK(cert.verdict == Verdict::NoCountermodelUpToBound);
        }
}
