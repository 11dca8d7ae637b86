#include <doctest.h>

#include "fiklik/json_io.hpp"
#include "fiklik/kripke.hpp"
#include "test_util.hpp"

using namespace fiklik;
using fiklik_test::FormulaGen;

namespace {

Formula fm(const char* s) { return parse_formula(s); }

Model chain_model() {
    // worlds {s, t}, s <= t, val(p) = {t}
    Model m{{{"s", "t"}, preorder_closure({{0, 1}}, 2), {0, 0}}, {{"p", 0b10}}};
    return m;
}

}  // namespace

TEST_CASE("preorder_closure") {
    auto le = preorder_closure({{0, 1}}, 2);
    CHECK(le[0] == 0b11);
    CHECK(le[1] == 0b10);
    CHECK(preorder_closure({}, 1)[0] == 0b1);
    auto le3 = preorder_closure({{0, 1}, {1, 2}}, 3);
    CHECK(has(le3[0], 2));  // transitivity
    CHECK_THROWS_AS(preorder_closure({{0, 5}}, 2), Error);
}

TEST_CASE("frame_class_check examples") {
    // le = identity: all four confluences hold for any r
    FormulaGen gen(1);
    for (int i = 0; i < 20; ++i) {
        Frame f{Frame::default_names(3), preorder_closure({}, 3), {}};
        f.r = {WorldMask(gen.below(8)), WorldMask(gen.below(8)), WorldMask(gen.below(8))};
        CHECK(frame_class_check(f, FrameClass::fduc()).ok);
        CHECK(frame_class_check(f, FrameClass::bc()).ok);
    }

    // worlds {w,x,u}, w<=x, r={(x,u)}: forward confluent, not downward
    Frame f{{"w", "x", "u"}, preorder_closure({{0, 1}}, 3), {0, 0b100, 0}};
    CHECK(frame_class_check(f, FrameClass::fc()).ok);
    auto down = frame_class_check(f, FrameClass::dc());
    CHECK(!down.ok);
    REQUIRE(down.witness.has_value());
    CHECK(down.witness->which == Confluence::Downward);
    CHECK(down.witness->s == 0);  // w
    CHECK(down.witness->t == 1);  // x
    CHECK(down.witness->u == 2);  // u

    // worlds {t,s,u}, t<=s, r={(t,u)}: not forward confluent
    Frame g{{"t", "s", "u"}, preorder_closure({{0, 1}}, 3), {0b100, 0, 0}};
    auto fwd = frame_class_check(g, FrameClass::fc());
    CHECK(!fwd.ok);
    REQUIRE(fwd.witness.has_value());
    CHECK(fwd.witness->which == Confluence::Forward);
    CHECK(fwd.witness->s == 1);  // s lacks the R-successor
    CHECK(fwd.witness->t == 0);
    CHECK(fwd.witness->u == 2);
}

TEST_CASE("satisfies: the three clause examples") {
    CHECK_FALSE(satisfies(chain_model(), 0, fm("p | ~p")));

    Model m2{{{"a", "b"}, preorder_closure({}, 2), {0b10, 0}}, {{"p", 0b10}}};
    CHECK(satisfies(m2, 0, fm("<>p")));

    // worlds {t,s,u}, t<=s, r={(t,u)}, val(p)={u}
    Model m3{{{"t", "s", "u"}, preorder_closure({{0, 1}}, 3), {0b100, 0, 0}}, {{"p", 0b100}}};
    CHECK(satisfies(m3, 1, fm("<>p"), Semantics::Standard));
    CHECK_FALSE(satisfies(m3, 1, fm("<>p"), Semantics::FischerServi));
    CHECK_FALSE(frame_class_check(m3.frame, FrameClass::fc()).ok);
}

TEST_CASE("satisfies agrees with the memoized evaluator") {
    FormulaGen gen(42);
    for (int i = 0; i < 60; ++i) {
        Model m = random_model(1000 + i, 1 + gen.below(5), FrameClass::all(), {"p", "q"});
        for (int j = 0; j < 6; ++j) {
            Formula a = gen.formula(2 + gen.below(8));
            for (auto sem :
                 {Semantics::Standard, Semantics::FischerServi, Semantics::Wijesekera}) {
                ModelEvaluator ev(m, sem);
                WorldMask mask = ev.eval(a);
                for (int w = 0; w < m.frame.size(); ++w)
                    CHECK(has(mask, w) == satisfies(m, w, a, sem));
            }
        }
    }
}

TEST_CASE("valid_in_frame") {
    Frame one{{"w"}, preorder_closure({}, 1), {0}};
    CHECK(valid_in_frame(one, fm("p | ~p")).valid);

    Frame chain{{"s", "t"}, preorder_closure({{0, 1}}, 2), {0, 0}};
    auto res = valid_in_frame(chain, fm("p | ~p"));
    CHECK_FALSE(res.valid);
    CHECK(*res.world == 0);
    CHECK((*res.countervaluation).at("p") == 0b10);  // val(p) = {t}

    FormulaGen gen(5);
    for (int i = 0; i < 25; ++i) {
        Model m = random_model(50 + i, 1 + gen.below(4), FrameClass::all(), {});
        CHECK(valid_in_frame(m.frame, fm("[]true")).valid);
    }
}

TEST_CASE("valid_in_frame agrees with the brute-force double loop") {
    FormulaGen gen(77);
    for (int i = 0; i < 40; ++i) {
        Model m = random_model(300 + i, 1 + gen.below(3), FrameClass::all(), {});
        Formula a = gen.formula(2 + gen.below(7));
        bool brute = true;
        ValuationEnumerator vals(m.frame, atoms_of(a));
        while (auto v = vals.next()) {
            Model mv{m.frame, *v};
            for (int w = 0; w < m.frame.size(); ++w)
                if (!satisfies(mv, w, a)) brute = false;
        }
        CHECK(valid_in_frame(m.frame, a).valid == brute);
    }
}

TEST_CASE("true_in_model") {
    Model one{{{"w"}, preorder_closure({}, 1), {0}}, {{"p", 0b1}}};
    CHECK(true_in_model(one, fm("p")));
    CHECK_FALSE(true_in_model(chain_model(), fm("p | ~p")));
    CHECK(true_in_model(chain_model(), fm("true")));
}

TEST_CASE("frame enumeration counts") {
    auto count = [](int n, FrameClass c) {
        FrameEnumerator e(n, c);
        std::uint64_t k = 0;
        while (e.next()) ++k;
        return k;
    };
    CHECK(count(1, FrameClass::all()) == 2);
    CHECK(count(2, FrameClass::all()) == 64);
    CHECK(count(2, FrameClass::fc()) == 48);   // regression value
    CHECK(count(2, FrameClass::fdc()) == 40);  // regression value
    CHECK(count(3, FrameClass::all()) == 14848);

    // independent oracle: filtering C_all by frame_class_check
    FrameEnumerator e(2, FrameClass::all());
    std::uint64_t filtered = 0;
    while (auto f = e.next())
        if (frame_class_check(*f, FrameClass::fc()).ok) ++filtered;
    CHECK(filtered == 48);
}

TEST_CASE("every fuc frame is an fc frame (Log inclusion direction)") {
    for (int n = 1; n <= 2; ++n) {
        FrameEnumerator e(n, FrameClass::fuc());
        while (auto f = e.next()) CHECK(frame_class_check(*f, FrameClass::fc()).ok);
    }
}

TEST_CASE("valuation enumeration counts") {
    Frame one{{"w"}, preorder_closure({}, 1), {0}};
    ValuationEnumerator v1(one, {"p"});
    CHECK(v1.count() == 2);

    Frame chain{{"s", "t"}, preorder_closure({{0, 1}}, 2), {0, 0}};
    ValuationEnumerator v2(chain, {"p"});
    CHECK(v2.count() == 3);

    Frame disc{{"a", "b"}, preorder_closure({}, 2), {0, 0}};
    ValuationEnumerator v3(disc, {"p"});
    CHECK(v3.count() == 4);

    // counts match actual streams
    int k = 0;
    while (v2.next()) ++k;
    CHECK(k == 3);
}

TEST_CASE("random_model: determinism, class, closed valuations") {
    for (std::uint64_t seed : {1ull, 2ull, 77ull, 987654321ull}) {
        Model a = random_model(seed, 4, FrameClass::fc(), {"p", "q"});
        Model b = random_model(seed, 4, FrameClass::fc(), {"p", "q"});
        CHECK(a.frame.le == b.frame.le);
        CHECK(a.frame.r == b.frame.r);
        CHECK(a.val == b.val);
        CHECK(frame_class_check(a.frame, FrameClass::fc()).ok);
        for (const auto& [p, mask] : a.val)
            for (int i = 0; i < a.frame.size(); ++i)
                if (has(mask, i)) CHECK((a.frame.le[i] & ~mask) == 0);
    }
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        Model m = random_model(seed, 3, FrameClass::fduc(), {"p"});
        CHECK(frame_class_check(m.frame, FrameClass::fduc()).ok);
    }
}

TEST_CASE("heredity: Standard and Wijesekera on all models, FS on fc models") {
    FormulaGen gen(2024);
    for (int i = 0; i < 120; ++i) {
        Model m = random_model(9000 + i, 1 + gen.below(5), FrameClass::all(), {"p", "q"});
        Model fc = random_model(9000 + i, 1 + gen.below(5), FrameClass::fc(), {"p", "q"});
        for (int j = 0; j < 4; ++j) {
            Formula a = gen.formula(2 + gen.below(7));
            for (auto [model, sem] :
                 {std::pair{&m, Semantics::Standard}, {&m, Semantics::Wijesekera},
                  {&fc, Semantics::FischerServi}}) {
                ModelEvaluator ev(*model, sem);
                WorldMask sat = ev.eval(a);
                for (int s = 0; s < model->frame.size(); ++s)
                    if (has(sat, s)) CHECK((model->frame.le[s] & ~sat) == 0);
            }
        }
    }
}

TEST_CASE("semantics agree pointwise on forward-confluent frames") {
    FormulaGen gen(31337, {"p"});
    std::vector<Formula> corpus;
    for (int i = 0; i < 40; ++i) corpus.push_back(gen.depth_formula(2));
    for (int n = 1; n <= 2; ++n) {
        FrameEnumerator frames(n, FrameClass::fc());
        while (auto f = frames.next()) {
            ValuationEnumerator vals(*f, {"p"});
            while (auto v = vals.next()) {
                Model m{*f, *v};
                for (const Formula& a : corpus) {
                    ModelEvaluator std_ev(m, Semantics::Standard);
                    ModelEvaluator fs_ev(m, Semantics::FischerServi);
                    ModelEvaluator w_ev(m, Semantics::Wijesekera);
                    WorldMask s = std_ev.eval(a);
                    CHECK(s == fs_ev.eval(a));
                    CHECK(s == w_ev.eval(a));
                }
            }
        }
    }
}

TEST_CASE("semantics agree on random forward-confluent models") {
    FormulaGen gen(8888);
    for (int i = 0; i < 60; ++i) {
        Model m = random_model(60000 + i, 1 + gen.below(5), FrameClass::fc(), {"p", "q"});
        for (int j = 0; j < 4; ++j) {
            Formula a = gen.formula(2 + gen.below(8));
            ModelEvaluator std_ev(m, Semantics::Standard);
            ModelEvaluator fs_ev(m, Semantics::FischerServi);
            ModelEvaluator w_ev(m, Semantics::Wijesekera);
            WorldMask s = std_ev.eval(a);
            CHECK(s == fs_ev.eval(a));
            CHECK(s == w_ev.eval(a));
        }
    }
}

TEST_CASE("validity on all fc frames implies validity on all fuc frames") {
    FormulaGen gen(246);
    for (int i = 0; i < 10; ++i) {
        Formula a = gen.formula(2 + gen.below(6));
        bool fc_valid = true, fuc_valid = true;
        for (int n = 1; n <= 2; ++n) {
            FrameEnumerator fc(n, FrameClass::fc());
            while (auto f = fc.next())
                if (!valid_in_frame(*f, a).valid) fc_valid = false;
            FrameEnumerator fuc(n, FrameClass::fuc());
            while (auto f = fuc.next())
                if (!valid_in_frame(*f, a).valid) fuc_valid = false;
        }
        if (fc_valid) CHECK(fuc_valid);
    }
}

TEST_CASE("model JSON round trip and loader errors") {
    auto j = nlohmann::json::parse(
        R"({"worlds":["w0","w1"],"le":[["w0","w1"]],"r":[["w0","w1"]],"val":{"p":["w1"]}})");
    Model m = model_from_json(j);
    CHECK(m.frame.le_holds(0, 1));
    CHECK(m.frame.le_holds(0, 0));  // loader closes reflexively
    CHECK(m.frame.r_holds(0, 1));
    CHECK(m.val.at("p") == 0b10);
    CHECK(model_from_json(model_to_json(m)).val == m.val);
    CHECK(model_to_json(model_from_json(model_to_json(m))) == model_to_json(m));

    nlohmann::json bad_val = j;
    bad_val["val"]["p"] = {"w0"};  // {w0} is not up-closed under w0<=w1
    try {
        model_from_json(bad_val);
        FAIL("expected MODEL_VAL_NOT_CLOSED");
    } catch (const Error& e) {
        CHECK(e.code == "MODEL_VAL_NOT_CLOSED");
    }
    CHECK_NOTHROW(model_from_json(bad_val, /*strict=*/false));

    nlohmann::json bad_ref = j;
    bad_ref["r"] = nlohmann::json::parse(R"([["w0","nope"]])");
    try {
        model_from_json(bad_ref);
        FAIL("expected MODEL_BAD_REF");
    } catch (const Error& e) {
        CHECK(e.code == "MODEL_BAD_REF");
    }

    // le arrives as generators; loader closes transitively
    auto gen_le = nlohmann::json::parse(
        R"({"worlds":["a","b","c"],"le":[["a","b"],["b","c"]],"r":[],"val":{}})");
    CHECK(model_from_json(gen_le).frame.le_holds(0, 2));
}

TEST_CASE("DOT export mentions every world and edge style") {
    Model m = chain_model();
    m.frame.r[0] = 0b10;
    std::string dot = model_to_dot(m);
    CHECK(dot.find("digraph") != std::string::npos);
    CHECK(dot.find("\"s\"") != std::string::npos);
    CHECK(dot.find("style=dashed") != std::string::npos);  // order edge
    CHECK(dot.find("n0 -> n1;") != std::string::npos);     // modal edge
}

TEST_CASE("cluster quotient preserves satisfaction and class") {
    FormulaGen gen(555);
    for (int i = 0; i < 80; ++i) {
        Model m = random_model(7000 + i, 1 + gen.below(5), FrameClass::all(), {"p", "q"});
        QuotientResult q = quotient_clusters(m);
        // antisymmetric result
        for (int a = 0; a < q.model.frame.size(); ++a)
            for (int b = 0; b < q.model.frame.size(); ++b)
                if (a != b)
                    CHECK_FALSE((q.model.frame.le_holds(a, b) && q.model.frame.le_holds(b, a)));
        for (int j = 0; j < 5; ++j) {
            Formula a = gen.formula(2 + gen.below(8));
            for (int w = 0; w < m.frame.size(); ++w)
                CHECK(satisfies(m, w, a) == satisfies(q.model, q.world_map[w], a));
        }
        for (auto c : {FrameClass::fc(), FrameClass::dc()})
            if (frame_class_check(m.frame, c).ok) CHECK(frame_class_check(q.model.frame, c).ok);
    }
}
