#include "fiklik/cli.hpp"

#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "fiklik/decide.hpp"
#include "fiklik/formula.hpp"
#include "fiklik/json_io.hpp"
#include "fiklik/kripke.hpp"
#include "fiklik/logic.hpp"
#include "fiklik/saturation.hpp"

namespace fiklik {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNoCountermodel = 1;
constexpr int kExitSyntax = 2;
constexpr int kExitModelFile = 3;
constexpr int kExitInternal = 4;

bool is_input_error(const std::string& code) {
    return code.rfind("MODEL_", 0) == 0 || code.rfind("BASE_MODEL_", 0) == 0 ||
           code == "FILE_IO" || code == "CERT_PARSE" || code == "CONFIG";
}

struct FormulaArgs {
    std::string text;
    std::string file;

    Formula get() const {
        if (!file.empty()) {
            std::ifstream in(file);
            if (!in) throw Error("FILE_IO", "cannot open '" + file + "'");
            std::stringstream ss;
            ss << in.rdbuf();
            return parse_formula(ss.str());
        }
        return parse_formula(text);
    }

    void attach(CLI::App* cmd, bool required = true) {
        auto* a = cmd->add_option("--formula", text, "formula text");
        auto* b = cmd->add_option("--formula-file", file, "file containing the formula");
        a->excludes(b);
        b->excludes(a);
        if (required) {
            // exactly one of the two
            cmd->callback([this, cmd] {
                if (cmd->count("--formula") + cmd->count("--formula-file") != 1)
                    throw CLI::RequiredError("--formula or --formula-file");
            });
        }
    }
};

LogicId parse_logic(const std::string& s) {
    auto l = logic_from_name(s);
    if (!l) throw Error("CONFIG", "unknown logic '" + s + "' (expected fik or lik)");
    return *l;
}

Semantics parse_semantics(const std::string& s) {
    auto v = semantics_from_name(s);
    if (!v) throw Error("CONFIG", "unknown semantics '" + s + "' (expected std, fs or w)");
    return *v;
}

std::string format_set(const FormulaSet& fs) {
    std::string out = "{";
    bool first = true;
    for (const Formula& f : fs) {
        if (!first) out += ", ";
        out += render(f);
        first = false;
    }
    return out + "}";
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error("FILE_IO", "cannot open '" + path + "' for writing");
    out << text;
}

void write_trace_file(const std::string& path, const std::vector<TraceRecord>& trace) {
    std::ostringstream ss;
    for (const auto& t : trace) ss << trace_record_to_json(t).dump() << '\n';
    write_text_file(path, ss.str());
}

int world_or_throw(const Model& m, const std::string& name) {
    int w = m.frame.world_index(name);
    if (w < 0) throw Error("MODEL_BAD_REF", "unknown world '" + name + "'");
    return w;
}

void print_report(std::ostream& out, const ValidationReport& rep) {
    out << "coherent: " << (rep.coherent ? "yes" : "NO") << "\n"
        << "regular: " << (rep.regular ? "yes" : "NO") << "\n"
        << "clean: " << (rep.clean ? "yes" : "NO") << "\n"
        << "frame class: " << (rep.frame_class_ok ? "ok" : "VIOLATED") << "\n"
        << "truth lemma: " << (rep.truth_lemma_ok ? "ok" : "VIOLATED") << "\n";
    for (const auto& v : rep.violations) out << "  [" << v.stage << "] " << v.detail << "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"fiklik: countermodel search and saturation for the intuitionistic modal "
                 "logics FIK and LIK"};
    app.require_subcommand(1);

    // parse ------------------------------------------------------------
    auto* cmd_parse = app.add_subcommand("parse", "parse a formula and print it back");
    FormulaArgs parse_args;
    parse_args.attach(cmd_parse);

    // closure ----------------------------------------------------------
    auto* cmd_closure = app.add_subcommand("closure", "print the closure strata of a formula");
    FormulaArgs closure_args;
    closure_args.attach(cmd_closure);

    // check ------------------------------------------------------------
    auto* cmd_check = app.add_subcommand("check", "evaluate a formula at a world of a model");
    FormulaArgs check_args;
    check_args.attach(cmd_check);
    std::string check_model, check_world, check_sem = "std";
    cmd_check->add_option("--model", check_model, "model file")->required();
    cmd_check->add_option("--world", check_world, "world name")->required();
    cmd_check->add_option("--semantics", check_sem, "std | fs | w");

    // valid ------------------------------------------------------------
    auto* cmd_valid = app.add_subcommand("valid", "check validity of a formula in a frame");
    FormulaArgs valid_args;
    valid_args.attach(cmd_valid);
    std::string valid_frame;
    cmd_valid->add_option("--frame", valid_frame, "frame file (model file, val ignored)")
        ->required();

    // enumerate ----------------------------------------------------------
    auto* cmd_enum = app.add_subcommand("enumerate", "count (and export) frames per size");
    int enum_max = 2;
    std::string enum_class = "all", enum_logic, enum_out;
    cmd_enum->add_option("--max-size", enum_max, "largest frame size");
    cmd_enum->add_option("--class", enum_class, "frame class: all, fc, dc, fdc, fuc, ...");
    cmd_enum->add_option("--logic", enum_logic, "shorthand: fik -> fc, lik -> fdc");
    cmd_enum->add_option("--out", enum_out, "write frames as JSON lines");

    // saturate -----------------------------------------------------------
    auto* cmd_sat = app.add_subcommand("saturate", "saturate a falsifying base model");
    FormulaArgs sat_args;
    sat_args.attach(cmd_sat);
    std::string sat_model, sat_world, sat_logic = "fik", sat_out, sat_trace, sat_dot;
    std::uint64_t sat_fuel = 0;
    cmd_sat->add_option("--model", sat_model, "base model file")->required();
    cmd_sat->add_option("--world", sat_world, "world falsifying the formula")->required();
    cmd_sat->add_option("--logic", sat_logic, "fik | lik");
    cmd_sat->add_option("--fuel", sat_fuel, "repair budget (0: default)");
    cmd_sat->add_option("--out", sat_out, "write the saturated model (JSON)");
    cmd_sat->add_option("--trace", sat_trace, "write the repair trace (JSON lines)");
    cmd_sat->add_option("--dot", sat_dot, "write the saturated model (DOT)");

    // decide -------------------------------------------------------------
    auto* cmd_decide = app.add_subcommand("decide", "bounded countermodel search");
    FormulaArgs decide_args;
    decide_args.attach(cmd_decide);
    std::string dec_logic = "fik", dec_out, dec_trace, dec_dot, dec_sem = "std";
    int dec_max = 3, dec_jobs = 1;
    std::uint64_t dec_fuel = 0;
    bool dec_saturate = false;
    cmd_decide->add_option("--logic", dec_logic, "fik | lik");
    cmd_decide->add_option("--max-size", dec_max, "largest frame size to search");
    cmd_decide->add_option("--semantics", dec_sem, "std | fs | w");
    cmd_decide->add_flag("--saturate", dec_saturate, "upgrade the countermodel by saturation");
    cmd_decide->add_option("--fuel", dec_fuel, "saturation repair budget (0: default)");
    cmd_decide->add_option("--jobs", dec_jobs, "parallel workers for the frame scan");
    cmd_decide->add_option("--out", dec_out, "write the certificate (JSON)");
    cmd_decide->add_option("--trace", dec_trace, "write the saturation trace (JSON lines)");
    cmd_decide->add_option("--dot", dec_dot, "write the countermodel (DOT)");

    // verify -------------------------------------------------------------
    auto* cmd_verify = app.add_subcommand("verify", "re-check a certificate file");
    std::string verify_cert;
    cmd_verify->add_option("--cert", verify_cert, "certificate file")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            out << app.help();
            return kExitOk;
        }
        err << "error: " << e.what() << "\n";
        return e.get_exit_code();
    }

    try {
        if (cmd_parse->parsed()) {
            out << render(parse_args.get()) << "\n";
            return kExitOk;
        }

        if (cmd_closure->parsed()) {
            Formula a = closure_args.get();
            FormulaSet cur = closure_of(a).members;
            int k = 0;
            while (true) {
                out << "Sigma^" << k << " = " << format_set(cur) << "\n";
                if (cur.empty()) break;
                cur = modal_step(cur);
                ++k;
            }
            return kExitOk;
        }

        if (cmd_check->parsed()) {
            Model m = load_model_file(check_model);
            int w = world_or_throw(m, check_world);
            bool v = satisfies(m, w, check_args.get(), parse_semantics(check_sem));
            out << (v ? "true" : "false") << "\n";
            return kExitOk;
        }

        if (cmd_valid->parsed()) {
            Frame f = load_frame_file(valid_frame);
            ValidityResult res = valid_in_frame(f, valid_args.get());
            if (res.valid) {
                out << "valid\n";
            } else {
                nlohmann::json cv = nlohmann::json::object();
                for (const auto& [p, mask] : *res.countervaluation) {
                    nlohmann::json ws = nlohmann::json::array();
                    for (int i = 0; i < f.size(); ++i)
                        if (has(mask, i)) ws.push_back(f.world_names[i]);
                    cv[p] = std::move(ws);
                }
                out << "invalid at " << f.world_names[*res.world] << " with " << cv.dump()
                    << "\n";
            }
            return kExitOk;
        }

        if (cmd_enum->parsed()) {
            FrameClass cls = FrameClass::all();
            if (!enum_logic.empty())
                cls = frame_class_of(parse_logic(enum_logic));
            else if (auto c = FrameClass::from_name(enum_class))
                cls = *c;
            else
                throw Error("CONFIG", "unknown frame class '" + enum_class + "'");
            std::ofstream sink;
            if (!enum_out.empty()) {
                sink.open(enum_out);
                if (!sink) throw Error("FILE_IO", "cannot open '" + enum_out + "' for writing");
            }
            for (int n = 1; n <= enum_max; ++n) {
                FrameEnumerator frames(n, cls);
                std::uint64_t count = 0;
                while (auto f = frames.next()) {
                    ++count;
                    if (sink.is_open()) sink << model_to_json(Model{*f, {}}).dump() << '\n';
                }
                out << "size " << n << " class " << cls.name() << ": " << count << " frames\n";
            }
            return kExitOk;
        }

        if (cmd_sat->parsed()) {
            Model m = load_model_file(sat_model);
            int w = world_or_throw(m, sat_world);
            Formula a = sat_args.get();
            LogicId l = parse_logic(sat_logic);
            SaturationResult sr = saturate(m, w, a, l, {sat_fuel});
            Model extracted = extract_saturated_model(sr.clip);
            ValidationReport rep = verify_truth_lemma(sr.clip, extracted);
            out << "tips: " << sr.clip.tips.size() << "\n"
                << "repairs: " << sr.repairs << "\n";
            print_report(out, rep);
            if (!sat_out.empty()) {
                std::vector<TipProvenance> tips;
                for (const Tip& t : sr.clip.tips)
                    tips.push_back({t.name, sr.clip.base.frame.world_names[t.world], t.rank,
                                    t.height});
                save_json_file(sat_out, saturated_model_to_json(extracted, tips));
            }
            if (!sat_trace.empty()) write_trace_file(sat_trace, sr.trace);
            if (!sat_dot.empty()) write_text_file(sat_dot, model_to_dot(extracted));
            return rep.all_ok() ? kExitOk : kExitInternal;
        }

        if (cmd_decide->parsed()) {
            Formula a = decide_args.get();
            LogicId l = parse_logic(dec_logic);
            SearchConfig cfg;
            cfg.max_frame_size = dec_max;
            cfg.semantics = parse_semantics(dec_sem);
            cfg.run_saturation = dec_saturate;
            cfg.fuel = dec_fuel;
            cfg.jobs = dec_jobs;
            Certificate cert = decide(a, l, cfg);
            cert.trace_path = dec_trace;

            out << "verdict: " << verdict_name(cert.verdict) << "\n"
                << "formula: " << render(cert.formula) << "\n"
                << "logic: " << logic_name(cert.logic) << "\n"
                << "bound: " << cert.bound << "\n";
            if (cert.verdict == Verdict::NonTheorem) {
                out << "countermodel: " << cert.model->frame.size() << " worlds, falsified at "
                    << cert.model->frame.world_names[cert.world] << "\n";
                if (cert.saturated)
                    out << "saturated: " << cert.saturated->frame.size() << " tips, validation "
                        << (cert.report && cert.report->all_ok() ? "ok" : "FAILED") << "\n";
                if (cert.saturation_failed)
                    out << "saturation failed: " << cert.saturation_diagnostic << "\n";
            }
            if (!dec_out.empty()) save_json_file(dec_out, certificate_to_json(cert));
            if (!dec_trace.empty()) write_trace_file(dec_trace, cert.trace);
            if (!dec_dot.empty() && cert.model) write_text_file(dec_dot, model_to_dot(*cert.model));
            return cert.verdict == Verdict::NonTheorem ? kExitOk : kExitNoCountermodel;
        }

        if (cmd_verify->parsed()) {
            Certificate cert = certificate_from_json(load_json_file(verify_cert));
            bool ok = verify_certificate(cert);
            out << (ok ? "certificate ok" : "certificate INVALID") << "\n";
            return ok ? kExitOk : kExitInternal;
        }
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitSyntax;
    } catch (const Error& e) {
        err << "error [" << e.code << "]: " << e.what() << "\n";
        return is_input_error(e.code) ? kExitModelFile : kExitInternal;
    }
    err << "error: no subcommand\n";
    return kExitInternal;
}

}  // namespace fiklik
