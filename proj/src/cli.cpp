#include "etrnn/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <set>
#include <iostream>
#include <sstream>

#include "etrnn/json_io.hpp"
#include "etrnn/log.hpp"
#include "etrnn/parser.hpp"
#include "etrnn/polynomial.hpp"
#include "etrnn/solve.hpp"

namespace etrnn {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw Error(Errc::io, "cannot read " + path);
    return ss.str();
}

// Empty path means stdout.
void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::io, "cannot open " + path + " for writing");
    out << content;
    out.flush();
    if (!out) throw Error(Errc::io, "cannot write " + path);
}

Json parse_json(const std::string& text, const std::string& path) {
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded()) throw Error(Errc::io, path + ": not valid JSON");
    return j;
}

const Signature& sig() {
    static Signature s = Signature::builtins();
    return s;
}

// Restores the normalize sidecar (schedule plus source variables) onto a
// system parsed from the text format, which carries neither.
void attach_schedule(ConstraintSystem& system, const std::string& path) {
    if (path.empty()) {
        system.source_variables = system.variables;
        return;
    }
    Json j = parse_json(read_file(path), path);
    system.schedule = schedule_from_json(j.at("schedule"));
    system.source_variables = j.value("source_variables", std::vector<std::string>{});
    std::vector<std::string> vars = j.value("variables", std::vector<std::string>{});
    if (!vars.empty()) {
        // The text format orders variables by first occurrence, which may
        // differ from the normalize-time order; only the sets must agree.
        std::set<std::string> a(vars.begin(), vars.end());
        std::set<std::string> b(system.variables.begin(), system.variables.end());
        if (a != b)
            throw Error(Errc::io, path + ": schedule sidecar variables do not match the system");
    }
}

int verdict_code(Verdict v) {
    switch (v) {
        case Verdict::certified_true: return 0;
        case Verdict::certified_false: return 1;
        case Verdict::unknown: return 2;
    }
    throw Error(Errc::internal, "bad verdict");
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::certified_true: return "CertifiedTrue";
        case Verdict::certified_false: return "CertifiedFalse";
        case Verdict::unknown: return "Unknown";
    }
    throw Error(Errc::internal, "bad verdict");
}

int run(int argc, char** argv) {
    CLI::App app{"compiler and solver for strict real arithmetic with unary activations"};
    app.require_subcommand(1);

    std::string in_path, out_path, sidecar_path, schedule_path;
    std::string instance_path, weights_path, assignment_path;
    std::string mode = "exact", direction;
    int depth = 30;
    long budget_index = 100000;
    double wall = 0;
    bool no_corrections = false;
    int datapoint = 0;

    CLI::App* cparse = app.add_subcommand("parse", "parse a formula and dump its shape");
    cparse->add_option("file", in_path)->required();
    cparse->add_option("-o,--output", out_path);

    CLI::App* cnorm = app.add_subcommand("normalize", "lower a formula to flat constraints");
    cnorm->add_option("file", in_path)->required();
    cnorm->add_option("-o,--output", out_path);
    cnorm->add_option("--schedule", schedule_path, "write the witness schedule sidecar");

    CLI::App* cfeas = app.add_subcommand("feas4", "emit the degree-4 root-finding polynomial");
    cfeas->add_option("file", in_path)->required();
    cfeas->add_option("-o,--output", out_path);

    CLI::App* ccomp = app.add_subcommand("compile", "compile flat constraints to an instance");
    ccomp->add_option("file", in_path)->required();
    ccomp->add_option("-o,--output", out_path);
    ccomp->add_option("--schedule", schedule_path, "normalize sidecar to carry along");
    ccomp->add_option("--sidecar", sidecar_path, "write the gadget sidecar");
    ccomp->add_flag("--no-corrections", no_corrections, "drop the correction gadgets");

    CLI::App* cwit = app.add_subcommand("witness", "map assignments to weights or back");
    cwit->add_option("--dir", direction)->required()->check(CLI::IsMember({"forward", "backward"}));
    cwit->add_option("--instance", instance_path)->required();
    cwit->add_option("--sidecar", sidecar_path)->required();
    cwit->add_option("--assignment", assignment_path, "variable values (forward)");
    cwit->add_option("--weights", weights_path, "weight document (backward)");
    cwit->add_option("-o,--output", out_path);

    CLI::App* cver = app.add_subcommand("verify", "check a weight assignment");
    cver->add_option("--instance", instance_path)->required();
    cver->add_option("--weights", weights_path)->required();
    cver->add_option("--mode", mode)->check(CLI::IsMember({"exact", "interval"}));
    cver->add_option("--depth", depth);

    CLI::App* ceval = app.add_subcommand("eval", "per-neuron values at one data point");
    ceval->add_option("--instance", instance_path)->required();
    ceval->add_option("--weights", weights_path)->required();
    ceval->add_option("--datapoint", datapoint);
    ceval->add_option("-o,--output", out_path);

    CLI::App* csolve = app.add_subcommand("solve", "search for a certified witness box");
    csolve->add_option("file", in_path)->required();
    csolve->add_option("--budget", budget_index, "point indices to try");
    csolve->add_option("--depth", depth, "maximum enclosure depth");
    csolve->add_option("--wall", wall, "wall-clock limit in seconds");
    csolve->add_option("-o,--output", out_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 3;
    }

    if (cparse->parsed()) {
        Formula f = parse_formula(read_file(in_path), sig());
        Json out{{"bound", bound_variables(f)},
                 {"formula", render(f)},
                 {"free", free_variables(f)},
                 {"strict", is_strict_fragment(f)}};
        write_output(out_path, canonical_dump(out));
        return 0;
    }

    if (cnorm->parsed()) {
        Formula f = parse_formula(read_file(in_path), sig());
        ConstraintSystem s = normalize(f, sig());
        write_output(out_path, to_text(s));
        if (!schedule_path.empty()) {
            Json side{{"schedule", schedule_to_json(s.schedule)},
                      {"source_variables", s.source_variables},
                      {"variables", s.variables}};
            write_output(schedule_path, canonical_dump(side));
        }
        return 0;
    }

    if (cfeas->parsed()) {
        Formula f = parse_formula(read_file(in_path), sig());
        Feas4 feas = build_4feas_pipeline(f, sig());
        write_output(out_path, render(feas.poly) + "\n");
        return 0;
    }

    if (ccomp->parsed()) {
        std::string text = read_file(in_path);
        ConstraintSystem s = system_from_text(text, sig());
        attach_schedule(s, schedule_path);
        ConstraintSystem pre = preprocess(s);
        CompileOptions opts;
        opts.corrections = !no_corrections;
        CompiledInstance ci = compile_system(pre, opts);
        Json inst = instance_to_json(ci.instance, make_meta(ci.instance, fnv1a64_hex(text)));
        write_output(out_path, canonical_dump(inst));
        if (!sidecar_path.empty()) {
            Sidecar sc{ci.index, pre.schedule, pre.source_variables};
            write_output(sidecar_path, canonical_dump(sidecar_to_json(sc)));
        }
        return 0;
    }

    if (cwit->parsed()) {
        InstanceDocument doc =
            instance_from_json(parse_json(read_file(instance_path), instance_path), sig());
        Sidecar sc = sidecar_from_json(parse_json(read_file(sidecar_path), sidecar_path));
        CompiledInstance ci{std::move(doc.instance), std::move(sc.index)};
        if (direction == "forward") {
            if (assignment_path.empty())
                throw Error(Errc::io, "witness --dir forward needs --assignment");
            auto base = assignment_from_json(
                parse_json(read_file(assignment_path), assignment_path));
            Extension ext = extend_witness(sc.schedule, base, sig());
            if (!ext.complete()) {
                std::string who;
                for (const std::string& v : ext.inexact) who += " " + v;
                for (const std::string& v : ext.failed) who += " " + v;
                throw Error(Errc::eval, "witness extension is not exact for:" + who);
            }
            WeightAssignment wb = witness_forward(ci, ext.values);
            write_output(out_path, canonical_dump(weights_to_json(wb)));
        } else {
            if (weights_path.empty())
                throw Error(Errc::io, "witness --dir backward needs --weights");
            WeightAssignment wb =
                weights_from_json(parse_json(read_file(weights_path), weights_path));
            auto values = witness_backward(ci, wb, sig());
            write_output(out_path, canonical_dump(assignment_to_json(values)));
        }
        return 0;
    }

    if (cver->parsed()) {
        InstanceDocument doc =
            instance_from_json(parse_json(read_file(instance_path), instance_path), sig());
        WeightAssignment wb =
            weights_from_json(parse_json(read_file(weights_path), weights_path));
        Verdict v = verify(doc.instance, wb, sig(),
                           mode == "exact" ? EvalMode::exact : EvalMode::interval, depth);
        std::cout << verdict_name(v) << "\n";
        return verdict_code(v);
    }

    if (ceval->parsed()) {
        InstanceDocument doc =
            instance_from_json(parse_json(read_file(instance_path), instance_path), sig());
        WeightAssignment wb =
            weights_from_json(parse_json(read_file(weights_path), weights_path));
        if (datapoint < 0 || size_t(datapoint) >= doc.instance.data.size())
            throw Error(Errc::instance, "data point index out of range");
        auto values = neural_eval_exact(doc.instance.arch, wb,
                                        doc.instance.data[size_t(datapoint)], sig());
        write_output(out_path, canonical_dump(assignment_to_json(values)));
        return 0;
    }

    // solve
    Formula f = parse_formula(read_file(in_path), sig());
    Budget budget;
    budget.max_index = budget_index;
    budget.max_depth = depth;
    if (wall > 0) budget.wall_seconds = wall;
    auto w = solve(f, sig(), budget);
    if (!w) {
        write_output(out_path, canonical_dump(Json{{"status", "Unknown"}}));
        return 2;
    }
    Json out{{"box", box_to_json(w->box)}, {"depth", w->depth}, {"status", "Sat"}};
    write_output(out_path, canonical_dump(out));
    return 0;
}

} // namespace

int cli_main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const Error& e) {
        const char* kind = "";
        int rc = 6;
        switch (e.code()) {
            case Errc::parse: kind = "syntax"; rc = 3; break;
            case Errc::symbol:
            case Errc::unsupported:
            case Errc::domain:
            case Errc::eval:
            case Errc::instance: kind = "semantic"; rc = 4; break;
            case Errc::io: kind = "document"; rc = 5; break;
            case Errc::internal: kind = "internal"; rc = 6; break;
        }
        std::cerr << "error (" << kind << "): " << e.what() << "\n";
        return rc;
    } catch (const std::exception& e) {
        std::cerr << "error (internal): " << e.what() << "\n";
        return 6;
    }
}

} // namespace etrnn
