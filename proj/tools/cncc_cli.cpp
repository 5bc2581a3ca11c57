// Command-line front end: parse, check, run, and explore CHAM programs, and
// drive the synthetic cross-modal pipeline.
//
// Exit codes: 0 ok, 1 parse error, 2 i/o error, 3 closure violation,
// 4 truncated run, 5 state bound exceeded, 6 stage failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cham/cncc.hpp"
#include "cham/engine.hpp"
#include "cham/parser.hpp"
#include "cham/pipeline.hpp"
#include "cham/stages.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitIo = 2;
constexpr int kExitClosure = 3;
constexpr int kExitTruncated = 4;
constexpr int kExitBound = 5;
constexpr int kExitStage = 6;

struct Options {
    std::string input;
    std::string output;
    std::string scheduler = "lex";
    std::uint64_t seed = 1;
    int maxSteps = 1000;
    int bound = 64;
    int iterations = 5;
    int samples = 200;
    int classes = 2;
    double noise = 0.1;
};

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::ios_base::failure("cannot open " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_output(const Options& opt, const std::string& text) {
    if (opt.output.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(opt.output, std::ios::binary);
    if (!os) throw std::ios_base::failure("cannot open " + opt.output);
    os << text;
}

cham::ChamProgram load_program(const Options& opt) {
    return cham::parse_program(read_file(opt.input));
}

cham::SchedulerPolicy scheduler_from_name(const std::string& name) {
    if (name == "lex") return cham::SchedulerPolicy::Lexicographic;
    if (name == "fifo") return cham::SchedulerPolicy::Fifo;
    if (name == "random") return cham::SchedulerPolicy::Random;
    throw CLI::ValidationError("--scheduler", "unknown scheduler '" + name + "'");
}

int cmd_parse(const Options& opt) {
    cham::ChamProgram p = load_program(opt);
    write_output(opt, cham::render_program(p));
    return kExitOk;
}

int cmd_check(const Options& opt) {
    cham::ChamProgram p = load_program(opt);
    cham::ClosureReport report = cham::dataflow_closure_check(p);
    nlohmann::ordered_json doc;
    doc["unboundInputs"] = nlohmann::ordered_json::array();
    for (const auto& [rule, sym] : report.unboundInputs) doc["unboundInputs"].push_back({{"rule", rule}, {"symbol", sym}});
    doc["unusedOutputs"] = nlohmann::ordered_json::array();
    for (const auto& [rule, sym] : report.unusedOutputs) doc["unusedOutputs"].push_back({{"rule", rule}, {"symbol", sym}});
    doc["externalsUsed"] = report.externalsUsed;
    write_output(opt, doc.dump(2) + "\n");
    return report.unboundInputs.empty() ? kExitOk : kExitClosure;
}

int cmd_run(const Options& opt) {
    cham::ChamProgram p = load_program(opt);
    cham::SchedulerPolicy policy = scheduler_from_name(opt.scheduler);
    cham::Trace trace = cham::run(p, p.initial, policy, opt.maxSteps, opt.seed);
    write_output(opt, cham::trace_to_json(trace, opt.input, policy, opt.seed).dump(2) + "\n");
    return trace.truncated ? kExitTruncated : kExitOk;
}

int cmd_explore(const Options& opt) {
    cham::ChamProgram p = load_program(opt);
    cham::StateGraph g = cham::explore(p, p.initial, opt.bound);
    cham::ConfluenceResult conf = cham::check_confluence(g);
    cham::TerminationResult term = cham::check_termination(g);
    nlohmann::ordered_json doc;
    doc["states"] = g.stateKeys.size();
    doc["edges"] = g.edges.size();
    doc["terminals"] = g.terminals;
    doc["complete"] = g.complete;
    switch (conf.verdict) {
        case cham::ConfluenceVerdict::Confluent: doc["confluence"] = {{"verdict", "confluent"}}; break;
        case cham::ConfluenceVerdict::NonConfluent:
            doc["confluence"] = {{"verdict", "non-confluent"},
                                 {"witness", {conf.witness.first, conf.witness.second}}};
            break;
        case cham::ConfluenceVerdict::Unknown: doc["confluence"] = {{"verdict", "unknown"}}; break;
    }
    switch (term.verdict) {
        case cham::TerminationVerdict::Terminating: doc["termination"] = {{"verdict", "terminating"}}; break;
        case cham::TerminationVerdict::Cycle:
            doc["termination"] = {{"verdict", "cycle"}, {"witness", term.cycleWitness}};
            break;
        case cham::TerminationVerdict::Unknown: doc["termination"] = {{"verdict", "unknown"}}; break;
    }
    doc["dot"] = cham::to_dot(g);
    write_output(opt, doc.dump(2) + "\n");
    return g.complete ? kExitOk : kExitBound;
}

int cmd_pipeline(const Options& opt) {
    cham::pipeline::PipelineConfig cfg;
    cfg.iterations = opt.iterations;
    cfg.samples = opt.samples;
    cfg.classes = opt.classes;
    cfg.noise = opt.noise;
    auto dataset = cham::stages::gen_synthetic_dataset(opt.seed, cfg.samples, cfg.classes, cfg.noise);
    cham::pipeline::PipelineMetrics metrics = cham::pipeline::run_pipeline(dataset, cfg.iterations, cfg, opt.seed);
    write_output(opt, cham::pipeline::metrics_to_json(metrics, cfg, opt.seed).dump(2) + "\n");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chemical abstract machine engine for the cross-modal cognitive pipeline"};
    app.require_subcommand(1);
    Options opt;

    auto addCommon = [&opt](CLI::App* sub, bool needsInput) {
        auto* in = sub->add_option("--input", opt.input, "input .cham file");
        if (needsInput) in->required();
        sub->add_option("--output", opt.output, "output file (default: stdout)");
        return sub;
    };
    auto* parseCmd = addCommon(app.add_subcommand("parse", "parse and print the canonical rendering"), true);
    auto* checkCmd = addCommon(app.add_subcommand("check", "dataflow closure report"), true);
    auto* runCmd = addCommon(app.add_subcommand("run", "execute the program and emit a trace"), true);
    runCmd->add_option("--scheduler", opt.scheduler, "lex|fifo|random")->default_str("lex");
    runCmd->add_option("--seed", opt.seed, "scheduler seed");
    runCmd->add_option("--max-steps", opt.maxSteps, "step budget");
    auto* exploreCmd = addCommon(app.add_subcommand("explore", "state-space exploration and verdicts"), true);
    exploreCmd->add_option("--bound", opt.bound, "distinct-state budget");
    auto* pipelineCmd = addCommon(app.add_subcommand("pipeline", "synthetic cross-modal pipeline"), false);
    pipelineCmd->add_option("--seed", opt.seed, "master seed");
    pipelineCmd->add_option("--iterations", opt.iterations, "learning iterations")->check(CLI::PositiveNumber);
    pipelineCmd->add_option("--samples", opt.samples, "dataset size")->check(CLI::PositiveNumber);
    pipelineCmd->add_option("--classes", opt.classes, "class count")->check(CLI::PositiveNumber);
    pipelineCmd->add_option("--noise", opt.noise, "noise standard deviation")->check(CLI::NonNegativeNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (parseCmd->parsed()) return cmd_parse(opt);
        if (checkCmd->parsed()) return cmd_check(opt);
        if (runCmd->parsed()) return cmd_run(opt);
        if (exploreCmd->parsed()) return cmd_explore(opt);
        if (pipelineCmd->parsed()) return cmd_pipeline(opt);
    } catch (const cham::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const cham::pipeline::PipelineError& e) {
        std::cerr << "stage failure: " << e.what() << "\n";
        return kExitStage;
    } catch (const cham::stages::StageError& e) {
        std::cerr << "stage failure: " << e.what() << "\n";
        return kExitStage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}
