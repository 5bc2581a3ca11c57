// End-to-end checks of the cncc binary: exit codes and output shapes for
// every subcommand. Exit status is the number of failed checks.

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
    std::printf("%s  %s\n", ok ? "ok  " : "FAIL", what.c_str());
    if (!ok) ++failures;
}

int run_cmd(const std::string& args) {
    std::string cmd = std::string(CNCC_BIN) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream os(p, std::ios::binary);
    os << text;
}

}  // namespace

int main() {
    const fs::path dir = fs::temp_directory_path() / "cncc_cli_smoke";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string learning = std::string(CHAM_ASSET_DIR) + "/cncc_learning.cham";
    const std::string recognition = std::string(CHAM_ASSET_DIR) + "/cncc_recognition.cham";

    // parse: canonical rendering, stable under re-parsing.
    fs::path rendered = dir / "rendered.cham";
    check(run_cmd("parse --input " + learning + " --output " + rendered.string()) == 0, "parse exits 0");
    check(slurp(rendered) == slurp(learning), "parse output is the canonical rendering");

    fs::path broken = dir / "broken.cham";
    write(broken, "rule R: i(\n");
    check(run_cmd("parse --input " + broken.string()) == 1, "parse exits 1 on a syntax error");
    check(run_cmd("parse --input " + (dir / "missing.cham").string()) == 2, "parse exits 2 on a missing file");

    // check: closed program vs a program with TS_DL deleted.
    fs::path report = dir / "closure.json";
    check(run_cmd("check --input " + learning + " --output " + report.string()) == 0, "check exits 0 when closed");
    {
        auto doc = nlohmann::ordered_json::parse(slurp(report));
        check(doc["unboundInputs"].empty(), "closure report has no unbound inputs");
        check(doc["externalsUsed"].size() == 7, "closure report lists the seven externals");
    }
    {
        // Delete the TS_DL rule block from the shipped source.
        std::string text = slurp(learning);
        auto start = text.find("rule TS_DL:");
        auto stop = text.find("rule TS_EL:");
        text.erase(start, stop - start);
        fs::path gap = dir / "no_dl.cham";
        write(gap, text);
        check(run_cmd("check --input " + gap.string() + " --output " + report.string()) == 3,
              "check exits 3 with TS_DL deleted");
        auto doc = nlohmann::ordered_json::parse(slurp(report));
        bool foundFa = false;
        for (const auto& v : doc["unboundInputs"]) foundFa = foundFa || v["symbol"] == "Fa";
        check(foundFa, "closure report names the unbound Fa consumer");
    }

    // run: full trace, truncation, determinism.
    fs::path trace = dir / "trace.json";
    check(run_cmd("run --input " + learning + " --output " + trace.string()) == 0, "run exits 0");
    {
        auto doc = nlohmann::ordered_json::parse(slurp(trace));
        check(doc["steps"].size() == 6, "learning trace has 6 steps");
        check(doc["truncated"] == false, "learning trace is not truncated");
    }
    check(run_cmd("run --input " + recognition + " --output " + trace.string()) == 0, "run recognition exits 0");
    check(nlohmann::ordered_json::parse(slurp(trace))["steps"].size() == 4, "recognition trace has 4 steps");
    check(run_cmd("run --input " + learning + " --max-steps 2") == 4, "run exits 4 when truncated");
    check(run_cmd("run --input " + learning + " --scheduler bogus") != 0, "unknown scheduler is rejected");

    fs::path t1 = dir / "t1.json", t2 = dir / "t2.json";
    run_cmd("run --input " + learning + " --scheduler random --seed 9 --output " + t1.string());
    run_cmd("run --input " + learning + " --scheduler random --seed 9 --output " + t2.string());
    check(slurp(t1) == slurp(t2), "run output is deterministic for a fixed seed");

    // explore: verdicts and the bound.
    fs::path graph = dir / "graph.json";
    check(run_cmd("explore --input " + learning + " --output " + graph.string()) == 0, "explore exits 0");
    {
        auto doc = nlohmann::ordered_json::parse(slurp(graph));
        check(doc["states"] == 7, "learning graph has 7 states");
        check(doc["confluence"]["verdict"] == "confluent", "learning graph is confluent");
        check(doc["termination"]["verdict"] == "terminating", "learning graph terminates");
        check(doc["dot"].get<std::string>().find("digraph") == 0, "explore emits DOT output");
    }
    check(run_cmd("explore --input " + learning + " --bound 1 --output " + graph.string()) == 5,
          "explore exits 5 when the bound is exceeded");
    {
        auto doc = nlohmann::ordered_json::parse(slurp(graph));
        check(doc["confluence"]["verdict"] == "unknown", "bounded exploration reports unknown verdicts");
    }
    {
        fs::path cycle = dir / "cycle.cham";
        write(cycle,
              "data a: set; data b: set;\n"
              "solution S { i(a); }\n"
              "rule R1: S { i(a) } => S { i(b) };\n"
              "rule R2: S { i(b) } => S { i(a) };\n");
        run_cmd("explore --input " + cycle.string() + " --output " + graph.string());
        auto doc = nlohmann::ordered_json::parse(slurp(graph));
        check(doc["termination"]["verdict"] == "cycle", "cycle fixture reports a cycle verdict");
        check(!doc["termination"]["witness"].empty(), "cycle verdict carries a witness");
    }

    // pipeline: metrics shape and determinism.
    fs::path m1 = dir / "m1.json", m2 = dir / "m2.json";
    check(run_cmd("pipeline --samples 40 --iterations 2 --seed 5 --output " + m1.string()) == 0, "pipeline exits 0");
    {
        auto doc = nlohmann::ordered_json::parse(slurp(m1));
        check(doc["iterations"].size() == 2, "pipeline reports one error entry per iteration");
        check(doc["trace"].size() == 2, "pipeline reports one trace per iteration");
    }
    run_cmd("pipeline --samples 40 --iterations 2 --seed 5 --output " + m2.string());
    check(slurp(m1) == slurp(m2), "pipeline metrics are byte-identical across runs");
    check(run_cmd("pipeline --iterations 0") != 0, "pipeline rejects a non-positive iteration count");

    fs::remove_all(dir);
    return failures;
}
