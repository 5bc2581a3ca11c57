#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "cham/engine.hpp"
#include "cham/parser.hpp"
#include "cham/program.hpp"
#include "cham/term.hpp"

// The built-in cross-modal cognitive programs: six reaction rules over the
// token alphabet of Table 1, in a learning variant (all six stages) and a
// recognition variant (perception/decision stages only, with the feedback
// stages already reacted). Plus the static analyses: dataflow closure and
// dependency ordering.

namespace cham {

struct CyclicDependency : std::runtime_error {
    std::vector<std::string> witness;
    explicit CyclicDependency(std::vector<std::string> w)
        : std::runtime_error("cyclic rule dependency"), witness(std::move(w)) {}
};

namespace cncc_detail {

inline Molecule parse_atoms(const ChamProgram& ctx, const std::string& text) { return parse_molecule(text, ctx); }

// An SS molecule reacts into its SM form: the processing element moves to
// the head of the chain, everything else keeps its order.
inline Molecule reacted_form(const Molecule& m) {
    Molecule out;
    for (const Atom& a : m)
        if (a.tag == Atom::Tag::Proc) out.push_back(a);
    for (const Atom& a : m)
        if (a.tag != Atom::Tag::Proc) out.push_back(a);
    return out;
}

inline ChamProgram declarations_only() {
    ChamProgram p;
    auto data = [&p](const std::string& name, SymbolKind kind) { p.dataDecls[name] = kind; };
    data("MM", SymbolKind::Set);
    data("Mi", SymbolKind::Matrix);
    data("Sa", SymbolKind::Matrix);
    data("Sv", SymbolKind::Matrix);
    data("Fa", SymbolKind::Matrix);
    data("Fv", SymbolKind::Matrix);
    data("Ma", SymbolKind::Matrix);
    data("Mv", SymbolKind::Matrix);
    data("Mt", SymbolKind::Vector);
    data("Ms", SymbolKind::Vector);
    data("Mp", SymbolKind::Vector);
    data("Mn", SymbolKind::Vector);
    data("Ct", SymbolKind::Vector);
    data("Cs", SymbolKind::Vector);
    data("Cp", SymbolKind::Set);
    data("Es", SymbolKind::Parameter);
    data("Ei", SymbolKind::Parameter);
    for (Hormone h : all_hormones()) p.hormoneDecls.insert(h);
    // Feedback tokens are seeded with neutral defaults on the first
    // iteration, so the loop can start at the saliency stage.
    p.externals = {"Mi", "Mn", "Es", "Ma", "Mv", "Mt", "Ms"};
    return p;
}

struct StageParts {
    std::string ssName, smName;
    std::vector<Molecule> ss, sm;
};

inline std::map<std::string, StageParts> stage_parts(const ChamProgram& ctx) {
    auto mol = [&ctx](const std::string& text) { return parse_atoms(ctx, text); };
    std::map<std::string, StageParts> parts;
    auto add = [&parts](const std::string& stage, std::vector<Molecule> ss) {
        StageParts sp;
        sp.ssName = "SS_" + stage;
        sp.smName = "SM_" + stage;
        sp.ss = std::move(ss);
        for (const Molecule& m : sp.ss) sp.sm.push_back(reacted_form(m));
        parts[stage] = std::move(sp);
    };
    add("SC", {mol("i(Mi) <> i(Mn) <> i(Es) <> g(EH_SC) <> SC <> o(Sa) <> o(Sv) <> d(EH_SC)")});
    add("DL", {mol("i(Sa) <> i(Ma) <> g(EH_DL) <> DL <> o(Fa)"),
               mol("i(Sv) <> i(Mv) <> DL <> o(Fv) <> d(EH_DL)")});
    add("CC", {mol("i(Fa) <> i(Mt) <> g(EH_CC) <> CC <> o(Ct) <> d(EH_CC)"),
               mol("i(Fv) <> i(Ms) <> g(EH_CC) <> CC <> o(Cs) <> d(EH_CC)")});
    add("EL", {mol("i(Ct) <> i(Cs) <> i(Fa) <> i(Fv) <> g(EH_EL) <> EL <> o(Cp) <> d(EH_EL)")});
    add("RL", {mol("i(Cp) <> g(EH_RL) <> RL <> o(Ei) <> o(Es) <> d(EH_RL)")});
    add("IL", {mol("i(Ei) <> i(Cp) <> g(EH_IL) <> IL <> o(Mp) <> o(Ma) <> o(Mv) <> o(Mt) <> o(Ms) <> o(Mn) <> "
                   "d(EH_IL)")});
    return parts;
}

// Rule TS_x converts the SS_x sub-solution into SM_x. The reacted parts of
// its upstream producers appear as catalysts on both sides: that is what
// makes a stage wait for its inputs under plain multiset containment.
inline ReactionRule make_rule(const std::map<std::string, StageParts>& parts, const std::string& stage,
                              const std::vector<std::string>& upstream) {
    const StageParts& own = parts.at(stage);
    ReactionRule r;
    r.name = "TS_" + stage;
    for (const Molecule& m : own.ss) r.consumes.add(own.ssName, m);
    for (const Molecule& m : own.sm) r.produces.add(own.smName, m);
    for (const std::string& up : upstream) {
        const StageParts& dep = parts.at(up);
        for (const Molecule& m : dep.sm) {
            r.consumes.add(dep.smName, m);
            r.produces.add(dep.smName, m);
        }
    }
    return r;
}

}  // namespace cncc_detail

inline ChamProgram builtin_cncc_learning() {
    using namespace cncc_detail;
    ChamProgram p = declarations_only();
    auto parts = stage_parts(p);
    for (const auto& stage : {"SC", "DL", "CC", "EL", "RL", "IL"}) {
        const StageParts& sp = parts.at(stage);
        for (const Molecule& m : sp.ss) p.initial.add(sp.ssName, m);
    }
    p.rules.push_back(make_rule(parts, "SC", {}));
    p.rules.push_back(make_rule(parts, "DL", {"SC"}));
    p.rules.push_back(make_rule(parts, "CC", {"DL"}));
    p.rules.push_back(make_rule(parts, "EL", {"DL", "CC"}));
    p.rules.push_back(make_rule(parts, "RL", {"EL"}));
    p.rules.push_back(make_rule(parts, "IL", {"EL", "RL"}));
    return p;
}

inline ChamProgram builtin_cncc_recognition() {
    using namespace cncc_detail;
    ChamProgram p = declarations_only();
    auto parts = stage_parts(p);
    for (const auto& stage : {"SC", "DL", "CC", "EL"}) {
        const StageParts& sp = parts.at(stage);
        for (const Molecule& m : sp.ss) p.initial.add(sp.ssName, m);
    }
    // Feedback stages start in already-reacted form and stay put.
    for (const auto& stage : {"RL", "IL"}) {
        const StageParts& sp = parts.at(stage);
        for (const Molecule& m : sp.sm) p.initial.add(sp.smName, m);
    }
    p.rules.push_back(make_rule(parts, "SC", {}));
    p.rules.push_back(make_rule(parts, "DL", {"SC"}));
    p.rules.push_back(make_rule(parts, "CC", {"DL"}));
    p.rules.push_back(make_rule(parts, "EL", {"DL", "CC"}));
    return p;
}

struct StageSignature {
    std::set<std::string> inputs;
    std::set<std::string> outputs;
};

struct CnccFramework {
    ChamProgram learning;
    ChamProgram recognition;
    std::map<std::string, SymbolKind> tokenTypes;
    std::map<std::string, StageSignature> stageSignatures;  // keyed by rule name
};

inline CnccFramework builtin_cncc_framework() {
    CnccFramework f;
    f.learning = builtin_cncc_learning();
    f.recognition = builtin_cncc_recognition();
    f.tokenTypes = f.learning.dataDecls;
    for (const auto& r : f.learning.rules)
        f.stageSignatures[r.name] = StageSignature{rule_input_symbols(r), rule_output_symbols(r)};
    return f;
}

struct ClosureReport {
    std::vector<std::pair<std::string, std::string>> unboundInputs;   // (rule, symbol)
    std::vector<std::pair<std::string, std::string>> unusedOutputs;   // (rule, symbol)
    std::set<std::string> externalsUsed;
};

// Every symbol a rule consumes must be produced by some rule or declared
// external; otherwise the architecture's loop is not closed.
inline ClosureReport dataflow_closure_check(const ChamProgram& p) {
    ClosureReport report;
    std::set<std::string> produced;
    std::set<std::string> consumed;
    for (const auto& r : p.rules) {
        for (const auto& s : rule_output_symbols(r)) produced.insert(s);
        for (const auto& s : rule_input_symbols(r)) consumed.insert(s);
    }
    for (const auto& r : p.rules) {
        for (const auto& s : rule_input_symbols(r)) {
            if (p.externals.count(s)) {
                report.externalsUsed.insert(s);
            } else if (!produced.count(s)) {
                report.unboundInputs.emplace_back(r.name, s);
            }
        }
        for (const auto& s : rule_output_symbols(r))
            if (!consumed.count(s) && !p.externals.count(s)) report.unusedOutputs.emplace_back(r.name, s);
    }
    std::sort(report.unboundInputs.begin(), report.unboundInputs.end());
    std::sort(report.unusedOutputs.begin(), report.unusedOutputs.end());
    return report;
}

// All topological orders of the rules under produces-before-consumes edges
// over one iteration. Externally seeded symbols carry no edge, which cuts
// the feedback loop.
inline std::vector<std::vector<std::string>> dependency_order(const ChamProgram& p) {
    int n = static_cast<int>(p.rules.size());
    std::map<std::string, std::set<int>> producers;
    for (int i = 0; i < n; ++i)
        for (const auto& s : rule_output_symbols(p.rules[i]))
            if (!p.externals.count(s)) producers[s].insert(i);
    std::vector<std::set<int>> preds(n);
    for (int i = 0; i < n; ++i)
        for (const auto& s : rule_input_symbols(p.rules[i]))
            if (!p.externals.count(s)) {
                auto it = producers.find(s);
                if (it == producers.end()) continue;  // unbound: closure check's business
                for (int j : it->second)
                    if (j != i) preds[i].insert(j);
            }

    std::vector<std::vector<std::string>> orders;
    std::vector<int> current;
    std::vector<bool> placed(n, false);
    auto extend = [&](auto&& self) -> void {
        if (static_cast<int>(current.size()) == n) {
            std::vector<std::string> names;
            for (int i : current) names.push_back(p.rules[i].name);
            orders.push_back(std::move(names));
            return;
        }
        for (int i = 0; i < n; ++i) {
            if (placed[i]) continue;
            bool ready = true;
            for (int j : preds[i])
                if (!placed[j]) {
                    ready = false;
                    break;
                }
            if (!ready) continue;
            placed[i] = true;
            current.push_back(i);
            self(self);
            current.pop_back();
            placed[i] = false;
        }
    };
    extend(extend);
    if (orders.empty() && n > 0) {
        // A cycle blocks every order; report one.
        std::vector<int> color(n, 0), parent(n, -1);
        std::vector<std::string> witness;
        auto dfs = [&](auto&& self, int v) -> bool {
            color[v] = 1;
            for (int i = 0; i < n; ++i) {
                if (!preds[i].count(v)) continue;
                if (color[i] == 1) {
                    witness.push_back(p.rules[i].name);
                    for (int u = v; u != -1 && u != i; u = parent[u]) witness.push_back(p.rules[u].name);
                    witness.push_back(p.rules[i].name);
                    std::reverse(witness.begin(), witness.end());
                    return true;
                }
                if (color[i] == 0) {
                    parent[i] = v;
                    if (self(self, i)) return true;
                }
            }
            color[v] = 2;
            return false;
        };
        for (int v = 0; v < n; ++v)
            if (color[v] == 0 && dfs(dfs, v)) throw CyclicDependency(witness);
        throw CyclicDependency(witness);
    }
    return orders;
}

}  // namespace cham
