#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "cham/program.hpp"
#include "cham/term.hpp"

namespace cham {

struct EngineError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct RuleNotEnabled : EngineError {
    explicit RuleNotEnabled(const std::string& rule) : EngineError("rule not enabled: " + rule) {}
};
struct UnknownRule : EngineError {
    explicit UnknownRule(const std::string& rule) : EngineError("unknown rule: " + rule) {}
};

// Endocrine regulation. A rule is gated on every hormone family named by a
// g/d atom of its non-catalyst molecules: it fires only while each such
// family's reservoir level is at least its threshold. Each firing drains the
// reservoir by the rule's d(.) count, floored at zero. All thresholds
// default to zero, which makes the gate a no-op and leaves the pure CHAM
// semantics as the baseline.
struct HormoneGate {
    std::map<Hormone, int> thresholds;
    std::map<Hormone, int> initialLevels;
    bool enforced = true;

    int threshold(Hormone h) const {
        auto it = thresholds.find(h);
        return it == thresholds.end() ? 0 : it->second;
    }
    int initial_level(Hormone h) const {
        auto it = initialLevels.find(h);
        return it == initialLevels.end() ? 0 : it->second;
    }
    static HormoneGate disabled() {
        HormoneGate g;
        g.enforced = false;
        return g;
    }
};

using HormoneLevels = std::map<Hormone, int>;

inline bool endocrine_gate_eval(const HormoneGate& gate, const ReactionRule& rule, const HormoneLevels& levels) {
    if (!gate.enforced) return true;
    for (Hormone h : rule_gate_hormones(rule)) {
        auto it = levels.find(h);
        int level = it == levels.end() ? 0 : it->second;
        if (level < gate.threshold(h)) return false;
    }
    return true;
}

inline HormoneLevels initial_levels(const ChamProgram& p, const HormoneGate& gate) {
    HormoneLevels levels;
    for (Hormone h : p.hormoneDecls) levels[h] = gate.initial_level(h);
    return levels;
}

// Rules whose consumed molecules are all present (with multiplicity) and
// whose hormone gate passes. Lexicographic by rule name.
inline std::vector<std::string> enabled_rules(const Solution& state, const ChamProgram& p, const HormoneGate& gate,
                                              const HormoneLevels& levels) {
    std::vector<std::string> out;
    for (const auto& r : p.rules)
        if (state.contains(r.consumes) && endocrine_gate_eval(gate, r, levels)) out.push_back(r.name);
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<std::string> enabled_rules(const Solution& state, const ChamProgram& p) {
    HormoneGate gate;
    return enabled_rules(state, p, gate, initial_levels(p, gate));
}

inline Solution fire(const Solution& state, const std::string& ruleName, const ChamProgram& p,
                     const HormoneGate& gate, HormoneLevels& levels) {
    const ReactionRule* r = p.find_rule(ruleName);
    if (!r) throw UnknownRule(ruleName);
    if (!state.contains(r->consumes) || !endocrine_gate_eval(gate, *r, levels)) throw RuleNotEnabled(ruleName);
    Solution next = state;
    next.subtract(r->consumes);
    next.merge(r->produces);
    next.prune();
    for (const auto& [h, n] : rule_dissipation(*r)) levels[h] = std::max(0, levels[h] - n);
    return next;
}

inline Solution fire(const Solution& state, const std::string& ruleName, const ChamProgram& p) {
    HormoneGate gate;
    HormoneLevels levels = initial_levels(p, gate);
    return fire(state, ruleName, p, gate, levels);
}

enum class SchedulerPolicy { Lexicographic, Fifo, Random };

inline const char* to_string(SchedulerPolicy s) {
    switch (s) {
        case SchedulerPolicy::Lexicographic: return "lex";
        case SchedulerPolicy::Fifo: return "fifo";
        case SchedulerPolicy::Random: return "random";
    }
    return "?";
}

struct TraceStep {
    int index = 0;
    std::string rule;
    std::vector<std::string> consumed;
    std::vector<std::string> produced;
    HormoneLevels hormonesAfter;
};

struct Trace {
    std::vector<TraceStep> steps;
    Solution terminal;
    bool truncated = false;
};

inline Trace run(const ChamProgram& p, const Solution& initial, SchedulerPolicy policy, int maxSteps,
                 std::uint64_t seed, const HormoneGate& gate = HormoneGate{}) {
    Trace trace;
    Solution state = initial;
    state.prune();
    HormoneLevels levels = initial_levels(p, gate);
    std::mt19937_64 rng(seed);
    for (int step = 1;; ++step) {
        std::vector<std::string> enabled = enabled_rules(state, p, gate, levels);
        if (enabled.empty()) break;
        if (step > maxSteps) {
            trace.truncated = true;
            break;
        }
        std::string chosen;
        switch (policy) {
            case SchedulerPolicy::Lexicographic: chosen = enabled.front(); break;
            case SchedulerPolicy::Fifo: {
                // Declaration order stands in for arrival order: every
                // enabled rule became ready at the same state.
                for (const auto& r : p.rules)
                    if (std::find(enabled.begin(), enabled.end(), r.name) != enabled.end()) {
                        chosen = r.name;
                        break;
                    }
                break;
            }
            case SchedulerPolicy::Random: {
                std::uniform_int_distribution<std::size_t> pick(0, enabled.size() - 1);
                chosen = enabled[pick(rng)];
                break;
            }
        }
        const ReactionRule* r = p.find_rule(chosen);
        TraceStep ts;
        ts.index = step;
        ts.rule = chosen;
        ts.consumed = render_solution_tokens(r->consumes);
        ts.produced = render_solution_tokens(r->produces);
        state = fire(state, chosen, p, gate, levels);
        ts.hormonesAfter = levels;
        trace.steps.push_back(std::move(ts));
    }
    trace.terminal = state;
    return trace;
}

inline nlohmann::ordered_json trace_to_json(const Trace& t, const std::string& programLabel, SchedulerPolicy policy,
                                            std::uint64_t seed) {
    nlohmann::ordered_json doc;
    doc["program"] = programLabel;
    doc["scheduler"] = to_string(policy);
    doc["seed"] = seed;
    doc["steps"] = nlohmann::ordered_json::array();
    for (const auto& s : t.steps) {
        nlohmann::ordered_json step;
        step["index"] = s.index;
        step["rule"] = s.rule;
        step["consumed"] = s.consumed;
        step["produced"] = s.produced;
        nlohmann::ordered_json hormones;
        for (const auto& [h, level] : s.hormonesAfter) hormones[to_string(h)] = level;
        step["hormones"] = std::move(hormones);
        doc["steps"].push_back(std::move(step));
    }
    doc["terminal"] = render_solution_tokens(t.terminal);
    doc["truncated"] = t.truncated;
    return doc;
}

// Breadth-first closure of all rule interleavings. States are identified by
// the canonical serialization of the solution; the gate is not part of the
// state, so exploration covers the pure CHAM semantics.
struct StateGraph {
    std::vector<std::string> stateKeys;               // index -> canonical key
    std::vector<Solution> stateSolutions;             // index -> solution
    std::vector<std::tuple<int, std::string, int>> edges;  // (from, rule, to)
    std::vector<int> terminals;                       // out-degree zero states
    int initialState = 0;
    bool complete = false;
};

inline StateGraph explore(const ChamProgram& p, const Solution& initial, int stateBound) {
    StateGraph g;
    HormoneGate gate = HormoneGate::disabled();
    HormoneLevels noLevels;
    std::map<std::string, int> index;
    auto intern = [&](const Solution& s) -> int {
        std::string key = canonical_key(s);
        auto it = index.find(key);
        if (it != index.end()) return it->second;
        int id = static_cast<int>(g.stateKeys.size());
        index[key] = id;
        g.stateKeys.push_back(std::move(key));
        Solution pruned = s;
        pruned.prune();
        g.stateSolutions.push_back(std::move(pruned));
        return id;
    };

    std::deque<int> frontier;
    frontier.push_back(intern(initial));
    std::set<int> expanded;
    g.complete = true;
    while (!frontier.empty()) {
        int id = frontier.front();
        frontier.pop_front();
        if (expanded.count(id)) continue;
        expanded.insert(id);
        const Solution state = g.stateSolutions[id];
        std::vector<std::string> enabled = enabled_rules(state, p, gate, noLevels);
        if (enabled.empty()) {
            g.terminals.push_back(id);
            continue;
        }
        for (const auto& ruleName : enabled) {
            HormoneLevels scratch;
            Solution next = fire(state, ruleName, p, gate, scratch);
            bool fresh = index.find(canonical_key(next)) == index.end();
            if (fresh && static_cast<int>(g.stateKeys.size()) >= stateBound) {
                g.complete = false;
                continue;
            }
            int nextId = intern(next);
            g.edges.emplace_back(id, ruleName, nextId);
            if (fresh) frontier.push_back(nextId);
        }
    }
    if (!g.complete) g.terminals.clear();  // terminal set unreliable on a partial graph
    std::sort(g.terminals.begin(), g.terminals.end());
    return g;
}

enum class ConfluenceVerdict { Confluent, NonConfluent, Unknown };
enum class TerminationVerdict { Terminating, Cycle, Unknown };

struct ConfluenceResult {
    ConfluenceVerdict verdict = ConfluenceVerdict::Unknown;
    std::pair<int, int> witness{-1, -1};  // two distinct terminal states when non-confluent
};

struct TerminationResult {
    TerminationVerdict verdict = TerminationVerdict::Unknown;
    std::vector<int> cycleWitness;  // state sequence, first == last, when cyclic
};

inline ConfluenceResult check_confluence(const StateGraph& g) {
    ConfluenceResult out;
    if (!g.complete) return out;
    if (g.terminals.size() == 1) {
        out.verdict = ConfluenceVerdict::Confluent;
    } else if (g.terminals.size() >= 2) {
        out.verdict = ConfluenceVerdict::NonConfluent;
        out.witness = {g.terminals[0], g.terminals[1]};
    } else {
        // Zero terminal states: the system diverges. Not confluent in the
        // one-terminal sense; there is no witness pair to report.
        out.verdict = ConfluenceVerdict::NonConfluent;
    }
    return out;
}

inline TerminationResult check_termination(const StateGraph& g) {
    TerminationResult out;
    if (!g.complete) return out;
    int n = static_cast<int>(g.stateKeys.size());
    std::vector<std::vector<int>> adj(n);
    for (const auto& [from, rule, to] : g.edges) adj[from].push_back(to);
    std::vector<int> color(n, 0);  // 0 white, 1 on stack, 2 done
    std::vector<int> parent(n, -1);

    // Iterative DFS with back-edge detection.
    for (int root = 0; root < n; ++root) {
        if (color[root] != 0) continue;
        std::vector<std::pair<int, std::size_t>> stack{{root, 0}};
        color[root] = 1;
        while (!stack.empty()) {
            auto& [v, next] = stack.back();
            if (next < adj[v].size()) {
                int w = adj[v][next++];
                if (color[w] == 1) {
                    // Reconstruct the cycle w -> ... -> v -> w.
                    std::vector<int> cycle{w};
                    for (int u = v; u != w; u = parent[u]) cycle.push_back(u);
                    std::reverse(cycle.begin() + 1, cycle.end());
                    cycle.push_back(w);
                    out.verdict = TerminationVerdict::Cycle;
                    out.cycleWitness = std::move(cycle);
                    return out;
                }
                if (color[w] == 0) {
                    color[w] = 1;
                    parent[w] = v;
                    stack.emplace_back(w, 0);
                }
            } else {
                color[v] = 2;
                stack.pop_back();
            }
        }
    }
    out.verdict = TerminationVerdict::Terminating;
    return out;
}

inline std::string to_dot(const StateGraph& g) {
    std::string out = "digraph cham {\n";
    for (std::size_t i = 0; i < g.stateKeys.size(); ++i) {
        std::string label = "s" + std::to_string(i);
        bool terminal = std::find(g.terminals.begin(), g.terminals.end(), static_cast<int>(i)) != g.terminals.end();
        out += "  s" + std::to_string(i) + " [label=\"" + label + "\"" + (terminal ? ", shape=doublecircle" : "") +
               "];\n";
    }
    for (const auto& [from, rule, to] : g.edges)
        out += "  s" + std::to_string(from) + " -> s" + std::to_string(to) + " [label=\"" + rule + "\"];\n";
    out += "}\n";
    return out;
}

}  // namespace cham
