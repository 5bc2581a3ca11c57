#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "cham/term.hpp"

namespace cham {

// One rewrite: molecules removed from named parts, molecules added to named
// parts. Molecules present on both sides act as catalysts: they gate the
// rule without being net-consumed and are excluded from hormone accounting
// and dataflow analysis.
struct ReactionRule {
    std::string name;
    Solution consumes;
    Solution produces;
};

struct ChamProgram {
    std::map<std::string, SymbolKind> dataDecls;
    std::set<Hormone> hormoneDecls;
    std::set<std::string> externals;  // data symbols seeded from outside the rule set
    Solution initial;                 // the declared sub-solutions
    std::vector<ReactionRule> rules;

    const ReactionRule* find_rule(const std::string& name) const {
        for (const auto& r : rules)
            if (r.name == name) return &r;
        return nullptr;
    }
};

// Multiset intersection of a rule's two sides: the catalyst molecules.
inline Solution rule_catalysts(const ReactionRule& r) {
    Solution out;
    for (const auto& [part, ms] : r.consumes.parts)
        for (const auto& [m, n] : ms) {
            int k = std::min(n, r.produces.count(part, m));
            if (k > 0) out.add(part, m, k);
        }
    return out;
}

inline Solution rule_consumed_net(const ReactionRule& r) {
    Solution out = r.consumes;
    out.subtract(rule_catalysts(r));
    return out;
}

inline Solution rule_produced_net(const ReactionRule& r) {
    Solution out = r.produces;
    out.subtract(rule_catalysts(r));
    return out;
}

inline std::set<std::string> atoms_with_tag(const Solution& s, Atom::Tag tag) {
    std::set<std::string> out;
    for (const auto& [part, ms] : s.parts)
        for (const auto& [m, n] : ms)
            for (const Atom& a : m)
                if (a.tag == tag) out.insert(a.symbol);
    return out;
}

// Data symbols the rule reads: i(.) atoms of its net-consumed molecules.
inline std::set<std::string> rule_input_symbols(const ReactionRule& r) {
    return atoms_with_tag(rule_consumed_net(r), Atom::Tag::Input);
}

// Data symbols the rule writes: o(.) atoms of its net-produced molecules.
inline std::set<std::string> rule_output_symbols(const ReactionRule& r) {
    return atoms_with_tag(rule_produced_net(r), Atom::Tag::Output);
}

// Hormone families the rule is gated on: every family named by a g or d
// atom of a non-catalyst molecule on either side.
inline std::set<Hormone> rule_gate_hormones(const ReactionRule& r) {
    std::set<Hormone> out;
    auto scan = [&out](const Solution& s) {
        for (const auto& [part, ms] : s.parts)
            for (const auto& [m, n] : ms)
                for (const Atom& a : m)
                    if (a.tag == Atom::Tag::Generate || a.tag == Atom::Tag::Dissipate) out.insert(a.hormone);
    };
    scan(rule_consumed_net(r));
    scan(rule_produced_net(r));
    return out;
}

// Reservoir drain per firing: d(.) atoms of the net-produced molecules.
inline std::map<Hormone, int> rule_dissipation(const ReactionRule& r) {
    std::map<Hormone, int> out;
    Solution net = rule_produced_net(r);
    for (const auto& [part, ms] : net.parts)
        for (const auto& [m, n] : ms)
            for (const Atom& a : m)
                if (a.tag == Atom::Tag::Dissipate) out[a.hormone] += n;
    return out;
}

}  // namespace cham
