#pragma once

#include <random>
#include <string>
#include <vector>

#include "cham/parser.hpp"
#include "cham/program.hpp"
#include "cham/term.hpp"

// Shared generators for property-style tests.

namespace testgen {

inline cham::Atom random_atom(std::mt19937_64& rng, const std::vector<std::string>& dataSyms,
                              const std::vector<cham::Hormone>& hormones) {
    std::uniform_int_distribution<int> kind(0, hormones.empty() ? 2 : 4);
    std::uniform_int_distribution<std::size_t> pickData(0, dataSyms.size() - 1);
    switch (kind(rng)) {
        case 0: {
            std::uniform_int_distribution<int> pickProc(0, 5);
            return cham::Atom::processor(static_cast<cham::Processor>(pickProc(rng)));
        }
        case 1: return cham::Atom::input(dataSyms[pickData(rng)]);
        case 2: return cham::Atom::output(dataSyms[pickData(rng)]);
        default: {
            std::uniform_int_distribution<std::size_t> pickH(0, hormones.size() - 1);
            return kind(rng) % 2 ? cham::Atom::generate(hormones[pickH(rng)])
                                 : cham::Atom::dissipate(hormones[pickH(rng)]);
        }
    }
}

inline cham::Molecule random_molecule(std::mt19937_64& rng, const std::vector<std::string>& dataSyms,
                                      const std::vector<cham::Hormone>& hormones, int maxLen = 6) {
    std::uniform_int_distribution<int> len(1, maxLen);
    cham::Molecule m;
    int n = len(rng);
    for (int i = 0; i < n; ++i) m.push_back(random_atom(rng, dataSyms, hormones));
    return m;
}

inline cham::Solution random_solution(std::mt19937_64& rng, const std::vector<std::string>& dataSyms,
                                      const std::vector<cham::Hormone>& hormones, int maxParts = 3,
                                      int maxMols = 3) {
    cham::Solution s;
    std::uniform_int_distribution<int> nParts(0, maxParts);
    std::uniform_int_distribution<int> nMols(1, maxMols);
    int parts = nParts(rng);
    for (int p = 0; p < parts; ++p) {
        std::string part = "P" + std::to_string(std::uniform_int_distribution<int>(0, 4)(rng));
        int mols = nMols(rng);
        for (int i = 0; i < mols; ++i) s.add(part, random_molecule(rng, dataSyms, hormones));
    }
    return s;
}

// A random well-formed program: declarations, some initial sub-solutions,
// and rules whose molecules reference only declared symbols.
inline cham::ChamProgram random_program(std::mt19937_64& rng) {
    cham::ChamProgram p;
    std::uniform_int_distribution<int> nData(1, 8);
    std::uniform_int_distribution<int> kind(0, 3);
    int nd = nData(rng);
    std::vector<std::string> dataSyms;
    for (int i = 0; i < nd; ++i) {
        std::string name = "d" + std::to_string(i);
        p.dataDecls[name] = static_cast<cham::SymbolKind>(kind(rng));
        dataSyms.push_back(name);
    }
    std::vector<cham::Hormone> hormones;
    for (cham::Hormone h : cham::all_hormones())
        if (std::uniform_int_distribution<int>(0, 1)(rng)) {
            p.hormoneDecls.insert(h);
            hormones.push_back(h);
        }
    for (const auto& s : dataSyms)
        if (std::uniform_int_distribution<int>(0, 2)(rng) == 0) p.externals.insert(s);
    p.initial = random_solution(rng, dataSyms, hormones);
    std::uniform_int_distribution<int> nRules(0, 4);
    int nr = nRules(rng);
    for (int i = 0; i < nr; ++i) {
        cham::ReactionRule r;
        r.name = "R" + std::to_string(i);
        r.consumes = random_solution(rng, dataSyms, hormones, 2, 2);
        while (r.consumes.empty()) r.consumes = random_solution(rng, dataSyms, hormones, 2, 2);
        r.produces = random_solution(rng, dataSyms, hormones, 2, 2);
        while (r.produces.empty()) r.produces = random_solution(rng, dataSyms, hormones, 2, 2);
        p.rules.push_back(std::move(r));
    }
    return p;
}

}  // namespace testgen
