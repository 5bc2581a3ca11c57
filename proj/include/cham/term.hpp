#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// Term algebra for the chemical abstract machine: atoms, <>-composed
// molecules, and //-composed solutions of named sub-solution multisets.

namespace cham {

enum class Processor { SC, DL, CC, EL, RL, IL };
enum class Hormone { EH_CC, EH_DL, EH_EL, EH_IL, EH_RL, EH_SC };
enum class SymbolKind { Matrix, Vector, Parameter, Set };

inline const char* to_string(Processor p) {
    switch (p) {
        case Processor::SC: return "SC";
        case Processor::DL: return "DL";
        case Processor::CC: return "CC";
        case Processor::EL: return "EL";
        case Processor::RL: return "RL";
        case Processor::IL: return "IL";
    }
    return "?";
}

inline const char* to_string(Hormone h) {
    switch (h) {
        case Hormone::EH_CC: return "EH_CC";
        case Hormone::EH_DL: return "EH_DL";
        case Hormone::EH_EL: return "EH_EL";
        case Hormone::EH_IL: return "EH_IL";
        case Hormone::EH_RL: return "EH_RL";
        case Hormone::EH_SC: return "EH_SC";
    }
    return "?";
}

inline const char* to_string(SymbolKind k) {
    switch (k) {
        case SymbolKind::Matrix: return "matrix";
        case SymbolKind::Vector: return "vector";
        case SymbolKind::Parameter: return "parameter";
        case SymbolKind::Set: return "set";
    }
    return "?";
}

inline std::optional<Processor> processor_from_string(std::string_view s) {
    static constexpr std::array<Processor, 6> all = {Processor::SC, Processor::DL, Processor::CC,
                                                     Processor::EL, Processor::RL, Processor::IL};
    for (Processor p : all)
        if (s == to_string(p)) return p;
    return std::nullopt;
}

inline std::optional<Hormone> hormone_from_string(std::string_view s) {
    static constexpr std::array<Hormone, 6> all = {Hormone::EH_CC, Hormone::EH_DL, Hormone::EH_EL,
                                                   Hormone::EH_IL, Hormone::EH_RL, Hormone::EH_SC};
    for (Hormone h : all)
        if (s == to_string(h)) return h;
    return std::nullopt;
}

inline std::optional<SymbolKind> symbol_kind_from_string(std::string_view s) {
    static constexpr std::array<SymbolKind, 4> all = {SymbolKind::Matrix, SymbolKind::Vector,
                                                      SymbolKind::Parameter, SymbolKind::Set};
    for (SymbolKind k : all)
        if (s == to_string(k)) return k;
    return std::nullopt;
}

inline std::array<Hormone, 6> all_hormones() {
    return {Hormone::EH_CC, Hormone::EH_DL, Hormone::EH_EL, Hormone::EH_IL, Hormone::EH_RL, Hormone::EH_SC};
}

// A single position in a molecule chain. i/o wrap data symbols, g/d wrap
// hormone symbols, and a bare processing element stands alone.
struct Atom {
    enum class Tag { Proc, Input, Output, Generate, Dissipate };

    Tag tag = Tag::Proc;
    Processor proc = Processor::SC;  // Tag::Proc
    std::string symbol;              // Tag::Input / Tag::Output
    Hormone hormone = Hormone::EH_SC;  // Tag::Generate / Tag::Dissipate

    static Atom processor(Processor p) {
        Atom a;
        a.tag = Tag::Proc;
        a.proc = p;
        return a;
    }
    static Atom input(std::string sym) {
        Atom a;
        a.tag = Tag::Input;
        a.symbol = std::move(sym);
        return a;
    }
    static Atom output(std::string sym) {
        Atom a;
        a.tag = Tag::Output;
        a.symbol = std::move(sym);
        return a;
    }
    static Atom generate(Hormone h) {
        Atom a;
        a.tag = Tag::Generate;
        a.hormone = h;
        return a;
    }
    static Atom dissipate(Hormone h) {
        Atom a;
        a.tag = Tag::Dissipate;
        a.hormone = h;
        return a;
    }

    friend auto operator<=>(const Atom&, const Atom&) = default;
};

// Molecules are flattened atom chains: <> is associative, non-commutative.
using Molecule = std::vector<Atom>;

inline Molecule compose(const Molecule& a, const Molecule& b) {
    Molecule out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

inline std::string render_atom(const Atom& a) {
    switch (a.tag) {
        case Atom::Tag::Proc: return to_string(a.proc);
        case Atom::Tag::Input: return "i(" + a.symbol + ")";
        case Atom::Tag::Output: return "o(" + a.symbol + ")";
        case Atom::Tag::Generate: return std::string("g(") + to_string(a.hormone) + ")";
        case Atom::Tag::Dissipate: return std::string("d(") + to_string(a.hormone) + ")";
    }
    return "?";
}

inline std::string render_molecule(const Molecule& m) {
    std::string out;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (i) out += " <> ";
        out += render_atom(m[i]);
    }
    return out;
}

// Machine state: named sub-solutions, each a multiset of molecules.
// // is commutative-associative; empty parts are indistinguishable from
// absent parts.
struct Solution {
    std::map<std::string, std::map<Molecule, int>> parts;

    void add(const std::string& part, Molecule m, int count = 1) {
        if (count <= 0) return;
        parts[part][std::move(m)] += count;
    }

    bool empty() const {
        for (const auto& [name, ms] : parts)
            for (const auto& [m, n] : ms)
                if (n > 0) return false;
        return true;
    }

    std::size_t total_molecules() const {
        std::size_t total = 0;
        for (const auto& [name, ms] : parts)
            for (const auto& [m, n] : ms)
                if (n > 0) total += static_cast<std::size_t>(n);
        return total;
    }

    int count(const std::string& part, const Molecule& m) const {
        auto pit = parts.find(part);
        if (pit == parts.end()) return 0;
        auto mit = pit->second.find(m);
        return mit == pit->second.end() ? 0 : mit->second;
    }

    // Multiset containment, part by part.
    bool contains(const Solution& sub) const {
        for (const auto& [name, ms] : sub.parts)
            for (const auto& [m, n] : ms)
                if (n > 0 && count(name, m) < n) return false;
        return true;
    }

    void subtract(const Solution& sub) {
        if (!contains(sub)) throw std::logic_error("Solution::subtract: not contained");
        for (const auto& [name, ms] : sub.parts)
            for (const auto& [m, n] : ms)
                if (n > 0) parts[name][m] -= n;
        prune();
    }

    void merge(const Solution& other) {
        for (const auto& [name, ms] : other.parts)
            for (const auto& [m, n] : ms)
                if (n > 0) parts[name][m] += n;
    }

    void prune() {
        for (auto pit = parts.begin(); pit != parts.end();) {
            auto& ms = pit->second;
            for (auto mit = ms.begin(); mit != ms.end();)
                mit = (mit->second <= 0) ? ms.erase(mit) : std::next(mit);
            pit = ms.empty() ? parts.erase(pit) : std::next(pit);
        }
    }
};

inline Solution solution_union(const Solution& a, const Solution& b) {
    Solution out = a;
    out.merge(b);
    out.prune();
    return out;
}

inline bool multiset_equal(const Solution& a, const Solution& b) {
    Solution x = a, y = b;
    x.prune();
    y.prune();
    return x.parts == y.parts;
}

// Canonical serialization: parts sorted by name, molecules sorted by
// rendering, multiplicities explicit. Injective on pruned solutions, so it
// doubles as a hashable state key.
inline std::string canonical_key(const Solution& s) {
    Solution p = s;
    p.prune();
    std::string out;
    for (const auto& [name, ms] : p.parts) {
        out += name;
        out += "{";
        bool first = true;
        for (const auto& [m, n] : ms) {
            if (!first) out += "; ";
            first = false;
            out += render_molecule(m);
            if (n > 1) out += " *" + std::to_string(n);
        }
        out += "} ";
    }
    return out;
}

// Part-qualified molecule strings, one per molecule instance, sorted.
// This is the token list format used by trace and terminal serialization.
inline std::vector<std::string> render_solution_tokens(const Solution& s) {
    Solution p = s;
    p.prune();
    std::vector<std::string> out;
    for (const auto& [name, ms] : p.parts)
        for (const auto& [m, n] : ms)
            for (int i = 0; i < n; ++i) out.push_back(name + " { " + render_molecule(m) + " }");
    return out;
}

}  // namespace cham
