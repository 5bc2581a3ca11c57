#include <doctest.h>

#include <random>

#include "cham/cncc.hpp"
#include "cham/term.hpp"
#include "helpers.hpp"

using namespace cham;

TEST_CASE("compose flattens and concatenates") {
    Molecule a = {Atom::input("Mi")};
    Molecule b = {Atom::processor(Processor::SC)};
    Molecule ab = compose(a, b);
    REQUIRE(ab.size() == 2);
    CHECK(ab[0] == Atom::input("Mi"));
    CHECK(ab[1] == Atom::processor(Processor::SC));
}

TEST_CASE("compose is associative on random molecules") {
    std::mt19937_64 rng(7);
    std::vector<std::string> syms = {"a", "b", "c"};
    std::vector<Hormone> hs = {Hormone::EH_SC, Hormone::EH_RL};
    for (int i = 0; i < 200; ++i) {
        Molecule x = testgen::random_molecule(rng, syms, hs);
        Molecule y = testgen::random_molecule(rng, syms, hs);
        Molecule z = testgen::random_molecule(rng, syms, hs);
        CHECK(compose(compose(x, y), z) == compose(x, compose(y, z)));
    }
}

TEST_CASE("composing SS_EL fragments at any split point rebuilds the molecule") {
    ChamProgram ctx = builtin_cncc_learning();
    Molecule full = parse_molecule("i(Ct) <> i(Cs) <> i(Fa) <> i(Fv) <> g(EH_EL) <> EL <> o(Cp) <> d(EH_EL)", ctx);
    for (std::size_t cut = 0; cut <= full.size(); ++cut) {
        Molecule left(full.begin(), full.begin() + cut);
        Molecule right(full.begin() + cut, full.end());
        CHECK(compose(left, right) == full);
    }
}

TEST_CASE("solution_union of the six SS parts rebuilds the learning initial solution") {
    ChamProgram p = builtin_cncc_learning();
    Solution acc;
    for (const auto& [part, ms] : p.initial.parts) {
        Solution single;
        for (const auto& [m, n] : ms) single.add(part, m, n);
        acc = solution_union(acc, single);
    }
    CHECK(multiset_equal(acc, p.initial));
}

TEST_CASE("solution_union identity and commutativity") {
    std::mt19937_64 rng(11);
    std::vector<std::string> syms = {"a", "b"};
    std::vector<Hormone> hs = {Hormone::EH_DL};
    for (int i = 0; i < 200; ++i) {
        Solution s1 = testgen::random_solution(rng, syms, hs);
        Solution s2 = testgen::random_solution(rng, syms, hs);
        CHECK(multiset_equal(solution_union(s1, Solution{}), s1));
        CHECK(canonical_key(solution_union(s1, s2)) == canonical_key(solution_union(s2, s1)));
        Solution s3 = testgen::random_solution(rng, syms, hs);
        CHECK(canonical_key(solution_union(solution_union(s1, s2), s3)) ==
              canonical_key(solution_union(s1, solution_union(s2, s3))));
    }
}

TEST_CASE("multiset_equal reflexivity, SM difference, and multiplicity") {
    ChamProgram p = builtin_cncc_learning();
    CHECK(multiset_equal(p.initial, p.initial));

    Trace t = run(p, p.initial, SchedulerPolicy::Lexicographic, 100, 1);
    CHECK_FALSE(multiset_equal(p.initial, t.terminal));

    Solution once, twice;
    Molecule m = {Atom::input("Mi")};
    once.add("P", m);
    twice.add("P", m, 2);
    CHECK_FALSE(multiset_equal(once, twice));
}

TEST_CASE("canonical_key is injective on canonical forms") {
    std::mt19937_64 rng(13);
    std::vector<std::string> syms = {"a", "b", "c"};
    std::vector<Hormone> hs = {Hormone::EH_CC};
    for (int i = 0; i < 300; ++i) {
        Solution x = testgen::random_solution(rng, syms, hs);
        Solution y = testgen::random_solution(rng, syms, hs);
        if (canonical_key(x) == canonical_key(y)) CHECK(multiset_equal(x, y));
        if (!multiset_equal(x, y)) CHECK(canonical_key(x) != canonical_key(y));
    }
}

TEST_CASE("empty parts are indistinguishable from absent parts") {
    Solution a, b;
    a.add("P", {Atom::processor(Processor::SC)});
    b.add("P", {Atom::processor(Processor::SC)});
    b.add("Q", {Atom::processor(Processor::DL)});
    Solution q;
    q.add("Q", {Atom::processor(Processor::DL)});
    b.subtract(q);
    CHECK(multiset_equal(a, b));
    CHECK(canonical_key(a) == canonical_key(b));
}

TEST_CASE("subtract rejects non-contained multisets") {
    Solution s;
    s.add("P", {Atom::input("Mi")});
    Solution more;
    more.add("P", {Atom::input("Mi")}, 2);
    CHECK_FALSE(s.contains(more));
    CHECK_THROWS_AS(s.subtract(more), std::logic_error);
}

TEST_CASE("builtin program symbols are the declared alphabet") {
    ChamProgram p = builtin_cncc_learning();
    auto check = [&p](const Solution& s) {
        for (const auto& [part, ms] : s.parts)
            for (const auto& [m, n] : ms)
                for (const Atom& a : m)
                    if (a.tag == Atom::Tag::Input || a.tag == Atom::Tag::Output) CHECK(p.dataDecls.count(a.symbol));
    };
    check(p.initial);
    for (const auto& r : p.rules) {
        check(r.consumes);
        check(r.produces);
    }
    CHECK(p.dataDecls.size() == 17);
}
