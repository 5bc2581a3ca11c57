#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "cham/cncc.hpp"
#include "cham/parser.hpp"
#include "helpers.hpp"

using namespace cham;

namespace {

std::string read_asset(const std::string& name) {
    std::ifstream is(std::string(CHAM_ASSET_DIR) + "/" + name, std::ios::binary);
    REQUIRE(is);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("bundled learning source parses to the documented shape") {
    ChamProgram p = parse_program(read_asset("cncc_learning.cham"));
    CHECK(p.rules.size() == 6);
    CHECK(p.initial.parts.size() == 6);
    CHECK(p.dataDecls.size() == 17);
    CHECK(p.hormoneDecls.size() == 6);
    CHECK(p.externals == std::set<std::string>{"Mi", "Mn", "Es", "Ma", "Mv", "Mt", "Ms"});
}

TEST_CASE("empty input parses to the empty program") {
    ChamProgram p = parse_program("");
    CHECK(p.dataDecls.empty());
    CHECK(p.hormoneDecls.empty());
    CHECK(p.rules.empty());
    CHECK(p.initial.empty());
    CHECK(render_program(p) == "# cham program\n");
}

TEST_CASE("unclosed parenthesis reports a span inside the offending token") {
    try {
        parse_program("rule R: i(Mi");
        FAIL("expected a ParseError");
    } catch (const ParseError& e) {
        CHECK(e.kind == ParseError::Kind::Syntax);
        CHECK(e.span.line == 1);
        CHECK(e.span.column >= 9);
        CHECK(e.span.column <= 13);
    }
}

TEST_CASE("error spans track line numbers") {
    try {
        parse_program("data a: matrix;\n\nbogus decl;\n");
        FAIL("expected a ParseError");
    } catch (const ParseError& e) {
        CHECK(e.kind == ParseError::Kind::Syntax);
        CHECK(e.span.line == 3);
        CHECK(e.span.column == 1);
    }
}

TEST_CASE("undeclared symbols and duplicate rules are rejected") {
    CHECK_THROWS_AS(parse_program("solution S { i(zap); }"), ParseError);
    try {
        parse_program("data a: set;\nrule R: S { i(a) } => S { i(a) };\nrule R: S { i(a) } => S { i(a) };");
        FAIL("expected DuplicateRule");
    } catch (const ParseError& e) {
        CHECK(e.kind == ParseError::Kind::DuplicateRule);
        CHECK(e.span.line == 3);
    }
    try {
        parse_program("external nope;");
        FAIL("expected UnknownSymbol");
    } catch (const ParseError& e) {
        CHECK(e.kind == ParseError::Kind::UnknownSymbol);
    }
}

TEST_CASE("rules must consume something") {
    CHECK_THROWS_AS(parse_program("data a: set;\nrule R: S { } => S { i(a) };"), ParseError);
}

TEST_CASE("parse_molecule handles the SS_SC chain, bare processors, and kind errors") {
    ChamProgram ctx = builtin_cncc_learning();
    Molecule m = parse_molecule("i(Mi) <> i(Mn) <> i(Es) <> g(EH_SC) <> SC <> o(Sa) <> o(Sv) <> d(EH_SC)", ctx);
    REQUIRE(m.size() == 8);
    CHECK(m[0] == Atom::input("Mi"));
    CHECK(m[3] == Atom::generate(Hormone::EH_SC));
    CHECK(m[4] == Atom::processor(Processor::SC));
    CHECK(m[7] == Atom::dissipate(Hormone::EH_SC));

    Molecule proc = parse_molecule("SC", ctx);
    REQUIRE(proc.size() == 1);
    CHECK(proc[0] == Atom::processor(Processor::SC));

    try {
        parse_molecule("g(Mi)", ctx);
        FAIL("expected KindMismatch");
    } catch (const ParseError& e) {
        CHECK(e.kind == ParseError::Kind::KindMismatch);
    }
    try {
        parse_molecule("i(EH_SC)", ctx);
        FAIL("expected KindMismatch");
    } catch (const ParseError& e) {
        CHECK(e.kind == ParseError::Kind::KindMismatch);
    }
}

TEST_CASE("builtin programs roundtrip through render and parse") {
    for (const ChamProgram& p : {builtin_cncc_learning(), builtin_cncc_recognition()}) {
        std::string text = render_program(p);
        ChamProgram q = parse_program(text);
        CHECK(q.dataDecls == p.dataDecls);
        CHECK(q.hormoneDecls == p.hormoneDecls);
        CHECK(q.externals == p.externals);
        CHECK(multiset_equal(q.initial, p.initial));
        REQUIRE(q.rules.size() == p.rules.size());
        for (std::size_t i = 0; i < p.rules.size(); ++i) {
            CHECK(q.rules[i].name == p.rules[i].name);
            CHECK(multiset_equal(q.rules[i].consumes, p.rules[i].consumes));
            CHECK(multiset_equal(q.rules[i].produces, p.rules[i].produces));
        }
        CHECK(render_program(q) == text);
    }
}

TEST_CASE("sub-solution listing order does not affect the canonical rendering") {
    std::string a = "data x: set;\nsolution A { i(x); }\nsolution B { o(x); }\n";
    std::string b = "data x: set;\nsolution B { o(x); }\nsolution A { i(x); }\n";
    CHECK(render_program(parse_program(a)) == render_program(parse_program(b)));
}

TEST_CASE("random well-formed programs roundtrip") {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 100; ++i) {
        ChamProgram p = testgen::random_program(rng);
        std::string once = render_program(p);
        std::string twice = render_program(parse_program(once));
        CHECK(once == twice);
    }
}

TEST_CASE("comments and whitespace are insignificant") {
    std::string text =
        "# leading comment\n"
        "data   a :  set ;  # trailing\n"
        "solution S {\n    i(a);   # molecule\n}\n";
    ChamProgram p = parse_program(text);
    CHECK(p.dataDecls.at("a") == SymbolKind::Set);
    CHECK(p.initial.count("S", {Atom::input("a")}) == 1);
}
