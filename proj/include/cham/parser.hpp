#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "cham/program.hpp"
#include "cham/term.hpp"

// Concrete syntax for CHAM programs.
//
//   program   ::= decl*
//   decl      ::= "data" NAME ":" KIND ";"
//               | "hormone" EHNAME ";"
//               | "external" NAME ("," NAME)* ";"
//               | "solution" NAME "{" molecules "}"
//               | "rule" NAME ":" groups "=>" groups ";"
//   groups    ::= group ("//" group)*
//   group     ::= NAME "{" molecules "}"
//   molecules ::= molecule (";" molecule)* ";"?
//   molecule  ::= atom ("<>" atom)*
//   atom      ::= PROC | "i" "(" NAME ")" | "o" "(" NAME ")"
//               | "g" "(" EHNAME ")" | "d" "(" EHNAME ")"
//
// "#" starts a comment that runs to end of line. Whitespace is free between
// tokens. Processor and hormone names are the fixed alphabets of term.hpp;
// data symbol names are arbitrary identifiers introduced by "data".

namespace cham {

struct SourceSpan {
    int line = 1;
    int column = 1;
};

struct ParseError : std::runtime_error {
    enum class Kind { Syntax, UnknownSymbol, DuplicateRule, KindMismatch };

    Kind kind;
    SourceSpan span;

    ParseError(Kind k, SourceSpan sp, const std::string& msg)
        : std::runtime_error("line " + std::to_string(sp.line) + ":" + std::to_string(sp.column) + ": " + msg),
          kind(k),
          span(sp) {}
};

namespace detail {

struct Token {
    enum class Kind { Ident, LParen, RParen, LBrace, RBrace, Semi, Colon, Comma, Compose, Slashes, Arrow, End };
    Kind kind;
    std::string text;
    SourceSpan span;
};

inline std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto push = [&](Token::Kind k, std::string text, SourceSpan sp) { out.push_back({k, std::move(text), sp}); };
    while (i < src.size()) {
        char c = src[i];
        if (c == '\n') {
            ++line;
            col = 1;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++col;
            ++i;
            continue;
        }
        if (c == '#') {
            while (i < src.size() && src[i] != '\n') ++i;
            continue;
        }
        SourceSpan sp{line, col};
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
            push(Token::Kind::Ident, std::string(src.substr(i, j - i)), sp);
            col += static_cast<int>(j - i);
            i = j;
            continue;
        }
        auto two = src.substr(i, 2);
        if (two == "<>") {
            push(Token::Kind::Compose, "<>", sp);
            i += 2;
            col += 2;
            continue;
        }
        if (two == "//") {
            push(Token::Kind::Slashes, "//", sp);
            i += 2;
            col += 2;
            continue;
        }
        if (two == "=>") {
            push(Token::Kind::Arrow, "=>", sp);
            i += 2;
            col += 2;
            continue;
        }
        Token::Kind k;
        switch (c) {
            case '(': k = Token::Kind::LParen; break;
            case ')': k = Token::Kind::RParen; break;
            case '{': k = Token::Kind::LBrace; break;
            case '}': k = Token::Kind::RBrace; break;
            case ';': k = Token::Kind::Semi; break;
            case ':': k = Token::Kind::Colon; break;
            case ',': k = Token::Kind::Comma; break;
            default:
                throw ParseError(ParseError::Kind::Syntax, sp, std::string("unexpected character '") + c + "'");
        }
        push(k, std::string(1, c), sp);
        ++i;
        ++col;
    }
    out.push_back({Token::Kind::End, "", {line, col}});
    return out;
}

class Parser {
  public:
    explicit Parser(std::string_view src) : toks_(lex(src)) {}

    ChamProgram parse() {
        ChamProgram p;
        while (!at(Token::Kind::End)) {
            const Token& t = peek();
            if (t.kind != Token::Kind::Ident)
                throw ParseError(ParseError::Kind::Syntax, t.span, "expected a declaration, got '" + t.text + "'");
            if (t.text == "data")
                parse_data(p);
            else if (t.text == "hormone")
                parse_hormone(p);
            else if (t.text == "external")
                parse_external(p);
            else if (t.text == "solution")
                parse_solution(p);
            else if (t.text == "rule")
                parse_rule(p);
            else
                throw ParseError(ParseError::Kind::Syntax, t.span, "unknown declaration '" + t.text + "'");
        }
        validate(p);
        return p;
    }

    Molecule parse_single_molecule(const ChamProgram& ctx) {
        Molecule m = parse_molecule(ctx);
        const Token& t = peek();
        if (t.kind != Token::Kind::End)
            throw ParseError(ParseError::Kind::Syntax, t.span, "trailing input after molecule");
        return m;
    }

  private:
    const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
    bool at(Token::Kind k) const { return peek().kind == k; }
    const Token& advance() { return toks_[pos_++]; }

    const Token& expect(Token::Kind k, const char* what) {
        const Token& t = peek();
        if (t.kind != k)
            throw ParseError(ParseError::Kind::Syntax, t.span,
                             std::string("expected ") + what + ", got '" + (t.text.empty() ? "<eof>" : t.text) + "'");
        return advance();
    }

    std::string expect_ident(const char* what) { return expect(Token::Kind::Ident, what).text; }

    void parse_data(ChamProgram& p) {
        advance();
        const Token& nameTok = peek();
        std::string name = expect_ident("a data symbol name");
        expect(Token::Kind::Colon, "':'");
        const Token& kindTok = peek();
        std::string kindText = expect_ident("a kind (matrix|vector|parameter|set)");
        auto kind = symbol_kind_from_string(kindText);
        if (!kind)
            throw ParseError(ParseError::Kind::Syntax, kindTok.span, "unknown kind '" + kindText + "'");
        if (p.dataDecls.count(name))
            throw ParseError(ParseError::Kind::Syntax, nameTok.span, "data symbol '" + name + "' already declared");
        p.dataDecls[name] = *kind;
        expect(Token::Kind::Semi, "';'");
    }

    void parse_hormone(ChamProgram& p) {
        advance();
        const Token& t = peek();
        std::string name = expect_ident("a hormone name");
        auto h = hormone_from_string(name);
        if (!h) throw ParseError(ParseError::Kind::UnknownSymbol, t.span, "unknown hormone '" + name + "'");
        p.hormoneDecls.insert(*h);
        expect(Token::Kind::Semi, "';'");
    }

    void parse_external(ChamProgram& p) {
        advance();
        while (true) {
            const Token& t = peek();
            std::string name = expect_ident("a data symbol name");
            externalSpans_.emplace_back(name, t.span);
            p.externals.insert(name);
            if (at(Token::Kind::Comma)) {
                advance();
                continue;
            }
            break;
        }
        expect(Token::Kind::Semi, "';'");
    }

    void parse_solution(ChamProgram& p) {
        advance();
        std::string name = expect_ident("a sub-solution name");
        expect(Token::Kind::LBrace, "'{'");
        parse_molecule_list(p, [&](Molecule m) { p.initial.add(name, std::move(m)); });
        expect(Token::Kind::RBrace, "'}'");
    }

    void parse_rule(ChamProgram& p) {
        advance();
        const Token& nameTok = peek();
        std::string name = expect_ident("a rule name");
        if (p.find_rule(name))
            throw ParseError(ParseError::Kind::DuplicateRule, nameTok.span, "duplicate rule '" + name + "'");
        expect(Token::Kind::Colon, "':'");
        ReactionRule r;
        r.name = name;
        parse_groups(p, r.consumes);
        expect(Token::Kind::Arrow, "'=>'");
        parse_groups(p, r.produces);
        expect(Token::Kind::Semi, "';'");
        if (r.consumes.empty())
            throw ParseError(ParseError::Kind::Syntax, nameTok.span, "rule '" + name + "' consumes nothing");
        p.rules.push_back(std::move(r));
    }

    void parse_groups(ChamProgram& p, Solution& into) {
        while (true) {
            std::string part = expect_ident("a sub-solution name");
            expect(Token::Kind::LBrace, "'{'");
            parse_molecule_list(p, [&](Molecule m) { into.add(part, std::move(m)); });
            expect(Token::Kind::RBrace, "'}'");
            if (at(Token::Kind::Slashes)) {
                advance();
                continue;
            }
            break;
        }
    }

    template <typename Sink>
    void parse_molecule_list(const ChamProgram& p, Sink sink) {
        sink(parse_molecule(p));
        while (at(Token::Kind::Semi)) {
            advance();
            if (at(Token::Kind::RBrace)) break;  // trailing ';'
            sink(parse_molecule(p));
        }
    }

    Molecule parse_molecule(const ChamProgram& p) {
        Molecule m;
        m.push_back(parse_atom(p));
        while (at(Token::Kind::Compose)) {
            advance();
            m.push_back(parse_atom(p));
        }
        return m;
    }

    Atom parse_atom(const ChamProgram& p) {
        const Token& t = peek();
        std::string head = expect_ident("an atom");
        if (at(Token::Kind::LParen)) {
            if (head != "i" && head != "o" && head != "g" && head != "d")
                throw ParseError(ParseError::Kind::Syntax, t.span, "unknown connector '" + head + "'");
            advance();
            const Token& argTok = peek();
            std::string arg = expect_ident("a symbol name");
            expect(Token::Kind::RParen, "')'");
            if (head == "i" || head == "o") {
                if (!p.dataDecls.count(arg)) {
                    if (hormone_from_string(arg))
                        throw ParseError(ParseError::Kind::KindMismatch, argTok.span,
                                         "'" + arg + "' is a hormone symbol; " + head + "(.) takes a data symbol");
                    throw ParseError(ParseError::Kind::UnknownSymbol, argTok.span,
                                     "undeclared data symbol '" + arg + "'");
                }
                return head == "i" ? Atom::input(arg) : Atom::output(arg);
            }
            auto h = hormone_from_string(arg);
            if (!h) {
                if (p.dataDecls.count(arg))
                    throw ParseError(ParseError::Kind::KindMismatch, argTok.span,
                                     "'" + arg + "' is a data symbol; " + head + "(.) takes a hormone symbol");
                throw ParseError(ParseError::Kind::UnknownSymbol, argTok.span, "unknown hormone '" + arg + "'");
            }
            if (!p.hormoneDecls.count(*h))
                throw ParseError(ParseError::Kind::UnknownSymbol, argTok.span, "undeclared hormone '" + arg + "'");
            return head == "g" ? Atom::generate(*h) : Atom::dissipate(*h);
        }
        auto proc = processor_from_string(head);
        if (!proc) {
            if (p.dataDecls.count(head))
                throw ParseError(ParseError::Kind::KindMismatch, t.span,
                                 "data symbol '" + head + "' cannot stand alone; wrap it in i(.) or o(.)");
            throw ParseError(ParseError::Kind::UnknownSymbol, t.span, "unknown processing element '" + head + "'");
        }
        return Atom::processor(*proc);
    }

    void validate(const ChamProgram& p) {
        for (const auto& [name, span] : externalSpans_)
            if (!p.dataDecls.count(name))
                throw ParseError(ParseError::Kind::UnknownSymbol, span, "undeclared data symbol '" + name + "'");
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::vector<std::pair<std::string, SourceSpan>> externalSpans_;
};

}  // namespace detail

inline ChamProgram parse_program(std::string_view text) { return detail::Parser(text).parse(); }

inline Molecule parse_molecule(std::string_view text, const ChamProgram& ctx) {
    return detail::Parser(text).parse_single_molecule(ctx);
}

// Canonical rendering. Deterministic: data/hormone/external declarations and
// sub-solution parts sorted by name, rules kept in declaration order, one
// molecule per line. parse_program(render_program(p)) reproduces p.
inline std::string render_program(const ChamProgram& p) {
    std::string out = "# cham program\n";
    for (const auto& [name, kind] : p.dataDecls)
        out += "data " + name + ": " + to_string(kind) + ";\n";
    if (!p.externals.empty()) {
        out += "external ";
        bool first = true;
        for (const auto& name : p.externals) {
            if (!first) out += ", ";
            first = false;
            out += name;
        }
        out += ";\n";
    }
    for (Hormone h : p.hormoneDecls) out += std::string("hormone ") + to_string(h) + ";\n";

    Solution initial = p.initial;
    initial.prune();
    for (const auto& [part, ms] : initial.parts) {
        out += "solution " + part + " {\n";
        for (const auto& [m, n] : ms)
            for (int i = 0; i < n; ++i) out += "  " + render_molecule(m) + ";\n";
        out += "}\n";
    }

    auto renderGroups = [](const Solution& s) {
        std::string text;
        Solution pr = s;
        pr.prune();
        bool firstPart = true;
        for (const auto& [part, ms] : pr.parts) {
            text += firstPart ? "  " : "  // ";
            firstPart = false;
            text += part + " {\n";
            for (const auto& [m, n] : ms)
                for (int i = 0; i < n; ++i) text += "    " + render_molecule(m) + ";\n";
            text += "  }\n";
        }
        return text;
    };
    for (const auto& r : p.rules) {
        out += "rule " + r.name + ":\n";
        out += renderGroups(r.consumes);
        out += "  =>\n";
        out += renderGroups(r.produces);
        out += ";\n";
    }
    return out;
}

}  // namespace cham
