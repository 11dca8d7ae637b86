#include "fiklik/formula.hpp"

#include <cctype>
#include <sstream>

namespace fiklik {

namespace {

enum class Tok { Atom, True, False, Not, Box, Dia, AndOp, OrOp, ImplOp, LParen, RParen, End };

const char* tok_name(Tok t) {
    switch (t) {
        case Tok::Atom: return "atom";
        case Tok::True: return "'true'";
        case Tok::False: return "'false'";
        case Tok::Not: return "'~'";
        case Tok::Box: return "'[]'";
        case Tok::Dia: return "'<>'";
        case Tok::AndOp: return "'&'";
        case Tok::OrOp: return "'|'";
        case Tok::ImplOp: return "'->'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::End: return "end of input";
    }
    return "?";
}

struct Token {
    Tok kind;
    std::string text;    // atom name
    std::size_t offset;  // byte offset of the first byte
};

class Lexer {
public:
    explicit Lexer(std::string_view s) : s_(s) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_ws();
            std::size_t at = pos_;
            if (pos_ >= s_.size()) {
                out.push_back({Tok::End, "", at});
                return out;
            }
            if (eat("->") || eat("\xE2\x86\x92")) {  // →
                out.push_back({Tok::ImplOp, "", at});
            } else if (eat("[]") || eat("\xE2\x96\xA1")) {  // □
                out.push_back({Tok::Box, "", at});
            } else if (eat("<>") || eat("\xE2\x97\x87")) {  // ◇
                out.push_back({Tok::Dia, "", at});
            } else if (eat("~") || eat("\xC2\xAC")) {  // ¬
                out.push_back({Tok::Not, "", at});
            } else if (eat("&") || eat("\xE2\x88\xA7")) {  // ∧
                out.push_back({Tok::AndOp, "", at});
            } else if (eat("|") || eat("\xE2\x88\xA8")) {  // ∨
                out.push_back({Tok::OrOp, "", at});
            } else if (eat("\xE2\x8A\xA4")) {  // ⊤
                out.push_back({Tok::True, "", at});
            } else if (eat("\xE2\x8A\xA5")) {  // ⊥
                out.push_back({Tok::False, "", at});
            } else if (eat("(")) {
                out.push_back({Tok::LParen, "", at});
            } else if (eat(")")) {
                out.push_back({Tok::RParen, "", at});
            } else if (std::islower(static_cast<unsigned char>(s_[pos_]))) {
                std::size_t start = pos_;
                while (pos_ < s_.size() &&
                       (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                    ++pos_;
                std::string word(s_.substr(start, pos_ - start));
                if (word == "true")
                    out.push_back({Tok::True, "", at});
                else if (word == "false")
                    out.push_back({Tok::False, "", at});
                else
                    out.push_back({Tok::Atom, std::move(word), at});
            } else {
                throw ParseError(at, {"atom", "'true'", "'false'", "'~'", "'[]'", "'<>'",
                                      "'&'", "'|'", "'->'", "'('", "')'"},
                                 "unrecognized character at byte " + std::to_string(at));
            }
        }
    }

private:
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(std::string_view w) {
        if (s_.substr(pos_, w.size()) == w) {
            pos_ += w.size();
            return true;
        }
        return false;
    }
    std::string_view s_;
    std::size_t pos_ = 0;
};

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    Formula run() {
        Formula f = parse_impl();
        if (cur().kind != Tok::End) fail({"'&'", "'|'", "'->'", "end of input"});
        return f;
    }

private:
    const Token& cur() const { return toks_[i_]; }
    void advance() { ++i_; }

    [[noreturn]] void fail(std::vector<std::string> expected) {
        std::ostringstream msg;
        msg << "syntax error at byte " << cur().offset << ": found " << tok_name(cur().kind)
            << ", expected one of:";
        for (const auto& e : expected) msg << ' ' << e;
        throw ParseError(cur().offset, std::move(expected), msg.str());
    }

    void expect(Tok t) {
        if (cur().kind != t) fail({tok_name(t)});
        advance();
    }

    // impl := or ('->' impl)?        right-associative
    Formula parse_impl() {
        Formula lhs = parse_or();
        if (cur().kind == Tok::ImplOp) {
            advance();
            return Formula::impl(std::move(lhs), parse_impl());
        }
        return lhs;
    }

    // or := and ('|' and)*           left-associative
    Formula parse_or() {
        Formula f = parse_and();
        while (cur().kind == Tok::OrOp) {
            advance();
            f = Formula::disj(std::move(f), parse_and());
        }
        return f;
    }

    // and := unary ('&' unary)*      left-associative
    Formula parse_and() {
        Formula f = parse_unary();
        while (cur().kind == Tok::AndOp) {
            advance();
            f = Formula::conj(std::move(f), parse_unary());
        }
        return f;
    }

    Formula parse_unary() {
        switch (cur().kind) {
            case Tok::Not:
                advance();
                return Formula::neg(parse_unary());
            case Tok::Box:
                advance();
                return Formula::box(parse_unary());
            case Tok::Dia:
                advance();
                return Formula::dia(parse_unary());
            case Tok::Atom: {
                Formula f = Formula::atom(cur().text);
                advance();
                return f;
            }
            case Tok::True:
                advance();
                return Formula::top();
            case Tok::False:
                advance();
                return Formula::bot();
            case Tok::LParen: {
                advance();
                Formula f = parse_impl();
                if (cur().kind != Tok::RParen) fail({"'&'", "'|'", "'->'", "')'"});
                advance();
                return f;
            }
            default:
                fail({"atom", "'true'", "'false'", "'~'", "'[]'", "'<>'", "'('"});
        }
    }

    std::vector<Token> toks_;
    std::size_t i_ = 0;
};

// Precedence levels for rendering: -> 1, | 2, & 3, unary/nullary 4.
int prec(const Formula& f) {
    switch (f.kind()) {
        case Conn::Impl: return 1;
        case Conn::Or: return 2;
        case Conn::And: return 3;
        default: return 4;
    }
}

void render_into(const Formula& f, int min_prec, std::string& out) {
    int p = prec(f);
    bool parens = p < min_prec;
    if (parens) out += '(';
    switch (f.kind()) {
        case Conn::Atom:
            out += f.atom_name();
            break;
        case Conn::Top:
            out += "true";
            break;
        case Conn::Bot:
            out += "false";
            break;
        case Conn::Box:
            out += "[]";
            render_into(f.body(), 4, out);
            break;
        case Conn::Dia:
            out += "<>";
            render_into(f.body(), 4, out);
            break;
        case Conn::Impl:
            render_into(f.left(), p + 1, out);
            out += " -> ";
            render_into(f.right(), p, out);
            break;
        case Conn::Or:
            render_into(f.left(), p, out);
            out += " | ";
            render_into(f.right(), p + 1, out);
            break;
        case Conn::And:
            render_into(f.left(), p, out);
            out += " & ";
            render_into(f.right(), p + 1, out);
            break;
    }
    if (parens) out += ')';
}

}  // namespace

Formula parse_formula(std::string_view text) {
    return Parser(Lexer(text).run()).run();
}

std::string render(const Formula& f) {
    std::string out;
    render_into(f, 0, out);
    return out;
}

}  // namespace fiklik
