#include "etrnn/parser.hpp"

#include <cctype>
#include <vector>

#include "etrnn/error.hpp"

namespace etrnn {

namespace {

enum class Tok { ident, number, lparen, rparen, plus, minus, star, slash, lt, eq, amp, pipe, end };

struct Token {
    Tok kind;
    std::string text;
    int line, col;
};

std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    size_t i = 0;
    auto push = [&](Tok k, std::string text, int l, int c) {
        out.push_back(Token{k, std::move(text), l, c});
    };
    while (i < src.size()) {
        char c = src[i];
        if (c == '\n') {
            ++line;
            col = 1;
            ++i;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            ++col;
            ++i;
            continue;
        }
        int tl = line, tc = col;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\''))
                ++j;
            push(Tok::ident, std::string(src.substr(i, j - i)), tl, tc);
            col += static_cast<int>(j - i);
            i = j;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            if (j + 1 < src.size() && src[j] == '.' &&
                std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
                ++j;
                while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            }
            push(Tok::number, std::string(src.substr(i, j - i)), tl, tc);
            col += static_cast<int>(j - i);
            i = j;
            continue;
        }
        Tok k;
        switch (c) {
            case '(': k = Tok::lparen; break;
            case ')': k = Tok::rparen; break;
            case '+': k = Tok::plus; break;
            case '-': k = Tok::minus; break;
            case '*': k = Tok::star; break;
            case '/': k = Tok::slash; break;
            case '<': k = Tok::lt; break;
            case '=': k = Tok::eq; break;
            case '&': k = Tok::amp; break;
            case '|': k = Tok::pipe; break;
            default:
                throw Error(Errc::parse, line, col,
                            std::string("unexpected character '") + c + "'");
        }
        push(k, std::string(1, c), tl, tc);
        ++col;
        ++i;
    }
    out.push_back(Token{Tok::end, "", line, col});
    return out;
}

// A parse result that is either a term or a formula.
struct Entity {
    Term term;
    Formula formula;
};

class Parser {
public:
    Parser(std::string_view text, const Signature& sig) : sig_(sig), toks_(lex(text)) {}

    Formula formula() {
        Entity e = entity();
        finish();
        if (!e.formula) fail(toks_[pos_], "expected a formula, found an arithmetic term");
        return e.formula;
    }

    Term term() {
        Entity e = entity();
        finish();
        if (!e.term) fail(toks_[pos_], "expected an arithmetic term, found a formula");
        return e.term;
    }

private:
    const Signature& sig_;
    std::vector<Token> toks_;
    size_t pos_ = 0;

    const Token& peek() const { return toks_[pos_]; }
    const Token& advance() { return toks_[pos_++]; }
    bool at(Tok k) const { return peek().kind == k; }

    [[noreturn]] void fail(const Token& t, const std::string& msg) const {
        throw Error(Errc::parse, t.line, t.col, msg);
    }

    void finish() {
        if (!at(Tok::end)) fail(peek(), "unexpected trailing input '" + peek().text + "'");
    }

    Term need_term(const Entity& e, const Token& op) {
        if (!e.term) fail(op, "operand of '" + op.text + "' must be an arithmetic term");
        return e.term;
    }

    Formula need_formula(const Entity& e, const Token& op) {
        if (!e.formula) fail(op, "operand of '" + op.text + "' must be a formula");
        return e.formula;
    }

    Entity entity() {
        if (at(Tok::ident) && peek().text == "exists") {
            Token kw = advance();
            if (!at(Tok::ident) || peek().text == "exists")
                fail(peek(), "expected a variable name after 'exists'");
            std::string var = advance().text;
            Entity body = entity();
            if (!body.formula) fail(kw, "body of 'exists' must be a formula");
            return Entity{nullptr, mk_exists(std::move(var), body.formula)};
        }
        return disj();
    }

    Entity disj() {
        Entity lhs = conj();
        while (at(Tok::pipe)) {
            Token op = advance();
            Formula l = need_formula(lhs, op);
            Entity r = conj();
            lhs = Entity{nullptr, mk_or(l, need_formula(r, op))};
        }
        return lhs;
    }

    Entity conj() {
        Entity lhs = cmp();
        while (at(Tok::amp)) {
            Token op = advance();
            Formula l = need_formula(lhs, op);
            Entity r = cmp();
            lhs = Entity{nullptr, mk_and(l, need_formula(r, op))};
        }
        return lhs;
    }

    Entity cmp() {
        Entity lhs = sum();
        if (at(Tok::lt) || at(Tok::eq)) {
            Token op = advance();
            Term l = need_term(lhs, op);
            Entity r = sum();
            Term rt = need_term(r, op);
            Formula f = (op.kind == Tok::lt) ? mk_lt(l, rt) : mk_eq(l, rt);
            return Entity{nullptr, f};
        }
        return lhs;
    }

    Entity sum() {
        Entity lhs = prod();
        while (at(Tok::plus) || at(Tok::minus)) {
            Token op = advance();
            Term l = need_term(lhs, op);
            Entity r = prod();
            Term rt = need_term(r, op);
            lhs = Entity{op.kind == Tok::plus ? mk_add(l, rt) : mk_sub(l, rt), nullptr};
        }
        return lhs;
    }

    Entity prod() {
        Entity lhs = unary();
        while (at(Tok::star) || at(Tok::slash)) {
            Token op = advance();
            Term l = need_term(lhs, op);
            Entity r = unary();
            Term rt = need_term(r, op);
            lhs = Entity{op.kind == Tok::star ? mk_mul(l, rt) : mk_div(l, rt), nullptr};
        }
        return lhs;
    }

    Entity unary() {
        if (at(Tok::minus)) {
            Token op = advance();
            Entity arg = unary();
            return Entity{mk_neg(need_term(arg, op)), nullptr};
        }
        return atom();
    }

    Entity atom() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::number: {
                advance();
                return Entity{mk_const(rat_from_string(t.text)), nullptr};
            }
            case Tok::ident: {
                if (t.text == "exists") fail(t, "'exists' is not allowed here; parenthesize it");
                Token name = advance();
                if (at(Tok::lparen)) {
                    if (!sig_.has(name.text))
                        throw Error(Errc::symbol, name.line, name.col,
                                    "unknown function symbol '" + name.text + "'");
                    advance();
                    Entity arg = entity();
                    if (!arg.term) fail(name, "argument of '" + name.text + "' must be a term");
                    if (!at(Tok::rparen)) fail(peek(), "expected ')'");
                    advance();
                    return Entity{mk_apply(name.text, arg.term), nullptr};
                }
                return Entity{mk_var(name.text), nullptr};
            }
            case Tok::lparen: {
                advance();
                Entity inner = entity();
                if (!at(Tok::rparen)) fail(peek(), "expected ')'");
                advance();
                return inner;
            }
            default:
                fail(t, t.kind == Tok::end ? "unexpected end of input"
                                           : "unexpected '" + t.text + "'");
        }
    }
};

} // namespace

Formula parse_formula(std::string_view text, const Signature& sig) {
    return Parser(text, sig).formula();
}

Term parse_term(std::string_view text, const Signature& sig) {
    return Parser(text, sig).term();
}

} // namespace etrnn
