#include "jetcartan/parse.hpp"

#include <cctype>
#include <cstdint>

namespace jetcartan {

namespace {

struct Lexer {
    std::string_view text;
    std::size_t pos = 0;
    int line = 1;
    int col = 1;

    void advance() {
        if (pos < text.size()) {
            if (text[pos] == '\n') { ++line; col = 1; }
            else ++col;
            ++pos;
        }
    }
    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) advance();
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }
    bool eat(char c) {
        if (peek() == c) { advance(); return true; }
        return false;
    }
    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, line, col); }
};

struct Parser {
    Lexer lx;

    Expr parse() {
        Expr e = expression();
        if (lx.peek() != '\0') lx.fail("unexpected trailing input");
        return e;
    }

    Expr expression() {
        Expr e = term();
        for (;;) {
            if (lx.eat('+')) e = e + term();
            else if (lx.eat('-')) e = e - term();
            else return e;
        }
    }

    Expr term() {
        Expr e = unary();
        for (;;) {
            if (lx.eat('*')) e = e * unary();
            else if (lx.eat('/')) e = e / unary();
            else return e;
        }
    }

    Expr unary() {
        if (lx.eat('-')) return -unary();
        if (lx.eat('+')) return unary();
        return power();
    }

    Expr power() {
        Expr base = primary();
        if (lx.eat('^')) {
            // exponent: optionally parenthesized signed integer
            bool paren = lx.eat('(');
            bool neg = false;
            if (lx.eat('-')) neg = true;
            std::int64_t n = integer_literal();
            if (paren && !lx.eat(')')) lx.fail("expected ')' after exponent");
            return pow(base, static_cast<int>(neg ? -n : n));
        }
        return base;
    }

    std::int64_t integer_literal() {
        char c = lx.peek();
        if (!std::isdigit(static_cast<unsigned char>(c))) lx.fail("expected integer exponent");
        std::int64_t v = 0;
        while (lx.pos < lx.text.size() && std::isdigit(static_cast<unsigned char>(lx.text[lx.pos]))) {
            v = v * 10 + (lx.text[lx.pos] - '0');
            if (v > INT32_MAX) lx.fail("exponent too large");
            lx.advance();
        }
        return v;
    }

    Expr primary() {
        char c = lx.peek();
        if (c == '(') {
            lx.advance();
            Expr e = expression();
            if (!lx.eat(')')) lx.fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        if (c == '\0') lx.fail("unexpected end of input");
        lx.fail(std::string("unexpected character '") + c + "'");
    }

    Expr number() {
        std::int64_t ipart = 0;
        bool any = false;
        while (lx.pos < lx.text.size() && std::isdigit(static_cast<unsigned char>(lx.text[lx.pos]))) {
            if (ipart > (INT64_MAX - 9) / 10) lx.fail("numeric literal too large");
            ipart = ipart * 10 + (lx.text[lx.pos] - '0');
            lx.advance();
            any = true;
        }
        std::int64_t num = ipart, den = 1;
        if (lx.pos < lx.text.size() && lx.text[lx.pos] == '.') {
            lx.advance();
            bool frac = false;
            while (lx.pos < lx.text.size() && std::isdigit(static_cast<unsigned char>(lx.text[lx.pos]))) {
                if (num > (INT64_MAX - 9) / 10 || den > INT64_MAX / 10) lx.fail("numeric literal too large");
                num = num * 10 + (lx.text[lx.pos] - '0');
                den *= 10;
                lx.advance();
                frac = true;
            }
            if (!any && !frac) lx.fail("malformed number");
        } else if (!any) {
            lx.fail("malformed number");
        }
        return Expr::rational(num, den);
    }

    Expr identifier() {
        std::string name;
        while (lx.pos < lx.text.size() &&
               (std::isalnum(static_cast<unsigned char>(lx.text[lx.pos])) || lx.text[lx.pos] == '_')) {
            name += lx.text[lx.pos];
            lx.advance();
        }
        if (name == "i") return Expr::imaginary_unit();
        if (lx.peek() == '(') {
            lx.advance();
            Expr arg = expression();
            if (!lx.eat(')')) lx.fail("expected ')' after function argument");
            if (name == "sin") return sin(arg);
            if (name == "cos") return cos(arg);
            if (name == "exp") return exp(arg);
            if (name == "log") return log(arg);
            if (name == "sqrt") return sqrt(arg);
            lx.fail("unknown function '" + name + "'");
        }
        return Expr::variable(name);
    }
};

} // namespace

Expr parse_expr(std::string_view text) {
    Parser p{Lexer{text}};
    return p.parse();
}

} // namespace jetcartan
