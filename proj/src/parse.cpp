#include "fracexp/parse.hpp"

#include "fracexp/errors.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <string>

namespace fracexp {

namespace {

class Parser {
public:
    Parser(std::string_view src, const ParseContext& ctx) : s_(src), ctx_(ctx) {}

    Expr run() {
        Expr e = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg, std::size_t at) const { throw ParseError(msg, at + 1); }
    [[noreturn]] void fail(const std::string& msg) const { fail(msg, pos_); }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool peek(char c) {
        skip();
        return pos_ < s_.size() && s_[pos_] == c;
    }
    bool accept(char c) {
        if (peek(c)) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= s_.size()) fail(std::string("expected '") + c + "' before end of input");
            fail(std::string("expected '") + c + "'");
        }
    }
    std::string ident() {
        skip();
        std::size_t b = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        return std::string(s_.substr(b, pos_ - b));
    }
    bool at_number() {
        skip();
        return pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.');
    }
    double number() {
        skip();
        const char* b = s_.data() + pos_;
        double v = 0.0;
        auto res = std::from_chars(b, s_.data() + s_.size(), v);
        if (res.ec != std::errc() || res.ptr == b) fail("expected a number");
        pos_ += static_cast<std::size_t>(res.ptr - b);
        return v;
    }
    int integer() {
        skip();
        if (pos_ < s_.size() && s_[pos_] == '-') fail("exponent must be a nonnegative integer");
        const char* b = s_.data() + pos_;
        int v = 0;
        auto res = std::from_chars(b, s_.data() + s_.size(), v);
        if (res.ec != std::errc() || res.ptr == b) fail("expected a nonnegative integer exponent");
        pos_ += static_cast<std::size_t>(res.ptr - b);
        if (pos_ < s_.size() && s_[pos_] == '.') fail("exponent must be an integer");
        return v;
    }

    double time() {
        skip();
        const std::size_t at = pos_;
        double t = 0.0;
        if (at_number()) {
            t = number();
        } else {
            const std::string id = ident();
            if (id == "T") {
                auto T = ctx_.T();
                if (!T) fail("symbol T needs a horizon or grid", at);
                t = *T;
            } else if (id.size() >= 2 && id[0] == 't' &&
                       id.find_first_not_of("0123456789", 1) == std::string::npos) {
                if (!ctx_.grid) fail("grid symbol " + id + " needs a grid", at);
                const int i = std::stoi(id.substr(1));
                if (i < 1 || i > ctx_.grid->J()) fail("unknown grid symbol " + id, at);
                t = ctx_.grid->t(i);
            } else if (id.empty()) {
                fail(pos_ >= s_.size() ? "expected a time before end of input" : "expected a time", at);
            } else {
                fail("unknown symbol " + id, at);
            }
        }
        if (t < 0.0) fail("time outside [0, T]", at);
        if (auto T = ctx_.T(); T && t > *T * (1.0 + 1e-12)) fail("time outside [0, T]", at);
        return t;
    }

    Expr expr() {
        Expr e = term();
        for (;;) {
            if (accept('+')) e = e + term();
            else if (accept('-')) e = e - term();
            else return e;
        }
    }
    Expr term() {
        Expr e = unary();
        for (;;) {
            if (accept('*')) {
                e = e * unary();
            } else if (peek('/')) {
                const std::size_t at = pos_;
                ++pos_;
                Expr d = unary();
                if (!d.is_const() || d.const_value() == 0.0) fail("divisor must be a nonzero constant", at);
                e = e * constant(1.0 / d.const_value());
            } else {
                return e;
            }
        }
    }
    Expr unary() {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return factor();
    }
    Expr factor() {
        Expr b = primary();
        if (accept('^')) return power(b, integer());
        return b;
    }
    Expr primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        if (at_number()) return constant(number());
        if (accept('(')) {
            Expr e = expr();
            expect(')');
            return e;
        }
        const std::size_t at = pos_;
        const std::string id = ident();
        if (id == "B") {
            expect('(');
            const double t = time();
            expect(')');
            return sample(t);
        }
        if (id == "IB" || id == "IB2") {
            expect('(');
            const std::size_t ta = pos_;
            const double a = time();
            expect(',');
            const double b = time();
            expect(')');
            if (b < a) fail("integral limits must satisfy a <= b", ta);
            return id == "IB" ? time_int(a, b) : time_int_sq(a, b);
        }
        if (id == "WI") {
            expect('(');
            Poly f = poly();
            expect(';');
            const std::size_t ta = pos_;
            const double a = time();
            expect(',');
            const double b = time();
            expect(')');
            if (b < a) fail("integral limits must satisfy a <= b", ta);
            return wiener_int(PiecewisePoly::on(a, b, f), a, b);
        }
        if (id == "exp") {
            expect('(');
            Expr e = expr();
            expect(')');
            return exp(e);
        }
        if (id.empty()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        fail("unknown symbol " + id, at);
    }

    // polynomial sub-grammar in the variable s
    Poly poly() {
        Poly p = pterm();
        for (;;) {
            if (accept('+')) p += pterm();
            else if (accept('-')) p += pterm() * -1.0;
            else return p;
        }
    }
    Poly pterm() {
        Poly p = pfactor();
        while (accept('*')) p = p * pfactor();
        return p;
    }
    Poly pfactor() {
        if (accept('-')) return pfactor() * -1.0;
        Poly b;
        skip();
        if (accept('(')) {
            b = poly();
            expect(')');
        } else if (at_number()) {
            b = Poly::constant(number());
            if (b.is_zero()) b = Poly{};
        } else {
            const std::size_t at = pos_;
            const std::string id = ident();
            if (id != "s") fail(id.empty() ? "expected a polynomial in s" : "unknown symbol " + id, at);
            b = Poly{0.0, 1.0};
        }
        if (accept('^')) {
            const int n = integer();
            Poly r = Poly::constant(1.0);
            for (int k = 0; k < n; ++k) r = r * b;
            return r;
        }
        return b;
    }

    std::string_view s_;
    const ParseContext& ctx_;
    std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view src, const ParseContext& ctx) { return Parser(src, ctx).run(); }

}  // namespace fracexp
