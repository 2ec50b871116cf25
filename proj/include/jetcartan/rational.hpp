#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

namespace jetcartan {

// Exact rational on int64 with overflow-checked arithmetic. Checked ops
// return nullopt on overflow so constant folding can simply be skipped.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(std::int64_t n) : num_(n), den_(1) {}
    Rational(std::int64_t n, std::int64_t d) {
        if (d == 0) throw std::domain_error("rational with zero denominator");
        if (d < 0) { n = -n; d = -d; }
        const std::int64_t g = std::gcd(n < 0 ? -n : n, d);
        num_ = g ? n / g : n;
        den_ = g ? d / g : d;
    }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_one() const { return num_ == 1 && den_ == 1; }
    bool is_integer() const { return den_ == 1; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    static std::optional<Rational> checked_add(const Rational& a, const Rational& b) {
        __int128 n = (__int128)a.num_ * b.den_ + (__int128)b.num_ * a.den_;
        __int128 d = (__int128)a.den_ * b.den_;
        return make_checked(n, d);
    }
    static std::optional<Rational> checked_mul(const Rational& a, const Rational& b) {
        __int128 n = (__int128)a.num_ * b.num_;
        __int128 d = (__int128)a.den_ * b.den_;
        return make_checked(n, d);
    }
    static std::optional<Rational> checked_div(const Rational& a, const Rational& b) {
        if (b.is_zero()) return std::nullopt;
        __int128 n = (__int128)a.num_ * b.den_;
        __int128 d = (__int128)a.den_ * b.num_;
        if (d < 0) { n = -n; d = -d; }
        return make_checked(n, d);
    }
    Rational operator-() const { return Rational(-num_, den_); }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }

    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    // Exact square root if num/den are both perfect squares (and >= 0).
    std::optional<Rational> exact_sqrt() const {
        if (num_ < 0) return std::nullopt;
        auto isqrt = [](std::int64_t v) -> std::optional<std::int64_t> {
            if (v < 0) return std::nullopt;
            std::int64_t r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
            for (std::int64_t c = r > 1 ? r - 1 : 0; c <= r + 1; ++c)
                if (c * c == v) return c;
            return std::nullopt;
        };
        auto n = isqrt(num_);
        auto d = isqrt(den_);
        if (n && d) return Rational(*n, *d);
        return std::nullopt;
    }

private:
    static std::optional<Rational> make_checked(__int128 n, __int128 d) {
        if (d == 0) return std::nullopt;
        __int128 a = n < 0 ? -n : n, b = d;
        while (b) { __int128 t = a % b; a = b; b = t; }
        if (a) { n /= a; d /= a; }
        const __int128 lim = INT64_MAX;
        if (n > lim || n < -lim || d > lim || d < -lim) return std::nullopt;
        return Rational(static_cast<std::int64_t>(n), static_cast<std::int64_t>(d));
    }

    std::int64_t num_;
    std::int64_t den_;
};

// Exact complex number with rational real and imaginary parts.
struct ComplexRational {
    Rational re;
    Rational im;

    ComplexRational() = default;
    ComplexRational(Rational r) : re(r), im(0) {}
    ComplexRational(Rational r, Rational i) : re(r), im(i) {}

    bool is_zero() const { return re.is_zero() && im.is_zero(); }
    bool is_one() const { return re.is_one() && im.is_zero(); }
    bool is_real() const { return im.is_zero(); }

    static std::optional<ComplexRational> checked_add(const ComplexRational& a, const ComplexRational& b) {
        auto r = Rational::checked_add(a.re, b.re);
        auto i = Rational::checked_add(a.im, b.im);
        if (r && i) return ComplexRational(*r, *i);
        return std::nullopt;
    }
    static std::optional<ComplexRational> checked_mul(const ComplexRational& a, const ComplexRational& b) {
        auto rr = Rational::checked_mul(a.re, b.re);
        auto ii = Rational::checked_mul(a.im, b.im);
        auto ri = Rational::checked_mul(a.re, b.im);
        auto ir = Rational::checked_mul(a.im, b.re);
        if (!(rr && ii && ri && ir)) return std::nullopt;
        auto re = Rational::checked_add(*rr, -*ii);
        auto im = Rational::checked_add(*ri, *ir);
        if (re && im) return ComplexRational(*re, *im);
        return std::nullopt;
    }
    static std::optional<ComplexRational> checked_div(const ComplexRational& a, const ComplexRational& b) {
        // a / b = a * conj(b) / |b|^2
        auto b2r = Rational::checked_mul(b.re, b.re);
        auto b2i = Rational::checked_mul(b.im, b.im);
        if (!(b2r && b2i)) return std::nullopt;
        auto n2 = Rational::checked_add(*b2r, *b2i);
        if (!n2 || n2->is_zero()) return std::nullopt;
        auto num = checked_mul(a, ComplexRational(b.re, -b.im));
        if (!num) return std::nullopt;
        auto re = Rational::checked_div(num->re, *n2);
        auto im = Rational::checked_div(num->im, *n2);
        if (re && im) return ComplexRational(*re, *im);
        return std::nullopt;
    }
    ComplexRational operator-() const { return ComplexRational(-re, -im); }

    friend bool operator==(const ComplexRational& a, const ComplexRational& b) {
        return a.re == b.re && a.im == b.im;
    }
};

} // namespace jetcartan
