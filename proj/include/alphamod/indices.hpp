#pragma once

#include <charconv>
#include <cmath>
#include <compare>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace alphamod {

class Rational {
public:
    constexpr Rational() = default;
    constexpr Rational(std::int64_t num, std::int64_t den = 1) : num_(num), den_(den) {
        if (den_ == 0) throw std::invalid_argument("Rational: zero denominator");
        normalize();
    }

    constexpr std::int64_t num() const { return num_; }
    constexpr std::int64_t den() const { return den_; }
    constexpr double to_double() const { return double(num_) / double(den_); }

    friend constexpr Rational operator+(Rational a, Rational b) {
        return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
    }
    friend constexpr Rational operator-(Rational a, Rational b) {
        return {a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_};
    }
    friend constexpr Rational operator*(Rational a, Rational b) {
        return {a.num_ * b.num_, a.den_ * b.den_};
    }
    friend constexpr Rational operator/(Rational a, Rational b) {
        return {a.num_ * b.den_, a.den_ * b.num_};
    }
    constexpr Rational operator-() const { return {-num_, den_}; }

    friend constexpr bool operator==(Rational a, Rational b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend constexpr std::strong_ordering operator<=>(Rational a, Rational b) {
        return a.num_ * b.den_ <=> b.num_ * a.den_;
    }

    std::string str() const {
        return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
    }
    friend std::ostream& operator<<(std::ostream& os, Rational r) { return os << r.str(); }

private:
    constexpr void normalize() {
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

inline Rational min(Rational a, Rational b) { return a < b ? a : b; }
inline Rational max(Rational a, Rational b) { return a < b ? b : a; }

// A Lebesgue exponent p in [1, inf], stored through its reciprocal.
class Exponent {
public:
    constexpr Exponent() : recip_(1, 2) {}

    static Exponent from_recip(Rational recip) {
        if (recip < Rational(0) || recip > Rational(1))
            throw std::invalid_argument("Exponent: 1/p must lie in [0,1], got " + recip.str());
        Exponent e;
        e.recip_ = recip;
        return e;
    }
    static Exponent from_p(Rational p) {
        if (p < Rational(1)) throw std::invalid_argument("Exponent: p must be >= 1, got " + p.str());
        return from_recip(Rational(1) / p);
    }
    static Exponent infinity() { return from_recip(Rational(0)); }

    // Accepts "inf", integers, fractions "a/b" and finite decimals.
    static Exponent parse(std::string_view text) {
        if (text == "inf" || text == "infinity" || text == "Inf") return infinity();
        auto slash = text.find('/');
        if (slash != std::string_view::npos)
            return from_p(Rational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1))));
        auto dot = text.find('.');
        if (dot == std::string_view::npos) return from_p(Rational(parse_int(text)));
        std::string digits(text.substr(0, dot));
        std::string frac(text.substr(dot + 1));
        if (frac.size() > 12) throw std::invalid_argument("Exponent: too many decimals in '" + std::string(text) + "'");
        std::int64_t den = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
        return from_p(Rational(parse_int(digits + frac), den));
    }

    Rational recip() const { return recip_; }
    bool is_infinite() const { return recip_ == Rational(0); }
    Exponent conjugate() const { return from_recip(Rational(1) - recip_); }
    double value() const { return is_infinite() ? HUGE_VAL : 1.0 / recip_.to_double(); }
    double recip_value() const { return recip_.to_double(); }

    std::string str() const {
        if (is_infinite()) return "inf";
        return (Rational(1) / recip_).str();
    }

    friend bool operator==(Exponent a, Exponent b) { return a.recip_ == b.recip_; }
    friend std::ostream& operator<<(std::ostream& os, Exponent e) { return os << e.str(); }

private:
    static std::int64_t parse_int(std::string_view s) {
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size())
            throw std::invalid_argument("Exponent: cannot parse '" + std::string(s) + "'");
        return v;
    }

    Rational recip_;
};

struct SpaceParams {
    double alpha = 0.0;
    Exponent p;
    Exponent q;
    double s = 0.0;

    void validate() const {
        if (!(alpha >= 0.0 && alpha <= 1.0))
            throw std::invalid_argument("SpaceParams: alpha must lie in [0,1]");
        if (!std::isfinite(s)) throw std::invalid_argument("SpaceParams: s must be finite");
    }
};

inline Rational theta1(Exponent p, Exponent q) {
    Rational ip = p.recip(), ipc = p.conjugate().recip();
    return max(Rational(0), q.recip() - min(ip, ipc));
}

inline Rational theta2(Exponent p, Exponent q) {
    Rational ip = p.recip(), ipc = p.conjugate().recip();
    return min(Rational(0), q.recip() - max(ip, ipc));
}

inline Rational nu1(Exponent p, Exponent q) {
    Rational ip = p.recip(), ipc = p.conjugate().recip();
    return theta1(p, q) + max(Rational(0), q.recip() - max(ip, ipc));
}

inline Rational nu2(Exponent p, Exponent q) {
    Rational ip = p.recip(), ipc = p.conjugate().recip();
    return theta2(p, q) + min(Rational(0), q.recip() - min(ip, ipc));
}

inline double weight_shift(int d, double alpha1, double alpha2, Rational theta) {
    if (d < 1) throw std::invalid_argument("weight_shift: d must be positive");
    if (alpha1 > alpha2) throw std::invalid_argument("weight_shift: requires alpha1 <= alpha2");
    return double(d) * (alpha2 - alpha1) * theta.to_double();
}

inline std::vector<Exponent> exponent_test_grid() {
    std::vector<Exponent> out;
    for (Rational p : {Rational(1), Rational(4, 3), Rational(3, 2), Rational(2), Rational(3), Rational(4),
                       Rational(6), Rational(8), Rational(12), Rational(24), Rational(48), Rational(96)})
        out.push_back(Exponent::from_p(p));
    out.push_back(Exponent::infinity());
    return out;
}

}  // namespace alphamod
