#pragma once

// Strichartz exponent system in exact rational arithmetic:
//   2/q1 + n/r1 = n/2                       (scaling)
//   2/q0 + n/r0 = (n-2)/2 + beta            (scaling at regularity 1 + beta)
//   1/r1 + (p-1)/r0 = 1 - 1/r1              (Hoelder gap, space)
//   1/q1 + (p-1)/q0 < 1 - 1/q1              (Hoelder gap, time)
//   r0 > p + 1                              (Hamiltonian control)
// with 2 < q0, r0, q1, r1 < infinity and 0 < beta < 1.

#include <algorithm>
#include <array>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace imethod {

using Rational = boost::multiprecision::cpp_rational;

inline std::string to_string(const Rational& r) {
    std::ostringstream out;
    out << numerator(r);
    if (denominator(r) != 1) out << '/' << denominator(r);
    return out.str();
}

/// Parses "7", "-3/2" or a finite decimal such as "2.75" exactly.
inline Rational parse_rational(const std::string& text) {
    const std::string t = [&] {
        std::string v = text;
        v.erase(0, v.find_first_not_of(" \t"));
        v.erase(v.find_last_not_of(" \t") + 1);
        return v;
    }();
    auto integer = [&](const std::string& digits) {
        if (digits.empty() || digits.find_first_not_of("+-0123456789") != std::string::npos ||
            digits.find_first_of("+-", 1) != std::string::npos)
            throw std::invalid_argument("not a rational number: '" + text + "'");
        return boost::multiprecision::cpp_int(digits);
    };
    if (const auto slash = t.find('/'); slash != std::string::npos) {
        const auto den = integer(t.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
        return Rational(integer(t.substr(0, slash)), den);
    }
    if (const auto dot = t.find('.'); dot != std::string::npos) {
        const std::string frac = t.substr(dot + 1);
        if (frac.find_first_not_of("0123456789") != std::string::npos)
            throw std::invalid_argument("not a rational number: '" + text + "'");
        std::string whole = t.substr(0, dot);
        const bool negative = !whole.empty() && whole[0] == '-';
        if (whole.empty() || whole == "-" || whole == "+") whole += "0";
        boost::multiprecision::cpp_int scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
        const auto frac_part = frac.empty() ? boost::multiprecision::cpp_int(0) : boost::multiprecision::cpp_int(frac);
        const Rational mag = Rational(abs(integer(whole))) + Rational(frac_part, scale);
        return negative ? Rational(-mag) : mag;
    }
    return Rational(integer(t));
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

struct SubcriticalReport {
    bool h1_subcritical = false;
    bool l2_subcritical = false;
    Rational s_c;
};

/// 1/(p-1) > (n-2)/4, s_c < 0 and s_c = n/2 - 2/(p-1), all exact.
inline SubcriticalReport check_subcritical(int n, const Rational& p) {
    if (n < 1) throw std::invalid_argument("check_subcritical: n must be positive");
    if (p <= 1) throw std::invalid_argument("check_subcritical: p must exceed 1");
    SubcriticalReport r;
    r.s_c = Rational(n, 2) - Rational(2) / (p - 1);
    r.h1_subcritical = Rational(1) / (p - 1) > Rational(n - 2, 4);
    r.l2_subcritical = r.s_c < 0;
    return r;
}

struct StrichartzExponents {
    int n = 1;
    Rational p;
    Rational beta, q0, r0, q1, r1;
};

inline constexpr std::array<const char*, 5> kExponentRelations{"scaling", "scaling-beta", "gap-space", "gap-time",
                                                               "hamiltonian"};

/// Each relation checked independently; order as in kExponentRelations.
inline std::array<bool, 5> verify_exponents(const StrichartzExponents& e) {
    const Rational one(1), two(2);
    const int n = e.n;
    std::array<bool, 5> ok{};
    ok[0] = two / e.q1 + n / e.r1 == Rational(n, 2);
    ok[1] = two / e.q0 + n / e.r0 == Rational(n - 2, 2) + e.beta;
    ok[2] = one / e.r1 + (e.p - 1) / e.r0 == one - one / e.r1;
    ok[3] = one / e.q1 + (e.p - 1) / e.q0 < one - one / e.q1;
    ok[4] = e.r0 > e.p + 1;
    return ok;
}

/// 2 < q0, r0, q1, r1 (all finite by construction) and 0 < beta < 1.
inline bool exponents_in_range(const StrichartzExponents& e) {
    const Rational two(2);
    return e.q0 > two && e.r0 > two && e.q1 > two && e.r1 > two && e.beta > 0 && e.beta < 1;
}

/// 2 < r1 < p + 1.
inline bool r1_bound_holds(const StrichartzExponents& e) { return e.r1 > 2 && e.r1 < e.p + 1; }

/// 2/q1' + n/r1' = (n+4)/2 with 1/q' = 1 - 1/q.
inline bool dual_identity_holds(const StrichartzExponents& e) {
    const Rational one(1);
    return 2 * (one - one / e.q1) + e.n * (one - one / e.r1) == Rational(e.n + 4, 2);
}

inline StrichartzExponents solve_exponents(int n, const Rational& p) {
    const SubcriticalReport sub = check_subcritical(n, p);
    if (!sub.h1_subcritical)
        throw std::domain_error("solve_exponents: 1/(p-1) > (n-2)/4 fails for n = " + std::to_string(n) +
                                ", p = " + to_string(p));
    StrichartzExponents e;
    e.n = n;
    e.p = p;
    const Rational lo = std::max(Rational(0), Rational(n - 2, 2));
    const Rational hi = std::min(Rational(n, 2), Rational(2) / (p - 1));
    const Rational target = (lo + hi) / 2;  // (n-2)/2 + beta
    e.beta = target - Rational(n - 2, 2);

    auto admissible = [&](const Rational& r0) {
        const Rational gap = target - n / r0;
        return gap > 0 && gap < 1;
    };
    const Rational base = std::max(Rational(p + 1), Rational(2));
    bool found = false;
    for (std::int64_t k = 1; k <= 1'000'000 && !found; ++k) {
        const Rational r0 = base + k;
        if (admissible(r0)) {
            e.r0 = r0;
            found = true;
        }
        // gap grows with r0; once it reaches 1 no larger integer works
        if (target - n / r0 >= 1) break;
    }
    // In high dimension the admissible window can sit strictly between p+1 and p+2.
    for (int j = 1; j <= 200 && !found; ++j) {
        const Rational r0 = base + Rational(1, boost::multiprecision::cpp_int(1) << j);
        if (admissible(r0)) {
            e.r0 = r0;
            found = true;
        }
    }
    if (!found) throw std::runtime_error("solve_exponents: no admissible r0");

    e.q0 = Rational(2) / (target - n / e.r0);
    e.r1 = Rational(2) / (Rational(1) - (p - 1) / e.r0);
    e.q1 = Rational(2) / (Rational(n, 2) - n / e.r1);

    const auto rel = verify_exponents(e);
    if (!std::all_of(rel.begin(), rel.end(), [](bool b) { return b; }) || !exponents_in_range(e))
        throw std::logic_error("solve_exponents: constructed tuple fails verification");
    return e;
}

/// Structured text record: one "key = value" per line.
inline std::string exponent_report(const StrichartzExponents& e) {
    std::ostringstream out;
    const auto sub = check_subcritical(e.n, e.p);
    out << "n = " << e.n << '\n'
        << "p = " << to_string(e.p) << '\n'
        << "s_c = " << to_string(sub.s_c) << '\n'
        << "h1_subcritical = " << (sub.h1_subcritical ? "true" : "false") << '\n'
        << "l2_subcritical = " << (sub.l2_subcritical ? "true" : "false") << '\n'
        << "beta = " << to_string(e.beta) << '\n'
        << "q0 = " << to_string(e.q0) << '\n'
        << "r0 = " << to_string(e.r0) << '\n'
        << "q1 = " << to_string(e.q1) << '\n'
        << "r1 = " << to_string(e.r1) << '\n';
    const auto rel = verify_exponents(e);
    for (std::size_t i = 0; i < rel.size(); ++i)
        out << "relation." << kExponentRelations[i] << " = " << (rel[i] ? "true" : "false") << '\n';
    out << "range = " << (exponents_in_range(e) ? "true" : "false") << '\n'
        << "r1_bound = " << (r1_bound_holds(e) ? "true" : "false") << '\n'
        << "dual_identity = " << (dual_identity_holds(e) ? "true" : "false") << '\n';
    return out.str();
}

}  // namespace imethod
