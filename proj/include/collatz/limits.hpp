#pragma once

// Exact dyadic evaluation of the quotient sequences 2^(G-1) / sum(...) and the
// binary sequence beta_n.

#include <collatz/core.hpp>

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace collatz {

using Rational = boost::multiprecision::cpp_rational;

/// numerator / 2^exponent, kept with an odd numerator (or 0 / 2^0).
class DyadicRational {
  public:
    DyadicRational() = default;
    DyadicRational(BigInt numerator, std::int64_t exponent) : num_(std::move(numerator)), exp_(exponent) {
        normalize();
    }

    /// 2^k for any integer k.
    static DyadicRational pow2(std::int64_t k) { return DyadicRational(BigInt(1), -k); }

    const BigInt& numerator() const noexcept { return num_; }
    std::int64_t exponent() const noexcept { return exp_; }

    Rational to_rational() const {
        if (exp_ >= 0) {
            return Rational(num_, BigInt(1) << static_cast<unsigned>(exp_));
        }
        return Rational(num_ << static_cast<unsigned>(-exp_));
    }

    friend DyadicRational operator+(const DyadicRational& a, const DyadicRational& b) {
        const std::int64_t e = std::max(a.exp_, b.exp_);
        return DyadicRational(a.scaled(e) + b.scaled(e), e);
    }

    friend DyadicRational operator*(const DyadicRational& a, const DyadicRational& b) {
        return DyadicRational(a.num_ * b.num_, a.exp_ + b.exp_);
    }

    DyadicRational& operator+=(const DyadicRational& o) { return *this = *this + o; }

    friend bool operator==(const DyadicRational&, const DyadicRational&) = default;
    friend bool operator<(const DyadicRational& a, const DyadicRational& b) {
        const std::int64_t e = std::max(a.exp_, b.exp_);
        return a.scaled(e) < b.scaled(e);
    }

  private:
    // numerator over 2^e for e >= exp_
    BigInt scaled(std::int64_t e) const { return num_ << static_cast<unsigned>(e - exp_); }

    void normalize() {
        if (num_ == 0) {
            exp_ = 0;
            return;
        }
        const unsigned tz = lsb(abs(num_));
        num_ >>= tz;
        exp_ -= tz;
    }

    BigInt num_ = 0;
    std::int64_t exp_ = 0;
};

/// floor(n log2 3) - floor((n-1) log2 3) - 1, which is 0 or 1.
inline unsigned beta(std::uint64_t n) {
    if (n < 2) {
        throw DomainError("beta: n must be >= 2");
    }
    return static_cast<unsigned>(floor_log2_pow3(n) - floor_log2_pow3(n - 1) - 1);
}

/// Index of the first position where `seq` (taken as beta_first_n, beta_first_n+1, ...)
/// differs from beta, or nullopt when all positions agree.
inline std::optional<std::size_t> first_beta_mismatch(const std::vector<unsigned>& seq, std::uint64_t first_n = 2) {
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (seq[i] != beta(first_n + i)) {
            return i;
        }
    }
    return std::nullopt;
}

/// `digits` significant decimal digits of a positive rational, rounded half up.
inline std::string decimal_string(const Rational& q, unsigned digits = 12) {
    if (q <= 0) {
        return q == 0 ? "0" : "-" + decimal_string(-q, digits);
    }
    const BigInt num = numerator(q);
    const BigInt den = denominator(q);
    // e with 10^e <= q < 10^(e+1)
    long e = static_cast<long>(BigInt(num / den).str().size()) - 1;
    if (num < den) {
        e = -1;
        BigInt scaled = num * 10;
        while (scaled < den) {
            scaled *= 10;
            --e;
        }
    }
    const long shift = static_cast<long>(digits) - 1 - e;
    BigInt top = shift >= 0 ? num * pow(BigInt(10), static_cast<unsigned>(shift)) : num;
    BigInt bottom = shift >= 0 ? den : den * pow(BigInt(10), static_cast<unsigned>(-shift));
    BigInt r = (2 * top + bottom) / (2 * bottom);
    std::string s = r.str();
    if (s.size() > digits) {
        // rounding carried into a new leading digit
        s.pop_back();
        ++e;
    }
    if (e >= static_cast<long>(digits) - 1) {
        return s + std::string(static_cast<std::size_t>(e - static_cast<long>(digits) + 1), '0');
    }
    if (e >= 0) {
        return s.substr(0, static_cast<std::size_t>(e) + 1) + "." + s.substr(static_cast<std::size_t>(e) + 1);
    }
    return "0." + std::string(static_cast<std::size_t>(-e - 1), '0') + s;
}

struct LimitTerm {
    std::uint64_t n = 0;
    DyadicRational contribution;

    friend bool operator==(const LimitTerm&, const LimitTerm&) = default;
};

struct LimitReport {
    std::uint64_t G = 0;
    DyadicRational numerator;
    DyadicRational denominator;
    Rational quotient;
    std::string decimal;
    std::vector<LimitTerm> terms;

    /// Recomputes the quotient from the terms.
    bool consistent() const {
        DyadicRational sum;
        for (const auto& t : terms) {
            sum += t.contribution;
        }
        return sum == denominator && numerator.to_rational() / sum.to_rational() == quotient;
    }
};

class MissingZ : public DomainError {
  public:
    explicit MissingZ(std::uint64_t n)
        : DomainError("z(" + std::to_string(n) + ") not available"), n_(n) {}

    std::uint64_t n() const noexcept { return n_; }

  private:
    std::uint64_t n_;
};

namespace detail {

inline LimitReport finish_limit(std::uint64_t G, std::vector<LimitTerm> terms) {
    LimitReport rep;
    rep.G = G;
    rep.numerator = DyadicRational::pow2(static_cast<std::int64_t>(G) - 1);
    for (const auto& t : terms) {
        rep.denominator += t.contribution;
    }
    rep.terms = std::move(terms);
    rep.quotient = rep.numerator.to_rational() / rep.denominator.to_rational();
    rep.decimal = decimal_string(rep.quotient, 12);
    return rep;
}

} // namespace detail

/// 2^(G-1) / sum_{n=2}^{G} 2^(G-n-beta_n).
inline LimitReport theorem5_quotient(std::uint64_t G) {
    if (G < 2) {
        throw DomainError("theorem5_quotient: G must be >= 2");
    }
    std::vector<LimitTerm> terms;
    for (std::uint64_t n = 2; n <= G; ++n) {
        const auto e = static_cast<std::int64_t>(G) - static_cast<std::int64_t>(n) - beta(n);
        terms.push_back({n, DyadicRational::pow2(e)});
    }
    return detail::finish_limit(G, std::move(terms));
}

/// 2^(G-1) / sum_{n=2}^{G} 2^(G - floor(n log2 3)) z(n).
inline LimitReport theorem6_quotient(std::uint64_t G, const std::map<std::uint64_t, std::uint64_t>& z) {
    if (G < 2) {
        throw DomainError("theorem6_quotient: G must be >= 2");
    }
    std::vector<LimitTerm> terms;
    for (std::uint64_t n = 2; n <= G; ++n) {
        const auto it = z.find(n);
        if (it == z.end()) {
            throw MissingZ(n);
        }
        const auto e = static_cast<std::int64_t>(G) - static_cast<std::int64_t>(floor_log2_pow3(n));
        terms.push_back({n, DyadicRational::pow2(e) * DyadicRational(BigInt(it->second), 0)});
    }
    return detail::finish_limit(G, std::move(terms));
}

struct ZValues {
    std::string source;
    std::map<std::uint64_t, std::uint64_t> values;
};

/// Reads `n<TAB>z` lines. A `# source: ...` header before the first data line is
/// mandatory; other `#` lines and blank lines are ignored.
inline ZValues parse_z_values(std::istream& in) {
    ZValues out;
    bool have_source = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            const std::string tag = "# source:";
            if (!have_source && line.compare(0, tag.size(), tag) == 0) {
                out.source = line.substr(tag.size());
                const auto first = out.source.find_first_not_of(' ');
                out.source = first == std::string::npos ? "" : out.source.substr(first);
                if (out.source.empty()) {
                    throw FormatError("z-values line " + std::to_string(lineno) + ": empty source");
                }
                have_source = true;
            }
            continue;
        }
        if (!have_source) {
            throw FormatError("z-values: missing '# source:' header before line " + std::to_string(lineno));
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw FormatError("z-values line " + std::to_string(lineno) + ": expected 'n<TAB>z'");
        }
        const BigInt n = parse_decimal(line.substr(0, tab));
        const BigInt z = parse_decimal(line.substr(tab + 1));
        if (!fits_u64(n) || !fits_u64(z)) {
            throw FormatError("z-values line " + std::to_string(lineno) + ": value out of range");
        }
        if (!out.values.emplace(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(z)).second) {
            throw FormatError("z-values line " + std::to_string(lineno) + ": duplicate n");
        }
    }
    if (!have_source) {
        throw FormatError("z-values: missing '# source:' header");
    }
    return out;
}

inline ZValues parse_z_values(const std::string& text) {
    std::istringstream in(text);
    return parse_z_values(in);
}

} // namespace collatz
