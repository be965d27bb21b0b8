#pragma once

// The map T(n) = n/2 (n even), (3n+1)/2 (n odd) over arbitrary-precision
// integers, plus the exact integer helpers the sieves are built on.

#include <collatz/errors.hpp>

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace collatz {

using BigInt = boost::multiprecision::cpp_int;

/// One element of a Collatz sequence. Operations taking a Term require >= 1.
using Term = BigInt;

inline constexpr std::uint64_t default_step_cap = std::uint64_t{1} << 20;

/// [residue]_modulus with 0 <= residue < modulus.
struct ResidueClass {
    std::uint64_t residue = 0;
    std::uint64_t modulus = 1;

    ResidueClass() = default;
    ResidueClass(std::uint64_t r, std::uint64_t m) : residue(r), modulus(m) {
        if (m == 0 || r >= m) {
            throw DomainError("residue class requires 0 <= residue < modulus");
        }
    }

    bool contains(const BigInt& x) const { return static_cast<std::uint64_t>(x % modulus) == residue; }
    bool contains(std::uint64_t x) const noexcept { return x % modulus == residue; }

    friend bool operator==(const ResidueClass&, const ResidueClass&) = default;
};

enum class Parity : std::uint8_t { even, odd };

using ParityVector = std::vector<Parity>;

inline void require_term(const BigInt& n, const char* what) {
    if (n < 1) {
        throw DomainError(std::string(what) + ": term must be >= 1");
    }
}

inline bool fits_u64(const BigInt& n) { return n >= 0 && n <= std::numeric_limits<std::uint64_t>::max(); }

inline unsigned small_mod(const BigInt& n, unsigned m) { return static_cast<unsigned>(n % m); }

/// T(n).
inline Term t_step(const Term& n) {
    require_term(n, "t_step");
    if (bit_test(n, 0)) {
        return (3 * n + 1) >> 1;
    }
    return n >> 1;
}

namespace detail {

// 64-bit T; throws Overflow when 3n+1 does not fit.
inline std::uint64_t checked_step(std::uint64_t n) {
    if ((n & 1) == 0) {
        return n >> 1;
    }
    if (n > (std::numeric_limits<std::uint64_t>::max() - 1) / 3) {
        throw Overflow{};
    }
    // (3n+1)/2 == n + (n+1)/2 for odd n
    return n + ((n + 1) >> 1);
}

inline std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t out = 0;
    if (__builtin_add_overflow(a, b, &out)) {
        throw Overflow{};
    }
    return out;
}

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t out = 0;
    if (__builtin_mul_overflow(a, b, &out)) {
        throw Overflow{};
    }
    return out;
}

inline BigInt checked_step(const BigInt& n) { return bit_test(n, 0) ? BigInt((3 * n + 1) >> 1) : BigInt(n >> 1); }
inline BigInt checked_add(const BigInt& a, const BigInt& b) { return a + b; }
inline BigInt checked_mul(const BigInt& a, const BigInt& b) { return a * b; }

inline bool is_odd(std::uint64_t n) noexcept { return (n & 1) != 0; }
inline bool is_odd(const BigInt& n) { return bit_test(n, 0); }

inline unsigned mod_small(std::uint64_t n, unsigned m) noexcept { return static_cast<unsigned>(n % m); }
inline unsigned mod_small(const BigInt& n, unsigned m) { return small_mod(n, m); }

} // namespace detail

/// Walks a trajectory with a 64-bit fast path that promotes to BigInt on overflow.
class TermWalker {
  public:
    explicit TermWalker(const Term& start) {
        require_term(start, "TermWalker");
        if (fits_u64(start)) {
            small_ = static_cast<std::uint64_t>(start);
        } else {
            big_mode_ = true;
            big_ = start;
        }
    }

    void step() {
        if (!big_mode_) {
            try {
                small_ = detail::checked_step(small_);
                return;
            } catch (const detail::Overflow&) {
                big_mode_ = true;
                big_ = small_;
            }
        }
        big_ = detail::checked_step(big_);
        if (big_ <= demote_limit) {
            small_ = static_cast<std::uint64_t>(big_);
            big_mode_ = false;
        }
    }

    bool odd() const { return big_mode_ ? detail::is_odd(big_) : detail::is_odd(small_); }
    unsigned mod(unsigned m) const { return big_mode_ ? small_mod(big_, m) : detail::mod_small(small_, m); }
    bool is_one() const { return !big_mode_ && small_ == 1; }
    Term value() const { return big_mode_ ? big_ : Term(small_); }

    bool less_than(const Term& bound) const { return big_mode_ ? big_ < bound : Term(small_) < bound; }
    bool less_than(std::uint64_t bound) const { return !big_mode_ && small_ < bound; }

  private:
    static constexpr std::uint64_t demote_limit = std::uint64_t{1} << 62;

    bool big_mode_ = false;
    std::uint64_t small_ = 0;
    BigInt big_;
};

/// T^k(s).
inline Term iterate(const Term& s, std::uint64_t k) {
    require_term(s, "iterate");
    TermWalker w(s);
    for (std::uint64_t i = 0; i < k; ++i) {
        w.step();
    }
    return w.value();
}

struct Trajectory {
    std::vector<Term> terms;
    // false when the cap was hit without the stop predicate firing
    bool complete = false;

    friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

using StopPredicate = std::function<bool(std::uint64_t index, const Term& term)>;

inline bool stop_at_one(std::uint64_t, const Term& term) { return term == 1; }

/// s, T(s), ... through the first term satisfying `stop`, or exactly `cap` terms.
inline Trajectory trajectory(const Term& s, const StopPredicate& stop = stop_at_one,
                             std::uint64_t cap = default_step_cap) {
    require_term(s, "trajectory");
    if (cap < 1) {
        throw DomainError("trajectory: cap must be >= 1");
    }
    Trajectory out;
    TermWalker w(s);
    for (std::uint64_t i = 0; i < cap; ++i) {
        out.terms.push_back(w.value());
        if (stop(i, out.terms.back())) {
            out.complete = true;
            return out;
        }
        w.step();
    }
    return out;
}

/// Largest k with 2^k <= 3^n, i.e. floor(n * log2(3)), by exact comparison.
inline std::uint64_t floor_log2_pow3(std::uint64_t n) {
    BigInt p = pow(BigInt(3), static_cast<unsigned>(n));
    return msb(p);
}

/// A run of k iterations of T following a fixed parity vector:
/// T^k(s) = (3^j * s + c) / 2^k for every s whose first k steps match `parity`.
class AffineTrace {
  public:
    AffineTrace() = default;

    std::uint64_t steps() const noexcept { return parity_.size(); }
    std::uint64_t odd_steps() const noexcept { return odd_steps_; }
    const BigInt& offset() const noexcept { return offset_; }
    const ParityVector& parity() const noexcept { return parity_; }

    BigInt pow3() const { return pow(BigInt(3), static_cast<unsigned>(odd_steps_)); }
    BigInt pow2() const { return BigInt(1) << steps(); }

    /// Coefficient 3^j / 2^k below one.
    bool contracting() const { return pow3() < pow2(); }

    /// (3^j s + c) / 2^k; DomainError when s does not follow this trace.
    Term apply(const Term& s) const {
        BigInt num = pow3() * s + offset_;
        BigInt den = pow2();
        if (num % den != 0) {
            throw DomainError("AffineTrace::apply: start does not follow the parity vector");
        }
        return num / den;
    }

    friend AffineTrace advance_affine(const AffineTrace& tr, Parity step);
    friend bool operator==(const AffineTrace&, const AffineTrace&) = default;

  private:
    std::uint64_t odd_steps_ = 0;
    BigInt offset_ = 0;
    ParityVector parity_;
};

/// Extends a trace by one step: even (j,k,c) -> (j,k+1,c); odd -> (j+1,k+1,3c+2^k).
inline AffineTrace advance_affine(const AffineTrace& tr, Parity step) {
    AffineTrace out = tr;
    if (step == Parity::odd) {
        out.offset_ = 3 * tr.offset_ + (BigInt(1) << tr.steps());
        ++out.odd_steps_;
    }
    out.parity_.push_back(step);
    return out;
}

/// The trace followed by the first k iterates of s.
inline AffineTrace trace_of(const Term& s, std::uint64_t k) {
    require_term(s, "trace_of");
    AffineTrace tr;
    TermWalker w(s);
    for (std::uint64_t i = 0; i < k; ++i) {
        tr = advance_affine(tr, w.odd() ? Parity::odd : Parity::even);
        w.step();
    }
    return tr;
}

/// Residue class mod 2^depth carried down the parity tree.
///
/// `value` is T^depth(residue) computed formally (T(0) = 0), which equals the
/// affine trace of the class evaluated at its least non-negative member. Lifting
/// residue -> residue + 2^depth adds 3^odd_steps to that value, so each child's
/// next parity is known without re-running the trajectory.
template <class Int>
struct LiftNode {
    std::uint64_t residue = 0;
    unsigned depth = 0;
    unsigned odd_steps = 0;
    Int value = 0;
    Int pow3 = 1;

    /// Child for lift bit `bit`, advanced one step. Records the step parity.
    LiftNode child(unsigned bit, Parity& step_parity) const {
        if (depth >= 63) {
            throw detail::Overflow{};
        }
        LiftNode c = *this;
        if (bit != 0) {
            c.residue += std::uint64_t{1} << depth;
            c.value = detail::checked_add(c.value, pow3);
        }
        const bool odd = detail::is_odd(c.value);
        step_parity = odd ? Parity::odd : Parity::even;
        c.value = detail::checked_step(c.value);
        if (odd) {
            c.pow3 = detail::checked_mul(c.pow3, Int(3));
            ++c.odd_steps;
        }
        ++c.depth;
        return c;
    }

    /// 3^j < 2^k for the trace so far.
    bool contracting() const {
        if constexpr (std::is_same_v<Int, std::uint64_t>) {
            return depth >= 64 || pow3 < (std::uint64_t{1} << depth);
        } else {
            return pow3 < (BigInt(1) << depth);
        }
    }
};

/// Number of integers in [1, limit] congruent to 3 or 7 (mod 12), via floor((limit+5)/6).
inline BigInt count_37(const BigInt& limit) {
    require_term(limit, "count_37");
    return (limit + 5) / 6;
}

/// Exact count of [1, limit] members of [3]_12 and [7]_12.
inline BigInt count_37_direct(const BigInt& limit) {
    require_term(limit, "count_37_direct");
    const BigInt q = limit / 12;
    const unsigned r = small_mod(limit, 12);
    return 2 * q + (r >= 3 ? 1 : 0) + (r >= 7 ? 1 : 0);
}

/// The closed form overcounts by one exactly when limit = 1, 2 (mod 12).
inline bool count_37_formula_valid(const BigInt& limit) {
    const unsigned r = small_mod(limit, 12);
    return r != 1 && r != 2;
}

/// Strict decimal parse: digits only, no sign, no exponent.
inline BigInt parse_decimal(std::string_view text) {
    if (text.empty()) {
        throw FormatError("expected a decimal integer, got an empty string");
    }
    for (char ch : text) {
        if (ch < '0' || ch > '9') {
            throw FormatError("expected a decimal integer, got '" + std::string(text) + "'");
        }
    }
    return BigInt(std::string(text));
}

inline std::string to_string(const BigInt& n) { return n.str(); }

} // namespace collatz
