#pragma once

// Finite subsequences C^t(s) (s = 3, 7 mod 12) and C^h(s) (s = 9 mod 12),
// decomposition of a trajectory into them, and the term lemmata as predicates.

#include <collatz/core.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace collatz {

enum class SubsequenceKind { t_kind, h_kind };
enum class Variant { a, b };

inline const char* kind_name(SubsequenceKind k) { return k == SubsequenceKind::t_kind ? "t" : "h"; }
inline const char* variant_name(Variant v) { return v == Variant::a ? "A" : "B"; }

/// C^t(s) or C^h(s). `length_index` is t or h, i.e. terms.size() - 1.
struct Subsequence {
    SubsequenceKind kind = SubsequenceKind::t_kind;
    Variant variant = Variant::a;
    std::vector<Term> terms;
    std::size_t length_index = 0;
    std::optional<Term> max_odd;
    std::optional<Term> max_even;
    Term end_term;

    const Term& start() const { return terms.front(); }

    friend bool operator==(const Subsequence&, const Subsequence&) = default;
};

/// A cut shorter than two steps. Not expected to occur; carries the offending start.
class DegenerateSubsequence : public DomainError {
  public:
    DegenerateSubsequence(const Term& start, std::size_t length)
        : DomainError("subsequence of " + start.str() + " has length " + std::to_string(length) + " < 2"),
          start_(start), length_(length) {}

    const Term& start() const noexcept { return start_; }
    std::size_t length() const noexcept { return length_; }

  private:
    Term start_;
    std::size_t length_;
};

inline std::optional<SubsequenceKind> kind_of_start(const Term& s) {
    switch (small_mod(s, 12)) {
    case 3:
    case 7:
        return SubsequenceKind::t_kind;
    case 9:
        return SubsequenceKind::h_kind;
    default:
        return std::nullopt;
    }
}

namespace detail {

// A C^t ends on its first term = 6 (mod 8); a C^h on its first odd term = 3 (mod 4).
inline bool is_cut(SubsequenceKind kind, unsigned mod8) {
    return kind == SubsequenceKind::t_kind ? mod8 == 6 : (mod8 & 3) == 3;
}

// Length and variant without materializing terms. Int = uint64_t may throw Overflow.
template <class Int>
std::pair<std::size_t, Variant> cut_length(Int s, SubsequenceKind kind, std::uint64_t cap) {
    for (std::uint64_t k = 1; k <= cap; ++k) {
        s = checked_step(s);
        if (s == 1) {
            return {k, Variant::b};
        }
        if (is_cut(kind, mod_small(s, 8))) {
            return {k, Variant::a};
        }
    }
    throw CapExhausted("subsequence did not terminate within the step cap", cap);
}

} // namespace detail

/// (length_index, variant) of the subsequence starting at s, 64-bit fast path.
inline std::pair<std::size_t, Variant> subsequence_length(std::uint64_t s, std::uint64_t cap = default_step_cap) {
    const auto kind = kind_of_start(Term(s));
    if (!kind) {
        throw DomainError("subsequence start must be = 3, 7 or 9 (mod 12)");
    }
    try {
        return detail::cut_length<std::uint64_t>(s, *kind, cap);
    } catch (const detail::Overflow&) {
        return detail::cut_length<BigInt>(BigInt(s), *kind, cap);
    }
}

/// C^t(s) for s = 3, 7 (mod 12) or C^h(s) for s = 9 (mod 12).
inline Subsequence extract_subsequence(const Term& s, std::uint64_t cap = default_step_cap) {
    require_term(s, "extract_subsequence");
    const auto kind = kind_of_start(s);
    if (!kind) {
        throw DomainError("extract_subsequence: start " + s.str() + " is not = 3, 7 or 9 (mod 12)");
    }

    Subsequence out;
    out.kind = *kind;
    out.terms.push_back(s);
    if (out.kind == SubsequenceKind::h_kind) {
        out.max_odd = s;
    }

    // T-kind: odd terms = 3 (mod 4) rise until the first = 1 (mod 4); that one
    // is the odd maximum and its successor the even maximum.
    bool in_prefix = out.kind == SubsequenceKind::t_kind;
    bool want_max_even = out.kind == SubsequenceKind::h_kind;

    TermWalker w(s);
    for (std::uint64_t k = 1; k <= cap; ++k) {
        const bool was_prefix_max = in_prefix && w.mod(4) == 1;
        w.step();
        Term cur = w.value();
        if (was_prefix_max) {
            out.max_odd = out.terms.back();
            in_prefix = false;
            want_max_even = true;
        }
        if (want_max_even) {
            out.max_even = cur;
            want_max_even = false;
        }
        out.terms.push_back(std::move(cur));

        std::optional<Variant> v;
        if (w.is_one()) {
            v = Variant::b;
        } else if (detail::is_cut(out.kind, w.mod(8))) {
            v = Variant::a;
        }
        if (v) {
            out.variant = *v;
            out.length_index = out.terms.size() - 1;
            out.end_term = out.terms.back();
            if (out.length_index < 2) {
                throw DegenerateSubsequence(s, out.length_index);
            }
            return out;
        }
    }
    throw CapExhausted("extract_subsequence: no cut within the step cap", cap);
}

/// First violated structural property, or nullopt when the subsequence has the
/// residue skeleton [3,7]_12, [3]_4.., [1]_4, [2]_6, .., [6]_8 | 1 (T-kind) or
/// [9]_12, [2]_6, .., [6]_8, [3]_4 | 1 (H-kind), rising to its maxima and then
/// decreasing separately over odd and even terms.
inline std::optional<std::string> structure_violation(const Subsequence& e) {
    const auto& t = e.terms;
    if (t.size() < 3) {
        return "fewer than three terms";
    }
    if (e.length_index + 1 != t.size() || e.end_term != t.back()) {
        return "length_index/end_term inconsistent with terms";
    }
    const bool is_b = e.variant == Variant::b;
    if (is_b != (t.back() == 1)) {
        return "variant does not match end term";
    }
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (t[i] != iterate(t[i - 1], 1)) {
            return "terms are not consecutive iterates";
        }
    }

    std::size_t peak = 0; // index of the odd maximum
    if (e.kind == SubsequenceKind::t_kind) {
        const unsigned r12 = small_mod(t[0], 12);
        if (r12 != 3 && r12 != 7) {
            return "T-kind start not = 3, 7 (mod 12)";
        }
        while (peak < t.size() && small_mod(t[peak], 4) == 3) {
            if (peak > 0 && !(t[peak - 1] < t[peak])) {
                return "prefix not strictly increasing";
            }
            ++peak;
        }
        if (peak + 1 >= t.size() || small_mod(t[peak], 4) != 1 || !(t[peak - 1] < t[peak])) {
            return "prefix does not end at an odd term = 1 (mod 4)";
        }
        if (small_mod(t[peak - 1], 8) != 3) {
            return "last prefix term not = 3 (mod 8)";
        }
    } else {
        if (small_mod(t[0], 12) != 9) {
            return "H-kind start not = 9 (mod 12)";
        }
    }
    if (!e.max_odd || *e.max_odd != t[peak] || !e.max_even || *e.max_even != t[peak + 1]) {
        return "extrema fields do not match the skeleton";
    }
    if (small_mod(t[peak + 1], 6) != 2) {
        return "even maximum not = 2 (mod 6)";
    }

    const std::size_t last = t.size() - 1;
    const Term* prev_odd = &t[peak];
    const Term* prev_even = &t[peak + 1];
    for (std::size_t i = peak + 1; i <= last; ++i) {
        const bool odd = bit_test(t[i], 0);
        if (i > peak + 1) {
            const Term*& prev = odd ? prev_odd : prev_even;
            if (!(t[i] < *prev)) {
                return "tail not strictly decreasing (separately odd/even)";
            }
            prev = &t[i];
        }
        const unsigned r8 = small_mod(t[i], 8);
        const bool is_end = i == last;
        // the H-kind [6]_8 term sits just before its [3]_4 end
        const bool is_h_six = e.kind == SubsequenceKind::h_kind && !is_b && i + 1 == last;
        if (is_end && is_b) {
            continue;
        }
        if (is_end && e.kind == SubsequenceKind::t_kind) {
            if (r8 != 6) {
                return "T-kind variant A does not end = 6 (mod 8)";
            }
        } else if (is_end) {
            if ((r8 & 3) != 3) {
                return "H-kind variant A does not end = 3 (mod 4)";
            }
        } else if (is_h_six) {
            if (r8 != 6) {
                return "H-kind term before the end is not = 6 (mod 8)";
            }
        } else if (odd ? (r8 & 3) != 1 : r8 == 6) {
            return "interior tail term in a terminating residue class";
        }
    }
    return std::nullopt;
}

struct CanonicalStart {
    Term start;
    std::size_t offset = 0;
};

/// Walks x = 3 (mod 4) back through [11]_12 predecessors (2x-1)/3 to the start
/// = 3, 7 (mod 12) of the unique C^t containing x; offset is x's index in it.
inline CanonicalStart canonical_start(const Term& x) {
    require_term(x, "canonical_start");
    if (small_mod(x, 4) != 3) {
        throw DomainError("canonical_start: " + x.str() + " is not = 3 (mod 4)");
    }
    CanonicalStart out{x, 0};
    while (small_mod(out.start, 12) == 11) {
        out.start = (2 * out.start - 1) / 3;
        ++out.offset;
    }
    return out;
}

struct DecompositionEntry {
    Subsequence subsequence;
    // index in subsequence.terms of the first term the trajectory actually visits
    std::size_t entry_offset = 0;

    friend bool operator==(const DecompositionEntry&, const DecompositionEntry&) = default;
};

struct Decomposition {
    Term source;
    std::vector<Term> preamble;
    std::vector<DecompositionEntry> entries;
    bool complete = false;

    /// The visited terms in order. An H-kind variant-A block shares its end term
    /// with the following C^t, so that term is emitted once.
    std::vector<Term> reconstruct() const {
        std::vector<Term> out = preamble;
        for (std::size_t i = 0; i < entries.size(); ++i) {
            const auto& e = entries[i];
            const auto& terms = e.subsequence.terms;
            std::size_t end = terms.size();
            if (e.subsequence.kind == SubsequenceKind::h_kind && e.subsequence.variant == Variant::a &&
                i + 1 < entries.size()) {
                --end;
            }
            out.insert(out.end(), terms.begin() + static_cast<std::ptrdiff_t>(e.entry_offset),
                       terms.begin() + static_cast<std::ptrdiff_t>(end));
        }
        return out;
    }

    friend bool operator==(const Decomposition&, const Decomposition&) = default;
};

inline constexpr std::size_t default_max_subsequences = std::size_t{1} << 20;

/// Splits the trajectory of s into preamble, at most one leading C^h, then a chain of C^t.
inline Decomposition decompose(const Term& s, std::size_t max_subsequences = default_max_subsequences,
                               std::uint64_t cap = default_step_cap) {
    require_term(s, "decompose");
    Decomposition d;
    d.source = s;

    Term cur = s;
    for (std::uint64_t k = 0;; ++k) {
        if (k >= cap) {
            throw CapExhausted("decompose: preamble exceeded the step cap", cap);
        }
        if (cur == 1) {
            d.preamble.push_back(cur);
            d.complete = true;
            return d;
        }
        if (small_mod(cur, 12) == 9 || small_mod(cur, 4) == 3) {
            break;
        }
        d.preamble.push_back(cur);
        cur = t_step(cur);
    }

    if (small_mod(cur, 12) == 9) {
        if (max_subsequences == 0) {
            return d;
        }
        Subsequence h = extract_subsequence(cur, cap);
        const bool done = h.variant == Variant::b;
        cur = h.end_term;
        d.entries.push_back({std::move(h), 0});
        if (done) {
            d.complete = true;
            return d;
        }
    }

    while (d.entries.size() < max_subsequences) {
        CanonicalStart cs = canonical_start(cur);
        Subsequence sub = extract_subsequence(cs.start, cap);
        if (cs.offset >= sub.terms.size() || sub.terms[cs.offset] != cur) {
            throw std::logic_error("decompose: canonical C^t of " + cs.start.str() + " does not pass through " +
                                   cur.str());
        }
        const bool done = sub.variant == Variant::b;
        const Term next = done ? Term(1) : Term(sub.end_term >> 1);
        d.entries.push_back({std::move(sub), cs.offset});
        if (done) {
            d.complete = true;
            return d;
        }
        cur = next;
    }
    return d;
}

/// A C^t in which the trajectory first drops below its start, counting the
/// halving step right after a variant-A end (tau(start) = 1).
inline bool is_stopping_sequence(const Subsequence& e) {
    if (e.kind != SubsequenceKind::t_kind) {
        throw DomainError("is_stopping_sequence: requires a T-kind subsequence");
    }
    const Term& s = e.terms.front();
    for (std::size_t i = 1; i < e.terms.size(); ++i) {
        if (e.terms[i] < s) {
            return true;
        }
    }
    return e.variant == Variant::a && (e.end_term >> 1) < s;
}

namespace lemma {

namespace detail {

inline void require(bool ok, const char* which, const Term& n) {
    if (!ok) {
        throw DomainError(std::string(which) + ": " + n.str() + " outside the lemma's residue class");
    }
}

// number of trailing one bits, i.e. the m with n = 2^m - 1 (mod 2^(m+1))
inline unsigned trailing_ones(const Term& n) {
    unsigned m = 0;
    while (bit_test(n, m)) {
        ++m;
    }
    return m;
}

inline std::optional<Term> odd_predecessor(const Term& n) {
    Term twice = 2 * n - 1;
    if (twice % 3 != 0) {
        return std::nullopt;
    }
    return twice / 3;
}

} // namespace detail

/// n even: T(n) < n.
inline bool lemma1(const Term& n) {
    detail::require(n >= 2 && !bit_test(n, 0), "lemma1", n);
    return t_step(n) < n;
}

/// n = 1 (mod 4), n > 1: T^2(n) < n and T^2(n) = 1 (mod 3).
inline bool lemma2(const Term& n) {
    detail::require(n > 1 && small_mod(n, 4) == 1, "lemma2", n);
    const Term t2 = iterate(n, 2);
    return t2 < n && small_mod(t2, 3) == 1;
}

/// n = 6 (mod 8): T(n) < n and T(n) = 3 (mod 4).
inline bool lemma3(const Term& n) {
    detail::require(small_mod(n, 8) == 6, "lemma3", n);
    const Term t1 = t_step(n);
    return t1 < n && small_mod(t1, 4) == 3;
}

/// n = 2^m: 1 is first reached after exactly m steps.
inline bool lemma4(const Term& n) {
    detail::require(n >= 1 && (n & (n - 1)) == 0, "lemma4", n);
    const std::size_t m = msb(n);
    Term cur = n;
    for (std::size_t i = 0; i < m; ++i) {
        if (cur == 1) {
            return false;
        }
        cur = t_step(cur);
    }
    return cur == 1;
}

/// n = 2^m - 1 (mod 2^(m+1)), m >= 2: T(n) = 2^(m-1) - 1 (mod 2^m).
inline bool lemma5(const Term& n) {
    detail::require(n >= 1 && small_mod(n, 4) == 3, "lemma5", n);
    const unsigned m = detail::trailing_ones(n);
    const Term mod = Term(1) << m;
    return t_step(n) % mod == (Term(1) << (m - 1)) - 1;
}

/// Same class as lemma5: T^(m-1)(n) = 1 (mod 4), with the terms before it = 3 (mod 4).
inline bool lemma6(const Term& n) {
    detail::require(n >= 1 && small_mod(n, 4) == 3, "lemma6", n);
    const unsigned m = detail::trailing_ones(n);
    Term cur = n;
    for (unsigned i = 0; i + 1 < m; ++i) {
        if (small_mod(cur, 4) != 3) {
            return false;
        }
        cur = t_step(cur);
    }
    return small_mod(cur, 4) == 1;
}

/// n = 3 (mod 4) iff n = 2^m - 1 (mod 2^(m+1)) for some m >= 2.
inline bool lemma7(const Term& n) {
    detail::require(n >= 1, "lemma7", n);
    bool in_union = false;
    for (unsigned m = 2; m <= msb(n) + 1 && !in_union; ++m) {
        const Term mod = Term(1) << (m + 1);
        in_union = n % mod == (Term(1) << m) - 1;
    }
    return in_union == (small_mod(n, 4) == 3);
}

/// n = 3 (mod 4): n has a smaller odd predecessor = 3 (mod 4) iff n = 11 (mod 12).
inline bool lemma8(const Term& n) {
    detail::require(n >= 1 && small_mod(n, 4) == 3, "lemma8", n);
    const auto pred = detail::odd_predecessor(n);
    const bool has_small_pred =
        pred && bit_test(*pred, 0) && small_mod(*pred, 4) == 3 && *pred < n && t_step(*pred) == n;
    return has_small_pred == (small_mod(n, 12) == 11);
}

/// n = 5 (mod 12): the odd predecessor (2n-1)/3 exists and is = 3 (mod 4).
inline bool lemma9(const Term& n) {
    detail::require(small_mod(n, 12) == 5, "lemma9", n);
    const auto pred = detail::odd_predecessor(n);
    return pred && small_mod(*pred, 4) == 3 && t_step(*pred) == n;
}

/// n = 1 (mod 12): an odd predecessor = 5, 9 (mod 12) two steps back ((4n-1)/3)
/// or, failing that, four steps back along n <- 2n <- 4n <- 8n ((16n-1)/3).
inline bool lemma10(const Term& n) {
    detail::require(small_mod(n, 12) == 1, "lemma10", n);
    auto good = [](const Term& p) {
        const unsigned r = small_mod(p, 12);
        return r == 5 || r == 9;
    };
    const Term back2 = (4 * n - 1) / 3;
    if (iterate(back2, 2) != n) {
        return false;
    }
    if (good(back2)) {
        return true;
    }
    const Term back4 = (16 * n - 1) / 3;
    return iterate(back4, 4) == n && bit_test(back4, 0) && good(back4);
}

} // namespace lemma

} // namespace collatz
