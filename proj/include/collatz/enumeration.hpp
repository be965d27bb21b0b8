#pragma once

// Residue classes (mod 12 * 2^h, mod 12 * 2^(t+1)) whose subsequences share a
// length, by brute-force scan and by parity-tree refinement.

#include <collatz/parallel.hpp>
#include <collatz/subseq.hpp>

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

namespace collatz {

/// A variant-B member below the modulus, listed individually.
struct LengthClassException {
    Term value;
    std::size_t actual_length = 0;
    Variant variant = Variant::b;

    friend bool operator==(const LengthClassException&, const LengthClassException&) = default;
};

struct LengthClassReport {
    SubsequenceKind kind = SubsequenceKind::t_kind;
    std::size_t length = 0;
    std::uint64_t modulus = 0;
    std::vector<std::uint64_t> classes;
    std::vector<LengthClassException> exceptions;

    friend bool operator==(const LengthClassReport&, const LengthClassReport&) = default;
};

/// 12 * 2^h for H-kind, 12 * 2^(t+1) for T-kind.
inline std::uint64_t length_class_modulus(SubsequenceKind kind, std::size_t length) {
    const std::size_t shift = kind == SubsequenceKind::h_kind ? length : length + 1;
    if (shift > 59) {
        throw DomainError("length class modulus exceeds 64 bits");
    }
    return std::uint64_t{12} << shift;
}

inline bool admissible_start_residue(SubsequenceKind kind, std::uint64_t r) {
    const auto m = r % 12;
    return kind == SubsequenceKind::h_kind ? m == 9 : (m == 3 || m == 7);
}

namespace detail {

inline void require_length(std::size_t length) {
    if (length < 2) {
        throw DomainError("subsequence length must be >= 2");
    }
}

inline std::pair<std::size_t, Variant> sample_length(std::uint64_t s, SubsequenceKind kind) {
    try {
        return cut_length<std::uint64_t>(s, kind, default_step_cap);
    } catch (const Overflow&) {
        return cut_length<BigInt>(BigInt(s), kind, default_step_cap);
    }
}

} // namespace detail

/// Scans every admissible residue below the modulus, sampling its smallest
/// members. Variant-B residues are reported as exceptions and classified by
/// their next two members.
inline LengthClassReport brute_length_classes(SubsequenceKind kind, std::size_t length,
                                              const ScanOptions& opts = {}) {
    detail::require_length(length);
    LengthClassReport rep;
    rep.kind = kind;
    rep.length = length;
    rep.modulus = length_class_modulus(kind, length);
    if (!opts.unsafe && rep.modulus > opts.max_brute_modulus) {
        throw GuardExceeded("brute_length_classes: modulus " + std::to_string(rep.modulus) +
                            " exceeds the brute-force guard " + std::to_string(opts.max_brute_modulus));
    }
    const std::uint64_t m = rep.modulus;
    const std::uint64_t blocks = m / 12;
    const std::size_t shards = std::max<std::size_t>(1, std::min<std::uint64_t>(blocks, 256));

    std::vector<std::vector<std::uint64_t>> classes(shards);
    std::vector<std::vector<LengthClassException>> exceptions(shards);
    const auto wanted = [&](const std::pair<std::size_t, Variant>& x) {
        return x.second == Variant::a && x.first == length;
    };

    for_each_shard(opts.threads, shards, [&](std::size_t shard) {
        const std::uint64_t lo = blocks * shard / shards;
        const std::uint64_t hi = blocks * (shard + 1) / shards;
        for (std::uint64_t q = lo; q < hi; ++q) {
            for (std::uint64_t base : {3u, 7u, 9u}) {
                const std::uint64_t r = 12 * q + base;
                if (!admissible_start_residue(kind, r)) {
                    continue;
                }
                const auto first = detail::sample_length(r, kind);
                bool member = false;
                if (first.second == Variant::b) {
                    exceptions[shard].push_back({Term(r), first.first, Variant::b});
                    const auto a = detail::sample_length(r + m, kind);
                    const auto b = detail::sample_length(r + 2 * m, kind);
                    member = wanted(a) && wanted(b);
                } else {
                    const auto a = detail::sample_length(r + m, kind);
                    member = wanted(first) && wanted(a);
                    if (first != a) {
                        member = member && wanted(detail::sample_length(r + 2 * m, kind));
                    }
                }
                if (member) {
                    classes[shard].push_back(r);
                }
            }
        }
    });

    for (std::size_t i = 0; i < shards; ++i) {
        rep.classes.insert(rep.classes.end(), classes[i].begin(), classes[i].end());
        rep.exceptions.insert(rep.exceptions.end(), exceptions[i].begin(), exceptions[i].end());
    }
    return rep;
}

/// The same classes by refining parity vectors: T-kind classes start with two
/// odd steps and first cut (steps even, odd, odd) at step t; H-kind classes
/// start odd, even and first cut (odd, odd) at step h. Classes found mod 2^d
/// are lifted to mod 3 * 2^d and filtered by the starting residue mod 12.
inline LengthClassReport symbolic_length_classes(SubsequenceKind kind, std::size_t length,
                                                 const ScanOptions& opts = {}) {
    detail::require_length(length);
    LengthClassReport rep;
    rep.kind = kind;
    rep.length = length;
    rep.modulus = length_class_modulus(kind, length);

    const unsigned len = static_cast<unsigned>(length);
    const bool t_kind = kind == SubsequenceKind::t_kind;
    auto decide = [len, t_kind](const auto& c) {
        const unsigned d = c.node.depth;
        if (d == 1) {
            return c.odd_at(0) ? LiftAction::descend : LiftAction::prune;
        }
        if (d == 2 && c.odd_at(1) != t_kind) {
            return LiftAction::prune;
        }
        const unsigned window = t_kind ? 3 : 2;
        if (d < window) {
            return LiftAction::descend;
        }
        const unsigned k = d - window;
        const bool cut = k >= 1 && (t_kind ? (!c.odd_at(k) && c.odd_at(k + 1) && c.odd_at(k + 2))
                                           : (c.odd_at(k) && c.odd_at(k + 1)));
        if (cut) {
            return k == len ? LiftAction::emit : LiftAction::prune;
        }
        return k >= len ? LiftAction::prune : LiftAction::descend;
    };

    const std::uint64_t dyadic = rep.modulus / 3;
    for (std::uint64_t r : lift_search_checked(decide, opts.threads)) {
        for (std::uint64_t i = 0; i < 3; ++i) {
            const std::uint64_t lifted = r + i * dyadic;
            if (admissible_start_residue(kind, lifted)) {
                rep.classes.push_back(lifted);
            }
        }
    }
    std::sort(rep.classes.begin(), rep.classes.end());
    return rep;
}

/// Fibonacci(n) with F(1) = F(2) = 1.
inline std::uint64_t fibonacci(std::size_t n) {
    if (n > 93) {
        throw DomainError("fibonacci: F(n) exceeds 64 bits for n > 93");
    }
    std::uint64_t a = 0;
    std::uint64_t b = 1;
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t next = a + b;
        a = b;
        b = next;
    }
    return a;
}

/// F(h-1) for H-kind, 2 F(t+1) - 2 for T-kind.
inline std::uint64_t expected_count(SubsequenceKind kind, std::size_t length) {
    detail::require_length(length);
    if (length > 90) {
        throw DomainError("expected_count: length above 90 overflows 64 bits");
    }
    return kind == SubsequenceKind::h_kind ? fibonacci(length - 1) : 2 * fibonacci(length + 1) - 2;
}

struct FibonacciRow {
    std::size_t length = 0;
    std::uint64_t observed = 0;
    std::uint64_t expected = 0;
    bool match = false;
    bool brute_checked = false;
    bool brute_agree = false;

    friend bool operator==(const FibonacciRow&, const FibonacciRow&) = default;
};

/// One row per length in 2..length_max; brute force cross-checks each length
/// whose modulus is at most `brute_check_modulus`.
inline std::vector<FibonacciRow> verify_fibonacci_conjectures(SubsequenceKind kind, std::size_t length_max,
                                                              const ScanOptions& opts = {},
                                                              std::uint64_t brute_check_modulus = std::uint64_t{1}
                                                                                                  << 20) {
    detail::require_length(length_max);
    std::vector<FibonacciRow> rows;
    for (std::size_t len = 2; len <= length_max; ++len) {
        const auto sym = symbolic_length_classes(kind, len, opts);
        FibonacciRow row;
        row.length = len;
        row.observed = sym.classes.size();
        row.expected = expected_count(kind, len);
        row.match = row.observed == row.expected;
        if (sym.modulus <= brute_check_modulus) {
            row.brute_checked = true;
            row.brute_agree = brute_length_classes(kind, len, opts).classes == sym.classes;
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace collatz
