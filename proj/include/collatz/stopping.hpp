#pragma once

// Stopping time sigma(s), the subsequence count tau(s), and the residue
// classes mod 2^sigma and mod 3 * 2^sigma that share them.

#include <collatz/parallel.hpp>
#include <collatz/subseq.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace collatz {

struct StoppingProfile {
    Term s;
    std::uint64_t sigma = 0;
    std::uint64_t tau = 0;
    Term crossing_value;
    // canonical starts of the C^t blocks traversed, in order
    std::vector<Term> subsequence_starts;

    friend bool operator==(const StoppingProfile&, const StoppingProfile&) = default;
};

/// 1 + floor(n log2 3): the stopping time of a class with n odd steps.
inline std::uint64_t admissible_sigma(std::uint64_t n) { return 1 + floor_log2_pow3(n); }

/// True when k = admissible_sigma(n) for some n >= 0; sets n.
inline bool is_admissible_sigma(std::uint64_t k, std::uint64_t* n_out = nullptr) {
    for (std::uint64_t n = 0;; ++n) {
        const std::uint64_t a = admissible_sigma(n);
        if (a == k) {
            if (n_out) {
                *n_out = n;
            }
            return true;
        }
        if (a > k) {
            return false;
        }
    }
}

namespace detail {

// least k <= max_steps with T^k(s) < s
template <class Int>
std::optional<std::uint64_t> sigma_bounded(const Int& s, std::uint64_t max_steps) {
    Int x = s;
    for (std::uint64_t k = 1; k <= max_steps; ++k) {
        x = checked_step(x);
        if (x < s) {
            return k;
        }
    }
    return std::nullopt;
}

struct SigmaTau {
    std::uint64_t sigma = 0;
    std::uint64_t tau = 0;

    friend bool operator==(const SigmaTau&, const SigmaTau&) = default;
};

// (sigma, tau) if the crossing happens within max_steps. A block starts at
// index k when T^(k-1)(s) is even and T^k(s) = 3 (mod 4); a crossing at such
// an index is charged to the block that just ended.
template <class Int>
std::optional<SigmaTau> sigma_tau_bounded(const Int& s, std::uint64_t max_steps) {
    Int x = s;
    std::uint64_t blocks = 1;
    for (std::uint64_t k = 1; k <= max_steps; ++k) {
        const bool prev_even = !is_odd(x);
        x = checked_step(x);
        if (x < s) {
            return SigmaTau{k, blocks};
        }
        if (prev_even && mod_small(x, 4) == 3) {
            ++blocks;
        }
    }
    return std::nullopt;
}

inline std::optional<SigmaTau> sigma_tau_u64(std::uint64_t s, std::uint64_t max_steps) {
    try {
        return sigma_tau_bounded<std::uint64_t>(s, max_steps);
    } catch (const Overflow&) {
        return sigma_tau_bounded<BigInt>(BigInt(s), max_steps);
    }
}

inline std::optional<std::uint64_t> sigma_u64(std::uint64_t s, std::uint64_t max_steps) {
    try {
        return sigma_bounded<std::uint64_t>(s, max_steps);
    } catch (const Overflow&) {
        return sigma_bounded<BigInt>(BigInt(s), max_steps);
    }
}

inline void require_tau_domain(const Term& s) {
    require_term(s, "tau");
    const unsigned r = small_mod(s, 12);
    if (r != 3 && r != 7) {
        throw DomainError("tau: start " + s.str() + " is not = 3, 7 (mod 12)");
    }
}

} // namespace detail

/// Least k with T^k(s) < s.
inline std::uint64_t sigma(const Term& s, std::uint64_t cap = default_step_cap) {
    require_term(s, "sigma");
    if (s == 1) {
        throw DomainError("sigma: undefined for s = 1");
    }
    TermWalker w(s);
    for (std::uint64_t k = 1; k <= cap; ++k) {
        w.step();
        if (w.less_than(s)) {
            return k;
        }
    }
    throw CapExhausted("sigma: no stopping time found up to cap " + std::to_string(cap), cap);
}

/// sigma(s) together with the number of C^t blocks traversed until it is reached.
inline StoppingProfile tau(const Term& s, std::uint64_t cap = default_step_cap) {
    detail::require_tau_domain(s);
    StoppingProfile p;
    p.s = s;
    p.subsequence_starts.push_back(s);
    TermWalker w(s);
    for (std::uint64_t k = 1; k <= cap; ++k) {
        const bool prev_even = !w.odd();
        w.step();
        if (w.less_than(s)) {
            p.sigma = k;
            p.tau = p.subsequence_starts.size();
            p.crossing_value = w.value();
            return p;
        }
        if (prev_even && w.mod(4) == 3) {
            p.subsequence_starts.push_back(canonical_start(w.value()).start);
        }
    }
    throw CapExhausted("tau: no stopping time found up to cap " + std::to_string(cap), cap);
}

struct SigmaDiscrepancy {
    std::uint64_t residue = 0;
    std::uint64_t representative = 0;
    // nullopt when no crossing occurred within sigma steps
    std::optional<std::uint64_t> direct_sigma;

    friend bool operator==(const SigmaDiscrepancy&, const SigmaDiscrepancy&) = default;
};

struct SigmaClassReport {
    std::uint64_t n = 0;
    std::uint64_t sigma = 0;
    std::uint64_t modulus = 0;
    std::vector<std::uint64_t> classes;
    std::vector<SigmaDiscrepancy> discrepancies;

    std::uint64_t z() const noexcept { return classes.size(); }

    friend bool operator==(const SigmaClassReport&, const SigmaClassReport&) = default;
};

namespace detail {

inline std::uint64_t checked_sigma_for(std::uint64_t n, unsigned limit, bool unsafe, const char* what) {
    const std::uint64_t s = admissible_sigma(n);
    if (s > 61) {
        throw GuardExceeded(std::string(what) + ": sigma " + std::to_string(s) + " exceeds 64-bit residues");
    }
    if (!unsafe && s > limit) {
        throw GuardExceeded(std::string(what) + ": sigma " + std::to_string(s) + " exceeds the guard " +
                            std::to_string(limit) + " (use the unsafe override)");
    }
    return s;
}

// the two smallest members >= 2 of [r]_m
inline std::pair<std::uint64_t, std::uint64_t> smallest_members(std::uint64_t r, std::uint64_t m) {
    const std::uint64_t first = r >= 2 ? r : r + m;
    return {first, first + m};
}

} // namespace detail

/// Classes mod 2^sigma, sigma = admissible_sigma(n), whose parity vector makes
/// the coefficient 3^j / 2^k drop below one first at k = sigma with j = n.
/// Each class is re-checked by direct simulation of its two smallest members.
inline SigmaClassReport enum_sigma_classes(std::uint64_t n, const ScanOptions& opts = {}) {
    SigmaClassReport rep;
    rep.n = n;
    rep.sigma = detail::checked_sigma_for(n, opts.max_sigma, opts.unsafe, "enum_sigma_classes");
    rep.modulus = std::uint64_t{1} << rep.sigma;

    const unsigned target = static_cast<unsigned>(rep.sigma);
    const unsigned odd_target = static_cast<unsigned>(n);
    auto decide = [target, odd_target](const auto& c) {
        if (c.node.contracting()) {
            return c.node.depth == target && c.node.odd_steps == odd_target ? LiftAction::emit : LiftAction::prune;
        }
        return c.node.depth >= target ? LiftAction::prune : LiftAction::descend;
    };
    rep.classes = lift_search_checked(decide, opts.threads);

    const std::size_t shards = std::min<std::size_t>(rep.classes.size(), 64);
    std::vector<std::vector<SigmaDiscrepancy>> found(shards);
    for_each_shard(opts.threads, shards, [&](std::size_t shard) {
        const std::size_t lo = rep.classes.size() * shard / shards;
        const std::size_t hi = rep.classes.size() * (shard + 1) / shards;
        for (std::size_t i = lo; i < hi; ++i) {
            const std::uint64_t r = rep.classes[i];
            const auto [a, b] = detail::smallest_members(r, rep.modulus);
            for (std::uint64_t x : {a, b}) {
                const auto direct = detail::sigma_u64(x, rep.sigma);
                if (direct != rep.sigma) {
                    found[shard].push_back({r, x, direct});
                }
            }
        }
    });
    for (auto& f : found) {
        rep.discrepancies.insert(rep.discrepancies.end(), f.begin(), f.end());
    }
    return rep;
}

/// Residues r mod 2^sigma whose smallest member >= 2 has stopping time exactly
/// sigma = admissible_sigma(n), by direct simulation of every residue.
inline std::vector<std::uint64_t> scan_sigma_classes_direct(std::uint64_t n, const ScanOptions& opts = {}) {
    const std::uint64_t s = detail::checked_sigma_for(n, opts.max_sigma, opts.unsafe, "scan_sigma_classes_direct");
    const std::uint64_t m = std::uint64_t{1} << s;
    const std::size_t shards = static_cast<std::size_t>(std::min<std::uint64_t>(m, 256));
    std::vector<std::vector<std::uint64_t>> parts(shards);
    for_each_shard(opts.threads, shards, [&](std::size_t shard) {
        const std::uint64_t lo = m * shard / shards;
        const std::uint64_t hi = m * (shard + 1) / shards;
        for (std::uint64_t r = lo; r < hi; ++r) {
            if (detail::sigma_u64(detail::smallest_members(r, m).first, s) == s) {
                parts[shard].push_back(r);
            }
        }
    });
    std::vector<std::uint64_t> out;
    for (auto& p : parts) {
        out.insert(out.end(), p.begin(), p.end());
    }
    return out;
}

/// A residue whose sampled members disagree on (sigma, tau).
struct UniformityViolation {
    std::uint64_t residue = 0;
    std::optional<std::uint64_t> sigma_low, tau_low;
    std::optional<std::uint64_t> sigma_lift, tau_lift;

    friend bool operator==(const UniformityViolation&, const UniformityViolation&) = default;
};

struct TauClassReport {
    std::uint64_t n = 0;
    std::uint64_t sigma = 0;
    std::uint64_t modulus = 0;
    // tau -> sorted residues mod 3 * 2^sigma
    std::map<std::uint64_t, std::vector<std::uint64_t>> classes;
    std::vector<UniformityViolation> violations;

    std::map<std::uint64_t, std::uint64_t> counts() const {
        std::map<std::uint64_t, std::uint64_t> out;
        for (const auto& [t, list] : classes) {
            out[t] = list.size();
        }
        return out;
    }

    std::uint64_t total() const {
        std::uint64_t sum = 0;
        for (const auto& [t, list] : classes) {
            sum += list.size();
        }
        return sum;
    }

    friend bool operator==(const TauClassReport&, const TauClassReport&) = default;
};

/// Residues r = 3, 7 (mod 12) below 3 * 2^sigma whose members stop at
/// sigma = admissible_sigma(n), grouped by tau. Both r and r + 3 * 2^sigma are
/// simulated; any disagreement is reported as a uniformity violation.
inline TauClassReport enum_tau_classes(std::uint64_t n, std::optional<std::uint64_t> tau_filter = std::nullopt,
                                       const ScanOptions& opts = {}) {
    if (n < 2) {
        throw DomainError("enum_tau_classes: n must be >= 2");
    }
    TauClassReport rep;
    rep.n = n;
    rep.sigma = detail::checked_sigma_for(n, opts.max_sigma_tau, opts.unsafe, "enum_tau_classes");
    rep.modulus = std::uint64_t{3} << rep.sigma;

    const std::uint64_t m = rep.modulus;
    const std::uint64_t blocks = m / 12;
    const std::size_t shards = static_cast<std::size_t>(std::min<std::uint64_t>(blocks, 256));
    struct Hit {
        std::uint64_t tau;
        std::uint64_t residue;
    };
    std::vector<std::vector<Hit>> hits(shards);
    std::vector<std::vector<UniformityViolation>> bad(shards);

    for_each_shard(opts.threads, shards, [&](std::size_t shard) {
        const std::uint64_t lo = blocks * shard / shards;
        const std::uint64_t hi = blocks * (shard + 1) / shards;
        for (std::uint64_t q = lo; q < hi; ++q) {
            for (std::uint64_t base : {3u, 7u}) {
                const std::uint64_t r = 12 * q + base;
                const auto low = detail::sigma_tau_u64(r, rep.sigma);
                const auto lift = detail::sigma_tau_u64(r + m, rep.sigma);
                const bool low_in = low && low->sigma == rep.sigma;
                const bool lift_in = lift && lift->sigma == rep.sigma;
                if (low_in != lift_in || (low_in && low->tau != lift->tau)) {
                    UniformityViolation v;
                    v.residue = r;
                    if (low) {
                        v.sigma_low = low->sigma;
                        v.tau_low = low->tau;
                    }
                    if (lift) {
                        v.sigma_lift = lift->sigma;
                        v.tau_lift = lift->tau;
                    }
                    bad[shard].push_back(v);
                }
                if (low_in && (!tau_filter || low->tau == *tau_filter)) {
                    hits[shard].push_back({low->tau, r});
                }
            }
        }
    });

    if (tau_filter) {
        rep.classes[*tau_filter];
    }
    for (std::size_t i = 0; i < shards; ++i) {
        for (const auto& h : hits[i]) {
            rep.classes[h.tau].push_back(h.residue);
        }
        rep.violations.insert(rep.violations.end(), bad[i].begin(), bad[i].end());
    }
    return rep;
}

struct Conjecture3Result {
    std::uint64_t n = 0;
    std::uint64_t z = 0;
    // sum over tau of A_tau(n); the conjecture compares z with half of it
    std::uint64_t tau_sum = 0;
    bool match = false;
};

inline Conjecture3Result verify_conjecture_3(std::uint64_t n, const ScanOptions& opts = {}) {
    Conjecture3Result r;
    r.n = n;
    r.z = enum_sigma_classes(n, opts).z();
    r.tau_sum = enum_tau_classes(n, std::nullopt, opts).total();
    r.match = r.tau_sum == 2 * r.z;
    return r;
}

struct Conjecture4Result {
    std::uint64_t n = 0;
    std::uint64_t observed = 0;
    std::uint64_t expected = 0;
    std::uint64_t m = 0;
    bool match = false;
};

/// A_1(n) = 2^m with m = 1 + floor((n-1) log2 3) - (n-1).
inline Conjecture4Result verify_conjecture_4(std::uint64_t n, const ScanOptions& opts = {}) {
    if (n < 2) {
        throw DomainError("verify_conjecture_4: n must be >= 2");
    }
    Conjecture4Result r;
    r.n = n;
    r.m = 1 + floor_log2_pow3(n - 1) - (n - 1);
    r.expected = std::uint64_t{1} << r.m;
    r.observed = enum_tau_classes(n, 1, opts).classes[1].size();
    r.match = r.observed == r.expected;
    return r;
}

struct CountTable {
    // (tau, n) -> A_tau(n), nonzero entries only
    std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t> rows;
    std::map<std::uint64_t, std::uint64_t> z;
    std::map<std::uint64_t, std::uint64_t> sigma_of_n;

    std::uint64_t at(std::uint64_t tau, std::uint64_t n) const {
        const auto it = rows.find({tau, n});
        return it == rows.end() ? 0 : it->second;
    }

    std::uint64_t max_tau() const {
        std::uint64_t t = 0;
        for (const auto& [key, v] : rows) {
            t = std::max(t, key.first);
        }
        return t;
    }

    friend bool operator==(const CountTable&, const CountTable&) = default;
};

/// A_tau(n), z(n) and sigma for n = 2..n_max.
inline CountTable tau_table(std::uint64_t n_max, const ScanOptions& opts = {}) {
    if (n_max < 2) {
        throw DomainError("tau_table: n_max must be >= 2");
    }
    CountTable t;
    for (std::uint64_t n = 2; n <= n_max; ++n) {
        const auto rep = enum_tau_classes(n, std::nullopt, opts);
        for (const auto& [tau_v, count] : rep.counts()) {
            if (count > 0) {
                t.rows[{tau_v, n}] = count;
            }
        }
        t.sigma_of_n[n] = rep.sigma;
        ScanOptions zopts = opts;
        zopts.max_sigma = std::max(opts.max_sigma, opts.max_sigma_tau);
        t.z[n] = enum_sigma_classes(n, zopts).z();
    }
    return t;
}

} // namespace collatz
