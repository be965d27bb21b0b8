#pragma once

// Deterministic sharding and the parity-tree search shared by the enumerations.

#include <collatz/core.hpp>

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <utility>
#include <vector>

namespace collatz {

/// Size guards and the worker count for the residue enumerations.
struct ScanOptions {
    unsigned threads = 1;
    // mod 2^sigma scans
    unsigned max_sigma = 24;
    // mod 3 * 2^sigma scans
    unsigned max_sigma_tau = 23;
    std::uint64_t max_brute_modulus = std::uint64_t{1} << 28;
    bool unsafe = false;
};

inline unsigned effective_threads(unsigned requested) {
    if (requested == 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1 : hw;
    }
    return requested;
}

/// Runs f(shard) for shard in [0, shards) on up to `threads` workers.
/// The first exception thrown by any shard is rethrown on the caller.
template <class F>
void for_each_shard(unsigned threads, std::size_t shards, F&& f) {
    threads = effective_threads(threads);
    if (threads <= 1 || shards <= 1) {
        for (std::size_t i = 0; i < shards; ++i) {
            f(i);
        }
        return;
    }
    const std::size_t workers = std::min<std::size_t>(threads, shards);
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < shards; i += workers) {
                        f(i);
                    }
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

enum class LiftAction { descend, emit, prune };

/// A LiftNode plus the parities of its steps (bit i = parity of step i, 1 = odd).
template <class Int>
struct SearchNode {
    LiftNode<Int> node;
    std::uint64_t parity_bits = 0;

    bool odd_at(unsigned i) const noexcept { return ((parity_bits >> i) & 1) != 0; }

    SearchNode child(unsigned bit) const {
        Parity p{};
        SearchNode c{node.child(bit, p), parity_bits};
        if (p == Parity::odd) {
            c.parity_bits |= std::uint64_t{1} << node.depth;
        }
        return c;
    }
};

namespace detail {

template <class Int, class Decide>
void lift_subtree(const SearchNode<Int>& root, Decide& decide, std::vector<std::uint64_t>& out) {
    std::vector<SearchNode<Int>> stack{root};
    while (!stack.empty()) {
        const SearchNode<Int> cur = std::move(stack.back());
        stack.pop_back();
        for (unsigned bit = 0; bit < 2; ++bit) {
            SearchNode<Int> c = cur.child(bit);
            switch (decide(c)) {
            case LiftAction::emit:
                out.push_back(c.node.residue);
                break;
            case LiftAction::descend:
                stack.push_back(std::move(c));
                break;
            case LiftAction::prune:
                break;
            }
        }
    }
}

} // namespace detail

/// Residues mod 2^depth (sorted) of every node the predicate emits, searching
/// the parity tree from the root class [0]_1. `decide` must prune by depth 63.
template <class Int, class Decide>
std::vector<std::uint64_t> lift_search(Decide decide, unsigned threads = 1) {
    std::vector<std::uint64_t> out;
    std::vector<SearchNode<Int>> frontier{SearchNode<Int>{}};
    const std::size_t wanted = 16 * static_cast<std::size_t>(effective_threads(threads));

    // breadth-first until there is enough independent work to shard
    while (!frontier.empty() && frontier.size() < wanted && effective_threads(threads) > 1) {
        std::vector<SearchNode<Int>> next;
        for (const auto& n : frontier) {
            for (unsigned bit = 0; bit < 2; ++bit) {
                SearchNode<Int> c = n.child(bit);
                switch (decide(c)) {
                case LiftAction::emit:
                    out.push_back(c.node.residue);
                    break;
                case LiftAction::descend:
                    next.push_back(std::move(c));
                    break;
                case LiftAction::prune:
                    break;
                }
            }
        }
        frontier = std::move(next);
    }

    std::vector<std::vector<std::uint64_t>> parts(frontier.size());
    for_each_shard(threads, frontier.size(),
                   [&](std::size_t i) { detail::lift_subtree(frontier[i], decide, parts[i]); });
    for (auto& p : parts) {
        out.insert(out.end(), p.begin(), p.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// lift_search on 64-bit values, repeated with BigInt if any value overflows.
template <class Decide>
std::vector<std::uint64_t> lift_search_checked(Decide decide, unsigned threads = 1) {
    try {
        return lift_search<std::uint64_t>(decide, threads);
    } catch (const detail::Overflow&) {
        return lift_search<BigInt>(decide, threads);
    }
}

} // namespace collatz
