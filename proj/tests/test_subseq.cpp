#include "support.hpp"

#include <gtest/gtest.h>

#include <unordered_map>

using namespace collatz;
using support::T;

namespace {

std::vector<Term> terms(std::initializer_list<std::uint64_t> v) { return {v.begin(), v.end()}; }

} // namespace

TEST(Subseq, ExtractExamples) {
    const auto a = extract_subsequence(T(19));
    EXPECT_EQ(a.terms, terms({19, 29, 44, 22}));
    EXPECT_EQ(a.kind, SubsequenceKind::t_kind);
    EXPECT_EQ(a.variant, Variant::a);
    EXPECT_EQ(a.length_index, 3u);
    EXPECT_EQ(*a.max_odd, 29);
    EXPECT_EQ(*a.max_even, 44);

    const auto h = extract_subsequence(T(9));
    EXPECT_EQ(h.terms, terms({9, 14, 7}));
    EXPECT_EQ(h.kind, SubsequenceKind::h_kind);
    EXPECT_EQ(h.variant, Variant::a);
    EXPECT_EQ(h.length_index, 2u);

    const auto b = extract_subsequence(T(3));
    EXPECT_EQ(b.terms, terms({3, 5, 8, 4, 2, 1}));
    EXPECT_EQ(b.variant, Variant::b);
    EXPECT_EQ(b.length_index, 5u);
}

TEST(Subseq, ExtractRejectsOtherResidues) {
    for (std::uint64_t s : {1u, 2u, 5u, 11u, 12u, 13u}) {
        EXPECT_THROW(extract_subsequence(T(s)), DomainError) << s;
    }
}

TEST(Subseq, ExtractMatchesOracleBlock) {
    for (std::uint64_t s = 3; s <= 20000; ++s) {
        const auto r = s % 12;
        if (r != 3 && r != 7 && r != 9) {
            continue;
        }
        const auto sub = extract_subsequence(T(s));
        const auto ob = oracle::block_from(T(s));
        ASSERT_EQ(sub.terms, ob.terms) << s;
        ASSERT_EQ(sub.variant == Variant::b, ob.ends_at_one) << s;
        ASSERT_EQ(subsequence_length(s), std::make_pair(sub.length_index, sub.variant)) << s;
    }
}

TEST(Subseq, StructureOfTKind) {
    for (std::uint64_t s = 3; s <= 100000; s += 4) {
        if (s % 12 != 3 && s % 12 != 7) {
            continue;
        }
        const auto sub = extract_subsequence(T(s));
        const auto bad = structure_violation(sub);
        ASSERT_FALSE(bad) << s << ": " << *bad;
        if (sub.variant == Variant::a) {
            const Term next = t_step(sub.end_term);
            ASSERT_EQ(small_mod(next, 4), 3u) << s;
            ASSERT_LT(next, *sub.max_odd) << s;
        }
    }
}

TEST(Subseq, StructureOfHKind) {
    for (std::uint64_t s = 9; s <= 100000; s += 12) {
        const auto sub = extract_subsequence(T(s));
        const auto bad = structure_violation(sub);
        ASSERT_FALSE(bad) << s << ": " << *bad;
        ASSERT_EQ(small_mod(sub.terms[0], 4), 1u);
    }
}

TEST(Subseq, StructureCheckerCatchesDamage) {
    auto sub = extract_subsequence(T(31));
    ASSERT_FALSE(structure_violation(sub));
    auto broken = sub;
    broken.terms[3] += 2;
    EXPECT_TRUE(structure_violation(broken));
    broken = sub;
    broken.max_even = broken.terms[1];
    EXPECT_TRUE(structure_violation(broken));
    broken = sub;
    broken.variant = Variant::b;
    EXPECT_TRUE(structure_violation(broken));
}

TEST(Subseq, CanonicalStartExamples) {
    const auto a = canonical_start(T(167));
    EXPECT_EQ(a.start, 111);
    EXPECT_EQ(a.offset, 1u);
    const auto b = canonical_start(T(19));
    EXPECT_EQ(b.start, 19);
    EXPECT_EQ(b.offset, 0u);
    const auto c = canonical_start(T(119));
    EXPECT_EQ(c.start, 79);
    EXPECT_EQ(c.offset, 1u);
    EXPECT_EQ(extract_subsequence(T(79)).terms[1], 119);
    EXPECT_THROW(canonical_start(T(21)), DomainError);
}

TEST(Subseq, EveryThreeModFourTermLiesInExactlyOneCt) {
    const std::uint64_t limit = 100000;
    std::unordered_map<std::uint64_t, std::pair<int, std::uint64_t>> hits;
    for (std::uint64_t s = 3; s <= limit; s += 4) {
        if (s % 12 == 11) {
            continue;
        }
        // the [3]_4 terms of a C^t are exactly its rising prefix
        const auto sub = extract_subsequence(T(s));
        for (std::size_t i = 0; i < sub.terms.size() && small_mod(sub.terms[i], 4) == 3; ++i) {
            if (sub.terms[i] <= limit && bit_test(sub.terms[i], 0)) {
                auto& h = hits[static_cast<std::uint64_t>(sub.terms[i])];
                ++h.first;
                h.second = s;
            }
        }
    }
    for (std::uint64_t x = 3; x <= limit; x += 4) {
        const auto it = hits.find(x);
        ASSERT_NE(it, hits.end()) << x;
        ASSERT_EQ(it->second.first, 1) << x;
        const auto cs = canonical_start(T(x));
        ASSERT_EQ(cs.start, it->second.second) << x;
        ASSERT_EQ(extract_subsequence(cs.start).terms.at(cs.offset), x) << x;
    }
}

TEST(Subseq, DecomposeTwentySeven) {
    const auto d = decompose(T(27));
    ASSERT_TRUE(d.complete);
    EXPECT_TRUE(d.preamble.empty());
    ASSERT_EQ(d.entries.size(), 10u);
    const std::vector<std::uint64_t> starts{27, 31, 91, 103, 175, 111, 283, 319, 607, 15};
    const std::vector<std::size_t> offsets{0, 0, 0, 0, 0, 1, 0, 0, 1, 1};
    for (std::size_t i = 0; i < 10; ++i) {
        EXPECT_EQ(d.entries[i].subsequence.start(), starts[i]) << i;
        EXPECT_EQ(d.entries[i].subsequence.kind, SubsequenceKind::t_kind);
        EXPECT_EQ(d.entries[i].entry_offset, offsets[i]) << i;
    }
    EXPECT_EQ(d.entries[4].subsequence.terms, terms({175, 263, 395, 593, 890, 445, 668, 334}));
    EXPECT_EQ(d.entries[5].subsequence.terms, terms({111, 167, 251, 377, 566}));
    EXPECT_EQ(d.entries[9].subsequence.variant, Variant::b);
    EXPECT_EQ(d.reconstruct(), trajectory(T(27)).terms);
}

TEST(Subseq, DecomposeSmallCases) {
    const auto d9 = decompose(T(9));
    ASSERT_GE(d9.entries.size(), 2u);
    EXPECT_EQ(d9.entries[0].subsequence.terms, terms({9, 14, 7}));
    EXPECT_EQ(d9.entries[1].subsequence.start(), 7);
    EXPECT_EQ(d9.reconstruct(), trajectory(T(9)).terms);

    const auto d4 = decompose(T(4));
    EXPECT_EQ(d4.preamble, terms({4, 2, 1}));
    EXPECT_TRUE(d4.entries.empty());
    EXPECT_TRUE(d4.complete);

    const auto d1 = decompose(T(1));
    EXPECT_EQ(d1.preamble, terms({1}));
    EXPECT_TRUE(d1.complete);

    const auto partial = decompose(T(27), 3);
    EXPECT_FALSE(partial.complete);
    EXPECT_EQ(partial.entries.size(), 3u);
}

TEST(Subseq, DecompositionCoversEveryTrajectory) {
    for (std::uint64_t s = 1; s <= 10000; ++s) {
        const auto d = decompose(T(s));
        ASSERT_TRUE(d.complete) << s;
        ASSERT_EQ(d.reconstruct(), oracle::orbit(T(s))) << s;
        for (std::size_t i = 0; i < d.entries.size(); ++i) {
            if (i > 0) {
                ASSERT_EQ(d.entries[i].subsequence.kind, SubsequenceKind::t_kind) << s;
            }
        }
    }
}

TEST(Subseq, StoppingSequenceExamples) {
    EXPECT_TRUE(is_stopping_sequence(extract_subsequence(T(175))));
    EXPECT_FALSE(is_stopping_sequence(extract_subsequence(T(103))));
    EXPECT_TRUE(is_stopping_sequence(extract_subsequence(T(43))));
    EXPECT_THROW(is_stopping_sequence(extract_subsequence(T(9))), DomainError);
}

TEST(Subseq, StoppingSequenceMeansTauOne) {
    for (std::uint64_t s = 3; s <= 30000; s += 4) {
        if (s % 12 == 11) {
            continue;
        }
        const bool stop = is_stopping_sequence(extract_subsequence(T(s)));
        ASSERT_EQ(stop, oracle::sigma_tau(T(s)).second == 1) << s;
    }
}

TEST(Subseq, LemmaExamples) {
    EXPECT_TRUE(lemma::lemma3(T(22)));
    EXPECT_TRUE(lemma::lemma5(T(11)));
    EXPECT_TRUE(lemma::lemma10(T(13)));
    EXPECT_THROW(lemma::lemma3(T(21)), DomainError);
    EXPECT_THROW(lemma::lemma10(T(14)), DomainError);
}

TEST(Subseq, LemmataHoldOnTheirClasses) {
    const std::uint64_t limit = 100000;
    for (std::uint64_t n = 1; n <= limit; ++n) {
        const Term x = T(n);
        ASSERT_TRUE(lemma::lemma7(x)) << n;
        if (n % 2 == 0) {
            ASSERT_TRUE(lemma::lemma1(x)) << n;
        }
        if (n % 4 == 1 && n >= 5) {
            ASSERT_TRUE(lemma::lemma2(x)) << n;
        }
        if (n % 8 == 6) {
            ASSERT_TRUE(lemma::lemma3(x)) << n;
        }
        if (n % 4 == 3) {
            ASSERT_TRUE(lemma::lemma5(x)) << n;
            ASSERT_TRUE(lemma::lemma6(x)) << n;
            ASSERT_TRUE(lemma::lemma8(x)) << n;
        }
        if (n % 12 == 5) {
            ASSERT_TRUE(lemma::lemma9(x)) << n;
        }
        if (n % 12 == 1) {
            ASSERT_TRUE(lemma::lemma10(x)) << n;
        }
    }
    for (unsigned m = 0; m < 64; ++m) {
        ASSERT_TRUE(lemma::lemma4(Term(1) << m)) << m;
    }
    EXPECT_THROW(lemma::lemma4(T(6)), DomainError);
}

TEST(Subseq, FirstHListMatchesFixture) {
    std::istringstream in(oracle::slurp(support::fixture("first_h_subsequences.txt")));
    const auto rows = parse_term_lines(in);
    ASSERT_EQ(rows.size(), 173u);
    std::uint64_t s = 9;
    for (const auto& row : rows) {
        ASSERT_EQ(row.front(), s);
        ASSERT_EQ(extract_subsequence(T(s)).terms, row) << s;
        s += 12;
    }
    EXPECT_EQ(s - 12, 2073u);
}

TEST(Subseq, FirstTListMatchesFixture) {
    std::istringstream in(oracle::slurp(support::fixture("first_t_subsequences.txt")));
    const auto rows = parse_term_lines(in);
    ASSERT_EQ(rows.size(), 175u);
    std::size_t i = 0;
    for (std::uint64_t s = 3; s <= 1047; s += 4) {
        if (s % 12 == 11) {
            continue;
        }
        ASSERT_LT(i, rows.size());
        ASSERT_EQ(extract_subsequence(T(s)).terms, rows[i]) << s;
        ++i;
    }
    EXPECT_EQ(i, rows.size());
}
