#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace collatz;

namespace {

double to_double(const Rational& q) { return q.convert_to<double>(); }

std::map<std::uint64_t, std::uint64_t> published_z() {
    return parse_z_values(oracle::slurp(support::data_file("z_values.tsv"))).values;
}

// exact rational from a plain decimal string
Rational from_decimal(const std::string& s) {
    const auto dot = s.find('.');
    if (dot == std::string::npos) {
        return Rational(BigInt(s));
    }
    const std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    return Rational(BigInt(digits), pow(BigInt(10), static_cast<unsigned>(s.size() - dot - 1)));
}

} // namespace

TEST(Limits, BetaExamples) {
    EXPECT_EQ(beta(2), 1u);
    EXPECT_EQ(beta(3), 0u);
    EXPECT_EQ(beta(7), 1u);
    EXPECT_EQ(beta(8), 0u);
    EXPECT_THROW(beta(1), DomainError);
    const std::vector<unsigned> printed{1, 0, 1, 0, 1, 1, 0};
    EXPECT_FALSE(first_beta_mismatch(printed));
    EXPECT_EQ(first_beta_mismatch({1, 0, 0}), std::optional<std::size_t>(2));
}

TEST(Limits, BetaIdentity) {
    // incremental floor(n log2 3): largest k with 2^k <= 3^n
    oracle::Big p3 = 1;
    std::uint64_t k = 0;
    std::uint64_t prev = 0;
    for (std::uint64_t n = 1; n <= 10000; ++n) {
        p3 *= 3;
        while ((oracle::Big(1) << (k + 1)) <= p3) {
            ++k;
        }
        if (n >= 2) {
            ASSERT_EQ(k - prev + n - 1, n + beta(n)) << n;
            ASSERT_LE(beta(n), 1u);
        }
        prev = k;
    }
}

TEST(Limits, DyadicCanonicalForm) {
    const DyadicRational a(BigInt(12), 3);
    EXPECT_EQ(a.numerator(), 3);
    EXPECT_EQ(a.exponent(), 1);
    EXPECT_EQ(DyadicRational(BigInt(0), 9), DyadicRational());
    EXPECT_EQ(DyadicRational::pow2(-1) + DyadicRational::pow2(-1), DyadicRational::pow2(0));
    EXPECT_EQ(DyadicRational::pow2(3).to_rational(), 8);
    EXPECT_EQ(DyadicRational(BigInt(1353), 1).to_rational(), Rational(1353, 2));
    EXPECT_TRUE(DyadicRational::pow2(-2) < DyadicRational::pow2(-1));
}

TEST(Limits, Theorem5Examples) {
    const auto g11 = theorem5_quotient(11);
    EXPECT_EQ(g11.quotient, Rational(1024) / Rational(1353, 2));
    EXPECT_EQ(g11.denominator, DyadicRational(BigInt(1353), 1));
    EXPECT_EQ(g11.numerator, DyadicRational::pow2(10));
    EXPECT_NEAR(std::stod(g11.decimal), 1.51367, 5e-6);
    EXPECT_TRUE(g11.consistent());
    EXPECT_EQ(g11.terms.size(), 10u);

    EXPECT_EQ(theorem5_quotient(2).quotient, 4);
    EXPECT_NEAR(to_double(theorem5_quotient(60).quotient), 1.5121861, 1e-6);
    EXPECT_THROW(theorem5_quotient(1), DomainError);
}

TEST(Limits, Theorem5MatchesOracle) {
    for (std::uint64_t G = 2; G <= 80; ++G) {
        ASSERT_EQ(theorem5_quotient(G).quotient, oracle::theorem5(G)) << G;
    }
}

TEST(Limits, Theorem5Converges) {
    Rational prev = theorem5_quotient(10).quotient;
    Rational prev_gap = -1;
    for (std::uint64_t G = 11; G <= 200; ++G) {
        const auto q = theorem5_quotient(G).quotient;
        EXPECT_GT(q, Rational(3, 2)) << G;
        EXPECT_LT(q, Rational(152, 100)) << G;
        const Rational gap = abs(q - prev);
        if (prev_gap >= 0) {
            EXPECT_LE(gap, prev_gap) << G;
        }
        prev_gap = gap;
        prev = q;
    }
}

TEST(Limits, Theorem6Examples) {
    const auto z = published_z();
    EXPECT_EQ(theorem6_quotient(2, {{2, 1}}).quotient, 4);
    const auto g13 = theorem6_quotient(13, z);
    EXPECT_GT(g13.quotient, 1);
    EXPECT_LT(g13.quotient, Rational(12, 10));
    EXPECT_LT(g13.quotient - 1, theorem6_quotient(8, z).quotient - 1);
    EXPECT_TRUE(g13.consistent());
    EXPECT_THROW(theorem6_quotient(5, {{2, 1}, {3, 2}}), MissingZ);
    try {
        theorem6_quotient(5, {{2, 1}, {3, 2}});
    } catch (const MissingZ& e) {
        EXPECT_EQ(e.n(), 4u);
    }
}

TEST(Limits, Theorem6MatchesOracleAndDecreases) {
    const auto z = published_z();
    Rational prev = theorem6_quotient(2, z).quotient;
    for (std::uint64_t G = 3; G <= 14; ++G) {
        const auto q = theorem6_quotient(G, z).quotient;
        ASSERT_EQ(q, oracle::theorem6(G, z)) << G;
        EXPECT_LT(q, prev) << G;
        EXPECT_GT(q, 1) << G;
        prev = q;
    }
}

TEST(Limits, Theorem6WithComputedZ) {
    std::map<std::uint64_t, std::uint64_t> z;
    for (std::uint64_t n = 2; n <= 13; ++n) {
        z[n] = enum_sigma_classes(n).z();
    }
    Rational prev = theorem6_quotient(4, z).quotient;
    for (std::uint64_t G = 5; G <= 13; ++G) {
        const auto q = theorem6_quotient(G, z).quotient;
        EXPECT_LT(q, prev) << G;
        EXPECT_GT(q, 1) << G;
        prev = q;
    }
}

TEST(Limits, DecimalRendering) {
    EXPECT_EQ(decimal_string(Rational(2048, 1353)), "1.51367331855");
    EXPECT_EQ(decimal_string(Rational(4)), "4.00000000000");
    EXPECT_EQ(decimal_string(Rational(1, 3), 5), "0.33333");
    EXPECT_EQ(decimal_string(Rational(2, 3), 3), "0.667");
    EXPECT_EQ(decimal_string(Rational(1, 400), 3), "0.00250");
    EXPECT_EQ(decimal_string(Rational(99999, 1), 3), "100000");
    EXPECT_EQ(decimal_string(Rational(0)), "0");
    for (std::uint64_t G = 2; G <= 100; ++G) {
        const auto r = theorem5_quotient(G);
        ASSERT_EQ(decimal_string(from_decimal(r.decimal)), r.decimal) << G;
        ASSERT_LT(abs(from_decimal(r.decimal) - r.quotient), Rational(1, 100000000000LL)) << G;
    }
}

TEST(Limits, ZValuesParsing) {
    const auto ok = parse_z_values("# source: test data\n# comment\n2\t1\n\n3\t2\n");
    EXPECT_EQ(ok.source, "test data");
    EXPECT_EQ(ok.values, (std::map<std::uint64_t, std::uint64_t>{{2, 1}, {3, 2}}));
    EXPECT_THROW(parse_z_values("2\t1\n"), FormatError);
    EXPECT_THROW(parse_z_values("# just a comment\n2\t1\n"), FormatError);
    EXPECT_THROW(parse_z_values("# source: x\n2 1\n"), FormatError);
    EXPECT_THROW(parse_z_values("# source: x\n2\tone\n"), FormatError);
    EXPECT_THROW(parse_z_values("# source: x\n2\t1\n2\t1\n"), FormatError);
    EXPECT_THROW(parse_z_values(""), FormatError);

    const auto shipped = published_z();
    EXPECT_EQ(shipped.size(), 13u);
    EXPECT_EQ(shipped.at(8), 85u);
    EXPECT_EQ(shipped.at(14), 17637u);
}
