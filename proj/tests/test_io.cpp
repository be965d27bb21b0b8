#include "support.hpp"

#include <gtest/gtest.h>

using namespace collatz;
using support::T;

namespace {

template <class V>
void expect_round_trip(const V& value) {
    const json j = value;
    const V back = json::parse(j.dump()).get<V>();
    EXPECT_EQ(back, value);
}

} // namespace

TEST(Io, FixturesRenderByteIdentical) {
    for (const char* name : {"h_length_classes.txt", "t_length_classes.txt", "sigma_classes.txt", "tau_classes.txt"}) {
        const auto text = oracle::slurp(support::fixture(name));
        EXPECT_EQ(render_blocks(parse_blocks(text)), text) << name;
    }
}

TEST(Io, BlockLayout) {
    const auto rep = enum_tau_classes(8, 3);
    const auto text = render_block(to_block(rep, 3));
    EXPECT_EQ(text.substr(0, text.find('\n')), "n=8, sigma=13, A_3(n)=40");
    EXPECT_NE(text.find("\n(mod 24576)\n"), std::string::npos);
    EXPECT_EQ(render_block(to_block(symbolic_length_classes(SubsequenceKind::h_kind, 4))), "h=4\n33, 165\n(mod 192)\n");
    EXPECT_EQ(render_block(to_block(enum_sigma_classes(4))), "sigma=7\n7, 15, 59\n(mod 128)\n");
}

TEST(Io, ParseRejectsMalformedBlocks) {
    EXPECT_THROW(parse_blocks("h=2\n9\n"), FormatError);
    EXPECT_THROW(parse_blocks("h=2\n9\n(mod x)\n"), FormatError);
    EXPECT_THROW(parse_blocks("h=2\n9, a\n(mod 48)\n"), FormatError);
    EXPECT_TRUE(parse_blocks("\n\n").empty());
}

TEST(Io, JsonRoundTrips) {
    expect_round_trip(symbolic_length_classes(SubsequenceKind::t_kind, 6));
    expect_round_trip(brute_length_classes(SubsequenceKind::h_kind, 8));
    expect_round_trip(enum_sigma_classes(9));
    expect_round_trip(enum_tau_classes(9));
    expect_round_trip(enum_tau_classes(7, 2));
    expect_round_trip(tau_table(7));
    expect_round_trip(tau(parse_decimal("2602714556700227743")));
    expect_round_trip(decompose(T(27)));
    expect_round_trip(decompose(T(9)));
    expect_round_trip(extract_subsequence(T(3)));
    expect_round_trip(verify_fibonacci_conjectures(SubsequenceKind::t_kind, 6));
    expect_round_trip(trajectory(T(97)));
}

TEST(Io, BigIntegersAreStrings) {
    const json j = tau(parse_decimal("2602714556700227743"));
    EXPECT_TRUE(j.at("s").is_string());
    EXPECT_EQ(j.at("s").get<std::string>(), "2602714556700227743");
    EXPECT_EQ(j.at("sigma").get<std::uint64_t>(), 1005u);
    EXPECT_THROW(json("12x").get<BigInt>(), FormatError);
}

TEST(Io, LimitJson) {
    const json j = theorem5_quotient(11);
    EXPECT_EQ(j.at("quotient").at("numerator").get<std::string>(), "2048");
    EXPECT_EQ(j.at("quotient").at("denominator").get<std::string>(), "1353");
    EXPECT_EQ(j.at("denominator").at("numerator").get<std::string>(), "1353");
    EXPECT_EQ(j.at("denominator").at("exponent").get<int>(), 1);
    EXPECT_EQ(j.at("terms").size(), 10u);
}

TEST(Io, Csv) {
    const auto csv = csv_classes({to_block(enum_sigma_classes(4))});
    EXPECT_EQ(csv, "header,modulus,residue\n\"sigma=7\",128,7\n\"sigma=7\",128,15\n\"sigma=7\",128,59\n");
    EXPECT_EQ(csv_terms({T(3), T(5)}), "index,term\n0,3\n1,5\n");
}
