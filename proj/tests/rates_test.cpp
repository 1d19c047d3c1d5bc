#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "recomb/errors.hpp"
#include "recomb/rates.hpp"

using namespace recomb;

namespace {

SetPartition P(std::string_view s) { return SetPartition::parse(s); }

ProbSpec uniform_probs(const GroundSet& g)
{
    ProbSpec r(g);
    const auto parts = enumerate_partitions(g);
    for (const auto& p : parts)
        r.set(p, 1.0 / static_cast<double>(parts.size()));
    return r;
}

bool has_message(const std::vector<Diagnostic>& d, std::string_view text)
{
    for (const auto& x : d)
        if (x.message.find(text) != std::string::npos)
            return true;
    return false;
}

}  // namespace

TEST(PartitionFunction, KeysMustPartitionGround)
{
    RateSpec rho(GroundSet::range(3));
    rho.set(P("1|2,3"), 0.5);
    rho.add(P("1|2,3"), 0.25);
    EXPECT_DOUBLE_EQ(rho(P("1|2,3")), 0.75);
    EXPECT_EQ(rho(P("1,2|3")), 0.0);
    EXPECT_THROW(rho.set(P("1|2"), 1.0), InputError);
}

TEST(MarginalRates, FullSetIsIdentity)
{
    std::mt19937_64 gen(1);
    const auto g = GroundSet::range(4);
    const auto rho = oracle::random_rates(gen, g);
    EXPECT_EQ(marginal_rates(rho, g), rho);
    const auto r = oracle::random_probs(gen, g);
    EXPECT_EQ(marginal_probs(r, g), r);
}

TEST(MarginalRates, PairFromTriple)
{
    RateSpec rho(GroundSet::range(3));
    rho.set(P("1|2|3"), 0.1);
    rho.set(P("1,3|2"), 0.2);
    rho.set(P("1|2,3"), 0.4);
    rho.set(P("1,2|3"), 0.8);
    const auto m = marginal_rates(rho, GroundSet{1, 2});
    EXPECT_DOUBLE_EQ(m(P("1|2")), 0.1 + 0.2 + 0.4);
    EXPECT_DOUBLE_EQ(m(P("1,2")), 0.8);
}

TEST(MarginalRates, SingletonsRestrictToSingletons)
{
    const auto g = GroundSet::range(4);
    RateSpec rho(g);
    rho.set(SetPartition::zero(g), 1.3);
    const auto m = marginal_rates(rho, GroundSet{2, 4});
    EXPECT_EQ(m.values().size(), 1u);
    EXPECT_DOUBLE_EQ(m(P("2|4")), 1.3);
}

TEST(MarginalRates, InvalidSubset)
{
    const RateSpec rho(GroundSet::range(3));
    EXPECT_THROW(marginal_rates(rho, GroundSet{}), InputError);
    EXPECT_THROW(marginal_rates(rho, GroundSet{1, 4}), InputError);
}

TEST(MarginalProbs, UniformTripleToPair)
{
    const auto m = marginal_probs(uniform_probs(GroundSet::range(3)), GroundSet{1, 2});
    EXPECT_NEAR(m(P("1,2")), 2.0 / 5.0, 1e-15);
    EXPECT_NEAR(m(P("1|2")), 3.0 / 5.0, 1e-15);
}

TEST(MarginalProbs, SumsToOne)
{
    std::mt19937_64 gen(7);
    const auto g = GroundSet::range(5);
    for (int trial = 0; trial < 5; ++trial) {
        const auto r = oracle::random_probs(gen, g);
        for (const auto& u : std::vector<GroundSet>{{1}, {2, 5}, {1, 3, 4}, {1, 2, 3, 5}}) {
            const auto m = marginal_probs(r, u);
            EXPECT_NEAR(m.total(), 1.0, 1e-14);
            EXPECT_TRUE(validate(m).empty());
        }
    }
}

TEST(Marginalization, AgreesWithBruteForceFiberSum)
{
    std::mt19937_64 gen(3);
    const auto g = GroundSet::range(4);
    const auto rho = oracle::random_rates(gen, g, 0.8);
    const GroundSet u{1, 3, 4};
    const auto m = marginal_rates(rho, u);
    for (const auto& a : enumerate_partitions(u)) {
        double expected = 0.0;
        for (const auto& b : enumerate_partitions(g)) {
            // B|_U == A iff every pair in U is together in B exactly when in A.
            bool same = true;
            for (int x : u)
                for (int y : u)
                    if ((b.block_of(x) == b.block_of(y)) != (a.block_of(x) == a.block_of(y)))
                        same = false;
            if (same)
                expected += rho(b);
        }
        EXPECT_NEAR(m(a), expected, 1e-15) << a.to_string();
    }
}

TEST(Marginalization, TransitiveExhaustive)
{
    std::mt19937_64 gen(13);
    for (int n = 1; n <= 4; ++n) {
        const auto g = GroundSet::range(n);
        const auto rho = oracle::random_rates(gen, g, 0.9);
        // All chains V ⊆ U ⊆ S with V non-empty, via bitmasks.
        for (unsigned um = 1; um < (1u << n); ++um) {
            std::vector<int> ue;
            for (int i = 0; i < n; ++i)
                if (um & (1u << i))
                    ue.push_back(i + 1);
            const GroundSet u(ue);
            const auto mu = marginal_rates(rho, u);
            EXPECT_NEAR(mu.total(), rho.total(), 1e-14);
            for (unsigned vm = um; vm; vm = (vm - 1) & um) {
                std::vector<int> ve;
                for (int i = 0; i < n; ++i)
                    if (vm & (1u << i))
                        ve.push_back(i + 1);
                const GroundSet v(ve);
                const auto lhs = marginal_rates(mu, v);
                const auto rhs = marginal_rates(rho, v);
                for (const auto& a : enumerate_partitions(v))
                    EXPECT_NEAR(lhs(a), rhs(a), 1e-14);
            }
        }
    }
}

TEST(Marginalization, NonTrivialMassOnlyShrinks)
{
    std::mt19937_64 gen(19);
    const auto g = GroundSet::range(4);
    const auto rho = oracle::random_rates(gen, g);
    for (const auto& u : std::vector<GroundSet>{{1, 2}, {2, 3, 4}, {3}}) {
        const auto m = without_trivial_rate(marginal_rates(rho, u));
        EXPECT_LE(m.total(), rho.total() + 1e-15);
    }
}

TEST(WithoutTrivialRate, DropsSingleBlock)
{
    const auto g = GroundSet::range(3);
    RateSpec rho(g);
    rho.set(SetPartition::one(g), 5.0);
    rho.set(P("1|2,3"), 1.0);
    const auto out = without_trivial_rate(rho);
    EXPECT_EQ(out.values().size(), 1u);
    EXPECT_EQ(out(SetPartition::one(g)), 0.0);
}

TEST(Validate, WellFormed)
{
    std::mt19937_64 gen(29);
    const auto g = GroundSet::range(4);
    EXPECT_TRUE(validate(oracle::random_rates(gen, g)).empty());
    EXPECT_TRUE(validate(oracle::random_probs(gen, g)).empty());
    EXPECT_NO_THROW(require_valid(uniform_probs(g)));
}

TEST(Validate, SumDeviation)
{
    const auto g = GroundSet::range(3);
    ProbSpec r(g);
    r.set(SetPartition::one(g), 0.5);
    r.set(P("1|2|3"), 0.4);
    const auto d = validate(r);
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d[0].message, "sum deviates by 0.1");
    EXPECT_THROW(require_valid(r), InputError);
}

TEST(Validate, NegativeAndNonFinite)
{
    const auto g = GroundSet::range(3);
    RateSpec rho(g);
    rho.set(P("1|2,3"), -0.5);
    rho.set(P("1,2|3"), std::numeric_limits<double>::quiet_NaN());
    const auto d = validate(rho);
    EXPECT_EQ(d.size(), 2u);
    EXPECT_TRUE(has_message(d, "negative value"));
    EXPECT_TRUE(has_message(d, "not finite"));
    EXPECT_THROW(require_valid(rho), InputError);
}

TEST(Validate, RawKeys)
{
    const auto g = GroundSet::range(3);
    const std::vector<RawEntry> entries{
        {"1,2|2,3", {{1, 2}, {2, 3}}, 0.5},
        {"1|2,3", {{1}, {2, 3}}, 0.25},
        {"3,2|1", {{3, 2}, {1}}, 0.25},
        {"1,2", {{1, 2}}, 0.25},
    };
    const auto d = validate(g, entries, SpecKind::rates);
    ASSERT_EQ(d.size(), 3u);
    EXPECT_EQ(d[0].key, "1,2|2,3");
    EXPECT_NE(d[0].message.find("not a partition"), std::string::npos);
    EXPECT_EQ(d[1].key, "3,2|1");
    EXPECT_NE(d[1].message.find("duplicate"), std::string::npos);
    EXPECT_EQ(d[2].key, "1,2");
    EXPECT_NE(d[2].message.find("not a partition"), std::string::npos);

    const std::vector<RawEntry> probs{{"1,2,3", {{1, 2, 3}}, 0.9}};
    const auto dp = validate(g, probs, SpecKind::probabilities);
    ASSERT_EQ(dp.size(), 1u);
    EXPECT_EQ(dp[0].message, "sum deviates by 0.1");
}
