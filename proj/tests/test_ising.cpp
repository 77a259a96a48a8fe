#include <random>
#include <sstream>

#include "doctest.h"
#include "spinbench/ising.hpp"

using namespace spinbench;

namespace {

IsingInstance random_instance(std::mt19937_64& rng, int n, bool decimals) {
    IsingInstance inst;
    inst.n = n;
    inst.denominator = decimals ? 100 : 1;
    std::uniform_int_distribution<int> value(-500, 500);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (rng() % 3 == 0) {
                int v = value(rng);
                if (v == 0) v = 1;
                inst.couplings.push_back({i, j, v});
            }
        }
        if (rng() % 4 == 0) inst.biases.push_back({i, value(rng) | 1});
    }
    return inst;
}

}  // namespace

TEST_CASE("energy examples") {
    IsingInstance one_edge;
    one_edge.n = 2;
    one_edge.couplings = {{0, 1, -1}};
    CHECK(energy(one_edge, SpinConfiguration::uniform(2)) == Decimal{-1, 1});

    IsingInstance bias_only;
    bias_only.n = 2;
    bias_only.biases = {{0, 1}, {1, -2}};
    CHECK(energy(bias_only, SpinConfiguration::uniform(2)) == Decimal{-1, 1});

    IsingInstance cycle;
    cycle.n = 4;
    cycle.couplings = {{0, 1, -1}, {1, 2, -1}, {2, 3, -1}, {0, 3, 1}};
    CHECK(energy(cycle, SpinConfiguration::uniform(4)) == Decimal{-2, 1});

    CHECK_THROWS_AS(energy(cycle, SpinConfiguration::uniform(3)), InputError);
    CHECK_THROWS_AS(SpinConfiguration({1, 0, -1}), InputError);
}

TEST_CASE("energy is linear in each coupling and symmetric under global flip") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        IsingInstance inst = random_instance(rng, 8, trial % 2 == 0);
        std::vector<std::int8_t> s(8);
        for (auto& x : s) x = rng() % 2 ? 1 : -1;
        const SpinConfiguration cfg(s);
        const std::int64_t e = energy_scaled(inst, cfg.spins());
        if (!inst.couplings.empty()) {
            IsingInstance doubled = inst;
            auto& c = doubled.couplings[rng() % doubled.couplings.size()];
            const std::int64_t term = c.value * cfg[c.i] * cfg[c.j];
            c.value *= 2;
            CHECK(energy_scaled(doubled, cfg.spins()) == e + term);
        }
        IsingInstance no_bias = inst;
        no_bias.biases.clear();
        CHECK(energy_scaled(no_bias, cfg.spins()) == energy_scaled(no_bias, cfg.negated().spins()));
        std::int64_t bias_term = 0;
        for (const auto& b : inst.biases) bias_term += b.value * cfg[b.i];
        CHECK(energy_scaled(inst, cfg.negated().spins()) == e - 2 * bias_term);
    }
}

TEST_CASE("parse examples") {
    const IsingInstance a = parse_instance("2\n0 1 -1\n");
    CHECK(a.n == 2);
    REQUIRE(a.couplings.size() == 1);
    CHECK(a.couplings[0] == Coupling{0, 1, -1});

    const IsingInstance b = parse_instance("1\n0 0 2\n");
    CHECK(b.n == 1);
    REQUIRE(b.biases.size() == 1);
    CHECK(b.biases[0] == Bias{0, 2});

    CHECK_THROWS_WITH_AS(parse_instance("2\n0 1 -1\n0 1 1\n"), doctest::Contains("duplicate pair"), InputError);
    CHECK_THROWS_AS(parse_instance("2\n0 2 1\n"), InputError);
    CHECK_THROWS_AS(parse_instance("2\n0 1\n"), InputError);
    CHECK_THROWS_AS(parse_instance("2\n0 1 nan\n"), InputError);
    CHECK_THROWS_AS(parse_instance("2\n0 1 inf\n"), InputError);
    CHECK_THROWS_AS(parse_instance("2\n0 1 1e3\n"), InputError);
    CHECK_THROWS_AS(parse_instance("# only a comment\n"), InputError);
}

TEST_CASE("comments and decimal values") {
    const IsingInstance inst = parse_instance("# header\n3\n# coupling\n0 1 -0.25\n1 2 1.5\n2 2 -3\n");
    CHECK(inst.denominator == 100);
    CHECK(inst.couplings[0].value == -25);
    CHECK(inst.couplings[1].value == 150);
    CHECK(inst.biases[0].value == -300);
    CHECK(energy(inst, SpinConfiguration::uniform(3)) == Decimal{-175, 100});
    CHECK(serialize_instance(inst) == "3\n0 1 -0.25\n1 2 1.5\n2 2 -3\n");
}

TEST_CASE("serialize examples") {
    IsingInstance a;
    a.n = 2;
    a.couplings = {{0, 1, -1}};
    CHECK(serialize_instance(a) == "2\n0 1 -1\n");

    IsingInstance b;
    b.n = 3;
    b.couplings = {{0, 2, 2}, {0, 1, -1}};
    CHECK(serialize_instance(b) == "3\n0 1 -1\n0 2 2\n");

    IsingInstance zeros;
    zeros.n = 3;
    zeros.couplings = {{0, 1, 0}, {1, 2, 4}};
    zeros.biases = {{2, 0}};
    CHECK(serialize_instance(zeros) == "3\n1 2 4\n");
}

TEST_CASE("round trip parse(serialize(x)) == x and serialize is a fixed point") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 300; ++trial) {
        const IsingInstance x = random_instance(rng, 1 + static_cast<int>(rng() % 12), trial % 3 == 0);
        const std::string text = serialize_instance(x);
        const IsingInstance y = parse_instance(text);
        CHECK(y.same_terms(x));
        CHECK(serialize_instance(y) == text);
    }
}

TEST_CASE("validate_instance") {
    IsingInstance ok;
    ok.n = 3;
    ok.couplings = {{0, 1, -1}, {1, 2, 1}};
    CHECK(validate_instance(ok).empty());

    IsingInstance unordered = ok;
    unordered.couplings.push_back({2, 0, 1});
    const auto v1 = validate_instance(unordered);
    REQUIRE(v1.size() == 1);
    CHECK(v1[0].find("i<j ordering") != std::string::npos);

    IsingInstance out_of_range = ok;
    out_of_range.couplings.push_back({1, 3, 1});
    const auto v2 = validate_instance(out_of_range);
    REQUIRE_FALSE(v2.empty());
    CHECK(v2[0].find("index out of range") != std::string::npos);

    IsingInstance dup = ok;
    dup.couplings.push_back({0, 1, 2});
    CHECK(validate_instance(dup).size() == 1);

    IsingInstance fcl = ok;
    fcl.metadata.generator = "fcl";
    fcl.metadata.params["rho"] = "1";
    CHECK(validate_instance(fcl).empty());
    fcl.couplings[0].value = -2;
    CHECK(validate_instance(fcl).size() == 1);
}

TEST_CASE("integer instances have integer energies") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const IsingInstance inst = random_instance(rng, 6, false);
        CHECK(energy(inst, SpinConfiguration::uniform(6)).denominator == 1);
    }
}

TEST_CASE("decimal formatting") {
    CHECK(Decimal::parse("-0.50").to_string() == "-0.5");
    CHECK(Decimal::parse("+3").to_string() == "3");
    CHECK(Decimal{-5, 100}.to_string() == "-0.05");
    CHECK(Decimal{1234, 100}.to_string() == "12.34");
    CHECK(Decimal::parse("1.50") == Decimal{3, 2});
    CHECK(TopologyTag::parse("logical_square(16)") == TopologyTag{TopologyTag::Kind::logical_square, 16});
    CHECK(TopologyTag::parse(TopologyTag{TopologyTag::Kind::anticluster, 3}.to_string()).size == 3);
}
