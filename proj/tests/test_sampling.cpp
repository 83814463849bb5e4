#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fair_amdp/sampling.hpp"
#include "oracles.hpp"

#include <cmath>
#include <vector>

using namespace fairmdp;

TEST_CASE("identical seeds give identical streams") {
    RngStream a(123456789), b(123456789);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("forked child streams differ from each other and the parent") {
    RngStream root(7);
    RngStream cx = root.fork("grad-x");
    RngStream cl = root.fork("grad-lambda");
    int equal_xl = 0, equal_xr = 0;
    RngStream root2(7);
    for (int i = 0; i < 100; ++i) {
        const uint64_t x = cx.next_u64(), l = cl.next_u64(), r = root2.next_u64();
        equal_xl += x == l;
        equal_xr += x == r;
    }
    CHECK(equal_xl == 0);
    CHECK(equal_xr == 0);
}

TEST_CASE("fork is stable regardless of parent consumption") {
    RngStream a(99);
    a.next_u64();
    a.next_u64();
    RngStream b(99);
    CHECK(a.fork("label").next_u64() == b.fork("label").next_u64());
}

TEST_CASE("point-mass weights always return their index") {
    Vec w(3);
    w << 1.0, 0.0, 0.0;
    RngStream rng(1);
    for (int i = 0; i < 100; ++i) CHECK(sample_categorical(w, rng) == 0);
}

TEST_CASE("fair-coin frequencies match the binomial 3-sigma band") {
    Vec w(2);
    w << 0.5, 0.5;
    RngStream rng(31415);
    const int draws = 100000;
    int zeros = 0;
    for (int i = 0; i < draws; ++i) zeros += sample_categorical(w, rng) == 0;
    CHECK(std::abs(zeros / static_cast<double>(draws) - 0.5) <= 0.005);
}

TEST_CASE("categorical draws are scale invariant") {
    Vec raw(3), normalized(3);
    raw << 2.0, 2.0, 4.0;
    normalized << 0.25, 0.25, 0.5;
    RngStream a(2718), b(2718);
    for (int i = 0; i < 10000; ++i)
        CHECK(sample_categorical(raw, a) == sample_categorical(normalized, b));
}

TEST_CASE("all-zero weights are rejected") {
    RngStream rng(3);
    CHECK_THROWS_AS(sample_categorical(Vec::Zero(4), rng), std::invalid_argument);
}

TEST_CASE("one variate per categorical draw") {
    Vec w(3);
    w << 0.2, 0.3, 0.5;
    RngStream a(55), b(55);
    for (int i = 0; i < 50; ++i) sample_categorical(w, a);
    for (int i = 0; i < 50; ++i) b.next_uniform();
    CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("transition sampling follows the 90 percent edge") {
    const MdpModel model = oracles::figure2();
    RngStream rng(8);
    const int draws = 10000;
    int to_s1 = 0;
    for (int i = 0; i < draws; ++i) {
        const SampleOutcome out = sample_transition(model, 0, 0, rng);
        CHECK(out.reward == 1.0);
        to_s1 += out.next_state == 1;
    }
    CHECK(std::abs(to_s1 / static_cast<double>(draws) - 0.9) <= 0.01);

    RngStream rng2(9);
    CHECK(sample_transition(model, 1, 0, rng2).reward == 0.1);
}

TEST_CASE("a deterministic transition row always lands there") {
    MdpModel model = oracles::figure2();
    model.transitions.row(0) << 0.0, 0.0, 1.0;
    RngStream rng(4);
    for (int i = 0; i < 200; ++i)
        CHECK(sample_transition(model, 0, 0, rng).next_state == 2);
}

TEST_CASE("transition sampling rejects out-of-range indices") {
    const MdpModel model = oracles::figure2();
    RngStream rng(6);
    CHECK_THROWS_AS(sample_transition(model, 3, 0, rng), std::out_of_range);
    CHECK_THROWS_AS(sample_transition(model, 0, 2, rng), std::out_of_range);
}

TEST_CASE("uniform pair sampling is uniform (binomial 3-sigma per pair)") {
    RngStream rng(321);
    const int l = 6, draws = 60000;
    std::vector<int> counts(l, 0);
    for (int i = 0; i < draws; ++i) ++counts[sample_pair_uniform(l, rng)];
    for (int i = 0; i < l; ++i)
        CHECK(std::abs(counts[i] / static_cast<double>(draws) - 1.0 / 6) <= 0.006);
}

TEST_CASE("pair sampling from a point mass is deterministic") {
    Vec x = Vec::Zero(6);
    x[2] = 1.0; // (s1, a0)
    RngStream rng(12);
    for (int i = 0; i < 100; ++i) CHECK(sample_pair_from(x, rng) == 2);
}

TEST_CASE("uniform x matches sample_pair_uniform in distribution (chi-square)") {
    const int l = 6, draws = 10000;
    RngStream ra(100), rb(200);
    const Vec x = Vec::Constant(l, 1.0 / l);
    std::vector<int> ca(l, 0), cb(l, 0);
    for (int i = 0; i < draws; ++i) {
        ++ca[sample_pair_from(x, ra)];
        ++cb[sample_pair_uniform(l, rb)];
    }
    // two-sample chi-square on the contingency table
    double stat = 0.0;
    for (int i = 0; i < l; ++i) {
        const double expected = (ca[i] + cb[i]) / 2.0;
        stat += (ca[i] - expected) * (ca[i] - expected) / expected;
        stat += (cb[i] - expected) * (cb[i] - expected) / expected;
    }
    CHECK(oracles::chi_square_upper_tail(stat, l - 1) > 0.001);
}

TEST_CASE("oracle sampling reproduces sequences under one seed") {
    const MdpModel model = oracles::figure2();
    const GenerativeOracle oracle(model);
    RngStream a(77), b(77);
    for (int i = 0; i < 500; ++i) {
        const int pair = i % 6;
        const SampleOutcome oa = oracle.sample_pair(pair, a);
        const SampleOutcome ob = oracle.sample_pair(pair, b);
        CHECK(oa.next_state == ob.next_state);
        CHECK(oa.reward == ob.reward);
    }
}
