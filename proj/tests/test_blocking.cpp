#include "sbpc/blocking.hpp"

#include <doctest.h>

#include <random>
#include <vector>

using namespace sbpc;

namespace {

Action act(double u)
{
    Input v(1);
    v << u;
    return Action::continuous(v);
}

BlockedSequence seq_of(std::vector<double> vals, int k, int k_f, BlockingPolicy pol)
{
    BlockedSequence s;
    s.k_origin = k;
    s.k_f = k_f;
    s.policy = pol;
    for (double v : vals) s.values.push_back(act(v));
    return s;
}

double scalar(const Action& a) { return a.u(0); }

} // namespace

TEST_CASE("block counts for the L=20, k_f=60 scheme")
{
    BlockingPolicy pol{20, BlockingVariant::ShrinkingN};
    CHECK(num_blocks(0, 60, pol) == 3);
    CHECK(num_blocks(20, 60, pol) == 2);
    CHECK(num_blocks(59, 60, pol) == 1);
    BlockingPolicy l7{7, BlockingVariant::ShrinkingN};
    CHECK(num_blocks(59, 60, l7) == 1);
}

TEST_CASE("num_blocks argument validation")
{
    BlockingPolicy pol{3, BlockingVariant::ShrinkingN};
    CHECK_THROWS_AS(num_blocks(-1, 10, pol), ArgumentError);
    CHECK_THROWS_AS(num_blocks(10, 10, pol), ArgumentError);
    CHECK_THROWS_AS(num_blocks(0, 10, BlockingPolicy{11, BlockingVariant::ShrinkingN}), ArgumentError);
    CHECK_THROWS_AS(num_blocks(0, 10, BlockingPolicy{0, BlockingVariant::ShrinkingN}), ArgumentError);
}

TEST_CASE("block_index values on the Fig-1-style grid")
{
    BlockingPolicy pol{20, BlockingVariant::ShrinkingN};
    const int k_f = 60;
    CHECK(block_index(0, 0, k_f, pol) == 1);
    // first block shrinks as k advances
    CHECK(block_index(9, 10, k_f, pol) == 1);
    CHECK(block_index(10, 10, k_f, pol) == 2);
    CHECK(block_index(14, 25, k_f, pol) == 1); // first block length 15
    CHECK(block_index(15, 25, k_f, pol) == 2);
    CHECK_THROWS_AS(block_index(-1, 0, k_f, pol), ArgumentError);
    CHECK_THROWS_AS(block_index(60, 0, k_f, pol), ArgumentError);
}

TEST_CASE("block_index matches the modular closed form when L divides k_f")
{
    // With L | k_f the absolute grid can be written either from the front or
    // from the back: floor((j + k - floor(k/L)*L)/L) + 1.
    for (int k_f : {20, 40, 60, 100}) {
        for (int L : {1, 2, 4, 5, 10, 20}) {
            if (k_f % L != 0) continue;
            BlockingPolicy pol{L, BlockingVariant::ShrinkingN};
            for (int k = 0; k < k_f; ++k)
                for (int j = 0; j < k_f - k; ++j) {
                    const int expected = (j + k - (k / L) * L) / L + 1;
                    CHECK(block_index(j, k, k_f, pol) == expected);
                }
        }
    }
}

TEST_CASE("partition property over the full grid (shrinking)")
{
    for (int k_f = 1; k_f <= 80; ++k_f) {
        for (int L = 1; L <= k_f; ++L) {
            BlockingPolicy pol{L, BlockingVariant::ShrinkingN};
            for (int k = 0; k < k_f; ++k) {
                const int n = num_blocks(k, k_f, pol);
                const auto lengths = block_lengths(k, k_f, pol);
                REQUIRE(static_cast<int>(lengths.size()) == n);
                int total = 0;
                for (std::size_t i = 0; i < lengths.size(); ++i) {
                    total += lengths[i];
                    if (i == 0) {
                        CHECK(lengths[i] >= 1);
                        CHECK(lengths[i] <= L);
                    } else {
                        CHECK(lengths[i] == L);
                    }
                }
                CHECK(total == k_f - k);
                // closed form agrees with the lengths
                CHECK(block_index(0, k, k_f, pol) == 1);
                CHECK(block_index(k_f - k - 1, k, k_f, pol) == n);
                int covered = 0;
                for (std::size_t i = 0; i < lengths.size(); ++i) {
                    CHECK(block_index(covered, k, k_f, pol) == static_cast<int>(i) + 1);
                    covered += lengths[i];
                    CHECK(block_index(covered - 1, k, k_f, pol) == static_cast<int>(i) + 1);
                }
            }
        }
    }
}

TEST_CASE("constant-N partition keeps the count and shortens the front")
{
    for (int k_f = 1; k_f <= 40; ++k_f) {
        for (int L = 1; L <= k_f; ++L) {
            BlockingPolicy pol{L, BlockingVariant::ConstantN};
            const int n0 = num_blocks(0, k_f, pol);
            for (int k = 0; k < k_f; ++k) {
                const int horizon = k_f - k;
                const int n = num_blocks(k, k_f, pol);
                CHECK(n == std::min(n0, horizon));
                const auto lengths = block_lengths(k, k_f, pol);
                int total = 0;
                bool seen_longer = false;
                for (std::size_t i = 0; i < lengths.size(); ++i) {
                    total += lengths[i];
                    CHECK(lengths[i] >= 1);
                    CHECK(lengths[i] <= L);
                    // once a block exceeds length 1, everything behind the
                    // front remainder is as long as the budget allows
                    if (i + 1 < lengths.size()) CHECK(lengths[i] <= lengths[i + 1]);
                    seen_longer = seen_longer || lengths[i] > 1;
                }
                (void)seen_longer;
                CHECK(total == horizon);
            }
        }
    }
}

TEST_CASE("num_blocks is nonincreasing in k and ends at one")
{
    for (auto variant : {BlockingVariant::ShrinkingN, BlockingVariant::ConstantN}) {
        for (int k_f : {1, 2, 7, 24, 60}) {
            for (int L = 1; L <= k_f; ++L) {
                BlockingPolicy pol{L, variant};
                int prev = num_blocks(0, k_f, pol);
                for (int k = 1; k < k_f; ++k) {
                    const int n = num_blocks(k, k_f, pol);
                    CHECK(n <= prev);
                    prev = n;
                }
                CHECK(num_blocks(k_f - 1, k_f, pol) == 1);
            }
        }
    }
}

TEST_CASE("expansion of small sequences")
{
    BlockingPolicy pol{2, BlockingVariant::ShrinkingN};
    SUBCASE("k = 0")
    {
        const auto u = expand(seq_of({1.0, 2.0}, 0, 4, pol), 0);
        REQUIRE(u.size() == 4);
        CHECK(scalar(u[0]) == 1.0);
        CHECK(scalar(u[1]) == 1.0);
        CHECK(scalar(u[2]) == 2.0);
        CHECK(scalar(u[3]) == 2.0);
    }
    SUBCASE("k = 1 shortens the first block")
    {
        const auto u = expand(seq_of({1.0, 2.0}, 1, 4, pol), 1);
        REQUIRE(u.size() == 3);
        CHECK(scalar(u[0]) == 1.0);
        CHECK(scalar(u[1]) == 2.0);
        CHECK(scalar(u[2]) == 2.0);
    }
    SUBCASE("single block gives a constant sequence")
    {
        BlockingPolicy one{4, BlockingVariant::ShrinkingN};
        const auto u = expand(seq_of({3.0}, 0, 4, one), 0);
        REQUIRE(u.size() == 4);
        for (const auto& a : u) CHECK(scalar(a) == 3.0);
    }
    SUBCASE("mismatched step is rejected")
    {
        CHECK_THROWS_AS(expand(seq_of({1.0, 2.0}, 0, 4, pol), 1), ArgumentError);
    }
    SUBCASE("distinct adjacent values produce one run per block")
    {
        const auto u = expand(seq_of({1.0, 2.0}, 0, 4, pol), 0);
        int runs = 1;
        for (std::size_t j = 1; j < u.size(); ++j)
            if (scalar(u[j]) != scalar(u[j - 1])) ++runs;
        CHECK(runs == num_blocks(0, 4, pol));
    }
}

TEST_CASE("warm start tail drops the first value when the count shrinks")
{
    BlockingPolicy pol{2, BlockingVariant::ShrinkingN};
    // k=2, k_f=8: N=3; k=3: N=3 -> unchanged. k=2 -> 3: blocks [2,2,2] -> [1,2,2].
    const auto prev = seq_of({1.0, 2.0, 3.0}, 2, 8, pol);
    const auto tail = warm_start_tail(prev);
    CHECK(tail.k_origin == 3);
    REQUIRE(tail.values.size() == 3);
    CHECK(scalar(tail.values[0]) == 1.0);

    // k=3 -> 4 crosses the grid boundary: N drops, v(1) is dropped.
    const auto tail2 = warm_start_tail(tail);
    REQUIRE(tail2.values.size() == 2);
    CHECK(scalar(tail2.values[0]) == 2.0);
    CHECK(scalar(tail2.values[1]) == 3.0);
}

TEST_CASE("warm start tail reproduces the shifted expansion on the whole grid")
{
    std::mt19937 rng(7);
    for (auto variant : {BlockingVariant::ShrinkingN, BlockingVariant::ConstantN}) {
        for (int k_f : {1, 2, 3, 5, 8, 13, 21, 40}) {
            for (int L = 1; L <= k_f; ++L) {
                BlockingPolicy pol{L, variant};
                for (int k = 0; k < k_f - 1; ++k) {
                    const int n = num_blocks(k, k_f, pol);
                    std::vector<double> vals(static_cast<std::size_t>(n));
                    for (auto& v : vals) v = std::uniform_real_distribution<double>(-1, 1)(rng);
                    const auto prev = seq_of(vals, k, k_f, pol);
                    const auto tail = warm_start_tail(prev);

                    const auto full = expand(prev, k);
                    const auto shifted = expand(tail, k + 1);
                    REQUIRE(shifted.size() == full.size() - 1);
                    for (std::size_t j = 0; j < shifted.size(); ++j)
                        CHECK(scalar(shifted[j]) == scalar(full[j + 1]));

                    if (variant == BlockingVariant::ShrinkingN) {
                        // the tail is the previous sequence, possibly with
                        // its first value dropped
                        const int n_next = num_blocks(k + 1, k_f, pol);
                        if (n_next == n) {
                            for (std::size_t i = 0; i < tail.values.size(); ++i)
                                CHECK(scalar(tail.values[i]) == vals[i]);
                        } else {
                            REQUIRE(n_next == n - 1);
                            for (std::size_t i = 0; i < tail.values.size(); ++i)
                                CHECK(scalar(tail.values[i]) == vals[i + 1]);
                        }
                    }
                }
            }
        }
    }
}

TEST_CASE("warm start tail past the final step is rejected")
{
    BlockingPolicy pol{1, BlockingVariant::ShrinkingN};
    const auto last = seq_of({1.0}, 3, 4, pol);
    CHECK_THROWS_AS(warm_start_tail(last), ArgumentError);
}
