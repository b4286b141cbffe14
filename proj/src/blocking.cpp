#include "sbpc/blocking.hpp"

#include <algorithm>
#include <string>

namespace sbpc {

namespace {

void check_policy(int k_f, const BlockingPolicy& policy)
{
    if (k_f < 1) throw ArgumentError("blocking: k_f must be >= 1");
    if (policy.L < 1 || policy.L > k_f)
        throw ArgumentError("blocking: L must satisfy 1 <= L <= k_f, got L=" + std::to_string(policy.L));
}

void check_step(int k, int k_f, const BlockingPolicy& policy)
{
    check_policy(k_f, policy);
    if (k < 0 || k > k_f - 1)
        throw ArgumentError("blocking: k=" + std::to_string(k) + " outside [0, " + std::to_string(k_f - 1) + "]");
}

int ceil_div(int a, int b) { return (a + b - 1) / b; }

} // namespace

int num_blocks(int k, int k_f, const BlockingPolicy& policy)
{
    check_step(k, k_f, policy);
    const int horizon = k_f - k;
    if (policy.variant == BlockingVariant::ShrinkingN) return ceil_div(horizon, policy.L);
    return std::min(ceil_div(k_f, policy.L), horizon);
}

std::vector<int> block_lengths(int k, int k_f, const BlockingPolicy& policy)
{
    const int n = num_blocks(k, k_f, policy);
    const int horizon = k_f - k;
    // Assign from the back: each block takes L moves while the blocks ahead
    // of it can still get at least one each. Shortened blocks collect at the
    // front, so later blocks stay on the absolute {k_f - i*L} grid.
    std::vector<int> lengths(static_cast<std::size_t>(n));
    int remaining = horizon;
    for (int i = n; i >= 1; --i) {
        const int len = std::min(policy.L, remaining - (i - 1));
        lengths[static_cast<std::size_t>(i - 1)] = len;
        remaining -= len;
    }
    return lengths;
}

int block_index(int j, int k, int k_f, const BlockingPolicy& policy)
{
    const int horizon = k_f - k;
    if (policy.variant == BlockingVariant::ShrinkingN) {
        check_step(k, k_f, policy);
        if (j < 0 || j > horizon - 1)
            throw ArgumentError("blocking: offset j=" + std::to_string(j) + " outside [0, " + std::to_string(horizon - 1) + "]");
        // Closed form of the back-anchored partition.
        const int n = ceil_div(horizon, policy.L);
        return n - (horizon - 1 - j) / policy.L;
    }
    const auto lengths = block_lengths(k, k_f, policy);
    if (j < 0 || j > horizon - 1)
        throw ArgumentError("blocking: offset j=" + std::to_string(j) + " outside [0, " + std::to_string(horizon - 1) + "]");
    int covered = 0;
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        covered += lengths[i];
        if (j < covered) return static_cast<int>(i) + 1;
    }
    return static_cast<int>(lengths.size()); // unreachable: lengths sum to horizon
}

void BlockedSequence::validate() const
{
    const int n = num_blocks(k_origin, k_f, policy);
    if (static_cast<int>(values.size()) != n)
        throw ArgumentError("BlockedSequence: " + std::to_string(values.size()) + " values, expected N("
                            + std::to_string(k_origin) + ") = " + std::to_string(n));
}

std::vector<Action> expand(const BlockedSequence& seq, int k)
{
    if (seq.k_origin != k)
        throw ArgumentError("expand: sequence built for k=" + std::to_string(seq.k_origin)
                            + " cannot be expanded at k=" + std::to_string(k));
    seq.validate();
    const auto lengths = block_lengths(k, seq.k_f, seq.policy);
    std::vector<Action> out;
    out.reserve(static_cast<std::size_t>(seq.k_f - k));
    for (std::size_t i = 0; i < lengths.size(); ++i)
        for (int r = 0; r < lengths[i]; ++r) out.push_back(seq.values[i]);
    return out;
}

BlockedSequence warm_start_tail(const BlockedSequence& prev)
{
    prev.validate();
    const int k_next = prev.k_origin + 1;
    if (k_next > prev.k_f - 1)
        throw ArgumentError("warm_start_tail: no step after k=" + std::to_string(prev.k_origin));

    const auto prev_lengths = block_lengths(prev.k_origin, prev.k_f, prev.policy);
    const auto next_lengths = block_lengths(k_next, prev.k_f, prev.policy);

    // Absolute start time of each previous block; new blocks never straddle
    // old boundaries, so picking the old block containing each new block's
    // start reproduces the surviving portion of the old expansion exactly.
    std::vector<int> prev_starts(prev_lengths.size());
    int t = prev.k_origin;
    for (std::size_t i = 0; i < prev_lengths.size(); ++i) {
        prev_starts[i] = t;
        t += prev_lengths[i];
    }

    BlockedSequence next;
    next.k_origin = k_next;
    next.k_f = prev.k_f;
    next.policy = prev.policy;
    next.values.reserve(next_lengths.size());
    int start = k_next;
    for (int len : next_lengths) {
        auto it = std::upper_bound(prev_starts.begin(), prev_starts.end(), start);
        const auto owner = static_cast<std::size_t>(it - prev_starts.begin()) - 1;
        next.values.push_back(prev.values[owner]);
        start += len;
    }
    return next;
}

} // namespace sbpc
