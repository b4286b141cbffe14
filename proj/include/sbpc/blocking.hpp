#pragma once

#include "sbpc/types.hpp"

#include <vector>

namespace sbpc {

enum class BlockingVariant {
    ShrinkingN, // block count ceil((k_f - k)/L), shrinks as k advances
    ConstantN   // block count held at its k=0 value until the terminal phase
};

struct BlockingPolicy {
    int L = 1; // max blocked moves per interval, 1 <= L <= k_f
    BlockingVariant variant = BlockingVariant::ShrinkingN;
};

/// Number of free input values N(k) for the horizon [k, k_f).
/// ShrinkingN: ceil((k_f-k)/L). ConstantN: min(N(0), k_f-k).
/// Throws ArgumentError for k outside [0, k_f-1].
int num_blocks(int k, int k_f, const BlockingPolicy& policy);

/// Lengths of the N(k) blocking intervals covering the k_f-k remaining
/// steps. Intervals are anchored to the fixed absolute-time grid
/// {k_f - i*L}: every block after the first has exactly L moves under
/// ShrinkingN, and the first block absorbs the remainder. ConstantN splits
/// additional singleton blocks off the front so the count stays at N(0).
std::vector<int> block_lengths(int k, int k_f, const BlockingPolicy& policy);

/// 1-based index of the free value applied at prediction offset j, i.e.
/// u(j|k) = v(block_index(j, k, ...)). Throws ArgumentError for j outside
/// [0, k_f-k-1].
int block_index(int j, int k, int k_f, const BlockingPolicy& policy);

// The N(k) free input values together with the blocking metadata needed to
// expand them onto the horizon.
struct BlockedSequence {
    std::vector<Action> values;
    int k_origin = 0;
    int k_f = 0;
    BlockingPolicy policy;

    void validate() const; // value count must match num_blocks(k_origin)
};

/// Expands the free values onto the full predicted input sequence
/// u(0..k_f-k-1 | k). Throws ArgumentError when seq was built for a
/// different step than k.
std::vector<Action> expand(const BlockedSequence& seq, int k);

/// Feasible candidate for step k_origin+1 built from the previous solution:
/// the surviving portion of the previous expanded input sequence is
/// reproduced exactly. Under ShrinkingN this is the previous sequence
/// unchanged when the block count is unchanged, and its tail (first value
/// dropped) when the count shrinks by one.
BlockedSequence warm_start_tail(const BlockedSequence& prev);

} // namespace sbpc
