// Copyright 2026 The metermask Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Combinatorial request-sequence geometry: a metric on (initial state,
// consumption) input pairs, shared-request construction, the depletion-block
// covering codebook (the achievability object: a small menu of request
// sequences such that every input pair can follow one of them), and the
// packing set (the converse object: many consumption sequences no two of
// which can emit the same requests).

#ifndef METERMASK_CODES_HPP_
#define METERMASK_CODES_HPP_

#include <optional>
#include <vector>

#include "metermask/types.hpp"

namespace metermask {

// Distance between two input pairs: the maximum over all n+1 prefix
// boundaries i of |(s0 - ||x^i||) - (s0' - ||x'^i||)|, with exclusive prefix
// sums ||x^i|| = sum_{k<i} x_k. Two input pairs can share a feasible request
// sequence (for a request alphabet containing [-beta, alpha]) exactly when
// their distance is at most beta. Throws kConfig on length mismatch.
Energy distance(const InputPair& p, const InputPair& q);

// Max pairwise distance over a set (0 for singletons).
Energy max_distance(const std::vector<InputPair>& set);

// Canonical shared request for a set of input pairs: prefix sums
// ||y^j|| = -min over the set of (s0 - ||x^j||), j = 1..n. Returns nullopt
// when some pairwise distance exceeds beta (no shared sequence exists).
// The construction's entries lie in [-beta, alpha]; an initial negative
// entry appears when some member starts with charge to burn. If the
// configured request alphabet is narrower than [-beta, alpha] the sequence
// is still returned and is_feasible reports the alphabet violation.
// Throws kConfig for an empty set or mismatched lengths.
std::optional<RequestSeq> shared_request(const SystemConfig& cfg,
                                         const std::vector<InputPair>& set);

// Covering codebook: head y0 feasible for every (s0, x) prefix, then kappa
// depletion blocks each choosing between two codewords:
//   block_keep   (all zeros)  when the battery survives the block,
//   block_refill (all alpha)  when it would deplete.
// log2 of the codebook size is exactly kappa.
struct CoveringCodebook {
  int n = 0;
  Energy alpha = 1;
  Energy beta = 0;
  Energy s0_lo = 0;        // initial-state interval the book covers
  Energy s0_hi = 0;
  int head_len = 0;        // l = min(n, floor((beta + s0_lo - s0_hi)/alpha))
  Energy lambda = 1;       // block length floor((beta+1)/alpha)
  int kappa = 0;           // ceil((n - l)/lambda) blocks
  RequestSeq head;         // length l
  RequestSeq block_keep;   // length lambda, all zeros
  RequestSeq block_refill; // length lambda, all alpha

  int log2_size() const { return kappa; }
};

// Builds the covering codebook for initial states in [s0_lo, s0_hi].
// Throws kConfig when the interval is invalid, when alpha > beta + 1 (block
// length would be zero), or when the head's first entry alpha - s0_lo falls
// below y_min (the alphabet cannot express the initial drain).
CoveringCodebook covering_codebook(const SystemConfig& cfg, Energy s0_lo,
                                   Energy s0_hi);

// Result of running the covering policy on one consumption sequence.
struct CoveringPolicyRun {
  RequestSeq y;                    // emitted request sequence, length n
  std::vector<int> block_choice;   // per block: 0 = keep, 1 = refill
};

// Emits the head, then for each block (lookahead of one block of x) the
// keep codeword when s_blockstart - sum(x_block) >= 0, else the refill
// codeword; a final short block truncates its codeword. The output is
// feasible for every (s0, x) with s0 in the codebook interval and x in the
// consumption alphabet. Throws kConfig on domain violations.
CoveringPolicyRun apply_covering_policy(const SystemConfig& cfg,
                                        const CoveringCodebook& cb, Energy s0,
                                        const ConsumptionSeq& x);

// Packing set: consumption sequences of length l whose feasible-request
// sets (with terminal battery state constrained to [sl_lo, sl_hi]) are
// pairwise disjoint. Members concatenate kappa_hat blocks of length
// ceil((beta+1)/alpha) - each all-zeros or all-alpha - followed by a tail
// segment carrying i * |S_l| extra units, i = 0..N. Distinct block patterns
// separate at a block boundary (prefix consumptions differ by >= beta+1);
// equal patterns separate at the terminal constraint (totals differ by at
// least the terminal window width).
struct PackingSet {
  Energy s0 = 0;
  int l = 0;
  Energy sl_lo = 0;
  Energy sl_hi = 0;
  int kappa_hat = 0;                    // number of two-way blocks
  Energy lambda_ceil = 1;               // block length ceil((beta+1)/alpha)
  ConsumptionSeq block_zero;            // all-zeros block codeword
  ConsumptionSeq block_full;            // all-alpha block codeword
  std::vector<ConsumptionSeq> tail_words;  // length l - kappa_hat*lambda_ceil each
  std::vector<ConsumptionSeq> members;     // 2^kappa_hat * (N+1) sequences

  std::size_t size() const { return members.size(); }
};

// Builds the packing set. S_l must be a contiguous interval inside [0, beta]
// (non-contiguous terminal sets break disjointness). Throws kConfig on
// domain violations and when the tail alphabet would be empty.
PackingSet packing_set(const SystemConfig& cfg, Energy s0, int l, Energy sl_lo,
                       Energy sl_hi);

}  // namespace metermask

#endif  // METERMASK_CODES_HPP_
