#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ppmom/ustat.hpp"

namespace ppmom {

// Set partition of {0, ..., ground-1}; blocks are sorted lists of indices.
struct Partition {
  int ground = 0;
  std::vector<std::vector<int>> blocks;
};

// The partitions of the concatenated index set of m U-statistic factors in
// which every block meets each factor's index range at most once. These
// index the expansion of a product of U-statistics into single U-statistics.
struct PartitionFamily {
  std::vector<int> orders;        // nonincreasing
  std::vector<int> base_offset;   // prefix sums, size m+1
  std::vector<Partition> members;

  int base_block_of(int element) const;
};

inline constexpr int kMaxPartitionGround = 12;

// Enumeration by restricted-growth strings, pruning assignments that would
// put two indices of the same factor into one block. Throws when the total
// order exceeds kMaxPartitionGround or the orders are not nonincreasing.
PartitionFamily enumerate_partition_family(std::vector<int> orders);

// multiplicity of the j-share pattern in the product expansion;
// j has one entry per factor after the first, 0 <= j[i] <= orders[i+1]
std::uint64_t coefficient_A(std::span<const int> orders, std::span<const int> j);

// sum of coefficient_A over all admissible j-vectors
std::uint64_t family_cardinality_by_A(std::span<const int> orders);

// histogram of members by block count, ascending block count
std::vector<std::pair<int, long>> family_block_histogram(const PartitionFamily& fam);

// number of distinct merge patterns (which factors each shared block spans)
int merge_pattern_count(const PartitionFamily& fam);

// tensor product of the kernels with block-shared variables: args has one
// mark per block of sigma
double merged_tensor_eval(std::span<const UStatistic> kernels, const Partition& sigma,
                          std::span<const Particle> args);

// evaluates the partition expansion of the product of U-statistics on x;
// must equal the plain product of eval_ustat values
double product_expand_eval(std::span<const UStatistic> ustats, const Configuration& x);

}  // namespace ppmom
