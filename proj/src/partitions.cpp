#include "ppmom/partitions.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace ppmom {

int PartitionFamily::base_block_of(int element) const {
  for (std::size_t i = 0; i + 1 < base_offset.size(); ++i)
    if (element >= base_offset[i] && element < base_offset[i + 1]) return static_cast<int>(i);
  throw std::out_of_range("element outside ground set");
}

PartitionFamily enumerate_partition_family(std::vector<int> orders) {
  if (orders.empty()) throw std::invalid_argument("orders must be nonempty");
  int total = 0;
  for (std::size_t i = 0; i < orders.size(); ++i) {
    if (orders[i] < 1) throw std::invalid_argument("orders must be positive");
    if (i > 0 && orders[i] > orders[i - 1])
      throw std::invalid_argument("orders must be nonincreasing");
    total += orders[i];
  }
  if (total > kMaxPartitionGround)
    throw std::invalid_argument("total order exceeds the enumeration cap");

  PartitionFamily fam;
  fam.orders = orders;
  fam.base_offset.resize(orders.size() + 1, 0);
  for (std::size_t i = 0; i < orders.size(); ++i)
    fam.base_offset[i + 1] = fam.base_offset[i] + orders[i];

  std::vector<int> factor_of(static_cast<std::size_t>(total));
  for (int e = 0; e < total; ++e) factor_of[static_cast<std::size_t>(e)] = fam.base_block_of(e);

  // restricted-growth assignment with pruning: a block may not take two
  // elements of the same factor
  std::vector<int> assign(static_cast<std::size_t>(total), 0);
  std::vector<std::uint32_t> block_factors(static_cast<std::size_t>(total), 0);

  auto emit = [&](int n_blocks) {
    Partition p;
    p.ground = total;
    p.blocks.assign(static_cast<std::size_t>(n_blocks), {});
    for (int e = 0; e < total; ++e)
      p.blocks[static_cast<std::size_t>(assign[static_cast<std::size_t>(e)])].push_back(e);
    fam.members.push_back(std::move(p));
  };

  auto rec = [&](auto&& self, int e, int n_blocks) -> void {
    if (e == total) {
      emit(n_blocks);
      return;
    }
    const std::uint32_t fbit = 1u << factor_of[static_cast<std::size_t>(e)];
    for (int b = 0; b <= n_blocks; ++b) {
      if (b < n_blocks && (block_factors[static_cast<std::size_t>(b)] & fbit)) continue;
      assign[static_cast<std::size_t>(e)] = b;
      const std::uint32_t saved = block_factors[static_cast<std::size_t>(b)];
      block_factors[static_cast<std::size_t>(b)] = saved | fbit;
      self(self, e + 1, std::max(n_blocks, b + 1));
      block_factors[static_cast<std::size_t>(b)] = saved;
    }
  };
  rec(rec, 0, 0);
  return fam;
}

std::uint64_t coefficient_A(std::span<const int> orders, std::span<const int> j) {
  const std::size_t m = orders.size();
  if (m == 0 || j.size() + 1 != m)
    throw std::invalid_argument("coefficient_A: j needs one entry per factor after the first");
  if (m == 1) return 1;

  auto binom = [](int n, int k) -> std::uint64_t {
    if (k < 0 || k > n) return 0;
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return r;
  };

  std::uint64_t result = 1;
  for (std::size_t l = 1; l < m; ++l) {
    if (j[l - 1] < 0 || j[l - 1] > orders[l]) return 0;
    result *= binom(orders[l], j[l - 1]);
  }

  // paired falling-factorial ratios n_t! / d_{t+1}! with
  // n_t = k1 + j2 + ... + j_{t+1 - 1} and d_{t+1} = n_t + j_{t+1} - k_{t+1}
  int running = orders[0];
  for (std::size_t t = 1; t < m; ++t) {
    const int n_t = running;
    const int d = n_t + j[t - 1] - orders[t];
    if (d < 0) return 0;
    for (int v = d + 1; v <= n_t; ++v) result *= static_cast<std::uint64_t>(v);
    running += j[t - 1];
  }
  return result;
}

std::uint64_t family_cardinality_by_A(std::span<const int> orders) {
  const std::size_t m = orders.size();
  if (m == 1) return 1;
  std::vector<int> j(m - 1, 0);
  std::uint64_t total = 0;
  while (true) {
    total += coefficient_A(orders, j);
    std::size_t pos = 0;
    while (pos < j.size()) {
      if (j[pos] < orders[pos + 1]) {
        ++j[pos];
        break;
      }
      j[pos] = 0;
      ++pos;
    }
    if (pos == j.size()) break;
  }
  return total;
}

std::vector<std::pair<int, long>> family_block_histogram(const PartitionFamily& fam) {
  std::map<int, long> h;
  for (const Partition& p : fam.members) h[static_cast<int>(p.blocks.size())]++;
  return {h.begin(), h.end()};
}

int merge_pattern_count(const PartitionFamily& fam) {
  std::set<std::vector<std::vector<int>>> patterns;
  for (const Partition& p : fam.members) {
    std::vector<std::vector<int>> sig;
    for (const auto& blk : p.blocks) {
      if (blk.size() < 2) continue;
      std::vector<int> factors;
      for (int e : blk) factors.push_back(fam.base_block_of(e));
      std::sort(factors.begin(), factors.end());
      sig.push_back(std::move(factors));
    }
    std::sort(sig.begin(), sig.end());
    patterns.insert(std::move(sig));
  }
  return static_cast<int>(patterns.size());
}

double merged_tensor_eval(std::span<const UStatistic> kernels, const Partition& sigma,
                          std::span<const Particle> args) {
  int total = 0;
  for (const UStatistic& f : kernels) total += f.order;
  if (sigma.ground != total)
    throw std::invalid_argument("merged_tensor_eval: partition ground set mismatch");
  if (args.size() != sigma.blocks.size())
    throw std::invalid_argument("merged_tensor_eval: one mark per block required");

  std::vector<int> block_of(static_cast<std::size_t>(total), -1);
  for (std::size_t b = 0; b < sigma.blocks.size(); ++b)
    for (int e : sigma.blocks[b]) block_of[static_cast<std::size_t>(e)] = static_cast<int>(b);

  // reject blocks that meet one factor's index range twice
  {
    int off = 0;
    std::vector<std::set<int>> seen(sigma.blocks.size());
    for (const UStatistic& f : kernels) {
      for (int t = 0; t < f.order; ++t) {
        const int b = block_of[static_cast<std::size_t>(off + t)];
        if (b < 0) throw std::invalid_argument("merged_tensor_eval: uncovered element");
        if (!seen[static_cast<std::size_t>(b)].insert(off).second)
          throw std::invalid_argument("merged_tensor_eval: block meets a factor twice");
      }
      off += f.order;
    }
  }

  double prod = 1;
  int off = 0;
  std::vector<Particle> buf;
  for (const UStatistic& f : kernels) {
    buf.resize(static_cast<std::size_t>(f.order));
    for (int t = 0; t < f.order; ++t)
      buf[static_cast<std::size_t>(t)] = args[static_cast<std::size_t>(block_of[static_cast<std::size_t>(off + t)])];
    prod *= f.kernel(buf);
    if (prod == 0.0) return 0.0;
    off += f.order;
  }
  return prod;
}

double product_expand_eval(std::span<const UStatistic> ustats, const Configuration& x) {
  std::vector<UStatistic> sorted(ustats.begin(), ustats.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const UStatistic& a, const UStatistic& b) { return a.order > b.order; });
  std::vector<int> orders;
  for (const auto& f : sorted) orders.push_back(f.order);
  const PartitionFamily fam = enumerate_partition_family(orders);

  const std::size_t n = x.items.size();
  double total = 0;
  for (const Partition& sigma : fam.members) {
    const std::size_t b = sigma.blocks.size();
    if (n < b) continue;
    // ordered tuples of distinct particles, one per block
    std::vector<Particle> args(b);
    std::vector<bool> used(n, false);
    double sum = 0;
    auto rec = [&](auto&& self, std::size_t depth) -> void {
      if (depth == b) {
        sum += merged_tensor_eval(sorted, sigma, args);
        return;
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (used[i]) continue;
        used[i] = true;
        args[depth] = x.items[i];
        self(self, depth + 1);
        used[i] = false;
      }
    };
    rec(rec, 0);
    total += sum;
  }
  return total;
}

}  // namespace ppmom
