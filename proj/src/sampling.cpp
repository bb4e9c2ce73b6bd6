#include "sbmkit/sampling.hpp"

namespace sbmkit::detail {

namespace {
Edge ordered(Vertex x, Vertex y) { return x < y ? Edge{x, y} : Edge{y, x}; }
}  // namespace

void sample_within_block(std::span<const Vertex> block, double p, Rng& rng,
                         std::vector<Edge>& out) {
  const std::uint64_t n = block.size();
  if (n < 2 || p <= 0.0) return;
  const std::uint64_t total = n * (n - 1) / 2;
  std::uint64_t row = 0;
  std::uint64_t row_start = 0;  // linear index of pair (row, row + 1)
  std::uint64_t k = rng.geometric(p);
  while (k < total) {
    while (k >= row_start + (n - 1 - row)) {
      row_start += n - 1 - row;
      ++row;
    }
    const std::uint64_t col = row + 1 + (k - row_start);
    out.push_back(ordered(block[row], block[col]));
    const std::uint64_t skip = rng.geometric(p);
    if (skip >= total - k) break;
    k += skip + 1;
  }
}

void sample_between_blocks(std::span<const Vertex> a, std::span<const Vertex> b, double p,
                           Rng& rng, std::vector<Edge>& out) {
  const std::uint64_t nb = b.size();
  const std::uint64_t total = static_cast<std::uint64_t>(a.size()) * nb;
  if (total == 0 || p <= 0.0) return;
  std::uint64_t k = rng.geometric(p);
  while (k < total) {
    out.push_back(ordered(a[k / nb], b[k % nb]));
    const std::uint64_t skip = rng.geometric(p);
    if (skip >= total - k) break;
    k += skip + 1;
  }
}

}  // namespace sbmkit::detail
