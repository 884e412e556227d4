#include "sfsim/rng.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "sfsim/hash.hpp"
#include "sfsim/types.hpp"

namespace sfsim {

namespace {

// Unbiased integer in [0, bound) by rejection.
std::uint64_t bounded(CounterRng& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v;
  do v = rng();
  while (v >= limit);
  return v % bound;
}

}  // namespace

std::vector<std::uint64_t> select_indices(int n, std::uint64_t count, std::uint64_t seed) {
  if (n < 0 || n > 62) throw Error("qubit count out of range for index selection");
  const std::uint64_t space = std::uint64_t{1} << n;
  if (count > space) throw Error("cannot select " + std::to_string(count) + " distinct indices from 2^" + std::to_string(n));
  CounterRng rng(seed);
  std::vector<std::uint64_t> out;
  out.reserve(count);
  if (count * 2 > space) {
    std::vector<std::uint64_t> all(space);
    std::iota(all.begin(), all.end(), 0);
    for (std::uint64_t i = 0; i < count; ++i) {
      std::uint64_t j = i + bounded(rng, space - i);
      std::swap(all[i], all[j]);
    }
    all.resize(count);
    return all;
  }
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(count * 2);
  while (out.size() < count) {
    std::uint64_t v = rng() & (space - 1);
    if (seen.insert(v).second) out.push_back(v);
  }
  return out;
}

std::vector<std::uint64_t> select_subset(std::uint64_t space, std::uint64_t count, std::uint64_t seed) {
  if (count > space) throw Error("subset larger than its space");
  CounterRng rng(seed);
  std::vector<std::uint64_t> out;
  if (count == space) {
    out.resize(space);
    std::iota(out.begin(), out.end(), 0);
    return out;
  }
  // Floyd's algorithm.
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(count * 2);
  for (std::uint64_t j = space - count; j < space; ++j) {
    std::uint64_t t = bounded(rng, j + 1);
    chosen.insert(chosen.count(t) ? j : t);
  }
  out.assign(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t parse_hex64(std::string_view s) {
  std::uint64_t v = 0;
  if (s.empty() || s.size() > 16) throw Error("bad hex value `" + std::string(s) + "`");
  for (char ch : s) {
    int d;
    if (ch >= '0' && ch <= '9') d = ch - '0';
    else if (ch >= 'a' && ch <= 'f') d = ch - 'a' + 10;
    else if (ch >= 'A' && ch <= 'F') d = ch - 'A' + 10;
    else throw Error("bad hex value `" + std::string(s) + "`");
    v = (v << 4) | d;
  }
  return v;
}

}  // namespace sfsim
