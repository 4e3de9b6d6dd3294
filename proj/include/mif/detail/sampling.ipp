#pragma once

#include <unordered_map>
#include <utility>
#include <vector>

namespace mif {

template <class Draw>
std::vector<std::uint64_t> sample_without_repetition(std::uint64_t universe, std::size_t count,
                                                     Draw&& draw) {
  if (count > universe) throw PreconditionError("cannot draw more distinct items than the universe holds");
  std::vector<std::uint64_t> out;
  out.reserve(count);
  // Swaps are kept sparsely so a short prefix of a huge universe stays cheap.
  std::unordered_map<std::uint64_t, std::uint64_t> swapped;
  auto at = [&](std::uint64_t i) {
    auto it = swapped.find(i);
    return it == swapped.end() ? i : it->second;
  };
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t j = i + draw(universe - i);
    std::uint64_t vi = at(i), vj = at(j);
    swapped[j] = vi;
    swapped[i] = vj;
    out.push_back(vj + 1);
  }
  return out;
}

}  // namespace mif
