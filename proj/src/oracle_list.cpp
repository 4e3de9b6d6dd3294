#include <unordered_map>

#include "mif/algorithms.hpp"

namespace mif {

struct OracleList::ListInfo {
  std::vector<Item> items;
  std::unordered_map<Item, std::size_t> position;
};

void OracleListState::encode(BitSink& out) const {
  // Either the full bitmap or a sparse position list, whichever is shorter.
  const std::size_t size = covered.size();
  const unsigned pos_bits = bits_for(size);
  const unsigned count_bits = bits_for(size + 1);
  if (count_bits + count * pos_bits < size) {
    out.put_bit(true);
    out.put(count, count_bits);
    for (std::size_t i = 0; i < size; ++i)
      if (covered[i]) out.put(i, pos_bits);
  } else {
    out.put_bit(false);
    for (bool b : covered) out.put_bit(b);
  }
}

OracleList::OracleList(const Instance& inst) : n_(inst.n), ell_(inst.ell) {
  inst.validate();
  if (ell_ >= n_) throw PreconditionError("oracle_list_mif: needs ell < n");
}

const OracleList::ListInfo& OracleList::info(const Oracle& oracle) const {
  return oracle.memo<ListInfo>(0, [&] {
    Rng g = oracle.stream(0);
    ListInfo li;
    li.items = sample_without_repetition(
        n_, ell_ + 1, [&](std::uint64_t k) { return std::uniform_int_distribution<std::uint64_t>(0, k - 1)(g); });
    for (std::size_t i = 0; i < li.items.size(); ++i) li.position.emplace(li.items[i], i);
    return li;
  });
}

const std::vector<Item>& OracleList::list(const Oracle& oracle) const { return info(oracle).items; }

OracleListState OracleList::make_initial(Randomness&) const {
  OracleListState s;
  s.covered.assign(ell_ + 1, false);
  return s;
}

void OracleList::step(OracleListState& s, Item input, Randomness& r) const {
  const auto& pos = info(r.oracle()).position;
  auto it = pos.find(input);
  if (it == pos.end() || s.covered[it->second]) return;
  s.covered[it->second] = true;
  ++s.count;
  while (s.cursor < s.covered.size() && s.covered[s.cursor]) ++s.cursor;
}

Output OracleList::emit(const OracleListState& s, Randomness& r) const {
  if (s.cursor >= s.covered.size()) return Output::abort();
  return Output::of(info(r.oracle()).items[s.cursor]);
}

AutomatonPtr oracle_list_mif(const Instance& inst) { return std::make_shared<OracleList>(inst); }

}  // namespace mif
