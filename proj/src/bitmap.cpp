#include "mif/algorithms.hpp"

namespace mif {

Item LeastUnseen::least() const {
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i]) return i + 1;
  return 0;
}

void LeastUnseen::encode(BitSink& out) const {
  for (bool b : seen) out.put_bit(b);
}

DetBitmap::DetBitmap(const Instance& inst) : n_(inst.n), ell_(inst.ell) {
  inst.validate();
  if (ell_ >= n_) throw PreconditionError("det_bitmap_mif: needs ell < n");
}

Output DetBitmap::emit(const LeastUnseen& s, Randomness&) const {
  const Item x = s.least();
  return x == 0 ? Output::abort() : Output::of(x);
}

AutomatonPtr det_bitmap_mif(const Instance& inst) { return std::make_shared<DetBitmap>(inst); }

namespace {

class StoreAll final : public AutomatonImpl<StoreAll, LeastUnseen> {
 public:
  explicit StoreAll(Item n) : n_(n) {}
  std::string name() const override { return "store_all"; }
  RandomnessMode mode() const override { return RandomnessMode::Deterministic; }
  Item universe() const override { return n_; }
  std::size_t declared_bits() const override { return n_; }

  LeastUnseen make_initial(Randomness&) const { return LeastUnseen(n_); }
  void step(LeastUnseen& s, Item input, Randomness&) const { s.mark(input); }
  Output emit(const LeastUnseen& s, Randomness&) const {
    const Item x = s.least();
    return x == 0 ? Output::abort() : Output::of(x);
  }

 private:
  Item n_;
};

struct Nothing {
  void encode(BitSink&) const {}
};

class ConstantOutput final : public AutomatonImpl<ConstantOutput, Nothing> {
 public:
  ConstantOutput(Item n, Output v) : n_(n), v_(v) {}
  std::string name() const override { return "constant"; }
  RandomnessMode mode() const override { return RandomnessMode::Deterministic; }
  Item universe() const override { return n_; }
  std::size_t declared_bits() const override { return 0; }

  Nothing make_initial(Randomness&) const { return {}; }
  void step(Nothing&, Item, Randomness&) const {}
  Output emit(const Nothing&, Randomness&) const { return v_; }

 private:
  Item n_;
  Output v_;
};

}  // namespace

AutomatonPtr store_all_mif(const Instance& inst) {
  inst.validate();
  return std::make_shared<StoreAll>(inst.n);
}

AutomatonPtr constant_output(Item n, Output value) {
  if (!value.is_abort() && (value.item() < 1 || value.item() > n))
    throw PreconditionError("constant_output: value outside [n]");
  return std::make_shared<ConstantOutput>(n, value);
}

}  // namespace mif
