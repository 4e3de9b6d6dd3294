#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <utility>

#include "mif/bits.hpp"
#include "mif/core.hpp"
#include "mif/randomness.hpp"

namespace mif {

class AutomatonState {
 public:
  virtual ~AutomatonState() = default;
  virtual std::unique_ptr<AutomatonState> clone() const = 0;
  // Fixed-width serialization; its width is the state's space cost.
  virtual void encode(BitSink& out) const = 0;
};

// Copyable owner of a type-erased state.
class StateBox {
 public:
  StateBox() = default;
  explicit StateBox(std::unique_ptr<AutomatonState> p) : p_(std::move(p)) {}
  StateBox(const StateBox& o) : p_(o.p_ ? o.p_->clone() : nullptr) {}
  StateBox& operator=(const StateBox& o) {
    if (this != &o) p_ = o.p_ ? o.p_->clone() : nullptr;
    return *this;
  }
  StateBox(StateBox&&) noexcept = default;
  StateBox& operator=(StateBox&&) noexcept = default;

  AutomatonState& operator*() { return *p_; }
  const AutomatonState& operator*() const { return *p_; }
  AutomatonState* operator->() { return p_.get(); }
  const AutomatonState* operator->() const { return p_.get(); }
  AutomatonState* get() { return p_.get(); }
  const AutomatonState* get() const { return p_.get(); }
  explicit operator bool() const { return static_cast<bool>(p_); }

 private:
  std::unique_ptr<AutomatonState> p_;
};

// A streaming algorithm for MIF over [n]. Implementations are immutable and
// may be shared across threads; all per-run data lives in the state.
class Automaton {
 public:
  virtual ~Automaton() = default;

  virtual std::string name() const = 0;
  virtual RandomnessMode mode() const = 0;
  virtual Item universe() const = 0;
  virtual std::size_t declared_bits() const = 0;

  virtual StateBox initial(Randomness& r) const = 0;
  virtual void transition(AutomatonState& s, Item input, Randomness& r) const = 0;
  virtual Output output(const AutomatonState& s, Randomness& r) const = 0;
};

using AutomatonPtr = std::shared_ptr<const Automaton>;

// Glue for automata whose state is a plain value type with
// `void encode(BitSink&) const`. Derived provides make_initial, step, emit.
template <class Derived, class State>
class AutomatonImpl : public Automaton {
 protected:
  struct Holder final : AutomatonState {
    explicit Holder(State v) : value(std::move(v)) {}
    std::unique_ptr<AutomatonState> clone() const override {
      return std::make_unique<Holder>(value);
    }
    void encode(BitSink& out) const override { value.encode(out); }
    State value;
  };

 public:
  static State& unwrap(AutomatonState& s) { return static_cast<Holder&>(s).value; }
  static const State& unwrap(const AutomatonState& s) {
    return static_cast<const Holder&>(s).value;
  }

  StateBox initial(Randomness& r) const override {
    return StateBox(std::make_unique<Holder>(self().make_initial(r)));
  }
  void transition(AutomatonState& s, Item input, Randomness& r) const override {
    self().step(unwrap(s), input, r);
  }
  Output output(const AutomatonState& s, Randomness& r) const override {
    return self().emit(unwrap(s), r);
  }

 private:
  const Derived& self() const { return static_cast<const Derived&>(*this); }
};

// Serialized width of a state.
std::size_t encoded_width(const AutomatonState& s);

}  // namespace mif
