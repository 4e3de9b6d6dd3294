#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace mif {

// Items are 1..n. Zero is never a valid item.
using Item = std::uint64_t;

// What an automaton reports after a step: an item or the abort sentinel.
class Output {
 public:
  constexpr Output() = default;
  static constexpr Output of(Item v) { return Output(v); }
  static constexpr Output abort() { return Output(kAbortCode); }

  constexpr bool is_abort() const { return code_ == kAbortCode; }
  constexpr Item item() const { return code_; }
  // Total order used for tie-breaking: items ascending, abort last.
  constexpr std::uint64_t code() const { return code_; }

  friend constexpr bool operator==(Output, Output) = default;
  friend constexpr auto operator<=>(Output, Output) = default;

 private:
  static constexpr std::uint64_t kAbortCode = std::numeric_limits<std::uint64_t>::max();
  constexpr explicit Output(std::uint64_t c) : code_(c) {}
  std::uint64_t code_ = kAbortCode;
};

std::string to_string(Output o);

struct Instance {
  Item n = 0;
  std::size_t ell = 0;
  double delta = 0.0;

  // Throws PreconditionError unless 1 <= ell <= n and 0 <= delta <= 1.
  void validate() const;
};

// Raised when an automaton or adversary breaks one of the engine's contracts.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class SpaceViolation : public ContractViolation {
 public:
  using ContractViolation::ContractViolation;
};

// Bad arguments or configuration.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An exact search or enumeration outgrew its configured budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Number of bits needed to distinguish `count` values (0 for count <= 1).
constexpr unsigned bits_for(std::uint64_t count) {
  unsigned b = 0;
  while (b < 64 && (std::uint64_t{1} << b) < count) ++b;
  return b;
}

}  // namespace mif
