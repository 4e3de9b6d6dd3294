#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace mif {

// Destination for a state's fixed-width encoding. In counting mode only the
// width is tracked; in storing mode the packed bits form a hashable key.
class BitSink {
 public:
  enum class Mode { Count, Store };

  explicit BitSink(Mode mode = Mode::Count) : mode_(mode) {}

  // Appends the low `width` bits of `value`. `value` must fit.
  void put(std::uint64_t value, unsigned width);
  void put_bit(bool bit) { put(bit ? 1u : 0u, 1); }

  std::size_t size() const { return size_; }
  // Packed contents plus the width; only meaningful in Store mode.
  std::string key() const;

 private:
  Mode mode_;
  std::size_t size_ = 0;
  std::string bytes_;
};

}  // namespace mif
