#include "mif/bits.hpp"

#include "mif/core.hpp"

namespace mif {

void BitSink::put(std::uint64_t value, unsigned width) {
  if (width < 64 && (value >> width) != 0)
    throw ContractViolation("state field does not fit its declared width");
  if (mode_ == Mode::Store) {
    for (unsigned i = 0; i < width; ++i) {
      std::size_t pos = size_ + i;
      if (pos / 8 >= bytes_.size()) bytes_.push_back('\0');
      if ((value >> i) & 1u) bytes_[pos / 8] = static_cast<char>(bytes_[pos / 8] | (1 << (pos % 8)));
    }
  }
  size_ += width;
}

std::string BitSink::key() const { return bytes_ + "#" + std::to_string(size_); }

}  // namespace mif
