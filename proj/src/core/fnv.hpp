#pragma once

#include <cstdint>
#include <string_view>

namespace dimscope {

// 64-bit FNV-1a.
class Fnv1a {
 public:
  void add(std::uint64_t word) noexcept {
    for (int i = 0; i < 8; ++i) addByte(static_cast<std::uint8_t>(word >> (8 * i)));
  }

  // Length-prefixed so that ("ab","c") and ("a","bc") differ.
  void add(std::string_view bytes) noexcept {
    add(static_cast<std::uint64_t>(bytes.size()));
    for (char c : bytes) addByte(static_cast<std::uint8_t>(c));
  }

  std::uint64_t value() const noexcept { return state_; }

 private:
  void addByte(std::uint8_t b) noexcept {
    state_ ^= b;
    state_ *= 0x100000001b3ULL;
  }

  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace dimscope
