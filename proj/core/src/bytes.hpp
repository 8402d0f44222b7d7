#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <string_view>
#include <vector>

// Little-endian encode/decode independent of host byte order.

namespace vitprobe::detail {

class ByteWriter {
 public:
  void magic(std::string_view m) {
    for (char c : m) out_.push_back(static_cast<std::byte>(c));
  }
  void u8(std::uint8_t v) { out_.push_back(static_cast<std::byte>(v)); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

  void reserve(std::size_t n) { out_.reserve(n); }
  std::vector<std::byte> take() { return std::move(out_); }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFF));
  }
  std::vector<std::byte> out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::byte> in) : in_(in) {}

  std::size_t remaining() const noexcept { return in_.size() - pos_; }

  bool magic(std::string_view m) {
    if (remaining() < m.size()) return false;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (static_cast<char>(in_[pos_ + i]) != m[i]) return false;
    }
    pos_ += m.size();
    return true;
  }
  std::uint8_t u8() { return static_cast<std::uint8_t>(in_[pos_++]); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  float f32() { return std::bit_cast<float>(u32()); }

 private:
  std::uint64_t get(int n) {
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= std::uint64_t{static_cast<std::uint8_t>(in_[pos_ + i])} << (8 * i);
    pos_ += n;
    return v;
  }
  std::span<const std::byte> in_;
  std::size_t pos_ = 0;
};

}  // namespace vitprobe::detail
