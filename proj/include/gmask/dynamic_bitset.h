/*!
 *  Copyright (c) 2026 by Contributors
 * \file gmask/dynamic_bitset.h
 * \brief A runtime-sized bitset stored as little-endian 32-bit words.
 */
#ifndef GMASK_DYNAMIC_BITSET_H_
#define GMASK_DYNAMIC_BITSET_H_

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

namespace gmask {

/*!
 * \brief Bit i lives in word i / 32 at bit position i % 32. Bits at positions >= size are kept
 * zero by every mutating operation.
 */
class DynamicBitset {
 public:
  static constexpr int kBitsPerWord = 32;

  static int NumWords(int size) { return (size + kBitsPerWord - 1) / kBitsPerWord; }

  DynamicBitset() = default;
  explicit DynamicBitset(int size, bool value = false)
      : size_(size), words_(NumWords(size), value ? ~uint32_t{0} : 0u) {
    ClearTail();
  }

  int size() const { return size_; }
  std::span<const uint32_t> words() const { return words_; }
  std::span<uint32_t> mutable_words() { return words_; }

  bool operator[](int i) const { return (words_[i >> 5] >> (i & 31)) & 1u; }
  void Set(int i) { words_[i >> 5] |= (1u << (i & 31)); }
  void Reset(int i) { words_[i >> 5] &= ~(1u << (i & 31)); }
  void Set(int i, bool v) { v ? Set(i) : Reset(i); }

  void SetAll() {
    for (auto& w : words_) w = ~uint32_t{0};
    ClearTail();
  }
  void ResetAll() {
    for (auto& w : words_) w = 0;
  }

  DynamicBitset& operator|=(const DynamicBitset& other) {
    for (size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
    return *this;
  }
  DynamicBitset& operator&=(const DynamicBitset& other) {
    for (size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
    return *this;
  }

  int Count() const {
    int n = 0;
    for (uint32_t w : words_) n += std::popcount(w);
    return n;
  }

  /*! \brief Index of the first set bit at or after `from`, or -1. */
  int FindNext(int from) const {
    if (from >= size_) return -1;
    size_t wi = from >> 5;
    uint32_t w = words_[wi] & (~uint32_t{0} << (from & 31));
    while (true) {
      if (w != 0) return static_cast<int>(wi * 32 + std::countr_zero(w));
      if (++wi >= words_.size()) return -1;
      w = words_[wi];
    }
  }
  int FindFirst() const { return FindNext(0); }

  bool operator==(const DynamicBitset& other) const = default;

 private:
  void ClearTail() {
    int tail = size_ % kBitsPerWord;
    if (tail != 0 && !words_.empty()) words_.back() &= (1u << tail) - 1;
  }

  int size_ = 0;
  std::vector<uint32_t> words_;
};

}  // namespace gmask

#endif  // GMASK_DYNAMIC_BITSET_H_
