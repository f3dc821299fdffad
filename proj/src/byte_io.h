/*!
 *  Copyright (c) 2026 by Contributors
 * \file byte_io.h
 * \brief Little-endian binary writer and bounds-checked reader used by the bundle format.
 */
#ifndef GMASK_SRC_BYTE_IO_H_
#define GMASK_SRC_BYTE_IO_H_

#include <cstdint>
#include <string>
#include <string_view>

#include "gmask/error.h"

namespace gmask {

class ByteWriter {
 public:
  explicit ByteWriter(std::string* out) : out_(out) {}

  void U8(uint8_t v) { out_->push_back(static_cast<char>(v)); }
  void U32(uint32_t v) {
    for (int i = 0; i < 4; ++i) out_->push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void U64(uint64_t v) {
    for (int i = 0; i < 8; ++i) out_->push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void I32(int32_t v) { U32(static_cast<uint32_t>(v)); }
  void Bytes(std::string_view s) {
    U32(static_cast<uint32_t>(s.size()));
    out_->append(s);
  }

 private:
  std::string* out_;
};

class ByteReader {
 public:
  ByteReader(std::string_view data, size_t* pos) : data_(data), pos_(pos) {}

  uint8_t U8() {
    Need(1);
    return static_cast<uint8_t>(data_[(*pos_)++]);
  }
  uint32_t U32() {
    Need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= uint32_t{static_cast<uint8_t>(data_[*pos_ + i])} << (8 * i);
    *pos_ += 4;
    return v;
  }
  uint64_t U64() {
    Need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t{static_cast<uint8_t>(data_[*pos_ + i])} << (8 * i);
    *pos_ += 8;
    return v;
  }
  int32_t I32() { return static_cast<int32_t>(U32()); }
  std::string Bytes() {
    uint32_t n = U32();
    Need(n);
    std::string s(data_.substr(*pos_, n));
    *pos_ += n;
    return s;
  }
  /*! \brief Reads a count and checks it against the bytes left, assuming `min_item_bytes` each. */
  uint32_t Count(size_t min_item_bytes) {
    uint32_t n = U32();
    if (min_item_bytes > 0 && n > (data_.size() - *pos_) / min_item_bytes) {
      throw Error("corrupt bundle: count exceeds remaining data");
    }
    return n;
  }

 private:
  void Need(size_t n) const {
    if (*pos_ + n > data_.size()) throw Error("corrupt bundle: unexpected end of data");
  }

  std::string_view data_;
  size_t* pos_;
};

}  // namespace gmask

#endif  // GMASK_SRC_BYTE_IO_H_
