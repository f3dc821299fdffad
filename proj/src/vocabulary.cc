/*!
 *  Copyright (c) 2026 by Contributors
 * \file vocabulary.cc
 * \brief Vocabulary loading, hashing and the sorted prefix-sharing index.
 */
#include "gmask/vocabulary.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "gmask/error.h"
#include "utf8.h"

namespace gmask {

namespace {

constexpr uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr uint64_t kFnvPrime = 1099511628211ULL;

void FnvMix(uint64_t* h, std::string_view bytes) {
  for (char c : bytes) {
    *h ^= static_cast<uint8_t>(c);
    *h *= kFnvPrime;
  }
}

void FnvMixInt(uint64_t* h, uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    *h ^= (v >> (8 * i)) & 0xFF;
    *h *= kFnvPrime;
  }
}

// Reader for the vocabulary file: standard JSON, except strings may also contain \xHH.
class VocabJsonReader {
 public:
  explicit VocabJsonReader(std::string_view text) : text_(text) {}

  Vocabulary Read() {
    std::optional<bool> byte_level;
    std::optional<int64_t> eos;
    std::vector<int64_t> special;
    std::optional<std::vector<std::string>> tokens;
    Expect('{');
    Space();
    if (Peek() != '}') {
      while (true) {
        Space();
        std::string key = String();
        Space();
        Expect(':');
        Space();
        if (key == "byte_level") {
          byte_level = Bool();
        } else if (key == "eos_id") {
          eos = Integer();
        } else if (key == "special") {
          Expect('[');
          Space();
          if (Peek() != ']') {
            while (true) {
              Space();
              special.push_back(Integer());
              Space();
              if (Peek() == ',') {
                ++pos_;
                continue;
              }
              break;
            }
          }
          Expect(']');
        } else if (key == "tokens") {
          tokens.emplace();
          Expect('[');
          Space();
          if (Peek() != ']') {
            while (true) {
              Space();
              tokens->push_back(String());
              Space();
              if (Peek() == ',') {
                ++pos_;
                continue;
              }
              break;
            }
          }
          Expect(']');
        } else {
          Fail("unknown key '" + key + "'");
        }
        Space();
        if (Peek() == ',') {
          ++pos_;
          continue;
        }
        break;
      }
    }
    Expect('}');
    Space();
    if (pos_ != text_.size()) Fail("trailing characters");
    if (!tokens) Fail("missing \"tokens\"");
    if (!eos) Fail("missing \"eos_id\"");
    int64_t n = static_cast<int64_t>(tokens->size());
    if (*eos < 0 || *eos >= n) Fail("eos_id out of range");
    std::vector<int32_t> special_ids;
    std::vector<bool> seen(n, false);
    for (int64_t id : special) {
      if (id < 0 || id >= n) Fail("special id " + std::to_string(id) + " out of range");
      if (seen[id]) Fail("duplicate special id " + std::to_string(id));
      seen[id] = true;
      special_ids.push_back(static_cast<int32_t>(id));
    }
    if (!seen[*eos]) special_ids.push_back(static_cast<int32_t>(*eos));
    if (byte_level.value_or(false)) {
      std::vector<bool> is_special(n, false);
      for (int32_t id : special_ids) is_special[id] = true;
      for (int64_t i = 0; i < n; ++i) {
        if (!is_special[i]) (*tokens)[i] = DecodeByteLevel((*tokens)[i]);
      }
    }
    return Vocabulary(std::move(*tokens), static_cast<int32_t>(*eos), std::move(special_ids));
  }

 private:
  [[noreturn]] void Fail(const std::string& msg) const {
    throw Error("vocabulary: " + msg + " (at offset " + std::to_string(pos_) + ")");
  }
  char Peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  void Space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\n' ||
                                   text_[pos_] == '\t' || text_[pos_] == '\r')) {
      ++pos_;
    }
  }
  void Expect(char c) {
    if (Peek() != c) Fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  bool Bool() {
    if (text_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return true;
    }
    if (text_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return false;
    }
    Fail("expected a boolean");
  }
  int64_t Integer() {
    size_t start = pos_;
    if (Peek() == '-') ++pos_;
    while (std::isdigit(static_cast<unsigned char>(Peek()))) ++pos_;
    if (pos_ == start || (pos_ == start + 1 && text_[start] == '-')) Fail("expected an integer");
    if (pos_ - start > 12) Fail("integer too large");
    return std::stoll(std::string(text_.substr(start, pos_ - start)));
  }
  uint32_t Hex(int digits) {
    uint32_t v = 0;
    for (int i = 0; i < digits; ++i) {
      char c = Peek();
      int d = (c >= '0' && c <= '9')   ? c - '0'
              : (c >= 'a' && c <= 'f') ? c - 'a' + 10
              : (c >= 'A' && c <= 'F') ? c - 'A' + 10
                                       : -1;
      if (d < 0) Fail("bad hex digit");
      v = v * 16 + d;
      ++pos_;
    }
    return v;
  }
  std::string String() {
    Expect('"');
    std::string out;
    while (true) {
      if (pos_ >= text_.size()) Fail("unterminated string");
      char c = text_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        if (static_cast<uint8_t>(c) < 0x20) Fail("control character in string");
        out += c;
        continue;
      }
      char e = Peek();
      ++pos_;
      switch (e) {
        case '"':
        case '\\':
        case '/':
          out += e;
          break;
        case 'b':
          out += '\b';
          break;
        case 'f':
          out += '\f';
          break;
        case 'n':
          out += '\n';
          break;
        case 'r':
          out += '\r';
          break;
        case 't':
          out += '\t';
          break;
        case 'x':
          out += static_cast<char>(Hex(2));
          break;
        case 'u': {
          uint32_t cp = Hex(4);
          if (cp >= 0xD800 && cp <= 0xDBFF && text_.substr(pos_, 2) == "\\u") {
            size_t save = pos_;
            pos_ += 2;
            uint32_t lo = Hex(4);
            if (lo >= 0xDC00 && lo <= 0xDFFF) {
              cp = 0x10000 + ((cp - 0xD800) << 10) + (lo - 0xDC00);
            } else {
              pos_ = save;
            }
          }
          if (cp >= 0xD800 && cp <= 0xDFFF) Fail("unpaired surrogate escape");
          out += EncodeUtf8(cp);
          break;
        }
        default:
          Fail("bad escape");
      }
    }
    return out;
  }

  std::string_view text_;
  size_t pos_ = 0;
};

const std::unordered_map<uint32_t, uint8_t>& ByteLevelDecoder() {
  static const std::unordered_map<uint32_t, uint8_t> kTable = [] {
    std::vector<int> bs;
    for (int b = '!'; b <= '~'; ++b) bs.push_back(b);
    for (int b = 0xA1; b <= 0xAC; ++b) bs.push_back(b);
    for (int b = 0xAE; b <= 0xFF; ++b) bs.push_back(b);
    std::vector<uint32_t> cs(bs.begin(), bs.end());
    int n = 0;
    for (int b = 0; b < 256; ++b) {
      if (std::find(bs.begin(), bs.end(), b) == bs.end()) {
        bs.push_back(b);
        cs.push_back(256 + n++);
      }
    }
    std::unordered_map<uint32_t, uint8_t> table;
    for (size_t i = 0; i < bs.size(); ++i) table[cs[i]] = static_cast<uint8_t>(bs[i]);
    return table;
  }();
  return kTable;
}

}  // namespace

std::string DecodeByteLevel(std::string_view text) {
  const auto& table = ByteLevelDecoder();
  std::string out;
  size_t pos = 0;
  while (pos < text.size()) {
    int32_t cp = DecodeUtf8(text, &pos);
    auto it = cp < 0 ? table.end() : table.find(static_cast<uint32_t>(cp));
    if (it == table.end()) throw Error("vocabulary: character outside the byte-level alphabet");
    out += static_cast<char>(it->second);
  }
  return out;
}

Vocabulary::Vocabulary(std::vector<std::string> tokens, int32_t eos_id,
                       std::vector<int32_t> special_ids)
    : tokens_(std::move(tokens)), eos_id_(eos_id) {
  int32_t n = size();
  GMASK_CHECK(eos_id >= 0 && eos_id < n) << "eos id out of range";
  is_special_.assign(n, false);
  special_ids.push_back(eos_id);
  for (int32_t id : special_ids) {
    GMASK_CHECK(id >= 0 && id < n) << "special id out of range";
    is_special_[id] = true;
  }
  for (int32_t i = 0; i < n; ++i) {
    if (is_special_[i]) special_ids_.push_back(i);
  }
  hash_ = kFnvOffset;
  FnvMixInt(&hash_, static_cast<uint64_t>(n));
  for (const auto& t : tokens_) {
    FnvMixInt(&hash_, t.size());
    FnvMix(&hash_, t);
  }
  FnvMixInt(&hash_, static_cast<uint64_t>(eos_id_));
  for (int32_t id : special_ids_) FnvMixInt(&hash_, static_cast<uint64_t>(id));
}

Vocabulary Vocabulary::FromJson(std::string_view text) { return VocabJsonReader(text).Read(); }

Vocabulary Vocabulary::Load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open vocabulary file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return FromJson(ss.str());
}

std::string Vocabulary::ToJson() const {
  std::string out = "{\"byte_level\": false, \"eos_id\": " + std::to_string(eos_id_) +
                    ", \"special\": [";
  for (size_t i = 0; i < special_ids_.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(special_ids_[i]);
  }
  out += "], \"tokens\": [";
  for (int32_t i = 0; i < size(); ++i) {
    if (i) out += ",";
    out += (i % 8 == 0) ? "\n  \"" : " \"";
    for (char c : tokens_[i]) {
      uint8_t b = static_cast<uint8_t>(c);
      if (c == '"' || c == '\\') {
        out += '\\';
        out += c;
      } else if (b >= 0x20 && b < 0x7F) {
        out += c;
      } else {
        char buf[8];
        std::snprintf(buf, sizeof(buf), "\\x%02X", b);
        out += buf;
      }
    }
    out += "\"";
  }
  out += "\n]}\n";
  return out;
}

void Vocabulary::Save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write vocabulary file '" + path + "'");
  out << ToJson();
}

SortedVocabIndex BuildSortedIndex(const Vocabulary& vocab) {
  SortedVocabIndex index;
  for (int32_t i = 0; i < vocab.size(); ++i) {
    if (!vocab.IsSpecial(i) && !vocab.token(i).empty()) index.order.push_back(i);
  }
  std::stable_sort(index.order.begin(), index.order.end(),
                   [&](int32_t a, int32_t b) { return vocab.token(a) < vocab.token(b); });
  index.lcp.assign(index.order.size(), 0);
  for (size_t k = 0; k < index.order.size(); ++k) {
    const std::string& cur = vocab.token(index.order[k]);
    index.total_bytes += static_cast<int64_t>(cur.size());
    if (k == 0) continue;
    const std::string& prev = vocab.token(index.order[k - 1]);
    size_t limit = std::min(cur.size(), prev.size());
    size_t l = 0;
    while (l < limit && cur[l] == prev[l]) ++l;
    index.lcp[k] = static_cast<int32_t>(l);
    index.shared_bytes += static_cast<int64_t>(l);
  }
  return index;
}

double SavedCharsRatio(const SortedVocabIndex& index) {
  if (index.total_bytes == 0) return 1.0;
  return static_cast<double>(index.total_bytes - index.shared_bytes) /
         static_cast<double>(index.total_bytes);
}

}  // namespace gmask
