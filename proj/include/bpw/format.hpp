#pragma once

// Reading and writing BPW version 0x01 files.
//
// Layout:
//   bytes 0-2   magic 0x42 0x50 0x57 ("BPW")
//   byte  3     version 0x01
//   bytes 4-35  w, n, a, b as unsigned 64-bit little-endian
//   bytes 36-   nibble stream, high nibble of each byte first. Each
//               instruction is one type nibble followed by arity operands of
//               specifier_nibble_length(w) nibbles, most significant first.
//               An odd nibble count is padded with a final 0x0.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include "bpw/error.hpp"
#include "bpw/program.hpp"

namespace bpw {

inline constexpr std::array<std::uint8_t, 3> kMagic = {0x42, 0x50, 0x57};
inline constexpr std::uint8_t kVersion = 0x01;
inline constexpr std::size_t kHeaderBytes = 36;

namespace detail {

class NibbleWriter {
 public:
  explicit NibbleWriter(std::vector<std::uint8_t>& out) : out_(out) {}

  void put(std::uint8_t nibble) {
    if (high_) {
      out_.push_back(static_cast<std::uint8_t>(nibble << 4));
    } else {
      out_.back() |= nibble & 0x0F;
    }
    high_ = !high_;
  }

  void put_value(std::uint64_t value, unsigned nibbles) {
    for (unsigned i = nibbles; i-- > 0;) put(static_cast<std::uint8_t>((value >> (4 * i)) & 0x0F));
  }

 private:
  std::vector<std::uint8_t>& out_;
  bool high_ = true;
};

class NibbleReader {
 public:
  explicit NibbleReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint64_t remaining() const { return 2 * bytes_.size() - pos_; }
  std::uint64_t position() const { return pos_; }

  std::uint8_t get() {
    const std::uint8_t byte = bytes_[pos_ / 2];
    const std::uint8_t nibble = (pos_ % 2 == 0) ? (byte >> 4) : (byte & 0x0F);
    ++pos_;
    return nibble;
  }

  std::uint64_t get_value(unsigned nibbles) {
    std::uint64_t v = 0;
    for (unsigned i = 0; i < nibbles; ++i) v = (v << 4) | get();
    return v;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::uint64_t pos_ = 0;
};

inline void put_u64_le(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline std::uint64_t get_u64_le(std::span<const std::uint8_t> bytes) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[static_cast<std::size_t>(i)];
  return v;
}

}  // namespace detail

/// Rejects header values the format does not allow.
inline void check_header(const Header& h) {
  if (h.w == 0) throw Error(ErrorCode::HeaderBoundViolation, "width w must be at least 1");
  if (h.w > kMaxWidth) {
    throw Error(ErrorCode::HeaderBoundViolation,
                "width " + std::to_string(h.w) + " exceeds supported maximum 2^30");
  }
  if (h.n == 0) throw Error(ErrorCode::HeaderBoundViolation, "gate count n must be at least 1");
  const std::uint64_t w2 = h.w * h.w;
  if (h.a > w2) {
    throw Error(ErrorCode::HeaderBoundViolation,
                "a = " + std::to_string(h.a) + " exceeds w^2 = " + std::to_string(w2));
  }
  if (h.b > w2) {
    throw Error(ErrorCode::HeaderBoundViolation,
                "b = " + std::to_string(h.b) + " exceeds w^2 = " + std::to_string(w2));
  }
}

/// Body size in nibbles (before padding).
inline std::uint64_t body_nibbles(const Program& p) {
  std::uint64_t total = 0;
  for (const auto& in : p.instructions) total += instruction_nibbles(in.kind, p.header.w);
  return total;
}

inline std::vector<std::uint8_t> serialize(const Program& p) {
  if (p.instructions.empty()) throw Error(ErrorCode::EmptyProgram, "a program needs n >= 1");
  if (p.header.n != p.instructions.size()) {
    throw Error(ErrorCode::HeaderBoundViolation,
                "header n = " + std::to_string(p.header.n) + " but " +
                    std::to_string(p.instructions.size()) + " instructions");
  }
  check_header(p.header);
  const std::uint64_t w = p.header.w;
  const unsigned spec_len = specifier_nibble_length(w);

  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + (body_nibbles(p) + 1) / 2);
  for (std::uint8_t m : kMagic) out.push_back(m);
  out.push_back(kVersion);
  detail::put_u64_le(out, p.header.w);
  detail::put_u64_le(out, p.header.n);
  detail::put_u64_le(out, p.header.a);
  detail::put_u64_le(out, p.header.b);

  detail::NibbleWriter writer(out);
  for (std::size_t i = 0; i < p.instructions.size(); ++i) {
    const Instruction& in = p.instructions[i];
    if (auto err = operand_error(in, w)) {
      throw Error(ErrorCode::OperandOutOfRange, "instruction " + std::to_string(i) + ": " + *err);
    }
    writer.put(static_cast<std::uint8_t>(in.kind));
    for (unsigned k = 0; k < arity(in.kind); ++k) writer.put_value(in.operands[k], spec_len);
  }
  return out;  // a half-filled final byte already holds the 0x0 pad nibble
}

inline Program parse(std::span<const std::uint8_t> bytes) {
  for (std::size_t i = 0; i < kMagic.size(); ++i) {
    if (i >= bytes.size()) throw Error(ErrorCode::Truncated, "file ends inside the magic bytes");
    if (bytes[i] != kMagic[i]) throw Error(ErrorCode::BadMagic, "not a BPW file");
  }
  if (bytes.size() < 4) throw Error(ErrorCode::Truncated, "file ends before the version byte");
  if (bytes[3] != kVersion) {
    throw Error(ErrorCode::UnsupportedVersion, "version byte " + std::to_string(bytes[3]));
  }
  if (bytes.size() < kHeaderBytes) throw Error(ErrorCode::Truncated, "file ends inside the header");

  Program p;
  p.header.w = detail::get_u64_le(bytes.subspan(4, 8));
  p.header.n = detail::get_u64_le(bytes.subspan(12, 8));
  p.header.a = detail::get_u64_le(bytes.subspan(20, 8));
  p.header.b = detail::get_u64_le(bytes.subspan(28, 8));
  check_header(p.header);

  const std::uint64_t w = p.header.w;
  const unsigned spec_len = specifier_nibble_length(w);
  detail::NibbleReader reader(bytes.subspan(kHeaderBytes));
  p.instructions.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(p.header.n, reader.remaining())));

  for (std::uint64_t i = 0; i < p.header.n; ++i) {
    if (reader.remaining() == 0) {
      throw Error(ErrorCode::Truncated, "body ends after " + std::to_string(i) + " of " +
                                            std::to_string(p.header.n) + " instructions");
    }
    const std::uint8_t nibble = reader.get();
    const auto kind = gate_kind_from_nibble(nibble);
    if (!kind) {
      throw Error(ErrorCode::ReservedGateKind,
                  "instruction " + std::to_string(i) + " uses reserved gate nibble 0xF");
    }
    Instruction in{*kind, {}};
    const unsigned k = arity(*kind);
    if (reader.remaining() < std::uint64_t{k} * spec_len) {
      throw Error(ErrorCode::Truncated, "body ends inside instruction " + std::to_string(i));
    }
    for (unsigned j = 0; j < k; ++j) {
      const std::uint64_t v = reader.get_value(spec_len);
      if (v >= 4 * w) {
        throw Error(ErrorCode::OperandOutOfRange, "instruction " + std::to_string(i) + ": operand " +
                                                      std::to_string(v) + " not below 4w");
      }
      in.operands[j] = static_cast<std::uint32_t>(v);
    }
    if (auto err = operand_error(in, w)) {
      throw Error(ErrorCode::OperandOutOfRange, "instruction " + std::to_string(i) + ": " + *err);
    }
    p.instructions.push_back(in);
  }

  const std::uint64_t rest = reader.remaining();
  if (rest > 1 || (rest == 1 && reader.get() != 0)) {
    throw Error(ErrorCode::TrailingData,
                std::to_string(rest) + " nibbles follow the last instruction");
  }
  return p;
}

inline std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::IoFailure, "read failed: " + path);
  return bytes;
}

inline void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot create " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoFailure, "write failed: " + path);
}

inline Program load_program(const std::string& path) { return parse(read_file(path)); }

inline void save_program(const std::string& path, const Program& p) { write_file(path, serialize(p)); }

}  // namespace bpw
