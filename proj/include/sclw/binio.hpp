#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "sclw/errors.hpp"
#include "sclw/tensor.hpp"

namespace sclw {

// Little-endian binary IO over an in-memory byte buffer. Files are written
// whole; readers carry a context label so truncation errors can name the
// experience/section they died in.

inline void put_bytes(std::vector<std::uint8_t>& out, const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out.insert(out.end(), b, b + n);
}

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T v) {
    static_assert(std::is_integral_v<T>);
    for (std::size_t i = 0; i < sizeof(T); ++i)
        out.push_back(static_cast<std::uint8_t>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff));
}

inline void put_f64(std::vector<std::uint8_t>& out, double v) {
    put_le(out, std::bit_cast<std::uint64_t>(v));
}

class ByteReader {
  public:
    ByteReader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

    void set_context(std::string ctx) { context_ = std::move(ctx); }
    const std::string& context() const { return context_; }
    std::size_t offset() const { return pos_; }
    bool exhausted() const { return pos_ == size_; }

    void read_bytes(void* dst, std::size_t n) {
        if (pos_ + n > size_)
            throw FormatError("truncated at offset " + std::to_string(pos_) +
                              (context_.empty() ? "" : " in " + context_));
        std::memcpy(dst, data_ + pos_, n);
        pos_ += n;
    }

    template <typename T>
    T read_le() {
        static_assert(std::is_integral_v<T>);
        std::uint8_t buf[sizeof(T)];
        read_bytes(buf, sizeof(T));
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
        return static_cast<T>(v);
    }

    double read_f64() { return std::bit_cast<double>(read_le<std::uint64_t>()); }

  private:
    const std::uint8_t* data_;
    std::size_t size_;
    std::size_t pos_ = 0;
    std::string context_;
};

inline void put_tensor(std::vector<std::uint8_t>& out, const Tensor2& t) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.rows));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.cols));
    for (double v : t.data) put_f64(out, v);
}

inline Tensor2 read_tensor(ByteReader& r) {
    const auto rows = r.read_le<std::uint32_t>();
    const auto cols = r.read_le<std::uint32_t>();
    Tensor2 t(rows, cols);
    for (double& v : t.data) v = r.read_f64();
    return t;
}

inline void put_u32_vec(std::vector<std::uint8_t>& out, const std::vector<std::uint32_t>& v) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(v.size()));
    for (auto x : v) put_le<std::uint32_t>(out, x);
}

inline std::vector<std::uint32_t> read_u32_vec(ByteReader& r) {
    const auto n = r.read_le<std::uint32_t>();
    std::vector<std::uint32_t> v(n);
    for (auto& x : v) x = r.read_le<std::uint32_t>();
    return v;
}

// FNV-1a over raw bytes; used for stream hashes and logits digests.
inline std::uint64_t fnv1a(const void* p, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ull) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= b[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t fnv1a(const Tensor2& t, std::uint64_t h = 0xcbf29ce484222325ull) {
    for (double v : t.data) {
        const auto u = std::bit_cast<std::uint64_t>(v);
        std::uint8_t buf[8];
        for (int i = 0; i < 8; ++i) buf[i] = static_cast<std::uint8_t>((u >> (8 * i)) & 0xff);
        h = fnv1a(buf, 8, h);
    }
    return h;
}

}  // namespace sclw
