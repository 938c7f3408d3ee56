#include "bike/bemb.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <vector>

namespace bike {

namespace {

constexpr char kMagic[4] = {'B', 'E', 'M', 'B'};
constexpr std::uint32_t kVersion = 1;

void put_u32_le(std::vector<unsigned char>& out, std::uint32_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 24) & 0xff));
}

std::uint32_t get_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

void write_bemb(const std::filesystem::path& path, const Mat& m) {
  if (!m.all_finite()) {
    throw NonFiniteError("refusing to write non-finite matrix to " + path.string());
  }
  if (m.rows() > std::numeric_limits<std::uint32_t>::max() ||
      m.cols() > std::numeric_limits<std::uint32_t>::max()) {
    throw DimOverflowError("matrix dimensions exceed the u32 header fields");
  }

  std::vector<unsigned char> buf;
  buf.reserve(16 + m.size() * 4);
  buf.insert(buf.end(), kMagic, kMagic + 4);
  put_u32_le(buf, kVersion);
  put_u32_le(buf, static_cast<std::uint32_t>(m.rows()));
  put_u32_le(buf, static_cast<std::uint32_t>(m.cols()));
  for (double v : m.values()) {
    const float f = static_cast<float>(v);
    if (!std::isfinite(f)) {
      throw NonFiniteError("value overflows 32-bit range while writing " + path.string());
    }
    put_u32_le(buf, std::bit_cast<std::uint32_t>(f));
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw MissingFileError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error("short write to " + path.string());
}

Mat read_bemb(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFileError("cannot open " + path.string());
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());

  if (buf.size() < 16) {
    throw TruncatedFileError(path.string() + ": shorter than the 16-byte header");
  }
  if (std::memcmp(buf.data(), kMagic, 4) != 0) {
    throw BadMagicError(path.string() + ": bad magic bytes");
  }
  const std::uint32_t version = get_u32_le(buf.data() + 4);
  if (version != kVersion) {
    throw BadVersionError(path.string() + ": unsupported version " +
                          std::to_string(version));
  }
  const std::uint64_t rows = get_u32_le(buf.data() + 8);
  const std::uint64_t cols = get_u32_le(buf.data() + 12);
  if (rows == 0 || cols == 0) {
    throw DimOverflowError(path.string() + ": zero dimension in header");
  }
  const std::uint64_t count = rows * cols;
  if (count > (std::numeric_limits<std::uint64_t>::max() - 16) / 4 ||
      count > static_cast<std::uint64_t>(std::numeric_limits<std::ptrdiff_t>::max()) / 8) {
    throw DimOverflowError(path.string() + ": rows*cols overflows");
  }
  const std::uint64_t expected = 16 + count * 4;
  if (buf.size() < expected) {
    throw TruncatedFileError(path.string() + ": payload shorter than header promises");
  }
  if (buf.size() > expected) {
    throw TrailingBytesError(path.string() + ": trailing bytes after payload");
  }

  Mat m(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
  const unsigned char* p = buf.data() + 16;
  for (std::uint64_t i = 0; i < count; ++i, p += 4) {
    const float f = std::bit_cast<float>(get_u32_le(p));
    if (!std::isfinite(f)) {
      throw NonFiniteError(path.string() + ": non-finite value in payload");
    }
    m.values()[static_cast<std::size_t>(i)] = static_cast<double>(f);
  }
  return m;
}

}  // namespace bike
