#include "uner/utf8.hpp"

#include "uner/error.hpp"

namespace uner::utf8 {
namespace {

// Returns the length of the sequence starting at text[i] and writes the
// decoded code point, or throws.
std::size_t next(std::string_view text, std::size_t i, char32_t& cp) {
  const auto b0 = static_cast<unsigned char>(text[i]);
  std::size_t len = 0;
  if (b0 < 0x80) {
    cp = b0;
    return 1;
  } else if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    throw Error(ErrorKind::SchemaViolation, "invalid UTF-8 lead byte at " + std::to_string(i));
  }
  if (i + len > text.size()) {
    throw Error(ErrorKind::SchemaViolation, "truncated UTF-8 sequence at " + std::to_string(i));
  }
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(text[i + k]);
    if ((b & 0xC0) != 0x80) {
      throw Error(ErrorKind::SchemaViolation, "invalid UTF-8 continuation at " + std::to_string(i + k));
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    throw Error(ErrorKind::SchemaViolation, "invalid code point at " + std::to_string(i));
  }
  return len;
}

}  // namespace

std::size_t length(std::string_view text) {
  std::size_t n = 0;
  char32_t cp = 0;
  for (std::size_t i = 0; i < text.size(); ++n) i += next(text, i, cp);
  return n;
}

std::u32string decode(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  char32_t cp = 0;
  for (std::size_t i = 0; i < text.size();) {
    i += next(text, i, cp);
    out.push_back(cp);
  }
  return out;
}

void append(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string encode(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : text) append(out, cp);
  return out;
}

bool is_space(char32_t cp) {
  switch (cp) {
    case U' ': case U'\t': case U'\n': case U'\r': case U'\v': case U'\f':
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

TextIndex::TextIndex(std::string_view text) : text_(text) {
  bytes_.reserve(text.size() + 1);
  char32_t cp = 0;
  for (std::size_t i = 0; i < text.size();) {
    bytes_.push_back(i);
    i += next(text, i, cp);
  }
  bytes_.push_back(text.size());
}

std::string_view TextIndex::slice(std::size_t cp_begin, std::size_t cp_end) const {
  if (cp_begin > cp_end || cp_end >= bytes_.size()) {
    throw Error(ErrorKind::OffsetOutOfRange,
                "slice [" + std::to_string(cp_begin) + "," + std::to_string(cp_end) + ") outside text of length " +
                    std::to_string(length()));
  }
  return text_.substr(bytes_[cp_begin], bytes_[cp_end] - bytes_[cp_begin]);
}

}  // namespace uner::utf8
