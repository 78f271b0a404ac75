#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// Offsets throughout the library count Unicode code points; text is stored
// as UTF-8. These helpers translate between the two.
namespace uner::utf8 {

/// Number of code points; throws Error(SchemaViolation) on invalid UTF-8.
std::size_t length(std::string_view text);

std::u32string decode(std::string_view text);
std::string encode(std::u32string_view text);
void append(std::string& out, char32_t cp);

bool is_space(char32_t cp);

/// Byte offset of every code point boundary, so that boundaries()[k] is the
/// byte at which code point k starts and boundaries().back() == text.size().
class TextIndex {
 public:
  explicit TextIndex(std::string_view text);

  std::size_t length() const { return bytes_.size() - 1; }
  std::size_t byte_offset(std::size_t cp) const { return bytes_.at(cp); }
  std::string_view slice(std::size_t cp_begin, std::size_t cp_end) const;

 private:
  std::string_view text_;
  std::vector<std::size_t> bytes_;
};

}  // namespace uner::utf8
