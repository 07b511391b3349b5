#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace stoqlab {

// Basis strings are unsigned integers with qubit 0 as the least-significant bit.
using Word = std::uint64_t;

inline bool get_bit(Word w, int q) { return (w >> q) & 1ULL; }
inline Word set_bit(Word w, int q, bool v) {
  return v ? (w | (Word{1} << q)) : (w & ~(Word{1} << q));
}
inline Word flip_bit(Word w, int q) { return w ^ (Word{1} << q); }

inline Word ones(int n) { return n >= 64 ? ~Word{0} : (Word{1} << n) - 1; }

// Extract the field of `len` bits starting at qubit `off`.
inline Word get_field(Word w, int off, int len) { return (w >> off) & ones(len); }

inline Word set_field(Word w, int off, int len, Word v) {
  const Word mask = ones(len) << off;
  return (w & ~mask) | ((v << off) & mask);
}

// "0101" has qubit 0 as its first character.
inline Word word_from_string(const std::string& s) {
  if (s.size() > 63) throw std::invalid_argument("bit string too long");
  Word w = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '1')
      w |= Word{1} << i;
    else if (s[i] != '0')
      throw std::invalid_argument("bit string must contain only 0 and 1");
  }
  return w;
}

inline std::string string_from_word(Word w, int width) {
  std::string s(static_cast<std::size_t>(width), '0');
  for (int i = 0; i < width; ++i)
    if (get_bit(w, i)) s[static_cast<std::size_t>(i)] = '1';
  return s;
}

inline int ceil_log2(std::uint64_t n) {
  int b = 0;
  while ((std::uint64_t{1} << b) < n) ++b;
  return b;
}

}  // namespace stoqlab
