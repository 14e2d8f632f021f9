#include "pathllm/text_clean.hpp"

#include <cctype>

namespace pathllm {

namespace {

bool is_kept_ascii(unsigned char c) {
  if (std::isalnum(c)) return true;
  switch (c) {
    case ' ': case '.': case ',': case ';': case ':':
    case '-': case '(': case ')':
      return true;
    default:
      return false;
  }
}

bool matches_prefix_ci(const std::string& s, std::size_t pos,
                       const char* prefix) {
  for (std::size_t i = 0; prefix[i] != '\0'; ++i) {
    if (pos + i >= s.size()) return false;
    if (std::tolower(static_cast<unsigned char>(s[pos + i])) != prefix[i]) {
      return false;
    }
  }
  return true;
}

bool url_starts_at(const std::string& s, std::size_t pos) {
  if (pos > 0) {
    unsigned char prev = static_cast<unsigned char>(s[pos - 1]);
    if (std::isalnum(prev)) return false;
  }
  return matches_prefix_ci(s, pos, "http://") ||
         matches_prefix_ci(s, pos, "https://") ||
         matches_prefix_ci(s, pos, "www.");
}

}  // namespace

std::string clean_text(const std::string& raw) {
  std::string no_urls;
  no_urls.reserve(raw.size());
  std::size_t i = 0;
  while (i < raw.size()) {
    if (url_starts_at(raw, i)) {
      while (i < raw.size() &&
             !std::isspace(static_cast<unsigned char>(raw[i]))) {
        ++i;
      }
      no_urls += ' ';
      continue;
    }
    no_urls += raw[i];
    ++i;
  }

  std::string out;
  out.reserve(no_urls.size());
  bool pending_space = false;
  for (unsigned char c : no_urls) {
    bool keep = c >= 0x80 || is_kept_ascii(c);
    if (!keep || c == ' ') {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out += ' ';
    pending_space = false;
    out += static_cast<char>(c);
  }
  return out;
}

std::string lowercase_ascii(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

}  // namespace pathllm
