#pragma once

#include <string>

namespace pathllm {

// Strips URLs (http://, https://, www. up to the next whitespace), maps
// ASCII characters outside [A-Za-z0-9 .,;:-()] to spaces, collapses
// whitespace runs and trims. Bytes >= 0x80 pass through. Case is kept.
std::string clean_text(const std::string& raw);

// ASCII-only lowercasing; other bytes untouched.
std::string lowercase_ascii(const std::string& s);

}  // namespace pathllm
