#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pathllm {

// Split a line on hard tabs. Does not unescape.
std::vector<std::string> split_tabs(const std::string& line);

// TSV field escaping: tab, newline, carriage return and backslash are stored
// as \t, \n, \r, \\ so text attributes survive a line-oriented format.
std::string escape_tsv(const std::string& s);
std::string unescape_tsv(const std::string& s);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
bool file_exists(const std::string& path);

// FNV-1a of a file's bytes, hex-encoded; "" if the file is missing.
std::string hash_file_hex(const std::string& path);
std::string hash_bytes_hex(const std::string& bytes);

// Shortest round-trip decimal form (std::to_chars), deterministic across
// runs. `format_f32` prints the value at 32-bit precision.
std::string format_double(double v);
std::string format_f32(float v);

}  // namespace pathllm
