#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace phishbench {

std::string to_lower(std::string_view text);
std::string_view trim(std::string_view text);
std::vector<std::string> split(std::string_view text, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool is_ascii_alnum(char c);

/// Reads a whole file. Throws DataError if the file cannot be opened.
std::string read_text_file(const std::filesystem::path& path);

/// Writes a whole file, creating parent directories as needed.
/// Throws DataError on I/O failure.
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// Splits text into lines. Accepts both \n and \r\n endings; a trailing
/// newline does not produce a final empty line.
std::vector<std::string> split_lines(std::string_view text);

}  // namespace phishbench
