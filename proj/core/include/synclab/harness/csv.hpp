#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace synclab::harness {

/// Shortest-round-trip-safe decimal text with 17 significant digits.
[[nodiscard]] std::string format_double(double v);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  [[nodiscard]] std::size_t column(const std::string& name) const;
};

[[nodiscard]] std::string to_csv(const Table& table);
void write_csv(const std::filesystem::path& path, const Table& table);

/// Quotes a field when it contains a separator, quote or newline.
[[nodiscard]] std::string csv_field(const std::string& text);

}  // namespace synclab::harness
