#pragma once

// Plain CSV and JSON helpers shared by the modules and the CLI.

#include "json.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace blowup {

using Json = nlohmann::json;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  const std::vector<double>& column(const std::string& name) const;
};

// Writes with 17 significant digits. Creates parent directories.
void write_csv(const std::filesystem::path& path, const Table& table);
Table read_csv(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const Json& doc);
Json read_json(const std::filesystem::path& path);

}  // namespace blowup
