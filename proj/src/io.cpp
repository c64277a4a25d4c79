#include "blowup/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace blowup {

namespace fs = std::filesystem;

namespace {

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

}  // namespace

const std::vector<double>& Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return columns.at(i);
  throw std::out_of_range("no column named " + name);
}

void write_csv(const fs::path& path, const Table& table) {
  if (table.header.size() != table.columns.size())
    throw std::invalid_argument("csv header/column count mismatch");
  for (const auto& c : table.columns)
    if (c.size() != table.rows()) throw std::invalid_argument("ragged csv columns");
  ensure_parent(path);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  for (std::size_t j = 0; j < table.header.size(); ++j)
    out << (j ? "," : "") << table.header[j];
  out << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < table.rows(); ++i) {
    for (std::size_t j = 0; j < table.columns.size(); ++j)
      out << (j ? "," : "") << table.columns[j][i];
    out << '\n';
  }
}

Table read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  Table t;
  std::string line;
  if (!std::getline(in, line)) return t;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.header.push_back(cell);
  }
  t.columns.resize(t.header.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t j = 0;
    while (std::getline(ss, cell, ',') && j < t.columns.size()) t.columns[j++].push_back(std::stod(cell));
  }
  return t;
}

void write_json(const fs::path& path, const Json& doc) {
  ensure_parent(path);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << std::setw(2) << doc << '\n';
}

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return Json::parse(in);
}

}  // namespace blowup
