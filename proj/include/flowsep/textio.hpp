#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace flowsep {

// Plain `key=value` text with optional `[section]` headers. Keys before the
// first header live in section "". `#` starts a comment.
class KeyValueFile {
 public:
  static KeyValueFile parse(const std::string& text, const std::string& origin = "<string>");
  static KeyValueFile load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  long long get_int(const std::string& section, const std::string& key, long long fallback) const;

  void set(const std::string& section, const std::string& key, const std::string& value);
  std::vector<std::string> sections() const;
  const std::map<std::string, std::string>& entries(const std::string& section) const;
  std::string to_string() const;

 private:
  std::string origin_;
  std::map<std::string, std::map<std::string, std::string>> data_;
};

// Numeric table with a header row. All cells must parse as doubles.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;
  std::vector<double> column_values(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const CsvTable& table);

// Shortest round-trip representation of a double.
std::string format_double(double v);

}  // namespace flowsep
