#include "flowsep/textio.hpp"

#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "flowsep/errors.hpp"

namespace flowsep {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE) {
    throw ConfigError(what + ": cannot parse '" + s + "' as a number");
  }
  return v;
}

}  // namespace

KeyValueFile KeyValueFile::parse(const std::string& text, const std::string& origin) {
  KeyValueFile kv;
  kv.origin_ = origin;
  kv.data_[""];
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": unterminated section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      kv.data_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    kv.data_[section][key] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValueFile KeyValueFile::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), path);
}

bool KeyValueFile::has(const std::string& section, const std::string& key) const {
  return get(section, key).has_value();
}

std::optional<std::string> KeyValueFile::get(const std::string& section,
                                             const std::string& key) const {
  const auto s = data_.find(section);
  if (s == data_.end()) return std::nullopt;
  const auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  return k->second;
}

std::string KeyValueFile::get_string(const std::string& section, const std::string& key,
                                     const std::string& fallback) const {
  return get(section, key).value_or(fallback);
}

double KeyValueFile::get_double(const std::string& section, const std::string& key,
                                double fallback) const {
  const auto v = get(section, key);
  if (!v) return fallback;
  return parse_double(*v, origin_ + " [" + section + "] " + key);
}

long long KeyValueFile::get_int(const std::string& section, const std::string& key,
                                long long fallback) const {
  const auto v = get(section, key);
  if (!v) return fallback;
  long long out = 0;
  const auto* b = v->data();
  const auto [p, ec] = std::from_chars(b, b + v->size(), out);
  if (ec != std::errc{} || p != b + v->size()) {
    throw ConfigError(origin_ + " [" + section + "] " + key + ": expected integer, got '" + *v +
                      "'");
  }
  return out;
}

void KeyValueFile::set(const std::string& section, const std::string& key,
                       const std::string& value) {
  data_[section][key] = value;
}

std::vector<std::string> KeyValueFile::sections() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : data_) out.push_back(name);
  return out;
}

const std::map<std::string, std::string>& KeyValueFile::entries(const std::string& section) const {
  static const std::map<std::string, std::string> empty;
  const auto s = data_.find(section);
  return s == data_.end() ? empty : s->second;
}

std::string KeyValueFile::to_string() const {
  std::ostringstream out;
  for (const auto& [name, kv] : data_) {
    if (kv.empty()) continue;
    if (!name.empty()) out << "[" << name << "]\n";
    for (const auto& [k, v] : kv) out << k << "=" << v << "\n";
  }
  return out.str();
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw ConfigError("CSV has no column '" + name + "'");
}

std::vector<double> CsvTable::column_values(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open CSV file '" + path + "'");
  CsvTable t;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (t.header.empty()) {
      t.header = cells;
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw DimensionError(path + ":" + std::to_string(lineno) + ": expected " +
                           std::to_string(t.header.size()) + " columns, got " +
                           std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_double(c, path + ":" + std::to_string(lineno)));
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw ConfigError("CSV file '" + path + "' is empty");
  return t;
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write CSV file '" + path + "'");
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    f << (i ? "," : "") << table.header[i];
  }
  f << "\n";
  for (const auto& r : table.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) f << (i ? "," : "") << format_double(r[i]);
    f << "\n";
  }
  if (!f) throw ConfigError("write to '" + path + "' failed");
}

std::string format_double(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, p);
}

}  // namespace flowsep
