// Small CSV layer: RFC-4180-ish quoting, header validation, line numbers in
// errors, and atomic writes (temp file + rename).
#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dccm::csv {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what) {}
};

inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') { field += '"'; ++i; }
        else quoted = false;
      } else field += c;
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  out.push_back(std::move(field));
  return out;
}

struct Table {
  std::string path;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;   // raw fields
  std::vector<std::size_t> line_numbers;        // 1-based source lines

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }
  int require_column(const std::string& name) const {
    int c = column(name);
    if (c < 0)
      throw ParseError(path, 1, "missing required column '" + name + "'");
    return c;
  }
};

inline Table read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  Table t;
  t.path = path;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1) {
      t.header = split_line(line);
      continue;
    }
    if (line.empty() || line == "\r") continue;
    auto fields = split_line(line);
    if (fields.size() != t.header.size())
      throw ParseError(path, lineno, "expected " + std::to_string(t.header.size()) +
                                         " fields, got " + std::to_string(fields.size()));
    t.rows.push_back(std::move(fields));
    t.line_numbers.push_back(lineno);
  }
  if (t.header.empty()) throw ParseError(path, 1, "missing header row");
  return t;
}

inline double to_double(const Table& t, std::size_t row, int col) {
  const std::string& s = t.rows[row][col];
  double v = 0;
  auto [p, e] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (e != std::errc{} || p != s.data() + s.size())
    throw ParseError(t.path, t.line_numbers[row], "bad number '" + s + "'");
  return v;
}

inline long long to_int(const Table& t, std::size_t row, int col) {
  const std::string& s = t.rows[row][col];
  long long v = 0;
  auto [p, e] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (e != std::errc{} || p != s.data() + s.size())
    throw ParseError(t.path, t.line_numbers[row], "bad integer '" + s + "'");
  return v;
}

/// Shortest text that round-trips the double exactly.
inline std::string format_double(double v) {
  char buf[32];
  auto [p, e] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)e;
  return std::string(buf, p);
}

inline std::string quote_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    out += c;
  }
  out += '"';
  return out;
}

/// Accumulates rows and writes the file atomically on save().
class Writer {
 public:
  explicit Writer(std::vector<std::string> header) { row(header); }

  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) buf_ += ',';
      buf_ += quote_field(fields[i]);
    }
    buf_ += '\n';
  }

  void save(const std::string& path) const {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write " + tmp.string());
      out << buf_;
      if (!out.flush()) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, target);
  }

 private:
  std::string buf_;
};

}  // namespace dccm::csv
