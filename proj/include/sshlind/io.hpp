#pragma once

// Plain-text key-value configs, run manifests, and deterministic writers.
// Outputs carry no timestamps or host details: rerunning a command with the
// same config yields byte-identical files.

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sshlind/model.hpp"

namespace sshlind {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shortest exact decimal form: %.17g round-trips IEEE doubles.
inline std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string fmt_fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace detail

/// `key = value` lines, '#' comments, blank lines ignored.  Environment
/// variables SSHLIND_<KEY> (key uppercased) override file values.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in, const std::string& source_name) {
    KeyValueConfig cfg;
    cfg.source_ = source_name;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::string body = line.substr(0, line.find('#'));
      body = detail::trim(body);
      if (body.empty()) continue;
      std::size_t eq = body.find('=');
      if (eq == std::string::npos)
        throw ConfigError(source_name + ":" + std::to_string(lineno) +
                          ": expected 'key = value', got '" + detail::trim(line) + "'");
      std::string key = detail::trim(body.substr(0, eq));
      std::string value = detail::trim(body.substr(eq + 1));
      if (key.empty())
        throw ConfigError(source_name + ":" + std::to_string(lineno) + ": empty key");
      if (cfg.values_.count(key))
        throw ConfigError(source_name + ":" + std::to_string(lineno) +
                          ": duplicate key '" + key + "'");
      cfg.values_[key] = value;
    }
    return cfg;
  }

  static KeyValueConfig parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse(in, path);
  }

  /// Env override first, then the file value.
  std::optional<std::string> get(const std::string& key) const {
    if (const char* env = std::getenv(("SSHLIND_" + detail::upper(key)).c_str()))
      return std::string(env);
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

  std::string require(const std::string& key) const {
    auto v = get(key);
    if (!v) throw ConfigError(source_ + ": missing required key '" + key + "'");
    return *v;
  }

  double get_double(const std::string& key, std::optional<double> fallback = {}) const {
    auto v = get(key);
    if (!v) {
      if (fallback) return *fallback;
      throw ConfigError(source_ + ": missing required key '" + key + "'");
    }
    try {
      std::size_t pos = 0;
      double x = std::stod(*v, &pos);
      if (pos != v->size()) throw std::invalid_argument("");
      return x;
    } catch (const std::exception&) {
      throw ConfigError(source_ + ": key '" + key + "': '" + *v + "' is not a number");
    }
  }

  int get_int(const std::string& key, std::optional<int> fallback = {}) const {
    auto v = get(key);
    if (!v) {
      if (fallback) return *fallback;
      throw ConfigError(source_ + ": missing required key '" + key + "'");
    }
    try {
      std::size_t pos = 0;
      int x = std::stoi(*v, &pos);
      if (pos != v->size()) throw std::invalid_argument("");
      return x;
    } catch (const std::exception&) {
      throw ConfigError(source_ + ": key '" + key + "': '" + *v + "' is not an integer");
    }
  }

  const std::string& source() const { return source_; }
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::string source_ = "<config>";
  std::map<std::string, std::string> values_;
};

namespace detail {

inline DissipatorKind parse_kind(const std::string& s, const std::string& key,
                                 const std::string& source) {
  if (s == "loss") return DissipatorKind::loss;
  if (s == "gain") return DissipatorKind::gain;
  if (s == "none")
    throw ConfigError(source + ": key '" + key +
                      "': kind 'none' cannot carry a positive strength");
  throw ConfigError(source + ": key '" + key + "': expected loss|gain|none, got '" +
                    s + "'");
}

}  // namespace detail

/// Keys: t1, t2, n_cells, left_kind, left_gamma, right_kind, right_gamma.
/// Kinds default to none; strengths default to 0; a positive strength
/// requires a loss/gain kind and vice versa a declared kind requires
/// strength > 0 to take effect.
inline OpenChainModel model_from_config(const KeyValueConfig& cfg) {
  OpenChainModel m;
  m.t1 = cfg.get_double("t1");
  m.t2 = cfg.get_double("t2");
  m.n_cells = cfg.get_int("n_cells");
  for (BoundarySide side : {BoundarySide::left, BoundarySide::right}) {
    std::string prefix = side == BoundarySide::left ? "left" : "right";
    std::string kind_s = cfg.get(prefix + "_kind").value_or("none");
    double gamma = cfg.get_double(prefix + "_gamma", 0.0);
    if (kind_s == "none") {
      if (gamma > 0.0)
        throw ConfigError(cfg.source() + ": " + prefix + "_gamma > 0 requires " +
                          prefix + "_kind = loss or gain");
      continue;
    }
    DissipatorKind kind = detail::parse_kind(kind_s, prefix + "_kind", cfg.source());
    m.dissipators.push_back({side, kind, gamma});
  }
  require_valid(m);
  return m;
}

/// Everything needed to reproduce one run: tool, command, ordered parameters.
struct RunManifest {
  std::string tool = "sshlind";
  std::string command;
  std::vector<std::pair<std::string, std::string>> entries;

  RunManifest& add(const std::string& key, const std::string& value) {
    entries.emplace_back(key, value);
    return *this;
  }
  RunManifest& add(const std::string& key, double value) {
    return add(key, fmt_double(value));
  }
  RunManifest& add(const std::string& key, int value) {
    return add(key, std::to_string(value));
  }
  RunManifest& add_model(const OpenChainModel& m) {
    add("t1", m.t1);
    add("t2", m.t2);
    add("n_cells", m.n_cells);
    for (BoundarySide side : {BoundarySide::left, BoundarySide::right}) {
      std::string prefix = side == BoundarySide::left ? "left" : "right";
      const DissipatorSpec* d = m.dissipator(side);
      add(prefix + "_kind", d ? std::string(to_string(d->kind)) : "none");
      add(prefix + "_gamma", d ? d->strength : 0.0);
    }
    return *this;
  }
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row) {
    if (row.size() != columns.size())
      throw std::invalid_argument("Table: row width " + std::to_string(row.size()) +
                                  " != column count " + std::to_string(columns.size()));
    rows.push_back(std::move(row));
  }
};

inline void write_tsv(std::ostream& out, const RunManifest& manifest,
                      const Table& table) {
  out << "# tool\t" << manifest.tool << "\n";
  out << "# command\t" << manifest.command << "\n";
  for (const auto& [k, v] : manifest.entries) out << "# " << k << "\t" << v << "\n";
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    out << table.columns[c] << (c + 1 < table.columns.size() ? '\t' : '\n');
  for (const auto& row : table.rows)
    for (std::size_t c = 0; c < row.size(); ++c)
      out << row[c] << (c + 1 < row.size() ? '\t' : '\n');
}

/// Numeric cells stay exact %.17g strings in JSON as well; consumers parse
/// them back without double rounding.
inline void write_json(std::ostream& out, const RunManifest& manifest,
                       const Table& table) {
  nlohmann::ordered_json doc;
  doc["manifest"]["tool"] = manifest.tool;
  doc["manifest"]["command"] = manifest.command;
  for (const auto& [k, v] : manifest.entries) doc["manifest"][k] = v;
  doc["columns"] = table.columns;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) doc["rows"].push_back(row);
  out << doc.dump(1, '\t') << "\n";
}

inline void write_table_file(const std::string& path, const std::string& format,
                             const RunManifest& manifest, const Table& table) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  if (format == "tsv")
    write_tsv(out, manifest, table);
  else if (format == "json")
    write_json(out, manifest, table);
  else
    throw std::invalid_argument("unknown output format '" + format + "'");
}

}  // namespace sshlind
