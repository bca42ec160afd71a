#include "params_io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "knds/errors.hpp"

namespace knds::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Domain, fmt::format("cannot open '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

BlackHoleParams parse_params(const std::string& text, BlackHoleParams base) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::Domain, fmt::format("line {}: expected key=value", lineno));
    const std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
    double v = 0;
    try {
      std::size_t used = 0;
      v = std::stod(val, &used);
      if (used != val.size()) throw std::invalid_argument(val);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Domain, fmt::format("line {}: '{}' is not a number", lineno, val));
    }
    if (key == "M") base.M = v;
    else if (key == "Q") base.Q = v;
    else if (key == "a") base.a = v;
    else if (key == "Lambda") base.Lambda = v;
    else if (key == "q") base.q = v;
    else if (key == "mass") base.m = v;
    else throw Error(ErrorKind::Domain, fmt::format("line {}: unknown key '{}'", lineno, key));
  }
  return base;
}

BlackHoleParams read_params_file(const std::string& path, BlackHoleParams base) {
  return parse_params(slurp(path), base);
}

std::string format_params(const BlackHoleParams& p) {
  return fmt::format("M={}\nQ={}\na={}\nLambda={}\nq={}\nmass={}\n", num(p.M), num(p.Q), num(p.a), num(p.Lambda),
                     num(p.q), num(p.m));
}

std::string num(double x) { return fmt::format("{:.17g}", x); }

void Table::add(std::vector<std::string> cells, std::vector<bool> numeric) {
  if (cells.size() != columns_.size() || numeric.size() != columns_.size())
    throw Error(ErrorKind::Diagnostic, "table row width mismatch");
  rows_.push_back(std::move(cells));
  numeric_.push_back(std::move(numeric));
}

std::string Table::csv() const {
  std::string out;
  for (std::size_t c = 0; c < columns_.size(); ++c) out += (c ? "," : "") + columns_[c];
  out += "\n";
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + row[c];
    out += "\n";
  }
  return out;
}

std::string Table::json() const {
  std::string out = "[";
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    out += r ? ",\n  {" : "\n  {";
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      out += fmt::format("{}{}: ", c ? ", " : "", nlohmann::json(columns_[c]).dump());
      const std::string& v = rows_[r][c];
      const bool finite = v.find("nan") == std::string::npos && v.find("inf") == std::string::npos;
      out += numeric_[r][c] ? (finite ? v : "null") : nlohmann::json(v).dump();
    }
    out += "}";
  }
  out += rows_.empty() ? "]\n" : "\n]\n";
  return out;
}

std::vector<SeedEntry> parse_seed_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw Error(ErrorKind::Domain, fmt::format("seed file: {}", e.what()));
  }
  if (!j.is_array()) throw Error(ErrorKind::Domain, "seed file: expected a JSON array of records");
  std::vector<SeedEntry> out;
  for (const auto& r : j) {
    try {
      SeedEntry e;
      e.mode.k = r.at("k").get<double>();
      e.mode.l = r.at("l").get<int>();
      e.mode.m = r.at("m").get<int>();
      const std::string kind = r.value("seed_kind", std::string("explicit"));
      if (kind != "auto") e.seed = std::complex<double>(r.at("seed_re").get<double>(), r.at("seed_im").get<double>());
      out.push_back(e);
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorKind::Domain, fmt::format("seed file record: {}", ex.what()));
    }
  }
  return out;
}

std::vector<SeedEntry> read_seed_file(const std::string& path) { return parse_seed_json(slurp(path)); }

}  // namespace knds::io
