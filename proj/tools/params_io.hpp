#pragma once

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "knds/qnm.hpp"
#include "knds/spacetime.hpp"

namespace knds::io {

// key=value lines; '#' starts a comment. Keys: M, Q, a, Lambda, q, mass.
BlackHoleParams parse_params(const std::string& text, BlackHoleParams base = {});
BlackHoleParams read_params_file(const std::string& path, BlackHoleParams base = {});
std::string format_params(const BlackHoleParams& p);

// 17 significant digits.
std::string num(double x);

// Column-ordered table rendered as CSV (header row) or a JSON array of flat records.
class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add(std::vector<std::string> cells, std::vector<bool> numeric);
  std::string csv() const;
  std::string json() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::vector<bool>> numeric_;
};

struct SeedEntry {
  QnmMode mode;
  std::optional<std::complex<double>> seed;  // empty for the automatic seed
};

// Reads a JSON array of qnm records (as written by the qnm subcommand).
std::vector<SeedEntry> read_seed_file(const std::string& path);
std::vector<SeedEntry> parse_seed_json(const std::string& text);

}  // namespace knds::io
