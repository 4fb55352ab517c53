#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <vector>

namespace xfem3d1d {

/// Flat `key = value` file. `#` starts a comment; blank lines are ignored;
/// lists are comma separated, triples within a list separated by `;`.
class Config {
 public:
  static Config parse(std::istream& in, const std::string& origin = "<stream>");
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  std::vector<std::string> keys() const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<int> get_ints(const std::string& key, const std::vector<int>& fallback) const;
  /// `a,b,c; d,e,f` as a list of integer triples.
  std::vector<std::vector<int>> get_int_groups(const std::string& key,
                                               const std::vector<std::vector<int>>& fallback) const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace xfem3d1d
