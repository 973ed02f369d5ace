#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "bnet/model.hpp"

namespace bnet {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Plain-text `key = value` document. Blank lines and `#` comments are
/// ignored; later keys override earlier ones.
///
///   C_ee = 1
///   tau_e = 1
///   n = 5000
///   f_ee.a = 0.5
///   f_ee.b = 2
///   f_ee.c = 1
class ConfigDocument {
 public:
  static ConfigDocument parse(std::istream& in);
  static ConfigDocument load(const std::filesystem::path& path);

  bool contains(const std::string& key) const { return entries_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { entries_[key] = value; }

  double get_double(const std::string& key) const;
  std::optional<double> find_double(const std::string& key) const;
  std::optional<std::uint64_t> find_unsigned(const std::string& key) const;
  std::optional<std::string> find_string(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

/// Reads every network key (C_*, tau_*, n, f_*.{a,b,c}); missing keys are an error.
NetworkParams network_params_from(const ConfigDocument& doc);

/// Serialises the network keys with full precision. Throws ConfigError for
/// Custom firing rates, which have no text form.
void write_network_params(std::ostream& out, const NetworkParams& p);

}  // namespace bnet
