#include "bnet/config.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <vector>

namespace bnet {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("config key '{}': '{}' is not a number", key, text));
  }
}

}  // namespace

ConfigDocument ConfigDocument::parse(std::istream& in) {
  ConfigDocument doc;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(fmt::format("config line {}: expected 'key = value'", line_no));
    }
    const auto key = trim(view.substr(0, eq));
    const auto value = trim(view.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError(fmt::format("config line {}: empty key or value", line_no));
    }
    doc.entries_[std::string(key)] = std::string(value);
  }
  return doc;
}

ConfigDocument ConfigDocument::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse(in);
}

double ConfigDocument::get_double(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("missing config key '" + key + "'");
  return parse_double(key, it->second);
}

std::optional<double> ConfigDocument::find_double(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return parse_double(key, it->second);
}

std::optional<std::uint64_t> ConfigDocument::find_unsigned(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  std::uint64_t v = 0;
  const auto& s = it->second;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ConfigError(fmt::format("config key '{}': '{}' is not an unsigned integer", key, s));
  }
  return v;
}

std::optional<std::string> ConfigDocument::find_string(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

NetworkParams network_params_from(const ConfigDocument& doc) {
  std::vector<std::string> missing;
  auto need = [&](const std::string& key) {
    if (!doc.contains(key)) missing.push_back(key);
  };
  for (const auto ch : kChannels) {
    const std::string name(ch.name());
    need("C_" + name);
    need("f_" + name + ".a");
    need("f_" + name + ".b");
    need("f_" + name + ".c");
  }
  need("tau_e");
  need("tau_i");
  need("n");
  if (!missing.empty()) {
    throw ConfigError(fmt::format("config is missing keys: {}", fmt::join(missing, ", ")));
  }

  NetworkParams p;
  for (const auto ch : kChannels) {
    const std::string name(ch.name());
    p.C(ch) = doc.get_double("C_" + name);
    p.f(ch) = TanhAffine{doc.get_double("f_" + name + ".a"), doc.get_double("f_" + name + ".b"),
                         doc.get_double("f_" + name + ".c")};
  }
  p.tau_e = doc.get_double("tau_e");
  p.tau_i = doc.get_double("tau_i");
  p.n = static_cast<std::size_t>(*doc.find_unsigned("n"));
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return p;
}

void write_network_params(std::ostream& out, const NetworkParams& p) {
  for (const auto ch : kChannels) {
    out << fmt::format("C_{} = {:.17g}\n", ch.name(), p.C(ch));
  }
  out << fmt::format("tau_e = {:.17g}\ntau_i = {:.17g}\nn = {}\n", p.tau_e, p.tau_i, p.n);
  for (const auto ch : kChannels) {
    const auto* f = p.f(ch).tanh_affine();
    if (f == nullptr) {
      throw ConfigError(fmt::format("f_{} is a custom rate and cannot be serialised", ch.name()));
    }
    out << fmt::format("f_{0}.a = {1:.17g}\nf_{0}.b = {2:.17g}\nf_{0}.c = {3:.17g}\n", ch.name(),
                       f->scale, f->offset, f->gain);
  }
}

}  // namespace bnet
