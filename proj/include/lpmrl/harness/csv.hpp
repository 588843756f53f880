#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <type_traits>
#include <vector>

#include "lpmrl/core.hpp"
#include "lpmrl/harness/config.hpp"

namespace lpmrl::harness {

/// Comma-separated output with a fixed header and shortest round-trip number formatting.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> header)
      : columns_(header.size()) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    out_.open(path);
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << "\n";
  }

  template <class... Ts>
  void row(const Ts&... values) {
    require(sizeof...(Ts) == columns_, "CsvWriter: row width does not match the header");
    std::size_t i = 0;
    ((out_ << (i++ ? "," : "") << cell(values)), ...);
    out_ << "\n";
  }

 private:
  template <class T>
  static std::string cell(const T& v) {
    if constexpr (std::is_same_v<T, bool>) {
      return v ? "1" : "0";
    } else if constexpr (std::is_floating_point_v<T>) {
      return detail::format_double(static_cast<double>(v));
    } else if constexpr (std::is_integral_v<T>) {
      return std::to_string(v);
    } else {
      return std::string(v);
    }
  }

  std::ofstream out_;
  std::size_t columns_;
};

/// Writes "name[i] value" lines, one per coordinate.
inline void write_named_vector(const std::filesystem::path& path, const std::string& name, const Vector& x) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (Eigen::Index i = 0; i < x.size(); ++i) out << name << "[" << i << "] " << detail::format_double(x[i]) << "\n";
}

inline Vector read_named_vector(const std::filesystem::path& path, const std::string& name) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<double> values;
  std::string key;
  std::string value;
  while (in >> key >> value) {
    const std::string expected = name + "[" + std::to_string(values.size()) + "]";
    if (key != expected) throw std::runtime_error("unexpected entry '" + key + "' in " + path.string());
    values.push_back(detail::parse_double(value));
  }
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace lpmrl::harness
