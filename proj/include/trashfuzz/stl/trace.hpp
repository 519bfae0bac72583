#pragma once

// Discrete-time traces: one column of samples per named signal.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "trashfuzz/error.hpp"

namespace trashfuzz::stl {

using Scene = std::map<std::string, double>;

class Trace {
public:
  Trace() = default;

  /// Empty trace over a fixed vocabulary; rows are appended with push().
  explicit Trace(std::vector<std::string> signals, double step_seconds = 0.1)
      : names_(std::move(signals)), columns_(names_.size()), step_seconds_(step_seconds) {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (!index_.emplace(names_[i], i).second)
        throw SchemaError("duplicate signal '" + names_[i] + "'");
    }
    if (!(step_seconds_ > 0.0)) throw SchemaError("step_seconds must be positive");
  }

  static Trace from_scenes(const std::vector<Scene>& scenes, double step_seconds = 0.1) {
    if (scenes.empty()) throw SchemaError("trace needs at least one scene");
    std::vector<std::string> names;
    for (const auto& [k, v] : scenes.front()) names.push_back(k);
    Trace tr(names, step_seconds);
    for (const auto& s : scenes) {
      if (s.size() != names.size()) throw SchemaError("scenes disagree on signal vocabulary");
      std::vector<double> row;
      row.reserve(names.size());
      for (const auto& n : names) {
        auto it = s.find(n);
        if (it == s.end()) throw SchemaError("scene lacks signal '" + n + "'");
        row.push_back(it->second);
      }
      tr.push(row);
    }
    return tr;
  }

  void push(const std::vector<double>& row) {
    if (row.size() != names_.size()) throw SchemaError("row width does not match vocabulary");
    for (std::size_t i = 0; i < row.size(); ++i) columns_[i].push_back(row[i]);
    ++length_;
  }

  std::size_t length() const noexcept { return length_; }
  bool empty() const noexcept { return length_ == 0; }
  double step_seconds() const noexcept { return step_seconds_; }
  void set_step_seconds(double s) {
    if (!(s > 0.0)) throw SchemaError("step_seconds must be positive");
    step_seconds_ = s;
  }
  const std::vector<std::string>& signals() const noexcept { return names_; }
  bool has(const std::string& name) const { return index_.count(name) != 0; }

  const std::vector<double>& column(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw UnknownSignal(name);
    return columns_[it->second];
  }
  const std::vector<double>& column(std::size_t i) const { return columns_.at(i); }

  double at(const std::string& name, std::size_t t) const {
    const auto& c = column(name);
    if (t >= length_) throw IndexOutOfRange(t, length_);
    return c[t];
  }

  Scene scene(std::size_t t) const {
    if (t >= length_) throw IndexOutOfRange(t, length_);
    Scene s;
    for (std::size_t i = 0; i < names_.size(); ++i) s.emplace(names_[i], columns_[i][t]);
    return s;
  }

  friend bool operator==(const Trace& a, const Trace& b) {
    return a.names_ == b.names_ && a.columns_ == b.columns_ && a.length_ == b.length_ &&
           a.step_seconds_ == b.step_seconds_;
  }

private:
  std::vector<std::string> names_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::vector<double>> columns_;
  std::size_t length_ = 0;
  double step_seconds_ = 0.1;
};

namespace detail {
inline std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  for (auto& s : out) {
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t");
    s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  }
  return out;
}

inline double parse_double(const std::string& s) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw SchemaError("not a number: '" + s + "'");
  return v;
}
}  // namespace detail

/// CSV with header `t,<signal>,...`; the `t` column holds the step index.
/// Values are written in shortest round-trip form.
inline std::string to_csv(const Trace& tr) {
  std::string out = "t";
  for (const auto& n : tr.signals()) out += "," + n;
  out += "\n";
  for (std::size_t t = 0; t < tr.length(); ++t) {
    out += std::to_string(t);
    for (std::size_t i = 0; i < tr.signals().size(); ++i)
      out += "," + detail::shortest(tr.column(i)[t]);
    out += "\n";
  }
  return out;
}

inline Trace trace_from_csv(const std::string& text, double step_seconds = 0.1) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("empty trace CSV");
  auto header = detail::split_csv(line);
  if (header.empty() || header[0] != "t") throw SchemaError("trace CSV header must start with 't'");
  Trace tr(std::vector<std::string>(header.begin() + 1, header.end()), step_seconds);
  std::size_t expected_t = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto cells = detail::split_csv(line);
    if (cells.size() != header.size()) throw SchemaError("trace CSV row has wrong width");
    if (detail::parse_double(cells[0]) != static_cast<double>(expected_t))
      throw SchemaError("trace CSV steps must be consecutive from 0");
    ++expected_t;
    std::vector<double> row;
    for (std::size_t i = 1; i < cells.size(); ++i) row.push_back(detail::parse_double(cells[i]));
    tr.push(row);
  }
  if (tr.empty()) throw SchemaError("trace CSV has no rows");
  return tr;
}

/// JSON form: {"format_version":1,"step_seconds":s,"signals":{name:[...]}}.
inline nlohmann::json to_json(const Trace& tr) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["step_seconds"] = tr.step_seconds();
  j["length"] = tr.length();
  nlohmann::json sig = nlohmann::json::object();
  for (std::size_t i = 0; i < tr.signals().size(); ++i) sig[tr.signals()[i]] = tr.column(i);
  j["signals"] = std::move(sig);
  return j;
}

inline Trace trace_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format_version").get<int>() != 1) throw SchemaError("unsupported trace format_version");
    double step = j.at("step_seconds").get<double>();
    const auto& sig = j.at("signals");
    if (!sig.is_object() || sig.empty()) throw SchemaError("trace has no signals");
    std::vector<std::string> names;
    std::vector<std::vector<double>> cols;
    for (auto it = sig.begin(); it != sig.end(); ++it) {
      names.push_back(it.key());
      cols.push_back(it.value().get<std::vector<double>>());
    }
    Trace tr(names, step);
    std::size_t n = cols.front().size();
    for (const auto& c : cols)
      if (c.size() != n) throw SchemaError("trace signal columns differ in length");
    if (n == 0) throw SchemaError("trace has no rows");
    for (std::size_t t = 0; t < n; ++t) {
      std::vector<double> row;
      for (const auto& c : cols) row.push_back(c[t]);
      tr.push(row);
    }
    return tr;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed trace JSON: ") + e.what());
  }
}

}  // namespace trashfuzz::stl
