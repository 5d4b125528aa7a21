// Copyright 2026 The qstrength Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Line-delimited JSON records with a fixed field order. Every record starts
// with "schema" and "record"; reals are written with 17 significant digits
// so they round-trip, and non-finite reals become null.

#pragma once

#include <cmath>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qstrength/matrix_io.hpp"

namespace qstrength {

inline constexpr const char* kRecordSchema = "qstrength/1";

class Record {
 public:
  explicit Record(std::string kind) {
    add("schema", std::string(kRecordSchema));
    add("record", std::move(kind));
  }

  Record& add(const std::string& key, double v) { return raw(key, real(v)); }
  Record& add(const std::string& key, int v) { return raw(key, std::to_string(v)); }
  Record& add(const std::string& key, long v) { return raw(key, std::to_string(v)); }
  Record& add(const std::string& key, std::uint64_t v) {
    return raw(key, std::to_string(v));
  }
  Record& add(const std::string& key, bool v) { return raw(key, v ? "true" : "false"); }
  Record& add(const std::string& key, const char* v) { return add(key, std::string(v)); }
  Record& add(const std::string& key, const std::string& v) {
    return raw(key, nlohmann::json(v).dump());
  }
  Record& add_null(const std::string& key) { return raw(key, "null"); }
  Record& add(const std::string& key, std::span<const double> v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ',';
      s += real(v[i]);
    }
    s += ']';
    return raw(key, s);
  }
  /// Nested record as a JSON object (its own schema/record keys omitted).
  Record& add(const std::string& key, const Record& nested) {
    std::string s = "{";
    for (std::size_t i = 2; i < nested.fields_.size(); ++i) {
      if (i > 2) s += ',';
      s += nlohmann::json(nested.fields_[i].first).dump() + ':' + nested.fields_[i].second;
    }
    s += '}';
    return raw(key, s);
  }
  Record& add(const std::string& key, const std::vector<Record>& items) {
    std::string s = "[";
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) s += ',';
      Record wrapper("_");
      wrapper.add("_", items[i]);
      s += wrapper.fields_.back().second;
    }
    s += ']';
    return raw(key, s);
  }

  std::string line() const {
    std::string s = "{";
    for (std::size_t i = 0; i < fields_.size(); ++i) {
      if (i) s += ',';
      s += nlohmann::json(fields_[i].first).dump() + ':' + fields_[i].second;
    }
    s += '}';
    return s;
  }

  friend std::ostream& operator<<(std::ostream& os, const Record& r) {
    return os << r.line() << '\n';
  }

 private:
  static std::string real(double v) {
    return std::isfinite(v) ? format_double(v) : std::string("null");
  }
  Record& raw(const std::string& key, std::string rendered) {
    fields_.emplace_back(key, std::move(rendered));
    return *this;
  }

  std::vector<std::pair<std::string, std::string>> fields_;
};

}  // namespace qstrength
