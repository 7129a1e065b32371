#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mbal/types.hpp"

namespace mbal {

// Minimal JSON value with insertion-ordered objects.  Doubles are emitted
// with 17 significant digits so every finite value round-trips exactly and
// serialization is byte-stable across runs.
class Json {
 public:
  using Array = std::vector<Json>;
  using Object = std::vector<std::pair<std::string, Json>>;

  Json() : value_(nullptr) {}
  Json(std::nullptr_t) : value_(nullptr) {}
  Json(bool b) : value_(b) {}
  Json(int v) : value_(static_cast<std::int64_t>(v)) {}
  Json(long v) : value_(static_cast<std::int64_t>(v)) {}
  Json(long long v) : value_(static_cast<std::int64_t>(v)) {}
  Json(unsigned long long v) : value_(static_cast<std::int64_t>(v)) {}
  Json(double v) : value_(v) {}
  Json(const char* s) : value_(std::string(s)) {}
  Json(std::string s) : value_(std::move(s)) {}

  static Json object() {
    Json j;
    j.value_ = Object{};
    return j;
  }
  static Json array() {
    Json j;
    j.value_ = Array{};
    return j;
  }
  static Json array_of(VectorRef v) {
    Json j = array();
    for (Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
    return j;
  }

  Json& set(const std::string& key, Json v) {
    std::get<Object>(value_).emplace_back(key, std::move(v));
    return *this;
  }
  Json& push_back(Json v) {
    std::get<Array>(value_).push_back(std::move(v));
    return *this;
  }

  std::string dump(int indent = 2) const;

 private:
  void dump_to(std::string& out, int indent, int depth) const;

  std::variant<std::nullptr_t, bool, std::int64_t, double, std::string, Array,
               Object>
      value_;
};

void write_text_file(const std::string& path, const std::string& content);

}  // namespace mbal
