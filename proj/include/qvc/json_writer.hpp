#pragma once

#include <cstdint>
#include <cstdio>
#include <string>

namespace qvc {

// Minimal insertion-ordered JSON emitter: field order is exactly the call
// order and floats carry 12 significant digits, so equal runs serialize to
// identical bytes.

inline std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

inline std::string json_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

class JsonWriter {
 public:
  JsonWriter& field(const std::string& key, const std::string& value) {
    return raw(key, "\"" + json_escape(value) + "\"");
  }
  JsonWriter& field(const std::string& key, const char* value) {
    return field(key, std::string(value));
  }
  JsonWriter& field(const std::string& key, double value) {
    return raw(key, json_number(value));
  }
  JsonWriter& field(const std::string& key, std::int64_t value) {
    return raw(key, std::to_string(value));
  }
  JsonWriter& field(const std::string& key, int value) {
    return field(key, static_cast<std::int64_t>(value));
  }
  JsonWriter& field(const std::string& key, std::uint64_t value) {
    return raw(key, std::to_string(value));
  }
  JsonWriter& field(const std::string& key, bool value) {
    return raw(key, value ? "true" : "false");
  }
  // value must already be serialized JSON (nested object or array)
  JsonWriter& raw(const std::string& key, const std::string& json) {
    if (!first_) body_ += ",";
    first_ = false;
    body_ += "\"" + json_escape(key) + "\":" + json;
    return *this;
  }
  std::string str() const { return "{" + body_ + "}"; }

 private:
  std::string body_;
  bool first_ = true;
};

class JsonArrayWriter {
 public:
  JsonArrayWriter& push_raw(const std::string& json) {
    if (!first_) body_ += ",";
    first_ = false;
    body_ += json;
    return *this;
  }
  JsonArrayWriter& push(double v) { return push_raw(json_number(v)); }
  JsonArrayWriter& push(const std::string& s) {
    return push_raw("\"" + json_escape(s) + "\"");
  }
  std::string str() const { return "[" + body_ + "]"; }

 private:
  std::string body_;
  bool first_ = true;
};

}  // namespace qvc
