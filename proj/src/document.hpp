#pragma once

// yaml-cpp helpers shared by the document parsers. Private to the library.

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <initializer_list>
#include <limits>
#include <string>
#include <string_view>

#include "intent_orch/errors.hpp"

namespace intent_orch::doc {

inline int line_of(const YAML::Node& node) {
  const auto mark = node.Mark();
  return mark.is_null() ? 0 : mark.line + 1;
}

inline YAML::Node load(std::string_view text, const std::string& source) {
  try {
    YAML::Node root = YAML::Load(std::string(text));
    if (!root.IsMap()) {
      throw ParseError("document root must be a mapping", line_of(root),
                       source);
    }
    return root;
  } catch (const YAML::Exception& e) {
    throw ParseError(e.msg, e.mark.is_null() ? 0 : e.mark.line + 1, source);
  }
}

/// Reads typed fields from one mapping and rejects keys nobody asked for.
class MapReader {
 public:
  MapReader(YAML::Node node, std::string source, std::string context)
      : node_(std::move(node)),
        source_(std::move(source)),
        context_(std::move(context)) {
    if (!node_.IsMap()) fail(context_ + " must be a mapping", node_);
  }

  bool has(const std::string& key) const { return bool(node_[key]); }

  YAML::Node require(const std::string& key) {
    YAML::Node v = node_[key];
    if (!v) fail("missing required key '" + key + "' in " + context_, node_);
    seen_.push_back(key);
    return v;
  }

  YAML::Node optional(const std::string& key) {
    YAML::Node v = node_[key];
    if (v) seen_.push_back(key);
    return v;
  }

  template <typename T>
  T get(const std::string& key) {
    return convert<T>(require(key), key);
  }

  template <typename T>
  T get_or(const std::string& key, T fallback) {
    YAML::Node v = optional(key);
    return v ? convert<T>(v, key) : fallback;
  }

  template <typename T>
  T convert(const YAML::Node& v, const std::string& key) const {
    if (!v.IsScalar()) fail("'" + key + "' must be a scalar", v);
    try {
      return v.as<T>();
    } catch (const YAML::Exception&) {
      fail("'" + key + "' has an invalid value '" + v.Scalar() + "'", v);
    }
  }

  double finite(const YAML::Node& v, const std::string& key) const {
    const auto d = convert<double>(v, key);
    if (!std::isfinite(d)) fail("'" + key + "' must be finite", v);
    return d;
  }

  /// Call after all reads; rejects unknown keys.
  void finish() const {
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      bool known = false;
      for (const auto& s : seen_) known = known || s == key;
      if (!known) {
        fail("unknown key '" + key + "' in " + context_, kv.first);
      }
    }
  }

  [[noreturn]] void fail(const std::string& what,
                         const YAML::Node& at) const {
    throw ValidationError(what, line_of(at), source_);
  }

  const YAML::Node& node() const { return node_; }
  const std::string& source() const { return source_; }

 private:
  YAML::Node node_;
  std::string source_;
  std::string context_;
  std::vector<std::string> seen_;
};

inline YAML::Emitter& begin_emitter(YAML::Emitter& out) {
  out.SetDoublePrecision(std::numeric_limits<double>::max_digits10);
  return out;
}

}  // namespace intent_orch::doc
