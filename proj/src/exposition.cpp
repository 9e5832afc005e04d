#include <charconv>
#include <cmath>
#include <limits>

#include "intent_orch/errors.hpp"
#include "intent_orch/metrics.hpp"

namespace intent_orch {

namespace {

bool name_start(char c, bool allow_colon) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' ||
         (allow_colon && c == ':');
}

bool name_char(char c, bool allow_colon) {
  return name_start(c, allow_colon) || (c >= '0' && c <= '9');
}

bool valid_name(std::string_view name, bool allow_colon) {
  if (name.empty() || !name_start(name.front(), allow_colon)) return false;
  for (char c : name) {
    if (!name_char(c, allow_colon)) return false;
  }
  return true;
}

bool is_blank(char c) { return c == ' ' || c == '\t'; }

// Cursor over a single line; every failure reports that line.
class LineParser {
 public:
  LineParser(std::string_view line, int line_no)
      : line_(line), line_no_(line_no) {}

  MetricSample sample() {
    MetricSample s;
    s.name = std::string(take_name(true));
    if (s.name.empty()) fail("expected metric name");
    if (peek() == '{') labels(s.labels);
    if (!skip_blanks()) fail("expected whitespace before value");
    parse_value(take_token(), s);
    const bool gap = skip_blanks();
    if (!at_end()) {
      if (!gap) fail("expected whitespace before timestamp");
      s.timestamp_ms = parse_timestamp(take_token());
      skip_blanks();
      if (!at_end()) fail("unexpected trailing content");
    }
    return s;
  }

  void comment() {
    ++pos_;  // '#'
    skip_blanks();
    const auto keyword = take_token();
    if (keyword != "HELP" && keyword != "TYPE") return;  // free-form comment
    if (!skip_blanks()) fail("expected metric name after " + std::string(keyword));
    const auto name = take_name(true);
    if (name.empty() || !valid_name(name, true)) {
      fail("invalid metric name in " + std::string(keyword));
    }
    if (keyword == "TYPE") {
      if (!skip_blanks()) fail("expected metric type");
      const auto type = take_token();
      if (type != "counter" && type != "gauge" && type != "histogram" &&
          type != "summary" && type != "untyped") {
        fail("unknown metric type '" + std::string(type) + "'");
      }
      skip_blanks();
      if (!at_end()) fail("unexpected trailing content after TYPE");
    }
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what, line_no_);
  }

  bool at_end() const { return pos_ >= line_.size(); }
  char peek() const { return at_end() ? '\0' : line_[pos_]; }

  bool skip_blanks() {
    const auto start = pos_;
    while (!at_end() && is_blank(line_[pos_])) ++pos_;
    return pos_ != start;
  }

  std::string_view take_name(bool allow_colon) {
    const auto start = pos_;
    if (!at_end() && name_start(line_[pos_], allow_colon)) {
      ++pos_;
      while (!at_end() && name_char(line_[pos_], allow_colon)) ++pos_;
    }
    return line_.substr(start, pos_ - start);
  }

  std::string_view take_token() {
    const auto start = pos_;
    while (!at_end() && !is_blank(line_[pos_])) ++pos_;
    return line_.substr(start, pos_ - start);
  }

  void labels(std::map<std::string, std::string>& out) {
    ++pos_;  // '{'
    skip_blanks();
    while (peek() != '}') {
      if (at_end()) fail("unterminated label set");
      auto name = take_name(false);
      if (name.empty()) fail("expected label name");
      skip_blanks();
      if (peek() != '=') fail("expected '=' after label name");
      ++pos_;
      skip_blanks();
      if (peek() != '"') fail("expected '\"' to open label value");
      ++pos_;
      std::string value;
      for (;;) {
        if (at_end()) fail("unterminated label value");
        char c = line_[pos_++];
        if (c == '"') break;
        if (c == '\\') {
          if (at_end()) fail("unterminated escape in label value");
          char e = line_[pos_++];
          if (e == '\\') value += '\\';
          else if (e == '"') value += '"';
          else if (e == 'n') value += '\n';
          else fail(std::string("invalid escape '\\") + e + "' in label value");
        } else {
          value += c;
        }
      }
      if (!out.emplace(std::string(name), std::move(value)).second) {
        fail("duplicate label '" + std::string(name) + "'");
      }
      skip_blanks();
      if (peek() == ',') {
        ++pos_;
        skip_blanks();
      } else if (peek() != '}') {
        fail("expected ',' or '}' in label set");
      }
    }
    ++pos_;  // '}'
  }

  void parse_value(std::string_view tok, MetricSample& s) const {
    if (tok.empty()) fail("missing sample value");
    if (tok == "+Inf" || tok == "Inf") {
      s.value = std::numeric_limits<double>::infinity();
      s.special = SpecialValue::kPosInf;
      return;
    }
    if (tok == "-Inf") {
      s.value = -std::numeric_limits<double>::infinity();
      s.special = SpecialValue::kNegInf;
      return;
    }
    if (tok == "NaN") {
      s.value = std::numeric_limits<double>::quiet_NaN();
      s.special = SpecialValue::kNaN;
      return;
    }
    auto body = tok;
    if (body.front() == '+') body.remove_prefix(1);
    const bool bad_sign =
        body.empty() || (tok.front() == '+' && (body.front() == '-' ||
                                                body.front() == '+'));
    double v = 0.0;
    const auto [end, ec] =
        std::from_chars(body.data(), body.data() + body.size(), v);
    if (bad_sign || ec != std::errc() || end != body.data() + body.size() ||
        !std::isfinite(v)) {
      fail("invalid sample value '" + std::string(tok) + "'");
    }
    s.value = v;
  }

  std::int64_t parse_timestamp(std::string_view tok) const {
    std::int64_t ts = 0;
    const auto [end, ec] =
        std::from_chars(tok.data(), tok.data() + tok.size(), ts);
    if (tok.empty() || ec != std::errc() || end != tok.data() + tok.size()) {
      fail("invalid timestamp '" + std::string(tok) + "'");
    }
    return ts;
  }

  std::string_view line_;
  int line_no_;
  std::size_t pos_ = 0;
};

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

bool MetricSample::operator==(const MetricSample& other) const {
  if (name != other.name || labels != other.labels ||
      special != other.special || timestamp_ms != other.timestamp_ms) {
    return false;
  }
  return special == SpecialValue::kNaN || value == other.value;
}

bool is_valid_metric_name(std::string_view name) {
  return valid_name(name, true);
}

bool is_valid_label_name(std::string_view name) {
  return valid_name(name, false);
}

std::vector<MetricSample> parse_exposition(std::string_view text) {
  std::vector<MetricSample> out;
  int line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    std::size_t first = 0;
    while (first < line.size() && is_blank(line[first])) ++first;
    line.remove_prefix(first);
    if (line.empty()) continue;

    LineParser parser(line, line_no);
    if (line.front() == '#') {
      parser.comment();
    } else {
      out.push_back(parser.sample());
    }
  }
  return out;
}

std::string serialize_sample(const MetricSample& s) {
  std::string out = s.name;
  if (!s.labels.empty()) {
    out += '{';
    bool first = true;
    for (const auto& [k, v] : s.labels) {
      if (!first) out += ',';
      first = false;
      out += k;
      out += "=\"";
      for (char c : v) {
        if (c == '\\') out += "\\\\";
        else if (c == '"') out += "\\\"";
        else if (c == '\n') out += "\\n";
        else out += c;
      }
      out += '"';
    }
    out += '}';
  }
  out += ' ';
  switch (s.special) {
    case SpecialValue::kPosInf:
      out += "+Inf";
      break;
    case SpecialValue::kNegInf:
      out += "-Inf";
      break;
    case SpecialValue::kNaN:
      out += "NaN";
      break;
    case SpecialValue::kNone:
      out += format_double(s.value);
      break;
  }
  if (s.timestamp_ms) {
    out += ' ';
    out += std::to_string(*s.timestamp_ms);
  }
  return out;
}

std::string serialize_exposition(const std::vector<MetricSample>& samples) {
  std::string out;
  for (const auto& s : samples) {
    out += serialize_sample(s);
    out += '\n';
  }
  return out;
}

}  // namespace intent_orch
