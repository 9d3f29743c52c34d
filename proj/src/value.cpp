#include "inductor/value.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace inductor {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

// Parses one "[a, b, c]" group starting at text[pos] == '['. Advances pos past
// the closing bracket.
std::vector<long long> parse_int_row(const std::string& text, size_t& pos) {
  if (pos >= text.size() || text[pos] != '[') throw FormatError("expected '['", pos);
  ++pos;
  std::vector<long long> items;
  for (;;) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos >= text.size()) throw FormatError("unterminated list", pos);
    if (text[pos] == ']') {
      ++pos;
      return items;
    }
    if (!items.empty()) {
      if (text[pos] != ',') throw FormatError("expected ',' or ']'", pos);
      ++pos;
      while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    size_t start = pos;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) ++pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == start || (pos == start + 1 && !std::isdigit(static_cast<unsigned char>(text[start]))))
      throw FormatError("expected integer", start);
    items.push_back(std::stoll(text.substr(start, pos - start)));
  }
}

IntList parse_int_list(const std::string& text) {
  size_t pos = text.find_first_not_of(" \t\r\n");
  if (pos == std::string::npos) throw FormatError("empty text is not a list literal", 0);
  IntList out{parse_int_row(text, pos)};
  while (pos < text.size()) {
    if (!std::isspace(static_cast<unsigned char>(text[pos])))
      throw FormatError("trailing content after list", pos);
    ++pos;
  }
  return out;
}

// A grid is one or more bracketed integer rows; tolerates the JSON nested form
// "[[..],[..]]" as well as one row per line.
IntGrid parse_int_grid(const std::string& text) {
  IntGrid g;
  size_t pos = 0;
  while (pos < text.size()) {
    char c = text[pos];
    if (c == '[') {
      // Skip an outer bracket that merely wraps rows.
      size_t next = text.find_first_not_of(" \t\r\n", pos + 1);
      if (next != std::string::npos && text[next] == '[') {
        ++pos;
        continue;
      }
      g.rows.emplace_back();
      auto row = parse_int_row(text, pos);
      auto& cells = g.rows.back();
      for (long long v : row) cells.push_back(static_cast<int>(v));
    } else if (c == ']' || c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
    } else {
      throw FormatError("unexpected character in grid", pos);
    }
  }
  if (g.rows.empty()) throw FormatError("no grid rows found", 0);
  check_grid(g);
  return g;
}

}  // namespace

const char* kind_name(TaskKind k) {
  switch (k) {
    case TaskKind::acre: return "acre";
    case TaskKind::miniscan: return "miniscan";
    case TaskKind::listfn: return "listfn";
    case TaskKind::miniarc: return "miniarc";
  }
  return "?";
}

TaskKind kind_from_name(const std::string& name) {
  if (name == "acre") return TaskKind::acre;
  if (name == "miniscan") return TaskKind::miniscan;
  if (name == "listfn") return TaskKind::listfn;
  if (name == "miniarc") return TaskKind::miniarc;
  throw SchemaError("unknown task kind: " + name);
}

const char* label_name(Label l) {
  switch (l) {
    case Label::on: return "on";
    case Label::off: return "off";
    case Label::undetermined: return "undetermined";
  }
  return "?";
}

std::optional<Label> label_from_text(const std::string& text) {
  std::string t = trim(text);
  std::transform(t.begin(), t.end(), t.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (t == "on") return Label::on;
  if (t == "off") return Label::off;
  if (t == "undetermined") return Label::undetermined;
  return std::nullopt;
}

const char* method_name(Method m) {
  switch (m) {
    case Method::io: return "io";
    case Method::sc: return "sc";
    case Method::sr: return "sr";
    case Method::refine: return "refine";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  if (name == "io") return Method::io;
  if (name == "sc") return Method::sc;
  if (name == "sr") return Method::sr;
  if (name == "refine") return Method::refine;
  throw SchemaError("unknown method: " + name);
}

std::string normalize_description(const std::string& s) {
  std::string out;
  bool pending_space = false;
  for (char raw : s) {
    unsigned char c = static_cast<unsigned char>(raw);
    if (std::isspace(c)) {
      if (!out.empty()) pending_space = true;
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  return out;
}

void check_grid(const IntGrid& g) {
  if (g.rows.empty() || g.rows.front().empty())
    throw FormatError("grid must have height >= 1 and width >= 1");
  size_t w = g.rows.front().size();
  for (const auto& row : g.rows) {
    if (row.size() != w) throw FormatError("grid rows have unequal lengths");
    for (int cell : row)
      if (cell < 0 || cell > 9)
        throw FormatError("grid cell outside 0-9: " + std::to_string(cell));
  }
}

Value normalize_output(const Value& v) {
  if (const auto* ts = std::get_if<TokenSeq>(&v)) {
    TokenSeq out;
    for (const auto& tok : ts->tokens)
      for (const auto& piece : split_ws(tok)) out.tokens.push_back(piece);
    return out;
  }
  if (const auto* os = std::get_if<ObjectSet>(&v)) {
    ObjectSet out;
    for (const auto& obj : os->objects) out.objects.push_back(normalize_description(obj));
    return out;
  }
  return v;
}

bool values_equal(const Value& a, const Value& b) {
  return normalize_output(a) == normalize_output(b);
}

bool renders_multiline(const Value& v) { return std::holds_alternative<IntGrid>(v); }

std::string render_value(const Value& v) {
  struct Renderer {
    std::string operator()(const TokenSeq& ts) const {
      std::string out;
      for (size_t i = 0; i < ts.tokens.size(); ++i) {
        if (i) out += ' ';
        out += ts.tokens[i];
      }
      return out;
    }
    std::string operator()(const IntList& l) const {
      std::string out = "[";
      for (size_t i = 0; i < l.items.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(l.items[i]);
      }
      return out + "]";
    }
    std::string operator()(const IntGrid& g) const {
      std::string out;
      for (size_t r = 0; r < g.rows.size(); ++r) {
        if (r) out += '\n';
        out += '[';
        for (size_t c = 0; c < g.rows[r].size(); ++c) {
          if (c) out += ", ";
          out += std::to_string(g.rows[r][c]);
        }
        out += ']';
      }
      return out;
    }
    std::string operator()(Label l) const { return label_name(l); }
    std::string operator()(const ObjectSet& os) const {
      std::string out;
      for (size_t i = 0; i < os.objects.size(); ++i) {
        if (i) out += ", ";
        out += os.objects[i];
      }
      return out;
    }
  };
  return std::visit(Renderer{}, v);
}

Value parse_value(const std::string& text, TaskKind kind, ValueSide side) {
  switch (kind) {
    case TaskKind::listfn:
      return parse_int_list(text);
    case TaskKind::miniarc:
      return parse_int_grid(text);
    case TaskKind::miniscan: {
      TokenSeq ts{split_ws(text)};
      if (ts.tokens.empty()) throw FormatError("empty token sequence", 0);
      return ts;
    }
    case TaskKind::acre: {
      if (side == ValueSide::output) {
        auto l = label_from_text(text);
        if (!l) throw FormatError("not a label (on/off/undetermined): " + trim(text), 0);
        return *l;
      }
      ObjectSet os;
      size_t start = 0;
      while (start <= text.size()) {
        size_t comma = text.find(',', start);
        std::string piece =
            trim(comma == std::string::npos ? text.substr(start) : text.substr(start, comma - start));
        if (piece.empty()) {
          if (comma == std::string::npos) break;
          throw FormatError("empty object description", start);
        }
        os.objects.push_back(piece);
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      if (os.objects.empty()) throw FormatError("empty object set", 0);
      return os;
    }
  }
  throw FormatError("unreachable kind");
}

}  // namespace inductor
