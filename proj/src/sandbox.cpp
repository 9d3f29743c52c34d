#include "inductor/sandbox.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <memory>
#include <set>

namespace inductor::sandbox {

namespace {

// ---------------------------------------------------------------- lexer

struct Token {
  enum class Kind { Int, Ident, Punct, End };
  Kind kind;
  std::string text;
  long long int_value = 0;
  size_t pos = 0;
};

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  size_t i = 0;
  auto two = [&](char a, char b) {
    return i + 1 < src.size() && src[i] == a && src[i + 1] == b;
  };
  while (i < src.size()) {
    unsigned char c = static_cast<unsigned char>(src[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (std::isdigit(c)) {
      size_t start = i;
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
      Token t{Token::Kind::Int, src.substr(start, i - start), 0, start};
      t.int_value = std::stoll(t.text);
      out.push_back(t);
      continue;
    }
    if (std::isalpha(c) || c == '_') {
      size_t start = i;
      while (i < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_'))
        ++i;
      out.push_back({Token::Kind::Ident, src.substr(start, i - start), 0, start});
      continue;
    }
    if (two('=', '=') || two('!', '=') || two('<', '=') || two('>', '=')) {
      out.push_back({Token::Kind::Punct, src.substr(i, 2), 0, i});
      i += 2;
      continue;
    }
    if (std::string("()+-*/<>,").find(src[i]) != std::string::npos) {
      out.push_back({Token::Kind::Punct, std::string(1, src[i]), 0, i});
      ++i;
      continue;
    }
    throw ParseError(std::string("unexpected character '") + src[i] + "'", i);
  }
  out.push_back({Token::Kind::End, "", 0, src.size()});
  return out;
}

// ---------------------------------------------------------------- values

struct SbValue;
using SbList = std::vector<SbValue>;

struct EnvNode;
using EnvPtr = std::shared_ptr<const EnvNode>;

struct Closure {
  std::string param;
  ExprPtr body;
  EnvPtr env;
};

struct SbValue {
  std::variant<long long, bool, SbList, IntGrid, Closure> v;
};

struct EnvNode {
  std::string name;
  SbValue value;
  EnvPtr next;
};

const SbValue* env_lookup(const EnvPtr& env, const std::string& name) {
  for (const EnvNode* n = env.get(); n; n = n->next.get())
    if (n->name == name) return &n->value;
  return nullptr;
}

const char* type_name(const SbValue& v) {
  switch (v.v.index()) {
    case 0: return "int";
    case 1: return "bool";
    case 2: return "list";
    case 3: return "grid";
    case 4: return "function";
  }
  return "?";
}

bool sb_equal(const SbValue& a, const SbValue& b) {
  if (a.v.index() != b.v.index()) return false;
  switch (a.v.index()) {
    case 0: return std::get<long long>(a.v) == std::get<long long>(b.v);
    case 1: return std::get<bool>(a.v) == std::get<bool>(b.v);
    case 2: {
      const auto& la = std::get<SbList>(a.v);
      const auto& lb = std::get<SbList>(b.v);
      if (la.size() != lb.size()) return false;
      for (size_t i = 0; i < la.size(); ++i)
        if (!sb_equal(la[i], lb[i])) return false;
      return true;
    }
    case 3: return std::get<IntGrid>(a.v) == std::get<IntGrid>(b.v);
    default: return false;  // closures never compare equal
  }
}

// ---------------------------------------------------------------- builtins

struct Builtin {
  int arity;
};

const std::map<std::string, Builtin>& builtin_table() {
  static const std::map<std::string, Builtin> table = {
      {"head", {1}},        {"tail", {1}},        {"last", {1}},
      {"init", {1}},        {"len", {1}},         {"reverse", {1}},
      {"sort", {1}},        {"unique", {1}},      {"concat", {2}},
      {"append", {2}},      {"slice", {3}},       {"index", {2}},
      {"map", {2}},         {"filter", {2}},      {"count", {2}},
      {"contains", {2}},    {"remove_all", {2}},  {"replace", {3}},
      {"repeat", {2}},      {"range", {2}},       {"sum", {1}},
      {"min", {1}},         {"max", {1}},         {"flatten", {1}},
      {"dims", {1}},        {"row", {2}},         {"col", {2}},
      {"cell", {3}},        {"set_cell", {4}},    {"transpose", {1}},
      {"rotate90", {1}},    {"flip_h", {1}},      {"flip_v", {1}},
      {"crop", {5}},        {"pad", {4}},         {"map_cells", {2}},
      {"count_color", {2}}, {"recolor", {3}},     {"translate", {4}},
      {"overlay", {3}},     {"rows_as_lists", {1}}, {"grid_from_rows", {1}},
  };
  return table;
}

// ---------------------------------------------------------------- parser

class Parser {
 public:
  Parser(const std::string& src) : toks_(lex(src)) {}

  Program parse() {
    Program p;
    std::set<std::string> scope;
    p.ast = parse_expr(scope);
    expect_end();
    p.uses_list_input = uses_xs_;
    p.uses_grid_input = uses_g_;
    return p;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& advance() { return toks_[pos_++]; }

  bool at_punct(const std::string& s) const {
    return peek().kind == Token::Kind::Punct && peek().text == s;
  }
  bool at_ident(const std::string& s) const {
    return peek().kind == Token::Kind::Ident && peek().text == s;
  }
  void expect_punct(const std::string& s) {
    if (!at_punct(s)) throw ParseError("expected '" + s + "'", peek().pos);
    advance();
  }
  void expect_end() {
    if (peek().kind != Token::Kind::End)
      throw ParseError("unexpected trailing content", peek().pos);
  }

  static ExprPtr make(Expr e) { return std::make_shared<Expr>(std::move(e)); }

  ExprPtr parse_expr(std::set<std::string>& scope) {
    if (at_ident("if")) {
      advance();
      Expr e;
      e.kind = Expr::Kind::If;
      e.args.push_back(parse_expr(scope));
      if (!at_ident("then")) throw ParseError("expected 'then'", peek().pos);
      advance();
      e.args.push_back(parse_expr(scope));
      if (!at_ident("else")) throw ParseError("expected 'else'", peek().pos);
      advance();
      e.args.push_back(parse_expr(scope));
      return make(std::move(e));
    }
    if (at_ident("fn")) {
      advance();
      expect_punct("(");
      if (peek().kind != Token::Kind::Ident)
        throw ParseError("expected parameter name", peek().pos);
      std::string param = advance().text;
      expect_punct(")");
      bool fresh = scope.insert(param).second;
      Expr e;
      e.kind = Expr::Kind::Lambda;
      e.name = param;
      e.args.push_back(parse_expr(scope));
      if (fresh) scope.erase(param);
      return make(std::move(e));
    }
    return parse_or(scope);
  }

  ExprPtr parse_or(std::set<std::string>& scope) {
    ExprPtr lhs = parse_and(scope);
    while (at_ident("or")) {
      advance();
      Expr e;
      e.kind = Expr::Kind::Binary;
      e.name = "or";
      e.args = {lhs, parse_and(scope)};
      lhs = make(std::move(e));
    }
    return lhs;
  }

  ExprPtr parse_and(std::set<std::string>& scope) {
    ExprPtr lhs = parse_not(scope);
    while (at_ident("and")) {
      advance();
      Expr e;
      e.kind = Expr::Kind::Binary;
      e.name = "and";
      e.args = {lhs, parse_not(scope)};
      lhs = make(std::move(e));
    }
    return lhs;
  }

  ExprPtr parse_not(std::set<std::string>& scope) {
    if (at_ident("not")) {
      advance();
      Expr e;
      e.kind = Expr::Kind::Unary;
      e.name = "not";
      e.args.push_back(parse_not(scope));
      return make(std::move(e));
    }
    return parse_cmp(scope);
  }

  ExprPtr parse_cmp(std::set<std::string>& scope) {
    ExprPtr lhs = parse_add(scope);
    static const std::set<std::string> ops = {"==", "!=", "<", "<=", ">", ">="};
    if (peek().kind == Token::Kind::Punct && ops.count(peek().text)) {
      std::string op = advance().text;
      Expr e;
      e.kind = Expr::Kind::Binary;
      e.name = op;
      e.args = {lhs, parse_add(scope)};
      return make(std::move(e));
    }
    return lhs;
  }

  ExprPtr parse_add(std::set<std::string>& scope) {
    ExprPtr lhs = parse_mul(scope);
    while (at_punct("+") || at_punct("-")) {
      std::string op = advance().text;
      Expr e;
      e.kind = Expr::Kind::Binary;
      e.name = op;
      e.args = {lhs, parse_mul(scope)};
      lhs = make(std::move(e));
    }
    return lhs;
  }

  ExprPtr parse_mul(std::set<std::string>& scope) {
    ExprPtr lhs = parse_unary(scope);
    while (at_punct("*") || at_punct("/") || at_ident("mod")) {
      std::string op = advance().text;
      Expr e;
      e.kind = Expr::Kind::Binary;
      e.name = op;
      e.args = {lhs, parse_unary(scope)};
      lhs = make(std::move(e));
    }
    return lhs;
  }

  ExprPtr parse_unary(std::set<std::string>& scope) {
    if (at_punct("-")) {
      size_t pos = advance().pos;
      Expr e;
      e.kind = Expr::Kind::Unary;
      e.name = "-";
      e.args.push_back(parse_unary(scope));
      (void)pos;
      return make(std::move(e));
    }
    return parse_primary(scope);
  }

  ExprPtr parse_primary(std::set<std::string>& scope) {
    const Token& t = peek();
    if (t.kind == Token::Kind::Int) {
      advance();
      Expr e;
      e.kind = Expr::Kind::IntLit;
      e.int_value = t.int_value;
      return make(std::move(e));
    }
    if (t.kind == Token::Kind::Ident) {
      if (t.text == "true" || t.text == "false") {
        advance();
        Expr e;
        e.kind = Expr::Kind::BoolLit;
        e.bool_value = t.text == "true";
        return make(std::move(e));
      }
      std::string name = advance().text;
      if (at_punct("(")) {
        auto bt = builtin_table().find(name);
        if (bt == builtin_table().end())
          throw ParseError("unknown function '" + name + "'", t.pos);
        advance();
        Expr e;
        e.kind = Expr::Kind::Call;
        e.name = name;
        if (!at_punct(")")) {
          e.args.push_back(parse_expr(scope));
          while (at_punct(",")) {
            advance();
            e.args.push_back(parse_expr(scope));
          }
        }
        expect_punct(")");
        if (static_cast<int>(e.args.size()) != bt->second.arity)
          throw ParseError("'" + name + "' expects " + std::to_string(bt->second.arity) +
                               " arguments, got " + std::to_string(e.args.size()),
                           t.pos);
        return make(std::move(e));
      }
      if (name == "xs") {
        uses_xs_ = true;
      } else if (name == "g") {
        uses_g_ = true;
      } else if (!scope.count(name)) {
        throw ParseError("unknown identifier '" + name + "'", t.pos);
      }
      Expr e;
      e.kind = Expr::Kind::Var;
      e.name = name;
      return make(std::move(e));
    }
    if (at_punct("(")) {
      advance();
      ExprPtr inner = parse_expr(scope);
      expect_punct(")");
      return inner;
    }
    throw ParseError("expected expression", t.pos);
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
  bool uses_xs_ = false;
  bool uses_g_ = false;
};

// ---------------------------------------------------------------- evaluator

class Evaluator {
 public:
  explicit Evaluator(const Limits& limits) : limits_(limits) {}

  SbValue eval(const Expr& e, const EnvPtr& env, int depth) {
    if (++steps_ > limits_.max_steps) throw EvalError("step limit exceeded");
    if (depth > limits_.max_depth) throw EvalError("depth limit exceeded");
    switch (e.kind) {
      case Expr::Kind::IntLit:
        return {e.int_value};
      case Expr::Kind::BoolLit:
        return {e.bool_value};
      case Expr::Kind::Var: {
        const SbValue* v = env_lookup(env, e.name);
        if (!v) throw EvalError("unbound variable '" + e.name + "'");
        return *v;
      }
      case Expr::Kind::Unary: {
        SbValue v = eval(*e.args[0], env, depth + 1);
        if (e.name == "-") return {-as_int(v, "unary '-'")};
        return {!as_bool(v, "'not'")};
      }
      case Expr::Kind::Binary:
        return eval_binary(e, env, depth);
      case Expr::Kind::If: {
        bool c = as_bool(eval(*e.args[0], env, depth + 1), "'if' condition");
        return eval(*e.args[c ? 1 : 2], env, depth + 1);
      }
      case Expr::Kind::Lambda:
        return {Closure{e.name, e.args[0], env}};
      case Expr::Kind::Call:
        return eval_call(e, env, depth);
    }
    throw EvalError("unreachable");
  }

 private:
  SbValue eval_binary(const Expr& e, const EnvPtr& env, int depth) {
    const std::string& op = e.name;
    if (op == "and") {
      // short-circuit
      if (!as_bool(eval(*e.args[0], env, depth + 1), "'and'")) return {false};
      return {as_bool(eval(*e.args[1], env, depth + 1), "'and'")};
    }
    if (op == "or") {
      if (as_bool(eval(*e.args[0], env, depth + 1), "'or'")) return {true};
      return {as_bool(eval(*e.args[1], env, depth + 1), "'or'")};
    }
    SbValue a = eval(*e.args[0], env, depth + 1);
    SbValue b = eval(*e.args[1], env, depth + 1);
    if (op == "==") return {sb_equal(a, b)};
    if (op == "!=") return {!sb_equal(a, b)};
    long long x = as_int(a, "'" + op + "'");
    long long y = as_int(b, "'" + op + "'");
    if (op == "+") return {x + y};
    if (op == "-") return {x - y};
    if (op == "*") return {x * y};
    if (op == "/") {
      if (y == 0) throw EvalError("division by zero");
      return {x / y};  // toward zero
    }
    if (op == "mod") {
      if (y == 0) throw EvalError("modulo by zero");
      return {x % y};
    }
    if (op == "<") return {x < y};
    if (op == "<=") return {x <= y};
    if (op == ">") return {x > y};
    if (op == ">=") return {x >= y};
    throw EvalError("unknown operator " + op);
  }

  long long as_int(const SbValue& v, const std::string& what) {
    if (const auto* p = std::get_if<long long>(&v.v)) return *p;
    throw EvalError(what + ": expected int, got " + type_name(v));
  }
  bool as_bool(const SbValue& v, const std::string& what) {
    if (const auto* p = std::get_if<bool>(&v.v)) return *p;
    throw EvalError(what + ": expected bool, got " + type_name(v));
  }
  const SbList& as_list(const SbValue& v, const std::string& what) {
    if (const auto* p = std::get_if<SbList>(&v.v)) return *p;
    throw EvalError(what + ": expected list, got " + type_name(v));
  }
  const IntGrid& as_grid(const SbValue& v, const std::string& what) {
    if (const auto* p = std::get_if<IntGrid>(&v.v)) return *p;
    throw EvalError(what + ": expected grid, got " + type_name(v));
  }
  const Closure& as_fn(const SbValue& v, const std::string& what) {
    if (const auto* p = std::get_if<Closure>(&v.v)) return *p;
    throw EvalError(what + ": expected function, got " + type_name(v));
  }

  SbValue call_closure(const Closure& c, SbValue arg, int depth) {
    auto env = std::make_shared<EnvNode>(EnvNode{c.param, std::move(arg), c.env});
    return eval(*c.body, env, depth + 1);
  }

  void check_list_size(size_t n, const std::string& what) {
    if (static_cast<long long>(n) > limits_.max_output_cells)
      throw EvalError(what + ": output size limit exceeded");
  }
  int check_cell(long long v, const std::string& what) {
    if (v < 0 || v > 9)
      throw EvalError(what + ": cell value " + std::to_string(v) + " outside 0-9");
    return static_cast<int>(v);
  }
  void check_grid_size(long long h, long long w, const std::string& what) {
    if (h < 1 || w < 1) throw EvalError(what + ": grid must be at least 1x1");
    if (h * w > limits_.max_output_cells)
      throw EvalError(what + ": output size limit exceeded");
  }

  SbValue eval_call(const Expr& e, const EnvPtr& env, int depth) {
    const std::string& f = e.name;
    std::vector<SbValue> a;
    a.reserve(e.args.size());
    for (const auto& arg : e.args) a.push_back(eval(*arg, env, depth + 1));

    auto list_arg = [&](size_t i) -> const SbList& { return as_list(a[i], "'" + f + "'"); };
    auto int_arg = [&](size_t i) { return as_int(a[i], "'" + f + "'"); };
    auto grid_arg = [&](size_t i) -> const IntGrid& { return as_grid(a[i], "'" + f + "'"); };

    // --- list builtins
    if (f == "head") {
      const auto& l = list_arg(0);
      if (l.empty()) throw EvalError("'head' of empty list");
      return l.front();
    }
    if (f == "tail") {
      const auto& l = list_arg(0);
      if (l.empty()) throw EvalError("'tail' of empty list");
      return {SbList(l.begin() + 1, l.end())};
    }
    if (f == "last") {
      const auto& l = list_arg(0);
      if (l.empty()) throw EvalError("'last' of empty list");
      return l.back();
    }
    if (f == "init") {
      const auto& l = list_arg(0);
      if (l.empty()) throw EvalError("'init' of empty list");
      return {SbList(l.begin(), l.end() - 1)};
    }
    if (f == "len") return {static_cast<long long>(list_arg(0).size())};
    if (f == "reverse") {
      SbList l = list_arg(0);
      std::reverse(l.begin(), l.end());
      return {std::move(l)};
    }
    if (f == "sort") {
      const auto& l = list_arg(0);
      std::vector<long long> ints;
      ints.reserve(l.size());
      for (const auto& v : l) ints.push_back(as_int(v, "'sort' element"));
      std::sort(ints.begin(), ints.end());
      SbList out;
      for (long long v : ints) out.push_back({v});
      return {std::move(out)};
    }
    if (f == "unique") {
      const auto& l = list_arg(0);
      SbList out;
      for (const auto& v : l) {
        bool seen = false;
        for (const auto& u : out) seen = seen || sb_equal(u, v);
        if (!seen) out.push_back(v);
      }
      return {std::move(out)};
    }
    if (f == "concat") {
      SbList out = list_arg(0);
      const auto& b = list_arg(1);
      check_list_size(out.size() + b.size(), f);
      out.insert(out.end(), b.begin(), b.end());
      return {std::move(out)};
    }
    if (f == "append") {
      SbList out = list_arg(0);
      check_list_size(out.size() + 1, f);
      out.push_back(a[1]);
      return {std::move(out)};
    }
    if (f == "slice") {
      const auto& l = list_arg(0);
      long long i = int_arg(1), j = int_arg(2);
      if (i < 0 || j < 0) throw EvalError("'slice': negative index");
      i = std::min<long long>(i, static_cast<long long>(l.size()));
      j = std::min<long long>(j, static_cast<long long>(l.size()));
      if (j < i) j = i;
      return {SbList(l.begin() + i, l.begin() + j)};
    }
    if (f == "index") {
      const auto& l = list_arg(0);
      long long i = int_arg(1);
      if (i < 0 || i >= static_cast<long long>(l.size()))
        throw EvalError("'index': out of bounds (" + std::to_string(i) + " of " +
                        std::to_string(l.size()) + ")");
      return l[static_cast<size_t>(i)];
    }
    if (f == "map") {
      const auto& l = list_arg(0);
      const auto& fn = as_fn(a[1], "'map'");
      SbList out;
      out.reserve(l.size());
      for (const auto& v : l) out.push_back(call_closure(fn, v, depth));
      return {std::move(out)};
    }
    if (f == "filter") {
      const auto& l = list_arg(0);
      const auto& fn = as_fn(a[1], "'filter'");
      SbList out;
      for (const auto& v : l)
        if (as_bool(call_closure(fn, v, depth), "'filter' predicate")) out.push_back(v);
      return {std::move(out)};
    }
    if (f == "count") {
      long long n = 0;
      for (const auto& v : list_arg(0)) n += sb_equal(v, a[1]);
      return {n};
    }
    if (f == "contains") {
      for (const auto& v : list_arg(0))
        if (sb_equal(v, a[1])) return {true};
      return {false};
    }
    if (f == "remove_all") {
      SbList out;
      for (const auto& v : list_arg(0))
        if (!sb_equal(v, a[1])) out.push_back(v);
      return {std::move(out)};
    }
    if (f == "replace") {
      SbList out = list_arg(0);
      for (auto& v : out)
        if (sb_equal(v, a[1])) v = a[2];
      return {std::move(out)};
    }
    if (f == "repeat") {
      long long n = int_arg(1);
      if (n < 0) throw EvalError("'repeat': negative count");
      check_list_size(static_cast<size_t>(n), f);
      return {SbList(static_cast<size_t>(n), a[0])};
    }
    if (f == "range") {
      long long lo = int_arg(0), hi = int_arg(1);
      SbList out;
      if (lo < hi) {
        check_list_size(static_cast<size_t>(hi - lo), f);
        for (long long v = lo; v < hi; ++v) out.push_back({v});
      }
      return {std::move(out)};
    }
    if (f == "sum") {
      long long total = 0;
      for (const auto& v : list_arg(0)) total += as_int(v, "'sum' element");
      return {total};
    }
    if (f == "min" || f == "max") {
      const auto& l = list_arg(0);
      if (l.empty()) throw EvalError("'" + f + "' of empty list");
      long long best = as_int(l[0], "'" + f + "' element");
      for (const auto& v : l) {
        long long x = as_int(v, "'" + f + "' element");
        best = f == "min" ? std::min(best, x) : std::max(best, x);
      }
      return {best};
    }
    if (f == "flatten") {
      SbList out;
      for (const auto& v : list_arg(0)) {
        const auto& inner = as_list(v, "'flatten' element");
        check_list_size(out.size() + inner.size(), f);
        out.insert(out.end(), inner.begin(), inner.end());
      }
      return {std::move(out)};
    }

    // --- grid builtins
    if (f == "dims") {
      const auto& g = grid_arg(0);
      return {SbList{{static_cast<long long>(g.height())}, {static_cast<long long>(g.width())}}};
    }
    if (f == "row" || f == "col") {
      const auto& g = grid_arg(0);
      long long i = int_arg(1);
      long long bound = f == "row" ? static_cast<long long>(g.height())
                                   : static_cast<long long>(g.width());
      if (i < 0 || i >= bound) throw EvalError("'" + f + "': index out of bounds");
      SbList out;
      if (f == "row") {
        for (int v : g.rows[static_cast<size_t>(i)]) out.push_back({static_cast<long long>(v)});
      } else {
        for (const auto& r : g.rows) out.push_back({static_cast<long long>(r[static_cast<size_t>(i)])});
      }
      return {std::move(out)};
    }
    if (f == "cell") {
      const auto& g = grid_arg(0);
      long long r = int_arg(1), c = int_arg(2);
      if (r < 0 || c < 0 || r >= static_cast<long long>(g.height()) ||
          c >= static_cast<long long>(g.width()))
        throw EvalError("'cell': index out of bounds");
      return {static_cast<long long>(g.rows[static_cast<size_t>(r)][static_cast<size_t>(c)])};
    }
    if (f == "set_cell") {
      IntGrid g = grid_arg(0);
      long long r = int_arg(1), c = int_arg(2);
      int v = check_cell(int_arg(3), f);
      if (r < 0 || c < 0 || r >= static_cast<long long>(g.height()) ||
          c >= static_cast<long long>(g.width()))
        throw EvalError("'set_cell': index out of bounds");
      g.rows[static_cast<size_t>(r)][static_cast<size_t>(c)] = v;
      return {std::move(g)};
    }
    if (f == "transpose" || f == "rotate90") {
      const auto& g = grid_arg(0);
      size_t h = g.height(), w = g.width();
      IntGrid out;
      out.rows.assign(w, std::vector<int>(h, 0));
      for (size_t r = 0; r < h; ++r)
        for (size_t c = 0; c < w; ++c) {
          // rotate90 is clockwise
          if (f == "transpose")
            out.rows[c][r] = g.rows[r][c];
          else
            out.rows[c][h - 1 - r] = g.rows[r][c];
        }
      return {std::move(out)};
    }
    if (f == "flip_h") {
      IntGrid g = grid_arg(0);
      for (auto& r : g.rows) std::reverse(r.begin(), r.end());
      return {std::move(g)};
    }
    if (f == "flip_v") {
      IntGrid g = grid_arg(0);
      std::reverse(g.rows.begin(), g.rows.end());
      return {std::move(g)};
    }
    if (f == "crop") {
      const auto& g = grid_arg(0);
      long long r0 = int_arg(1), c0 = int_arg(2), h = int_arg(3), w = int_arg(4);
      if (h < 1 || w < 1) throw EvalError("'crop': size must be at least 1x1");
      if (r0 < 0 || c0 < 0 || r0 + h > static_cast<long long>(g.height()) ||
          c0 + w > static_cast<long long>(g.width()))
        throw EvalError("'crop': region out of bounds");
      IntGrid out;
      for (long long r = r0; r < r0 + h; ++r)
        out.rows.emplace_back(g.rows[static_cast<size_t>(r)].begin() + c0,
                              g.rows[static_cast<size_t>(r)].begin() + c0 + w);
      return {std::move(out)};
    }
    if (f == "pad") {
      const auto& g = grid_arg(0);
      long long h = int_arg(1), w = int_arg(2);
      int fill = check_cell(int_arg(3), f);
      if (h < static_cast<long long>(g.height()) || w < static_cast<long long>(g.width()))
        throw EvalError("'pad': target smaller than grid");
      check_grid_size(h, w, f);
      IntGrid out;
      out.rows.assign(static_cast<size_t>(h), std::vector<int>(static_cast<size_t>(w), fill));
      for (size_t r = 0; r < g.height(); ++r)
        for (size_t c = 0; c < g.width(); ++c) out.rows[r][c] = g.rows[r][c];
      return {std::move(out)};
    }
    if (f == "map_cells") {
      IntGrid g = grid_arg(0);
      const auto& fn = as_fn(a[1], "'map_cells'");
      for (auto& row : g.rows)
        for (int& cellv : row)
          cellv = check_cell(
              as_int(call_closure(fn, {static_cast<long long>(cellv)}, depth), "'map_cells' result"),
              f);
      return {std::move(g)};
    }
    if (f == "count_color") {
      long long v = int_arg(1), n = 0;
      for (const auto& row : grid_arg(0).rows)
        for (int cellv : row) n += cellv == v;
      return {n};
    }
    if (f == "recolor") {
      IntGrid g = grid_arg(0);
      long long from = int_arg(1);
      int to = check_cell(int_arg(2), f);
      for (auto& row : g.rows)
        for (int& cellv : row)
          if (cellv == from) cellv = to;
      return {std::move(g)};
    }
    if (f == "translate") {
      const auto& g = grid_arg(0);
      long long dr = int_arg(1), dc = int_arg(2);
      int fill = check_cell(int_arg(3), f);
      long long h = static_cast<long long>(g.height()), w = static_cast<long long>(g.width());
      IntGrid out;
      out.rows.assign(static_cast<size_t>(h), std::vector<int>(static_cast<size_t>(w), fill));
      for (long long r = 0; r < h; ++r)
        for (long long c = 0; c < w; ++c) {
          long long nr = r + dr, nc = c + dc;
          if (nr >= 0 && nr < h && nc >= 0 && nc < w)
            out.rows[static_cast<size_t>(nr)][static_cast<size_t>(nc)] =
                g.rows[static_cast<size_t>(r)][static_cast<size_t>(c)];
        }
      return {std::move(out)};
    }
    if (f == "overlay") {
      const auto& base = grid_arg(0);
      const auto& top = grid_arg(1);
      long long transparent = int_arg(2);
      if (base.height() != top.height() || base.width() != top.width())
        throw EvalError("'overlay': grids have different dimensions");
      IntGrid out = base;
      for (size_t r = 0; r < top.height(); ++r)
        for (size_t c = 0; c < top.width(); ++c)
          if (top.rows[r][c] != transparent) out.rows[r][c] = top.rows[r][c];
      return {std::move(out)};
    }
    if (f == "rows_as_lists") {
      SbList out;
      for (const auto& row : grid_arg(0).rows) {
        SbList cells;
        for (int v : row) cells.push_back({static_cast<long long>(v)});
        out.push_back({std::move(cells)});
      }
      return {std::move(out)};
    }
    if (f == "grid_from_rows") {
      const auto& l = list_arg(0);
      if (l.empty()) throw EvalError("'grid_from_rows': empty row list");
      IntGrid out;
      long long cells = 0;
      for (const auto& rowv : l) {
        const auto& row = as_list(rowv, "'grid_from_rows' row");
        if (row.empty()) throw EvalError("'grid_from_rows': empty row");
        if (!out.rows.empty() && row.size() != out.rows.front().size())
          throw EvalError("'grid_from_rows': rows have unequal lengths");
        std::vector<int> cellsv;
        for (const auto& v : row)
          cellsv.push_back(check_cell(as_int(v, "'grid_from_rows' cell"), f));
        cells += static_cast<long long>(cellsv.size());
        if (cells > limits_.max_output_cells)
          throw EvalError("'grid_from_rows': output size limit exceeded");
        out.rows.push_back(std::move(cellsv));
      }
      return {std::move(out)};
    }
    throw EvalError("unknown builtin " + f);
  }

  Limits limits_;
  long long steps_ = 0;
};

}  // namespace

Program parse_program(const std::string& source) {
  if (source.find_first_not_of(" \t\r\n") == std::string::npos)
    throw ParseError("empty program", 0);
  Parser parser(source);
  Program p = parser.parse();
  p.source = source;
  return p;
}

Value eval_program(const Program& p, const Value& input, const Limits& limits) {
  Evaluator ev(limits);
  EnvPtr env;
  if (const auto* l = std::get_if<IntList>(&input)) {
    if (p.uses_grid_input) throw EvalError("program reads 'g' but input is a list");
    SbList xs;
    xs.reserve(l->items.size());
    for (long long v : l->items) xs.push_back({v});
    env = std::make_shared<EnvNode>(EnvNode{"xs", {std::move(xs)}, nullptr});
  } else if (const auto* g = std::get_if<IntGrid>(&input)) {
    if (p.uses_list_input) throw EvalError("program reads 'xs' but input is a grid");
    env = std::make_shared<EnvNode>(EnvNode{"g", {*g}, nullptr});
  } else {
    throw EvalError("input must be a list or a grid");
  }
  SbValue result = ev.eval(*p.ast, env, 0);
  if (const auto* g = std::get_if<IntGrid>(&result.v)) {
    check_grid(*g);
    return *g;
  }
  if (const auto* l = std::get_if<SbList>(&result.v)) {
    IntList out;
    for (const auto& v : *l) {
      const auto* i = std::get_if<long long>(&v.v);
      if (!i) throw EvalError("result list contains a non-integer element");
      out.items.push_back(*i);
    }
    return out;
  }
  throw EvalError("result is not a list or a grid");
}

const std::string& language_reference() {
  static const std::string ref = R"(The program is a single expression over one input variable:
`xs` (a list of integers) for list tasks, or `g` (a 2D grid of integers 0-9)
for grid tasks. The expression evaluates to the output list or grid.

Expression forms:
  - Integer literals: 0, 42, -7 (integer arithmetic only, division truncates
    toward zero; division or modulo by zero is an error).
  - Arithmetic: + - * / mod. Comparisons: == != < <= > >=. Booleans: and, or,
    not, true, false.
  - Conditionals: if <cond> then <a> else <b>.
  - Anonymous functions of one argument: fn(v) <body>, used as arguments to
    map, filter, and map_cells. Functions cannot call themselves.

List builtins (lists are 0-indexed; indices must be non-negative):
  head(l), tail(l), last(l), init(l), len(l), reverse(l), sort(l), unique(l),
  concat(a, b), append(l, v), slice(l, i, j)  -- half-open [i, j), clamped,
  index(l, i), map(l, fn), filter(l, fn), count(l, v), contains(l, v),
  remove_all(l, v), replace(l, a, b), repeat(v, n), range(a, b) -- [a, b),
  sum(l), min(l), max(l), flatten(l).

Grid builtins (cells are integers 0-9; rows/cols are 0-indexed):
  dims(g) -- [height, width], row(g, r), col(g, c), cell(g, r, c),
  set_cell(g, r, c, v), transpose(g), rotate90(g) -- clockwise,
  flip_h(g) -- mirror left-right, flip_v(g) -- mirror top-bottom,
  crop(g, r0, c0, h, w), pad(g, h, w, v) -- grow to h x w filling with v,
  map_cells(g, fn), count_color(g, v), recolor(g, from, to),
  translate(g, dr, dc, fill), overlay(base, top, transparent),
  rows_as_lists(g), grid_from_rows(l).

Examples:
  slice(xs, 1, len(xs) - 2)          -- drop first element and last two
  map(xs, fn(v) v * 2)               -- double every element
  filter(xs, fn(v) v mod 2 == 0)     -- keep even elements
  recolor(flip_v(g), 3, 7)           -- mirror vertically, then repaint 3 as 7)";
  return ref;
}

}  // namespace inductor::sandbox
