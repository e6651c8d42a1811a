#include "cg/syntax/parser.hpp"

#include <cctype>
#include <optional>
#include <set>
#include <unordered_map>

#include "cg/syntax/encodings.hpp"
#include "cg/syntax/terms.hpp"
#include "cg/types/typecheck.hpp"

namespace cg {

SyntaxError::SyntaxError(std::string file, SourceLoc loc, const std::string& message)
    : std::runtime_error(file + ":" + std::to_string(loc.line) + ":" + std::to_string(loc.column) +
                         ": " + message),
      file_(std::move(file)),
      loc_(loc),
      detail_(message) {}

namespace {

enum class Tok { Int, Ident, Key, Label, Sym, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t number = 0;
  SourceLoc loc;
};

const std::set<std::string>& keywords() {
  static const std::set<std::string> words = {
      "let",  "in",   "if",    "ifz", "then", "else", "foreach", "do",   "end",
      "fix",  "emit", "claim", "len", "pi1",  "pi2",  "pi3",     "add",  "map",
      "fold", "graph", "commutative", "addRelationship", "deleteRelationship",
      "updatePayload", "queryNode", "mapVal", "foldVal"};
  return words;
}

bool is_ident_start(unsigned char c) { return std::isalpha(c) || c == '_'; }
bool is_ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c == '\''; }

class Lexer {
 public:
  Lexer(const std::string& text, const std::string& file) : src_(text), file_(file) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.loc = {line_, col_};
      if (i_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      unsigned char c = static_cast<unsigned char>(src_[i_]);
      if (std::isdigit(c)) {
        std::string digits;
        while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_])))
          digits += advance();
        t.kind = Tok::Int;
        try {
          t.number = std::stoll(digits);
        } catch (const std::out_of_range&) {
          throw SyntaxError(file_, t.loc, "integer literal out of range");
        }
      } else if (is_ident_start(c)) {
        t.kind = Tok::Ident;
        while (i_ < src_.size() && is_ident_char(static_cast<unsigned char>(src_[i_])))
          t.text += advance();
        if (i_ < src_.size() && src_[i_] == '$')
          throw SyntaxError(file_, t.loc, "'$' is reserved for generated names");
      } else if (c == '#') {
        advance();
        t.kind = Tok::Key;
        if (i_ < src_.size() && src_[i_] == '$') {
          advance();
          std::string digits;
          while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_])))
            digits += advance();
          if (digits.empty()) throw SyntaxError(file_, t.loc, "malformed generated key");
          t.text = "$";
          t.number = std::stoll(digits);
        } else {
          while (i_ < src_.size() && is_ident_char(static_cast<unsigned char>(src_[i_])))
            t.text += advance();
          if (t.text.empty()) throw SyntaxError(file_, t.loc, "empty key literal");
        }
      } else if (c == '@') {
        advance();
        std::string digits;
        while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_])))
          digits += advance();
        if (digits.empty()) throw SyntaxError(file_, t.loc, "malformed label");
        t.kind = Tok::Label;
        t.number = std::stoll(digits);
      } else if (c == '$') {
        throw SyntaxError(file_, t.loc, "'$' is reserved for generated names");
      } else if (auto sym = unicode_symbol()) {
        t = classify(*sym, t.loc);
      } else {
        t.kind = Tok::Sym;
        static const char* two[] = {"++", "--", "->", "~>", ".."};
        for (const char* s : two) {
          if (src_.compare(i_, 2, s) == 0) {
            t.text = s;
            advance();
            advance();
            break;
          }
        }
        if (t.text.empty()) {
          static const std::string singles = "()[]<>;,.:=+-*/|\\";
          if (singles.find(static_cast<char>(c)) == std::string::npos)
            throw SyntaxError(file_, t.loc, std::string("unexpected character '") +
                                                static_cast<char>(c) + "'");
          t.text = std::string(1, advance());
        }
      }
      out.push_back(std::move(t));
    }
  }

 private:
  char advance() {
    char c = src_[i_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    while (i_ < src_.size()) {
      char c = src_[i_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && i_ + 1 < src_.size() && src_[i_ + 1] == '/') {
        while (i_ < src_.size() && src_[i_] != '\n') advance();
      } else {
        return;
      }
    }
  }

  // Unicode spellings of ASCII tokens.
  std::optional<std::string> unicode_symbol() {
    static const std::pair<const char*, const char*> table[] = {
        {"λ", "\\"},  {"⇑", "emit"}, {"⇓", "claim"}, {"⊕", "++"}, {"⊖", "--"},
        {"→", "->"}, {"⟨", "<"},    {"⟩", ">"},     {"×", "*"},  {"÷", "/"},
        {"π1", "pi1"}, {"π2", "pi2"}, {"π3", "pi3"}};
    for (const auto& [utf8, ascii] : table) {
      std::size_t n = std::char_traits<char>::length(utf8);
      if (src_.compare(i_, n, utf8) == 0) {
        for (std::size_t k = 0; k < n; ++k) advance();
        return std::string(ascii);
      }
    }
    return std::nullopt;
  }

  static Token classify(const std::string& ascii, SourceLoc loc) {
    Token t;
    t.loc = loc;
    t.text = ascii;
    t.kind = std::isalpha(static_cast<unsigned char>(ascii[0])) ? Tok::Ident : Tok::Sym;
    return t;
  }

  const std::string& src_;
  const std::string& file_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// A compile-time list element: one component, or several for a tuple. Every
// component is a value or a variable, so it can be duplicated freely.
using Item = std::vector<ExprPtr>;

struct Binding {
  std::string surface;   // empty once out of sight
  std::string internal;  // name in the core term
  TypePtr type;          // null for aliases and compile-time-only lists
  ExprPtr alias;         // the name stands for this expression
  std::optional<std::int64_t> const_int;
  std::optional<std::vector<Item>> items;
};

struct PendingLet {
  std::string internal;
  TypePtr type;
  ExprPtr rhs;
  SourceLoc loc;
};

struct Pattern {
  std::vector<std::string> names;  // "_" for wildcards
  bool tuple = false;
  SourceLoc loc;
};

ExprPtr wrap_lets(ExprPtr body, const std::vector<PendingLet>& lets) {
  for (auto it = lets.rbegin(); it != lets.rend(); ++it)
    body = app(lambda(it->internal, it->type, body, false, it->loc), it->rhs, it->loc);
  return body;
}

bool is_duplicable(const Expr& e) { return e.kind == ExprKind::Var || is_value(e); }

class Parser {
 public:
  Parser(std::vector<Token> toks, std::string file) : toks_(std::move(toks)), file_(std::move(file)) {}

  Program program() {
    Program p;
    if (is_word("graph")) p.graph = graph_header();
    p.expr = seq();
    expect_end();
    return p;
  }

  ExprPtr lone_expression() {
    auto e = seq();
    expect_end();
    return e;
  }

  TypePtr lone_type() {
    auto t = type();
    expect_end();
    return t;
  }

 private:
  // ---- token helpers

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t k = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[k];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool is_sym(const char* s, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::Sym && peek(ahead).text == s;
  }
  bool is_word(const char* w, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::Ident && peek(ahead).text == w;
  }
  bool is_keyword(const Token& t) const {
    return t.kind == Tok::Ident && keywords().count(t.text) != 0;
  }
  [[noreturn]] void fail(SourceLoc loc, const std::string& msg) const {
    throw SyntaxError(file_, loc, msg);
  }
  [[noreturn]] void fail_here(const std::string& msg) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + describe(t) + "'";
    fail(t.loc, msg + ", found " + found);
  }
  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Tok::Int:
        return std::to_string(t.number);
      case Tok::Key:
        return "#" + t.text;
      case Tok::Label:
        return "@" + std::to_string(t.number);
      default:
        return t.text;
    }
  }
  SourceLoc expect_sym(const char* s) {
    if (!is_sym(s)) fail_here(std::string("expected '") + s + "'");
    return next().loc;
  }
  SourceLoc expect_word(const char* w) {
    if (!is_word(w)) fail_here(std::string("expected '") + w + "'");
    return next().loc;
  }
  void expect_end() {
    if (peek().kind != Tok::End) fail_here("expected end of input");
  }
  std::string identifier(const char* what) {
    const Token& t = peek();
    if (t.kind != Tok::Ident || is_keyword(t)) fail_here(std::string("expected ") + what);
    return next().text;
  }

  // Index of the token closing the bracket opened at `open`, and whether a
  // given separator occurs at depth zero in between.
  std::size_t matching(std::size_t open, const char* separator, bool* found) const {
    int depth = 0;
    for (std::size_t k = open; k < toks_.size(); ++k) {
      const Token& t = toks_[k];
      if (t.kind == Tok::End) break;
      if (t.kind != Tok::Sym) continue;
      const std::string& s = t.text;
      if (s == "(" || s == "[" || s == "<") {
        ++depth;
      } else if (s == ")" || s == "]" || s == ">") {
        if (--depth == 0) return k;
      } else if (depth == 1 && separator && s == separator && found) {
        *found = true;
      }
    }
    fail(toks_[open].loc, "unbalanced '" + toks_[open].text + "'");
  }

  // ---- scope

  TypingEnv env() const {
    TypingEnv e;
    for (const auto& b : scope_)
      if (b.type) e.bind(b.internal, b.type);
    return e;
  }

  Typed type_here(const ExprPtr& e) const { return type_of_expr(env(), e); }

  std::string internal_for(const std::string& surface) {
    bool taken = false;
    for (const auto& b : scope_) taken = taken || b.internal == surface;
    if (!taken) return surface;
    return "$" + surface + "_" + std::to_string(counter_++);
  }

  std::string hidden_name() { return "$u" + std::to_string(counter_++); }

  const Binding* lookup(const std::string& surface) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->surface == surface) return &*it;
    return nullptr;
  }

  ExprPtr resolve(const std::string& surface, SourceLoc loc) const {
    const Binding* b = lookup(surface);
    if (!b) fail(loc, "unbound name '" + surface + "'");
    if (b->alias) return b->alias;
    if (!b->type) fail(loc, "'" + surface + "' is a compile-time list and has no runtime value");
    return var(b->internal, loc);
  }

  // Binds a let and records what is known about its value at compile time.
  void bind_let(const std::string& surface, const ExprPtr& rhs, SourceLoc loc,
                std::vector<PendingLet>& lets) {
    Typed t = type_here(rhs);
    Binding b;
    b.surface = surface == "_" ? "" : surface;
    b.internal = surface == "_" ? hidden_name() : internal_for(surface);
    b.type = t.type;
    if (rhs->kind == ExprKind::Int) b.const_int = rhs->number;
    if (rhs->kind == ExprKind::KeyList) {
      bool all = true;
      for (const auto& k : rhs->kids) all = all && is_duplicable(*k);
      if (all) {
        std::vector<Item> items;
        for (const auto& k : rhs->kids) items.push_back({k});
        b.items = std::move(items);
      }
    }
    lets.push_back(PendingLet{b.internal, t.type, rhs, loc});
    scope_.push_back(std::move(b));
  }

  void bind_pattern(const Pattern& p, const Item& item) {
    if (!p.tuple) {
      if (item.size() != 1)
        fail(p.loc, "pattern binds one name but the element has " + std::to_string(item.size()) +
                        " components");
    } else if (p.names.size() != item.size()) {
      fail(p.loc, "tuple pattern of arity " + std::to_string(p.names.size()) +
                      " against an element of arity " + std::to_string(item.size()));
    }
    for (std::size_t i = 0; i < p.names.size(); ++i) {
      if (p.names[i] == "_") continue;
      Binding b;
      b.surface = p.names[i];
      b.alias = item[i];
      if (item[i]->kind == ExprKind::Int) b.const_int = item[i]->number;
      scope_.push_back(std::move(b));
    }
  }

  void hide_from(std::size_t mark) {
    for (std::size_t k = mark; k < scope_.size(); ++k) scope_[k].surface.clear();
  }

  // ---- grammar

  Backend graph_header() {
    expect_word("graph");
    expect_sym("[");
    Backend b;
    std::set<std::string> seen;
    if (!is_sym("]")) {
      for (;;) {
        auto n = expr();
        if (n->kind != ExprKind::Node) fail(n->loc, "graph entries must be node literals <k; n; ks>");
        b.push_back(make_station(n));
        if (!is_sym(",")) break;
        next();
      }
    }
    expect_sym("]");
    return b;
  }

  ExprPtr seq() {
    auto first = expr();
    if (!is_sym(";")) return first;
    SourceLoc loc = next().loc;
    Typed t = type_here(first);
    std::string name = hidden_name();
    Binding b;
    b.internal = name;
    b.type = t.type;
    scope_.push_back(b);
    auto rest = seq();
    scope_.pop_back();
    return app(lambda(name, t.type, rest, false, loc), first, loc);
  }

  ExprPtr expr() {
    if (is_word("let")) return let_expr();
    if (is_word("if")) return if_expr();
    if (is_word("ifz")) return ifz_expr();
    if (is_word("foreach")) return foreach_expr();
    if (is_sym("\\")) return lambda_expr(false);
    if (is_word("commutative") && is_sym("\\", 1)) {
      next();
      return lambda_expr(true);
    }
    return binary();
  }

  ExprPtr let_expr() {
    SourceLoc loc = expect_word("let");
    std::vector<std::pair<std::string, SourceLoc>> names;
    for (;;) {
      SourceLoc nloc = peek().loc;
      names.emplace_back(identifier("a name"), nloc);
      if (!is_sym(",")) break;
      next();
    }
    expect_sym("=");
    const std::size_t mark = scope_.size();
    std::vector<PendingLet> lets;
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (i) expect_sym(",");
      if (is_sym("[") && is_comprehension(pos_)) {
        if (names.size() != 1) fail(names[i].second, "a comprehension binds a single name");
        auto items = comprehension(lets);
        Binding b;
        b.surface = names[i].first;
        b.items = std::move(items);
        scope_.push_back(std::move(b));
      } else {
        auto rhs = expr();
        bind_let(names[i].first, rhs, loc, lets);
      }
    }
    expect_word("in");
    auto body = seq();
    scope_.resize(mark);
    return wrap_lets(body, lets);
  }

  ExprPtr if_expr() {
    SourceLoc loc = expect_word("if");
    auto scrutinee = binary();
    if (is_word("in")) {
      next();
      auto set = binary();
      expect_word("then");
      auto yes = expr();
      expect_word("else");
      auto no = expr();
      auto missing = len(subtract(key_list({scrutinee}, loc), set, loc), loc);
      return cond(missing, yes, no, loc);
    }
    expect_word("then");
    auto yes = expr();
    expect_word("else");
    auto no = expr();
    return cond(scrutinee, no, yes, loc);
  }

  ExprPtr ifz_expr() {
    SourceLoc loc = expect_word("ifz");
    auto scrutinee = binary();
    expect_word("then");
    auto zero = expr();
    expect_word("else");
    auto other = expr();
    return cond(scrutinee, zero, other, loc);
  }

  ExprPtr lambda_expr(bool commutative) {
    SourceLoc loc = expect_sym("\\");
    const std::size_t mark = scope_.size();
    std::string param;
    TypePtr type;
    if (is_sym("<")) {
      next();
      param = hidden_name();
      type = Type::node_type();
      scope_.push_back(Binding{"", param, type, nullptr, std::nullopt, std::nullopt});
      for (int i = 1; i <= 3; ++i) {
        if (i > 1) expect_sym(";");
        SourceLoc nloc = peek().loc;
        std::string name = identifier("a pattern name");
        if (name == "_") continue;
        Binding b;
        b.surface = name;
        b.alias = proj(i, var(param, nloc), nloc);
        scope_.push_back(std::move(b));
      }
      expect_sym(">");
    } else {
      std::string surface = identifier("a parameter name");
      expect_sym(":");
      type = this->type();
      param = surface == "_" ? hidden_name() : internal_for(surface);
      scope_.push_back(Binding{surface == "_" ? "" : surface, param, type, nullptr, std::nullopt,
                               std::nullopt});
    }
    expect_sym(".");
    auto body = expr();
    scope_.resize(mark);
    return lambda(param, type, body, commutative, loc);
  }

  ExprPtr foreach_expr() {
    SourceLoc loc = expect_word("foreach");
    Pattern pat = pattern();
    expect_word("in");
    auto items = ct_source();
    expect_word("do");
    const std::size_t body_start = pos_;
    std::vector<ExprPtr> bodies;
    for (const auto& item : items) {
      const std::size_t mark = scope_.size();
      bind_pattern(pat, item);
      pos_ = body_start;
      bodies.push_back(seq());
      scope_.resize(mark);
      if (!is_word("end")) fail_here("expected 'end' closing foreach");
    }
    if (items.empty()) skip_block(body_start);
    expect_word("end");
    if (bodies.empty()) return int_lit(0, loc);
    ExprPtr acc = bodies.back();
    for (std::size_t i = bodies.size() - 1; i-- > 0;) {
      Typed t = type_here(bodies[i]);
      std::string name = hidden_name();
      acc = app(lambda(name, t.type, acc, false, loc), bodies[i], loc);
    }
    return acc;
  }

  // Leaves pos_ at the `end` matching a `do` whose body starts at `start`.
  void skip_block(std::size_t start) {
    int depth = 0;
    for (pos_ = start; peek().kind != Tok::End; next()) {
      if (is_word("do")) ++depth;
      if (is_word("end")) {
        if (depth == 0) return;
        --depth;
      }
    }
    fail_here("expected 'end' closing foreach");
  }

  Pattern pattern() {
    Pattern p;
    p.loc = peek().loc;
    if (is_sym("(")) {
      next();
      p.tuple = true;
      for (;;) {
        p.names.push_back(identifier("a pattern name"));
        if (!is_sym(",")) break;
        next();
      }
      expect_sym(")");
    } else {
      p.names.push_back(identifier("a pattern name"));
    }
    return p;
  }

  // The list a foreach or comprehension clause iterates: a name bound to a
  // compile-time list, a literal list, or a range `a..b`.
  std::vector<Item> ct_source() {
    const Token& t = peek();
    if (t.kind == Tok::Int || (t.kind == Tok::Ident && is_sym("..", 1))) {
      std::int64_t lo = const_int();
      expect_sym("..");
      std::int64_t hi = const_int();
      std::vector<Item> items;
      for (std::int64_t i = lo; i <= hi; ++i) items.push_back({int_lit(i, t.loc)});
      return items;
    }
    if (is_sym("[")) {
      auto lst = atom();
      if (lst->kind != ExprKind::KeyList) fail(t.loc, "expected a list");
      std::vector<Item> items;
      for (const auto& k : lst->kids) {
        if (!is_duplicable(*k)) fail(k->loc, "loop list elements must be values or names");
        items.push_back({k});
      }
      return items;
    }
    std::string name = identifier("a list to iterate");
    const Binding* b = lookup(name);
    if (!b) fail(t.loc, "unbound name '" + name + "'");
    if (!b->items) fail(t.loc, "'" + name + "' is not a list known at compile time");
    return *b->items;
  }

  std::int64_t const_int() {
    const Token& t = peek();
    if (t.kind == Tok::Int) return next().number;
    if (t.kind == Tok::Ident && !is_keyword(t)) {
      const Binding* b = lookup(t.text);
      if (b && b->const_int) {
        next();
        return *b->const_int;
      }
      fail(t.loc, "'" + t.text + "' is not an integer known at compile time");
    }
    fail_here("expected an integer bound");
  }

  bool is_comprehension(std::size_t open) const {
    bool found = false;
    matching(open, "|", &found);
    return found;
  }

  // `[elem | clause, ...]`, unrolled. Let clauses and effectful element
  // components become lets that wrap whatever follows; the returned items
  // refer to them by name.
  std::vector<Item> comprehension(std::vector<PendingLet>& lets) {
    const std::size_t open = pos_;
    const std::size_t close = matching(open, nullptr, nullptr);
    expect_sym("[");
    const std::size_t elem_start = pos_;
    bool bar = false;
    std::size_t bar_at = elem_start;
    {
      int depth = 0;
      for (std::size_t k = elem_start; k < close; ++k) {
        const Token& t = toks_[k];
        if (t.kind != Tok::Sym) continue;
        if (t.text == "(" || t.text == "[" || t.text == "<") ++depth;
        if (t.text == ")" || t.text == "]" || t.text == ">") --depth;
        if (depth == 0 && t.text == "|") {
          bar = true;
          bar_at = k;
          break;
        }
      }
    }
    if (!bar) fail(toks_[open].loc, "expected '|' in list comprehension");
    std::vector<Item> items;
    clauses(bar_at + 1, elem_start, bar_at, lets, items);
    pos_ = close;
    expect_sym("]");
    return items;
  }

  void clauses(std::size_t at, std::size_t elem_start, std::size_t elem_end,
               std::vector<PendingLet>& lets, std::vector<Item>& items) {
    pos_ = at;
    if (is_sym("]")) {
      pos_ = elem_start;
      items.push_back(element(lets));
      if (pos_ != elem_end) fail_here("expected '|' after comprehension element");
      return;
    }
    if (is_word("let")) {
      SourceLoc loc = next().loc;
      std::string name = identifier("a name");
      expect_sym("=");
      auto rhs = expr();
      bind_let(name, rhs, loc, lets);
      if (is_sym(",")) next();
      clauses(pos_, elem_start, elem_end, lets, items);
      return;
    }
    Pattern pat = pattern();
    expect_word("in");
    auto source = ct_source();
    if (is_sym(",")) next();
    else if (!is_sym("]")) fail_here("expected ',' or ']' in comprehension");
    const std::size_t rest = pos_;
    for (const auto& item : source) {
      const std::size_t mark = scope_.size();
      bind_pattern(pat, item);
      clauses(rest, elem_start, elem_end, lets, items);
      hide_from(mark);
    }
  }

  Item element(std::vector<PendingLet>& lets) {
    std::vector<ExprPtr> parts;
    bool tuple = false;
    if (is_sym("(")) matching(pos_, ",", &tuple);
    if (tuple) {
      next();
      for (;;) {
        parts.push_back(expr());
        if (!is_sym(",")) break;
        next();
      }
      expect_sym(")");
    } else {
      parts.push_back(expr());
    }
    Item item;
    for (const auto& p : parts) {
      if (is_duplicable(*p)) {
        item.push_back(p);
        continue;
      }
      Typed t = type_here(p);
      std::string name = hidden_name();
      lets.push_back(PendingLet{name, t.type, p, p->loc});
      scope_.push_back(Binding{"", name, t.type, nullptr, std::nullopt, std::nullopt});
      item.push_back(var(name, p->loc));
    }
    return item;
  }

  ExprPtr binary() {
    auto lhs = additive();
    while (is_sym("++") || is_sym("--")) {
      bool cat = peek().text == "++";
      SourceLoc loc = next().loc;
      auto rhs = additive();
      lhs = cat ? concat(lhs, rhs, loc) : subtract(lhs, rhs, loc);
    }
    return lhs;
  }

  ExprPtr additive() {
    auto lhs = multiplicative();
    while (is_sym("+") || is_sym("-")) {
      ArithOp op = peek().text == "+" ? ArithOp::Add : ArithOp::Sub;
      SourceLoc loc = next().loc;
      lhs = arith(op, lhs, multiplicative(), loc);
    }
    return lhs;
  }

  ExprPtr multiplicative() {
    auto lhs = application();
    while (is_sym("*") || is_sym("/")) {
      ArithOp op = peek().text == "*" ? ArithOp::Mul : ArithOp::Div;
      SourceLoc loc = next().loc;
      lhs = arith(op, lhs, application(), loc);
    }
    return lhs;
  }

  bool starts_operand() const {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Int:
      case Tok::Key:
      case Tok::Label:
        return true;
      case Tok::Ident:
        if (!is_keyword(t)) return true;
        return t.text == "claim" || t.text == "len" || t.text == "fix" || t.text == "pi1" ||
               t.text == "pi2" || t.text == "pi3";
      case Tok::Sym:
        return t.text == "(" || t.text == "[" || t.text == "<";
      default:
        return false;
    }
  }

  bool starts_operation() const {
    const Token& t = peek();
    if (t.kind != Tok::Ident) return false;
    return t.text == "emit" || t.text == "add" || t.text == "map" || t.text == "fold" ||
           is_graph_op_name(t.text);
  }

  ExprPtr application() {
    if (starts_operation()) return operation();
    auto head = prefix();
    while (starts_operand()) {
      SourceLoc loc = head->loc;
      head = app(head, prefix(), loc);
    }
    return head;
  }

  ExprPtr operation() {
    if (is_word("emit")) {
      next();
      if (!starts_operation() || is_word("emit")) fail_here("expected an operation after emit");
    }
    const Token& t = next();
    const std::string name = t.text;
    const SourceLoc loc = t.loc;
    bool commutative = false;
    if (is_word("commutative")) {
      if (name != "fold" && name != "foldVal") fail_here("only folds can be marked commutative");
      next();
      commutative = true;
    }
    std::size_t arity = name == "add" ? 1 : name == "map" ? 2 : name == "fold" ? 3
                                                                              : graph_op_arity(name);
    std::vector<ExprPtr> args;
    for (std::size_t i = 0; i < arity; ++i) {
      if (!starts_operand() && !(is_sym("-") && peek(1).kind == Tok::Int))
        fail_here(name + " expects " + std::to_string(arity) + " argument(s)");
      args.push_back(prefix());
    }
    Operation op;
    if (name == "add") {
      op = Operation{OpKind::Add, args};
    } else if (name == "map") {
      op = Operation{OpKind::Map, args};
    } else if (name == "fold") {
      if (commutative) {
        if (args[0]->kind != ExprKind::Lambda)
          fail(args[0]->loc, "'fold commutative' needs a function literal");
        auto f = std::make_shared<Expr>(*args[0]);
        f->commutative = true;
        args[0] = f;
      }
      op = Operation{OpKind::Fold, args};
    } else {
      try {
        op = desugar_graph_op(name, args, commutative, loc);
      } catch (const DesugarError& e) {
        fail(loc, e.what());
      }
    }
    return emit(op, loc);
  }

  ExprPtr prefix() {
    const Token& t = peek();
    if (t.kind == Tok::Sym && t.text == "-" && peek(1).kind == Tok::Int) {
      next();
      const Token& n = next();
      return int_lit(-n.number, t.loc);
    }
    if (t.kind == Tok::Ident) {
      SourceLoc loc = t.loc;
      if (t.text == "claim") {
        next();
        return claim(prefix(), loc);
      }
      if (t.text == "len") {
        next();
        return len(prefix(), loc);
      }
      if (t.text == "fix") {
        next();
        return fix(prefix(), loc);
      }
      if (t.text == "pi1" || t.text == "pi2" || t.text == "pi3") {
        int index = t.text[2] - '0';
        next();
        return proj(index, prefix(), loc);
      }
    }
    return atom();
  }

  ExprPtr atom() {
    const Token& t = peek();
    SourceLoc loc = t.loc;
    switch (t.kind) {
      case Tok::Int:
        return int_lit(next().number, loc);
      case Tok::Key: {
        const Token& k = next();
        if (k.text == "$") return key_lit(Key::generated(static_cast<std::uint64_t>(k.number)), loc);
        return key_lit(Key::literal(k.text), loc);
      }
      case Tok::Label:
        return label_lit(Label{static_cast<std::uint64_t>(next().number)}, loc);
      case Tok::Ident:
        if (is_keyword(t)) fail_here("expected an expression");
        if (t.text == "_") fail(loc, "'_' cannot be used as a value");
        return resolve(next().text, loc);
      case Tok::Sym:
        if (t.text == "(") {
          next();
          auto inner = seq();
          expect_sym(")");
          return inner;
        }
        if (t.text == "[") {
          if (is_comprehension(pos_))
            fail(loc, "a comprehension may only appear as a let right-hand side");
          next();
          std::vector<ExprPtr> elems;
          if (!is_sym("]")) {
            for (;;) {
              elems.push_back(expr());
              if (!is_sym(",")) break;
              next();
            }
          }
          expect_sym("]");
          return key_list(std::move(elems), loc);
        }
        if (t.text == "<") {
          next();
          auto k = expr();
          expect_sym(";");
          auto p = expr();
          expect_sym(";");
          auto a = expr();
          expect_sym(">");
          return node(k, p, a, loc);
        }
        break;
      default:
        break;
    }
    fail_here("expected an expression");
  }

  TypePtr type() {
    auto lhs = base_type();
    if (is_sym("->") || is_sym("~>")) {
      bool effect = peek().text == "~>";
      next();
      auto rhs = type();
      return Type::arrow(lhs, effect ? Emittability::T : Emittability::F, rhs);
    }
    return lhs;
  }

  TypePtr base_type() {
    if (is_sym("(")) {
      next();
      auto t = type();
      expect_sym(")");
      return t;
    }
    const Token& t = peek();
    if (t.kind == Tok::Ident) {
      if (t.text == "int") return next(), Type::int_type();
      if (t.text == "key") return next(), Type::key_type();
      if (t.text == "kl") return next(), Type::key_list_type();
      if (t.text == "node") return next(), Type::node_type();
      if (t.text == "future") {
        next();
        expect_sym("[");
        auto inner = type();
        expect_sym("]");
        return Type::future(inner);
      }
    }
    fail_here("expected a type");
  }

  std::vector<Token> toks_;
  std::string file_;
  std::size_t pos_ = 0;
  std::vector<Binding> scope_;
  std::uint64_t counter_ = 0;
};

}  // namespace

Program parse_program(const std::string& text, const std::string& file) {
  Parser p(Lexer(text, file).run(), file);
  return p.program();
}

ExprPtr parse_expression(const std::string& text) {
  const std::string file = "<expr>";
  Parser p(Lexer(text, file).run(), file);
  return p.lone_expression();
}

TypePtr parse_type(const std::string& text) {
  const std::string file = "<type>";
  Parser p(Lexer(text, file).run(), file);
  return p.lone_type();
}

}  // namespace cg
