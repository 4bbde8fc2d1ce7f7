// SPDX-License-Identifier: Apache-2.0
//
// WDL lexer, parser and printer.

#include <cctype>
#include <sstream>

#include "wste/ir.hpp"

namespace wste {

namespace {

const char* const kPuncts[] = {"<<", ">>", "==", "!=", "<=", ">=", "&&", "||", "~&", "~|", "~^", "^~",
                               ";",  ":",  ",",  "=",  "(",  ")",  "[",  "]",  "{",  "}",  "@",  "?",
                               "+",  "-",  "*",  "/",  "%",  "&",  "|",  "^",  "~",  "<",  ">",  "!"};

int digit_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  unsigned line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (text.substr(i, 2) == "//") {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    if (text.substr(i, 2) == "/*") {
      SrcLoc at{line, col};
      std::size_t end = text.find("*/", i + 2);
      if (end == std::string_view::npos) throw ParseError(at, "unterminated comment");
      advance(end + 2 - i);
      continue;
    }
    Token t;
    t.loc = {line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      t.kind = Tok::Ident;
      t.text = std::string(text.substr(i, j - i));
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      BigUint v = 0;
      while (j < text.size() && (std::isdigit(static_cast<unsigned char>(text[j])) || text[j] == '_')) {
        if (text[j] != '_') v = v * 10 + (text[j] - '0');
        ++j;
      }
      if (j < text.size() && text[j] == '\'') {
        if (v == 0 || v > 1u << 16) throw ParseError(t.loc, "bad literal width");
        unsigned width = static_cast<unsigned>(v);
        ++j;
        if (j >= text.size()) throw ParseError(t.loc, "incomplete sized literal");
        char base_ch = static_cast<char>(std::tolower(static_cast<unsigned char>(text[j])));
        int base = base_ch == 'b' ? 2 : base_ch == 'h' ? 16 : base_ch == 'd' ? 10 : 0;
        if (!base) throw ParseError(t.loc, "sized literal needs a base of b, h or d");
        ++j;
        std::size_t start = j;
        BigUint value = 0;
        while (j < text.size()) {
          char d = text[j];
          if (d == '_') {
            ++j;
            continue;
          }
          int dv = digit_value(d);
          if (dv < 0 || dv >= base) break;
          value = value * base + dv;
          ++j;
        }
        if (j == start) throw ParseError(t.loc, "sized literal has no digits");
        if (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])))) {
          SrcLoc at = t.loc;
          at.col += static_cast<unsigned>(j - i);
          throw ParseError(at, std::string("invalid digit '") + text[j] + "' in literal");
        }
        if (value > width_mask(width))
          throw ParseError(t.loc, "literal " + value.str() + " does not fit in " + std::to_string(width) + " bits");
        t.kind = Tok::Sized;
        t.width = width;
        t.value = value;
      } else {
        t.kind = Tok::Number;
        t.value = v;
      }
      t.text = std::string(text.substr(i, j - i));
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    bool matched = false;
    for (const char* p : kPuncts) {
      std::string_view ps(p);
      if (text.substr(i, ps.size()) == ps) {
        t.kind = Tok::Punct;
        t.text = std::string(ps);
        advance(ps.size());
        out.push_back(std::move(t));
        matched = true;
        break;
      }
    }
    if (!matched) throw ParseError(t.loc, std::string("unexpected character '") + c + "'");
  }
  Token end;
  end.kind = Tok::End;
  end.loc = {line, col};
  out.push_back(end);
  return out;
}

// ---------------------------------------------------------------------------
// Token stream and expression grammar

const Token& TokenStream::peek(std::size_t ahead) const {
  std::size_t k = std::min(pos_ + ahead, toks_.size() - 1);
  return toks_[k];
}

Token TokenStream::next() {
  Token t = peek();
  if (pos_ < toks_.size() - 1) ++pos_;
  return t;
}

bool TokenStream::is(std::string_view punct, std::size_t ahead) const {
  const Token& t = peek(ahead);
  return t.kind == Tok::Punct && t.text == punct;
}

bool TokenStream::is_ident(std::string_view word, std::size_t ahead) const {
  const Token& t = peek(ahead);
  return t.kind == Tok::Ident && t.text == word;
}

bool TokenStream::accept(std::string_view punct) {
  if (!is(punct)) return false;
  next();
  return true;
}

void TokenStream::fail(const std::string& msg) const {
  const Token& t = peek();
  std::string near = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
  throw ParseError(t.loc, msg + " at " + near);
}

void TokenStream::expect(std::string_view punct) {
  if (!accept(punct)) fail("expected '" + std::string(punct) + "'");
}

std::string TokenStream::expect_ident() {
  if (peek().kind != Tok::Ident) fail("expected identifier");
  return next().text;
}

namespace {

AstPtr node(Ast::Kind k, SrcLoc loc, std::string text, std::vector<AstPtr> args) {
  auto a = std::make_shared<Ast>();
  a->kind = k;
  a->loc = loc;
  a->text = std::move(text);
  a->args = std::move(args);
  return a;
}

const std::vector<std::vector<std::string_view>> kLevels = {
    {"||"}, {"&&"}, {"|", "~|"}, {"^", "~^", "^~"}, {"&", "~&"}, {"==", "!="}, {"<", "<=", ">", ">="},
    {"<<", ">>"}, {"+", "-"}, {"*", "/", "%"},
};

}  // namespace

AstPtr TokenStream::expression() { return ternary(); }

AstPtr TokenStream::ternary() {
  AstPtr c = binary(0);
  if (is("?")) {
    SrcLoc loc = next().loc;
    AstPtr t = expression();
    expect(":");
    AstPtr e = ternary();
    return node(Ast::Kind::Ternary, loc, "?", {c, t, e});
  }
  return c;
}

AstPtr TokenStream::binary(int level) {
  if (level >= static_cast<int>(kLevels.size())) return unary();
  AstPtr lhs = binary(level + 1);
  for (;;) {
    const Token& t = peek();
    bool hit = false;
    if (t.kind == Tok::Punct)
      for (auto op : kLevels[level])
        if (t.text == op) hit = true;
    if (!hit) return lhs;
    Token op = next();
    AstPtr rhs = binary(level + 1);
    lhs = node(Ast::Kind::Binary, op.loc, op.text, {lhs, rhs});
  }
}

AstPtr TokenStream::unary() {
  if (is("~") || is("!")) {
    Token op = next();
    return node(Ast::Kind::Unary, op.loc, op.text, {unary()});
  }
  return selectors(primary());
}

AstPtr TokenStream::primary() {
  const Token& t = peek();
  if (t.kind == Tok::Number || t.kind == Tok::Sized) {
    Token tok = next();
    auto a = std::make_shared<Ast>();
    a->kind = tok.kind == Tok::Number ? Ast::Kind::Number : Ast::Kind::Sized;
    a->loc = tok.loc;
    a->value = tok.value;
    a->width = tok.width;
    return a;
  }
  if (t.kind == Tok::Ident) {
    Token tok = next();
    if (is("(")) {
      next();
      std::vector<AstPtr> args;
      if (!is(")")) {
        do {
          args.push_back(expression());
        } while (accept(","));
      }
      expect(")");
      return node(Ast::Kind::Call, tok.loc, tok.text, std::move(args));
    }
    return node(Ast::Kind::Ident, tok.loc, tok.text, {});
  }
  if (is("(")) {
    next();
    AstPtr e = expression();
    expect(")");
    return e;
  }
  if (is("{")) {
    SrcLoc loc = next().loc;
    std::vector<AstPtr> parts;
    do {
      parts.push_back(expression());
    } while (accept(","));
    expect("}");
    return node(Ast::Kind::Concat, loc, "{}", std::move(parts));
  }
  fail("expected expression");
}

AstPtr TokenStream::selectors(AstPtr base) {
  while (is("[")) {
    SrcLoc loc = next().loc;
    AstPtr a = binary(0);
    if (accept(":")) {
      AstPtr b = binary(0);
      expect("]");
      base = node(Ast::Kind::Range, loc, "[:]", {base, a, b});
    } else {
      expect("]");
      base = node(Ast::Kind::Index, loc, "[]", {base, a});
    }
  }
  return base;
}

AstPtr TokenStream::postfix() {
  if (peek().kind != Tok::Ident) fail("expected identifier");
  Token tok = next();
  return selectors(node(Ast::Kind::Ident, tok.loc, tok.text, {}));
}

// ---------------------------------------------------------------------------
// Statements

namespace {

const char* const kKeywords[] = {"param", "input", "output", "wire", "reg", "array", "if", "else", "uninit"};

class DesignParser {
 public:
  explicit DesignParser(std::string_view text) : ts_(tokenize(text)) {}

  std::vector<Stmt> parse_all() {
    std::vector<Stmt> out;
    while (!ts_.at_end()) statement(out);
    return out;
  }

 private:
  std::string decl_name() {
    if (ts_.peek().kind != Tok::Ident) ts_.fail("expected identifier");
    for (const char* k : kKeywords)
      if (ts_.peek().text == k) ts_.fail("keyword used as a name");
    return ts_.next().text;
  }

  void statement(std::vector<Stmt>& out) {
    const Token& t = ts_.peek();
    SrcLoc loc = t.loc;
    if (ts_.is_ident("param")) {
      ts_.next();
      Stmt s;
      s.kind = Stmt::Kind::Param;
      s.loc = loc;
      s.name = decl_name();
      ts_.expect("=");
      s.init = ts_.expression();
      ts_.expect(";");
      out.push_back(std::move(s));
      return;
    }
    if (ts_.is_ident("input") || ts_.is_ident("wire") || ts_.is_ident("reg") || ts_.is_ident("output")) {
      std::string kw = ts_.next().text;
      Stmt::Kind kind = kw == "input"  ? Stmt::Kind::Input
                        : kw == "wire" ? Stmt::Kind::Wire
                        : kw == "reg"  ? Stmt::Kind::Reg
                                       : Stmt::Kind::Output;
      do {
        Stmt s;
        s.kind = kind;
        s.loc = ts_.peek().loc;
        s.name = decl_name();
        if (kind == Stmt::Kind::Output) {
          if (ts_.accept(":")) s.width = ts_.expression();
        } else {
          ts_.expect(":");
          s.width = ts_.expression();
        }
        if (kind == Stmt::Kind::Reg && ts_.accept("=")) s.init = ts_.expression();
        out.push_back(std::move(s));
      } while (ts_.accept(","));
      ts_.expect(";");
      return;
    }
    if (ts_.is_ident("array")) {
      ts_.next();
      Stmt s;
      s.kind = Stmt::Kind::Array;
      s.loc = loc;
      s.name = decl_name();
      ts_.expect(":");
      if (!ts_.is("[")) ts_.fail("expected '[' with the index width");
      while (ts_.accept("[")) {
        s.index_widths.push_back(ts_.expression());
        ts_.expect("]");
      }
      s.width = ts_.expression();
      if (ts_.is_ident("uninit")) {
        ts_.next();
        s.uninit = true;
      }
      ts_.expect(";");
      out.push_back(std::move(s));
      return;
    }
    if (ts_.is_ident("if")) {
      ts_.next();
      Stmt s;
      s.kind = Stmt::Kind::If;
      s.loc = loc;
      ts_.expect("(");
      s.rhs = ts_.expression();
      ts_.expect(")");
      body(s.then_body);
      if (ts_.is_ident("else")) {
        ts_.next();
        body(s.else_body);
      }
      out.push_back(std::move(s));
      return;
    }
    if (t.kind != Tok::Ident) ts_.fail("expected statement");
    Stmt s;
    s.loc = loc;
    s.lhs = ts_.postfix();
    if (ts_.accept("<=")) {
      s.kind = Stmt::Kind::Seq;
    } else if (ts_.accept("=")) {
      s.kind = Stmt::Kind::Comb;
    } else {
      ts_.fail("expected '=' or '<='");
    }
    s.rhs = ts_.expression();
    ts_.expect(";");
    out.push_back(std::move(s));
  }

  void body(std::vector<Stmt>& out) {
    if (ts_.accept("{")) {
      while (!ts_.is("}")) {
        if (ts_.at_end()) ts_.fail("expected '}'");
        statement(out);
      }
      ts_.next();
    } else {
      statement(out);
    }
  }

  TokenStream ts_;
};

void print_stmt(std::ostringstream& os, const Stmt& s, int indent) {
  std::string pad(indent * 2, ' ');
  os << pad;
  switch (s.kind) {
    case Stmt::Kind::Param:
      os << "param " << s.name << " = " << print(s.init) << ";\n";
      return;
    case Stmt::Kind::Input:
      os << "input " << s.name << ":" << print(s.width) << ";\n";
      return;
    case Stmt::Kind::Output:
      os << "output " << s.name;
      if (s.width) os << ":" << print(s.width);
      os << ";\n";
      return;
    case Stmt::Kind::Wire:
      os << "wire " << s.name << ":" << print(s.width) << ";\n";
      return;
    case Stmt::Kind::Reg:
      os << "reg " << s.name << ":" << print(s.width);
      if (s.init) os << " = " << print(s.init);
      os << ";\n";
      return;
    case Stmt::Kind::Array:
      os << "array " << s.name << ":";
      for (const auto& w : s.index_widths) os << "[" << print(w) << "]";
      os << print(s.width);
      if (s.uninit) os << " uninit";
      os << ";\n";
      return;
    case Stmt::Kind::Comb:
      os << print(s.lhs) << " = " << print(s.rhs) << ";\n";
      return;
    case Stmt::Kind::Seq:
      os << print(s.lhs) << " <= " << print(s.rhs) << ";\n";
      return;
    case Stmt::Kind::If:
      os << "if (" << print(s.rhs) << ") {\n";
      for (const auto& c : s.then_body) print_stmt(os, c, indent + 1);
      os << pad << "}";
      if (!s.else_body.empty()) {
        os << " else {\n";
        for (const auto& c : s.else_body) print_stmt(os, c, indent + 1);
        os << pad << "}";
      }
      os << "\n";
      return;
  }
}

bool same_stmts(const std::vector<Stmt>& a, const std::vector<Stmt>& b);

bool same_stmt(const Stmt& a, const Stmt& b) {
  if (a.kind != b.kind || a.name != b.name || a.uninit != b.uninit) return false;
  if (!same_ast(a.width, b.width) || !same_ast(a.init, b.init) || !same_ast(a.lhs, b.lhs) ||
      !same_ast(a.rhs, b.rhs))
    return false;
  if (a.index_widths.size() != b.index_widths.size()) return false;
  for (std::size_t i = 0; i < a.index_widths.size(); ++i)
    if (!same_ast(a.index_widths[i], b.index_widths[i])) return false;
  return same_stmts(a.then_body, b.then_body) && same_stmts(a.else_body, b.else_body);
}

bool same_stmts(const std::vector<Stmt>& a, const std::vector<Stmt>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same_stmt(a[i], b[i])) return false;
  return true;
}

}  // namespace

Design parse_design(std::string_view text, std::string name) {
  Design d;
  d.name = std::move(name);
  d.stmts = DesignParser(text).parse_all();
  return d;
}

std::string print(const AstPtr& e) {
  if (!e) return "";
  switch (e->kind) {
    case Ast::Kind::Number:
      return e->value.str();
    case Ast::Kind::Sized:
      return std::to_string(e->width) + "'d" + e->value.str();
    case Ast::Kind::Ident:
      return e->text;
    case Ast::Kind::Unary:
      return "(" + e->text + print(e->args[0]) + ")";
    case Ast::Kind::Binary:
      return "(" + print(e->args[0]) + " " + e->text + " " + print(e->args[1]) + ")";
    case Ast::Kind::Ternary:
      return "(" + print(e->args[0]) + " ? " + print(e->args[1]) + " : " + print(e->args[2]) + ")";
    case Ast::Kind::Concat: {
      std::string s = "{";
      for (std::size_t i = 0; i < e->args.size(); ++i) s += (i ? ", " : "") + print(e->args[i]);
      return s + "}";
    }
    case Ast::Kind::Index:
      return print(e->args[0]) + "[" + print(e->args[1]) + "]";
    case Ast::Kind::Range:
      return print(e->args[0]) + "[" + print(e->args[1]) + ":" + print(e->args[2]) + "]";
    case Ast::Kind::Call: {
      std::string s = e->text + "(";
      for (std::size_t i = 0; i < e->args.size(); ++i) s += (i ? ", " : "") + print(e->args[i]);
      return s + ")";
    }
  }
  return "";
}

std::string print(const Design& d) {
  std::ostringstream os;
  for (const auto& s : d.stmts) print_stmt(os, s, 0);
  return os.str();
}

bool same_ast(const AstPtr& a, const AstPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind || a->text != b->text || a->value != b->value || a->width != b->width ||
      a->args.size() != b->args.size())
    return false;
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (!same_ast(a->args[i], b->args[i])) return false;
  return true;
}

bool same_design(const Design& a, const Design& b) { return same_stmts(a.stmts, b.stmts); }

}  // namespace wste
