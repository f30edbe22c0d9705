#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "dia/diagnostics.hpp"
#include "dia/lexer.hpp"
#include "dia/model.hpp"
#include "dia/text.hpp"

namespace dia {

struct ParseResult {
  std::optional<Model> model;  // present iff diagnostics carry no errors
  std::vector<Diagnostic> diagnostics;
};

namespace detail {

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::vector<Diagnostic> diags)
      : toks_(std::move(tokens)), diags_(std::move(diags)) {}

  ParseResult run() {
    Model m;
    bool ok = parse_header(m);
    if (ok) parse_body(m);
    ParseResult res;
    res.diagnostics = std::move(diags_);
    if (!has_errors(res.diagnostics)) res.model = std::move(m);
    return res;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  const Token& take() {
    const Token& t = peek();
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool at_eof() const { return peek().kind == TokenKind::Eof; }

  void err(std::string code, std::string msg, std::optional<SourceSpan> span) {
    diags_.push_back(error(std::move(code), std::move(msg), std::move(span)));
  }
  void expected(const std::string& what) {
    const Token& t = peek();
    std::string got = t.kind == TokenKind::Eof ? "end of input" : "'" + t.lexeme + "'";
    err("E101", "expected " + what + ", found " + got, t.span);
  }

  bool eat(TokenKind kind) {
    if (peek().kind != kind) return false;
    take();
    return true;
  }

  bool parse_header(Model& m) {
    if (!peek().is_keyword("model")) {
      err("E101", "expected 'model'", peek().span);
      return false;
    }
    take();
    if (peek().kind != TokenKind::String) {
      expected("model name string");
      return false;
    }
    m.name = take().str_value;
    if (!peek().is_keyword("level")) {
      expected("'level'");
      return false;
    }
    take();
    const Token& lvl = peek();
    if (auto level = level_from_keyword(lvl.lexeme);
        level && lvl.kind == TokenKind::Keyword) {
      m.level = *level;
      take();
    } else if (lvl.kind == TokenKind::Ident || lvl.kind == TokenKind::Keyword) {
      err("E103", "unknown level '" + lvl.lexeme + "'", lvl.span);
      take();  // assume a level was intended and continue at DPIM
    } else {
      expected("level keyword (dpim, dtsm, or ddsm)");
      return false;
    }
    if (!eat(TokenKind::LBrace)) {
      expected("'{'");
      return false;
    }
    return true;
  }

  void parse_body(Model& m) {
    std::unordered_set<std::string> ids;
    while (true) {
      const Token& t = peek();
      if (t.kind == TokenKind::RBrace) {
        take();
        break;
      }
      if (t.kind == TokenKind::Eof) {
        expected("'}'");
        break;
      }
      if (t.is_keyword("flow")) {
        parse_flow(m);
        continue;
      }
      if (auto kind = kind_from_keyword(t.lexeme);
          kind && t.kind == TokenKind::Keyword) {
        parse_node(m, ids, *kind);
        continue;
      }
      if (t.kind == TokenKind::Ident || t.kind == TokenKind::Keyword) {
        err("E103", "unknown keyword '" + t.lexeme + "'", t.span);
      } else {
        expected("element declaration, 'flow', or '}'");
      }
      take();
      recover();
    }
  }

  // Skip to the start of the next top-level item.
  void recover() {
    while (!at_eof()) {
      const Token& t = peek();
      if (t.kind == TokenKind::RBrace) return;
      if (t.kind == TokenKind::Keyword &&
          (t.lexeme == "flow" || kind_from_keyword(t.lexeme)))
        return;
      take();
    }
  }

  void parse_node(Model& m, std::unordered_set<std::string>& ids, Kind kind) {
    Element e;
    e.kind = kind;
    SourceSpan span = take().span;  // kind keyword
    if (peek().kind != TokenKind::Ident) {
      expected("element name");
      recover();
      return;
    }
    const Token& name = take();
    e.id = name.lexeme;
    e.name = name.lexeme;
    span = join(span, name.span);
    if (peek().kind == TokenKind::Colon) {
      take();
      if (peek().kind != TokenKind::Ident && peek().kind != TokenKind::Keyword) {
        expected("technology name");
        recover();
        return;
      }
      const Token& tech = take();
      e.technology = tech.lexeme;
      span = join(span, tech.span);
    }
    while (peek().kind == TokenKind::At) {
      auto ann = parse_annotation();
      if (!ann) {
        recover();
        e.span = span;
        if (!e.id.empty()) add_element(m, ids, std::move(e));
        return;
      }
      span = join(span, *ann->span);
      e.annotations.push_back(std::move(*ann));
    }
    e.span = span;
    add_element(m, ids, std::move(e));
  }

  void add_element(Model& m, std::unordered_set<std::string>& ids, Element e) {
    if (!ids.insert(e.id).second) {
      err("E102", "duplicate element id '" + e.id + "'", e.span);
      return;  // keep the first declaration
    }
    m.elements.push_back(std::move(e));
  }

  std::optional<StereotypeApplication> parse_annotation() {
    StereotypeApplication ann;
    SourceSpan span = take().span;  // '@'
    if (peek().kind != TokenKind::Ident) {
      expected("stereotype name after '@'");
      return std::nullopt;
    }
    const Token& name = take();
    ann.stereotype = name.lexeme;
    span = join(span, name.span);
    if (!eat(TokenKind::LParen)) {
      expected("'('");
      return std::nullopt;
    }
    if (peek().kind != TokenKind::RParen) {
      while (true) {
        auto tag = parse_tag();
        if (!tag) return std::nullopt;
        ann.tags.push_back(std::move(*tag));
        if (eat(TokenKind::Comma)) continue;
        break;
      }
    }
    if (peek().kind != TokenKind::RParen) {
      expected("',' or ')'");
      return std::nullopt;
    }
    span = join(span, take().span);
    ann.span = span;
    return ann;
  }

  std::optional<TagAssignment> parse_tag() {
    TagAssignment tag;
    if (peek().kind != TokenKind::Ident) {
      expected("tag name");
      return std::nullopt;
    }
    const Token& name = take();
    tag.name = name.lexeme;
    SourceSpan span = name.span;
    if (!eat(TokenKind::Equals)) {
      expected("'='");
      return std::nullopt;
    }
    const Token& v = peek();
    switch (v.kind) {
      case TokenKind::Number: {
        take();
        span = join(span, v.span);
        Unit unit = Unit::None;
        bool has_unit = false;
        if (peek().kind == TokenKind::UnitPerS) {
          unit = Unit::PerSecond;
          has_unit = true;
          span = join(span, take().span);
        } else if (peek().kind == TokenKind::Ident) {
          if (auto u = unit_from_suffix(peek().lexeme)) {
            unit = *u;
            has_unit = true;
            span = join(span, take().span);
          } else {
            err("E103", "unknown unit suffix '" + peek().lexeme + "'", peek().span);
            take();
            has_unit = true;  // treat as dimensional so conformance sees intent
          }
        }
        if (has_unit || !v.is_integer)
          tag.value = TaggedValue::real(v.num_value, unit);
        else
          tag.value = TaggedValue::integer(static_cast<std::int64_t>(v.num_value));
        break;
      }
      case TokenKind::String:
        take();
        span = join(span, v.span);
        tag.value = TaggedValue::str(v.str_value);
        break;
      case TokenKind::Keyword:
        if (v.lexeme == "true" || v.lexeme == "false") {
          take();
          span = join(span, v.span);
          tag.value = TaggedValue::boolean(v.lexeme == "true");
          break;
        }
        [[fallthrough]];
      default:
        expected("tag value (number, string, true, or false)");
        return std::nullopt;
    }
    tag.span = span;
    return tag;
  }

  void parse_flow(Model& m) {
    Flow f;
    SourceSpan span = take().span;  // 'flow'
    if (peek().kind != TokenKind::Ident) {
      expected("flow source element");
      recover();
      return;
    }
    f.from = take().lexeme;
    if (!eat(TokenKind::Arrow)) {
      expected("'->'");
      recover();
      return;
    }
    if (peek().kind != TokenKind::Ident) {
      expected("flow target element");
      recover();
      return;
    }
    const Token& to = take();
    f.to = to.lexeme;
    span = join(span, to.span);
    if (peek().is_keyword("prob")) {
      take();
      if (peek().kind != TokenKind::Number) {
        expected("probability value");
        recover();
        return;
      }
      const Token& p = take();
      f.probability = p.num_value;
      span = join(span, p.span);
    }
    f.span = span;
    if (f.from == f.to)
      err("E105", "flow '" + f.from + " -> " + f.to + "' is a self-loop", span);
    m.flows.push_back(std::move(f));
  }

  static SourceSpan join(const SourceSpan& a, const SourceSpan& b) {
    SourceSpan s = a;
    s.end_line = b.end_line;
    s.end_col = b.end_col;
    return s;
  }

  std::vector<Token> toks_;
  std::vector<Diagnostic> diags_;
  std::size_t pos_ = 0;
};

}  // namespace detail

// Parse DIA source text. Input is LF-normalized first. The model is present
// iff no error-severity diagnostics were produced; warnings do not block.
inline ParseResult parse(std::string_view text, std::string file = "<input>") {
  std::string normalized = normalize_newlines(text);
  LexResult lexed = lex(normalized, file);
  detail::Parser p(std::move(lexed.tokens), std::move(lexed.diagnostics));
  return p.run();
}

}  // namespace dia
