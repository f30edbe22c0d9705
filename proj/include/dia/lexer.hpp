#pragma once

#include <array>
#include <charconv>
#include <string>
#include <string_view>
#include <vector>

#include "dia/diagnostics.hpp"
#include "dia/text.hpp"

namespace dia {

enum class TokenKind {
  Keyword,
  Ident,
  Number,
  String,
  LBrace,
  RBrace,
  LParen,
  RParen,
  Comma,
  Equals,
  Colon,
  Arrow,
  At,
  UnitPerS,  // "/s"; other unit suffixes lex as plain identifiers
  Error,
  Eof,
};

struct Token {
  TokenKind kind = TokenKind::Eof;
  std::string lexeme;
  std::string leading;  // trivia (spaces, newlines, comments) before the token
  SourceSpan span;

  // Number payload.
  double num_value = 0.0;
  bool is_integer = false;

  // Unescaped string payload.
  std::string str_value;

  bool is_keyword(std::string_view kw) const {
    return kind == TokenKind::Keyword && lexeme == kw;
  }
};

inline bool is_dsl_keyword(std::string_view word) {
  static constexpr std::array<std::string_view, 15> kws = {
      "model", "level", "dpim",    "dtsm", "ddsm",
      "source", "compute", "storage", "host", "service",
      "component", "flow", "prob", "true", "false"};
  for (auto kw : kws)
    if (kw == word) return true;
  return false;
}

struct LexResult {
  std::vector<Token> tokens;  // ends with Eof
  std::vector<Diagnostic> diagnostics;
};

// Total over arbitrary bytes. Unrecognized input becomes Error tokens with
// E100 diagnostics; concatenating leading trivia and lexemes of all tokens
// (Eof included) reproduces the input exactly.
inline LexResult lex(std::string_view text, std::string file = "<input>") {
  LexResult res;
  std::size_t pos = 0;
  int line = 1, col = 1;

  auto advance = [&](std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      if (text[pos + i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    pos += n;
  };

  while (true) {
    std::string trivia;
    // Whitespace and // comments accumulate as trivia.
    while (pos < text.size()) {
      char c = text[pos];
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        trivia += c;
        advance(1);
      } else if (c == '/' && pos + 1 < text.size() && text[pos + 1] == '/') {
        while (pos < text.size() && text[pos] != '\n') {
          trivia += text[pos];
          advance(1);
        }
      } else {
        break;
      }
    }

    Token tok;
    tok.leading = std::move(trivia);
    tok.span = {file, line, col, line, col};

    if (pos >= text.size()) {
      tok.kind = TokenKind::Eof;
      res.tokens.push_back(std::move(tok));
      break;
    }

    char c = text[pos];
    auto finish = [&](TokenKind kind, std::size_t len) {
      tok.kind = kind;
      tok.lexeme = std::string(text.substr(pos, len));
      advance(len);
      tok.span.end_line = line;
      tok.span.end_col = col;
      res.tokens.push_back(std::move(tok));
    };

    if (is_ident_start(c)) {
      std::size_t len = 1;
      while (pos + len < text.size() && is_ident_char(text[pos + len])) ++len;
      std::string_view word = text.substr(pos, len);
      finish(is_dsl_keyword(word) ? TokenKind::Keyword : TokenKind::Ident, len);
      continue;
    }

    if (c >= '0' && c <= '9') {
      std::size_t len = 1;
      bool integer = true;
      while (pos + len < text.size() && text[pos + len] >= '0' && text[pos + len] <= '9') ++len;
      if (pos + len < text.size() && text[pos + len] == '.') {
        std::size_t frac = len + 1;
        if (pos + frac < text.size() && text[pos + frac] >= '0' && text[pos + frac] <= '9') {
          integer = false;
          len = frac;
          while (pos + len < text.size() && text[pos + len] >= '0' && text[pos + len] <= '9') ++len;
        }
      }
      if (pos + len < text.size() && (text[pos + len] == 'e' || text[pos + len] == 'E')) {
        std::size_t exp = len + 1;
        if (pos + exp < text.size() &&
            (text[pos + exp] == '+' || text[pos + exp] == '-'))
          ++exp;
        if (pos + exp < text.size() && text[pos + exp] >= '0' && text[pos + exp] <= '9') {
          integer = false;
          len = exp;
          while (pos + len < text.size() && text[pos + len] >= '0' && text[pos + len] <= '9') ++len;
        }
      }
      std::string_view lit = text.substr(pos, len);
      double value = 0.0;
      auto [p, ec] = std::from_chars(lit.data(), lit.data() + lit.size(), value);
      tok.num_value = value;
      tok.is_integer = integer;
      if (ec != std::errc{} || p != lit.data() + lit.size()) {
        finish(TokenKind::Error, len);
        res.diagnostics.push_back(
            error("E100", "number literal '" + std::string(lit) + "' out of range",
                  res.tokens.back().span));
      } else {
        finish(TokenKind::Number, len);
      }
      continue;
    }

    if (c == '"') {
      std::size_t len = 1;
      std::string value;
      bool closed = false;
      while (pos + len < text.size()) {
        char d = text[pos + len];
        if (d == '"') {
          ++len;
          closed = true;
          break;
        }
        if (d == '\n') break;  // strings do not span lines
        if (d == '\\' && pos + len + 1 < text.size() &&
            (text[pos + len + 1] == '"' || text[pos + len + 1] == '\\')) {
          value += text[pos + len + 1];
          len += 2;
          continue;
        }
        value += d;
        ++len;
      }
      tok.str_value = std::move(value);
      if (!closed) {
        finish(TokenKind::Error, len);
        res.diagnostics.push_back(
            error("E100", "unterminated string literal", res.tokens.back().span));
      } else {
        finish(TokenKind::String, len);
      }
      continue;
    }

    switch (c) {
      case '{': finish(TokenKind::LBrace, 1); continue;
      case '}': finish(TokenKind::RBrace, 1); continue;
      case '(': finish(TokenKind::LParen, 1); continue;
      case ')': finish(TokenKind::RParen, 1); continue;
      case ',': finish(TokenKind::Comma, 1); continue;
      case '=': finish(TokenKind::Equals, 1); continue;
      case ':': finish(TokenKind::Colon, 1); continue;
      case '@': finish(TokenKind::At, 1); continue;
      default: break;
    }

    if (c == '-' && pos + 1 < text.size() && text[pos + 1] == '>') {
      finish(TokenKind::Arrow, 2);
      continue;
    }
    if (c == '/' && pos + 1 < text.size() && text[pos + 1] == 's' &&
        (pos + 2 >= text.size() || !is_ident_char(text[pos + 2]))) {
      finish(TokenKind::UnitPerS, 1 + 1);
      continue;
    }

    finish(TokenKind::Error, 1);
    res.diagnostics.push_back(error(
        "E100",
        "unexpected character '" + std::string(1, c) + "'",
        res.tokens.back().span));
  }

  return res;
}

}  // namespace dia
