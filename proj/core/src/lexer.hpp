#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "gsr/diagnostic.hpp"

namespace gsr::detail {

enum class TokenKind {
  Ident,
  Integer,
  Real,
  String,
  LBrace,
  RBrace,
  LParen,
  RParen,
  Semicolon,
  Comma,
  Colon,
  Equals,
  Arrow,
  Dollar,
  At,
  Dot,
  End,
};

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;  // identifier/number spelling, decoded string contents
  int line = 1;
  int column = 1;
  int length = 1;
};

std::string_view describe(TokenKind kind);

/// Splits source into tokens. Lexical errors are appended to `diagnostics`
/// (code P001) and the offending characters skipped.
std::vector<Token> tokenize(std::string_view source, const std::string& file,
                            std::vector<Diagnostic>& diagnostics);

}  // namespace gsr::detail
