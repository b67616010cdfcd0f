#include "lexer.hpp"

#include <cctype>

namespace gsr::detail {

std::string_view describe(TokenKind kind) {
  switch (kind) {
    case TokenKind::Ident: return "identifier";
    case TokenKind::Integer: return "integer";
    case TokenKind::Real: return "number";
    case TokenKind::String: return "string";
    case TokenKind::LBrace: return "'{'";
    case TokenKind::RBrace: return "'}'";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::Semicolon: return "';'";
    case TokenKind::Comma: return "','";
    case TokenKind::Colon: return "':'";
    case TokenKind::Equals: return "'='";
    case TokenKind::Arrow: return "'->'";
    case TokenKind::Dollar: return "'$'";
    case TokenKind::At: return "'@'";
    case TokenKind::Dot: return "'.'";
    case TokenKind::End: return "end of input";
  }
  return "token";
}

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class Lexer {
 public:
  Lexer(std::string_view src, const std::string& file, std::vector<Diagnostic>& diags)
      : src_(src), file_(file), diags_(diags) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_trivia();
      if (pos_ >= src_.size()) break;
      const int line = line_;
      const int column = column_;
      const std::size_t start = pos_;
      Token tok;
      tok.line = line;
      tok.column = column;
      char c = src_[pos_];
      if (ident_start(c)) {
        while (pos_ < src_.size() && ident_char(src_[pos_])) advance();
        tok.kind = TokenKind::Ident;
        tok.text = std::string(src_.substr(start, pos_ - start));
      } else if (digit(c) || (c == '-' && pos_ + 1 < src_.size() && digit(src_[pos_ + 1]))) {
        lex_number(tok, start);
      } else if (c == '"') {
        if (!lex_string(tok)) continue;
      } else if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
        advance();
        advance();
        tok.kind = TokenKind::Arrow;
      } else {
        TokenKind kind;
        switch (c) {
          case '{': kind = TokenKind::LBrace; break;
          case '}': kind = TokenKind::RBrace; break;
          case '(': kind = TokenKind::LParen; break;
          case ')': kind = TokenKind::RParen; break;
          case ';': kind = TokenKind::Semicolon; break;
          case ',': kind = TokenKind::Comma; break;
          case ':': kind = TokenKind::Colon; break;
          case '=': kind = TokenKind::Equals; break;
          case '$': kind = TokenKind::Dollar; break;
          case '@': kind = TokenKind::At; break;
          case '.': kind = TokenKind::Dot; break;
          default: {
            std::string shown = (static_cast<unsigned char>(c) < 0x20 || static_cast<unsigned char>(c) >= 0x7f)
                                     ? "byte 0x" + hex(static_cast<unsigned char>(c))
                                     : std::string("'") + c + "'";
            error(line, column, 1, "unexpected character " + shown);
            advance();
            continue;
          }
        }
        advance();
        tok.kind = kind;
      }
      tok.length = static_cast<int>(pos_ - start);
      if (tok.length < 1) tok.length = 1;
      out.push_back(std::move(tok));
    }
    Token end;
    end.kind = TokenKind::End;
    end.line = line_;
    end.column = column_;
    out.push_back(end);
    return out;
  }

 private:
  static std::string hex(unsigned value) {
    const char* digits = "0123456789abcdef";
    return {digits[(value >> 4) & 0xf], digits[value & 0xf]};
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else if (src_[pos_] != '\r') {
      ++column_;
    }
    ++pos_;
  }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        advance();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  void lex_number(Token& tok, std::size_t start) {
    if (src_[pos_] == '-') advance();
    while (pos_ < src_.size() && digit(src_[pos_])) advance();
    bool real = false;
    if (pos_ + 1 < src_.size() && src_[pos_] == '.' && digit(src_[pos_ + 1])) {
      real = true;
      advance();
      while (pos_ < src_.size() && digit(src_[pos_])) advance();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && digit(src_[look])) {
        real = true;
        while (pos_ < look) advance();
        while (pos_ < src_.size() && digit(src_[pos_])) advance();
      }
    }
    tok.kind = real ? TokenKind::Real : TokenKind::Integer;
    tok.text = std::string(src_.substr(start, pos_ - start));
  }

  bool lex_string(Token& tok) {
    const int line = line_;
    const int column = column_;
    const std::size_t start = pos_;
    advance();  // opening quote
    std::string value;
    while (pos_ < src_.size() && src_[pos_] != '"') {
      char c = src_[pos_];
      if (c == '\n') break;
      if (c == '\\' && pos_ + 1 < src_.size()) {
        char e = src_[pos_ + 1];
        switch (e) {
          case 'n': value.push_back('\n'); break;
          case 't': value.push_back('\t'); break;
          case 'r': value.push_back('\r'); break;
          case '"': value.push_back('"'); break;
          case '\\': value.push_back('\\'); break;
          default:
            error(line_, column_, 2, std::string("unknown escape '\\") + e + "'");
            value.push_back(e);
        }
        advance();
        advance();
        continue;
      }
      value.push_back(c);
      advance();
    }
    if (pos_ >= src_.size() || src_[pos_] != '"') {
      error(line, column, static_cast<int>(pos_ - start), "unterminated string literal");
      return false;
    }
    advance();  // closing quote
    tok.kind = TokenKind::String;
    tok.text = std::move(value);
    return true;
  }

  void error(int line, int column, int length, std::string message) {
    diags_.push_back(Diagnostic{Severity::Error, "P001", std::move(message),
                                SourceSpan{file_, line, column, length < 1 ? 1 : length}});
  }

  std::string_view src_;
  const std::string& file_;
  std::vector<Diagnostic>& diags_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source, const std::string& file,
                            std::vector<Diagnostic>& diagnostics) {
  return Lexer(source, file, diagnostics).run();
}

}  // namespace gsr::detail
