#include <charconv>
#include <map>
#include <set>

#include "gsr/dsl.hpp"
#include "lexer.hpp"

namespace gsr {

namespace {

using detail::Token;
using detail::TokenKind;

// Words that introduce statements or clauses and so cannot name entities.
const std::set<std::string, std::less<>> kReserved{
    "diagram", "starter", "runtime", "transaction", "wait",    "actuator",
    "action",  "sensor",  "state",   "logical",     "handler", "on",
    "in",      "when",    "channel", "true",        "false",
};

struct SyntaxError {
  Diagnostic diagnostic;
};

/// Statement context: the command a statement is nested in.
struct Scope {
  std::string id;
  std::vector<DeclaredState>* states = nullptr;
  RuntimeCommand* runtime = nullptr;
  TransactionCommand* transaction = nullptr;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::string file)
      : tokens_(std::move(tokens)), file_(std::move(file)), spans_(file_) {}

  ParseResult run(std::vector<Diagnostic> lexical) {
    diags_ = std::move(lexical);
    try {
      parse_diagram();
    } catch (const SyntaxError& e) {
      diags_.push_back(e.diagnostic);
    }
    ParseResult result;
    result.spans = std::move(spans_);
    if (!has_errors(diags_)) result.diagram = std::move(diagram_);
    result.diagnostics = std::move(diags_);
    return result;
  }

 private:
  // -- token helpers -------------------------------------------------------

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }
  bool at(TokenKind kind) const { return peek().kind == kind; }
  bool at_word(std::string_view word) const {
    return peek().kind == TokenKind::Ident && peek().text == word;
  }
  const Token& next() {
    const Token& tok = peek();
    if (pos_ < tokens_.size() - 1) ++pos_;
    return tok;
  }

  SourceSpan span_of(const Token& tok) const {
    return SourceSpan{file_, tok.line, tok.column, tok.length};
  }

  [[noreturn]] void fail(const Token& tok, const std::string& message,
                         const std::string& code = "P002") const {
    throw SyntaxError{Diagnostic{Severity::Error, code, message, span_of(tok)}};
  }

  std::string found(const Token& tok) const {
    if (tok.kind == TokenKind::Ident) return "'" + tok.text + "'";
    if (tok.kind == TokenKind::String) return "string " + quote_string(tok.text);
    if (tok.kind == TokenKind::Integer || tok.kind == TokenKind::Real) return "number " + tok.text;
    return std::string(detail::describe(tok.kind));
  }

  const Token& expect(TokenKind kind, std::string_view context) {
    if (!at(kind)) {
      fail(peek(), "expected " + std::string(detail::describe(kind)) + " " + std::string(context) +
                       ", found " + found(peek()));
    }
    return next();
  }

  void expect_word(std::string_view word, std::string_view context) {
    if (!at_word(word)) {
      fail(peek(), "expected '" + std::string(word) + "' " + std::string(context) + ", found " +
                       found(peek()));
    }
    next();
  }

  /// An identifier naming an entity (reserved words rejected).
  const Token& identifier(std::string_view context) {
    const Token& tok = expect(TokenKind::Ident, context);
    if (kReserved.count(tok.text)) {
      fail(tok, "'" + tok.text + "' is a reserved word and cannot be used " + std::string(context),
           "P004");
    }
    return tok;
  }

  /// Declares a new entity id, reporting collisions with both sites.
  void declare(const Token& tok) {
    auto [it, inserted] = ids_.try_emplace(tok.text, span_of(tok));
    if (!inserted) {
      diags_.push_back(Diagnostic{
          Severity::Error, "P003",
          "duplicate identifier '" + tok.text + "' (first declared at " + file_ + ":" +
              std::to_string(it->second.line) + ":" + std::to_string(it->second.column) + ")",
          span_of(tok)});
      return;
    }
    spans_.set(tok.text, span_of(tok));
  }

  /// Skips the rest of a malformed statement: through the next ';' at the
  /// current nesting level, or over a complete `{ ... }` block.
  void synchronize() {
    int depth = 0;
    while (!at(TokenKind::End)) {
      if (at(TokenKind::LBrace)) {
        ++depth;
      } else if (at(TokenKind::RBrace)) {
        if (depth == 0) return;
        --depth;
        if (depth == 0) {
          next();
          return;
        }
      } else if (at(TokenKind::Semicolon) && depth == 0) {
        next();
        return;
      }
      next();
    }
  }

  /// Runs `body` for each statement of a `{ ... }` block, recovering from
  /// errors statement by statement.
  template <typename F>
  void block(std::string_view what, F&& body) {
    expect(TokenKind::LBrace, "to open " + std::string(what));
    while (!at(TokenKind::RBrace)) {
      if (at(TokenKind::End)) fail(peek(), "expected '}' to close " + std::string(what));
      const std::size_t before = pos_;
      try {
        body();
      } catch (const SyntaxError& e) {
        diags_.push_back(e.diagnostic);
        if (pos_ == before) next();
        synchronize();
      }
    }
    next();
  }

  // -- literals and parameters ----------------------------------------------

  Literal number(const Token& tok) {
    if (tok.kind == TokenKind::Integer) {
      std::int64_t value = 0;
      auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), value);
      if (ec != std::errc() || ptr != tok.text.data() + tok.text.size()) {
        fail(tok, "integer literal out of range: " + tok.text, "P005");
      }
      return value;
    }
    double value = 0;
    auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), value);
    if (ec != std::errc() || ptr != tok.text.data() + tok.text.size()) {
      fail(tok, "invalid number: " + tok.text, "P005");
    }
    return value;
  }

  double real_argument(std::string_view context) {
    const Token& tok = peek();
    if (!at(TokenKind::Integer) && !at(TokenKind::Real)) {
      fail(tok, "expected a number " + std::string(context) + ", found " + found(tok));
    }
    next();
    Literal lit = number(tok);
    if (const auto* i = std::get_if<std::int64_t>(&lit)) return static_cast<double>(*i);
    return std::get<double>(lit);
  }

  Binding value() {
    const Token& tok = peek();
    switch (tok.kind) {
      case TokenKind::Integer:
      case TokenKind::Real:
        next();
        return Constant{number(tok)};
      case TokenKind::String:
        next();
        return Constant{tok.text};
      case TokenKind::Dollar: {
        next();
        const Token& name = expect(TokenKind::Ident, "after '$'");
        return Variable{name.text};
      }
      case TokenKind::At: {
        next();
        FactoryCall call;
        const Token& first = expect(TokenKind::Ident, "after '@'");
        if (at(TokenKind::Dot)) {
          next();
          call.receiver = first.text;
          call.function = expect(TokenKind::Ident, "as factory name").text;
        } else {
          call.function = first.text;
        }
        expect(TokenKind::LParen, "to open factory arguments");
        while (!at(TokenKind::RParen)) {
          call.args.push_back(Parameter{"", value()});
          if (!at(TokenKind::Comma)) break;
          next();
        }
        expect(TokenKind::RParen, "to close factory arguments");
        return call;
      }
      case TokenKind::Ident:
        if (tok.text == "true" || tok.text == "false") {
          next();
          return Constant{tok.text == "true"};
        }
        [[fallthrough]];
      default:
        fail(tok, "expected a value (literal, $variable or @factory(...)), found " + found(tok));
    }
  }

  /// `( name = value, ... )`, optional. `owner` prefixes the source-map keys.
  std::vector<Parameter> parameters(const std::string& owner) {
    std::vector<Parameter> out;
    if (!at(TokenKind::LParen)) return out;
    next();
    std::set<std::string> seen;
    while (!at(TokenKind::RParen)) {
      const Token& name = expect(TokenKind::Ident, "as parameter name");
      if (!seen.insert(name.text).second) {
        fail(name, "duplicate parameter '" + name.text + "'", "P007");
      }
      expect(TokenKind::Equals, "after parameter name");
      out.push_back(Parameter{name.text, value()});
      spans_.set(owner + "." + name.text, span_of(name));
      if (!at(TokenKind::Comma)) break;
      next();
    }
    expect(TokenKind::RParen, "to close parameter list");
    return out;
  }

  // -- statements -----------------------------------------------------------

  void parse_diagram() {
    expect_word("diagram", "at start of file");
    const Token& name = identifier("as diagram name");
    diagram_.name = name.text;
    declare(name);
    Scope root{diagram_.name, &diagram_.states, nullptr, nullptr};
    block("diagram", [&] {
      if (at_word("starter")) return starter();
      if (at_word("sensor")) return top_sensor();
      if (at_word("runtime") || at_word("transaction") || at_word("wait")) {
        diagram_.commands.push_back(command());
        return;
      }
      if (common_statement(root)) return;
      fail(peek(), "expected a diagram statement (starter, runtime, transaction, wait, sensor, "
                   "state, logical, handler), found " + found(peek()));
    });
    if (!at(TokenKind::End)) fail(peek(), "unexpected " + found(peek()) + " after diagram");
  }

  /// state / logical / handler: valid in every block.
  bool common_statement(const Scope& scope) {
    if (at_word("state")) {
      state(scope);
      return true;
    }
    if (at_word("logical")) {
      logical();
      return true;
    }
    if (at_word("handler")) {
      handler(scope);
      return true;
    }
    return false;
  }

  void starter() {
    next();
    const Token& id = identifier("as starter name");
    Starter s;
    s.id = id.text;
    expect(TokenKind::Arrow, "after starter name");
    do {
      s.targets.push_back(identifier("as starter target").text);
      if (!at(TokenKind::Comma)) break;
      next();
    } while (at(TokenKind::Ident));
    expect(TokenKind::Semicolon, "after starter");
    declare(id);
    diagram_.starters.push_back(std::move(s));
  }

  Sensor sensor_head() {
    next();
    const Token& id = identifier("as sensor name");
    expect(TokenKind::Colon, "after sensor name");
    Sensor s;
    s.id = id.text;
    s.sensor_type = expect(TokenKind::Ident, "as sensor type").text;
    declare(id);
    return s;
  }

  void sensor_channel(Sensor& s) {
    expect_word("channel", "in sensor declaration");
    s.channel = expect(TokenKind::String, "as channel name").text;
    expect(TokenKind::Semicolon, "after sensor");
  }

  void top_sensor() {
    Sensor s = sensor_head();
    if (at_word("on")) {
      fail(peek(), "sensors attached to an actuator must be declared in its runtime command",
           "P006");
    }
    sensor_channel(s);
    diagram_.top_sensors.push_back(std::move(s));
  }

  void runtime_sensor(RuntimeCommand& rt) {
    Sensor s = sensor_head();
    expect_word("on", "naming the actuator the sensor belongs to");
    const Token& owner = identifier("as actuator name");
    sensor_channel(s);
    for (auto& actuator : rt.actuators) {
      if (actuator.id == owner.text) {
        actuator.sensors.push_back(std::move(s));
        return;
      }
    }
    fail(owner, "'" + owner.text + "' is not an actuator declared earlier in runtime '" + rt.id + "'",
         "P006");
  }

  void state(const Scope& scope) {
    next();
    const Token& id = identifier("as state name");
    expect(TokenKind::Colon, "after state name");
    const Token& kind_tok = expect(TokenKind::Ident, "as state kind");
    auto kind = parse_state_kind(kind_tok.text);
    if (!kind) fail(kind_tok, "unknown state kind '" + kind_tok.text + "'");
    DeclaredState st;
    st.id = id.text;
    st.kind = *kind;
    if (has_argument(*kind)) {
      expect(TokenKind::LParen, "before state argument");
      st.argument = real_argument("as state argument");
      expect(TokenKind::RParen, "after state argument");
    }
    if (*kind == StateKind::Raised) {
      st.owner = scope.id;
    } else {
      expect_word("on", "naming the state owner");
      st.owner = identifier("as state owner").text;
    }
    expect(TokenKind::Semicolon, "after state");
    declare(id);
    scope.states->push_back(std::move(st));
  }

  void logical() {
    next();
    const Token& id = identifier("as logical state name");
    expect(TokenKind::Colon, "after logical state name");
    const Token& op_tok = expect(TokenKind::Ident, "as logical operator");
    auto op = parse_logic_op(op_tok.text);
    if (!op) fail(op_tok, "unknown logical operator '" + op_tok.text + "' (and, or, not, ever)");
    LogicalState ls;
    ls.id = id.text;
    ls.op = *op;
    expect(TokenKind::LParen, "to open logical inputs");
    while (!at(TokenKind::RParen)) {
      ls.inputs.push_back(identifier("as logical input").text);
      if (!at(TokenKind::Comma)) break;
      next();
    }
    expect(TokenKind::RParen, "to close logical inputs");
    expect(TokenKind::Semicolon, "after logical state");
    declare(id);
    diagram_.logical_states.push_back(std::move(ls));
  }

  void handler(const Scope& scope) {
    const Token& head = next();
    EventHandler h;
    h.scope = scope.id;
    const Token* id = nullptr;
    if (!at_word("on") && !at_word("in")) id = &identifier("as handler name");
    if (at_word("in")) {
      next();
      h.scope = identifier("as handler scope").text;
    }
    expect_word("on", "before handler state");
    h.source = identifier("as handler state").text;
    const Token& trig = expect(TokenKind::Ident, "as handler trigger");
    auto trigger = parse_trigger(trig.text);
    if (!trigger) {
      fail(trig, "unknown trigger '" + trig.text + "' (entered, first_entered, left, first_left)");
    }
    h.trigger = *trigger;
    const Token& eff = expect(TokenKind::Ident, "as handler effect");
    auto effect = parse_effect(eff.text);
    if (!effect) {
      fail(eff, "unknown effect '" + eff.text + "' (start, stop, cancel, raise, external)");
    }
    h.effect.kind = *effect;
    if (*effect == EffectKind::External) {
      h.effect.target = expect(TokenKind::String, "as external tag").text;
    } else {
      h.effect.target = identifier("as effect target").text;
    }
    expect(TokenKind::Semicolon, "after handler");
    if (id) {
      h.id = id->text;
      declare(*id);
    }
    spans_.set("handler#" + std::to_string(diagram_.handlers.size()), span_of(id ? *id : head));
    diagram_.handlers.push_back(std::move(h));
  }

  Command command() {
    if (at_word("runtime")) return runtime();
    if (at_word("transaction")) return transaction();
    return wait();
  }

  Command runtime() {
    next();
    const Token& id = identifier("as command name");
    declare(id);
    Command cmd{RuntimeCommand{}};
    auto& rt = std::get<RuntimeCommand>(cmd.node);
    rt.id = id.text;
    Scope scope{rt.id, &rt.states, &rt, nullptr};
    block("runtime command", [&] {
      if (at_word("actuator")) {
        next();
        const Token& aid = identifier("as actuator name");
        expect(TokenKind::Colon, "after actuator name");
        Actuator a;
        a.id = aid.text;
        a.device_type = expect(TokenKind::Ident, "as device type").text;
        declare(aid);
        a.config = parameters(a.id);
        expect(TokenKind::Semicolon, "after actuator");
        rt.actuators.push_back(std::move(a));
        return;
      }
      if (at_word("action")) {
        next();
        const Token& aid = identifier("as action name");
        expect(TokenKind::Colon, "after action name");
        Action a;
        a.id = aid.text;
        a.action_type = expect(TokenKind::Ident, "as action type").text;
        declare(aid);
        a.params = parameters(a.id);
        expect(TokenKind::Semicolon, "after action");
        rt.actions.push_back(std::move(a));
        return;
      }
      if (at_word("sensor")) return runtime_sensor(rt);
      if (common_statement(scope)) return;
      fail(peek(), "expected a runtime statement (actuator, action, sensor, state, logical, "
                   "handler), found " + found(peek()));
    });
    return cmd;
  }

  Command transaction() {
    next();
    const Token& id = identifier("as command name");
    declare(id);
    Command cmd{TransactionCommand{}};
    auto& tx = std::get<TransactionCommand>(cmd.node);
    tx.id = id.text;
    block("transaction command", [&] {
      Scope scope{tx.id, &tx.states, nullptr, &tx};
      if (at_word("runtime") || at_word("transaction") || at_word("wait")) {
        tx.children.push_back(command());
        return;
      }
      if (at_word("start")) {
        next();
        do {
          AutoStart as;
          as.child = identifier("as auto-start command").text;
          if (at_word("when")) {
            next();
            as.guard = identifier("as start condition").text;
          }
          tx.auto_start.push_back(std::move(as));
          if (!at(TokenKind::Comma)) break;
          next();
        } while (at(TokenKind::Ident));
        expect(TokenKind::Semicolon, "after start list");
        return;
      }
      if (common_statement(scope)) return;
      fail(peek(), "expected a transaction statement (runtime, transaction, wait, start, state, "
                   "logical, handler), found " + found(peek()));
    });
    return cmd;
  }

  Command wait() {
    next();
    const Token& id = identifier("as command name");
    declare(id);
    Command cmd{WaitCommand{}};
    auto& w = std::get<WaitCommand>(cmd.node);
    w.id = id.text;
    expect(TokenKind::LParen, "before wait duration");
    const Token& dur = peek();
    if (!at(TokenKind::Integer) || dur.text.front() == '-') {
      fail(dur, "expected a non-negative integer tick count, found " + found(dur));
    }
    next();
    w.duration_ticks = std::get<std::int64_t>(number(dur));
    expect(TokenKind::RParen, "after wait duration");
    if (at(TokenKind::Semicolon)) {
      next();
      return cmd;
    }
    Scope scope{w.id, &w.states, nullptr, nullptr};
    block("wait command", [&] {
      if (common_statement(scope)) return;
      fail(peek(), "expected a wait statement (state, logical, handler), found " + found(peek()));
    });
    return cmd;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::string file_;
  SourceMap spans_;
  std::vector<Diagnostic> diags_;
  std::map<std::string, SourceSpan> ids_;
  Diagram diagram_;
};

}  // namespace

ParseResult parse(std::string_view source, std::string file) {
  std::vector<Diagnostic> lexical;
  auto tokens = detail::tokenize(source, file, lexical);
  return Parser(std::move(tokens), std::move(file)).run(std::move(lexical));
}

}  // namespace gsr
