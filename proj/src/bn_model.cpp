#include "cscc/bn_model.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>

namespace cscc {

// ---------------------------------------------------------------------------
// Expr

Expr Expr::make(ExprNode node) { return Expr(std::make_shared<const ExprNode>(std::move(node))); }

Expr Expr::binary(ExprKind kind, Expr lhs, Expr rhs) {
  ExprNode n;
  n.kind = kind;
  n.args = {std::move(lhs), std::move(rhs)};
  return make(std::move(n));
}

Expr Expr::constant(bool value) {
  ExprNode n;
  n.kind = ExprKind::Constant;
  n.value = value;
  return make(std::move(n));
}

Expr Expr::variable(std::size_t index) {
  ExprNode n;
  n.kind = ExprKind::Variable;
  n.index = index;
  return make(std::move(n));
}

Expr Expr::input(std::size_t index) {
  ExprNode n;
  n.kind = ExprKind::Input;
  n.index = index;
  return make(std::move(n));
}

Expr Expr::negation(Expr operand) {
  ExprNode n;
  n.kind = ExprKind::Not;
  n.args = {std::move(operand)};
  return make(std::move(n));
}

Expr Expr::conjunction(Expr lhs, Expr rhs) { return binary(ExprKind::And, std::move(lhs), std::move(rhs)); }
Expr Expr::disjunction(Expr lhs, Expr rhs) { return binary(ExprKind::Or, std::move(lhs), std::move(rhs)); }
Expr Expr::implication(Expr lhs, Expr rhs) { return binary(ExprKind::Implies, std::move(lhs), std::move(rhs)); }
Expr Expr::equivalence(Expr lhs, Expr rhs) { return binary(ExprKind::Iff, std::move(lhs), std::move(rhs)); }

Expr Expr::apply(std::size_t function, std::vector<Expr> args) {
  ExprNode n;
  n.kind = ExprKind::Apply;
  n.index = function;
  n.args = std::move(args);
  return make(std::move(n));
}

bool Expr::mentions(ExprKind k) const {
  if (kind() == k) return true;
  return std::any_of(args().begin(), args().end(), [k](const Expr& a) { return a.mentions(k); });
}

// ---------------------------------------------------------------------------
// Parser

namespace {

enum class Tok { Ident, Zero, One, LParen, RParen, Comma, Slash, Not, And, Or, Implies, Iff, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t column;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'; }

std::vector<Token> lex(std::string_view line, std::size_t line_no) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    const std::size_t col = i + 1;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (ident_start(c)) {
      std::size_t j = i;
      while (j < line.size() && ident_char(line[j])) ++j;
      out.push_back({Tok::Ident, std::string(line.substr(i, j - i)), col});
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
      const std::string digits(line.substr(i, j - i));
      out.push_back({digits == "0" ? Tok::Zero : digits == "1" ? Tok::One : Tok::Ident, digits, col});
      i = j;
    } else if (line.substr(i, 3) == "<=>") {
      out.push_back({Tok::Iff, "<=>", col});
      i += 3;
    } else if (line.substr(i, 2) == "=>") {
      out.push_back({Tok::Implies, "=>", col});
      i += 2;
    } else {
      Tok kind;
      switch (c) {
        case '(': kind = Tok::LParen; break;
        case ')': kind = Tok::RParen; break;
        case ',': kind = Tok::Comma; break;
        case '/': kind = Tok::Slash; break;
        case '!': kind = Tok::Not; break;
        case '&': kind = Tok::And; break;
        case '|': kind = Tok::Or; break;
        default:
          throw ModelError(ModelErrorKind::Syntax, std::string("unexpected character '") + c + "'", line_no, col);
      }
      out.push_back({kind, std::string(1, c), col});
      ++i;
    }
  }
  out.push_back({Tok::End, "", line.size() + 1});
  return out;
}

struct Symbols {
  std::unordered_map<std::string, std::size_t> variables;
  std::unordered_map<std::string, std::size_t> functions;
  const std::vector<FunctionSymbol>* function_list = nullptr;
};

class ExprParser {
 public:
  ExprParser(std::vector<Token> tokens, std::size_t pos, std::size_t line, const Symbols& symbols,
             bool allow_rows)
      : tokens_(std::move(tokens)), pos_(pos), line_(line), symbols_(symbols), allow_rows_(allow_rows) {}

  Expr parse_all() {
    Expr e = equivalence();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
    return e;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_++]; }

  [[noreturn]] void fail(const std::string& message, ModelErrorKind kind = ModelErrorKind::Syntax) const {
    throw ModelError(kind, message, line_, peek().column);
  }

  void expect(Tok kind, const char* what) {
    if (peek().kind != kind) fail(std::string("expected ") + what);
    ++pos_;
  }

  Expr equivalence() {
    Expr lhs = implication();
    while (peek().kind == Tok::Iff) {
      ++pos_;
      lhs = Expr::equivalence(lhs, implication());
    }
    return lhs;
  }

  Expr implication() {
    Expr lhs = disjunction();
    if (peek().kind == Tok::Implies) {
      ++pos_;
      return Expr::implication(lhs, implication());
    }
    return lhs;
  }

  Expr disjunction() {
    Expr lhs = conjunction();
    while (peek().kind == Tok::Or) {
      ++pos_;
      lhs = Expr::disjunction(lhs, conjunction());
    }
    return lhs;
  }

  Expr conjunction() {
    Expr lhs = unary();
    while (peek().kind == Tok::And) {
      ++pos_;
      lhs = Expr::conjunction(lhs, unary());
    }
    return lhs;
  }

  Expr unary() {
    if (peek().kind == Tok::Not) {
      ++pos_;
      return Expr::negation(unary());
    }
    return atom();
  }

  Expr atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Zero: ++pos_; return Expr::constant(false);
      case Tok::One: ++pos_; return Expr::constant(true);
      case Tok::LParen: {
        ++pos_;
        Expr inner = equivalence();
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::Ident: return identifier();
      default: fail(t.kind == Tok::End ? "unexpected end of expression" : "unexpected '" + t.text + "'");
    }
  }

  Expr identifier() {
    const Token name = next();
    if (name.text == "true") return Expr::constant(true);
    if (name.text == "false") return Expr::constant(false);
    if (peek().kind == Tok::LParen) {
      auto f = symbols_.functions.find(name.text);
      if (f == symbols_.functions.end()) {
        throw ModelError(ModelErrorKind::UndeclaredSymbol, "undeclared function '" + name.text + "'", line_,
                         name.column);
      }
      ++pos_;
      std::vector<Expr> args;
      if (peek().kind != Tok::RParen) {
        args.push_back(equivalence());
        while (peek().kind == Tok::Comma) {
          ++pos_;
          args.push_back(equivalence());
        }
      }
      expect(Tok::RParen, "')'");
      const std::size_t arity = (*symbols_.function_list)[f->second].arity;
      if (args.size() != arity) {
        throw ModelError(ModelErrorKind::ArityMismatch,
                         "'" + name.text + "' expects " + std::to_string(arity) + " argument(s), got " +
                             std::to_string(args.size()),
                         line_, name.column);
      }
      return Expr::apply(f->second, std::move(args));
    }
    if (auto v = symbols_.variables.find(name.text); v != symbols_.variables.end()) {
      return Expr::variable(v->second);
    }
    if (auto f = symbols_.functions.find(name.text); f != symbols_.functions.end()) {
      const std::size_t arity = (*symbols_.function_list)[f->second].arity;
      if (arity != 0) {
        throw ModelError(ModelErrorKind::ArityMismatch, "'" + name.text + "' needs arguments", line_, name.column);
      }
      return Expr::apply(f->second, {});
    }
    if (allow_rows_) {
      if (auto row = row_reference(name.text)) return *row;
    }
    throw ModelError(ModelErrorKind::UndeclaredSymbol, "undeclared symbol '" + name.text + "'", line_,
                     name.column);
  }

  // `<fun>_<bits>` names one truth-table row: f(bit_1, ..., bit_a).
  std::optional<Expr> row_reference(const std::string& text) const {
    const auto cut = text.rfind('_');
    if (cut == std::string::npos) return std::nullopt;
    auto f = symbols_.functions.find(text.substr(0, cut));
    if (f == symbols_.functions.end()) return std::nullopt;
    const std::string bits = text.substr(cut + 1);
    if (bits.size() != (*symbols_.function_list)[f->second].arity || bits.empty()) return std::nullopt;
    std::vector<Expr> args;
    for (char b : bits) {
      if (b != '0' && b != '1') return std::nullopt;
      args.push_back(Expr::constant(b == '1'));
    }
    return Expr::apply(f->second, std::move(args));
  }

  std::vector<Token> tokens_;
  std::size_t pos_;
  std::size_t line_;
  const Symbols& symbols_;
  bool allow_rows_;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_header(const std::vector<Token>& t) {
  auto lower = [](std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
  };
  return t.size() == 4 && t[0].kind == Tok::Ident && lower(t[0].text) == "targets" && t[1].kind == Tok::Comma &&
         t[2].kind == Tok::Ident && lower(t[2].text) == "factors";
}

enum class LineKind { Function, Constraint, Update };

struct Line {
  std::size_t number;
  LineKind kind;
  std::vector<Token> tokens;
};

}  // namespace

PartialBooleanNetwork parse_bnet(std::string_view text) {
  std::vector<Line> lines;
  std::size_t number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find('\n', start), text.size());
    ++number;
    std::string_view raw = text.substr(start, end - start);
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    start = end + 1;
    if (trim(raw).empty()) continue;
    auto tokens = lex(raw, number);
    if (is_header(tokens)) continue;
    const bool keyword = tokens.size() > 1 && tokens[0].kind == Tok::Ident && tokens[1].kind != Tok::Comma;
    if (keyword && tokens[0].text == "fun") {
      lines.push_back({number, LineKind::Function, std::move(tokens)});
    } else if (keyword && tokens[0].text == "constraint") {
      lines.push_back({number, LineKind::Constraint, std::move(tokens)});
    } else {
      lines.push_back({number, LineKind::Update, std::move(tokens)});
    }
  }

  PartialBooleanNetwork net;
  Symbols symbols;
  symbols.function_list = &net.functions;

  // Declarations first so that expressions may refer forward.
  for (const Line& l : lines) {
    const auto& t = l.tokens;
    if (l.kind == LineKind::Function) {
      if (t.size() != 5 || t[1].kind != Tok::Ident || t[2].kind != Tok::Slash ||
          (t[3].kind != Tok::Zero && t[3].kind != Tok::One && t[3].kind != Tok::Ident) || t[4].kind != Tok::End ||
          !std::all_of(t[3].text.begin(), t[3].text.end(), [](unsigned char c) { return std::isdigit(c); })) {
        throw ModelError(ModelErrorKind::Syntax, "expected 'fun <name>/<arity>'", l.number, t[0].column);
      }
      const std::string& name = t[1].text;
      if (symbols.functions.contains(name)) {
        throw ModelError(ModelErrorKind::Duplicate, "function '" + name + "' declared twice", l.number, t[1].column);
      }
      const std::size_t arity = std::stoul(t[3].text);
      if (arity > 16) throw ModelError(ModelErrorKind::Syntax, "arity too large", l.number, t[3].column);
      symbols.functions.emplace(name, net.functions.size());
      net.functions.push_back({name, arity});
    } else if (l.kind == LineKind::Update) {
      if (t.size() < 3 || t[0].kind != Tok::Ident || t[1].kind != Tok::Comma) {
        throw ModelError(ModelErrorKind::Syntax, "expected '<target>, <expression>'", l.number, t[0].column);
      }
      const std::string& name = t[0].text;
      if (symbols.variables.contains(name)) {
        throw ModelError(ModelErrorKind::Duplicate, "variable '" + name + "' has two update functions", l.number,
                         t[0].column);
      }
      symbols.variables.emplace(name, net.variables.size());
      net.variables.push_back(name);
    }
  }
  for (const auto& [name, index] : symbols.functions) {
    if (symbols.variables.contains(name)) {
      throw ModelError(ModelErrorKind::Duplicate, "'" + name + "' is both a variable and a function", 0, 0);
    }
  }
  if (net.variables.empty()) throw ModelError(ModelErrorKind::MissingUpdate, "network has no variables", number, 1);

  net.updates.resize(net.variables.size());
  for (const Line& l : lines) {
    if (l.kind == LineKind::Update) {
      ExprParser parser(l.tokens, 2, l.number, symbols, false);
      net.updates[symbols.variables.at(l.tokens[0].text)] = parser.parse_all();
    } else if (l.kind == LineKind::Constraint) {
      ExprParser parser(l.tokens, 1, l.number, symbols, true);
      Expr c = parser.parse_all();
      net.colour_constraint = net.colour_constraint ? Expr::conjunction(*net.colour_constraint, c) : c;
    }
  }
  return net;
}

// ---------------------------------------------------------------------------
// Expansion

std::string format_bnet(const PartialBooleanNetwork& net) {
  std::string out = "targets, factors\n";
  for (const FunctionSymbol& f : net.functions) out += "fun " + f.name + "/" + std::to_string(f.arity) + "\n";
  if (net.colour_constraint) {
    out += "constraint " + to_string(*net.colour_constraint, net.variables, {}, net.functions) + "\n";
  }
  for (std::size_t i = 0; i < net.variables.size(); ++i) {
    out += net.variables[i] + ", " + to_string(net.updates[i], net.variables, {}, net.functions) + "\n";
  }
  return out;
}

std::string input_name(const FunctionSymbol& f, std::size_t row) {
  if (f.arity == 0) return f.name;
  std::string bits(f.arity, '0');
  for (std::size_t k = 0; k < f.arity; ++k) {
    if ((row >> (f.arity - 1 - k)) & 1u) bits[k] = '1';
  }
  return f.name + "_" + bits;
}

std::vector<std::size_t> input_offsets(const PartialBooleanNetwork& net) {
  std::vector<std::size_t> offsets;
  std::size_t next = 0;
  for (const auto& f : net.functions) {
    offsets.push_back(next);
    next += std::size_t{1} << f.arity;
  }
  return offsets;
}

namespace {

class Expander {
 public:
  explicit Expander(const PartialBooleanNetwork& net) : net_(net), offsets_(input_offsets(net)) {}

  Expr rewrite(const Expr& e) const {
    switch (e.kind()) {
      case ExprKind::Constant:
      case ExprKind::Variable:
      case ExprKind::Input: return e;
      case ExprKind::Not: return Expr::negation(rewrite(e.args()[0]));
      case ExprKind::And: return Expr::conjunction(rewrite(e.args()[0]), rewrite(e.args()[1]));
      case ExprKind::Or: return Expr::disjunction(rewrite(e.args()[0]), rewrite(e.args()[1]));
      case ExprKind::Implies: return Expr::implication(rewrite(e.args()[0]), rewrite(e.args()[1]));
      case ExprKind::Iff: return Expr::equivalence(rewrite(e.args()[0]), rewrite(e.args()[1]));
      case ExprKind::Apply: {
        std::vector<Expr> args;
        for (const Expr& a : e.args()) args.push_back(rewrite(a));
        return unfold(e.index(), args, 0, 0);
      }
    }
    return e;
  }

 private:
  // f(a_i, ..., a_n) == (a_i => f_1(...)) & (!a_i => f_0(...)), positive branch first.
  Expr unfold(std::size_t f, const std::vector<Expr>& args, std::size_t i, std::size_t row) const {
    if (i == args.size()) return Expr::input(offsets_[f] + row);
    Expr positive = Expr::implication(args[i], unfold(f, args, i + 1, (row << 1) | 1u));
    Expr negative = Expr::implication(Expr::negation(args[i]), unfold(f, args, i + 1, row << 1));
    return Expr::conjunction(std::move(positive), std::move(negative));
  }

  const PartialBooleanNetwork& net_;
  std::vector<std::size_t> offsets_;
};

}  // namespace

ExpandedNetwork expand(const PartialBooleanNetwork& net) {
  ExpandedNetwork out;
  out.variables = net.variables;
  for (const auto& f : net.functions) {
    for (std::size_t row = 0; row < (std::size_t{1} << f.arity); ++row) out.inputs.push_back(input_name(f, row));
  }
  Expander expander(net);
  for (const Expr& u : net.updates) out.updates.push_back(expander.rewrite(u));
  if (net.colour_constraint) out.valid_colour_constraint = expander.rewrite(*net.colour_constraint);
  return out;
}

// ---------------------------------------------------------------------------
// Symbolic encoding

std::shared_ptr<const VariableUniverse> make_universe(const ExpandedNetwork& net) {
  return std::make_shared<const VariableUniverse>(net.variables, net.inputs);
}

SymSet encode_expr(const Expr& e, Engine& engine) {
  const VariableUniverse& u = engine.universe();
  switch (e.kind()) {
    case ExprKind::Constant: return e.value() ? engine.full() : engine.empty();
    case ExprKind::Variable:
      if (e.index() >= u.state_count()) throw ContractViolation("expression refers to an unknown variable");
      return engine.literal(u.state_var(e.index()), true);
    case ExprKind::Input:
      if (e.index() >= u.input_count()) throw ContractViolation("expression refers to an unknown input");
      return engine.literal(u.input_var(e.index()), true);
    case ExprKind::Not: return engine.complement(encode_expr(e.args()[0], engine));
    case ExprKind::And: return encode_expr(e.args()[0], engine) & encode_expr(e.args()[1], engine);
    case ExprKind::Or: return encode_expr(e.args()[0], engine) | encode_expr(e.args()[1], engine);
    case ExprKind::Implies:
      return engine.complement(encode_expr(e.args()[0], engine)) | encode_expr(e.args()[1], engine);
    case ExprKind::Iff: {
      SymSet a = encode_expr(e.args()[0], engine);
      SymSet b = encode_expr(e.args()[1], engine);
      return (a & b) | (engine.complement(a) & engine.complement(b));
    }
    case ExprKind::Apply: throw ContractViolation("cannot encode an uninterpreted function; expand first");
  }
  throw ContractViolation("unknown expression kind");
}

std::vector<SymSet> encode(const ExpandedNetwork& net, Engine& engine) {
  StepCounter::Pause quiet(engine.steps());
  const VariableUniverse& u = engine.universe();
  if (u.state_count() != net.variables.size() || u.input_count() != net.inputs.size()) {
    throw ContractViolation("universe does not match the network");
  }
  const VarSet domain = u.state_vars() | u.input_vars();
  std::vector<SymSet> out;
  for (const Expr& b : net.updates) out.push_back(encode_expr(b, engine) | engine.empty(domain));
  return out;
}

SymSet valid_colours(const ExpandedNetwork& net, Engine& engine) {
  if (net.valid_colour_constraint.mentions(ExprKind::Variable)) {
    throw ContractViolation("colour constraint mentions a state variable");
  }
  StepCounter::Pause quiet(engine.steps());
  return encode_expr(net.valid_colour_constraint, engine) | engine.empty(engine.universe().input_vars());
}

// ---------------------------------------------------------------------------
// Printing

std::string to_string(const Expr& e, const std::vector<std::string>& variables,
                      const std::vector<std::string>& inputs, const std::vector<FunctionSymbol>& functions) {
  auto sub = [&](const Expr& a) { return to_string(a, variables, inputs, functions); };
  auto wrap = [&](const Expr& a) {
    const bool atomic = a.kind() == ExprKind::Constant || a.kind() == ExprKind::Variable ||
                        a.kind() == ExprKind::Input || a.kind() == ExprKind::Apply || a.kind() == ExprKind::Not;
    return atomic ? sub(a) : "(" + sub(a) + ")";
  };
  switch (e.kind()) {
    case ExprKind::Constant: return e.value() ? "1" : "0";
    case ExprKind::Variable: return e.index() < variables.size() ? variables[e.index()] : "?";
    case ExprKind::Input: return e.index() < inputs.size() ? inputs[e.index()] : "?";
    case ExprKind::Not: return "!" + wrap(e.args()[0]);
    case ExprKind::And: return wrap(e.args()[0]) + " & " + wrap(e.args()[1]);
    case ExprKind::Or: return wrap(e.args()[0]) + " | " + wrap(e.args()[1]);
    case ExprKind::Implies: return wrap(e.args()[0]) + " => " + wrap(e.args()[1]);
    case ExprKind::Iff: return wrap(e.args()[0]) + " <=> " + wrap(e.args()[1]);
    case ExprKind::Apply: {
      std::string s = e.index() < functions.size() ? functions[e.index()].name : "f?";
      s += "(";
      for (std::size_t i = 0; i < e.args().size(); ++i) s += (i ? ", " : "") + sub(e.args()[i]);
      return s + ")";
    }
  }
  return "?";
}

}  // namespace cscc
