#pragma once

// Partially specified Boolean networks: parsing, expansion of uninterpreted
// functions into explicit inputs, and symbolic encoding of update functions.

#include "cscc/errors.hpp"
#include "cscc/symbolic_engine.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cscc {

enum class ExprKind { Constant, Variable, Input, Not, And, Or, Implies, Iff, Apply };

class Expr;

struct ExprNode {
  ExprKind kind = ExprKind::Constant;
  bool value = false;      // Constant
  std::size_t index = 0;   // Variable, Input, Apply (function index)
  std::vector<Expr> args;  // operands / application arguments
};

/// Immutable, cheaply copyable expression handle. Subtrees are shared.
class Expr {
 public:
  Expr() : Expr(constant(false)) {}

  static Expr constant(bool value);
  static Expr variable(std::size_t index);
  static Expr input(std::size_t index);
  static Expr negation(Expr operand);
  static Expr conjunction(Expr lhs, Expr rhs);
  static Expr disjunction(Expr lhs, Expr rhs);
  static Expr implication(Expr lhs, Expr rhs);
  static Expr equivalence(Expr lhs, Expr rhs);
  static Expr apply(std::size_t function, std::vector<Expr> args);

  ExprKind kind() const { return node_->kind; }
  bool value() const { return node_->value; }
  std::size_t index() const { return node_->index; }
  const std::vector<Expr>& args() const { return node_->args; }

  bool mentions(ExprKind kind) const;

 private:
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}
  static Expr make(ExprNode node);
  static Expr binary(ExprKind kind, Expr lhs, Expr rhs);
  std::shared_ptr<const ExprNode> node_;
};

struct FunctionSymbol {
  std::string name;
  std::size_t arity = 0;
};

struct PartialBooleanNetwork {
  std::vector<std::string> variables;
  std::vector<FunctionSymbol> functions;
  std::vector<Expr> updates;  // one per variable
  std::optional<Expr> colour_constraint;
};

struct ExpandedNetwork {
  std::vector<std::string> variables;
  std::vector<std::string> inputs;
  std::vector<Expr> updates;  // no Apply nodes remain
  Expr valid_colour_constraint = Expr::constant(true);
};

enum class ModelErrorKind { Syntax, UndeclaredSymbol, ArityMismatch, Duplicate, MissingUpdate };

class ModelError : public ParseError {
 public:
  ModelError(ModelErrorKind kind, const std::string& message, std::size_t line, std::size_t column)
      : ParseError(message, line, column), kind_(kind) {}
  ModelErrorKind kind() const { return kind_; }

 private:
  ModelErrorKind kind_;
};

/// Reads the `bnet-psbn` text format:
///
///     # comment
///     targets, factors
///     fun f1/1
///     constraint f1_0 => f1_1
///     x1, x1 & f1(x2)
///
/// Operators: ! & | => <=>, parentheses, literals 0/1. Constraint lines may
/// name single truth-table rows as `<fun>_<bits>` (arguments left to right).
PartialBooleanNetwork parse_bnet(std::string_view text);

/// Inverse of parse_bnet: renders a network in the `bnet-psbn` format.
std::string format_bnet(const PartialBooleanNetwork& net);

/// Name of the input holding f(row) where row lists the arguments left to right.
std::string input_name(const FunctionSymbol& f, std::size_t row);

/// Offset of the first input of every function in ExpandedNetwork::inputs;
/// f_k's row r lives at offsets[k] + r, with the first argument as the most
/// significant bit of r.
std::vector<std::size_t> input_offsets(const PartialBooleanNetwork& net);

ExpandedNetwork expand(const PartialBooleanNetwork& net);

std::shared_ptr<const VariableUniverse> make_universe(const ExpandedNetwork& net);

/// b_i as a set over state and input variables.
std::vector<SymSet> encode(const ExpandedNetwork& net, Engine& engine);

/// The admissible colours; a set over input variables.
SymSet valid_colours(const ExpandedNetwork& net, Engine& engine);

SymSet encode_expr(const Expr& e, Engine& engine);

/// Infix rendering using the network's names; used in diagnostics and tests.
std::string to_string(const Expr& e, const std::vector<std::string>& variables,
                      const std::vector<std::string>& inputs,
                      const std::vector<FunctionSymbol>& functions = {});

}  // namespace cscc
