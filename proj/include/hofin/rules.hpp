#pragma once

#include <string>
#include <variant>
#include <vector>

#include "hofin/types.hpp"

namespace hofin {

enum class RuleErrorKind { ShapeMismatch, PreconditionViolation, DisjointnessViolation, ArgumentTypeMismatch, DuplicatePremiss };

const char* to_string(RuleErrorKind kind);

// A rule that does not apply. Search treats this as a dead end.
struct RuleError {
  RuleErrorKind kind;
  std::string message;
};

template <class T>
class Checked {
 public:
  Checked(T value) : v_(std::move(value)) {}
  Checked(RuleError e) : v_(std::move(e)) {}

  bool ok() const { return v_.index() == 0; }
  explicit operator bool() const { return ok(); }
  const T& value() const { return std::get<0>(v_); }
  const T& operator*() const { return value(); }
  const T* operator->() const { return &value(); }
  const RuleError& error() const { return std::get<1>(v_); }

 private:
  std::variant<T, RuleError> v_;
};

// Each constructor builds the conclusion of one rule instance from its
// premisses and side data, or explains why the instance is invalid.

Checked<Judgment> rule_br(const TermStore& store, TermId subject, const Judgment& premiss, unsigned which);

Checked<Judgment> rule_var(const TermStore& store, const TypeEnv& env, TermId var, const FullType& stored,
                           unsigned m, OrderSet markers);

Checked<Judgment> rule_lambda(const TermStore& store, TermId subject, const Judgment& premiss, const TypeEnv& env);

// `m` is only consulted when the symbol has rank 0 (otherwise premisses fix it).
Checked<Judgment> rule_con(const TermStore& store, TermId subject, const std::vector<Judgment>& premisses,
                           OrderSet leaf_markers, unsigned m, const TypeEnv& env);

Checked<Judgment> rule_app(const TermStore& store, TermId subject, const Judgment& op,
                           const std::vector<Judgment>& operands, const TypeEnv& env);

// The argument-set element an operand premiss contributes to its operator.
FullType restrict_to_operator(const FullType& operand, unsigned operator_order);

}  // namespace hofin
