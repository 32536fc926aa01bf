#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "hofin/sort.hpp"
#include "hofin/term.hpp"

namespace hofin {

enum class ParseErrorKind { SyntaxError, RankMismatch, SortMismatch, UnknownName, CyclicDefinition };

const char* to_string(ParseErrorKind kind);

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, int line, int column, const std::string& message);
  ParseErrorKind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  ParseErrorKind kind_;
  int line_, column_;
};

// Surface term, names unresolved.
struct Expr {
  enum class Kind { Name, App, Lambda } kind = Kind::Name;
  std::string name;  // Name, or the binder of a Lambda
  Sort binder_sort;  // Lambda
  std::unique_ptr<Expr> left, right;  // App: operator/operand; Lambda: body in left
  int line = 0, column = 0;
};

struct SymbolDecl {
  std::string name;
  unsigned rank = 0;
};

struct Definition {
  std::string name;
  Sort sort;
  std::unique_ptr<Expr> body;
  int line = 0;
};

struct Program {
  std::vector<SymbolDecl> symbols;  // without the builtin br
  std::vector<Definition> nonterminals;
  std::unique_ptr<Expr> start;
};

// Parses and sort-checks. Throws ParseError.
Program parse_program(const std::string& text);
Program parse_program_file(const std::string& path);

struct Elaboration {
  TermId root = 0;
  std::vector<std::pair<std::string, TermId>> nonterminals;  // in declaration order
};

// Interns the program into `store` with every nonterminal occurrence tied to
// its definition's node.
Elaboration elaborate(const Program& program, TermStore& store);

Sort parse_sort(const std::string& text);

}  // namespace hofin
