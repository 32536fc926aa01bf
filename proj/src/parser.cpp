#include "hofin/parser.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace hofin {

const char* to_string(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::SyntaxError: return "SyntaxError";
    case ParseErrorKind::RankMismatch: return "RankMismatch";
    case ParseErrorKind::SortMismatch: return "SortMismatch";
    case ParseErrorKind::UnknownName: return "UnknownName";
    case ParseErrorKind::CyclicDefinition: return "CyclicDefinition";
  }
  return "?";
}

ParseError::ParseError(ParseErrorKind kind, int line, int column, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + " at " + std::to_string(line) + ":" +
                         std::to_string(column) + ": " + message),
      kind_(kind),
      line_(line),
      column_(column) {}

namespace {

enum class Tok { Name, Nat, Backslash, Colon, Dot, LParen, RParen, Arrow, Equals, End };

struct Token {
  Tok kind;
  std::string text;
  int line, column;
};

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    const unsigned char c = static_cast<unsigned char>(src[i]);
    if (std::isspace(c)) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    const int l = line, cl = col;
    if (std::isalpha(c) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\''))
        ++j;
      out.push_back({Tok::Name, src.substr(i, j - i), l, cl});
      advance(j - i);
      continue;
    }
    if (std::isdigit(c)) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Tok::Nat, src.substr(i, j - i), l, cl});
      advance(j - i);
      continue;
    }
    if (src.compare(i, 2, "->") == 0) {
      out.push_back({Tok::Arrow, "->", l, cl});
      advance(2);
      continue;
    }
    if (src.compare(i, 2, "\xce\xbb") == 0) {  // UTF-8 lambda
      out.push_back({Tok::Backslash, "\\", l, cl});
      i += 2;
      ++col;
      continue;
    }
    Tok k;
    switch (c) {
      case '\\': k = Tok::Backslash; break;
      case ':': k = Tok::Colon; break;
      case '.': k = Tok::Dot; break;
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '=': k = Tok::Equals; break;
      default:
        throw ParseError(ParseErrorKind::SyntaxError, l, cl, std::string("unexpected character '") + src[i] + "'");
    }
    out.push_back({k, std::string(1, src[i]), l, cl});
    advance(1);
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program program() {
    Program p;
    while (true) {
      const Token& t = peek();
      if (t.kind == Tok::End)
        throw ParseError(ParseErrorKind::SyntaxError, t.line, t.column, "missing start term");
      if (t.kind == Tok::Name && t.text == "start") {
        next();
        p.start = term();
        expect(Tok::End, "end of input after the start term");
        return p;
      }
      if (t.kind == Tok::Name && t.text == "symbol" && peek(1).kind == Tok::Name) {
        next();
        SymbolDecl d;
        d.name = expect(Tok::Name, "symbol name").text;
        expect(Tok::Colon, "':'");
        d.rank = static_cast<unsigned>(std::stoul(expect(Tok::Nat, "rank").text));
        p.symbols.push_back(std::move(d));
        continue;
      }
      Definition d;
      const Token& name = expect(Tok::Name, "declaration, definition or 'start'");
      d.name = name.text;
      d.line = name.line;
      expect(Tok::Colon, "':'");
      d.sort = sort();
      expect(Tok::Equals, "'='");
      d.body = term();
      p.nonterminals.push_back(std::move(d));
    }
  }

  Sort sort() {
    Sort lhs;
    if (accept(Tok::LParen)) {
      lhs = sort();
      expect(Tok::RParen, "')'");
    } else {
      const Token& t = expect(Tok::Name, "sort");
      if (t.text != "o") throw ParseError(ParseErrorKind::SyntaxError, t.line, t.column, "unknown sort " + t.text);
    }
    if (accept(Tok::Arrow)) return Sort::arrow(lhs, sort());
    return lhs;
  }

  bool at_end() const { return peek().kind == Tok::End; }

 private:
  std::unique_ptr<Expr> term() {
    if (peek().kind == Tok::Backslash) return lambda();
    auto head = atom();
    while (true) {
      if (starts_atom()) {
        auto app = std::make_unique<Expr>();
        app->kind = Expr::Kind::App;
        app->line = head->line;
        app->column = head->column;
        app->left = std::move(head);
        app->right = atom();
        head = std::move(app);
      } else if (peek().kind == Tok::Backslash) {
        // a trailing abstraction argument extends to the end of the term
        auto app = std::make_unique<Expr>();
        app->kind = Expr::Kind::App;
        app->line = head->line;
        app->column = head->column;
        app->left = std::move(head);
        app->right = lambda();
        return app;
      } else {
        return head;
      }
    }
  }

  std::unique_ptr<Expr> lambda() {
    const Token& bs = next();
    auto e = std::make_unique<Expr>();
    e->kind = Expr::Kind::Lambda;
    e->line = bs.line;
    e->column = bs.column;
    e->name = expect(Tok::Name, "binder name").text;
    expect(Tok::Colon, "':' (binder sorts are mandatory)");
    e->binder_sort = sort();
    expect(Tok::Dot, "'.'");
    e->left = term();
    return e;
  }

  bool starts_atom() const {
    const Token& t = peek();
    if (t.kind == Tok::LParen) return true;
    if (t.kind != Tok::Name) return false;
    // a definition or the start keyword begins the next item
    if (t.text == "start") return false;
    if (t.text == "symbol" && peek(1).kind == Tok::Name && peek(2).kind == Tok::Colon) return false;
    return peek(1).kind != Tok::Colon;
  }

  std::unique_ptr<Expr> atom() {
    if (accept(Tok::LParen)) {
      auto e = term();
      expect(Tok::RParen, "')'");
      return e;
    }
    const Token& t = expect(Tok::Name, "term");
    auto e = std::make_unique<Expr>();
    e->kind = Expr::Kind::Name;
    e->name = t.text;
    e->line = t.line;
    e->column = t.column;
    return e;
  }

  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    next();
    return true;
  }
  const Token& expect(Tok k, const std::string& what) {
    if (peek().kind != k) {
      const Token& t = peek();
      throw ParseError(ParseErrorKind::SyntaxError, t.line, t.column,
                       "expected " + what + (t.kind == Tok::End ? " before end of input" : " near '" + t.text + "'"));
    }
    return next();
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

struct Scope {
  std::map<std::string, unsigned> ranks;
  std::map<std::string, Sort> nonterminals;
  std::vector<std::pair<std::string, Sort>> binders;

  const Sort* binder(const std::string& name) const {
    for (auto it = binders.rbegin(); it != binders.rend(); ++it)
      if (it->first == name) return &it->second;
    return nullptr;
  }
};

// Collects the application spine: head plus arguments left to right.
const Expr* spine(const Expr& e, std::vector<const Expr*>& args) {
  const Expr* h = &e;
  while (h->kind == Expr::Kind::App) {
    args.push_back(h->right.get());
    h = h->left.get();
  }
  std::reverse(args.begin(), args.end());
  return h;
}

Sort check(const Expr& e, Scope& scope);

Sort check_name(const Expr& e, Scope& scope, std::size_t applied) {
  if (const Sort* s = scope.binder(e.name)) return *s;
  if (auto it = scope.nonterminals.find(e.name); it != scope.nonterminals.end()) return it->second;
  if (auto it = scope.ranks.find(e.name); it != scope.ranks.end()) {
    if (applied != it->second)
      throw ParseError(ParseErrorKind::RankMismatch, e.line, e.column,
                       "symbol " + e.name + " has rank " + std::to_string(it->second) + " but is applied to " +
                           std::to_string(applied) + " arguments");
    return Sort::ground();
  }
  throw ParseError(ParseErrorKind::UnknownName, e.line, e.column, "unknown name " + e.name);
}

bool is_symbol_head(const Expr& head, const Scope& scope) {
  return head.kind == Expr::Kind::Name && !scope.binder(head.name) && !scope.nonterminals.count(head.name) &&
         scope.ranks.count(head.name);
}

Sort check(const Expr& e, Scope& scope) {
  switch (e.kind) {
    case Expr::Kind::Name:
      return check_name(e, scope, 0);
    case Expr::Kind::Lambda: {
      scope.binders.emplace_back(e.name, e.binder_sort);
      Sort body = check(*e.left, scope);
      scope.binders.pop_back();
      return Sort::arrow(e.binder_sort, body);
    }
    case Expr::Kind::App: {
      std::vector<const Expr*> args;
      const Expr* head = spine(e, args);
      if (is_symbol_head(*head, scope)) {
        check_name(*head, scope, args.size());
        for (const Expr* a : args) {
          Sort s = check(*a, scope);
          if (!s.is_ground())
            throw ParseError(ParseErrorKind::SortMismatch, a->line, a->column,
                             "argument of symbol " + head->name + " has sort " + s.to_string());
        }
        return Sort::ground();
      }
      Sort fs = check(*e.left, scope);
      Sort as = check(*e.right, scope);
      if (fs.is_ground())
        throw ParseError(ParseErrorKind::SortMismatch, e.right->line, e.right->column,
                         "applying a term of sort o to an argument");
      if (!(fs.argument() == as))
        throw ParseError(ParseErrorKind::SortMismatch, e.right->line, e.right->column,
                         "expected an argument of sort " + fs.argument().to_string() + " but got " + as.to_string());
      return fs.result();
    }
  }
  return Sort::ground();
}

void check_program(const Program& p) {
  Scope scope;
  scope.ranks["br"] = 2;
  std::set<std::string> names{"br"};
  for (const auto& s : p.symbols) {
    if (!names.insert(s.name).second)
      throw ParseError(ParseErrorKind::SyntaxError, 0, 0, "name " + s.name + " declared twice");
    scope.ranks[s.name] = s.rank;
  }
  for (const auto& d : p.nonterminals) {
    if (!names.insert(d.name).second)
      throw ParseError(ParseErrorKind::SyntaxError, d.line, 1, "name " + d.name + " declared twice");
    scope.nonterminals.emplace(d.name, d.sort);
  }
  for (const auto& d : p.nonterminals) {
    Sort s = check(*d.body, scope);
    if (!(s == d.sort))
      throw ParseError(ParseErrorKind::SortMismatch, d.body->line, d.body->column,
                       "nonterminal " + d.name + " declared " + d.sort.to_string() + " but its body has sort " +
                           s.to_string());
  }
  Sort s = check(*p.start, scope);
  if (!s.is_ground())
    throw ParseError(ParseErrorKind::SortMismatch, p.start->line, p.start->column,
                     "start term has sort " + s.to_string() + ", expected o");
  // A nonterminal whose body is just another nonterminal is an alias; a
  // cycle of aliases has no node to stand for.
  std::map<std::string, std::string> alias;
  for (const auto& d : p.nonterminals)
    if (d.body->kind == Expr::Kind::Name && scope.nonterminals.count(d.body->name)) alias[d.name] = d.body->name;
  for (const auto& d : p.nonterminals) {
    std::set<std::string> seen;
    for (std::string cur = d.name; alias.count(cur); cur = alias[cur])
      if (!seen.insert(cur).second)
        throw ParseError(ParseErrorKind::CyclicDefinition, d.line, 1,
                         "nonterminal " + d.name + " is defined only through a cycle of nonterminal names");
  }
}

class Elaborator {
 public:
  Elaborator(const Program& p, TermStore& store) : p_(p), store_(store) {}

  Elaboration run() {
    for (const auto& s : p_.symbols) store_.declare_symbol(s.name, s.rank);
    for (const auto& d : p_.nonterminals) knots_.emplace(d.name, store_.reserve_knot(d.name, d.sort));
    std::map<std::string, TermId> bodies;
    for (const auto& d : p_.nonterminals) bodies[d.name] = build(*d.body);
    // Fill real bodies first, then aliases in dependency order.
    std::vector<std::string> pending;
    for (const auto& d : p_.nonterminals) {
      const TermId b = bodies[d.name];
      if (store_.node(b).knot && !store_.is_filled(b))
        pending.push_back(d.name);
      else
        store_.fill_knot(knots_[d.name], b);
    }
    while (!pending.empty()) {
      std::vector<std::string> rest;
      for (const auto& n : pending) {
        if (store_.is_filled(bodies[n]))
          store_.fill_knot(knots_[n], bodies[n]);
        else
          rest.push_back(n);
      }
      if (rest.size() == pending.size()) throw TermError("cyclic nonterminal aliases");
      pending = std::move(rest);
    }
    Elaboration out;
    out.root = build(*p_.start);
    for (const auto& d : p_.nonterminals) out.nonterminals.emplace_back(d.name, knots_[d.name]);
    return out;
  }

 private:
  TermId build(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Name: return name(e);
      case Expr::Kind::Lambda: {
        binders_.emplace_back(e.name, e.binder_sort);
        const TermId body = build(*e.left);
        binders_.pop_back();
        return store_.make_abs(e.binder_sort, body, e.name);
      }
      case Expr::Kind::App: {
        std::vector<const Expr*> args;
        const Expr* head = spine(e, args);
        if (head->kind == Expr::Kind::Name && !binder_index(head->name) && !knots_.count(head->name)) {
          std::vector<TermId> built;
          for (const Expr* a : args) built.push_back(build(*a));
          return store_.make_symbol(*store_.find_symbol(head->name), std::move(built));
        }
        const TermId fn = build(*e.left);
        return store_.make_app(fn, build(*e.right));
      }
    }
    return 0;
  }

  TermId name(const Expr& e) {
    if (auto i = binder_index(e.name)) return store_.make_var(*i, binders_[binders_.size() - 1 - *i].second, e.name);
    if (auto it = knots_.find(e.name); it != knots_.end()) return it->second;
    return store_.make_symbol(*store_.find_symbol(e.name), {});
  }

  std::optional<std::uint32_t> binder_index(const std::string& n) const {
    for (std::size_t i = 0; i < binders_.size(); ++i)
      if (binders_[binders_.size() - 1 - i].first == n) return static_cast<std::uint32_t>(i);
    return std::nullopt;
  }

  const Program& p_;
  TermStore& store_;
  std::map<std::string, TermId> knots_;
  std::vector<std::pair<std::string, Sort>> binders_;
};

}  // namespace

Program parse_program(const std::string& text) {
  Parser parser(lex(text));
  Program p = parser.program();
  check_program(p);
  return p;
}

Program parse_program_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(ParseErrorKind::SyntaxError, 0, 0, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_program(ss.str());
}

Sort parse_sort(const std::string& text) {
  Parser parser(lex(text));
  Sort s = parser.sort();
  if (!parser.at_end()) throw ParseError(ParseErrorKind::SyntaxError, 1, 1, "trailing input after sort");
  return s;
}

Elaboration elaborate(const Program& program, TermStore& store) { return Elaborator(program, store).run(); }

}  // namespace hofin
