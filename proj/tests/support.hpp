#pragma once

#include <memory>
#include <string>

#include "hofin/parser.hpp"
#include "hofin/term.hpp"

namespace hofin::testing {

struct Loaded {
  std::unique_ptr<TermStore> store = std::make_unique<TermStore>();
  Elaboration elab;
  TermId root() const { return elab.root; }
  TermId nonterminal(const std::string& name) const {
    for (const auto& [n, id] : elab.nonterminals)
      if (n == name) return id;
    return 0;
  }
};

inline std::string program_path(const std::string& name) { return std::string(HOFIN_PROGRAMS_DIR) + "/" + name; }

inline Loaded load_file(const std::string& name) {
  Loaded l;
  l.elab = elaborate(parse_program_file(program_path(name)), *l.store);
  return l;
}

inline Loaded load_text(const std::string& text) {
  Loaded l;
  l.elab = elaborate(parse_program(text), *l.store);
  return l;
}

}  // namespace hofin::testing
