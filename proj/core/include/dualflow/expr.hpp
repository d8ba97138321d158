#pragma once

#include <memory>
#include <string>

namespace dualflow {

// Angular data functions for configs, over a deliberately small grammar:
//
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := number | 'theta' | 'pi' | 'cos' '(' expr ')' | 'sin' '(' expr ')'
//           | '(' expr ')' | '-' factor
//
// Evenness is a property of the samples on a concrete grid, not of the text;
// it is checked where the samples are consumed.
class AngularExpr {
 public:
  // Throws std::invalid_argument with the character position on bad input.
  static AngularExpr parse(const std::string& text);

  double eval(double theta) const;
  const std::string& text() const noexcept { return text_; }

  struct Node;  // implementation detail, incomplete outside the parser

 private:
  AngularExpr(std::string text, std::shared_ptr<const Node> root);
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace dualflow
