// Concrete syntax of FO(.) knowledge bases (grammar in docs/grammar.ebnf).
#ifndef FODOT_PARSER_H_
#define FODOT_PARSER_H_

#include <string>
#include <string_view>

#include "fodot/ast.h"

namespace fodot {

// Parses a whole `.idp` source. Throws Error(kParse) carrying every
// diagnostic found; never returns a partial tree.
KnowledgeBase parse_kb(std::string_view text);

// Parses a single expression, e.g. a term given on the command line.
ExprPtr parse_expr(std::string_view text);

// Pretty-printer. parse_kb(print_kb(kb)) == kb for every well-formed kb.
std::string print_kb(const KnowledgeBase& kb);
std::string print_expr(const Expr& e);
std::string print_expr(const ExprPtr& e);
std::string print_rule(const Rule& r);
std::string print_type(const TypeRef& t);
std::string print_signature(const Signature& s);

}  // namespace fodot

#endif  // FODOT_PARSER_H_
