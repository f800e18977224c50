#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace hfde::expr {

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

/** One node of a parsed arithmetic expression. */
struct ExprNode {
    enum class Kind { Number, Variable, Unary, Binary, Call };

    Kind kind;
    double value = 0.0;        ///< Number
    std::string name;          ///< Variable name or called function
    char op = 0;               ///< Binary: one of + - * / ^; Unary: '-'
    std::vector<ExprPtr> args; ///< operands / call arguments
};

/** Parse failure (or unknown function/arity); position() is the 0-based
 *  character offset of the offending token. */
class ParseError : public std::invalid_argument {
public:
    ParseError(const std::string& what, std::size_t position)
        : std::invalid_argument(what + " at position " + std::to_string(position)),
          pos_(position) {}
    std::size_t position() const { return pos_; }

private:
    std::size_t pos_;
};

/** Parse an expression over numbers, variables, + - * / ^ (right-assoc),
 *  unary minus and the functions sin cos exp ln sqrt pow abs. */
ExprPtr parse(std::string_view text);

/** Evaluate with the given variable bindings; throws std::invalid_argument
 *  naming any unbound variable. */
double eval(const ExprPtr& ast, const std::map<std::string, double>& bindings);

/** Pretty-print; reparsing the output yields a structurally identical tree. */
std::string to_string(const ExprPtr& ast);

/** Distinct variable names referenced by the expression, sorted. */
std::vector<std::string> variables(const ExprPtr& ast);

/** Structural equality of two trees (numbers compared bitwise). */
bool ast_equal(const ExprPtr& a, const ExprPtr& b);

}  // namespace hfde::expr
