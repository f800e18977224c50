#include "hfde/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace hfde::expr {

namespace {

struct Token {
    enum class Kind { Number, Ident, Op, LParen, RParen, Comma, End };
    Kind kind = Kind::End;
    double value = 0.0;
    std::string text;      // identifier name
    char op = 0;
    std::size_t pos = 0;   // offset of the first character
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) { advance(); }

    const Token& peek() const { return tok_; }

    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    void advance() {
        while (i_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[i_])))
            ++i_;
        tok_ = Token{};
        tok_.pos = i_;
        if (i_ >= text_.size()) {
            tok_.kind = Token::Kind::End;
            return;
        }
        const char c = text_[i_];
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i_ + 1 < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[i_ + 1])))) {
            const char* begin = text_.data() + i_;
            const char* end = text_.data() + text_.size();
            double value = 0.0;
            auto [ptr, ec] = std::from_chars(begin, end, value);
            if (ec != std::errc())
                throw ParseError("invalid number", i_);
            tok_.kind = Token::Kind::Number;
            tok_.value = value;
            i_ += static_cast<std::size_t>(ptr - begin);
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i_;
            while (j < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[j])) ||
                                        text_[j] == '_'))
                ++j;
            tok_.kind = Token::Kind::Ident;
            tok_.text.assign(text_.substr(i_, j - i_));
            i_ = j;
            return;
        }
        switch (c) {
            case '+': case '-': case '*': case '/': case '^':
                tok_.kind = Token::Kind::Op;
                tok_.op = c;
                break;
            case '(': tok_.kind = Token::Kind::LParen; break;
            case ')': tok_.kind = Token::Kind::RParen; break;
            case ',': tok_.kind = Token::Kind::Comma; break;
            default:
                throw ParseError(std::string("unexpected character '") + c + "'", i_);
        }
        ++i_;
    }

    std::string_view text_;
    std::size_t i_ = 0;
    Token tok_;
};

ExprPtr make_number(double v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Number;
    n->value = v;
    return n;
}

ExprPtr make_variable(std::string name) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Variable;
    n->name = std::move(name);
    return n;
}

ExprPtr make_unary(ExprPtr operand) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Unary;
    n->op = '-';
    n->args.push_back(std::move(operand));
    return n;
}

ExprPtr make_binary(char op, ExprPtr lhs, ExprPtr rhs) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Binary;
    n->op = op;
    n->args.push_back(std::move(lhs));
    n->args.push_back(std::move(rhs));
    return n;
}

// name -> arity for the supported calls
constexpr std::pair<const char*, int> kFunctions[] = {
    {"sin", 1}, {"cos", 1}, {"exp", 1}, {"ln", 1}, {"sqrt", 1}, {"abs", 1}, {"pow", 2},
};

int function_arity(const std::string& name) {
    for (const auto& [fn, arity] : kFunctions)
        if (name == fn)
            return arity;
    return -1;
}

class Parser {
public:
    explicit Parser(std::string_view text) : lex_(text) {}

    ExprPtr run() {
        ExprPtr e = parse_expression(0);
        const Token& t = lex_.peek();
        if (t.kind != Token::Kind::End)
            throw ParseError("unexpected trailing input", t.pos);
        return e;
    }

private:
    // Binding powers: +,- (10); *,/ (20); unary - (30); ^ (40, right-assoc).
    static int left_power(char op) {
        switch (op) {
            case '+': case '-': return 10;
            case '*': case '/': return 20;
            case '^': return 40;
        }
        return -1;
    }
    static int right_power(char op) { return op == '^' ? 40 : left_power(op) + 1; }

    ExprPtr parse_expression(int minPower) {
        ExprPtr lhs = parse_prefix();
        while (lex_.peek().kind == Token::Kind::Op && left_power(lex_.peek().op) >= minPower) {
            const char op = lex_.take().op;
            lhs = make_binary(op, std::move(lhs), parse_expression(right_power(op)));
        }
        return lhs;
    }

    ExprPtr parse_prefix() {
        const Token t = lex_.take();
        switch (t.kind) {
            case Token::Kind::Number:
                return make_number(t.value);
            case Token::Kind::Op:
                if (t.op == '-')
                    return make_unary(parse_expression(30));
                throw ParseError(std::string("unexpected operator '") + t.op + "'", t.pos);
            case Token::Kind::Ident:
                if (lex_.peek().kind == Token::Kind::LParen)
                    return parse_call(t);
                return make_variable(t.text);
            case Token::Kind::LParen: {
                ExprPtr inner = parse_expression(0);
                expect_rparen();
                return inner;
            }
            default:
                throw ParseError("expected an operand", t.pos);
        }
    }

    ExprPtr parse_call(const Token& name) {
        const int arity = function_arity(name.text);
        if (arity < 0)
            throw ParseError("unknown function '" + name.text + "'", name.pos);
        lex_.take();  // '('
        auto node = std::make_shared<ExprNode>();
        node->kind = ExprNode::Kind::Call;
        node->name = name.text;
        node->args.push_back(parse_expression(0));
        while (lex_.peek().kind == Token::Kind::Comma) {
            lex_.take();
            node->args.push_back(parse_expression(0));
        }
        if (static_cast<int>(node->args.size()) != arity)
            throw ParseError("function '" + name.text + "' expects " + std::to_string(arity) +
                                 " argument(s), got " + std::to_string(node->args.size()),
                             name.pos);
        expect_rparen();
        return node;
    }

    void expect_rparen() {
        const Token& t = lex_.peek();
        if (t.kind != Token::Kind::RParen)
            throw ParseError("expected ')'", t.pos);
        lex_.take();
    }

    Lexer lex_;
};

double apply_call(const std::string& name, const std::vector<double>& a) {
    if (name == "sin") return std::sin(a[0]);
    if (name == "cos") return std::cos(a[0]);
    if (name == "exp") return std::exp(a[0]);
    if (name == "ln") return std::log(a[0]);
    if (name == "sqrt") return std::sqrt(a[0]);
    if (name == "abs") return std::fabs(a[0]);
    if (name == "pow") return std::pow(a[0], a[1]);
    throw std::invalid_argument("eval: unknown function '" + name + "'");
}

void collect_variables(const ExprPtr& ast, std::set<std::string>& out) {
    if (ast->kind == ExprNode::Kind::Variable)
        out.insert(ast->name);
    for (const ExprPtr& child : ast->args)
        collect_variables(child, out);
}

int left_power_of(char op) {
    switch (op) {
        case '+': case '-': return 10;
        case '*': case '/': return 20;
        case '^': return 40;
    }
    return 100;
}

// Precedence used for printing; mirrors the parser's binding powers.
int print_power(const ExprPtr& e) {
    switch (e->kind) {
        case ExprNode::Kind::Binary: return left_power_of(e->op);
        case ExprNode::Kind::Unary: return 30;
        default: return 100;
    }
}

void print(const ExprPtr& e, std::ostream& os);

void print_child(const ExprPtr& child, int parentPower, bool tight, std::ostream& os) {
    // Parenthesize when the child binds no tighter than the parent requires;
    // `tight` demands strictly higher power (right side of -, /, etc.).
    std::ostringstream tmp;
    print(child, tmp);
    const int p = print_power(child);
    if (p < parentPower || (tight && p == parentPower))
        os << '(' << tmp.str() << ')';
    else
        os << tmp.str();
}

void print(const ExprPtr& e, std::ostream& os) {
    switch (e->kind) {
        case ExprNode::Kind::Number: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", e->value);
            os << buf;
            break;
        }
        case ExprNode::Kind::Variable:
            os << e->name;
            break;
        case ExprNode::Kind::Unary:
            os << '-';
            print_child(e->args[0], 30, true, os);
            break;
        case ExprNode::Kind::Binary: {
            const int p = left_power_of(e->op);
            const bool rightAssoc = e->op == '^';
            print_child(e->args[0], p, rightAssoc, os);
            os << ' ' << e->op << ' ';
            print_child(e->args[1], p, !rightAssoc, os);
            break;
        }
        case ExprNode::Kind::Call: {
            os << e->name << '(';
            for (std::size_t i = 0; i < e->args.size(); ++i) {
                if (i) os << ", ";
                print(e->args[i], os);
            }
            os << ')';
            break;
        }
    }
}

}  // namespace

ExprPtr parse(std::string_view text) {
    if (text.empty())
        throw ParseError("empty expression", 0);
    return Parser(text).run();
}

double eval(const ExprPtr& ast, const std::map<std::string, double>& bindings) {
    switch (ast->kind) {
        case ExprNode::Kind::Number:
            return ast->value;
        case ExprNode::Kind::Variable: {
            auto it = bindings.find(ast->name);
            if (it == bindings.end())
                throw std::invalid_argument("eval: unbound variable '" + ast->name + "'");
            return it->second;
        }
        case ExprNode::Kind::Unary:
            return -eval(ast->args[0], bindings);
        case ExprNode::Kind::Binary: {
            const double a = eval(ast->args[0], bindings);
            const double b = eval(ast->args[1], bindings);
            switch (ast->op) {
                case '+': return a + b;
                case '-': return a - b;
                case '*': return a * b;
                case '/': return a / b;  // division by zero -> IEEE inf/nan
                case '^': return std::pow(a, b);
            }
            throw std::invalid_argument("eval: unknown operator");
        }
        case ExprNode::Kind::Call: {
            std::vector<double> args;
            args.reserve(ast->args.size());
            for (const ExprPtr& child : ast->args)
                args.push_back(eval(child, bindings));
            return apply_call(ast->name, args);
        }
    }
    throw std::invalid_argument("eval: malformed AST");
}

std::string to_string(const ExprPtr& ast) {
    std::ostringstream os;
    print(ast, os);
    return os.str();
}

std::vector<std::string> variables(const ExprPtr& ast) {
    std::set<std::string> names;
    collect_variables(ast, names);
    return {names.begin(), names.end()};
}

bool ast_equal(const ExprPtr& a, const ExprPtr& b) {
    if (a->kind != b->kind || a->args.size() != b->args.size())
        return false;
    switch (a->kind) {
        case ExprNode::Kind::Number:
            if (a->value != b->value) return false;
            break;
        case ExprNode::Kind::Variable:
        case ExprNode::Kind::Call:
            if (a->name != b->name) return false;
            break;
        case ExprNode::Kind::Unary:
        case ExprNode::Kind::Binary:
            if (a->op != b->op) return false;
            break;
    }
    for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!ast_equal(a->args[i], b->args[i]))
            return false;
    return true;
}

}  // namespace hfde::expr
