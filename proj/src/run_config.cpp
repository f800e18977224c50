#include "hfde/run_config.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "hfde/expr.hpp"
#include "hfde/models.hpp"

namespace hfde {

namespace {

using nlohmann::json;

double require_number(const json& j, const std::string& where) {
    if (!j.is_number())
        throw std::invalid_argument("config: " + where + " must be a number");
    return j.get<double>();
}

/** Pure evaluator over a parsed RHS with variables resolved up front:
 *  t, the state names, and constant parameters. */
class ExprRhs {
public:
    ExprRhs(expr::ExprPtr ast, std::vector<std::string> stateNames,
            std::map<std::string, double> params)
        : ast_(std::move(ast)), stateNames_(std::move(stateNames)), params_(std::move(params)) {}

    double operator()(double t, std::span<const double> y) const {
        return eval_node(ast_, t, y);
    }

private:
    double eval_node(const expr::ExprPtr& node, double t, std::span<const double> y) const {
        using Kind = expr::ExprNode::Kind;
        switch (node->kind) {
            case Kind::Number:
                return node->value;
            case Kind::Variable: {
                if (node->name == "t")
                    return t;
                for (std::size_t i = 0; i < stateNames_.size(); ++i)
                    if (stateNames_[i] == node->name)
                        return y[i];
                return params_.at(node->name);  // presence checked at build time
            }
            case Kind::Unary:
                return -eval_node(node->args[0], t, y);
            case Kind::Binary: {
                const double a = eval_node(node->args[0], t, y);
                const double b = eval_node(node->args[1], t, y);
                switch (node->op) {
                    case '+': return a + b;
                    case '-': return a - b;
                    case '*': return a * b;
                    case '/': return a / b;
                    case '^': return std::pow(a, b);
                }
                break;
            }
            case Kind::Call: {
                const double a = eval_node(node->args[0], t, y);
                if (node->name == "sin") return std::sin(a);
                if (node->name == "cos") return std::cos(a);
                if (node->name == "exp") return std::exp(a);
                if (node->name == "ln") return std::log(a);
                if (node->name == "sqrt") return std::sqrt(a);
                if (node->name == "abs") return std::abs(a);
                if (node->name == "pow") return std::pow(a, eval_node(node->args[1], t, y));
                break;
            }
        }
        throw std::logic_error("ExprRhs: unreachable expression node");
    }

    expr::ExprPtr ast_;
    std::vector<std::string> stateNames_;
    std::map<std::string, double> params_;
};

}  // namespace

RunConfig parse_run_config(const json& doc) {
    if (!doc.is_object())
        throw std::invalid_argument("config: top-level JSON value must be an object");

    static const std::set<std::string> known = {"model", "system", "params", "orders",
                                               "T",     "h",      "m",      "solver",
                                               "out"};
    for (const auto& [key, value] : doc.items())
        if (!known.count(key))
            throw std::invalid_argument("config: unknown key '" + key + "'");

    RunConfig cfg;
    if (doc.contains("model")) {
        if (!doc["model"].is_string())
            throw std::invalid_argument("config: 'model' must be a string");
        cfg.model = doc["model"].get<std::string>();
    }
    if (doc.contains("system")) {
        if (!cfg.model.empty())
            throw std::invalid_argument("config: give either 'model' or 'system', not both");
        const json& sys = doc["system"];
        if (!sys.is_object() || !sys.contains("states") || !sys["states"].is_array() ||
            sys["states"].empty())
            throw std::invalid_argument("config: 'system.states' must be a non-empty array");
        std::size_t index = 0;
        for (const json& st : sys["states"]) {
            StateSpec spec;
            spec.name = st.contains("name") ? st["name"].get<std::string>()
                                            : "y" + std::to_string(index + 1);
            if (!st.contains("order"))
                throw std::invalid_argument("config: state '" + spec.name +
                                            "': missing order");
            spec.order = require_number(st["order"], "state '" + spec.name + "' order");
            if (!st.contains("init"))
                throw std::invalid_argument("config: state '" + spec.name +
                                            "': missing initial value(s)");
            if (st["init"].is_number()) {
                spec.init = {st["init"].get<double>()};
            } else if (st["init"].is_array()) {
                for (const json& v : st["init"])
                    spec.init.push_back(require_number(v, "state '" + spec.name + "' init"));
            } else {
                throw std::invalid_argument("config: state '" + spec.name +
                                            "': init must be a number or array");
            }
            if (!st.contains("rhs") || !st["rhs"].is_string())
                throw std::invalid_argument("config: state '" + spec.name +
                                            "': missing rhs expression");
            spec.rhs = st["rhs"].get<std::string>();
            cfg.states.push_back(std::move(spec));
            ++index;
        }
        if (sys.contains("params"))
            for (const auto& [key, value] : sys["params"].items())
                cfg.params[key] = require_number(value, "system.params." + key);
    }
    if (cfg.model.empty() && cfg.states.empty())
        throw std::invalid_argument("config: specify a 'model' name or an inline 'system'");

    if (doc.contains("params"))
        for (const auto& [key, value] : doc["params"].items())
            cfg.params[key] = require_number(value, "params." + key);
    if (doc.contains("orders")) {
        if (!doc["orders"].is_array())
            throw std::invalid_argument("config: 'orders' must be an array");
        for (const json& v : doc["orders"])
            cfg.orders.push_back(require_number(v, "orders entry"));
    }
    if (doc.contains("T")) {
        cfg.T = require_number(doc["T"], "'T'");
        if (!(cfg.T > 0.0))
            throw std::invalid_argument("config: T must be positive");
    }
    if (doc.contains("h")) {
        cfg.h = require_number(doc["h"], "'h'");
        if (!(cfg.h > 0.0))
            throw std::invalid_argument("config: h must be positive, got " +
                                        std::to_string(cfg.h));
    }
    if (doc.contains("m")) {
        if (!doc["m"].is_number_integer() || doc["m"].get<long long>() <= 0)
            throw std::invalid_argument("config: m must be a positive integer");
        cfg.m = doc["m"].get<std::size_t>();
    }
    if (doc.contains("solver")) {
        const json& s = doc["solver"];
        if (!s.is_object())
            throw std::invalid_argument("config: 'solver' must be an object");
        static const std::set<std::string> knownSolver = {"tol", "maxIters", "mode"};
        for (const auto& [key, value] : s.items())
            if (!knownSolver.count(key))
                throw std::invalid_argument("config: unknown solver key '" + key + "'");
        if (s.contains("tol")) {
            cfg.newtonTol = require_number(s["tol"], "solver.tol");
            if (!(cfg.newtonTol > 0.0))
                throw std::invalid_argument("config: solver.tol must be positive");
        }
        if (s.contains("maxIters")) {
            if (!s["maxIters"].is_number_integer() || s["maxIters"].get<int>() < 1)
                throw std::invalid_argument("config: solver.maxIters must be a positive integer");
            cfg.maxNewtonIters = s["maxIters"].get<int>();
        }
        if (s.contains("mode")) {
            const std::string mode = s["mode"].get<std::string>();
            if (mode == "marching")
                cfg.mode = SolveMode::Marching;
            else if (mode == "global")
                cfg.mode = SolveMode::GlobalFixedPoint;
            else
                throw std::invalid_argument("config: solver.mode must be 'marching' or 'global'");
        }
    }
    if (doc.contains("out")) {
        if (!doc["out"].is_string())
            throw std::invalid_argument("config: 'out' must be a string path");
        cfg.outPath = doc["out"].get<std::string>();
    }
    return cfg;
}

FractionalSystem build_system(const RunConfig& config) {
    if (!config.model.empty()) {
        FractionalSystem sys = get_model(config.model, config.params, config.orders);
        sys.T = config.T;
        sys.validate();
        return sys;
    }

    // Inline expression system.
    FractionalSystem sys;
    sys.name = "inline";
    sys.T = config.T;
    std::set<std::string> seen;
    for (const StateSpec& spec : config.states) {
        if (spec.name.empty() || !seen.insert(spec.name).second)
            throw std::invalid_argument("config: duplicate or empty state name '" + spec.name +
                                        "'");
        sys.stateNames.push_back(spec.name);
        sys.orders.push_back(spec.order);
        sys.initData.push_back(spec.init);
    }
    for (const StateSpec& spec : config.states) {
        if (!(spec.order > 0.0) || spec.order > 2.5)
            throw std::invalid_argument("config: state '" + spec.name + "': order " +
                                        std::to_string(spec.order) + " outside (0, 2.5]");
        const auto need = static_cast<std::size_t>(std::ceil(spec.order));
        if (spec.init.size() != need)
            throw std::invalid_argument(
                "config: state '" + spec.name + "': order " + std::to_string(spec.order) +
                " requires " + std::to_string(need) + " initial value(s), got " +
                std::to_string(spec.init.size()));

        expr::ExprPtr ast;
        try {
            ast = expr::parse(spec.rhs);
        } catch (const expr::ParseError& err) {
            throw std::invalid_argument("config: state '" + spec.name + "' rhs: " + err.what());
        }
        for (const std::string& var : expr::variables(ast)) {
            const bool bound = var == "t" ||
                               std::find(sys.stateNames.begin(), sys.stateNames.end(), var) !=
                                   sys.stateNames.end() ||
                               config.params.count(var) > 0;
            if (!bound)
                throw std::invalid_argument("config: unbound expression variable '" + var +
                                            "' in rhs of state '" + spec.name + "'");
        }
        sys.rhs.emplace_back(ExprRhs(std::move(ast), sys.stateNames, config.params));
    }
    if (!config.orders.empty())
        set_orders(sys, config.orders);
    sys.validate();
    return sys;
}

SolveConfig to_solve_config(const RunConfig& config) {
    SolveConfig solve;
    solve.m = config.m;
    solve.h = config.h;
    solve.newtonTol = config.newtonTol;
    solve.maxNewtonIters = config.maxNewtonIters;
    solve.mode = config.mode;
    return solve;
}

}  // namespace hfde
