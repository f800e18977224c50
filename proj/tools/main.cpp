#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hfde/expr.hpp"
#include "hfde/models.hpp"
#include "hfde/op_matrices.hpp"
#include "hfde/oracles.hpp"
#include "hfde/run_config.hpp"
#include "hfde/series.hpp"
#include "hfde/solver.hpp"

namespace {

using hfde::FractionalSystem;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitSolver = 2;
constexpr int kExitBound = 3;

/** 15 significant digits: enough that table-level comparisons are not
 *  quantization-limited, while integers still print as integers. */
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::invalid_argument("cannot open output file '" + path + "'");
    out << text;
    out.flush();
    if (!out)
        throw std::invalid_argument("write to '" + path + "' failed");
}

/** run.csv -> run.diag.json (or whatever extension is asked for). */
std::string sidecar_path(const std::string& csvPath, const char* extension) {
    std::filesystem::path p(csvPath);
    p.replace_extension(extension);
    return p.string();
}

/** CSV destination --out (with a JSON sidecar) or stdout (JSON on stderr). */
void emit(const std::string& outPath, const std::string& csv, const json& summary,
          const char* sidecarExtension) {
    if (!outPath.empty()) {
        write_text(outPath, csv);
        write_text(sidecar_path(outPath, sidecarExtension), summary.dump(2) + "\n");
    } else {
        std::cout << csv;
        std::cerr << summary.dump(2) << "\n";
    }
}

std::string nodes_csv(const hfde::Grid& grid, const std::vector<std::string>& names,
                      const std::vector<std::vector<double>>& nodes) {
    std::string csv = "t";
    for (const std::string& name : names)
        csv += "," + name;
    csv += "\n";
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        csv += fmt(grid.node(j));
        for (double v : nodes[j])
            csv += "," + fmt(v);
        csv += "\n";
    }
    return csv;
}

json contraction_json(const hfde::ContractionReport& report) {
    json j;
    j["verdict"] = hfde::to_string(report.verdict);
    if (std::isnan(report.value))
        j["value"] = nullptr;
    else
        j["value"] = report.value;
    j["lipschitz"] = report.lipschitz;
    j["lipschitzEstimated"] = report.heuristicLipschitz;
    if (!report.note.empty())
        j["note"] = report.note;
    return j;
}

json diagnostics_json(const hfde::SolveResult& result) {
    json j;
    j["mode"] = result.diagnostics.mode == hfde::SolveMode::Marching ? "marching" : "global";
    j["m"] = result.grid.m;
    j["h"] = result.grid.h;
    j["T"] = result.grid.T;
    j["newtonIters"] = result.diagnostics.newtonIters;
    j["maxResidual"] = result.diagnostics.maxResidual;
    j["contraction"] = contraction_json(result.diagnostics.contraction);
    return j;
}

// ------------------------------------------------------------------ flags

/** Options shared by solve and compare.  CLI11 option pointers are kept so
 *  we can tell "flag given" from "default value": flags override config-file
 *  values only when actually present. */
struct CommonFlags {
    std::string configPath;
    std::string model;
    std::string out;
    std::string mode;
    double h = 0.0;
    double T = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double tol = 0.0;
    std::size_t m = 0;

    CLI::Option* oConfig = nullptr;
    CLI::Option* oModel = nullptr;
    CLI::Option* oH = nullptr;
    CLI::Option* oM = nullptr;
    CLI::Option* oT = nullptr;
    CLI::Option* oAlpha = nullptr;
    CLI::Option* oBeta = nullptr;
    CLI::Option* oGamma = nullptr;
    CLI::Option* oOut = nullptr;
    CLI::Option* oMode = nullptr;
    CLI::Option* oTol = nullptr;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->set_help_flag("--help", "print help");  // frees -h/--h for the step width
    f.oConfig = cmd->add_option("--config", f.configPath, "JSON config file");
    f.oModel = cmd->add_option("--model", f.model, "bundled model name (see `models`)");
    f.oH = cmd->add_option("--h", f.h, "step width");
    f.oM = cmd->add_option("--m", f.m, "subinterval count");
    f.oH->excludes(f.oM);
    f.oT = cmd->add_option("--T", f.T, "horizon (default 1)");
    f.oAlpha = cmd->add_option("--alpha", f.alpha, "order for every state");
    f.oBeta = cmd->add_option("--beta", f.beta, "order override for state 2");
    f.oGamma = cmd->add_option("--gamma", f.gamma, "order override for state 3");
    f.oOut = cmd->add_option("--out", f.out, "output CSV path (default stdout)");
    f.oMode = cmd->add_option("--mode", f.mode, "solver mode: marching|global")
                  ->check(CLI::IsMember({"marching", "global"}));
    f.oTol = cmd->add_option("--tol", f.tol, "Newton residual tolerance");
}

/** Config file first, then flags on top. */
hfde::RunConfig make_config(const CommonFlags& f) {
    hfde::RunConfig cfg;
    if (f.oConfig->count()) {
        std::ifstream in(f.configPath);
        if (!in)
            throw std::invalid_argument("cannot open config file '" + f.configPath + "'");
        json doc;
        try {
            doc = json::parse(in);
        } catch (const json::parse_error& err) {
            throw std::invalid_argument("config '" + f.configPath + "': " + err.what());
        }
        cfg = hfde::parse_run_config(doc);
    }
    if (f.oModel->count()) {
        if (!cfg.states.empty())
            throw std::invalid_argument("cannot combine --model with an inline 'system' config");
        cfg.model = f.model;
    }
    if (cfg.model.empty() && cfg.states.empty())
        throw std::invalid_argument("nothing to run: pass --model or --config with a system");
    if (f.oT->count())
        cfg.T = f.T;
    if (f.oH->count()) {
        cfg.h = f.h;
        cfg.m = 0;
    }
    if (f.oM->count()) {
        cfg.m = f.m;
        cfg.h = 0.0;
    }
    if (f.oTol->count())
        cfg.newtonTol = f.tol;
    if (f.oMode->count())
        cfg.mode = f.mode == "global" ? hfde::SolveMode::GlobalFixedPoint
                                      : hfde::SolveMode::Marching;
    if (f.oOut->count())
        cfg.outPath = f.out;
    return cfg;
}

/** --alpha sets every order; --beta / --gamma then override states 2 / 3. */
void apply_order_flags(FractionalSystem& system, const CommonFlags& f) {
    if (!f.oAlpha->count() && !f.oBeta->count() && !f.oGamma->count())
        return;
    std::vector<double> orders = system.orders;
    if (f.oAlpha->count())
        std::fill(orders.begin(), orders.end(), f.alpha);
    if (f.oBeta->count()) {
        if (system.size() < 2)
            throw std::invalid_argument("--beta needs a system with at least 2 states");
        orders[1] = f.beta;
    }
    if (f.oGamma->count()) {
        if (system.size() < 3)
            throw std::invalid_argument("--gamma needs a system with at least 3 states");
        orders[2] = f.gamma;
    }
    hfde::set_orders(system, orders);
    system.validate();
}

// --------------------------------------------------------------- commands

int run_solve(const CommonFlags& f) {
    hfde::RunConfig cfg = make_config(f);
    FractionalSystem system = hfde::build_system(cfg);
    apply_order_flags(system, f);
    hfde::SolveResult result = hfde::solve_hf(system, hfde::to_solve_config(cfg));
    emit(cfg.outPath, nodes_csv(result.grid, result.stateNames, result.nodes),
         diagnostics_json(result), ".diag.json");
    return kExitOk;
}

struct IntegrateFlags {
    std::string fExpr = "t";
    double alpha = 1.0;
    double h = 0.0;
    double T = 1.0;
    std::size_t m = 0;
    std::string out;
    CLI::Option* oH = nullptr;
    CLI::Option* oM = nullptr;
};

int run_integrate(const IntegrateFlags& f) {
    hfde::Grid grid;
    if (f.oM->count())
        grid = hfde::Grid(f.m, f.T);
    else if (f.oH->count())
        grid = hfde::Grid::from_step(f.h, f.T);
    else
        throw std::invalid_argument("integrate: set --m or --h");

    hfde::expr::ExprPtr ast = hfde::expr::parse(f.fExpr);
    for (const std::string& var : hfde::expr::variables(ast))
        if (var != "t")
            throw std::invalid_argument("integrand may only use the variable 't' (found '" +
                                        var + "')");
    hfde::HFSeries sampled = hfde::sample_to_hf(
        [&ast](double t) { return hfde::expr::eval(ast, {{"t", t}}); }, grid);
    hfde::OpMatrixSet mats = hfde::build_generalized(f.alpha, grid);
    std::vector<double> values = hfde::frac_integrate(sampled, mats).node_values();

    std::string csv = "t,integral\n";
    for (std::size_t j = 0; j < values.size(); ++j)
        csv += fmt(grid.node(j)) + "," + fmt(values[j]) + "\n";
    if (!f.out.empty())
        write_text(f.out, csv);
    else
        std::cout << csv;
    return kExitOk;
}

int run_compare(const CommonFlags& f, const std::string& oracleName) {
    hfde::RunConfig cfg = make_config(f);
    FractionalSystem system = hfde::build_system(cfg);
    apply_order_flags(system, f);
    hfde::SolveResult result = hfde::solve_hf(system, hfde::to_solve_config(cfg));

    std::vector<std::vector<double>> reference;
    std::string method;
    if (oracleName == "rk4") {
        hfde::OracleResult oracle = hfde::rk4_solve(system, result.grid);
        reference = std::move(oracle.nodes);
        method = oracle.method;
    } else if (oracleName == "pece") {
        hfde::OracleResult oracle = hfde::pece_solve(system, result.grid);
        reference = std::move(oracle.nodes);
        method = oracle.method;
    } else {
        const bool allFirstOrder = std::all_of(system.orders.begin(), system.orders.end(),
                                               [](double a) { return a == 1.0; });
        if (system.name != "example-6.2" || !allFirstOrder)
            throw std::invalid_argument("no exact solution available for model '" + system.name +
                                        "' at these orders");
        hfde::ExactSolution exact = hfde::exact_solution("example-6.2");
        reference.resize(result.grid.m + 1);
        for (std::size_t j = 0; j <= result.grid.m; ++j)
            for (const auto& state : exact.states)
                reference[j].push_back(state(result.grid.node(j)));
        method = "exact";
    }

    hfde::ErrorReport report = hfde::error_report(result.nodes, reference);
    std::string csv = "t";
    for (const std::string& name : result.stateNames)
        csv += ",err_" + name;
    csv += "\n";
    for (std::size_t j = 0; j < report.absErrors.size(); ++j) {
        csv += fmt(result.grid.node(j));
        for (double e : report.absErrors[j])
            csv += "," + fmt(e);
        csv += "\n";
    }

    json summary;
    summary["oracle"] = method;
    summary["m"] = result.grid.m;
    summary["h"] = result.grid.h;
    json norms, pct;
    for (std::size_t i = 0; i < result.stateNames.size(); ++i) {
        norms[result.stateNames[i]] = report.infNorms[i];
        pct[result.stateNames[i]] = report.pctErrorAtEnd[i];
    }
    summary["infNorms"] = norms;
    summary["pctErrorAtEnd"] = pct;
    emit(cfg.outPath, csv, summary, ".summary.json");
    return kExitOk;
}

// Reference values the table CSVs are checked against.
constexpr double kTable4H10Err1 = 1.387236644377e-3;
constexpr double kTable4H10Err2 = 6.249545001395e-3;
constexpr double kTable4H1000Err1 = 1.364586e-7;
constexpr double kTable4H1000Err2 = 6.260121e-7;

bool within_sig_digits(double x, double reference, int digits) {
    return std::abs(x - reference) <= 0.5 * std::pow(10.0, -digits) * std::abs(reference);
}

int run_tables(const std::string& outDir) {
    namespace fs = std::filesystem;
    fs::create_directories(outDir);
    std::vector<std::string> failures;

    // Table 1: order-alpha integrals of f(t) = t on m = 8, absolute node errors.
    {
        const hfde::Grid grid(8, 1.0);
        const std::vector<double> alphas = {0.5, 1.0, 1.5, 2.0};
        hfde::HFSeries f = hfde::sample_to_hf([](double t) { return t; }, grid);
        std::vector<std::vector<double>> errs;
        for (double alpha : alphas) {
            hfde::OpMatrixSet mats = hfde::build_generalized(alpha, grid);
            std::vector<double> values = hfde::frac_integrate(f, mats).node_values();
            std::vector<double> col(values.size());
            for (std::size_t j = 0; j < values.size(); ++j) {
                const double t = grid.node(j);
                const double exactValue =
                    std::pow(t, 1.0 + alpha) / hfde::gamma_fn(2.0 + alpha);
                col[j] = std::abs(values[j] - exactValue);
                if (!(col[j] <= 1e-12))
                    failures.push_back("table1 alpha=" + fmt(alpha) + " t=" + fmt(t) +
                                       ": |error| = " + fmt(col[j]) + " > 1e-12");
            }
            errs.push_back(std::move(col));
        }
        std::string csv = "t";
        for (double alpha : alphas)
            csv += ",alpha=" + fmt(alpha);
        csv += "\n";
        for (std::size_t j = 0; j <= grid.m; ++j) {
            csv += fmt(grid.node(j));
            for (const auto& col : errs)
                csv += "," + fmt(col[j]);
            csv += "\n";
        }
        write_text((fs::path(outDir) / "table1.csv").string(), csv);
    }

    // Table 3: y = (J^1 + J^2 + J^3) f with f(t) = t, integer-order matrices,
    // percentage error per node against t^2/2 + t^3/6 + t^4/24.
    {
        const hfde::Grid grid(8, 1.0);
        hfde::HFSeries f = hfde::sample_to_hf([](double t) { return t; }, grid);
        hfde::HFSeries sum = hfde::hf_add(
            hfde::hf_add(hfde::frac_integrate(f, hfde::build_generalized(1.0, grid)),
                         hfde::frac_integrate(f, hfde::build_generalized(2.0, grid))),
            hfde::frac_integrate(f, hfde::build_generalized(3.0, grid)));
        const std::vector<double> values = sum.node_values();
        const hfde::ExactSolution exact = hfde::exact_solution("eq-20-sum");
        std::string csv = "t,approx,exact,pct_error\n";
        for (std::size_t j = 0; j <= grid.m; ++j) {
            const double t = grid.node(j);
            const double exactValue = exact.states[0](t);
            const double diff = std::abs(values[j] - exactValue);
            const double pct = diff == 0.0 ? 0.0 : 100.0 * diff / std::abs(exactValue);
            csv += fmt(t) + "," + fmt(values[j]) + "," + fmt(exactValue) + "," + fmt(pct) + "\n";
            if (j == grid.m && !(pct <= 1e-10))
                failures.push_back("table3 t=1: % error = " + fmt(pct) + " > 1e-10");
        }
        write_text((fs::path(outDir) / "table3.csv").string(), csv);
    }

    // Table 4: example-6.2 at orders (1, 1), per-state infinity norms of the
    // node error against (e^t sin t, e^t cos t) over a range of step widths.
    {
        const FractionalSystem system = hfde::get_model("example-6.2");
        const hfde::ExactSolution exact = hfde::exact_solution("example-6.2");
        std::string csv = "h";
        for (const std::string& name : system.stateNames)
            csv += ",inf_err_" + name;
        csv += "\n";
        for (std::size_t m : {10, 200, 400, 600, 800, 1000}) {
            hfde::SolveConfig solveCfg;
            solveCfg.m = m;
            hfde::SolveResult result = hfde::solve_hf(system, solveCfg);
            std::vector<std::vector<double>> reference(m + 1);
            for (std::size_t j = 0; j <= m; ++j)
                for (const auto& state : exact.states)
                    reference[j].push_back(state(result.grid.node(j)));
            hfde::ErrorReport report = hfde::error_report(result.nodes, reference);
            csv += fmt(result.grid.h);
            for (double norm : report.infNorms)
                csv += "," + fmt(norm);
            csv += "\n";
            if (m == 10) {
                if (!within_sig_digits(report.infNorms[0], kTable4H10Err1, 6))
                    failures.push_back("table4 h=1/10 " + system.stateNames[0] + ": " +
                                       fmt(report.infNorms[0]) + " != " + fmt(kTable4H10Err1) +
                                       " to 6 significant digits");
                if (!within_sig_digits(report.infNorms[1], kTable4H10Err2, 6))
                    failures.push_back("table4 h=1/10 " + system.stateNames[1] + ": " +
                                       fmt(report.infNorms[1]) + " != " + fmt(kTable4H10Err2) +
                                       " to 6 significant digits");
            }
            if (m == 1000) {
                if (!(std::abs(report.infNorms[0] - kTable4H1000Err1) <= 0.01 * kTable4H1000Err1))
                    failures.push_back("table4 h=1/1000 " + system.stateNames[0] + ": " +
                                       fmt(report.infNorms[0]) + " not within 1% of " +
                                       fmt(kTable4H1000Err1));
                if (!(std::abs(report.infNorms[1] - kTable4H1000Err2) <= 0.01 * kTable4H1000Err2))
                    failures.push_back("table4 h=1/1000 " + system.stateNames[1] + ": " +
                                       fmt(report.infNorms[1]) + " not within 1% of " +
                                       fmt(kTable4H1000Err2));
            }
        }
        write_text((fs::path(outDir) / "table4.csv").string(), csv);
    }

    std::cout << "wrote " << (fs::path(outDir) / "table1.csv").string() << ", "
              << (fs::path(outDir) / "table3.csv").string() << ", "
              << (fs::path(outDir) / "table4.csv").string() << "\n";
    if (!failures.empty()) {
        for (const std::string& line : failures)
            std::cerr << "bound failure: " << line << "\n";
        return kExitBound;
    }
    std::cout << "all table bounds satisfied\n";
    return kExitOk;
}

int run_models() {
    for (const std::string& name : hfde::list_models()) {
        const hfde::ModelEntry& entry = hfde::model_info(name);
        std::cout << entry.name << "\n  " << entry.description << "\n  states:";
        for (std::size_t i = 0; i < entry.stateNames.size(); ++i)
            std::cout << (i ? ", " : " ") << entry.stateNames[i] << " (order "
                      << fmt(entry.defaultOrders[i]) << ")";
        std::cout << "\n  params:";
        if (entry.defaults.empty()) {
            std::cout << " (none)";
        } else {
            bool first = true;
            for (const auto& [key, value] : entry.defaults) {
                std::cout << (first ? " " : ", ") << key << "=" << fmt(value);
                first = false;
            }
        }
        std::cout << "\n\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid-function solver for systems of Caputo fractional differential equations"};
    app.require_subcommand(1);

    CommonFlags solveFlags;
    CLI::App* solveCmd =
        app.add_subcommand("solve", "solve a model or inline system; node CSV + diagnostics JSON");
    add_common_flags(solveCmd, solveFlags);

    IntegrateFlags integrateFlags;
    CLI::App* integrateCmd =
        app.add_subcommand("integrate", "fractional integral of an expression in t");
    integrateCmd->set_help_flag("--help", "print help");
    integrateCmd->add_option("--f", integrateFlags.fExpr, "integrand (default: t)");
    integrateCmd->add_option("--alpha", integrateFlags.alpha, "integration order (default 1)");
    integrateFlags.oH = integrateCmd->add_option("--h", integrateFlags.h, "step width");
    integrateFlags.oM = integrateCmd->add_option("--m", integrateFlags.m, "subinterval count");
    integrateFlags.oH->excludes(integrateFlags.oM);
    integrateCmd->add_option("--T", integrateFlags.T, "horizon (default 1)");
    integrateCmd->add_option("--out", integrateFlags.out, "output CSV path (default stdout)");

    CommonFlags compareFlags;
    std::string oracleName;
    CLI::App* compareCmd =
        app.add_subcommand("compare", "solve, then compare against a reference oracle");
    add_common_flags(compareCmd, compareFlags);
    compareCmd->add_option("--oracle", oracleName, "reference: rk4|pece|exact")
        ->required()
        ->check(CLI::IsMember({"rk4", "pece", "exact"}));

    std::string tablesDir = ".";
    CLI::App* tablesCmd =
        app.add_subcommand("tables", "reproduce the verification tables as self-checked CSVs");
    tablesCmd->add_option("--out-dir", tablesDir, "directory for the table CSVs (default .)");

    CLI::App* modelsCmd = app.add_subcommand("models", "list bundled models");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (solveCmd->parsed())
            return run_solve(solveFlags);
        if (integrateCmd->parsed())
            return run_integrate(integrateFlags);
        if (compareCmd->parsed())
            return run_compare(compareFlags, oracleName);
        if (tablesCmd->parsed())
            return run_tables(tablesDir);
        if (modelsCmd->parsed())
            return run_models();
    } catch (const hfde::SolverError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitSolver;
    } catch (const hfde::ModelError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}
