#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <vector>

#include "hfde/expr.hpp"
#include "hfde/models.hpp"
#include "hfde/op_matrices.hpp"
#include "hfde/oracles.hpp"
#include "hfde/series.hpp"
#include "hfde/solver.hpp"
#include "hfde/system.hpp"

namespace py = pybind11;

namespace {

/** Adapt a python callable f(t, y: list) to the span-based RhsFn. */
hfde::RhsFn wrap_rhs(py::object fn) {
    return [fn = std::move(fn)](double t, std::span<const double> y) {
        return fn(t, std::vector<double>(y.begin(), y.end())).cast<double>();
    };
}

hfde::FractionalSystem make_system(std::vector<std::string> names, std::vector<double> orders,
                                   std::vector<std::vector<double>> init,
                                   std::vector<py::object> rhs, double T,
                                   std::string name) {
    hfde::FractionalSystem system;
    system.name = std::move(name);
    system.stateNames = std::move(names);
    system.orders = std::move(orders);
    system.initData = std::move(init);
    for (py::object& fn : rhs)
        system.rhs.push_back(wrap_rhs(std::move(fn)));
    system.T = T;
    system.validate();
    return system;
}

py::dict contraction_dict(const hfde::ContractionReport& report) {
    py::dict d;
    d["verdict"] = std::string(hfde::to_string(report.verdict));
    if (std::isnan(report.value))
        d["value"] = py::none();
    else
        d["value"] = report.value;
    d["lipschitz"] = report.lipschitz;
    d["lipschitz_estimated"] = report.heuristicLipschitz;
    d["note"] = report.note;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Hybrid-function solver for Caputo fractional differential equation systems";

    py::class_<hfde::Grid>(m, "Grid")
        .def(py::init<std::size_t, double>(), py::arg("m"), py::arg("T"))
        .def_static("from_step", &hfde::Grid::from_step, py::arg("h"), py::arg("T"))
        .def_readonly("m", &hfde::Grid::m)
        .def_readonly("h", &hfde::Grid::h)
        .def_readonly("T", &hfde::Grid::T)
        .def("node", &hfde::Grid::node, py::arg("j"))
        .def("__eq__", [](const hfde::Grid& a, const hfde::Grid& b) { return a == b; })
        .def("__repr__", [](const hfde::Grid& g) {
            return "Grid(m=" + std::to_string(g.m) + ", T=" + std::to_string(g.T) + ")";
        });

    py::class_<hfde::HFSeries>(m, "HFSeries")
        .def_property_readonly("grid", &hfde::HFSeries::grid)
        .def_property_readonly("sh_coeffs",
                               [](const hfde::HFSeries& s) {
                                   auto v = s.sh_coeffs();
                                   return std::vector<double>(v.begin(), v.end());
                               })
        .def_property_readonly("tf_coeffs",
                               [](const hfde::HFSeries& s) {
                                   auto v = s.tf_coeffs();
                                   return std::vector<double>(v.begin(), v.end());
                               })
        .def_property_readonly("last_sample", &hfde::HFSeries::last_sample)
        .def("node_values", &hfde::HFSeries::node_values)
        .def("__call__", &hfde::HFSeries::operator(), py::arg("t"));

    m.def(
        "sample_to_hf",
        [](const std::vector<double>& samples, const hfde::Grid& grid) {
            return hfde::sample_to_hf(std::span<const double>(samples), grid);
        },
        py::arg("samples"), py::arg("grid"));
    m.def(
        "sample_fn_to_hf",
        [](const std::function<double(double)>& f, const hfde::Grid& grid) {
            return hfde::sample_to_hf(f, grid);
        },
        py::arg("f"), py::arg("grid"));
    m.def("hf_eval", &hfde::hf_eval, py::arg("series"), py::arg("t"));
    py::class_<hfde::InnerProducts>(m, "InnerProducts")
        .def_readonly("sh_diagonal", &hfde::InnerProducts::shDiagonal)
        .def_readonly("tf_diagonal", &hfde::InnerProducts::tfDiagonal)
        .def("sh", &hfde::InnerProducts::sh, py::arg("i"), py::arg("j"))
        .def("tf", &hfde::InnerProducts::tf, py::arg("i"), py::arg("j"));
    m.def("hf_inner_products", &hfde::hf_inner_products, py::arg("grid"));
    m.def("hf_add", &hfde::hf_add, py::arg("a"), py::arg("b"));
    m.def("hf_scale", &hfde::hf_scale, py::arg("a"), py::arg("k"));
    m.def("hf_multiply", &hfde::hf_multiply, py::arg("a"), py::arg("b"));
    m.def("hf_power", &hfde::hf_power, py::arg("g"), py::arg("n"));

    py::class_<hfde::UpperToeplitz>(m, "UpperToeplitz")
        .def(py::init<std::vector<double>>(), py::arg("first_row"))
        .def_property_readonly("first_row",
                               [](const hfde::UpperToeplitz& t) {
                                   auto v = t.first_row();
                                   return std::vector<double>(v.begin(), v.end());
                               })
        .def("size", &hfde::UpperToeplitz::size)
        .def("at", &hfde::UpperToeplitz::at, py::arg("i"), py::arg("j"))
        .def(
            "apply_left",
            [](const hfde::UpperToeplitz& t, const std::vector<double>& x) {
                return t.apply_left(std::span<const double>(x));
            },
            py::arg("x"));

    py::class_<hfde::OpMatrixSet>(m, "OpMatrixSet")
        .def_readonly("alpha", &hfde::OpMatrixSet::alpha)
        .def_readonly("grid", &hfde::OpMatrixSet::grid)
        .def_readonly("Pss", &hfde::OpMatrixSet::Pss)
        .def_readonly("Pst", &hfde::OpMatrixSet::Pst)
        .def_readonly("Pts", &hfde::OpMatrixSet::Pts)
        .def_readonly("Ptt", &hfde::OpMatrixSet::Ptt);
    m.def("build_first_order", &hfde::build_first_order, py::arg("grid"));
    m.def("build_generalized", &hfde::build_generalized, py::arg("alpha"), py::arg("grid"));
    m.def("frac_integrate", &hfde::frac_integrate, py::arg("series"), py::arg("matrices"));
    m.def("gamma_fn", &hfde::gamma_fn, py::arg("x"));

    m.def(
        "expr_eval",
        [](const std::string& text, const std::map<std::string, double>& bindings) {
            return hfde::expr::eval(hfde::expr::parse(text), bindings);
        },
        py::arg("text"), py::arg("bindings") = std::map<std::string, double>{});
    m.def("expr_variables",
          [](const std::string& text) { return hfde::expr::variables(hfde::expr::parse(text)); },
          py::arg("text"));
    m.def("expr_normalize",
          [](const std::string& text) { return hfde::expr::to_string(hfde::expr::parse(text)); },
          py::arg("text"));

    py::class_<hfde::FractionalSystem>(m, "FractionalSystem")
        .def_readonly("name", &hfde::FractionalSystem::name)
        .def_readonly("state_names", &hfde::FractionalSystem::stateNames)
        .def_readonly("orders", &hfde::FractionalSystem::orders)
        .def_readonly("init_data", &hfde::FractionalSystem::initData)
        .def_readwrite("T", &hfde::FractionalSystem::T)
        .def("size", &hfde::FractionalSystem::size)
        .def(
            "rhs_value",
            [](const hfde::FractionalSystem& s, std::size_t i, double t,
               const std::vector<double>& y) {
                if (i >= s.rhs.size())
                    throw std::out_of_range("rhs_value: state index out of range");
                return s.rhs[i](t, std::span<const double>(y));
            },
            py::arg("i"), py::arg("t"), py::arg("y"));
    m.def("make_system", &make_system, py::arg("state_names"), py::arg("orders"),
          py::arg("init"), py::arg("rhs"), py::arg("T") = 1.0, py::arg("name") = "custom");
    m.def("list_models", &hfde::list_models);
    m.def(
        "model_info",
        [](const std::string& name) {
            const hfde::ModelEntry& entry = hfde::model_info(name);
            py::dict d;
            d["name"] = entry.name;
            d["description"] = entry.description;
            d["state_names"] = entry.stateNames;
            d["default_orders"] = entry.defaultOrders;
            d["params"] = entry.defaults;
            return d;
        },
        py::arg("name"));
    m.def(
        "get_model",
        [](const std::string& name, const std::map<std::string, double>& params,
           const std::vector<double>& orders) {
            return hfde::get_model(name, params, orders);
        },
        py::arg("name"), py::arg("params") = std::map<std::string, double>{},
        py::arg("orders") = std::vector<double>{});
    m.def(
        "set_orders",
        [](hfde::FractionalSystem& system, const std::vector<double>& orders) {
            hfde::set_orders(system, orders);
        },
        py::arg("system"), py::arg("orders"));

    py::enum_<hfde::SolveMode>(m, "SolveMode")
        .value("Marching", hfde::SolveMode::Marching)
        .value("GlobalFixedPoint", hfde::SolveMode::GlobalFixedPoint);

    py::class_<hfde::SolveConfig>(m, "SolveConfig")
        .def(py::init<>())
        .def_readwrite("m", &hfde::SolveConfig::m)
        .def_readwrite("h", &hfde::SolveConfig::h)
        .def_readwrite("newton_tol", &hfde::SolveConfig::newtonTol)
        .def_readwrite("max_newton_iters", &hfde::SolveConfig::maxNewtonIters)
        .def_readwrite("jacobian_step", &hfde::SolveConfig::jacobianStep)
        .def_readwrite("mode", &hfde::SolveConfig::mode)
        .def_readwrite("lipschitz", &hfde::SolveConfig::lipschitz);

    py::class_<hfde::SolveResult>(m, "SolveResult")
        .def_readonly("grid", &hfde::SolveResult::grid)
        .def_readonly("state_names", &hfde::SolveResult::stateNames)
        .def_readonly("nodes", &hfde::SolveResult::nodes)
        .def("y_value", &hfde::SolveResult::y_value, py::arg("state"), py::arg("t"))
        .def_property_readonly("diagnostics", [](const hfde::SolveResult& r) {
            py::dict d;
            d["mode"] = r.diagnostics.mode == hfde::SolveMode::Marching ? "marching" : "global";
            d["newton_iters"] = r.diagnostics.newtonIters;
            d["max_residual"] = r.diagnostics.maxResidual;
            d["contraction"] = contraction_dict(r.diagnostics.contraction);
            return d;
        });
    m.def("solve_hf", &hfde::solve_hf, py::arg("system"), py::arg("config"));
    m.def(
        "contraction_bound",
        [](std::size_t n, double L, double alpha, double T) {
            return contraction_dict(hfde::contraction_bound(n, L, alpha, T));
        },
        py::arg("n"), py::arg("L"), py::arg("alpha"), py::arg("T"));

    py::class_<hfde::OracleResult>(m, "OracleResult")
        .def_readonly("grid", &hfde::OracleResult::grid)
        .def_readonly("state_names", &hfde::OracleResult::stateNames)
        .def_readonly("nodes", &hfde::OracleResult::nodes)
        .def_readonly("method", &hfde::OracleResult::method);
    m.def("rk4_solve", &hfde::rk4_solve, py::arg("system"), py::arg("grid"));
    m.def("pece_solve", &hfde::pece_solve, py::arg("system"), py::arg("grid"),
          py::arg("corrector_iters") = 1);
    m.def(
        "error_report",
        [](const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
            hfde::ErrorReport rep = hfde::error_report(a, b);
            py::dict d;
            d["abs_errors"] = rep.absErrors;
            d["inf_norms"] = rep.infNorms;
            d["pct_error_at_end"] = rep.pctErrorAtEnd;
            return d;
        },
        py::arg("a"), py::arg("b"));

    py::register_exception<hfde::SolverError>(m, "SolverFailure", PyExc_RuntimeError);
    py::register_exception<hfde::ModelError>(m, "ModelFailure", PyExc_RuntimeError);
}
