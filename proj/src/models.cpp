#include "hfde/models.hpp"

#include <cmath>
#include <stdexcept>

namespace hfde {

namespace {

/** Reject population denominators that collapse to ~0: that always signals a
 *  broken parameter set, not a legitimate trajectory. */
double checked_denominator(double total, const char* model) {
    if (std::fabs(total) < 1e-12)
        throw ModelError(std::string(model) + ": population denominator is ~0");
    return total;
}

FractionalSystem build_example_61(const std::map<std::string, double>&) {
    FractionalSystem sys;
    sys.name = "example-6.1";
    sys.stateNames = {"y1", "y2"};
    sys.orders = {1.3, 2.4};
    sys.initData = {{0.0, 1.0}, {0.0, 1.0, 1.0}};
    sys.rhs = {
        [](double, std::span<const double> y) { return y[0] + y[1] * y[1]; },
        [](double, std::span<const double> y) { return y[0] + 5.0 * y[1]; },
    };
    return sys;
}

FractionalSystem build_example_62(const std::map<std::string, double>&) {
    FractionalSystem sys;
    sys.name = "example-6.2";
    sys.stateNames = {"x", "y"};
    sys.orders = {1.0, 1.0};
    sys.initData = {{0.0}, {1.0}};
    sys.rhs = {
        [](double, std::span<const double> y) { return y[0] + y[1]; },
        [](double, std::span<const double> y) { return -y[0] + y[1]; },
    };
    return sys;
}

FractionalSystem build_example_63(const std::map<std::string, double>&) {
    FractionalSystem sys;
    sys.name = "example-6.3";
    sys.stateNames = {"x", "y", "z"};
    sys.orders = {0.8, 0.7, 0.6};
    sys.initData = {{0.0}, {1.0}, {1.0}};
    sys.rhs = {
        [](double, std::span<const double> y) { return 2.0 * y[1] * y[1]; },
        [](double t, std::span<const double> y) { return t * y[0]; },
        [](double, std::span<const double> y) { return y[1] * y[2]; },
    };
    return sys;
}

FractionalSystem build_smoking(const std::map<std::string, double>& p) {
    const double rho1 = p.at("rho1"), rho2 = p.at("rho2"), epsilon = p.at("epsilon");
    const double sigma = p.at("sigma"), prob = p.at("p"), f = p.at("f");
    const double beta = p.at("beta"), pi = p.at("pi"), mu = p.at("mu");
    const double delta = p.at("delta"), eta = p.at("eta"), gamma = p.at("gamma");

    // States: potential smokers seeing pro ads (Sp) / anti ads (Sa), light
    // smokers (Ls), chain smokers (Cs), quitters (Q).  The infection-style
    // pressure lambda = beta (Ls + eta Cs) / N is recomputed every call.
    FractionalSystem sys;
    sys.name = "smoking";
    sys.stateNames = {"Sp", "Sa", "Ls", "Cs", "Q"};
    sys.orders.assign(5, 1.0);
    sys.initData = {{8000.0}, {1970.0}, {20.0}, {10.0}, {0.0}};
    auto lambda_of = [beta, eta](std::span<const double> y) {
        const double N = checked_denominator(y[0] + y[1] + y[2] + y[3] + y[4], "smoking");
        return beta * (y[2] + eta * y[3]) / N;
    };
    sys.rhs = {
        [=](double, std::span<const double> y) {
            return (1.0 - prob) * pi - (epsilon + lambda_of(y) + mu) * y[0];
        },
        [=](double, std::span<const double> y) {
            return prob * pi + epsilon * y[0] - (1.0 - f) * lambda_of(y) * y[1] - mu * y[1];
        },
        [=](double, std::span<const double> y) {
            const double lam = lambda_of(y);
            return lam * y[0] + (1.0 - f) * lam * y[1] + sigma * y[3] -
                   (mu + rho1 + gamma) * y[2];
        },
        [=](double, std::span<const double> y) {
            return gamma * y[2] - (sigma + rho2 + delta + mu) * y[3];
        },
        [=](double, std::span<const double> y) {
            return rho1 * y[2] + rho2 * y[3] - mu * y[4];
        },
    };
    return sys;
}

FractionalSystem build_lung_cancer(const std::map<std::string, double>& p) {
    const double Lambda = p.at("Lambda"), mu = p.at("mu"), beta = p.at("beta");
    const double p_n = p.at("p_n"), gamma1 = p.at("gamma1"), gamma2 = p.at("gamma2");
    const double p1 = p.at("p1"), p2 = p.at("p2"), sigma1 = p.at("sigma1");
    const double p_s = p.at("p_s"), delta_q = p.at("delta_q"), delta1 = p.at("delta1");
    const double delta2 = p.at("delta2"), d = p.at("d"), q = p.at("q");
    const double beta_e = p.at("beta_e");

    // States: non-smokers (N), light (I1) and heavy (I2) smokers, permanent
    // (Q) and temporary (S) quitters, lung-cancer cases (L), educated (E).
    FractionalSystem sys;
    sys.name = "lung-cancer";
    sys.stateNames = {"N", "I1", "I2", "Q", "S", "L", "E"};
    sys.orders.assign(7, 1.0);
    sys.initData = {{500.0}, {200.0}, {200.0}, {200.0}, {200.0}, {200.0}, {200.0}};
    auto pressure = [](std::span<const double> y) {
        const double total = checked_denominator(
            y[0] + y[1] + y[2] + y[3] + y[4] + y[5] + y[6], "lung-cancer");
        return (y[1] + y[2]) / total;  // smoker fraction I/T
    };
    sys.rhs = {
        [=](double, std::span<const double> y) {
            return (1.0 - q) * Lambda - beta * y[0] * pressure(y) - mu * y[0];
        },
        [=](double, std::span<const double> y) {
            return ((1.0 - p_n) * beta * y[0] + (1.0 - p_s) * beta * y[4]) * pressure(y) -
                   (sigma1 + gamma1 + delta1 + mu) * y[1];
        },
        [=](double, std::span<const double> y) {
            return gamma1 * y[1] - (gamma2 + delta2 + mu) * y[2];
        },
        [=](double, std::span<const double> y) {
            return p2 * gamma2 * y[2] + p1 * sigma1 * y[1] - (delta_q + mu) * y[3];
        },
        [=](double, std::span<const double> y) {
            return (1.0 - p1) * sigma1 * y[1] + (1.0 - p2) * gamma2 * y[2] -
                   beta * y[4] * pressure(y) - mu * y[4];
        },
        [=](double, std::span<const double> y) {
            return (p_n * beta * y[0] + p_s * beta * y[4] + beta_e * y[6]) * pressure(y) +
                   delta1 * y[1] + delta2 * y[2] + delta_q * y[3] - (mu + d) * y[5];
        },
        [=](double, std::span<const double> y) {
            return q * Lambda - beta_e * y[6] * pressure(y) - mu * y[6];
        },
    };
    return sys;
}

FractionalSystem build_hepatitis_b(const std::map<std::string, double>& p) {
    const double b = p.at("b"), mu = p.at("mu"), c = p.at("c"), prob = p.at("p");
    const double eta = p.at("eta"), phi = p.at("phi"), sigma_S = p.at("sigma_S");
    const double sigma_A = p.at("sigma_A"), sigma_C = p.at("sigma_C");
    const double phi_U = p.at("phi_U"), phi_F = p.at("phi_F"), gamma_C = p.at("gamma_C");
    const double delta_A = p.at("delta_A"), delta_C = p.at("delta_C");
    const double eps_rho = p.at("epsilon_rho"), w = p.at("w"), eps_C = p.at("epsilon_C");
    const double tau_b = p.at("tau_b"), tau_C = p.at("tau_C"), tau_U = p.at("tau_U");
    const double tau_F = p.at("tau_F"), theta = p.at("theta");

    // States: unvaccinated/vaccination-failed susceptibles (S_U, S_F),
    // vaccinated (V), acute unaware/aware (A_U, A_F), chronic unaware/aware
    // (C_U, C_F), recovered (R).
    FractionalSystem sys;
    sys.name = "hepatitis-b";
    sys.stateNames = {"S_U", "S_F", "V", "A_U", "A_F", "C_U", "C_F", "R"};
    sys.orders.assign(8, 1.0);
    sys.initData = {{23148265.0}, {51967535.0}, {16528817.0}, {3012259.0},
                    {5280601.0},  {5394338.0},  {6315313.0},  {40570172.0}};
    auto total_of = [](std::span<const double> y) {
        return checked_denominator(
            y[0] + y[1] + y[2] + y[3] + y[4] + y[5] + y[6] + y[7], "hepatitis-b");
    };
    auto incidence = [=](std::span<const double> y) {
        return prob * c * (y[4] + eta * y[6]) * (1.0 - eps_C * tau_C) / total_of(y) * y[1];
    };
    auto vertical = [=](std::span<const double> y) {
        return b * theta * (y[4] + phi * y[6]) * (1.0 - eps_rho * tau_b);
    };
    sys.rhs = {
        [=](double, std::span<const double> y) {
            return b * total_of(y) * (1.0 - eps_rho * tau_b) - vertical(y) -
                   (sigma_S + eps_rho * tau_U + mu) * y[0];
        },
        [=](double, std::span<const double> y) {
            return sigma_S * y[0] + w * y[2] - incidence(y) - (eps_rho * tau_F + mu) * y[1];
        },
        [=](double, std::span<const double> y) {
            return b * total_of(y) * eps_rho * tau_b + eps_rho * tau_U * y[0] +
                   eps_rho * tau_F * y[1] - (w + mu) * y[2];
        },
        [=](double, std::span<const double> y) {
            return vertical(y) - (sigma_A + mu + delta_A) * y[3];
        },
        [=](double, std::span<const double> y) {
            return incidence(y) - (sigma_A + mu + delta_A) * y[4];
        },
        [=](double, std::span<const double> y) {
            return sigma_A * phi_U * y[3] - (sigma_C + mu) * y[5];
        },
        [=](double, std::span<const double> y) {
            return sigma_A * phi_F * y[4] + sigma_C * y[5] - (gamma_C + mu + delta_C) * y[6];
        },
        [=](double, std::span<const double> y) {
            return sigma_A * (1.0 - phi_U) * y[3] + sigma_A * (1.0 - phi_F) * y[4] +
                   gamma_C * y[6] - mu * y[7];
        },
    };
    return sys;
}

std::vector<ModelEntry> make_registry() {
    std::vector<ModelEntry> reg;
    reg.push_back({"example-6.1",
                   "Two-state nonlinear benchmark with quadratic coupling; the default "
                   "orders 1.3 and 2.4 exercise derivative initial conditions.",
                   {"y1", "y2"},
                   {1.3, 2.4},
                   {},
                   build_example_61});
    reg.push_back({"example-6.2",
                   "Linear two-state benchmark with closed-form solution "
                   "(e^t sin t, e^t cos t); the convergence-study workhorse.",
                   {"x", "y"},
                   {1.0, 1.0},
                   {},
                   build_example_62});
    reg.push_back({"example-6.3",
                   "Three-state nonlinear benchmark with a time-dependent coupling "
                   "term; default orders (0.8, 0.7, 0.6).",
                   {"x", "y", "z"},
                   {0.8, 0.7, 0.6},
                   {},
                   build_example_63});
    reg.push_back({"smoking",
                   "Five-compartment dynamics of smoking under pro/anti campaigns "
                   "(potential, light and chain smokers, quitters); parameters from "
                   "Muhaya (2013).",
                   {"Sp", "Sa", "Ls", "Cs", "Q"},
                   {1.0, 1.0, 1.0, 1.0, 1.0},
                   {{"rho1", 0.5},
                    {"rho2", 0.25},
                    {"epsilon", 0.001},
                    {"sigma", 0.0307},
                    {"p", 0.8},
                    {"f", 1.0},
                    {"beta", 2.0},
                    {"pi", 14.0},
                    {"mu", 0.031},
                    {"delta", 0.01},
                    {"eta", 0.0002},
                    {"gamma", 0.6}},
                   build_smoking});
    reg.push_back({"lung-cancer",
                   "Seven-compartment smoking/lung-cancer model with education and "
                   "second-hand-smoke effects; parameters from Acevedo-Estefania "
                   "et al. (2000).",
                   {"N", "I1", "I2", "Q", "S", "L", "E"},
                   {1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0},
                   {{"Lambda", 14.0},
                    {"mu", 0.014},
                    {"beta", 2.0},
                    {"p_n", 1e-4},
                    {"gamma1", 0.6},
                    {"gamma2", 0.25},
                    {"p1", 0.025},
                    {"p2", 0.025},
                    {"sigma1", 0.5},
                    {"p_s", 1e-3},
                    {"delta_q", 0.005},
                    {"delta1", 0.01},
                    {"delta2", 0.03},
                    {"d", 0.016},
                    {"q", 0.25},
                    {"beta_e", 1e-4}},
                   build_lung_cancer});
    reg.push_back({"hepatitis-b",
                   "Eight-compartment hepatitis B transmission model with vaccination "
                   "and treatment controls; parameters from Abdulrahman et al. (2013).",
                   {"S_U", "S_F", "V", "A_U", "A_F", "C_U", "C_F", "R"},
                   {1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0},
                   {{"b", 0.036},
                    {"mu", 0.021},
                    {"c", 20.0},
                    {"p", 0.079},
                    {"eta", 0.667},
                    {"phi", 0.159},
                    {"sigma_S", 0.067},
                    {"sigma_A", 2.667},
                    {"sigma_C", 0.068},
                    {"phi_U", 0.885},
                    {"phi_F", 0.1},
                    {"gamma_C", 0.015},
                    {"delta_A", 0.007},
                    {"delta_C", 0.001},
                    {"epsilon_rho", 0.9},
                    {"w", 0.04},
                    {"epsilon_C", 0.8},
                    {"tau_b", 0.66},
                    {"tau_C", 0.2},
                    {"tau_U", 0.001},
                    {"tau_F", 0.001},
                    {"theta", 0.724}},
                   build_hepatitis_b});
    return reg;
}

const std::vector<ModelEntry>& registry() {
    static const std::vector<ModelEntry> reg = make_registry();
    return reg;
}

}  // namespace

std::vector<std::string> list_models() {
    std::vector<std::string> names;
    names.reserve(registry().size());
    for (const ModelEntry& entry : registry())
        names.push_back(entry.name);
    return names;
}

const ModelEntry& model_info(const std::string& name) {
    for (const ModelEntry& entry : registry())
        if (entry.name == name)
            return entry;
    throw std::invalid_argument("unknown model '" + name + "' (see list_models())");
}

FractionalSystem get_model(const std::string& name, const std::map<std::string, double>& overrides,
                           std::span<const double> orders) {
    const ModelEntry& entry = model_info(name);
    std::map<std::string, double> params = entry.defaults;
    for (const auto& [key, value] : overrides) {
        auto it = params.find(key);
        if (it == params.end())
            throw std::invalid_argument("unknown parameter '" + key + "' for model '" + name +
                                        "'");
        it->second = value;
    }
    FractionalSystem sys = entry.builder(params);
    if (!orders.empty())
        set_orders(sys, orders);
    sys.validate();
    return sys;
}

void set_orders(FractionalSystem& system, std::span<const double> orders) {
    if (orders.size() != system.size())
        throw std::invalid_argument("set_orders: got " + std::to_string(orders.size()) +
                                    " order(s) for " + std::to_string(system.size()) +
                                    " state(s)");
    for (std::size_t i = 0; i < orders.size(); ++i) {
        if (!(orders[i] > 0.0) || orders[i] > 2.5)
            throw std::invalid_argument("set_orders: order " + std::to_string(orders[i]) +
                                        " outside (0, 2.5]");
        system.orders[i] = orders[i];
        const auto need = static_cast<std::size_t>(std::ceil(orders[i]));
        system.initData[i].resize(need, 0.0);  // missing derivatives default to 0
    }
}

}  // namespace hfde
