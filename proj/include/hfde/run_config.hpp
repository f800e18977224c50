#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hfde/system.hpp"

namespace hfde {

/** One state of an inline (config-defined) system. */
struct StateSpec {
    std::string name;
    double order = 1.0;
    std::vector<double> init;  ///< ceil(order) values
    std::string rhs;           ///< expression over t, state names and params
};

/** Everything a CLI run needs, merged from config file and flags. */
struct RunConfig {
    std::string model;             ///< registry model; empty for inline systems
    std::vector<StateSpec> states; ///< inline system; empty when model is set
    std::map<std::string, double> params;  ///< model overrides / expression constants
    std::vector<double> orders;    ///< optional per-state order override
    double T = 1.0;
    double h = 0.0;      ///< step width (0: use m)
    std::size_t m = 0;   ///< subinterval count (0: use h)
    double newtonTol = 1e-12;
    int maxNewtonIters = 50;
    SolveMode mode = SolveMode::Marching;
    std::string outPath;
};

/** Parse and validate a JSON config document.  Throws std::invalid_argument
 *  with a field-specific message on any violation. */
RunConfig parse_run_config(const nlohmann::json& doc);

/** Build the FractionalSystem the config describes (registry model or inline
 *  expression system); applies params, orders and horizon. */
FractionalSystem build_system(const RunConfig& config);

/** The solver settings portion of the config. */
SolveConfig to_solve_config(const RunConfig& config);

}  // namespace hfde
