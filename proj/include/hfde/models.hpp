#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hfde/system.hpp"

namespace hfde {

/** Catalog entry of a bundled model. */
struct ModelEntry {
    std::string name;
    std::string description;  ///< what the model is and where it comes from
    std::vector<std::string> stateNames;
    std::vector<double> defaultOrders;
    std::map<std::string, double> defaults;  ///< parameter values
    std::function<FractionalSystem(const std::map<std::string, double>&)> builder;
};

/** Names of all bundled models. */
std::vector<std::string> list_models();

/** Catalog metadata; throws std::invalid_argument for unknown names. */
const ModelEntry& model_info(const std::string& name);

/** Build a model.  overrides replaces individual parameter defaults (unknown
 *  keys are rejected); a non-empty orders vector replaces the default orders
 *  state-by-state. */
FractionalSystem get_model(const std::string& name,
                           const std::map<std::string, double>& overrides = {},
                           std::span<const double> orders = {});

/** Re-order an existing system: initial data is truncated or zero-padded to
 *  the ceil(order) values each state then requires. */
void set_orders(FractionalSystem& system, std::span<const double> orders);

}  // namespace hfde
