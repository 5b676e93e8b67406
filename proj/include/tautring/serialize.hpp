#pragma once

#include <json.hpp>

#include "tautring/dr_cycle.hpp"
#include "tautring/prod_class.hpp"
#include "tautring/taut_class.hpp"

namespace tautring {

using Json = nlohmann::json;

Json graph_to_json(const StableGraph& G);
StableGraph graph_from_json(const Json& j);

Json tautclass_to_json(const TautClass& T);
TautClass tautclass_from_json(const Json& j);

Json prodtautclass_to_json(const ProdTautClass& P);

Json rpoly_tautclass_to_json(const RPolyTautClass& P);

}  // namespace tautring
