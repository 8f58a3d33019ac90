#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "stylodet/protocols.hpp"

namespace stylodet {

// {protocol, config, per_domain:[{domain, model, metric, mean, se, n}],
//  overall:[...], warnings:[...]}
nlohmann::ordered_json report_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);

// One line per row: section,domain,model,metric,mean,se,n.
void write_report_csv(std::ostream& out, const EvalReport& report);

}  // namespace stylodet
