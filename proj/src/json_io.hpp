#pragma once

#include "wfbt/evaluation.hpp"
#include "wfbt/trading.hpp"

#include "json.hpp"

#include <string_view>

namespace wfbt::detail {

nlohmann::json params_to_json(const Params& params);
Params params_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);

/// Inverse of equity_csv; step returns are recovered as equity differences.
EquityCurve parse_equity_csv(std::string_view text);

}  // namespace wfbt::detail
