// JSON schemas: channels {"m","n","rows"}, decompositions {"m","n","atoms"}
// (support atoms only, 1-based images), and report serialization for the CLI.
#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "icap/intrinsic.hpp"
#include "icap/state_info.hpp"

namespace icap {

using Json = nlohmann::json;

Json to_json(const Channel& w);
Channel channel_from_json(const Json& j);
Channel load_channel(const std::string& path);

Json to_json(const Decomposition& lambda);
Decomposition decomposition_from_json(const Json& j);

Json to_json(const RankProbReport& r);
Json to_json(const RankProfile& r);
Json to_json(const CapacityCertificate& c);
Json to_json(const ICReport& r);
Json to_json(const BinaryBinaryReport& r);
Json to_json(const VerifyReport& r);

/// Fixed-precision decimal with 10 significant digits, for CSV cells.
std::string csv_number(double x);

}  // namespace icap
