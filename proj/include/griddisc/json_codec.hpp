#pragma once

#include "griddisc/record.hpp"

#include <json.hpp>

namespace griddisc {

// JSON shapes used on the RPC surface. All times are integer microseconds
// since the Unix epoch; ids are canonical 36-char strings.

nlohmann::json lease_to_json(const Lease& lease);
nlohmann::json record_to_json(const ServiceRecord& record);

// Strict parsers for client/test use; throw InvalidParams on bad shape.
Lease lease_from_json(const nlohmann::json& j);
ServiceRecord record_from_json(const nlohmann::json& j);

// Request-parameter parsing (throws InvalidParams naming the field).
RecordInput record_input_from_params(const nlohmann::json& params);
QueryFilter filter_from_params(const nlohmann::json& params);
Id128 id_from_params(const nlohmann::json& params, const char* field);

} // namespace griddisc
