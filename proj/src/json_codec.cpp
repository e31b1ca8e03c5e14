#include "griddisc/json_codec.hpp"

#include "griddisc/errors.hpp"

namespace griddisc {

using nlohmann::json;

namespace {

const json& require(const json& obj, const char* field) {
    if (!obj.is_object() || !obj.contains(field))
        throw InvalidParams(std::string("missing field '") + field + "'");
    return obj.at(field);
}

std::string require_string(const json& obj, const char* field) {
    const json& v = require(obj, field);
    if (!v.is_string()) throw InvalidParams(std::string("field '") + field + "' must be a string");
    return v.get<std::string>();
}

std::int64_t require_int(const json& obj, const char* field) {
    const json& v = require(obj, field);
    if (!v.is_number_integer())
        throw InvalidParams(std::string("field '") + field + "' must be an integer");
    return v.get<std::int64_t>();
}

} // namespace

json lease_to_json(const Lease& lease) {
    return json{{"granted_at", lease.granted_at},
                {"duration_secs", lease.duration_secs},
                {"expires_at", lease.expires_at}};
}

json record_to_json(const ServiceRecord& r) {
    json attrs = json::object();
    for (const auto& [k, v] : r.attributes) attrs[k] = v;
    return json{{"service_id", r.service_id.str()},
                {"name", r.name},
                {"server_url", r.server_url},
                {"methods", r.methods},
                {"attributes", attrs},
                {"lease", lease_to_json(r.lease)},
                {"stamp", json{{"wall_micros", r.stamp.wall_micros},
                               {"origin_node", r.stamp.origin.str()}}},
                {"tombstone", r.tombstone}};
}

Lease lease_from_json(const json& j) {
    Lease l;
    l.granted_at = require_int(j, "granted_at");
    l.duration_secs = require_int(j, "duration_secs");
    l.expires_at = require_int(j, "expires_at");
    return l;
}

ServiceRecord record_from_json(const json& j) {
    ServiceRecord r;
    auto id = Id128::parse(require_string(j, "service_id"));
    if (!id) throw InvalidParams("service_id is not a canonical id");
    r.service_id = *id;
    r.name = require_string(j, "name");
    r.server_url = require_string(j, "server_url");
    for (const auto& m : require(j, "methods")) {
        if (!m.is_string()) throw InvalidParams("methods must be strings");
        r.methods.push_back(m.get<std::string>());
    }
    for (const auto& [k, v] : require(j, "attributes").items()) {
        if (!v.is_string()) throw InvalidParams("attribute values must be strings");
        r.attributes[k] = v.get<std::string>();
    }
    r.lease = lease_from_json(require(j, "lease"));
    const json& stamp = require(j, "stamp");
    r.stamp.wall_micros = require_int(stamp, "wall_micros");
    auto origin = Id128::parse(require_string(stamp, "origin_node"));
    if (!origin) throw InvalidParams("origin_node is not a canonical id");
    r.stamp.origin = *origin;
    const json& tomb = require(j, "tombstone");
    if (!tomb.is_boolean()) throw InvalidParams("tombstone must be a boolean");
    r.tombstone = tomb.get<bool>();
    return r;
}

RecordInput record_input_from_params(const json& params) {
    RecordInput in;
    in.name = require_string(params, "name");
    in.server_url = require_string(params, "server_url");
    if (params.contains("methods")) {
        const json& methods = params.at("methods");
        if (!methods.is_array()) throw InvalidParams("field 'methods' must be an array");
        for (const auto& m : methods) {
            if (!m.is_string()) throw InvalidParams("methods must be strings");
            in.methods.push_back(m.get<std::string>());
        }
    }
    if (params.contains("attributes")) {
        const json& attrs = params.at("attributes");
        if (!attrs.is_object()) throw InvalidParams("field 'attributes' must be an object");
        for (const auto& [k, v] : attrs.items()) {
            if (!v.is_string()) throw InvalidParams("attribute values must be strings");
            in.attributes.emplace_back(k, v.get<std::string>());
        }
    }
    return in;
}

QueryFilter filter_from_params(const json& params) {
    QueryFilter f;
    if (params.contains("name_pattern")) {
        const json& v = params.at("name_pattern");
        if (!v.is_string()) throw InvalidParams("field 'name_pattern' must be a string");
        f.name_pattern = v.get<std::string>();
    }
    if (params.contains("server_url")) {
        const json& v = params.at("server_url");
        if (!v.is_string()) throw InvalidParams("field 'server_url' must be a string");
        f.server_url = v.get<std::string>();
    }
    if (params.contains("required_attrs")) {
        const json& attrs = params.at("required_attrs");
        if (!attrs.is_object()) throw InvalidParams("field 'required_attrs' must be an object");
        for (const auto& [k, v] : attrs.items()) {
            if (v.is_null())
                f.required_attrs.emplace_back(k, std::nullopt);
            else if (v.is_string())
                f.required_attrs.emplace_back(k, v.get<std::string>());
            else
                throw InvalidParams("required_attrs values must be strings or null");
        }
    }
    return f;
}

Id128 id_from_params(const json& params, const char* field) {
    auto id = Id128::parse(require_string(params, field));
    if (!id) throw InvalidParams(std::string("field '") + field + "' is not a canonical id");
    return *id;
}

} // namespace griddisc
