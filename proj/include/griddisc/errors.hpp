#pragma once

#include <stdexcept>
#include <string>

namespace griddisc {

enum class Errc {
    invalid_record,
    lease_out_of_range,
    not_found,
    invalid_key,
    invalid_server_url,
    invalid_params,
    capacity_exceeded,
    io_failure,
    corrupt_store,
    payload_too_large,
    bad_magic,
    unsupported_version,
    truncated_packet,
    malformed_payload,
    send_failure,
    bind_failure,
    timeout,
    connect_failure,
    protocol_error,
    config_error,
    empty_input,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, std::string msg) : std::runtime_error(std::move(msg)), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

struct InvalidRecord : Error {
    explicit InvalidRecord(std::string m) : Error(Errc::invalid_record, std::move(m)) {}
};
struct LeaseOutOfRange : Error {
    explicit LeaseOutOfRange(std::string m) : Error(Errc::lease_out_of_range, std::move(m)) {}
};
struct NotFound : Error {
    explicit NotFound(std::string m) : Error(Errc::not_found, std::move(m)) {}
};
struct InvalidKey : Error {
    explicit InvalidKey(std::string m) : Error(Errc::invalid_key, std::move(m)) {}
};
struct InvalidServerUrl : Error {
    explicit InvalidServerUrl(std::string m) : Error(Errc::invalid_server_url, std::move(m)) {}
};
struct InvalidParams : Error {
    explicit InvalidParams(std::string m) : Error(Errc::invalid_params, std::move(m)) {}
};
struct CapacityExceeded : Error {
    explicit CapacityExceeded(std::string m) : Error(Errc::capacity_exceeded, std::move(m)) {}
};
struct IoFailure : Error {
    explicit IoFailure(std::string m) : Error(Errc::io_failure, std::move(m)) {}
};
struct CorruptStore : Error {
    explicit CorruptStore(std::string m) : Error(Errc::corrupt_store, std::move(m)) {}
};
struct PayloadTooLarge : Error {
    explicit PayloadTooLarge(std::string m) : Error(Errc::payload_too_large, std::move(m)) {}
};

// Decode failures share a base so hostile-input paths can catch them all.
struct DecodeError : Error {
    DecodeError(Errc code, std::string m) : Error(code, std::move(m)) {}
};
struct BadMagic : DecodeError {
    explicit BadMagic(std::string m) : DecodeError(Errc::bad_magic, std::move(m)) {}
};
struct UnsupportedVersion : DecodeError {
    explicit UnsupportedVersion(std::string m) : DecodeError(Errc::unsupported_version, std::move(m)) {}
};
struct TruncatedPacket : DecodeError {
    explicit TruncatedPacket(std::string m) : DecodeError(Errc::truncated_packet, std::move(m)) {}
};
struct MalformedPayload : DecodeError {
    explicit MalformedPayload(std::string m) : DecodeError(Errc::malformed_payload, std::move(m)) {}
};

struct SendFailure : Error {
    explicit SendFailure(std::string m) : Error(Errc::send_failure, std::move(m)) {}
};
struct BindFailure : Error {
    explicit BindFailure(std::string m) : Error(Errc::bind_failure, std::move(m)) {}
};
struct Timeout : Error {
    explicit Timeout(std::string m) : Error(Errc::timeout, std::move(m)) {}
};
struct ConnectFailure : Error {
    explicit ConnectFailure(std::string m) : Error(Errc::connect_failure, std::move(m)) {}
};
struct ProtocolError : Error {
    explicit ProtocolError(std::string m) : Error(Errc::protocol_error, std::move(m)) {}
};
struct ConfigError : Error {
    explicit ConfigError(std::string m) : Error(Errc::config_error, std::move(m)) {}
};
struct EmptyInput : Error {
    explicit EmptyInput(std::string m) : Error(Errc::empty_input, std::move(m)) {}
};

} // namespace griddisc
