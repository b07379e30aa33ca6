#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fedlibre {

enum class Errc {
    MalformedXml,
    WrongNamespace,
    InvalidIri,
    UnknownProfile,
    InvalidVocabulary,
    InvalidRecord,
    Transport,
    ProtocolError,
    UnsupportedVersion,
    OaiError,
    BadArgument,
    StorageFailure,
    NotFound,
    DuplicateSource,
    UnknownSource,
    EmptyQuery,
    BadPage,
    UnknownFormat,
    EmptyExport,
    Config,
};

std::string_view to_string(Errc code) noexcept;

/// Base exception for every operational failure in the library. The code is
/// stable and machine-greppable; the message is for humans.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message);

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

/// An OAI-PMH protocol error reported by a remote repository (or raised by
/// the local server). `oai_code()` is one of the protocol's error codes,
/// e.g. "idDoesNotExist".
class OaiError : public Error {
public:
    OaiError(std::string oai_code, const std::string& message);

    const std::string& oai_code() const noexcept { return oai_code_; }

private:
    std::string oai_code_;
};

} // namespace fedlibre
