#include "fedlibre/util/error.hpp"

namespace fedlibre {

std::string_view to_string(Errc code) noexcept
{
    switch (code) {
    case Errc::MalformedXml: return "MalformedXml";
    case Errc::WrongNamespace: return "WrongNamespace";
    case Errc::InvalidIri: return "InvalidIri";
    case Errc::UnknownProfile: return "UnknownProfile";
    case Errc::InvalidVocabulary: return "InvalidVocabulary";
    case Errc::InvalidRecord: return "InvalidRecord";
    case Errc::Transport: return "Transport";
    case Errc::ProtocolError: return "ProtocolError";
    case Errc::UnsupportedVersion: return "UnsupportedVersion";
    case Errc::OaiError: return "OaiError";
    case Errc::BadArgument: return "BadArgument";
    case Errc::StorageFailure: return "StorageFailure";
    case Errc::NotFound: return "NotFound";
    case Errc::DuplicateSource: return "DuplicateSource";
    case Errc::UnknownSource: return "UnknownSource";
    case Errc::EmptyQuery: return "EmptyQuery";
    case Errc::BadPage: return "BadPage";
    case Errc::UnknownFormat: return "UnknownFormat";
    case Errc::EmptyExport: return "EmptyExport";
    case Errc::Config: return "Config";
    }
    return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(message), code_(code)
{
}

OaiError::OaiError(std::string oai_code, const std::string& message)
    : Error(Errc::OaiError, message), oai_code_(std::move(oai_code))
{
}

} // namespace fedlibre
