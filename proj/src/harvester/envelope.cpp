#include "fedlibre/harvester/envelope.hpp"

#include "fedlibre/util/error.hpp"

namespace fedlibre {

RecordKey::RecordKey(std::string_view source_id, std::string_view oai_identifier)
    : value_(std::string(source_id) + ":" + std::string(oai_identifier)), split_(source_id.size())
{
}

RecordKey RecordKey::parse(std::string_view key)
{
    const auto pos = key.find(':');
    if (pos == std::string_view::npos || pos == 0 || pos + 1 == key.size())
        throw Error(Errc::BadArgument, "malformed record key '" + std::string(key) + "'");
    return RecordKey(key.substr(0, pos), key.substr(pos + 1));
}

void RecordEnvelope::validate() const
{
    if (oai_identifier.empty())
        throw Error(Errc::InvalidRecord, "envelope without identifier");
    if (source_id.empty() || source_id.find(':') != std::string::npos)
        throw Error(Errc::InvalidRecord, "envelope has invalid source id '" + source_id + "'");
    if (deleted && payload)
        throw Error(Errc::InvalidRecord, "deleted envelope carries a payload: " + oai_identifier);
    if (!deleted && !payload)
        throw Error(Errc::InvalidRecord, "live envelope without payload: " + oai_identifier);
}

} // namespace fedlibre
