#pragma once

#include "fedlibre/metadata/payload.hpp"
#include "fedlibre/util/time.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fedlibre {

/// Store key: "<sourceId>:<oaiIdentifier>". Source ids are slugs without
/// ':' so the split is unambiguous. Ordering is plain string order.
class RecordKey {
public:
    RecordKey() = default;
    RecordKey(std::string_view source_id, std::string_view oai_identifier);
    /// Throws Error(BadArgument) when there is no ':' separator.
    static RecordKey parse(std::string_view key);

    const std::string& str() const noexcept { return value_; }
    std::string_view source_id() const noexcept { return std::string_view(value_).substr(0, split_); }
    std::string_view oai_identifier() const noexcept { return std::string_view(value_).substr(split_ + 1); }

    friend auto operator<=>(const RecordKey& a, const RecordKey& b) { return a.value_ <=> b.value_; }
    friend bool operator==(const RecordKey& a, const RecordKey& b) { return a.value_ == b.value_; }

private:
    std::string value_;
    std::size_t split_ = 0;
};

/// The OAI unit of exchange: header fields plus the parsed metadata.
struct RecordEnvelope {
    std::string source_id;
    std::string oai_identifier;
    Timestamp datestamp{};
    std::vector<std::string> set_specs;
    bool deleted = false;
    std::optional<metadata::MetadataPayload> payload; // absent when deleted

    RecordKey key() const { return RecordKey(source_id, oai_identifier); }

    /// Throws Error(InvalidRecord) when the envelope breaks its invariants.
    void validate() const;

    friend bool operator==(const RecordEnvelope&, const RecordEnvelope&) = default;
};

} // namespace fedlibre
