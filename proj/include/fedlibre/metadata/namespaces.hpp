#pragma once

#include <string_view>

namespace fedlibre::ns {

inline constexpr std::string_view kOaiPmh = "http://www.openarchives.org/OAI/2.0/";
inline constexpr std::string_view kOaiDc = "http://www.openarchives.org/OAI/2.0/oai_dc/";
inline constexpr std::string_view kDcElements = "http://purl.org/dc/elements/1.1/";
inline constexpr std::string_view kLom = "http://ltsc.ieee.org/xsd/LOM";
inline constexpr std::string_view kXsi = "http://www.w3.org/2001/XMLSchema-instance";

inline constexpr std::string_view kOaiPmhSchema = "http://www.openarchives.org/OAI/2.0/OAI-PMH.xsd";
inline constexpr std::string_view kOaiDcSchema = "http://www.openarchives.org/OAI/2.0/oai_dc.xsd";
inline constexpr std::string_view kLomSchema = "http://ltsc.ieee.org/xsd/lomv1.0/lom.xsd";

/// Envelope of DC_XML and LOM_XML exports.
inline constexpr std::string_view kExport = "urn:x-fedora-libre:export";
/// Namespace of the local, non-normative LOM-to-triples predicate table.
inline constexpr std::string_view kMlrLocal = "urn:x-fedora-libre:mlr-local#";

} // namespace fedlibre::ns
