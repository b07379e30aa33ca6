#pragma once

#include "fedlibre/metadata/dublin_core.hpp"
#include "fedlibre/store/record_store.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fedlibre::gateway {

/// oai_dc document for a Dublin Core record, values in element order with
/// xml:lang where known. No XML declaration.
std::string serialize_dc(const metadata::DublinCoreRecord& dc);

enum class ExportFormat { DcXml, LomXml, Csv, Bibtex };

std::string_view to_string(ExportFormat f) noexcept;
/// Throws Error(UnknownFormat).
ExportFormat parse_export_format(std::string_view s);
std::string_view content_type(ExportFormat f) noexcept;

struct ExportResult {
    std::string body;
    std::size_t exported = 0;
    /// (key, reason) for records left out: withdrawn, or not LOM for LOM_XML.
    std::vector<std::pair<std::string, std::string>> skipped;
};

/// Serializes `records` in the given order. Null entries are keys that did
/// not resolve. Throws Error(EmptyExport) when nothing resolves.
ExportResult export_records(const std::vector<store::RecordPtr>& records, ExportFormat format);

/// The header row of CSV exports: key and the 15 DC element names.
std::vector<std::string> csv_header();

} // namespace fedlibre::gateway
