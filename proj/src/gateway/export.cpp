#include "fedlibre/gateway/export.hpp"

#include "fedlibre/metadata/namespaces.hpp"
#include "fedlibre/util/error.hpp"
#include "fedlibre/util/text.hpp"
#include "fedlibre/util/xml.hpp"

#include <cctype>

namespace fedlibre::gateway {

using metadata::DcElement;

std::string serialize_dc(const metadata::DublinCoreRecord& dc)
{
    std::string out = "<oai_dc:dc xmlns:oai_dc=\"" + std::string(ns::kOaiDc) + "\" xmlns:dc=\"" +
                      std::string(ns::kDcElements) + "\" xmlns:xsi=\"" + std::string(ns::kXsi) +
                      "\" xsi:schemaLocation=\"" + std::string(ns::kOaiDc) + " " + std::string(ns::kOaiDcSchema) + "\">";
    for (auto e : metadata::all_dc_elements()) {
        const auto name = std::string(metadata::element_name(e));
        for (const auto& v : dc[e]) {
            out += "<dc:" + name;
            if (!v.language.empty())
                out += " xml:lang=\"" + xml::escape_attribute(v.language) + "\"";
            out += ">" + xml::escape_text(v.value) + "</dc:" + name + ">";
        }
    }
    return out + "</oai_dc:dc>";
}

std::string_view to_string(ExportFormat f) noexcept
{
    switch (f) {
    case ExportFormat::DcXml: return "DC_XML";
    case ExportFormat::LomXml: return "LOM_XML";
    case ExportFormat::Csv: return "CSV";
    case ExportFormat::Bibtex: return "BIBTEX";
    }
    return "DC_XML";
}

ExportFormat parse_export_format(std::string_view s)
{
    std::string upper;
    for (char c : s)
        upper += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    for (auto f : {ExportFormat::DcXml, ExportFormat::LomXml, ExportFormat::Csv, ExportFormat::Bibtex})
        if (upper == to_string(f))
            return f;
    throw Error(Errc::UnknownFormat, "unknown export format '" + std::string(s) + "' (DC_XML, LOM_XML, CSV, BIBTEX)");
}

std::string_view content_type(ExportFormat f) noexcept
{
    switch (f) {
    case ExportFormat::DcXml:
    case ExportFormat::LomXml: return "application/xml; charset=utf-8";
    case ExportFormat::Csv: return "text/csv; charset=utf-8";
    case ExportFormat::Bibtex: return "application/x-bibtex; charset=utf-8";
    }
    return "application/octet-stream";
}

std::vector<std::string> csv_header()
{
    std::vector<std::string> out{"key"};
    for (auto e : metadata::all_dc_elements())
        out.emplace_back(metadata::element_name(e));
    return out;
}

namespace {

std::string csv_field(std::string_view v)
{
    if (v.find_first_of(",\"\r\n") == std::string_view::npos)
        return std::string(v);
    std::string out = "\"";
    for (char c : v) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + '"';
}

std::string csv_row(const std::vector<std::string>& fields)
{
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i)
            out += ',';
        out += csv_field(fields[i]);
    }
    return out + "\r\n";
}

std::string join(const std::vector<std::string>& v, std::string_view sep)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            out += sep;
        out += v[i];
    }
    return out;
}

std::string bib_escape(std::string_view s)
{
    std::string out;
    for (char c : s) {
        if (c == '{' || c == '}' || c == '\\')
            out += '\\';
        out += c;
    }
    return out;
}

std::string bib_key(std::string_view key)
{
    std::string out;
    for (char c : key)
        out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
    return out;
}

std::string first_year(const std::vector<std::string>& dates)
{
    for (const auto& d : dates) {
        for (std::size_t i = 0; i + 4 <= d.size(); ++i) {
            bool digits = true;
            for (std::size_t k = 0; k < 4 && digits; ++k)
                digits = std::isdigit(static_cast<unsigned char>(d[i + k])) != 0;
            const bool bounded = (i == 0 || !std::isdigit(static_cast<unsigned char>(d[i - 1]))) &&
                                 (i + 4 == d.size() || !std::isdigit(static_cast<unsigned char>(d[i + 4])));
            if (digits && bounded)
                return d.substr(i, 4);
        }
    }
    return {};
}

std::string bibtex_entry(const store::StoredRecord& r)
{
    const auto dc = r.envelope.payload->dc_view();
    std::vector<std::pair<std::string, std::string>> fields;
    const auto title = dc.first(DcElement::Title);
    if (!title.empty())
        fields.push_back({"title", title});
    const auto creators = dc.values(DcElement::Creator);
    if (!creators.empty())
        fields.push_back({"author", join(creators, " and ")});
    const auto year = first_year(dc.values(DcElement::Date));
    if (!year.empty())
        fields.push_back({"year", year});
    if (const auto url = metadata::resource_url(*r.envelope.payload))
        fields.push_back({"url", *url});
    const auto description = dc.first(DcElement::Description);
    if (!description.empty())
        fields.push_back({"note", text::ellipsize(description, 200)});
    std::string out = "@misc{" + bib_key(r.key.str());
    for (const auto& [name, value] : fields)
        out += ",\n  " + name + "={" + bib_escape(value) + "}";
    return out + "\n}\n";
}

std::string xml_envelope(const std::string& items, std::size_t count, std::string_view format)
{
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<export xmlns=\"" + std::string(ns::kExport) +
           "\" format=\"" + std::string(format) + "\" count=\"" + std::to_string(count) + "\">" + items +
           "</export>\n";
}

} // namespace

ExportResult export_records(const std::vector<store::RecordPtr>& records, ExportFormat format)
{
    ExportResult out;
    bool resolved = false;
    std::string items;
    if (format == ExportFormat::Csv)
        out.body = csv_row(csv_header());
    for (const auto& r : records) {
        if (!r)
            continue;
        resolved = true;
        const auto key = r->key.str();
        if (!r->envelope.payload) {
            out.skipped.push_back({key, "withdrawn"});
            continue;
        }
        switch (format) {
        case ExportFormat::DcXml:
            items += "<record key=\"" + xml::escape_attribute(key) + "\">" + serialize_dc(r->envelope.payload->dc_view()) +
                     "</record>";
            break;
        case ExportFormat::LomXml:
            if (!r->envelope.payload->is_lom()) {
                out.skipped.push_back({key, "not a LOM record"});
                continue;
            }
            items += "<record key=\"" + xml::escape_attribute(key) + "\">" +
                     std::string(xml::strip_prolog(r->envelope.payload->raw_xml())) + "</record>";
            break;
        case ExportFormat::Csv: {
            const auto dc = r->envelope.payload->dc_view();
            std::vector<std::string> row{key};
            for (auto e : metadata::all_dc_elements())
                row.push_back(join(dc.values(e), "; "));
            out.body += csv_row(row);
            break;
        }
        case ExportFormat::Bibtex:
            if (out.exported)
                out.body += "\n";
            out.body += bibtex_entry(*r);
            break;
        }
        ++out.exported;
    }
    if (!resolved)
        throw Error(Errc::EmptyExport, "none of the requested records exist");
    if (format == ExportFormat::DcXml || format == ExportFormat::LomXml) {
        for (const auto& [key, reason] : out.skipped)
            items += "<skipped key=\"" + xml::escape_attribute(key) + "\" reason=\"" + xml::escape_attribute(reason) + "\"/>";
        out.body = xml_envelope(items, out.exported, to_string(format));
    }
    return out;
}

} // namespace fedlibre::gateway
