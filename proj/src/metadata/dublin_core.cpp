#include "fedlibre/metadata/dublin_core.hpp"

#include "fedlibre/metadata/namespaces.hpp"
#include "fedlibre/util/error.hpp"
#include "fedlibre/util/text.hpp"
#include "fedlibre/util/xml.hpp"

namespace fedlibre::metadata {

namespace {

constexpr std::array<std::string_view, kDcElementCount> kNames{
    "title",  "creator", "subject", "description", "publisher", "contributor", "date",  "type",
    "format", "identifier", "source", "language", "relation", "coverage", "rights",
};

} // namespace

std::string_view element_name(DcElement e) noexcept
{
    return kNames[static_cast<std::size_t>(e)];
}

std::optional<DcElement> element_from_name(std::string_view local_name) noexcept
{
    for (std::size_t i = 0; i < kNames.size(); ++i) {
        if (kNames[i] == local_name)
            return static_cast<DcElement>(i);
    }
    return std::nullopt;
}

const std::array<DcElement, kDcElementCount>& all_dc_elements() noexcept
{
    static const std::array<DcElement, kDcElementCount> all = [] {
        std::array<DcElement, kDcElementCount> a{};
        for (std::size_t i = 0; i < kDcElementCount; ++i)
            a[i] = static_cast<DcElement>(i);
        return a;
    }();
    return all;
}

void DublinCoreRecord::add(DcElement e, std::string_view value, std::string_view language)
{
    const auto trimmed = text::trim(value);
    if (trimmed.empty())
        return;
    (*this)[e].push_back({std::string(trimmed), std::string(language)});
}

std::string DublinCoreRecord::first(DcElement e) const
{
    const auto& slot = (*this)[e];
    return slot.empty() ? std::string() : slot.front().value;
}

std::vector<std::string> DublinCoreRecord::values(DcElement e) const
{
    std::vector<std::string> out;
    for (const auto& v : (*this)[e])
        out.push_back(v.value);
    return out;
}

bool DublinCoreRecord::empty() const
{
    for (const auto& slot : slots_) {
        if (!slot.empty())
            return false;
    }
    return true;
}

DublinCoreRecord parse_dc(std::string_view xml_text, std::vector<std::string>* warnings)
{
    const xml::Element root = xml::parse(xml_text);
    if (!root.is(ns::kOaiDc, "dc"))
        throw Error(Errc::WrongNamespace, "root element is {" + root.ns + "}" + root.name + ", expected oai_dc:dc");

    DublinCoreRecord record;
    for (const auto& child : root.children) {
        const auto element = child.ns == ns::kDcElements ? element_from_name(child.name) : std::nullopt;
        if (!element) {
            if (warnings)
                warnings->push_back("ignored element {" + child.ns + "}" + child.name);
            continue;
        }
        const std::string* lang = child.attribute(xml::kXmlNamespace, "lang");
        record.add(*element, child.text, lang ? std::string_view(*lang) : std::string_view());
    }
    return record;
}

} // namespace fedlibre::metadata
