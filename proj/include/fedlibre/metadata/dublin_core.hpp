#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fedlibre::metadata {

/// A text value with an optional BCP-47 language tag.
struct LangString {
    std::string value;
    std::string language;

    friend bool operator==(const LangString&, const LangString&) = default;
};

/// The fifteen Dublin Core elements, in the order of the DC element set.
enum class DcElement : std::size_t {
    Title,
    Creator,
    Subject,
    Description,
    Publisher,
    Contributor,
    Date,
    Type,
    Format,
    Identifier,
    Source,
    Language,
    Relation,
    Coverage,
    Rights,
};

inline constexpr std::size_t kDcElementCount = 15;

std::string_view element_name(DcElement e) noexcept;
std::optional<DcElement> element_from_name(std::string_view local_name) noexcept;
const std::array<DcElement, kDcElementCount>& all_dc_elements() noexcept;

class DublinCoreRecord {
public:
    std::vector<LangString>& operator[](DcElement e) { return slots_[static_cast<std::size_t>(e)]; }
    const std::vector<LangString>& operator[](DcElement e) const { return slots_[static_cast<std::size_t>(e)]; }

    /// Appends a value; blank values (after trimming) are dropped.
    void add(DcElement e, std::string_view value, std::string_view language = {});

    /// First value of an element, or empty.
    std::string first(DcElement e) const;
    std::vector<std::string> values(DcElement e) const;
    bool empty() const;

    friend bool operator==(const DublinCoreRecord&, const DublinCoreRecord&) = default;

private:
    std::array<std::vector<LangString>, kDcElementCount> slots_;
};

/// Parses an oai_dc container document. Unknown children are skipped and
/// reported in `warnings` when it is non-null.
DublinCoreRecord parse_dc(std::string_view xml, std::vector<std::string>* warnings = nullptr);

} // namespace fedlibre::metadata
