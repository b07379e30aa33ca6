#include "fedlibre/metadata/lom.hpp"

#include "fedlibre/metadata/namespaces.hpp"
#include "fedlibre/util/error.hpp"
#include "fedlibre/util/text.hpp"
#include "fedlibre/util/xml.hpp"

#include <cmath>
#include <limits>

namespace fedlibre::metadata {

namespace {

constexpr std::array<std::string_view, kLomCategoryCount> kCategoryElements{
    "general", "lifeCycle", "metaMetadata", "technical", "educational",
    "relation", "rights", "annotation", "classification",
};

using Warnings = std::vector<std::string>*;

void warn(Warnings w, std::string message)
{
    if (w)
        w->push_back(std::move(message));
}

const xml::Element* lom_child(const xml::Element& e, std::string_view name)
{
    return e.child(ns::kLom, name);
}

std::vector<LangString> lang_strings(const xml::Element& e)
{
    std::vector<LangString> out;
    for (const auto& s : e.children) {
        if (!s.is(ns::kLom, "string"))
            continue;
        auto value = s.trimmed_text();
        if (value.empty())
            continue;
        const std::string* lang = s.attribute("", "language");
        out.push_back({std::move(value), lang ? *lang : std::string()});
    }
    if (out.empty()) {
        auto value = e.trimmed_text();
        if (!value.empty())
            out.push_back({std::move(value), {}});
    }
    return out;
}

// Vocabulary-typed element: <x><source>LOMv1.0</source><value>v</value></x>
std::string vocab_value(const xml::Element& e)
{
    if (const auto* v = lom_child(e, "value"))
        return v->trimmed_text();
    return e.trimmed_text();
}

std::string date_value(const xml::Element& e)
{
    if (const auto* v = lom_child(e, "dateTime"))
        return v->trimmed_text();
    return e.trimmed_text();
}

std::optional<std::int64_t> duration_value(const xml::Element& e)
{
    std::string raw;
    if (const auto* d = lom_child(e, "duration"))
        raw = d->trimmed_text();
    else
        raw = e.trimmed_text();
    if (raw.empty())
        return std::nullopt;
    return parse_duration(raw);
}

std::optional<bool> yes_no(const xml::Element& e, Warnings w, std::string_view path)
{
    const auto v = text::fold(vocab_value(e));
    if (v == "yes" || v == "oui")
        return true;
    if (v == "no" || v == "non")
        return false;
    if (!v.empty())
        warn(w, std::string(path) + ": unrecognized value '" + v + "'");
    return std::nullopt;
}

void append(std::vector<LangString>& to, std::vector<LangString> from)
{
    for (auto& v : from)
        to.push_back(std::move(v));
}

void push_nonblank(std::vector<std::string>& to, std::string value)
{
    if (!value.empty())
        to.push_back(std::move(value));
}

void parse_general(const xml::Element& e, LomRecord& r, Warnings w)
{
    for (const auto& c : e.children) {
        if (c.ns != ns::kLom) {
            warn(w, "general: ignored element {" + c.ns + "}" + c.name);
            continue;
        }
        if (c.name == "identifier") {
            LomIdentifier id;
            if (const auto* cat = lom_child(c, "catalog"))
                id.catalog = cat->trimmed_text();
            if (const auto* entry = lom_child(c, "entry"))
                id.entry = entry->trimmed_text();
            if (!id.entry.empty())
                r.general.identifier.push_back(std::move(id));
        } else if (c.name == "title") {
            append(r.general.title, lang_strings(c));
        } else if (c.name == "language") {
            push_nonblank(r.general.language, c.trimmed_text());
        } else if (c.name == "description") {
            append(r.general.description, lang_strings(c));
        } else if (c.name == "keyword") {
            append(r.general.keyword, lang_strings(c));
        } else if (c.name == "coverage" || c.name == "structure" || c.name == "aggregationLevel") {
            warn(w, "general." + c.name + ": not retained");
        } else {
            warn(w, "general: ignored element " + c.name);
        }
    }
}

void parse_life_cycle(const xml::Element& e, LomRecord& r, Warnings w)
{
    for (const auto& c : e.children) {
        if (c.is(ns::kLom, "version")) {
            append(r.life_cycle.version, lang_strings(c));
        } else if (c.is(ns::kLom, "contribute")) {
            LomContribution contribution;
            if (const auto* role = lom_child(c, "role"))
                contribution.role = vocab_value(*role);
            if (const auto* entity = lom_child(c, "entity"))
                contribution.entity = entity->trimmed_text();
            if (const auto* date = lom_child(c, "date"))
                contribution.date = date_value(*date);
            if (!contribution.role.empty() || !contribution.entity.empty() || !contribution.date.empty())
                r.life_cycle.contribute.push_back(std::move(contribution));
        } else {
            warn(w, "lifeCycle: ignored element " + c.name);
        }
    }
}

void parse_meta_metadata(const xml::Element& e, LomRecord& r, Warnings w)
{
    for (const auto& c : e.children) {
        if (c.is(ns::kLom, "metadataSchema")) {
            const auto raw = c.trimmed_text();
            if (auto token = canonical_schema_token(raw))
                r.meta_metadata.schema = std::move(token);
            else if (!raw.empty())
                warn(w, "metaMetadata.metadataSchema: unsupported token '" + raw + "'");
        } else {
            warn(w, "metaMetadata: ignored element " + c.name);
        }
    }
}

void parse_technical(const xml::Element& e, LomRecord& r, Warnings w)
{
    for (const auto& c : e.children) {
        if (c.is(ns::kLom, "format")) {
            push_nonblank(r.technical.format, c.trimmed_text());
        } else if (c.is(ns::kLom, "size")) {
            const auto raw = c.trimmed_text();
            std::uint64_t value = 0;
            bool ok = !raw.empty() && raw.size() <= 19;
            for (char ch : raw) {
                if (ch < '0' || ch > '9') {
                    ok = false;
                    break;
                }
                value = value * 10 + static_cast<std::uint64_t>(ch - '0');
            }
            if (ok)
                r.technical.size_bytes = value;
            else if (!raw.empty())
                warn(w, "technical.size: not a byte count '" + raw + "'");
        } else if (c.is(ns::kLom, "location")) {
            push_nonblank(r.technical.location, c.trimmed_text());
        } else if (c.is(ns::kLom, "duration")) {
            r.technical.duration_seconds = duration_value(c);
        } else {
            warn(w, "technical: ignored element " + c.name);
        }
    }
}

void parse_educational(const xml::Element& e, LomRecord& r, Warnings w)
{
    auto& ed = r.educational;
    for (const auto& c : e.children) {
        if (c.ns != ns::kLom) {
            warn(w, "educational: ignored element {" + c.ns + "}" + c.name);
            continue;
        }
        if (c.name == "learningResourceType") {
            push_nonblank(ed.resource_type, vocab_value(c));
        } else if (c.name == "intendedEndUserRole") {
            push_nonblank(ed.intended_end_user_role, vocab_value(c));
        } else if (c.name == "context") {
            push_nonblank(ed.context, vocab_value(c));
        } else if (c.name == "typicalAgeRange") {
            auto values = lang_strings(c);
            if (!values.empty())
                ed.typical_age_range = values.front().value;
        } else if (c.name == "typicalLearningTime") {
            ed.typical_learning_time_seconds = duration_value(c);
        } else if (c.name == "language") {
            push_nonblank(ed.language, c.trimmed_text());
        } else {
            warn(w, "educational: ignored element " + c.name);
        }
    }
}

void parse_relation(const xml::Element& e, LomRecord& r, Warnings)
{
    LomRelation rel;
    if (const auto* kind = lom_child(e, "kind"))
        rel.kind = vocab_value(*kind);
    if (const auto* resource = lom_child(e, "resource")) {
        if (const auto* id = lom_child(*resource, "identifier")) {
            if (const auto* entry = lom_child(*id, "entry"))
                rel.target = entry->trimmed_text();
        }
    }
    if (!rel.kind.empty() || !rel.target.empty())
        r.relation.push_back(std::move(rel));
}

void parse_rights(const xml::Element& e, LomRecord& r, Warnings w)
{
    for (const auto& c : e.children) {
        if (c.is(ns::kLom, "cost"))
            r.rights.cost = yes_no(c, w, "rights.cost");
        else if (c.is(ns::kLom, "copyrightAndOtherRestrictions"))
            r.rights.copyright = yes_no(c, w, "rights.copyrightAndOtherRestrictions");
        else if (c.is(ns::kLom, "description"))
            append(r.rights.description, lang_strings(c));
        else
            warn(w, "rights: ignored element " + c.name);
    }
}

void parse_annotation(const xml::Element& e, LomRecord& r, Warnings)
{
    LomAnnotation a;
    if (const auto* entity = lom_child(e, "entity"))
        a.entity = entity->trimmed_text();
    if (const auto* date = lom_child(e, "date"))
        a.date = date_value(*date);
    if (const auto* description = lom_child(e, "description")) {
        auto values = lang_strings(*description);
        if (!values.empty())
            a.description = std::move(values.front());
    }
    if (!a.entity.empty() || !a.date.empty() || !a.description.value.empty())
        r.annotation.push_back(std::move(a));
}

void parse_classification(const xml::Element& e, LomRecord& r, Warnings)
{
    LomClassification cls;
    if (const auto* purpose = lom_child(e, "purpose"))
        cls.purpose = vocab_value(*purpose);
    for (const auto* path : e.children_named(ns::kLom, "taxonPath")) {
        LomTaxonPath tp;
        if (const auto* source = lom_child(*path, "source")) {
            auto values = lang_strings(*source);
            if (!values.empty())
                tp.source = values.front().value;
        }
        for (const auto* taxon : path->children_named(ns::kLom, "taxon")) {
            LomTaxon t;
            if (const auto* id = lom_child(*taxon, "id"))
                t.id = id->trimmed_text();
            if (const auto* entry = lom_child(*taxon, "entry")) {
                auto values = lang_strings(*entry);
                if (!values.empty())
                    t.entry = values.front().value;
            }
            if (!t.id.empty() || !t.entry.empty())
                tp.taxa.push_back(std::move(t));
        }
        if (!tp.source.empty() || !tp.taxa.empty())
            cls.taxon_paths.push_back(std::move(tp));
    }
    if (!cls.purpose.empty() || !cls.taxon_paths.empty())
        r.classification.push_back(std::move(cls));
}

} // namespace

std::string_view category_element(LomCategory c) noexcept
{
    return kCategoryElements[static_cast<std::size_t>(c)];
}

const std::vector<std::string>& accepted_schema_tokens()
{
    static const std::vector<std::string> tokens{"LOMv1.0", "LOMFRv1.0", "SupLOMFRv1.0"};
    return tokens;
}

std::optional<std::string> canonical_schema_token(std::string_view raw)
{
    const auto folded = text::fold(raw);
    for (const auto& token : accepted_schema_tokens()) {
        if (text::fold(token) == folded)
            return token;
    }
    return std::nullopt;
}

std::int64_t parse_duration(std::string_view iso)
{
    const auto fail = [&](const char* why) {
        return Error(Errc::MalformedXml, "invalid duration '" + std::string(iso) + "': " + why);
    };
    if (iso.size() < 2 || iso[0] != 'P')
        throw fail("must start with P");
    bool in_time = false;
    bool any = false;
    double total = 0;
    std::size_t i = 1;
    while (i < iso.size()) {
        if (iso[i] == 'T') {
            if (in_time)
                throw fail("repeated T");
            in_time = true;
            ++i;
            continue;
        }
        const std::size_t start = i;
        bool dot = false;
        while (i < iso.size() && ((iso[i] >= '0' && iso[i] <= '9') || (iso[i] == '.' && !dot) || iso[i] == ',')) {
            dot = dot || iso[i] == '.' || iso[i] == ',';
            ++i;
        }
        if (i == start || i == iso.size())
            throw fail("missing number or designator");
        std::string number(iso.substr(start, i - start));
        for (auto& ch : number)
            if (ch == ',')
                ch = '.';
        const double value = std::stod(number);
        const char designator = iso[i++];
        if (dot && designator != 'S')
            throw fail("fractions are only allowed on seconds");
        if (!in_time) {
            if (designator == 'D')
                total += value * 86400;
            else if (designator == 'Y' || designator == 'M' || designator == 'W')
                throw fail("calendar designators are not supported");
            else
                throw fail("unknown designator");
        } else {
            if (designator == 'H')
                total += value * 3600;
            else if (designator == 'M')
                total += value * 60;
            else if (designator == 'S')
                total += value;
            else
                throw fail("unknown designator");
        }
        any = true;
    }
    if (!any)
        throw fail("no components");
    if (total > static_cast<double>(std::numeric_limits<std::int64_t>::max() / 2))
        throw fail("out of range");
    return static_cast<std::int64_t>(std::llround(total));
}

std::string format_duration(std::int64_t seconds)
{
    if (seconds <= 0)
        return "PT0S";
    const std::int64_t days = seconds / 86400;
    const std::int64_t hours = (seconds % 86400) / 3600;
    const std::int64_t minutes = (seconds % 3600) / 60;
    const std::int64_t secs = seconds % 60;
    std::string out = "P";
    if (days)
        out += std::to_string(days) + "D";
    if (hours || minutes || secs) {
        out += "T";
        if (hours)
            out += std::to_string(hours) + "H";
        if (minutes)
            out += std::to_string(minutes) + "M";
        if (secs)
            out += std::to_string(secs) + "S";
    }
    return out;
}

std::string entity_display_name(std::string_view entity)
{
    if (!text::starts_with_ci(text::trim(entity), "BEGIN:VCARD"))
        return std::string(text::trim(entity));
    for (const auto& raw_line : text::split(entity, '\n')) {
        const auto line = text::trim(raw_line);
        if (text::starts_with_ci(line, "FN:"))
            return std::string(text::trim(line.substr(3)));
        if (text::starts_with_ci(line, "FN;")) {
            const auto colon = line.find(':');
            if (colon != std::string_view::npos)
                return std::string(text::trim(line.substr(colon + 1)));
        }
    }
    return std::string(text::trim(entity));
}

LomRecord parse_lom(std::string_view xml_text, std::vector<std::string>* warnings)
{
    const xml::Element root = xml::parse(xml_text);
    if (!root.is(ns::kLom, "lom"))
        throw Error(Errc::WrongNamespace, "root element is {" + root.ns + "}" + root.name + ", expected lom:lom");

    LomRecord record;
    for (const auto& c : root.children) {
        if (c.ns != ns::kLom) {
            warn(warnings, "ignored element {" + c.ns + "}" + c.name);
            continue;
        }
        std::optional<LomCategory> category;
        for (std::size_t i = 0; i < kLomCategoryCount; ++i) {
            if (kCategoryElements[i] == c.name)
                category = static_cast<LomCategory>(i);
        }
        if (!category) {
            warn(warnings, "ignored element " + c.name);
            continue;
        }
        record.mark(*category);
        switch (*category) {
        case LomCategory::General: parse_general(c, record, warnings); break;
        case LomCategory::LifeCycle: parse_life_cycle(c, record, warnings); break;
        case LomCategory::MetaMetadata: parse_meta_metadata(c, record, warnings); break;
        case LomCategory::Technical: parse_technical(c, record, warnings); break;
        case LomCategory::Educational: parse_educational(c, record, warnings); break;
        case LomCategory::Relation: parse_relation(c, record, warnings); break;
        case LomCategory::Rights: parse_rights(c, record, warnings); break;
        case LomCategory::Annotation: parse_annotation(c, record, warnings); break;
        case LomCategory::Classification: parse_classification(c, record, warnings); break;
        }
    }
    return record;
}

} // namespace fedlibre::metadata
