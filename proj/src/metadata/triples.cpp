#include "fedlibre/metadata/triples.hpp"

#include "fedlibre/metadata/namespaces.hpp"
#include "fedlibre/util/error.hpp"

#include <cstdio>
#include <functional>

namespace fedlibre::metadata {

namespace {

using Objects = std::vector<RdfObject>;
using Extractor = std::function<void(const LomRecord&, Objects&)>;

RdfObject literal(std::string value, std::string language = {})
{
    if (!is_valid_language_tag(language))
        language.clear();
    return {RdfObject::Kind::Literal, std::move(value), std::move(language)};
}

RdfObject iri_or_literal(const std::string& value)
{
    if (is_absolute_iri(value))
        return {RdfObject::Kind::Iri, value, {}};
    return literal(value);
}

void add_strings(Objects& out, const std::vector<std::string>& values)
{
    for (const auto& v : values)
        if (!v.empty())
            out.push_back(literal(v));
}

void add_lang_strings(Objects& out, const std::vector<LangString>& values)
{
    for (const auto& v : values)
        if (!v.value.empty())
            out.push_back(literal(v.value, v.language));
}

struct Row {
    std::string_view path;
    std::string_view local_name;
    Extractor extract;
};

const std::vector<Row>& rows()
{
    static const std::vector<Row> table{
        {"general.identifier", "generalIdentifier",
         [](const LomRecord& r, Objects& o) {
             for (const auto& id : r.general.identifier)
                 if (!id.entry.empty())
                     o.push_back(iri_or_literal(id.entry));
         }},
        {"general.title", "generalTitle", [](const LomRecord& r, Objects& o) { add_lang_strings(o, r.general.title); }},
        {"general.language", "generalLanguage",
         [](const LomRecord& r, Objects& o) { add_strings(o, r.general.language); }},
        {"general.description", "generalDescription",
         [](const LomRecord& r, Objects& o) { add_lang_strings(o, r.general.description); }},
        {"general.keyword", "generalKeyword",
         [](const LomRecord& r, Objects& o) { add_lang_strings(o, r.general.keyword); }},
        {"lifeCycle.version", "lifeCycleVersion",
         [](const LomRecord& r, Objects& o) { add_lang_strings(o, r.life_cycle.version); }},
        {"lifeCycle.contribute.role", "contributeRole",
         [](const LomRecord& r, Objects& o) {
             for (const auto& c : r.life_cycle.contribute)
                 if (!c.role.empty())
                     o.push_back(literal(c.role));
         }},
        {"lifeCycle.contribute.entity", "contributeEntity",
         [](const LomRecord& r, Objects& o) {
             for (const auto& c : r.life_cycle.contribute)
                 if (!c.entity.empty())
                     o.push_back(literal(c.entity));
         }},
        {"lifeCycle.contribute.date", "contributeDate",
         [](const LomRecord& r, Objects& o) {
             for (const auto& c : r.life_cycle.contribute)
                 if (!c.date.empty())
                     o.push_back(literal(c.date));
         }},
        {"metaMetadata.metadataSchema", "metadataSchema",
         [](const LomRecord& r, Objects& o) {
             if (r.meta_metadata.schema)
                 o.push_back(literal(*r.meta_metadata.schema));
         }},
        {"technical.format", "technicalFormat",
         [](const LomRecord& r, Objects& o) { add_strings(o, r.technical.format); }},
        {"technical.size", "technicalSize",
         [](const LomRecord& r, Objects& o) {
             if (r.technical.size_bytes)
                 o.push_back(literal(std::to_string(*r.technical.size_bytes)));
         }},
        {"technical.location", "technicalLocation",
         [](const LomRecord& r, Objects& o) {
             for (const auto& l : r.technical.location)
                 o.push_back(iri_or_literal(l));
         }},
        {"technical.duration", "technicalDuration",
         [](const LomRecord& r, Objects& o) {
             if (r.technical.duration_seconds)
                 o.push_back(literal(format_duration(*r.technical.duration_seconds)));
         }},
        {"educational.learningResourceType", "learningResourceType",
         [](const LomRecord& r, Objects& o) { add_strings(o, r.educational.resource_type); }},
        {"educational.intendedEndUserRole", "intendedEndUserRole",
         [](const LomRecord& r, Objects& o) { add_strings(o, r.educational.intended_end_user_role); }},
        {"educational.context", "educationalContext",
         [](const LomRecord& r, Objects& o) { add_strings(o, r.educational.context); }},
        {"educational.typicalAgeRange", "typicalAgeRange",
         [](const LomRecord& r, Objects& o) {
             if (r.educational.typical_age_range && !r.educational.typical_age_range->empty())
                 o.push_back(literal(*r.educational.typical_age_range));
         }},
        {"educational.typicalLearningTime", "typicalLearningTime",
         [](const LomRecord& r, Objects& o) {
             if (r.educational.typical_learning_time_seconds)
                 o.push_back(literal(format_duration(*r.educational.typical_learning_time_seconds)));
         }},
        {"educational.language", "educationalLanguage",
         [](const LomRecord& r, Objects& o) { add_strings(o, r.educational.language); }},
        {"relation.kind", "relationKind",
         [](const LomRecord& r, Objects& o) {
             for (const auto& rel : r.relation)
                 if (!rel.kind.empty())
                     o.push_back(literal(rel.kind));
         }},
        {"relation.resource", "relationResource",
         [](const LomRecord& r, Objects& o) {
             for (const auto& rel : r.relation)
                 if (!rel.target.empty())
                     o.push_back(iri_or_literal(rel.target));
         }},
        {"rights.cost", "rightsCost",
         [](const LomRecord& r, Objects& o) {
             if (r.rights.cost)
                 o.push_back(literal(*r.rights.cost ? "yes" : "no"));
         }},
        {"rights.copyrightAndOtherRestrictions", "rightsCopyright",
         [](const LomRecord& r, Objects& o) {
             if (r.rights.copyright)
                 o.push_back(literal(*r.rights.copyright ? "yes" : "no"));
         }},
        {"rights.description", "rightsDescription",
         [](const LomRecord& r, Objects& o) { add_lang_strings(o, r.rights.description); }},
        {"annotation.entity", "annotationEntity",
         [](const LomRecord& r, Objects& o) {
             for (const auto& a : r.annotation)
                 if (!a.entity.empty())
                     o.push_back(literal(a.entity));
         }},
        {"annotation.date", "annotationDate",
         [](const LomRecord& r, Objects& o) {
             for (const auto& a : r.annotation)
                 if (!a.date.empty())
                     o.push_back(literal(a.date));
         }},
        {"annotation.description", "annotationDescription",
         [](const LomRecord& r, Objects& o) {
             for (const auto& a : r.annotation)
                 if (!a.description.value.empty())
                     o.push_back(literal(a.description.value, a.description.language));
         }},
        {"classification.purpose", "classificationPurpose",
         [](const LomRecord& r, Objects& o) {
             for (const auto& c : r.classification)
                 if (!c.purpose.empty())
                     o.push_back(literal(c.purpose));
         }},
        {"classification.taxonPath.source", "taxonPathSource",
         [](const LomRecord& r, Objects& o) {
             for (const auto& c : r.classification)
                 for (const auto& tp : c.taxon_paths)
                     if (!tp.source.empty())
                         o.push_back(literal(tp.source));
         }},
        {"classification.taxonPath.taxon.id", "taxonId",
         [](const LomRecord& r, Objects& o) {
             for (const auto& c : r.classification)
                 for (const auto& tp : c.taxon_paths)
                     for (const auto& t : tp.taxa)
                         if (!t.id.empty())
                             o.push_back(literal(t.id));
         }},
        {"classification.taxonPath.taxon.entry", "taxonEntry",
         [](const LomRecord& r, Objects& o) {
             for (const auto& c : r.classification)
                 for (const auto& tp : c.taxon_paths)
                     for (const auto& t : tp.taxa)
                         if (!t.entry.empty())
                             o.push_back(literal(t.entry));
         }},
    };
    return table;
}

void append_escaped_iri(std::string& out, std::string_view iri)
{
    for (unsigned char c : iri) {
        if (c <= 0x20 || c == '<' || c == '>' || c == '"' || c == '{' || c == '}' || c == '|' || c == '^' ||
            c == '`' || c == '\\') {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\u%04X", c);
            out += buf;
        } else {
            out.push_back(static_cast<char>(c));
        }
    }
}

void append_escaped_literal(std::string& out, std::string_view s)
{
    for (unsigned char c : s) {
        switch (c) {
        case '\\': out += "\\\\"; break;
        case '"': out += "\\\""; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        case '\b': out += "\\b"; break;
        case '\f': out += "\\f"; break;
        default:
            if (c < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04X", c);
                out += buf;
            } else {
                out.push_back(static_cast<char>(c));
            }
        }
    }
}

} // namespace

std::span<const PredicateMapping> predicate_table()
{
    static const std::vector<PredicateMapping> table = [] {
        std::vector<PredicateMapping> t;
        for (const auto& row : rows())
            t.push_back({row.path, std::string(ns::kMlrLocal) + std::string(row.local_name)});
        return t;
    }();
    return table;
}

bool is_absolute_iri(std::string_view s)
{
    const auto colon = s.find(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 >= s.size())
        return false;
    const auto is_alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); };
    if (!is_alpha(s[0]))
        return false;
    for (std::size_t i = 1; i < colon; ++i) {
        const char c = s[i];
        if (!is_alpha(c) && !(c >= '0' && c <= '9') && c != '+' && c != '-' && c != '.')
            return false;
    }
    for (unsigned char c : s) {
        if (c <= 0x20 || c == '<' || c == '>' || c == '"' || c == '{' || c == '}' || c == '|' || c == '^' ||
            c == '`' || c == '\\')
            return false;
    }
    return true;
}

bool is_valid_language_tag(std::string_view s)
{
    if (s.empty())
        return true;
    bool first = true;
    std::size_t run = 0;
    for (char c : s) {
        if (c == '-') {
            if (run == 0)
                return false;
            first = false;
            run = 0;
            continue;
        }
        const bool alpha = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
        const bool digit = c >= '0' && c <= '9';
        if (!(alpha || (digit && !first)) || ++run > 8)
            return false;
    }
    return run > 0;
}

std::vector<Triple> lom_to_triples(const LomRecord& lom, std::string_view subject_iri)
{
    if (!is_absolute_iri(subject_iri))
        throw Error(Errc::InvalidIri, "subject is not an absolute IRI: " + std::string(subject_iri));
    std::vector<Triple> out;
    const auto table = predicate_table();
    const auto& extractors = rows();
    for (std::size_t i = 0; i < extractors.size(); ++i) {
        Objects objects;
        extractors[i].extract(lom, objects);
        for (auto& o : objects)
            out.push_back({std::string(subject_iri), table[i].predicate, std::move(o)});
    }
    return out;
}

std::string to_turtle(std::span<const Triple> triples)
{
    std::string out;
    for (const auto& t : triples) {
        out += '<';
        append_escaped_iri(out, t.subject);
        out += "> <";
        append_escaped_iri(out, t.predicate);
        out += "> ";
        if (t.object.kind == RdfObject::Kind::Iri) {
            out += '<';
            append_escaped_iri(out, t.object.value);
            out += '>';
        } else {
            out += '"';
            append_escaped_literal(out, t.object.value);
            out += '"';
            if (!t.object.language.empty()) {
                out += '@';
                out += t.object.language;
            }
        }
        out += " .\n";
    }
    return out;
}

} // namespace fedlibre::metadata
