#pragma once

#include "fedlibre/metadata/lom.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fedlibre::metadata {

struct RdfObject {
    enum class Kind { Iri, Literal };
    Kind kind = Kind::Literal;
    std::string value;
    std::string language; // literals only

    friend bool operator==(const RdfObject&, const RdfObject&) = default;
};

struct Triple {
    std::string subject;
    std::string predicate;
    RdfObject object;

    friend bool operator==(const Triple&, const Triple&) = default;
};

/// One row of the LOM-to-triples predicate table. `path` is the LomRecord
/// leaf it reads; `predicate` is the full IRI under ns::kMlrLocal.
struct PredicateMapping {
    std::string_view path;
    std::string predicate;
};

/// The predicate table, in output order. It is local and non-normative: it
/// does not use ISO/IEC 19788 element identifiers.
std::span<const PredicateMapping> predicate_table();

bool is_absolute_iri(std::string_view s);
bool is_valid_language_tag(std::string_view s);

/// One triple per non-empty leaf value, all with `subject_iri` as subject,
/// ordered by the predicate table (then by value order within a leaf).
/// Throws Error(InvalidIri) when `subject_iri` is not absolute.
std::vector<Triple> lom_to_triples(const LomRecord& lom, std::string_view subject_iri);

/// N-Triples-compatible Turtle: UTF-8, one triple per line, full IRIs.
std::string to_turtle(std::span<const Triple> triples);

} // namespace fedlibre::metadata
