#include "fedlibre/metadata/crosswalk.hpp"

#include "fedlibre/util/text.hpp"

#include <algorithm>

namespace fedlibre::metadata {

namespace {

void lose(std::vector<std::string>& lost, std::string path)
{
    if (std::find(lost.begin(), lost.end(), path) == lost.end())
        lost.push_back(std::move(path));
}

} // namespace

CrosswalkResult crosswalk_lom_to_dc(const LomRecord& lom)
{
    CrosswalkResult out;
    auto& dc = out.dc;

    for (const auto& t : lom.general.title)
        dc.add(DcElement::Title, t.value, t.language);
    for (const auto& d : lom.general.description)
        dc.add(DcElement::Description, d.value, d.language);
    for (const auto& k : lom.general.keyword)
        dc.add(DcElement::Subject, k.value, k.language);
    for (const auto& id : lom.general.identifier)
        dc.add(DcElement::Identifier, id.entry);
    for (const auto& l : lom.general.language)
        dc.add(DcElement::Language, l);

    if (!lom.life_cycle.version.empty())
        lose(out.lost, "lifeCycle.version");
    for (const auto& c : lom.life_cycle.contribute) {
        const auto name = entity_display_name(c.entity);
        if (text::fold(c.role) == "author")
            dc.add(DcElement::Creator, name);
        else
            dc.add(DcElement::Contributor, name);
        if (!c.role.empty() && text::fold(c.role) != "author")
            lose(out.lost, "lifeCycle.contribute.role");
        if (!c.date.empty())
            lose(out.lost, "lifeCycle.contribute.date");
    }

    if (lom.meta_metadata.schema)
        lose(out.lost, "metaMetadata.metadataSchema");

    for (const auto& f : lom.technical.format)
        dc.add(DcElement::Format, f);
    if (lom.technical.size_bytes)
        lose(out.lost, "technical.size");
    for (const auto& l : lom.technical.location)
        dc.add(DcElement::Source, l);
    if (lom.technical.duration_seconds)
        lose(out.lost, "technical.duration");

    for (const auto& t : lom.educational.resource_type)
        dc.add(DcElement::Type, t);
    if (!lom.educational.intended_end_user_role.empty())
        lose(out.lost, "educational.intendedEndUserRole");
    if (!lom.educational.context.empty())
        lose(out.lost, "educational.context");
    if (lom.educational.typical_age_range)
        lose(out.lost, "educational.typicalAgeRange");
    if (lom.educational.typical_learning_time_seconds)
        lose(out.lost, "educational.typicalLearningTime");
    if (!lom.educational.language.empty())
        lose(out.lost, "educational.language");

    for (const auto& r : lom.relation) {
        dc.add(DcElement::Relation, r.target);
        if (!r.kind.empty())
            lose(out.lost, "relation.kind");
    }

    if (lom.rights.cost)
        lose(out.lost, "rights.cost");
    if (lom.rights.copyright)
        lose(out.lost, "rights.copyrightAndOtherRestrictions");
    for (const auto& d : lom.rights.description)
        dc.add(DcElement::Rights, d.value, d.language);

    if (!lom.annotation.empty())
        lose(out.lost, "annotation");
    if (!lom.classification.empty())
        lose(out.lost, "classification");
    return out;
}

} // namespace fedlibre::metadata
