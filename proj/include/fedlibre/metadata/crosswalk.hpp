#pragma once

#include "fedlibre/metadata/dublin_core.hpp"
#include "fedlibre/metadata/lom.hpp"

#include <string>
#include <vector>

namespace fedlibre::metadata {

struct CrosswalkResult {
    DublinCoreRecord dc;
    /// LOM paths that carried values but have no Dublin Core home, in
    /// category order, each listed once.
    std::vector<std::string> lost;
};

/// Lossy LOM to Dublin Core mapping:
///
///   general.title          -> title
///   general.description    -> description
///   general.keyword        -> subject
///   general.identifier     -> identifier (entry)
///   general.language       -> language
///   lifeCycle.contribute   -> creator when role is "author", contributor otherwise
///   technical.format       -> format
///   technical.location     -> source
///   rights.description     -> rights
///   relation               -> relation (target identifier)
///   educational.learningResourceType -> type
CrosswalkResult crosswalk_lom_to_dc(const LomRecord& lom);

} // namespace fedlibre::metadata
