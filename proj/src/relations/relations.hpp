#ifndef STRATOS_RELATIONS_RELATIONS_HPP
#define STRATOS_RELATIONS_RELATIONS_HPP

#include <set>
#include <string>

#include "core/model.hpp"

namespace stratos {

enum class SourcingTag {
    SelfsourcingSource,
    NonSelfsourcingSource,
    SelfsourcingType,
    PartialSelfsourcingType,
    NonSelfsourcingType,
    PartialNonSelfsourcingType,
    NotUsing,
};

const char* sourcing_tag_name(SourcingTag t);

// Composite answer for type-level queries. The variants overlap (full
// implies partial), so callers get the tag plus the whole lattice.
struct TypeStatus {
    SourcingTag tag = SourcingTag::NotUsing;
    bool selfsourcing_type = false;
    bool partial_selfsourcing_type = false;
    bool non_selfsourcing_type = false;
    bool partial_non_selfsourcing_type = false;
};

bool uses(const WorldState& state, const UnitId& u, const SourceId& s);
bool selfsourcing_for_source(const WorldState& state, const UnitId& u, const SourceId& s);
bool non_selfsourcing_for_source(const WorldState& state, const UnitId& u, const SourceId& s);
TypeStatus type_status(const WorldState& state, const UnitId& u, const SourceTypeId& tau);
std::set<SourceId> dependency_closure(const WorldState& state, const SourceId& s);

// sources of type tau used by u (via themes u maintains), sorted
std::vector<SourceId> used_sources_of_type(const WorldState& state, const UnitId& u,
                                           const SourceTypeId& tau);

}  // namespace stratos

#endif
