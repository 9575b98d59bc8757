#include "relations/relations.hpp"

#include <deque>

#include "core/error.hpp"

namespace stratos {

const char* sourcing_tag_name(SourcingTag t) {
    switch (t) {
        case SourcingTag::SelfsourcingSource: return "selfsourcing_source";
        case SourcingTag::NonSelfsourcingSource: return "non_selfsourcing_source";
        case SourcingTag::SelfsourcingType: return "selfsourcing_type";
        case SourcingTag::PartialSelfsourcingType: return "partial_selfsourcing_type";
        case SourcingTag::NonSelfsourcingType: return "non_selfsourcing_type";
        case SourcingTag::PartialNonSelfsourcingType: return "partial_non_selfsourcing_type";
        case SourcingTag::NotUsing: return "not_using";
    }
    return "not_using";
}

bool uses(const WorldState& state, const UnitId& u, const SourceId& s) {
    (void)state.unit(u);
    (void)state.source(s);
    for (const auto& ur : state.use_relations) {
        if (ur.user == u && ur.source == s && state.has_theme(ur.theme) &&
            state.theme(ur.theme).maintainer == u) {
            return true;
        }
    }
    return false;
}

bool selfsourcing_for_source(const WorldState& state, const UnitId& u, const SourceId& s) {
    return uses(state, u, s) && state.owner_of(s) == u;
}

bool non_selfsourcing_for_source(const WorldState& state, const UnitId& u, const SourceId& s) {
    return uses(state, u, s) && !(state.owner_of(s) == u);
}

std::vector<SourceId> used_sources_of_type(const WorldState& state, const UnitId& u,
                                           const SourceTypeId& tau) {
    (void)state.unit(u);
    (void)state.source_type(tau);
    std::set<SourceId> out;
    for (const auto& ur : state.use_relations) {
        if (!(ur.user == u) || !state.has_source(ur.source)) continue;
        if (!(state.source(ur.source).type == tau)) continue;
        if (state.has_theme(ur.theme) && state.theme(ur.theme).maintainer == u) {
            out.insert(ur.source);
        }
    }
    return {out.begin(), out.end()};
}

TypeStatus type_status(const WorldState& state, const UnitId& u, const SourceTypeId& tau) {
    auto used = used_sources_of_type(state, u, tau);
    TypeStatus st;
    if (used.empty()) {
        st.tag = SourcingTag::NotUsing;
        return st;
    }
    bool all_owned = true;
    bool any_owned = false;
    bool all_foreign = true;
    bool any_foreign = false;
    for (const auto& s : used) {
        bool owned = state.owner_of(s) == u;
        all_owned &= owned;
        any_owned |= owned;
        all_foreign &= !owned;
        any_foreign |= !owned;
    }
    st.selfsourcing_type = all_owned;
    st.partial_selfsourcing_type = any_owned;
    st.non_selfsourcing_type = all_foreign;
    st.partial_non_selfsourcing_type = any_foreign;
    if (st.selfsourcing_type) {
        st.tag = SourcingTag::SelfsourcingType;
    } else if (st.non_selfsourcing_type) {
        st.tag = SourcingTag::NonSelfsourcingType;
    } else if (st.partial_selfsourcing_type) {
        // mixed ownership: both partial variants hold, selfsourcing side wins
        st.tag = SourcingTag::PartialSelfsourcingType;
    } else {
        st.tag = SourcingTag::PartialNonSelfsourcingType;
    }
    return st;
}

std::set<SourceId> dependency_closure(const WorldState& state, const SourceId& s) {
    (void)state.source(s);
    // depends_on is authored one-way but means mutual need, so close over
    // the symmetric relation
    std::map<SourceId, std::set<SourceId>> adj;
    for (const auto& [id, src] : state.sources) {
        for (const auto& d : src.depends_on) {
            if (!state.has_source(d)) continue;
            adj[id].insert(d);
            adj[d].insert(id);
        }
    }
    std::set<SourceId> out{s};
    std::deque<SourceId> frontier{s};
    while (!frontier.empty()) {
        SourceId cur = frontier.front();
        frontier.pop_front();
        for (const auto& next : adj[cur]) {
            if (out.insert(next).second) frontier.push_back(next);
        }
    }
    return out;
}

}  // namespace stratos
