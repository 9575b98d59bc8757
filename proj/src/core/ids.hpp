#ifndef STRATOS_CORE_IDS_HPP
#define STRATOS_CORE_IDS_HPP

#include <functional>
#include <string>
#include <utility>

namespace stratos {

// Opaque string identifier, one family per tag type so that a UnitId can
// never be passed where a SourceId is expected.
template <class Tag>
class Id {
public:
    Id() = default;
    explicit Id(std::string value) : value_(std::move(value)) {}

    const std::string& str() const { return value_; }
    bool empty() const { return value_.empty(); }

    friend bool operator==(const Id& a, const Id& b) { return a.value_ == b.value_; }
    friend bool operator!=(const Id& a, const Id& b) { return a.value_ != b.value_; }
    friend bool operator<(const Id& a, const Id& b) { return a.value_ < b.value_; }

private:
    std::string value_;
};

struct UnitTag {};
struct SourceTag {};
struct SourceTypeTag {};
struct ThemeTag {};
struct ContractTag {};
struct CommitmentTag {};

using UnitId = Id<UnitTag>;
using SourceId = Id<SourceTag>;
using SourceTypeId = Id<SourceTypeTag>;
using ThemeId = Id<ThemeTag>;
using ContractId = Id<ContractTag>;
using CommitmentId = Id<CommitmentTag>;

}  // namespace stratos

template <class Tag>
struct std::hash<stratos::Id<Tag>> {
    std::size_t operator()(const stratos::Id<Tag>& id) const {
        return std::hash<std::string>{}(id.str());
    }
};

#endif
