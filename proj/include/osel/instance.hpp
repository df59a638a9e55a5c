#pragma once

#include <string>
#include <vector>

#include "osel/distribution.hpp"

namespace osel {

struct Box {
    std::string id;
    DiscreteDistribution dist;
};

/// A nonempty multiset of boxes with unique ids.
class Instance {
public:
    explicit Instance(std::vector<Box> boxes);

    std::size_t size() const { return boxes_.size(); }
    const Box& box(std::size_t i) const { return boxes_.at(i); }
    const std::vector<Box>& boxes() const { return boxes_; }

    /// Position of the box with this id; throws if absent.
    std::size_t index_of(const std::string& id) const;

private:
    std::vector<Box> boxes_;
};

/// A permutation of box positions: stage t receives box `stage(t)`.
class ArrivalOrder {
public:
    ArrivalOrder() = default;
    explicit ArrivalOrder(std::vector<std::size_t> positions);

    static ArrivalOrder identity(std::size_t n);
    static ArrivalOrder from_ids(const Instance& instance, const std::vector<std::string>& ids);

    std::size_t size() const { return positions_.size(); }
    std::size_t stage(std::size_t t) const { return positions_[t]; }
    const std::vector<std::size_t>& positions() const { return positions_; }

    /// Throws std::invalid_argument unless this is a bijection onto the instance.
    void validate(const Instance& instance) const;

    std::string describe(const Instance& instance) const;

    friend bool operator==(const ArrivalOrder&, const ArrivalOrder&) = default;

private:
    std::vector<std::size_t> positions_;
};

/// Box distributions laid out in arrival order.
using StageSequence = std::vector<const DiscreteDistribution*>;

StageSequence arrange(const Instance& instance, const ArrivalOrder& order);

}  // namespace osel
