#include "osel/instance.hpp"

#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace osel {

Instance::Instance(std::vector<Box> boxes) : boxes_(std::move(boxes)) {
    if (boxes_.empty()) throw std::invalid_argument("instance has no boxes");
    std::unordered_set<std::string> seen;
    for (const Box& b : boxes_) {
        if (!seen.insert(b.id).second) {
            throw std::invalid_argument("duplicate box id '" + b.id + "'");
        }
    }
}

std::size_t Instance::index_of(const std::string& id) const {
    for (std::size_t i = 0; i < boxes_.size(); ++i) {
        if (boxes_[i].id == id) return i;
    }
    throw std::invalid_argument("unknown box id '" + id + "'");
}

ArrivalOrder::ArrivalOrder(std::vector<std::size_t> positions) : positions_(std::move(positions)) {}

ArrivalOrder ArrivalOrder::identity(std::size_t n) {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), std::size_t{0});
    return ArrivalOrder(std::move(p));
}

ArrivalOrder ArrivalOrder::from_ids(const Instance& instance, const std::vector<std::string>& ids) {
    std::vector<std::size_t> p;
    p.reserve(ids.size());
    for (const auto& id : ids) p.push_back(instance.index_of(id));
    ArrivalOrder order(std::move(p));
    order.validate(instance);
    return order;
}

void ArrivalOrder::validate(const Instance& instance) const {
    if (positions_.size() != instance.size()) {
        throw std::invalid_argument("order length " + std::to_string(positions_.size()) +
                                    " does not match instance size " +
                                    std::to_string(instance.size()));
    }
    std::vector<bool> used(instance.size(), false);
    for (std::size_t p : positions_) {
        if (p >= instance.size() || used[p]) {
            throw std::invalid_argument("order is not a permutation of the instance boxes");
        }
        used[p] = true;
    }
}

std::string ArrivalOrder::describe(const Instance& instance) const {
    std::string out;
    for (std::size_t t = 0; t < positions_.size(); ++t) {
        if (t) out += ' ';
        out += instance.box(positions_[t]).id;
    }
    return out;
}

StageSequence arrange(const Instance& instance, const ArrivalOrder& order) {
    order.validate(instance);
    StageSequence seq;
    seq.reserve(order.size());
    for (std::size_t p : order.positions()) seq.push_back(&instance.box(p).dist);
    return seq;
}

}  // namespace osel
