#include "joinbound/fdtools.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace joinbound {

AttrSet fd_closure(AttrSet start, const std::vector<FunctionalDependency>& fds) {
    AttrSet s = start;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& fd : fds) {
            if (subset_of(fd.lhs, s) && !attr_in(s, fd.rhs)) {
                s |= attr_bit(fd.rhs);
                changed = true;
            }
        }
    }
    return s;
}

bool spans(AttrSet s, const std::vector<FunctionalDependency>& fds, AttrSet universe) {
    return (fd_closure(s, fds) & universe) == universe;
}

namespace {

// Enumerate subsets of `universe` of a given popcount, ascending mask order.
template <typename F>
bool for_each_subset_of_size(AttrSet universe, int k, F&& fn) {
    std::vector<int> ids = attr_ids(universe);
    int n = static_cast<int>(ids.size());
    if (k > n)
        return false;
    std::vector<int> pick(k);
    for (int i = 0; i < k; ++i)
        pick[i] = i;
    while (true) {
        AttrSet s = 0;
        for (int i : pick)
            s |= attr_bit(ids[i]);
        if (fn(s))
            return true;
        int i = k - 1;
        while (i >= 0 && pick[i] == n - k + i)
            --i;
        if (i < 0)
            return false;
        ++pick[i];
        for (int j = i + 1; j < k; ++j)
            pick[j] = pick[j - 1] + 1;
    }
}

} // namespace

AttrSet min_spanning_set(const std::vector<FunctionalDependency>& fds, AttrSet universe) {
    if (universe == 0)
        throw std::invalid_argument("width of an empty universe");
    AttrSet found = 0;
    for (int k = 0; k <= attr_count(universe); ++k) {
        if (for_each_subset_of_size(universe, k, [&](AttrSet s) {
                if (spans(s, fds, universe)) {
                    found = s;
                    return true;
                }
                return false;
            }))
            return found;
    }
    return universe; // unreachable: the full set always spans
}

int width(const std::vector<FunctionalDependency>& fds, AttrSet universe) {
    return attr_count(min_spanning_set(fds, universe));
}

namespace {

// Smallest component containing `seed`: absorb rhs of every fd whose
// (nonempty) lhs meets the set.
AttrSet component_close(AttrSet seed, const std::vector<FunctionalDependency>& fds,
                        AttrSet universe) {
    AttrSet c = seed;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& fd : fds) {
            AttrSet lhs = fd.lhs & universe;
            if (lhs != 0 && (lhs & c) != 0 && attr_in(universe, fd.rhs) && !attr_in(c, fd.rhs)) {
                c |= attr_bit(fd.rhs);
                changed = true;
            }
        }
    }
    return c;
}

} // namespace

std::vector<AttrSet> minimal_components(const std::vector<FunctionalDependency>& fds,
                                        AttrSet universe) {
    if (universe == 0)
        throw std::invalid_argument("components of an empty universe");
    std::vector<AttrSet> candidates;
    for (int a : attr_ids(universe))
        candidates.push_back(component_close(attr_bit(a), fds, universe));
    std::vector<AttrSet> minimal;
    for (AttrSet c : candidates) {
        bool is_min = std::none_of(candidates.begin(), candidates.end(),
                                   [&](AttrSet d) { return d != c && subset_of(d, c); });
        if (is_min && std::find(minimal.begin(), minimal.end(), c) == minimal.end())
            minimal.push_back(c);
    }
    std::sort(minimal.begin(), minimal.end());
    // Distinct minimal components are disjoint: a nonempty intersection
    // would itself satisfy the component condition.
    for (std::size_t i = 0; i < minimal.size(); ++i)
        for (std::size_t j = i + 1; j < minimal.size(); ++j)
            assert((minimal[i] & minimal[j]) == 0);
    return minimal;
}

std::vector<FunctionalDependency> fds_within(const std::vector<FunctionalDependency>& fds,
                                             AttrSet c) {
    std::vector<FunctionalDependency> out;
    for (const auto& fd : fds)
        if (subset_of(fd.lhs, c) && attr_in(c, fd.rhs))
            out.push_back(fd);
    return out;
}

std::vector<FunctionalDependency> remove_attrs(const std::vector<FunctionalDependency>& fds,
                                               AttrSet removed) {
    std::vector<FunctionalDependency> out;
    for (const auto& fd : fds) {
        if (attr_in(removed, fd.rhs))
            continue;
        out.push_back({fd.lhs & ~removed, fd.rhs});
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

ComponentDecomposition iterative_width(const std::vector<FunctionalDependency>& fds,
                                       AttrSet universe) {
    if (universe == 0)
        throw std::invalid_argument("iterative width of an empty universe");
    ComponentDecomposition out;
    AttrSet remaining = universe;
    std::vector<FunctionalDependency> cur = fds;
    while (remaining != 0) {
        ComponentDecomposition::Layer layer;
        layer.residual_fds = cur;
        layer.components = minimal_components(cur, remaining);
        AttrSet removed = 0;
        for (AttrSet c : layer.components) {
            out.width = std::max(out.width, width(fds_within(cur, c), c));
            removed |= c;
        }
        out.layers.push_back(std::move(layer));
        remaining &= ~removed;
        cur = remove_attrs(cur, removed);
    }
    return out;
}

} // namespace joinbound
