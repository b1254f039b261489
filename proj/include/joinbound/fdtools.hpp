#pragma once

#include <vector>

#include "joinbound/relational.hpp"

namespace joinbound {

// Smallest superset of `start` closed under the fds (lhs ⊆ S ⟹ rhs ∈ S).
AttrSet fd_closure(AttrSet start, const std::vector<FunctionalDependency>& fds);

bool spans(AttrSet s, const std::vector<FunctionalDependency>& fds, AttrSet universe);

// Size of the smallest spanning set; exhaustive subset search in
// increasing cardinality. Also exposed with the witness set.
int width(const std::vector<FunctionalDependency>& fds, AttrSet universe);
AttrSet min_spanning_set(const std::vector<FunctionalDependency>& fds, AttrSet universe);

// All inclusion-minimal nonempty C ⊆ universe with: every fd Y↦x with
// Y ∩ C ≠ ∅ has x ∈ C. An fd with empty lhs never triggers the
// condition. Distinct minimal components are disjoint (asserted).
std::vector<AttrSet> minimal_components(const std::vector<FunctionalDependency>& fds,
                                        AttrSet universe);

// Fds over C only: lhs ⊆ C and rhs ∈ C.
std::vector<FunctionalDependency> fds_within(const std::vector<FunctionalDependency>& fds,
                                             AttrSet c);

// Deletes `removed` attributes: drops fds whose rhs is removed, erases
// removed attributes from lhs sets, and dedupes.
std::vector<FunctionalDependency> remove_attrs(const std::vector<FunctionalDependency>& fds,
                                               AttrSet removed);

struct ComponentDecomposition {
    struct Layer {
        std::vector<AttrSet> components;                // minimal components of this layer
        std::vector<FunctionalDependency> residual_fds; // fds in force at this layer
    };
    std::vector<Layer> layers;
    int width = 0;
};

// Layered width per the iterative definition: the max, over layers and
// their components C, of width(F[C], C); each layer's component
// attributes are then removed from the universe and the fds.
ComponentDecomposition iterative_width(const std::vector<FunctionalDependency>& fds,
                                       AttrSet universe);

} // namespace joinbound
