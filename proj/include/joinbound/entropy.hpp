#pragma once

#include <optional>
#include <string>
#include <vector>

#include "joinbound/rational.hpp"
#include "joinbound/relational.hpp"

namespace joinbound {

// A rational-probability distribution over rows with attribute set
// `attrs`. Support rows are distinct; probabilities are positive and
// sum to exactly 1.
struct Distribution {
    AttrSet attrs = 0;
    std::vector<int> cols; // == attr_ids(attrs)
    std::vector<std::vector<std::string>> support;
    std::vector<Rat> probs;

    void validate() const; // throws std::invalid_argument on violation

    // Least common denominator of all probabilities.
    BigInt common_denominator() const;
};

// Same shape with floating-point weights; input to rationalization.
struct RealDistribution {
    AttrSet attrs = 0;
    std::vector<int> cols;
    std::vector<std::vector<std::string>> support;
    std::vector<double> probs;
};

// Entropy coordinates over the subset lattice of `attrs`, in bits.
// coords[mask] is H(U[Y]) for the local subset mask.
struct EntropyVector {
    AttrSet attrs = 0;
    std::vector<int> cols;
    std::vector<double> coords; // size 2^|attrs|
};

Distribution marginal(const Distribution& d, AttrSet y);

double entropy_bits(const Distribution& d);

// All 2^|X| marginal entropies; the lattice may be computed in
// parallel (independent subsets), serial path is the reference.
EntropyVector entropy_vector(const Distribution& d, bool parallel = false);

// Checks submodularity / monotonicity / zero-at-∅ within tolerance.
bool entropy_vector_in_shannon_cone(const EntropyVector& v, double tol);

// Support-based and entropy-based answers, asserted to agree.
bool fd_holds_on_distribution(const Distribution& d, const FunctionalDependency& fd);

// H(U[free]) / max_{R joined} H(U[V(R)]); nullopt when the denominator
// is zero. Rejects distributions violating an instance fd (the
// violated fd is named in the exception).
std::optional<double> h_ratio(const Schema& schema,
                              const std::vector<FunctionalDependency>& fds, const Query& q,
                              const Distribution& d);

Distribution uniform_on_table(const Table& t);

// Probabilities rounded to multiples of 1/q by largest remainder,
// summing to 1 and positive wherever the input is positive.
Distribution rationalize_distribution(const RealDistribution& d, long q);

// Weight each row of the table by 1/(#projections) * 1/(multiplicity of
// its own projection); the marginal on `free` is exactly uniform.
Distribution two_stage_distribution(const Table& q_join_result, AttrSet free);

} // namespace joinbound
