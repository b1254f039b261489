#include "joinbound/entropy.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "joinbound/constants.hpp"
#include "joinbound/errors.hpp"

namespace joinbound {

void Distribution::validate() const {
    if (support.size() != probs.size())
        throw std::invalid_argument("support/probability length mismatch");
    if (support.empty())
        throw std::invalid_argument("empty distribution");
    Rat sum(0);
    for (const Rat& p : probs) {
        if (sgn(p) <= 0)
            throw std::invalid_argument("probabilities must be positive");
        sum += p;
    }
    if (sum != 1)
        throw std::invalid_argument("probabilities sum to " + rat_to_string(sum) + ", not 1");
    auto rows = support;
    std::sort(rows.begin(), rows.end());
    if (std::adjacent_find(rows.begin(), rows.end()) != rows.end())
        throw std::invalid_argument("duplicate support rows");
    for (const auto& r : rows)
        if (r.size() != cols.size())
            throw std::invalid_argument("support row arity mismatch");
}

BigInt Distribution::common_denominator() const {
    BigInt l(1);
    for (const Rat& p : probs) {
        BigInt den = p.get_den();
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), den.get_mpz_t());
    }
    return l;
}

Distribution marginal(const Distribution& d, AttrSet y) {
    if (!subset_of(y, d.attrs))
        throw std::invalid_argument("marginal outside the distribution's attributes");
    std::vector<int> keep;
    for (int i = 0; i < static_cast<int>(d.cols.size()); ++i)
        if (attr_in(y, d.cols[i]))
            keep.push_back(i);
    std::map<std::vector<std::string>, Rat> acc;
    for (std::size_t r = 0; r < d.support.size(); ++r) {
        std::vector<std::string> key;
        key.reserve(keep.size());
        for (int i : keep)
            key.push_back(d.support[r][i]);
        acc[std::move(key)] += d.probs[r];
    }
    Distribution out;
    out.attrs = y;
    out.cols = attr_ids(y);
    for (auto& [row, p] : acc) {
        out.support.push_back(row);
        out.probs.push_back(p);
    }
    return out;
}

double entropy_bits(const Distribution& d) {
    double h = 0;
    for (const Rat& p : d.probs) {
        double pd = rat_to_double(p);
        if (pd > 0)
            h -= pd * std::log2(pd);
    }
    return std::max(h, 0.0);
}

namespace {

// Entropy of the marginal on local subset `mask` without building the
// intermediate Distribution.
double marginal_entropy(const Distribution& d, AttrSet local_mask) {
    std::map<std::vector<std::string>, Rat> acc;
    std::vector<int> keep;
    for (int i = 0; i < static_cast<int>(d.cols.size()); ++i)
        if ((local_mask >> i) & 1u)
            keep.push_back(i);
    for (std::size_t r = 0; r < d.support.size(); ++r) {
        std::vector<std::string> key;
        key.reserve(keep.size());
        for (int i : keep)
            key.push_back(d.support[r][i]);
        acc[std::move(key)] += d.probs[r];
    }
    double h = 0;
    for (const auto& [row, p] : acc) {
        double pd = rat_to_double(p);
        if (pd > 0)
            h -= pd * std::log2(pd);
    }
    return std::max(h, 0.0);
}

} // namespace

EntropyVector entropy_vector(const Distribution& d, bool parallel) {
    int n = attr_count(d.attrs);
    if (n > kMaxLatticeAttrs)
        throw CapError("entropy vector over " + std::to_string(n) +
                       " attributes exceeds the lattice cap");
    EntropyVector v;
    v.attrs = d.attrs;
    v.cols = d.cols;
    v.coords.assign(std::size_t{1} << n, 0.0);
    const std::int64_t total = static_cast<std::int64_t>(v.coords.size());
    if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 4)
#endif
        for (std::int64_t mask = 1; mask < total; ++mask)
            v.coords[static_cast<std::size_t>(mask)] =
                marginal_entropy(d, static_cast<AttrSet>(mask));
    } else {
        for (std::int64_t mask = 1; mask < total; ++mask)
            v.coords[static_cast<std::size_t>(mask)] =
                marginal_entropy(d, static_cast<AttrSet>(mask));
    }
    v.coords[0] = 0.0;
    return v;
}

bool entropy_vector_in_shannon_cone(const EntropyVector& v, double tol) {
    int n = static_cast<int>(v.cols.size());
    const AttrSet full = (AttrSet{1} << n) - 1;
    if (std::abs(v.coords[0]) > tol)
        return false;
    for (AttrSet y = 0; y <= full; ++y) {
        for (int i = 0; i < n; ++i) {
            if ((y >> i) & 1u)
                continue;
            AttrSet yi = y | (AttrSet{1} << i);
            if (v.coords[y] > v.coords[yi] + tol)
                return false;
        }
        if (y == full)
            break;
    }
    // Submodularity over all subset pairs.
    for (AttrSet y = 0; y <= full; ++y) {
        for (AttrSet z = y;; z = (z + 1)) {
            if (z > full)
                break;
            if (v.coords[y | z] + v.coords[y & z] > v.coords[y] + v.coords[z] + tol)
                return false;
            if (z == full)
                break;
        }
        if (y == full)
            break;
    }
    return true;
}

bool fd_holds_on_distribution(const Distribution& d, const FunctionalDependency& fd) {
    if (!subset_of(fd.lhs | attr_bit(fd.rhs), d.attrs))
        throw std::invalid_argument("fd attributes outside the distribution");

    // (a) support-based: no two rows agree on lhs and differ on rhs.
    std::vector<int> lhs_pos;
    int rhs_pos = -1;
    for (int i = 0; i < static_cast<int>(d.cols.size()); ++i) {
        if (attr_in(fd.lhs, d.cols[i]))
            lhs_pos.push_back(i);
        if (d.cols[i] == fd.rhs)
            rhs_pos = i;
    }
    bool support_based = true;
    std::map<std::vector<std::string>, const std::string*> seen;
    for (const auto& row : d.support) {
        std::vector<std::string> key;
        for (int i : lhs_pos)
            key.push_back(row[i]);
        auto [it, inserted] = seen.emplace(std::move(key), &row[rhs_pos]);
        if (!inserted && *it->second != row[rhs_pos]) {
            support_based = false;
            break;
        }
    }

    // (b) entropy-based: H(lhs) == H(lhs ∪ {rhs}) within tolerance.
    double h_lhs = entropy_bits(marginal(d, fd.lhs));
    double h_both = entropy_bits(marginal(d, fd.lhs | attr_bit(fd.rhs)));
    bool entropy_based = std::abs(h_lhs - h_both) <= kEntropyTol;

    if (support_based != entropy_based)
        throw std::logic_error("fd check disagreement between support and entropy routes");
    return support_based;
}

std::optional<double> h_ratio(const Schema& schema,
                              const std::vector<FunctionalDependency>& fds, const Query& q,
                              const Distribution& d) {
    if (d.attrs != q.vars)
        throw std::invalid_argument("distribution attributes must equal the join variables");
    for (const auto& fd : fds) {
        if (!subset_of(fd.lhs | attr_bit(fd.rhs), d.attrs))
            continue;
        if (!fd_holds_on_distribution(d, fd))
            throw std::invalid_argument(
                "distribution violates the functional dependency " +
                schema.set_label(fd.lhs) + " -> " + schema.attr_name(fd.rhs));
    }
    double num = entropy_bits(marginal(d, q.free));
    double den = 0;
    for (int r : q.joins)
        den = std::max(den, entropy_bits(marginal(d, schema.relation_attrs(r))));
    if (den <= 0)
        return std::nullopt;
    return num / den;
}

Distribution uniform_on_table(const Table& t) {
    if (t.rows.empty())
        throw std::invalid_argument("uniform distribution over an empty table");
    Distribution d;
    d.attrs = t.attrs;
    d.cols = t.cols;
    d.support = t.rows;
    d.probs.assign(t.rows.size(), Rat(1, static_cast<unsigned long>(t.rows.size())));
    return d;
}

Distribution rationalize_distribution(const RealDistribution& d, long q) {
    const std::size_t n = d.support.size();
    if (n == 0)
        throw std::invalid_argument("empty distribution");
    if (q < static_cast<long>(n))
        throw std::invalid_argument("q = " + std::to_string(q) + " is too small for a support of " +
                                    std::to_string(n) + " rows");
    // Largest remainder, deterministic ties by support order.
    std::vector<long> counts(n, 0);
    std::vector<std::pair<double, std::size_t>> remainders;
    long assigned = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double target = d.probs[i] * static_cast<double>(q);
        long base = static_cast<long>(std::floor(target));
        counts[i] = base;
        assigned += base;
        remainders.push_back({target - static_cast<double>(base), i});
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    long left = q - assigned;
    for (std::size_t k = 0; left > 0 && k < remainders.size(); ++k, --left)
        ++counts[remainders[k].second];
    // Repair: every originally positive probability stays positive.
    for (std::size_t i = 0; i < n; ++i) {
        if (d.probs[i] > 0 && counts[i] == 0) {
            std::size_t donor = std::max_element(counts.begin(), counts.end()) - counts.begin();
            if (counts[donor] <= 1)
                throw std::invalid_argument("q too small to keep all probabilities positive");
            --counts[donor];
            ++counts[i];
        }
    }
    Distribution out;
    out.attrs = d.attrs;
    out.cols = d.cols;
    for (std::size_t i = 0; i < n; ++i) {
        if (counts[i] == 0)
            continue;
        out.support.push_back(d.support[i]);
        Rat p(counts[i], q);
        p.canonicalize();
        out.probs.push_back(p);
    }
    out.validate();
    return out;
}

Distribution two_stage_distribution(const Table& q_join_result, AttrSet free) {
    if (q_join_result.rows.empty())
        throw std::invalid_argument("two-stage distribution over an empty table");
    if (!subset_of(free, q_join_result.attrs))
        throw std::invalid_argument("free attributes outside the table");
    std::vector<int> keep;
    for (int i = 0; i < static_cast<int>(q_join_result.cols.size()); ++i)
        if (attr_in(free, q_join_result.cols[i]))
            keep.push_back(i);
    std::map<std::vector<std::string>, long> mult;
    for (const auto& row : q_join_result.rows) {
        std::vector<std::string> key;
        for (int i : keep)
            key.push_back(row[i]);
        ++mult[std::move(key)];
    }
    const unsigned long nproj = static_cast<unsigned long>(mult.size());
    Distribution out;
    out.attrs = q_join_result.attrs;
    out.cols = q_join_result.cols;
    for (const auto& row : q_join_result.rows) {
        std::vector<std::string> key;
        for (int i : keep)
            key.push_back(row[i]);
        Rat p(1, nproj);
        Rat m(1, static_cast<unsigned long>(mult[key]));
        m.canonicalize();
        p.canonicalize();
        out.support.push_back(row);
        out.probs.push_back(p * m);
    }
    out.validate();
    return out;
}

} // namespace joinbound
