#include "joinbound/synth.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <set>
#include <stdexcept>

#include "joinbound/constants.hpp"
#include "joinbound/errors.hpp"

namespace joinbound {

namespace {

void require_query_covers_schema(const Schema& schema, const Query& q) {
    for (int r = 0; r < schema.relation_count(); ++r)
        if (!subset_of(schema.relation_attrs(r), q.vars))
            throw ConstructionError("relation '" + schema.relation_name(r) +
                                    "' has attributes outside the query; constructions are "
                                    "defined over the joined attributes");
}

void check_value_token(const std::string& v) {
    if (v.find(kValueSeparator) != std::string::npos ||
        v.find(kPlaceholderOpen) != std::string::npos ||
        v.find(kPlaceholderClose) != std::string::npos)
        throw ConstructionError("construction value '" + v + "' contains a reserved character");
}

std::string fd_label(const Schema& schema, const FunctionalDependency& fd) {
    return schema.set_label(fd.lhs) + " -> " + schema.attr_name(fd.rhs);
}

// Support-based fd check over plain rows.
bool rows_satisfy_fd(const std::vector<std::vector<std::string>>& rows,
                     const std::vector<int>& cols, const FunctionalDependency& fd) {
    std::vector<int> lhs_pos;
    int rhs_pos = -1;
    for (int i = 0; i < static_cast<int>(cols.size()); ++i) {
        if (attr_in(fd.lhs, cols[i]))
            lhs_pos.push_back(i);
        if (cols[i] == fd.rhs)
            rhs_pos = i;
    }
    if (rhs_pos < 0)
        return true;
    std::map<std::vector<std::string>, const std::string*> seen;
    for (const auto& row : rows) {
        std::vector<std::string> key;
        for (int i : lhs_pos)
            key.push_back(row[i]);
        auto [it, inserted] = seen.emplace(std::move(key), &row[rhs_pos]);
        if (!inserted && *it->second != row[rhs_pos])
            return false;
    }
    return true;
}

BigInt pow_bigint(long base, unsigned long exp) {
    BigInt b(base), out;
    mpz_pow_ui(out.get_mpz_t(), b.get_mpz_t(), exp);
    return out;
}

void guard_rows(const BigInt& n, std::int64_t row_limit, const std::string& what) {
    if (n > BigInt(row_limit))
        throw CapError(what + " would need " + n.get_str() + " rows; the limit is " +
                       std::to_string(row_limit) + " (use count-only mode)");
}

} // namespace

// ---------------------------------------------------------------------------
// Coloring
// ---------------------------------------------------------------------------

std::vector<std::string> Coloring::colors_of(AttrSet y) const {
    std::set<std::string> out;
    for (const auto& [attr, cs] : assign)
        if (attr_in(y, attr))
            out.insert(cs.begin(), cs.end());
    return {out.begin(), out.end()};
}

bool coloring_satisfies(const Coloring& f, const FunctionalDependency& fd) {
    std::vector<std::string> lhs = f.colors_of(fd.lhs);
    std::set<std::string> lhs_set(lhs.begin(), lhs.end());
    auto it = f.assign.find(fd.rhs);
    if (it == f.assign.end())
        return true;
    return std::all_of(it->second.begin(), it->second.end(),
                       [&](const std::string& c) { return lhs_set.count(c) > 0; });
}

SynthPrediction predict_coloring(const Schema& schema, const Query& q, const Coloring& f,
                                 std::size_t value_count) {
    SynthPrediction pred;
    std::size_t total = f.colors_of(q.vars).size();
    std::size_t max_rel = 0;
    for (int r = 0; r < schema.relation_count(); ++r) {
        std::size_t k = f.colors_of(schema.relation_attrs(r)).size();
        pred.table_sizes.emplace_back(r, pow_bigint(static_cast<long>(value_count), k));
        max_rel = std::max(max_rel, k);
    }
    pred.join_size = pow_bigint(static_cast<long>(value_count), total);
    pred.predicted_alpha =
        max_rel == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(max_rel);
    return pred;
}

Database coloring_database(const Schema& schema, const Query& q, const Coloring& f,
                           const std::vector<FunctionalDependency>& fds,
                           const std::vector<std::string>& values, std::int64_t row_limit) {
    require_query_covers_schema(schema, q);
    if (values.size() < 2)
        throw ConstructionError("coloring construction needs at least 2 values");
    for (const auto& v : values)
        check_value_token(v);
    if (std::set<std::string>(values.begin(), values.end()).size() != values.size())
        throw ConstructionError("coloring construction values must be distinct");
    for (const auto& [attr, cs] : f.assign) {
        if (!attr_in(q.vars, attr))
            throw ConstructionError("coloring assigns colors to an attribute outside the query");
        for (const auto& c : cs)
            check_value_token(c);
    }
    for (const auto& fd : fds) {
        if (!subset_of(fd.lhs | attr_bit(fd.rhs), q.vars))
            continue;
        if (!coloring_satisfies(f, fd))
            throw ConstructionError("coloring violates the functional dependency " +
                                    fd_label(schema, fd));
    }

    const std::vector<std::string> all_colors = f.colors_of(q.vars);
    const std::size_t c = all_colors.size();
    guard_rows(pow_bigint(static_cast<long>(values.size()), c), row_limit,
               "coloring construction");
    std::map<std::string, std::size_t> color_pos;
    for (std::size_t i = 0; i < c; ++i)
        color_pos[all_colors[i]] = i;

    // Lexicographic color order within each attribute's encoding.
    std::map<int, std::vector<std::string>> sorted_assign;
    for (const auto& [attr, cs] : f.assign) {
        std::vector<std::string> s(cs);
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        sorted_assign.emplace(attr, std::move(s));
    }

    Database db = empty_database(schema);
    // One pass over T = values^C; every relation row is read off the
    // same tuple so shared colors stay consistent.
    std::vector<std::size_t> odo(c, 0);
    while (true) {
        for (int r = 0; r < schema.relation_count(); ++r) {
            Table& t = db.tables[r];
            std::vector<std::string> row(t.cols.size());
            for (std::size_t i = 0; i < t.cols.size(); ++i) {
                std::string v;
                auto it = sorted_assign.find(t.cols[i]);
                if (it != sorted_assign.end()) {
                    bool first = true;
                    for (const std::string& color : it->second) {
                        if (!first)
                            v += kValueSeparator;
                        first = false;
                        v += values[odo[color_pos[color]]];
                    }
                }
                row[i] = std::move(v);
            }
            t.rows.push_back(std::move(row));
        }
        if (c == 0)
            break;
        std::size_t j = c;
        while (j > 0 && ++odo[j - 1] == values.size()) {
            odo[j - 1] = 0;
            --j;
        }
        if (j == 0)
            break;
    }
    for (auto& t : db.tables)
        t.normalize();
    return db;
}

// ---------------------------------------------------------------------------
// Product (AGM proof construction)
// ---------------------------------------------------------------------------

SynthPrediction predict_product(const Schema& schema, const Query& q,
                                const std::map<int, Rat>& packing, long n_value) {
    // Common denominator d of the packing; |V_x| = N^{p_x} must be
    // integral, i.e. N must be a perfect d-th power.
    BigInt d(1);
    for (const auto& [attr, p] : packing) {
        BigInt den = p.get_den();
        mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), den.get_mpz_t());
    }
    unsigned long du = mpz_get_ui(d.get_mpz_t());
    BigInt root, n_big(n_value);
    int exactness = mpz_root(root.get_mpz_t(), n_big.get_mpz_t(), du);
    if (exactness == 0)
        throw ConstructionError("N = " + std::to_string(n_value) + " is not a perfect " +
                                std::to_string(du) + "-th power, so N^{p_x} is not integral");

    auto value_set_size = [&](int attr) {
        auto it = packing.find(attr);
        Rat p = it == packing.end() ? Rat(0) : it->second;
        Rat scaled = p * Rat(static_cast<long>(du));
        assert(scaled.get_den() == 1);
        unsigned long e = mpz_get_ui(scaled.get_num().get_mpz_t());
        BigInt m;
        mpz_pow_ui(m.get_mpz_t(), root.get_mpz_t(), e);
        return m;
    };

    SynthPrediction pred;
    BigInt max_rel(0);
    for (int r = 0; r < schema.relation_count(); ++r) {
        BigInt size(1);
        for (int a : attr_ids(schema.relation_attrs(r)))
            size *= value_set_size(a);
        pred.table_sizes.emplace_back(r, size);
        max_rel = std::max(max_rel, size);
    }
    pred.join_size = 1;
    for (int a : attr_ids(q.vars))
        pred.join_size *= value_set_size(a);
    pred.predicted_alpha = max_rel > 1 ? log2_bigint(pred.join_size) / log2_bigint(max_rel) : 0.0;
    return pred;
}

Database product_database(const Schema& schema, const Query& q,
                          const std::map<int, Rat>& packing, long n_value,
                          std::int64_t row_limit) {
    require_query_covers_schema(schema, q);
    if (n_value < 2)
        throw ConstructionError("product construction needs N >= 2");
    for (const auto& [attr, p] : packing) {
        if (!attr_in(q.vars, attr))
            throw ConstructionError("packing weight for an attribute outside the query");
        if (sgn(p) < 0)
            throw ConstructionError("packing weights must be nonnegative");
    }
    for (int r : q.joins) {
        Rat total(0);
        for (int a : attr_ids(schema.relation_attrs(r)))
            if (auto it = packing.find(a); it != packing.end())
                total += it->second;
        if (total > 1)
            throw ConstructionError("infeasible vertex packing: relation '" +
                                    schema.relation_name(r) + "' has weight " +
                                    rat_to_string(total));
    }

    SynthPrediction pred = predict_product(schema, q, packing, n_value);
    for (const auto& [r, size] : pred.table_sizes)
        guard_rows(size, row_limit, "product construction");

    // Value sets V_x = {"0", ..., m-1}.
    std::map<int, long> set_size;
    for (int a : attr_ids(q.vars))
        set_size[a] = 1;
    {
        BigInt d(1);
        for (const auto& [attr, p] : packing) {
            BigInt den = p.get_den();
            mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), den.get_mpz_t());
        }
        unsigned long du = mpz_get_ui(d.get_mpz_t());
        BigInt root, n_big(n_value);
        mpz_root(root.get_mpz_t(), n_big.get_mpz_t(), du);
        for (const auto& [attr, p] : packing) {
            Rat scaled = p * Rat(static_cast<long>(du));
            BigInt m;
            mpz_pow_ui(m.get_mpz_t(), root.get_mpz_t(),
                       mpz_get_ui(scaled.get_num().get_mpz_t()));
            set_size[attr] = mpz_get_si(m.get_mpz_t());
        }
    }

    Database db = empty_database(schema);
    for (int r = 0; r < schema.relation_count(); ++r) {
        Table& t = db.tables[r];
        std::vector<long> sizes;
        for (int a : t.cols)
            sizes.push_back(set_size[a]);
        std::vector<long> odo(t.cols.size(), 0);
        while (true) {
            std::vector<std::string> row(t.cols.size());
            for (std::size_t i = 0; i < t.cols.size(); ++i)
                row[i] = std::to_string(odo[i]);
            t.rows.push_back(std::move(row));
            std::size_t j = odo.size();
            while (j > 0 && ++odo[j - 1] == sizes[j - 1]) {
                odo[j - 1] = 0;
                --j;
            }
            if (j == 0)
                break;
        }
        t.normalize();
    }
    return db;
}

// ---------------------------------------------------------------------------
// Vector space systems
// ---------------------------------------------------------------------------

namespace {

const GfMatrix& subspace_of(const std::map<int, GfMatrix>& m, int attr, int prime, int dim) {
    static thread_local std::map<std::pair<int, int>, GfMatrix> zero_cache;
    auto it = m.find(attr);
    if (it != m.end())
        return it->second;
    auto [zit, ignored] = zero_cache.try_emplace({prime, dim}, GfMatrix(prime, dim));
    return zit->second;
}

} // namespace

GfMatrix VectorSpaceColoring::span_of(AttrSet y) const {
    GfMatrix acc(prime, dim);
    for (int a : attr_ids(y))
        acc = gf_sum(acc, subspace_of(subspaces, a, prime, dim));
    acc.rref();
    return acc;
}

bool VectorSpaceColoring::satisfies(const FunctionalDependency& fd) const {
    GfMatrix lhs = span_of(fd.lhs);
    return lhs.contains_subspace(subspace_of(subspaces, fd.rhs, prime, dim));
}

GfMatrix VectorSpaceSystem::intersection_of(AttrSet y) const {
    // Intersection over the empty family is the full space.
    GfMatrix acc(prime, dim);
    for (int i = 0; i < dim; ++i) {
        std::vector<int> e(dim, 0);
        e[i] = 1;
        acc.add_row(std::move(e));
    }
    acc.rref();
    for (int a : attr_ids(y))
        acc = gf_intersection(acc, subspace_of(subspaces, a, prime, dim));
    return acc;
}

bool VectorSpaceSystem::satisfies(const FunctionalDependency& fd) const {
    GfMatrix lhs = intersection_of(fd.lhs);
    return subspace_of(subspaces, fd.rhs, prime, dim).contains_subspace(lhs);
}

VectorSpaceSystem dualize_coloring(const VectorSpaceColoring& vc) {
    VectorSpaceSystem sys;
    sys.prime = vc.prime;
    sys.dim = vc.dim;
    for (const auto& [attr, basis] : vc.subspaces)
        sys.subspaces.emplace(attr, gf_nullspace(basis));
    return sys;
}

namespace {

bool is_small_prime(int p) {
    if (p < 2)
        return false;
    for (int d = 2; d * d <= p; ++d)
        if (p % d == 0)
            return false;
    return true;
}

void validate_system(const VectorSpaceSystem& sys) {
    if (!is_small_prime(sys.prime) || sys.prime > kMaxGfPrime)
        throw ConstructionError("GF(p) prime must be a prime <= " + std::to_string(kMaxGfPrime));
    if (sys.dim < 1 || sys.dim > kMaxGfDim)
        throw ConstructionError("GF(p) dimension must be between 1 and " +
                                std::to_string(kMaxGfDim));
    for (const auto& [attr, basis] : sys.subspaces)
        if (basis.cols() != sys.dim || basis.prime() != sys.prime)
            throw ConstructionError("subspace basis dimension mismatch");
}

} // namespace

SynthPrediction predict_vspace(const Schema& schema, const Query& q,
                               const VectorSpaceSystem& sys) {
    SynthPrediction pred;
    int max_codim = 0;
    for (int r = 0; r < schema.relation_count(); ++r) {
        GfMatrix inter = sys.intersection_of(schema.relation_attrs(r));
        int codim = sys.dim - inter.rows();
        pred.table_sizes.emplace_back(r, pow_bigint(sys.prime, static_cast<unsigned long>(codim)));
        max_codim = std::max(max_codim, codim);
    }
    GfMatrix full = sys.intersection_of(q.vars);
    int codim_q = sys.dim - full.rows();
    pred.join_size = pow_bigint(sys.prime, static_cast<unsigned long>(codim_q));
    pred.predicted_alpha =
        max_codim == 0 ? 0.0 : static_cast<double>(codim_q) / static_cast<double>(max_codim);
    return pred;
}

Database vs_system_database(const Schema& schema, const Query& q, const VectorSpaceSystem& sys,
                            const std::vector<FunctionalDependency>& fds,
                            std::int64_t row_limit) {
    require_query_covers_schema(schema, q);
    validate_system(sys);
    for (const auto& fd : fds) {
        if (!subset_of(fd.lhs | attr_bit(fd.rhs), q.vars))
            continue;
        if (!sys.satisfies(fd))
            throw ConstructionError("vector space system violates the functional dependency " +
                                    fd_label(schema, fd));
    }
    guard_rows(pow_bigint(sys.prime, static_cast<unsigned long>(sys.dim)), row_limit,
               "vector space construction");

    // RREF bases (with pivots) for coset label reduction.
    std::map<int, GfMatrix> reduced;
    for (int a : attr_ids(q.vars)) {
        GfMatrix m = subspace_of(sys.subspaces, a, sys.prime, sys.dim);
        m.rref();
        reduced.emplace(a, std::move(m));
    }

    auto label = [&](const std::vector<int>& rep) {
        std::string s;
        for (std::size_t i = 0; i < rep.size(); ++i) {
            if (i > 0)
                s += ',';
            s += std::to_string(rep[i]);
        }
        return s;
    };

    Database db = empty_database(schema);
    std::vector<int> v(static_cast<std::size_t>(sys.dim), 0);
    while (true) {
        for (int r = 0; r < schema.relation_count(); ++r) {
            Table& t = db.tables[r];
            std::vector<std::string> row(t.cols.size());
            for (std::size_t i = 0; i < t.cols.size(); ++i)
                row[i] = label(reduced.at(t.cols[i]).reduce(v));
            t.rows.push_back(std::move(row));
        }
        int j = sys.dim;
        while (j > 0 && ++v[j - 1] == sys.prime) {
            v[j - 1] = 0;
            --j;
        }
        if (j == 0)
            break;
    }
    for (auto& t : db.tables)
        t.normalize();
    return db;
}

// ---------------------------------------------------------------------------
// Permutation groups (the A_k construction)
// ---------------------------------------------------------------------------

void GroupConstructionSpec::validate() const {
    base.validate();
    if (k <= 0)
        throw ConstructionError("permutation construction needs k >= 1");
    for (const Rat& p : base.probs) {
        Rat scaled = p * Rat(k);
        if (scaled.get_den() != 1)
            throw ConstructionError("k = " + std::to_string(k) +
                                    " is not a multiple of the base distribution's denominator");
    }
}

namespace {

// Distinct rows of A_k[Y] with multiplicities k·p_r (merging support
// rows equal on Y).
std::vector<std::pair<std::vector<std::string>, long>>
merged_rows(const GroupConstructionSpec& spec, const std::vector<int>& positions) {
    std::map<std::vector<std::string>, long> acc;
    for (std::size_t i = 0; i < spec.base.support.size(); ++i) {
        std::vector<std::string> key;
        for (int p : positions)
            key.push_back(spec.base.support[i][p]);
        Rat scaled = spec.base.probs[i] * Rat(spec.k);
        acc[std::move(key)] += mpz_get_si(scaled.get_num().get_mpz_t());
    }
    return {acc.begin(), acc.end()};
}

std::vector<int> positions_of(const Distribution& base, AttrSet y) {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(base.cols.size()); ++i)
        if (attr_in(y, base.cols[i]))
            out.push_back(i);
    return out;
}

} // namespace

BigInt stabilizer_order(const GroupConstructionSpec& spec, AttrSet y) {
    BigInt order(1);
    for (const auto& [row, m] : merged_rows(spec, positions_of(spec.base, y)))
        order *= factorial(m);
    return order;
}

BigInt coset_count(const GroupConstructionSpec& spec, AttrSet y) {
    BigInt f = factorial(spec.k);
    BigInt s = stabilizer_order(spec, y);
    assert(mpz_divisible_p(f.get_mpz_t(), s.get_mpz_t()));
    return f / s;
}

double normalized_log_coset_count(const GroupConstructionSpec& spec, AttrSet y) {
    return log2_bigint(coset_count(spec, y)) / static_cast<double>(spec.k);
}

SynthPrediction predict_permutation(const Schema& schema, const Query& q,
                                    const GroupConstructionSpec& spec) {
    SynthPrediction pred;
    double max_log = 0;
    for (int r = 0; r < schema.relation_count(); ++r) {
        BigInt n = coset_count(spec, schema.relation_attrs(r));
        max_log = std::max(max_log, log2_bigint(n));
        pred.table_sizes.emplace_back(r, std::move(n));
    }
    pred.join_size = coset_count(spec, q.vars);
    pred.predicted_alpha = max_log > 0 ? log2_bigint(pred.join_size) / max_log : 0.0;
    return pred;
}

Database permutation_database(const Schema& schema, const Query& q,
                              const GroupConstructionSpec& spec,
                              const std::vector<FunctionalDependency>& fds,
                              std::int64_t row_limit) {
    require_query_covers_schema(schema, q);
    spec.validate();
    if (spec.base.attrs != q.vars)
        throw ConstructionError("permutation base must range over the joined attributes");
    for (const auto& fd : fds) {
        if (!subset_of(fd.lhs | attr_bit(fd.rhs), q.vars))
            continue;
        if (!rows_satisfy_fd(spec.base.support, spec.base.cols, fd))
            throw ConstructionError("permutation base violates the functional dependency " +
                                    fd_label(schema, fd));
    }
    for (const auto& row : spec.base.support)
        for (const auto& v : row)
            check_value_token(v);
    guard_rows(coset_count(spec, q.vars), row_limit, "permutation construction");

    Database db = empty_database(schema);
    for (int r = 0; r < schema.relation_count(); ++r) {
        Table& t = db.tables[r];
        auto merged = merged_rows(spec, positions_of(spec.base, t.attrs));
        // Multiset permutations of the k content rows, via the sorted
        // id sequence; never enumerates k! permutations.
        std::vector<int> seq;
        for (std::size_t id = 0; id < merged.size(); ++id)
            seq.insert(seq.end(), static_cast<std::size_t>(merged[id].second), static_cast<int>(id));
        do {
            std::vector<std::string> row(t.cols.size());
            for (std::size_t c = 0; c < t.cols.size(); ++c) {
                std::string v;
                for (long i = 0; i < spec.k; ++i) {
                    if (i > 0)
                        v += kValueSeparator;
                    v += merged[static_cast<std::size_t>(seq[static_cast<std::size_t>(i)])]
                             .first[c];
                }
                row[c] = std::move(v);
            }
            t.rows.push_back(std::move(row));
        } while (std::next_permutation(seq.begin(), seq.end()));
        t.normalize();
    }
    return db;
}

} // namespace joinbound
