#pragma once

#include <vector>

namespace joinbound {

// Dense matrices over GF(p), p a single-word prime. Rows of a matrix
// are basis vectors of a subspace; the empty matrix (0 rows) is the
// zero subspace.
class GfMatrix {
public:
    GfMatrix(int p, int cols) : p_(p), cols_(cols) {}

    int prime() const { return p_; }
    int cols() const { return cols_; }
    int rows() const { return static_cast<int>(data_.size()); }

    const std::vector<int>& row(int i) const { return data_[i]; }
    void add_row(std::vector<int> r);

    // Reduced row echelon form; zero rows dropped. Returns the rank.
    int rref();
    std::vector<int> pivot_cols() const { return pivots_; }

    // Reduce a vector modulo the row space (rows must be in rref):
    // the canonical coset representative.
    std::vector<int> reduce(std::vector<int> v) const;

    bool contains_vector(const std::vector<int>& v) const;
    bool contains_subspace(const GfMatrix& other) const;

private:
    int p_;
    int cols_;
    std::vector<std::vector<int>> data_;
    std::vector<int> pivots_;
};

int gf_inverse(int a, int p);

// Row-space sum (stack + rref).
GfMatrix gf_sum(const GfMatrix& a, const GfMatrix& b);

// Row-space intersection (Zassenhaus).
GfMatrix gf_intersection(const GfMatrix& a, const GfMatrix& b);

// Basis of {w : A·w = 0} — the annihilator of the row space under the
// standard dot product.
GfMatrix gf_nullspace(const GfMatrix& a);

} // namespace joinbound
