#include "joinbound/gf.hpp"

#include <cassert>
#include <stdexcept>

namespace joinbound {

int gf_inverse(int a, int p) {
    // Extended Euclid; p prime, a != 0 mod p.
    int t = 0, new_t = 1, r = p, new_r = a % p;
    while (new_r != 0) {
        int q = r / new_r;
        int tmp = t - q * new_t;
        t = new_t;
        new_t = tmp;
        tmp = r - q * new_r;
        r = new_r;
        new_r = tmp;
    }
    assert(r == 1);
    return ((t % p) + p) % p;
}

void GfMatrix::add_row(std::vector<int> r) {
    if (static_cast<int>(r.size()) != cols_)
        throw std::invalid_argument("GF row width mismatch");
    for (int& x : r)
        x = ((x % p_) + p_) % p_;
    data_.push_back(std::move(r));
}

int GfMatrix::rref() {
    pivots_.clear();
    int rank = 0;
    for (int col = 0; col < cols_ && rank < rows(); ++col) {
        int sel = -1;
        for (int r = rank; r < rows(); ++r)
            if (data_[r][col] != 0) {
                sel = r;
                break;
            }
        if (sel < 0)
            continue;
        std::swap(data_[rank], data_[sel]);
        int inv = gf_inverse(data_[rank][col], p_);
        for (int c = col; c < cols_; ++c)
            data_[rank][c] = static_cast<int>(static_cast<long long>(data_[rank][c]) * inv % p_);
        for (int r = 0; r < rows(); ++r) {
            if (r == rank || data_[r][col] == 0)
                continue;
            int f = data_[r][col];
            for (int c = col; c < cols_; ++c) {
                long long v = data_[r][c] - static_cast<long long>(f) * data_[rank][c] % p_;
                data_[r][c] = static_cast<int>(((v % p_) + p_) % p_);
            }
        }
        pivots_.push_back(col);
        ++rank;
    }
    data_.resize(static_cast<std::size_t>(rank), std::vector<int>(cols_));
    return rank;
}

std::vector<int> GfMatrix::reduce(std::vector<int> v) const {
    for (int r = 0; r < rows(); ++r) {
        int pc = pivots_[r];
        int f = v[pc] % p_;
        if (f == 0)
            continue;
        for (int c = 0; c < cols_; ++c) {
            long long x = v[c] - static_cast<long long>(f) * data_[r][c] % p_;
            v[c] = static_cast<int>(((x % p_) + p_) % p_);
        }
    }
    return v;
}

bool GfMatrix::contains_vector(const std::vector<int>& v) const {
    std::vector<int> r = reduce(v);
    for (int x : r)
        if (x != 0)
            return false;
    return true;
}

bool GfMatrix::contains_subspace(const GfMatrix& other) const {
    for (int r = 0; r < other.rows(); ++r)
        if (!contains_vector(other.row(r)))
            return false;
    return true;
}

GfMatrix gf_sum(const GfMatrix& a, const GfMatrix& b) {
    assert(a.prime() == b.prime() && a.cols() == b.cols());
    GfMatrix s(a.prime(), a.cols());
    for (int r = 0; r < a.rows(); ++r)
        s.add_row(a.row(r));
    for (int r = 0; r < b.rows(); ++r)
        s.add_row(b.row(r));
    s.rref();
    return s;
}

GfMatrix gf_intersection(const GfMatrix& a, const GfMatrix& b) {
    assert(a.prime() == b.prime() && a.cols() == b.cols());
    const int n = a.cols();
    // Zassenhaus: rref of [A|A; B|0]; rows with a zero left block carry
    // intersection basis vectors in the right block.
    GfMatrix z(a.prime(), 2 * n);
    for (int r = 0; r < a.rows(); ++r) {
        std::vector<int> row(2 * n);
        for (int c = 0; c < n; ++c)
            row[c] = row[n + c] = a.row(r)[c];
        z.add_row(std::move(row));
    }
    for (int r = 0; r < b.rows(); ++r) {
        std::vector<int> row(2 * n, 0);
        for (int c = 0; c < n; ++c)
            row[c] = b.row(r)[c];
        z.add_row(std::move(row));
    }
    z.rref();
    GfMatrix out(a.prime(), n);
    for (int r = 0; r < z.rows(); ++r) {
        bool left_zero = true;
        for (int c = 0; c < n; ++c)
            if (z.row(r)[c] != 0) {
                left_zero = false;
                break;
            }
        if (left_zero) {
            std::vector<int> v(z.row(r).begin() + n, z.row(r).end());
            out.add_row(std::move(v));
        }
    }
    out.rref();
    return out;
}

GfMatrix gf_nullspace(const GfMatrix& a) {
    GfMatrix m = a;
    int rank = m.rref();
    const int n = m.cols();
    std::vector<int> pivots = m.pivot_cols();
    std::vector<bool> is_pivot(static_cast<std::size_t>(n), false);
    for (int c : pivots)
        is_pivot[c] = true;
    GfMatrix ns(a.prime(), n);
    for (int free = 0; free < n; ++free) {
        if (is_pivot[free])
            continue;
        std::vector<int> v(static_cast<std::size_t>(n), 0);
        v[free] = 1;
        for (int r = 0; r < rank; ++r) {
            // pivot var = -coefficient of the free var in row r
            int coef = m.row(r)[free];
            v[pivots[r]] = (a.prime() - coef) % a.prime();
        }
        ns.add_row(std::move(v));
    }
    ns.rref();
    return ns;
}

} // namespace joinbound
