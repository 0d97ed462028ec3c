// Copyright 2026 The residue-telescope authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rt/linsolve.hpp"

#include <algorithm>

namespace rt {

namespace {

bool simpler(const Poly& a, const Poly& b) {
    if (a.total_degree() != b.total_degree()) return a.total_degree() < b.total_degree();
    return a.size() < b.size();
}

}  // namespace

PolyRref rref_fraction_free(PolyMatrix m, std::size_t pivot_limit) {
    PolyRref out;
    std::size_t nrows = m.size();
    if (nrows == 0) return out;
    std::size_t ncols = m[0].size();
    pivot_limit = std::min(pivot_limit, ncols);
    Poly prev = 1;
    std::size_t r = 0;
    for (std::size_t c = 0; c < pivot_limit && r < nrows; ++c) {
        std::size_t best = nrows;
        for (std::size_t i = r; i < nrows; ++i)
            if (!m[i][c].is_zero() && (best == nrows || simpler(m[i][c], m[best][c]))) best = i;
        if (best == nrows) continue;
        std::swap(m[r], m[best]);
        const Poly piv = m[r][c];
        for (std::size_t i = 0; i < nrows; ++i) {
            if (i == r) continue;
            const Poly f = m[i][c];
            for (std::size_t j = 0; j < ncols; ++j) {
                if (j == c) continue;
                Poly t = piv * m[i][j];
                if (!f.is_zero() && !m[r][j].is_zero()) t -= f * m[r][j];
                m[i][j] = prev.is_one() ? std::move(t) : exact_div(t, prev);
            }
            m[i][c] = Poly();
        }
        prev = piv;
        out.pivot_cols.push_back(c);
        ++r;
    }
    out.d = prev;
    out.rows = std::move(m);
    return out;
}

PolyRref rref_fraction_free(PolyMatrix m) {
    std::size_t n = m.empty() ? 0 : m[0].size();
    return rref_fraction_free(std::move(m), n);
}

PolyVector normalize_vector(PolyVector v) {
    Poly g;
    for (const auto& x : v)
        if (!x.is_zero()) g = g.is_zero() ? x.primitive() : gcd(g, x);
    if (g.is_zero()) return v;
    bool neg = false;
    for (const auto& x : v)
        if (!x.is_zero()) {
            neg = x.leading_coeff() < 0;
            break;
        }
    for (auto& x : v) {
        if (x.is_zero()) continue;
        x = exact_div(x, g);
        if (neg) x = -x;
    }
    return v;
}

std::vector<PolyVector> nullspace(const PolyMatrix& m, std::size_t ncols) {
    PolyRref rr = rref_fraction_free(m, ncols);
    std::vector<bool> is_pivot(ncols, false);
    for (auto c : rr.pivot_cols) is_pivot[c] = true;
    std::vector<PolyVector> basis;
    for (std::size_t f = 0; f < ncols; ++f) {
        if (is_pivot[f]) continue;
        PolyVector v(ncols);
        v[f] = rr.d;
        for (std::size_t i = 0; i < rr.rank(); ++i) v[rr.pivot_cols[i]] = -rr.rows[i][f];
        basis.push_back(normalize_vector(std::move(v)));
    }
    return basis;
}

LinearSolution solve_linear(const RatMatrix& a, const RatVector& b) {
    if (a.size() != b.size()) throw AlgebraError("solve_linear: row count mismatch");
    std::size_t ncols = a.empty() ? 0 : a[0].size();
    PolyMatrix m;
    m.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].size() != ncols) throw AlgebraError("solve_linear: ragged matrix");
        Poly l = 1;
        auto fold = [&](const RatFunc& x) {
            if (x.den().is_one()) return;
            Poly g = gcd(l, x.den());
            l = exact_div(l, g) * x.den();
        };
        for (const auto& x : a[i]) fold(x);
        fold(b[i]);
        PolyVector row;
        row.reserve(ncols + 1);
        for (const auto& x : a[i]) row.push_back(exact_div(x.num() * l, x.den()));
        row.push_back(exact_div(b[i].num() * l, b[i].den()));
        m.push_back(std::move(row));
    }
    PolyRref rr = rref_fraction_free(m, ncols);
    LinearSolution sol;
    std::vector<bool> is_pivot(ncols, false);
    for (auto c : rr.pivot_cols) is_pivot[c] = true;
    for (std::size_t f = 0; f < ncols; ++f) {
        if (is_pivot[f]) continue;
        RatVector v(ncols);
        v[f] = RatFunc(1);
        for (std::size_t i = 0; i < rr.rank(); ++i)
            v[rr.pivot_cols[i]] = RatFunc(-rr.rows[i][f], rr.d);
        sol.nullspace.push_back(std::move(v));
    }
    bool consistent = true;
    for (std::size_t i = rr.rank(); i < rr.rows.size(); ++i)
        if (!rr.rows[i][ncols].is_zero()) consistent = false;
    if (consistent) {
        RatVector x(ncols);
        for (std::size_t i = 0; i < rr.rank(); ++i) x[rr.pivot_cols[i]] = RatFunc(rr.rows[i][ncols], rr.d);
        sol.particular = std::move(x);
    }
    return sol;
}

}  // namespace rt
