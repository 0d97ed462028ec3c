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

#ifndef RT_LINSOLVE_HPP
#define RT_LINSOLVE_HPP

#include <optional>
#include <vector>

#include "rt/ratfunc.hpp"

namespace rt {

using PolyMatrix = std::vector<std::vector<Poly>>;
using RatMatrix = std::vector<std::vector<RatFunc>>;
using PolyVector = std::vector<Poly>;
using RatVector = std::vector<RatFunc>;

/// Reduced echelon form computed fraction-free: every pivot equals `d` and
/// all other entries in pivot columns are zero.  Entries stay polynomial.
struct PolyRref {
    PolyMatrix rows;
    std::vector<std::size_t> pivot_cols;  // pivot column of row i, i < rank
    Poly d = 1;

    std::size_t rank() const { return pivot_cols.size(); }
};

/// Only columns below `pivot_limit` are eligible as pivots (the remaining
/// columns are carried along, e.g. a right-hand side).
PolyRref rref_fraction_free(PolyMatrix m, std::size_t pivot_limit);
PolyRref rref_fraction_free(PolyMatrix m);

/// Kernel basis of a polynomial matrix; each vector is content-free with the
/// first nonzero entry sign-normalized.
std::vector<PolyVector> nullspace(const PolyMatrix& m, std::size_t ncols);

/// Divide by the gcd of the entries and make the first nonzero entry's
/// leading coefficient positive.
PolyVector normalize_vector(PolyVector v);

struct LinearSolution {
    std::optional<RatVector> particular;  // absent when inconsistent
    std::vector<RatVector> nullspace;
};

/// Exact solution of A x = b over the fraction field of the polynomial ring.
LinearSolution solve_linear(const RatMatrix& a, const RatVector& b);

}  // namespace rt

#endif  // RT_LINSOLVE_HPP
