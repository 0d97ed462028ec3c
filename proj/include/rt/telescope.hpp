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

#ifndef RT_TELESCOPE_HPP
#define RT_TELESCOPE_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rt/hyperterm.hpp"
#include "rt/linsolve.hpp"

namespace rt {

/// One member F(n + alpha, k + beta) * multiplier of a family of similar
/// terms.  The multiplier is an extra rational factor, e.g. a power of an
/// auxiliary variable, or z standing for d/dx acting on exp(x z).
struct FamilyMember {
    std::map<Var, long> shift;
    RatFunc multiplier{1};

    HyperTerm apply(const HyperTerm& base) const;
    std::string str(const std::string& name = "F") const;
    bool operator==(const FamilyMember& o) const { return shift == o.shift && multiplier == o.multiplier; }
};

using ShiftSet = std::vector<FamilyMember>;

/// Members {0..order} * e_v.
ShiftSet shift_range(Var v, long order);
/// All members with 0 <= shift_v <= side for each v (multiplier 1).
ShiftSet shift_box(const std::vector<Var>& vars, long side);
/// Box of side 1 in `vars` with range 0..2 in `wide`.
ShiftSet shift_box_wide(const std::vector<Var>& vars, Var wide);

struct TelescopeOptions {
    /// Variables the coefficients must not contain, besides k and q^k.
    VarMask free_of = 0;
    /// Allows coefficients that are polynomials of degree <= aux_degree in
    /// this variable (an auxiliary residue variable).
    std::optional<Var> aux_poly;
    int aux_degree = 1;
    /// Degrees tried for the certificate numerator when the degree bound is
    /// negative.
    int fallback_degree = 4;
};

struct TelescopeResult {
    std::vector<Poly> coeffs;  // p_alpha, aligned with the family
    RatFunc certificate;       // R, with sum_alpha p_alpha F_alpha = Delta_k(R F)
    ShiftMode mode = ShiftMode::Ordinary;
};

/// Ordinary when the ratios involve k, Q when they involve only q^k.
ShiftMode detect_shift_mode(const std::vector<RatFunc>& fs, Var k);

/// R with rho(k) R(k+1) - R(k) = 1, if a rational solution exists.
std::optional<RatFunc> gosper(const RatFunc& rho, Var k);

/// The telescoping search on ratios: finds p, free of k and of the free_of
/// variables and not all zero, with sum p_alpha r_alpha = rho R(k+1) - R(k).
/// `priority` lists member indices from most to least significant (default:
/// given order); solutions using the first are preferred, and the first
/// nonzero coefficient in this order is made positive.
std::optional<TelescopeResult> telescope_ratios(const RatFunc& rho, const std::vector<RatFunc>& ratios, Var k,
                                                const TelescopeOptions& opts = {},
                                                std::vector<std::size_t> priority = {});

/// Ratios r_alpha = member_alpha(base) / base; throws when a member is not
/// similar to the base.
std::vector<RatFunc> family_ratios(const HyperTerm& base, const ShiftSet& family);

std::optional<TelescopeResult> extended_zeilberger(const HyperTerm& base, const ShiftSet& family, Var k,
                                                   const TelescopeOptions& opts = {});

/// First success of extended_zeilberger over shift_range(param, d),
/// d = 1..max_order.
std::optional<std::pair<ShiftSet, TelescopeResult>> zeilberger(const HyperTerm& base, Var param, long max_order,
                                                                Var k, const TelescopeOptions& opts = {});

/// Basis of coefficient vectors p, free of k, q^k and free_of, with
/// sum p_alpha F_alpha = 0 identically.
std::vector<PolyVector> sister_celine(const HyperTerm& base, const ShiftSet& family, Var k, VarMask free_of = 0);

/// sum p_alpha r_alpha - (rho R(k+1) - R(k)), cleared of denominators, is zero.
bool check_core_identity(const RatFunc& rho, const std::vector<RatFunc>& ratios, const std::vector<Poly>& coeffs,
                         const RatFunc& certificate, Var k);

/// Clears denominators, removes the polynomial content, and makes the
/// coefficient of the lexicographically largest member with a nonzero
/// coefficient positive.  `factor` receives output / input.
PolyVector normalize_operator(const std::vector<RatFunc>& coeffs, const ShiftSet& family,
                              RatFunc* factor = nullptr);
/// Same, with the sign fixed by the first nonzero entry in `order`.
PolyVector normalize_in_order(const std::vector<RatFunc>& coeffs, const std::vector<std::size_t>& order,
                              RatFunc* factor = nullptr);

/// Indices of family members in descending lexicographic shift order.
std::vector<std::size_t> lex_descending(const ShiftSet& family);

}  // namespace rt

#endif  // RT_TELESCOPE_HPP
