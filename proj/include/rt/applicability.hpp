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

// When can creative telescoping on a residue kernel produce a nonzero
// certificate?  For sums sum_k F(n, k) a_k whose generating function
// sum_k a_k z^k is free of k and of the parameters, the combination
// g(k) = sum_alpha p_alpha F(n + alpha, k) must be zero whenever the
// Gosper-Petkovsek form of its shift quotient has A != 1 or B != 1, so the
// search reduces to Sister Celine's method.

#ifndef RT_APPLICABILITY_HPP
#define RT_APPLICABILITY_HPP

#include <string>

#include "rt/residue.hpp"
#include "rt/telescope.hpp"

namespace rt {

enum class KernelClass { KFree, KDependent };
enum class Applicability { TelescopingPossible, CertificateForcedZero };
enum class Route { ExtendedZeilberger, SisterCeline };

std::string kernel_class_name(KernelClass c);
std::string applicability_name(Applicability a);
std::string route_name(Route r);

struct ApplicabilityReport {
    KernelClass kernel_class = KernelClass::KDependent;
    HyperTerm summand;      // F(n, k): the summand without the sequence kernel
    RatFunc skeleton;       // p-free part of g(k+1) / g(k)
    GPForm gp;              // its Gosper-Petkovsek form
    Applicability verdict = Applicability::TelescopingPossible;
    Route route = Route::ExtendedZeilberger;
    std::string reason;
};

/// The family's shift variables other than k must be discrete parameters of
/// the sum.
ApplicabilityReport analyze_sum(const ResidueSum& rs, const ShiftSet& family);

enum class CFiniteVerdict { NotCFinite, PossiblyCFinite };
std::string cfinite_name(CFiniteVerdict v);

/// A hypergeometric term with shift quotient rho can only be C-finite when
/// its Gosper-Petkovsek form has A = B = 1.
CFiniteVerdict cfinite_witness(const RatFunc& rho, Var k);

}  // namespace rt

#endif  // RT_APPLICABILITY_HPP
