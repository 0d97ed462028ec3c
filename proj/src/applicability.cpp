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

#include "rt/applicability.hpp"

namespace rt {

std::string kernel_class_name(KernelClass c) {
    return c == KernelClass::KFree ? "k-free-generating-function" : "k-dependent-kernel";
}

std::string applicability_name(Applicability a) {
    return a == Applicability::CertificateForcedZero ? "certificate-forced-zero" : "telescoping-possible";
}

std::string route_name(Route r) { return r == Route::SisterCeline ? "sister-celine" : "extended-zeilberger"; }

std::string cfinite_name(CFiniteVerdict v) {
    return v == CFiniteVerdict::NotCFinite ? "not C-finite" : "possibly C-finite";
}

namespace {

bool depends_on_shift(const Poly& p, Var k, ShiftMode mode) { return p.has_var(shift_poly_var(k, mode)); }

}  // namespace

ApplicabilityReport analyze_sum(const ResidueSum& rs, const ShiftSet& family) {
    ApplicabilityReport rep;
    const Var k = rs.k;

    HyperTerm kernel;
    for (const auto& f : rs.factors) kernel *= residue_rep(f.kind, f.indices, f.aux, f.x);
    rep.summand = rs.base * kernel.inverse();

    // The kernel of a_k may depend on k only through aux^(-k).
    bool kfree = rs.factors.size() <= 1;
    if (kfree && !rs.factors.empty()) {
        const Var aux = rs.factors[0].aux;
        kfree = (kernel.discrete_vars() & ~mask_of(k)) == 0;
        if (kfree) {
            RatFunc rho = shift_quotient(kernel.without_opaque(), k) * RatFunc::variable(aux);
            kfree = !rho.has_var(aux);
        }
    }
    if (!kfree) {
        rep.kernel_class = KernelClass::KDependent;
        rep.reason = "the generating function of the sequence factor depends on k or on the parameters; "
                     "the analysis does not apply";
        return rep;
    }
    rep.kernel_class = KernelClass::KFree;

    // g(k) = F(k) N(k) / D(k) with N = sum p_alpha N_alpha generic; the
    // p-free part of g(k+1) / g(k) is rho_F(k) D(k) / D(k+1).
    auto ratios = family_ratios(rep.summand, family);
    Poly d(1);
    for (const auto& r : ratios) d = exact_div(d * r.den(), gcd(d, r.den()));
    RatFunc rho = shift_quotient(rep.summand, k);
    std::vector<RatFunc> all = ratios;
    all.push_back(rho);
    const ShiftMode mode = detect_shift_mode(all, k);
    rep.skeleton = rho * RatFunc(d, shift_poly(d, k, 1, mode));
    rep.gp = gosper_normal_form(rep.skeleton, k, mode);

    if (depends_on_shift(rep.gp.A, k, mode) || depends_on_shift(rep.gp.B, k, mode)) {
        rep.verdict = Applicability::CertificateForcedZero;
        rep.route = Route::SisterCeline;
        rep.reason = "A = " + rep.gp.A.str() + ", B = " + rep.gp.B.str() +
                     " in the skeleton; any telescoping certificate must vanish";
    } else {
        rep.reason = "A = B = 1 in the skeleton";
    }
    return rep;
}

CFiniteVerdict cfinite_witness(const RatFunc& rho, Var k) {
    GPForm f = gosper_normal_form(rho, k);
    return f.A.has_var(k) || f.B.has_var(k) ? CFiniteVerdict::NotCFinite : CFiniteVerdict::PossiblyCFinite;
}

}  // namespace rt
