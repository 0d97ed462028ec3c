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

#include <gtest/gtest.h>

#include "corpus.hpp"

using namespace rt;

namespace {

const Var n = var("n"), m = var("m"), k = var("k"), c = var("c"), z = var("z");

Poly P(Var v) { return Poly::variable(v); }

std::size_t member_index(const ShiftSet& family, std::map<Var, long> want) {
    for (std::size_t i = 0; i < family.size(); ++i) {
        bool ok = true;
        for (const auto& [v, s] : want) {
            auto it = family[i].shift.find(v);
            ok = ok && (it == family[i].shift.end() ? 0 : it->second) == s;
        }
        for (const auto& [v, s] : family[i].shift) ok = ok && (want.count(v) ? want[v] : 0) == s;
        if (ok) return i;
    }
    throw std::runtime_error("member not in family");
}

// Whether t_0..t_{len-1} satisfy a recurrence with constant coefficients of
// order <= max_order, by exact linear algebra.
bool has_constant_recurrence(const std::vector<Rational>& t, int max_order) {
    for (int d = 1; d <= max_order; ++d) {
        PolyMatrix a;
        for (std::size_t j = 0; j + static_cast<std::size_t>(d) < t.size(); ++j) {
            std::vector<Poly> row;
            for (int i = 0; i <= d; ++i) row.emplace_back(t[j + static_cast<std::size_t>(i)]);
            a.push_back(row);
        }
        if (!nullspace(a, static_cast<std::size_t>(d + 1)).empty()) return true;
    }
    return false;
}

std::vector<Rational> terms(const RatFunc& rho, int len) {
    std::vector<Rational> t = {Rational(1)};
    for (int j = 0; j + 1 < len; ++j)
        t.push_back(t.back() * rho.substitute({{k, RatFunc(j)}}).constant_value());
    return t;
}

}  // namespace

TEST(Applicability, BernoulliShiftIsForcedToZero) {
    ResidueSum rs = rewrite_sum(parse_sum(corpus::kBernoulliShift));
    ShiftSet family = shift_box({n, m}, 1);
    auto rep = analyze_sum(rs, family);
    EXPECT_EQ(rep.kernel_class, KernelClass::KFree);
    EXPECT_EQ(rep.verdict, Applicability::CertificateForcedZero);
    EXPECT_EQ(rep.route, Route::SisterCeline);
    EXPECT_EQ(rep.summand, HyperTerm(Atom::binomial(LinExpr::variable(n), LinExpr::variable(k) - LinExpr::variable(m))));

    // -(k - m - n - 2) / (k + 1 - m), up to a constant
    RatFunc want(P(m) + P(n) + 2 - P(k), P(k) + 1 - P(m));
    RatFunc ratio = rep.skeleton / want;
    EXPECT_TRUE(ratio.is_constant()) << rep.skeleton.str();
    EXPECT_EQ(gcd(rep.gp.A, P(k) - P(m) - P(n) - 2).degree(k), 1) << rep.gp.A.str();
    EXPECT_EQ(gcd(rep.gp.B, P(k) + 1 - P(m)).degree(k), 1) << rep.gp.B.str();
    EXPECT_EQ(gp_recompose(rep.gp, k), rep.skeleton);

    auto basis = sister_celine(rs.base, family, k, mask_of(z));
    ASSERT_EQ(basis.size(), 1u);
    const auto& p = basis[0];
    Poly p00 = p[member_index(family, {})], p01 = p[member_index(family, {{m, 1}})];
    Poly p10 = p[member_index(family, {{n, 1}})], p11 = p[member_index(family, {{n, 1}, {m, 1}})];
    EXPECT_FALSE(p00.is_zero());
    EXPECT_EQ(p00, p01);
    EXPECT_EQ(p00, -p10);
    EXPECT_TRUE(p11.is_zero());

    // Cross-validation: telescoping finds nothing or only a zero certificate.
    TelescopeOptions opts;
    opts.free_of = mask_of(z);
    auto tr = extended_zeilberger(rs.base, family, k, opts);
    if (tr) EXPECT_TRUE(tr->certificate.is_zero()) << tr->certificate.str();
}

TEST(Applicability, GeometricKernelLiftsPascal) {
    ResidueSum rs = rewrite_sum(parse_sum("sum(k, binom(n,k)*c^k)"));
    ShiftSet family = shift_box({n, k}, 1);
    auto rep = analyze_sum(rs, family);
    EXPECT_EQ(rep.kernel_class, KernelClass::KFree);
    EXPECT_EQ(rep.verdict, Applicability::CertificateForcedZero);

    auto basis = sister_celine(rs.base, family, k);
    ASSERT_EQ(basis.size(), 1u);
    const auto& p = basis[0];
    Poly a = p[member_index(family, {{n, 1}, {k, 1}})];
    Poly b = p[member_index(family, {})];
    Poly d = p[member_index(family, {{k, 1}})];
    EXPECT_TRUE(p[member_index(family, {{n, 1}})].is_zero());
    // (1, -c, -1) on F(n+1, k+1), F(n, k), F(n, k+1)
    EXPECT_EQ(b, -(a * P(c)));
    EXPECT_EQ(d, -a);
}

TEST(Applicability, StirlingKernelDependsOnParameters) {
    ResidueSum rs = rewrite_sum(parse_sum("sum(k, binom(n,k)*S2(k,m))"));
    auto rep = analyze_sum(rs, shift_box({n, m}, 1));
    EXPECT_EQ(rep.kernel_class, KernelClass::KDependent);
    EXPECT_EQ(rep.verdict, Applicability::TelescopingPossible);
    EXPECT_EQ(rep.route, Route::ExtendedZeilberger);
    EXPECT_EQ(route_name(rep.route), "extended-zeilberger");
    ResidueSum rp = rewrite_sum(parse_sum("sum(k, binom(m,k)*k^n*(-1)^(m-k))"));
    EXPECT_EQ(analyze_sum(rp, shift_box({n, m}, 1)).kernel_class, KernelClass::KDependent);
}

TEST(CFinite, Examples) {
    EXPECT_EQ(cfinite_witness(RatFunc(2), k), CFiniteVerdict::PossiblyCFinite);
    EXPECT_EQ(cfinite_witness(RatFunc(P(k) + 1), k), CFiniteVerdict::NotCFinite);
    EXPECT_EQ(cfinite_witness(RatFunc(P(k) + 2, P(k)), k), CFiniteVerdict::PossiblyCFinite);
}

TEST(CFinite, NeverContradictedByBruteForce) {
    std::vector<RatFunc> rhos = {
        RatFunc(2),
        RatFunc(P(k) + 1),
        RatFunc((P(k) + 1) * (P(k) + 1)),
        RatFunc(P(k) + 3, P(k) + 1),
        RatFunc(Poly(2) * P(k) + 1, P(k) + 1),
        RatFunc(Poly(3) * (P(k) + 3), P(k) + 1),
        RatFunc(Poly(1), P(k) + 1),
        RatFunc(Poly(-1) * (P(k) + 2) * (P(k) + 2), (P(k) + 1) * (P(k) + 1)),
        RatFunc(P(k) + 5, Poly(2) * P(k) + 7),
    };
    int not_cfinite = 0;
    for (const auto& rho : rhos) {
        auto verdict = cfinite_witness(rho, k);
        bool found = has_constant_recurrence(terms(rho, 20), 6);
        if (verdict == CFiniteVerdict::NotCFinite) {
            ++not_cfinite;
            EXPECT_FALSE(found) << rho.str();
        }
    }
    EXPECT_GE(not_cfinite, 5);
    // Sanity of the oracle itself: polynomial and geometric terms are C-finite.
    EXPECT_TRUE(has_constant_recurrence(terms(RatFunc(P(k) + 3, P(k) + 1), 20), 6));
    EXPECT_TRUE(has_constant_recurrence(terms(RatFunc(Poly(-1) * (P(k) + 2) * (P(k) + 2), (P(k) + 1) * (P(k) + 1)), 20), 6));
}
