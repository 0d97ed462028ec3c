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

#include "rt/roots.hpp"

#include <bit>

namespace rt {

namespace {

Integer eval_int(const std::vector<Integer>& cs, const Integer& x) {
    Integer r = 0;
    for (std::size_t i = cs.size(); i-- > 0;) r = r * x + cs[i];
    return r;
}

}  // namespace

std::set<long> integer_roots(const Poly& p, Var v) {
    if (p.is_zero()) throw AlgebraError("integer_roots of the zero polynomial");
    if (p.vars() & ~mask_of(v)) throw AlgebraError("integer_roots expects a univariate polynomial: " + p.str());
    Poly pp = p.primitive();
    auto coeffs = pp.coefficients_in(v);
    std::vector<Integer> cs;
    for (const auto& c : coeffs) cs.push_back(c.constant_value().get_num());
    std::set<long> roots;
    std::size_t low = 0;
    while (low < cs.size() && cs[low] == 0) ++low;
    if (low > 0) roots.insert(0);
    cs.erase(cs.begin(), cs.begin() + static_cast<long>(low));
    if (cs.size() <= 1) return roots;
    Integer a0 = abs(cs[0]);
    // Fujiwara's bound 2 max |c_{d-i} / c_d|^(1/i) on root magnitudes, rounded up.
    const std::size_t d = cs.size() - 1;
    Integer lead = abs(cs.back()), bound = 0;
    for (std::size_t i = 1; i <= d; ++i) {
        Integer num = abs(cs[d - i]);
        if (i == d) num = (num + 1) / 2;
        Integer t = (num + lead - 1) / lead, r;
        mpz_root(r.get_mpz_t(), t.get_mpz_t(), static_cast<unsigned long>(i));
        r += 1;
        if (r > bound) bound = r;
    }
    bound = 2 * bound;
    auto test = [&](const Integer& x) {
        if (eval_int(cs, x) == 0) {
            if (!x.fits_slong_p()) throw AlgebraError("integer root out of range");
            roots.insert(x.get_si());
        }
    };
    auto test_pm = [&](const Integer& m) {
        if (m > bound) return;
        test(m);
        test(-m);
    };
    if (bound * bound <= a0) {
        for (Integer m = 1; m <= bound; ++m)
            if (a0 % m == 0) test_pm(m);
    } else {
        for (Integer m = 1; m * m <= a0; ++m) {
            if (a0 % m != 0) continue;
            test_pm(m);
            Integer e = a0 / m;
            if (e != m) test_pm(e);
        }
    }
    return roots;
}

std::set<long> integer_roots(const Poly& p) {
    VarMask m = p.vars();
    if (m == 0) {
        if (p.is_zero()) throw AlgebraError("integer_roots of the zero polynomial");
        return {};
    }
    if (std::popcount(m) != 1) throw AlgebraError("integer_roots expects a univariate polynomial: " + p.str());
    return integer_roots(p, static_cast<Var>(std::countr_zero(m)));
}

}  // namespace rt
