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

#include "rt/telescope.hpp"

#include <algorithm>
#include <numeric>

namespace rt {

// ------------------------------------------------------------ shift sets

HyperTerm FamilyMember::apply(const HyperTerm& base) const {
    HyperTerm t = base;
    for (const auto& [v, s] : shift)
        if (s != 0) t = t.shifted(v, s);
    t.scale(multiplier);
    return t;
}

std::string FamilyMember::str(const std::string& name) const {
    std::string s;
    if (!multiplier.is_one()) {
        std::string m = multiplier.str();
        s = (multiplier.is_polynomial() && multiplier.num().size() == 1 ? m : "(" + m + ")") + "*";
    }
    s += name + "(";
    bool first = true;
    for (const auto& [v, sh] : shift) {
        std::string e = (LinExpr::variable(v) + sh).str();
        e.erase(std::remove(e.begin(), e.end(), ' '), e.end());
        s += (first ? "" : ",") + e;
        first = false;
    }
    return s + ")";
}

ShiftSet shift_range(Var v, long order) {
    ShiftSet s;
    for (long i = 0; i <= order; ++i) s.push_back({{{v, i}}, RatFunc(1)});
    return s;
}

namespace {

void box_rec(const std::vector<Var>& vars, const std::vector<long>& hi, std::size_t i, std::map<Var, long>& cur,
             ShiftSet& out) {
    if (i == vars.size()) {
        out.push_back({cur, RatFunc(1)});
        return;
    }
    for (long s = 0; s <= hi[i]; ++s) {
        cur[vars[i]] = s;
        box_rec(vars, hi, i + 1, cur, out);
    }
}

}  // namespace

ShiftSet shift_box(const std::vector<Var>& vars, long side) {
    ShiftSet out;
    std::map<Var, long> cur;
    box_rec(vars, std::vector<long>(vars.size(), side), 0, cur, out);
    return out;
}

ShiftSet shift_box_wide(const std::vector<Var>& vars, Var wide) {
    std::vector<long> hi;
    for (Var v : vars) hi.push_back(v == wide ? 2 : 1);
    ShiftSet out;
    std::map<Var, long> cur;
    box_rec(vars, hi, 0, cur, out);
    return out;
}

std::vector<std::size_t> lex_descending(const ShiftSet& family) {
    std::set<Var> vars;
    for (const auto& m : family)
        for (const auto& [v, s] : m.shift) vars.insert(v);
    auto key = [&](const FamilyMember& m) {
        std::vector<long> k;
        for (Var v : vars) {
            auto it = m.shift.find(v);
            k.push_back(it == m.shift.end() ? 0 : it->second);
        }
        return k;
    };
    std::vector<std::size_t> idx(family.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        auto ka = key(family[a]), kb = key(family[b]);
        if (ka != kb) return ka > kb;
        return family[a].multiplier.str() > family[b].multiplier.str();
    });
    return idx;
}

// ------------------------------------------------------------- helpers

ShiftMode detect_shift_mode(const std::vector<RatFunc>& fs, Var k) {
    auto qk = qpower_var(k);
    bool has_k = false, has_q = false;
    for (const auto& f : fs) {
        has_k = has_k || f.has_var(k);
        has_q = has_q || (qk && f.has_var(*qk));
    }
    if (has_k && has_q) throw AlgebraError("ratios mix k and q^k; neither shift mode applies");
    return has_q ? ShiftMode::Q : ShiftMode::Ordinary;
}

namespace {

Poly lcm(const Poly& a, const Poly& b) {
    if (b.is_constant()) return a;
    if (a.is_constant()) return b;
    Poly g = gcd(a, b);
    return exact_div(a, g) * b;
}

// Exponent e with f = q^e, if f is a pure power of q.
std::optional<long> q_exponent(const RatFunc& f) {
    const Var q = q_var();
    auto mono = [&](const Poly& p) -> std::optional<long> {
        if (p.size() != 1 || p.leading_coeff() != 1) return std::nullopt;
        if (p.vars() & ~mask_of(q)) return std::nullopt;
        return static_cast<long>(p.degree(q));
    };
    auto a = mono(f.num()), b = mono(f.den());
    if (!a || !b) return std::nullopt;
    return *a - *b;
}

std::optional<long> integer_value(const RatFunc& f) {
    if (!f.is_constant()) return std::nullopt;
    Rational c = f.constant_value();
    if (c.get_den() != 1 || !c.get_num().fits_slong_p()) return std::nullopt;
    return c.get_num().get_si();
}

long deg_in(const Poly& p, Var x) { return p.is_zero() ? -1 : static_cast<long>(p.degree(x)); }

struct Attempt {
    long lo, hi;  // y = sum_{j=lo}^{hi} c_j x^j
};

// Candidate exponent ranges for the polynomial part of the certificate.
std::vector<Attempt> degree_attempts(const Poly& A, const Poly& B1, long rhs_deg, Var x, ShiftMode mode,
                                     int fallback) {
    std::vector<long> cands;
    long lo = 0;
    if (mode == ShiftMode::Ordinary) {
        Poly s = A + B1, d = A - B1;
        long ds = deg_in(s, x), dd = deg_in(d, x);
        if (dd >= ds) {
            cands.push_back(rhs_deg - dd);
        } else {
            cands.push_back(rhs_deg - ds + 1);
            Poly c1 = d.coefficient(x, static_cast<unsigned>(ds - 1));
            Poly c2 = s.coefficient(x, static_cast<unsigned>(ds));
            if (auto v = integer_value(RatFunc(c1 * Rational(-2), c2))) cands.push_back(*v);
        }
    } else {
        long da = deg_in(A, x), db = deg_in(B1, x);
        if (da != db) {
            cands.push_back(rhs_deg - std::max(da, db));
        } else {
            cands.push_back(rhs_deg - da);
            RatFunc r(A.coefficient(x, static_cast<unsigned>(da)), B1.coefficient(x, static_cast<unsigned>(db)));
            // lc(A) q^D = lc(B1) cancels the top coefficient.
            if (auto e = q_exponent(r.inverse())) cands.push_back(*e);
        }
        Poly a0 = A.coefficient(x, 0), b0 = B1.coefficient(x, 0);
        if (!a0.is_zero() && !b0.is_zero())
            if (auto e = q_exponent(RatFunc(b0, a0)); e && *e < 0) lo = *e;
    }
    long hi = *std::max_element(cands.begin(), cands.end());
    std::vector<Attempt> out;
    if (hi >= 0) {
        out.push_back({lo, hi});
    } else {
        for (long d = 0; d <= fallback; ++d) out.push_back({lo, d});
    }
    return out;
}

// Coefficient rows over Q[params]: each entry's expansion in the monomials of
// `mask` contributes one row per monomial.
PolyMatrix expand_rows(const std::vector<PolyVector>& rows, std::size_t ncols, VarMask mask) {
    PolyMatrix out;
    for (const auto& row : rows) {
        std::map<std::vector<std::uint16_t>, PolyVector> by_mono;
        for (std::size_t j = 0; j < ncols; ++j) {
            if (row[j].is_zero()) continue;
            for (auto& [mono, c] : row[j].collect(mask)) {
                auto& r = by_mono[mono];
                if (r.empty()) r.assign(ncols, Poly());
                r[j] = c;
            }
        }
        for (auto& [mono, r] : by_mono) out.push_back(std::move(r));
    }
    return out;
}

long max_total_degree(const PolyVector& v) {
    long d = 0;
    for (const auto& x : v)
        if (!x.is_zero()) d = std::max(d, static_cast<long>(x.total_degree()));
    return d;
}

// Minimal-support vectors of the span of `basis`: each is obtained by
// forcing dim - 1 coordinates to zero.
std::vector<PolyVector> circuits(const std::vector<PolyVector>& basis, std::size_t n) {
    std::size_t dim = basis.size();
    if (dim <= 1) return basis;
    std::vector<PolyVector> out;
    std::vector<std::size_t> pick(dim - 1);
    std::iota(pick.begin(), pick.end(), 0);
    std::size_t visited = 0;
    for (;;) {
        if (++visited > 4000) break;
        PolyMatrix m;
        for (std::size_t c : pick) {
            PolyVector row;
            for (const auto& b : basis) row.push_back(b[c]);
            m.push_back(row);
        }
        auto ker = nullspace(m, dim);
        if (ker.size() == 1) {
            PolyVector v(n);
            for (std::size_t i = 0; i < dim; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    if (!ker[0][i].is_zero() && !basis[i][j].is_zero()) v[j] += ker[0][i] * basis[i][j];
            v = normalize_vector(v);
            if (std::any_of(v.begin(), v.end(), [](const Poly& p) { return !p.is_zero(); }) &&
                std::find(out.begin(), out.end(), v) == out.end())
                out.push_back(v);
        }
        // next combination
        std::size_t i = pick.size();
        while (i > 0 && pick[i - 1] == n - pick.size() + i - 1) --i;
        if (i == 0) break;
        ++pick[i - 1];
        for (std::size_t j = i; j < pick.size(); ++j) pick[j] = pick[j - 1] + 1;
    }
    for (const auto& b : basis)
        if (std::find(out.begin(), out.end(), b) == out.end()) out.push_back(b);
    return out;
}

std::string vector_key(const PolyVector& v) {
    std::string s;
    for (const auto& x : v) s += x.str() + ";";
    return s;
}

}  // namespace

bool check_core_identity(const RatFunc& rho, const std::vector<RatFunc>& ratios, const std::vector<Poly>& coeffs,
                         const RatFunc& certificate, Var k) {
    if (ratios.size() != coeffs.size()) throw AlgebraError("core identity: coefficient count mismatch");
    RatFunc lhs;
    for (std::size_t i = 0; i < ratios.size(); ++i)
        if (!coeffs[i].is_zero()) lhs += RatFunc(coeffs[i]) * ratios[i];
    RatFunc rhs = rho * shift_discrete(certificate, k, 1) - certificate;
    return (lhs - rhs).is_zero();
}

PolyVector normalize_in_order(const std::vector<RatFunc>& coeffs, const std::vector<std::size_t>& order,
                              RatFunc* factor) {
    Poly l = 1;
    for (const auto& c : coeffs) l = lcm(l, c.den());
    PolyVector out;
    for (const auto& c : coeffs) out.push_back(exact_div(c.num() * l, c.den()));
    Poly g;
    for (const auto& p : out)
        if (!p.is_zero()) g = g.is_zero() ? p.primitive() : gcd(g, p);
    if (g.is_zero()) {
        if (factor) *factor = RatFunc(1);
        return out;
    }
    for (auto& p : out) p = exact_div(p, g);
    // Joint rational content, so the vector has coprime integer coefficients.
    Integer cn = 0, cd = 1;
    for (const auto& p : out) {
        if (p.is_zero()) continue;
        Rational c = p.content();
        mpz_gcd(cn.get_mpz_t(), cn.get_mpz_t(), c.get_num_mpz_t());
        mpz_lcm(cd.get_mpz_t(), cd.get_mpz_t(), c.get_den_mpz_t());
    }
    Rational jc(cn, cd);
    jc.canonicalize();
    const Rational inv = 1 / jc;
    for (auto& p : out) p = p * inv;
    RatFunc f(l, g * Poly(jc));
    for (std::size_t i : order) {
        if (out[i].is_zero()) continue;
        if (out[i].leading_coeff() < 0) {
            for (auto& p : out) p = -p;
            f = -f;
        }
        break;
    }
    if (factor) *factor = f;
    return out;
}

PolyVector normalize_operator(const std::vector<RatFunc>& coeffs, const ShiftSet& family, RatFunc* factor) {
    return normalize_in_order(coeffs, lex_descending(family), factor);
}

// --------------------------------------------------------- telescoping

std::optional<TelescopeResult> telescope_ratios(const RatFunc& rho, const std::vector<RatFunc>& ratios0, Var k,
                                                const TelescopeOptions& opts, std::vector<std::size_t> prio) {
    if (ratios0.empty()) throw AlgebraError("telescoping needs a nonempty family");
    if (prio.empty()) {
        prio.resize(ratios0.size());
        std::iota(prio.begin(), prio.end(), 0);
    }
    // Coefficients polynomial in an auxiliary variable are handled by
    // splitting every member into its aux-power multiples.
    const int e = opts.aux_poly ? opts.aux_degree : 0;
    std::vector<RatFunc> ratios;
    for (const auto& r : ratios0)
        for (int j = 0; j <= e; ++j) ratios.push_back(j == 0 ? r : r * RatFunc::variable(*opts.aux_poly).pow(j));
    const std::size_t s = ratios.size();

    std::vector<RatFunc> all = ratios;
    all.push_back(rho);
    const ShiftMode mode = detect_shift_mode(all, k);
    const Var x = shift_poly_var(k, mode);
    VarMask free = opts.free_of | mask_of(k);
    if (auto qk = qpower_var(k)) free |= mask_of(*qk);
    if (opts.aux_poly) free |= mask_of(*opts.aux_poly);

    // r_alpha = a_alpha / d, H = F / d, and the Gosper form of H's quotient.
    Poly d = 1;
    for (const auto& r : ratios) d = lcm(d, r.den());
    std::vector<Poly> a;
    for (const auto& r : ratios) a.push_back(exact_div(r.num() * d, r.den()));
    RatFunc rho_h = rho * RatFunc(d) / shift_discrete(RatFunc(d), k, 1);
    GPForm gp = gosper_normal_form(rho_h, k, mode);
    Poly A = gp.A * gp.u.num(), B = gp.B * gp.u.den(), C = gp.C;
    // A(k) y(k+1) - B(k-1) y(k) = C(k) sum p_alpha a_alpha(k), cleared of the
    // q-power denominator that B(k-1) has in the q case.
    RatFunc b1r = shift_discrete(RatFunc(B), k, -1);
    Poly qd = b1r.den();
    Poly A2 = A * qd, B1 = b1r.num(), C2 = C * qd;
    std::vector<Poly> rhs;
    long rhs_deg = -1;
    for (const auto& ai : a) {
        rhs.push_back(C2 * ai);
        rhs_deg = std::max(rhs_deg, deg_in(rhs.back(), x));
    }

    for (const Attempt& at : degree_attempts(A2, B1, rhs_deg, x, mode, opts.fallback_degree)) {
        const long ny = at.hi - at.lo + 1;
        // y = x^lo * ytilde; for lo < 0 the equation is multiplied by
        // x^-lo q^-lo so every entry stays polynomial.
        Poly xs = at.lo < 0 ? Poly::variable(x, static_cast<unsigned>(-at.lo)) : Poly(1);
        Poly qs = at.lo < 0 ? Poly::variable(q_var(), static_cast<unsigned>(-at.lo)) : Poly(1);
        std::vector<Poly> cols;
        for (long j = 0; j < ny; ++j) {
            Poly xj = Poly::variable(x, static_cast<unsigned>(j));
            Poly col = mode == ShiftMode::Ordinary
                           ? A2 * (Poly::variable(x) + 1).pow(static_cast<unsigned>(j)) - B1 * xj
                           : A2 * Poly::variable(q_var(), static_cast<unsigned>(j)) * xj - qs * B1 * xj;
            cols.push_back(col);
        }
        for (const auto& r : rhs) cols.push_back(-(qs * xs * r));
        long nrows = 0;
        for (const auto& c : cols) nrows = std::max(nrows, deg_in(c, x) + 1);
        PolyMatrix m(static_cast<std::size_t>(nrows), PolyVector(cols.size()));
        for (std::size_t j = 0; j < cols.size(); ++j) {
            auto cs = cols[j].coefficients_in(x);
            for (std::size_t i = 0; i < cs.size(); ++i) m[i][j] = cs[i];
        }
        PolyRref rr = rref_fraction_free(m, static_cast<std::size_t>(ny));

        // Rows without a y pivot constrain p alone; p must be free of the
        // free_of variables, so each such row splits by monomials.
        std::vector<PolyVector> prows;
        for (std::size_t i = rr.rank(); i < rr.rows.size(); ++i)
            prows.emplace_back(rr.rows[i].begin() + ny, rr.rows[i].end());
        PolyMatrix pm = expand_rows(prows, s, free);
        auto basis = nullspace(pm, s);
        if (basis.empty()) continue;

        // Prefer solutions using the top member, then small support and degree.
        auto cands = circuits(basis, s);
        auto origin = [&](std::size_t col) { return col / static_cast<std::size_t>(e + 1); };
        auto score = [&](const PolyVector& v) {
            std::set<std::size_t> support;
            for (std::size_t j = 0; j < s; ++j)
                if (!v[j].is_zero()) support.insert(origin(j));
            bool uses_top = support.count(prio.front()) > 0;
            return std::make_tuple(!uses_top, support.size(), max_total_degree(v), vector_key(v));
        };
        std::sort(cands.begin(), cands.end(), [&](const PolyVector& u, const PolyVector& v) { return score(u) < score(v); });
        const PolyVector& p = cands.front();

        // Recover y from the pivot rows (free y columns set to zero).
        std::vector<RatFunc> c(static_cast<std::size_t>(ny));
        for (std::size_t i = 0; i < rr.rank(); ++i) {
            Poly acc;
            for (std::size_t j = 0; j < s; ++j)
                if (!p[j].is_zero() && !rr.rows[i][static_cast<std::size_t>(ny) + j].is_zero())
                    acc += rr.rows[i][static_cast<std::size_t>(ny) + j] * p[j];
            c[rr.pivot_cols[i]] = RatFunc(-acc, rr.d);
        }
        RatFunc y;
        for (long j = 0; j < ny; ++j)
            if (!c[static_cast<std::size_t>(j)].is_zero()) {
                long ex = j + at.lo;
                RatFunc xp = ex >= 0 ? RatFunc(Poly::variable(x, static_cast<unsigned>(ex)))
                                     : RatFunc(Poly(1), Poly::variable(x, static_cast<unsigned>(-ex)));
                y += c[static_cast<std::size_t>(j)] * xp;
            }
        RatFunc R = RatFunc(B1) * y / (RatFunc(C2) * RatFunc(d));

        // Fold aux powers back into polynomial coefficients.
        std::vector<RatFunc> folded(ratios0.size());
        for (std::size_t j = 0; j < s; ++j)
            if (!p[j].is_zero()) {
                RatFunc t(p[j]);
                int pw = static_cast<int>(j % static_cast<std::size_t>(e + 1));
                if (pw > 0) t *= RatFunc::variable(*opts.aux_poly).pow(pw);
                folded[origin(j)] += t;
            }
        TelescopeResult res;
        res.mode = mode;
        RatFunc factor;
        res.coeffs = normalize_in_order(folded, prio, &factor);
        res.certificate = R * factor;
        if (!check_core_identity(rho, ratios0, res.coeffs, res.certificate, k))
            throw AlgebraError("internal: telescoping certificate fails the core identity");
        return res;
    }
    return std::nullopt;
}

std::optional<RatFunc> gosper(const RatFunc& rho, Var k) {
    if (rho.is_zero()) throw AlgebraError("gosper: zero shift quotient");
    auto r = telescope_ratios(rho, {RatFunc(1)}, k);
    if (!r) return std::nullopt;
    // p is a nonzero constant after normalization; scale it to 1.
    return r->certificate / RatFunc(r->coeffs[0]);
}

std::vector<RatFunc> family_ratios(const HyperTerm& base, const ShiftSet& family) {
    std::vector<RatFunc> out;
    for (const auto& m : family) {
        auto r = similar_ratio(m.apply(base), base);
        if (!r) throw AlgebraError("family member " + m.str() + " is not similar to the base term");
        out.push_back(*r);
    }
    return out;
}

std::optional<TelescopeResult> extended_zeilberger(const HyperTerm& base, const ShiftSet& family, Var k,
                                                   const TelescopeOptions& opts) {
    auto ratios = family_ratios(base, family);
    return telescope_ratios(shift_quotient(base, k), ratios, k, opts, lex_descending(family));
}

std::optional<std::pair<ShiftSet, TelescopeResult>> zeilberger(const HyperTerm& base, Var param, long max_order,
                                                                Var k, const TelescopeOptions& opts) {
    for (long d = 1; d <= max_order; ++d) {
        ShiftSet fam = shift_range(param, d);
        if (auto r = extended_zeilberger(base, fam, k, opts)) return std::make_pair(fam, *r);
    }
    return std::nullopt;
}

std::vector<PolyVector> sister_celine(const HyperTerm& base, const ShiftSet& family, Var k, VarMask free_of) {
    auto ratios = family_ratios(base, family);
    Poly d = 1;
    for (const auto& r : ratios) d = lcm(d, r.den());
    PolyVector row;
    for (const auto& r : ratios) row.push_back(exact_div(r.num() * d, r.den()));
    VarMask mask = free_of | mask_of(k);
    if (auto qk = qpower_var(k)) mask |= mask_of(*qk);
    PolyMatrix m = expand_rows({row}, row.size(), mask);
    auto order = lex_descending(family);
    std::vector<PolyVector> out;
    for (const auto& v : nullspace(m, row.size())) {
        std::vector<RatFunc> rv(v.begin(), v.end());
        out.push_back(normalize_in_order(rv, order));
    }
    return out;
}

}  // namespace rt
