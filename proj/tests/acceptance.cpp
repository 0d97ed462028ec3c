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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.  Operators are compared after normalization; values are
// checked against oracles written out here.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>

#include "corpus.hpp"
#include "rt/prover.hpp"

using namespace rt;

namespace {

const Var n = var("n"), m = var("m"), l = var("l"), k = var("k"), x = var("x"), y = var("y"), z = var("z"),
          q = var("q");

using Shift = std::map<Var, long>;

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw Failure(what);
}

std::string pt(const IntPoint& p) {
    std::string s;
    for (const auto& [v, val] : p) s += (s.empty() ? "" : ",") + std::string(1, var_name(v)) + "=" + std::to_string(val);
    return "(" + s + ")";
}

// Every recurrence the criteria produce; the property suite re-checks them.
std::vector<Recurrence> emitted;

Recurrence derive(const std::string& sum, SearchOptions opts = {}) {
    Recurrence rec = derive_recurrence(parse_sum(sum), opts);
    emitted.push_back(rec);
    return rec;
}

std::size_t member_index(const Recurrence& rec, const Shift& want, bool differentiated = false) {
    for (std::size_t i = 0; i < rec.family.size(); ++i) {
        Shift s;
        for (const auto& [v, d] : rec.family[i].shift)
            if (d != 0) s[v] = d;
        bool d = i < rec.differentiated.size() && rec.differentiated[i];
        if (s == want && d == differentiated) return i;
    }
    throw Failure("operator " + rec.operator_text() + " has no member for an expected shift");
}

struct Term {
    Shift shift;
    std::string coefficient;
    bool differentiated = false;
};

// Equal after clearing denominators, removing content and fixing the sign.
void require_operator(const Recurrence& rec, const std::vector<Term>& expected) {
    std::vector<RatFunc> want(rec.family.size()), got(rec.family.size());
    for (const auto& t : expected) want[member_index(rec, t.shift, t.differentiated)] = parse_ratfunc(t.coefficient);
    for (std::size_t i = 0; i < got.size(); ++i) got[i] = RatFunc(rec.coeffs[i]);
    require(normalize_operator(got, rec.family) == normalize_operator(want, rec.family),
            "operator " + rec.operator_text() + " differs from the expected one");
}

Proof prove(const std::string& identity, std::map<Var, long> bounds = {}) {
    ProveOptions o;
    o.grid_max = 10;
    o.grid_bounds = std::move(bounds);
    Proof pf = prove_identity(identity, o);
    if (pf.recurrence) emitted.push_back(*pf.recurrence);
    return pf;
}

void require_proved(const Proof& pf, std::size_t points) {
    require(pf.verdict == Verdict::Proved, "verdict " + verdict_name(pf.verdict) + ": " + pf.reason);
    require(pf.mismatches.empty(), "grid mismatches");
    require(pf.grid_points == points, "grid has " + std::to_string(pf.grid_points) + " points, expected " +
                                          std::to_string(points));
    CheckReport rep = check_json(to_json(pf), 6);
    require(rep.ok, "independent check rejected the certificate");
}

Rational binom(long a, long b) {
    if (b < 0 || a < 0 || b > a) return 0;
    Integer r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(a), static_cast<unsigned long>(b));
    return Rational(r);
}

Rational factorial(long a) {
    Integer r;
    mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(a));
    return Rational(r);
}

// B_0..B_upto from z / (e^z - 1): the coefficients b_j = B_j / j! solve
// sum_i b_(j-i) / (i+1)! = [j = 0].
std::vector<Rational> bernoulli_numbers(long upto) {
    std::vector<Rational> b;
    for (long j = 0; j <= upto; ++j) {
        Rational s = j == 0 ? 1 : 0;
        for (long i = 1; i <= j; ++i) s -= b[static_cast<std::size_t>(j - i)] / factorial(i + 1);
        b.push_back(s);
    }
    for (long j = 0; j <= upto; ++j) b[static_cast<std::size_t>(j)] *= factorial(j);
    return b;
}

// B_a(t) from z e^(tz) / (e^z - 1) = (z / (e^z - 1)) e^(tz).
Rational bernoulli_poly(long a, const Rational& t, const std::vector<Rational>& bn) {
    Rational s = 0, tp = 1;
    for (long j = a; j >= 0; --j) {
        s += binom(a, j) * bn[static_cast<std::size_t>(j)] * tp;
        tp *= t;
    }
    return s;
}

Rational value(const RatFunc& r) {
    require(r.is_constant(), "expected a number, got " + r.str());
    return r.num().constant_value() / r.den().constant_value();
}

// ------------------------------------------------------------- criteria

void stirling_pascal() {
    Proof pf = prove(corpus::kStirlingPascal);
    require_proved(pf, 121);
    require_operator(*pf.recurrence, {{{{n, 1}, {m, 1}}, "1"}, {{{m, 1}}, "-(m+2)"}, {{}, "-1"}});
}

void stirling_convolution() {
    Recurrence rec = derive("sum(k, binom(n,k)*S2(k,l)*S2(n-k,m))");
    // -F(n,m+1,l) - F(n,m,l+1) - (m+2+l) F(n,m+1,l+1) + F(n+1,m+1,l+1)
    require_operator(rec, {{{{m, 1}}, "-1"},
                           {{{l, 1}}, "-1"},
                           {{{m, 1}, {l, 1}}, "-(m+2+l)"},
                           {{{n, 1}, {m, 1}, {l, 1}}, "1"}});
    require(check_certificate(rec), "certificate fails the telescoping identity");
    require_proved(prove(corpus::kStirlingConvolution, {{l, 5}, {m, 5}}), 11 * 6 * 6);
}

void stirling_inverse_pair() {
    ResidueSum rs = rewrite_sum(parse_sum("sum(k, S1(k,m)*S2(n+1,k+1))"));
    auto R = gosper(shift_quotient(rs.base, k), k);
    require(R.has_value(), "no indefinite-sum certificate for the inner summand");
    require(check_certificate(rs.base, ShiftSet{FamilyMember{}}, {Poly(1)}, *R, k),
            "indefinite-sum certificate fails the telescoping identity");
    // G = F (1 - (k+1) u) / (1 - u (1 + v)), u the S2 residue variable and v
    // the S1 one, has G(k+1) - G(k) = -F, so R is the negative of G / F.
    Var u = 0, v = 0;
    for (const auto& f : rs.factors) (f.kind == SequenceKind::StirlingSecond ? u : v) = f.aux;
    RatFunc U = RatFunc::variable(u), V = RatFunc::variable(v);
    RatFunc G = (RatFunc(1) - (RatFunc::variable(k) + 1) * U) / (RatFunc(1) - U * (RatFunc(1) + V));
    require(*R == -G, "certificate " + R->str() + " differs from " + G.str());

    ExprPtr lhs = parse_sum("sum(k, S1(k,m)*S2(n+1,k+1))");
    for (long a = 0; a <= 10; ++a)
        for (long b = 0; b <= a; ++b) {
            IntPoint p = {{n, a}, {m, b}};
            require(value(eval_sum(lhs, p)) == binom(a, b), "sum differs from binom(n,m) at " + pt(p));
        }
}

void double_factorial_sum() {
    Recurrence rec = derive("sum(k=-m..n, (-1)^k*binom(2*n,n+k)*S1(n+k,k+m))");
    // 2(n+1)(2n+3) L(n,m) - (2n+3)(4n+3)/(2n+1) L(n+1,m) + L(n+2,m)
    //   + 2(n+1)(2n+3) L(n+1,m+1), times 2n+1
    require_operator(rec, {{{}, "2*(n+1)*(2*n+3)*(2*n+1)"},
                           {{{n, 1}}, "-(2*n+3)*(4*n+3)"},
                           {{{n, 2}}, "2*n+1"},
                           {{{n, 1}, {m, 1}}, "2*(n+1)*(2*n+3)*(2*n+1)"}});
    require(check_certificate(rec), "certificate fails the telescoping identity");
    for (long a = 0; a <= 10; ++a) {
        Rational dfact = 1;
        for (long j = 1; j <= 2 * a - 1; j += 2) dfact *= j;
        for (long b = 0; b <= 10; ++b) {
            IntPoint p = {{n, a}, {m, b}};
            require(value(eval_sum(rec.sum, p)) == (b == 0 ? dfact : Rational(0)), "wrong value at " + pt(p));
        }
    }
    require_proved(prove(corpus::kDoubleFactorial), 121);
}

void alternating_stirling_sum() {
    SearchOptions o;
    o.shifts = shift_range(m, 2);
    o.aux_degree = 1;
    Recurrence rec = derive("sum(k=0..n, binom(n+m,k)*(-1)^k*S2(n+m-k,n-k))", o);
    require(rec.mode == RecurrenceMode::AuxPolynomial, "expected coefficients polynomial in the residue variable");
    require_operator(rec, {{{}, "n+m+1"}, {{{m, 1}}, "-z*(m+1)"}, {{{m, 2}}, "-z"}});
    RatFunc scale = RatFunc(rec.coeffs[member_index(rec, {})]) / parse_ratfunc("n+m+1");
    require(rec.certificate / scale == parse_ratfunc("(n+m+1)*k/((n+m+1-k)*(n+m+2-k)*z)"),
            "certificate " + rec.certificate.str() + " differs from the expected one");
    require(check_certificate(rec), "certificate fails the telescoping identity");

    // Read back: (n+m+1) L(n,m) - (m+1) S(n,m) - S(n,m+1) = 0.
    require(rec.relation.size() == 3, "relation has " + std::to_string(rec.relation.size()) + " terms");
    ExprPtr L = rec.sum;
    ExprPtr S = parse_sum("sum(k=0..n, binom(n+m+1,k)*(-1)^k*S2(n+m-k,n-k))");
    ExprPtr S1 = shift_sum(S, {{m, 1}});
    const auto& c = rec.relation;
    require(RatFunc(c[1].coefficient) / RatFunc(c[0].coefficient) == parse_ratfunc("-(m+1)/(n+m+1)") &&
                RatFunc(c[2].coefficient) / RatFunc(c[0].coefficient) == parse_ratfunc("-1/(n+m+1)"),
            "relation " + rec.relation_text() + " has unexpected coefficients");
    for (long a = 0; a <= 10; ++a)
        for (long b = 0; b <= a; ++b) {
            IntPoint p = {{n, a}, {m, b}};
            require(eval_sum(c[0].sum, p) == eval_sum(L, p) && eval_sum(c[1].sum, p) == eval_sum(S, p) &&
                        eval_sum(c[2].sum, p) == eval_sum(S1, p),
                    "relation sums differ from the expected ones at " + pt(p));
            Rational s = value(eval_sum(S, p));
            require(s == ((a + b) % 2 ? -1 : 1) * factorial(b), "value differs from (-1)^(n+m) m! at " + pt(p));
            if (a >= b + 1) {
                require(eval_sum(L, p).is_zero(), "L(n,m) is not zero at " + pt(p));
                require(RatFunc(b + 1) * eval_sum(S, p) + eval_sum(S1, p) == RatFunc(),
                        "(m+1) S(n,m) + S(n,m+1) is not zero at " + pt(p));
            }
        }
}

void power_sum() {
    Proof pf = prove(corpus::kPowers);
    require_proved(pf, 121);
    require_operator(*pf.recurrence, {{{}, "-(m+1)"}, {{{m, 1}}, "-(m+1)"}, {{{n, 1}, {m, 1}}, "1"}});
}

// The operator applied to the sum vanishes with q set to each value, for
// every point whose shifted indices stay within `top`.
void require_specialized(const Recurrence& rec, long top) {
    long reach = 0;
    for (const auto& f : rec.family)
        for (const auto& [v, s] : f.shift) reach = std::max(reach, s);
    std::map<IntPoint, RatFunc> values;
    auto at = [&](const IntPoint& p) {
        auto it = values.find(p);
        if (it == values.end()) it = values.emplace(p, eval_sum(rec.sum, p)).first;
        return it->second;
    };
    for (const Rational& q0 : {Rational(2), Rational(3), Rational(1, 2)})
        for (long a = 0; a + reach <= top; ++a)
            for (long b = 0; b + reach <= top; ++b) {
                IntPoint p = {{n, a}, {m, b}};
                RatFunc total;
                for (std::size_t i = 0; i < rec.family.size(); ++i) {
                    IntPoint s = p;
                    for (const auto& [v, d] : rec.family[i].shift) s[v] += d;
                    RatFunc c = RatFunc(rec.coeffs[i]).substitute(point_substitution(p));
                    total += c.substitute(q, q0) * at(s).substitute(q, q0);
                }
                require(total.is_zero(), "operator does not vanish at " + pt(p) + " for q = " + q0.get_str());
            }
}

void q_stirling() {
    Recurrence first = derive(corpus::kQFirstSum);
    // N, M stand for q^n, q^m.
    require_operator(first, {{{}, "1"}, {{{m, 1}}, "q*(q*M-M+N-1)/(q-1)"}, {{{n, 1}, {m, 1}}, "-q"}});
    Recurrence second = derive(corpus::kQSecondSum);
    require_operator(second, {{{}, "1-q*N"},
                              {{{n, 1}}, "1"},
                              {{{m, 1}}, "(1-q*M)*(1-q*N)/(1-q)"},
                              {{{n, 1}, {m, 1}}, "(q*M-q^2+q-1)/(q-1)"},
                              {{{n, 2}, {m, 1}}, "-q"}});
    for (const Recurrence* rec : {&first, &second}) {
        require(rec->mode == RecurrenceMode::Q, "expected a q-shift recurrence");
        require(check_certificate(*rec), "certificate fails the telescoping identity");
        GridReport g = annihilates_on_grid(*rec, 6);
        require(g.ok && g.points > 0, "not annihilated over Q(q): " + g.detail);
        require_specialized(*rec, 10);
    }
}

void bernoulli_addition() {
    Recurrence rec = derive("sum(k, binom(n,k)*y^(n-k)*bernpoly(k,x))");
    require(rec.mode == RecurrenceMode::Derivative && rec.derivative == x, "expected a derivative in x");
    require_operator(rec, {{{{n, 1}}, "1", true}, {{}, "-(n+1)"}});
    require(check_certificate(rec), "certificate fails the telescoping identity");
    require_proved(prove(corpus::kBernoulliAddition), 11);

    const auto bn = bernoulli_numbers(10);
    ExprPtr lhs = parse_sum("sum(k, binom(n,k)*y^(n-k)*bernpoly(k,x))");
    const std::vector<std::pair<Rational, Rational>> points = {
        {Rational(0), Rational(1)}, {Rational(1, 2), Rational(1, 3)}, {Rational(-2), Rational(5, 7)},
        {Rational(3, 4), Rational(-1, 6)}, {Rational(7), Rational(-11, 5)}};
    for (long a = 0; a <= 10; ++a) {
        RatFunc s = eval_sum(lhs, {{n, a}});
        for (const auto& [x0, y0] : points) {
            Rational got = value(s.substitute({{x, RatFunc(x0)}, {y, RatFunc(y0)}}));
            require(got == bernoulli_poly(a, x0 + y0, bn),
                    "B_n(x+y) differs at n=" + std::to_string(a) + ", x=" + x0.get_str() + ", y=" + y0.get_str());
        }
    }
}

void bernoulli_shift() {
    ResidueSum rs = rewrite_sum(parse_sum(corpus::kBernoulliShift));
    ShiftSet box = shift_box({n, m}, 1);
    ApplicabilityReport rep = analyze_sum(rs, box);
    require(rep.verdict == Applicability::CertificateForcedZero, "expected certificate-forced-zero");
    require(rep.skeleton == parse_ratfunc("-(k-m-n-2)/(k+1-m)"), "skeleton " + rep.skeleton.str());
    const Poly A = parse_ratfunc("m+n+2-k").num();
    require(rep.gp.A == A || rep.gp.A == -A, "GP numerator " + rep.gp.A.str());
    // Coefficients free of the residue variable, as in the recurrence search.
    TelescopeOptions free;
    for (Var v : rs.aux) free.free_of |= mask_of(v);
    auto ez = extended_zeilberger(rs.base, box, k, free);
    require(!ez || ez->certificate.is_zero(), "telescoping found a nonzero certificate");

    Recurrence rec = derive(corpus::kBernoulliShift);
    require(rec.route == Route::SisterCeline, "expected the sister-celine route");
    require_operator(rec, {{{}, "1"}, {{{m, 1}}, "1"}, {{{n, 1}}, "-1"}});
    require(check_certificate(rec), "certificate fails the telescoping identity");

    const auto bn = bernoulli_numbers(22);
    auto L = [&](long a, long b) {
        Rational s = 0;
        for (long j = b; j <= a + b; ++j) s += binom(a, j - b) * bn[static_cast<std::size_t>(j)];
        return s;
    };
    for (long a = 0; a <= 10; ++a)
        for (long b = 0; b <= 10; ++b) {
            IntPoint p = {{n, a}, {m, b}};
            require(value(eval_sum(rec.sum, p)) == L(a, b), "sum differs from the series oracle at " + pt(p));
            require(L(a, b) + L(a, b + 1) - L(a + 1, b) == 0, "recurrence fails at " + pt(p));
        }
}

void property_suites() {
    // Every emitted certificate is exact; single-coefficient mutations are not.
    for (const auto& rec : emitted) require(check_certificate(rec), "emitted certificate fails: " + render(rec.sum));
    std::mt19937 rng(17);
    std::uniform_int_distribution<int> delta(-5, 5);
    const std::vector<Var> vars = {n, m, k};
    for (int i = 0; i < 100; ++i) {
        Recurrence rec = emitted[rng() % emitted.size()];
        std::size_t j = rng() % rec.coeffs.size();
        int d = delta(rng);
        if (d == 0) d = 1;
        Poly bump(d);
        if (rng() % 2) bump *= Poly::variable(vars[rng() % vars.size()]);
        rec.coeffs[j] += bump;
        require(!check_certificate(rec), "mutated certificate accepted: " + render(rec.sum));
    }

    // Residues of the catalogued kernels against the sequence oracles.
    const LinExpr A = LinExpr::variable(n), B = LinExpr::variable(m);
    for (const auto& e : catalog()) {
        for (long a = 0; a <= 12; ++a) {
            if (e.kind == SequenceKind::BernoulliNumber || e.kind == SequenceKind::BernoulliPoly) {
                for (const RatFunc& xv : {RatFunc::variable(x), RatFunc(Rational(2, 3))}) {
                    RatFunc r = residue_value(residue_rep(e.kind, {A}, z, xv), {{n, a}}, {z});
                    require(r == eval_sequence(e.kind, {a}, xv), e.signature + " at a=" + std::to_string(a));
                }
                continue;
            }
            for (long b = 0; b <= 12; ++b) {
                // c^e needs a base that depends on the summation variable.
                std::vector<LinExpr> idx = {e.kind == SequenceKind::PowerSeq ? LinExpr::variable(k) : A, B};
                IntPoint p = {{e.kind == SequenceKind::PowerSeq ? k : n, a}, {m, b}};
                RatFunc r = residue_value(residue_rep(e.kind, idx, z), p, {z});
                require(r == eval_sequence(e.kind, {a, b}), e.signature + " at " + pt(p));
            }
        }
    }

    // Gosper-Petkovsek forms recompose to the input.
    std::uniform_int_distribution<int> c(-6, 6), count(0, 3), shape(0, 3);
    auto factor = [&]() {
        Poly K = Poly::variable(k);
        switch (shape(rng)) {
            case 0: return K + Poly(c(rng));
            case 1: return K + Poly::variable(n) + Poly(c(rng));
            case 2: return K * K + Poly(c(rng)) * K + Poly(5);
            default: return K * Rational(3) + Poly(3 * c(rng) + 1);
        }
    };
    for (int i = 0; i < 200; ++i) {
        Poly num(c(rng) == 0 ? 2 : c(rng)), den(1);
        if (num.is_zero()) num = Poly(1);
        for (int j = count(rng); j > 0; --j) num *= factor();
        for (int j = count(rng); j > 0; --j) den *= factor();
        RatFunc r(num, den);
        require(gp_recompose(gosper_normal_form(r, k), k) == r, "recomposition fails for " + r.str());
    }

    // Certificates are byte-identical across runs.
    for (const auto& id : {corpus::kStirlingPascal, corpus::kPowers, corpus::kBernoulliAddition}) {
        ProveOptions o;
        o.grid_max = 6;
        require(to_json(prove_identity(id, o)).dump() == to_json(prove_identity(id, o)).dump(),
                "nondeterministic output for " + id);
    }
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void()>>> criteria = {
        {"binomial Stirling sum: operator, certificate, grid 0..10", stirling_pascal},
        {"Stirling convolution: operator and grid", stirling_convolution},
        {"Stirling inverse pair: indefinite-sum certificate and grid", stirling_inverse_pair},
        {"double factorial sum: operator and values", double_factorial_sum},
        {"alternating Stirling sum: aux-polynomial operator, relation, values", alternating_stirling_sum},
        {"power sum k^n: operator and grid", power_sum},
        {"q-Stirling sums: operators over Q(q) and at q = 2, 3, 1/2", q_stirling},
        {"Bernoulli addition theorem: derivative operator and rational points", bernoulli_addition},
        {"Bernoulli shift sum: applicability, sister-celine, values", bernoulli_shift},
        {"property suites: mutations, oracles, GP forms, determinism", property_suites},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        auto start = std::chrono::steady_clock::now();
        std::string problem;
        try {
            criteria[i].second();
        } catch (const std::exception& e) {
            problem = e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failed += !problem.empty();
        std::printf("%s %2zu %s (%.2f s)%s%s\n", problem.empty() ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    secs, problem.empty() ? "" : ": ", problem.c_str());
    }
    return failed ? 1 : 0;
}
