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

#include "rt/prover.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <set>

namespace rt {

// ------------------------------------------------------------ evaluation

namespace {

// value * eps^(-ord): ord > 0 is a pole, ord < 0 a zero of that order.
// Gamma-function limits give 1/(-j-1)! its first-order zero.
struct Val {
    RatFunc v;
    int ord = 0;

    bool exact_zero() const { return v.is_zero(); }
};

Val mul(const Val& a, const Val& b) {
    if (a.exact_zero() || b.exact_zero()) {
        if ((a.exact_zero() && b.ord > 0) || (b.exact_zero() && a.ord > 0))
            throw AlgebraError("indeterminate 0/0 form");
        return {};
    }
    return {a.v * b.v, a.ord + b.ord};
}

Val inv(const Val& a) {
    if (a.exact_zero()) throw AlgebraError("division by zero");
    return {a.v.inverse(), -a.ord};
}

Val add(const Val& a, const Val& b) {
    if (a.exact_zero()) return b;
    if (b.exact_zero()) return a;
    if (a.ord != b.ord) return a.ord > b.ord ? a : b;
    Val r{a.v + b.v, a.ord};
    if (r.v.is_zero() && r.ord > 0) throw AlgebraError("indeterminate sum of poles");
    return r;
}

RatFunc finite(const Val& a) {
    if (a.exact_zero() || a.ord < 0) return RatFunc();
    if (a.ord > 0) throw AlgebraError("pole");
    return a.v;
}

Rational factorial(long n) {
    Integer f = 1;
    for (long i = 2; i <= n; ++i) f *= i;
    return Rational(f);
}

long index_value(const ExprPtr& e, const IntPoint& p) {
    auto l = to_linexpr(e);
    if (!l) throw AlgebraError("non-linear index expression '" + render(e) + "'");
    for (const auto& [v, c] : l->terms())
        if (!p.count(v)) throw AlgebraError(std::string("no value for ") + var_name(v));
    return l->eval(p);
}

RatFunc binomial(long a, long b) {
    if (b < 0 || (a >= 0 && b > a)) return RatFunc();
    Rational r = 1;
    for (long i = 0; i < b; ++i) r = r * Rational(a - i) / Rational(i + 1);
    return RatFunc(r);
}

RatFunc qbinomial(long a, long b) {
    if (b < 0 || (a >= 0 && b > a)) return RatFunc();
    RatFunc r(1);
    for (long i = 0; i < b; ++i) r = r * q_bracket(a - i) / q_bracket(i + 1);
    return r;
}

RatFunc double_factorial(long a) {
    if (a >= -1) {
        Rational r = 1;
        for (long i = a; i > 1; i -= 2) r *= i;
        return RatFunc(r);
    }
    // a!! = (a + 2)!! / (a + 2)
    if (a % 2 == 0) throw AlgebraError("pole of dfact at " + std::to_string(a));
    return double_factorial(a + 2) * RatFunc(Rational(1) / Rational(a + 2));
}

Val eval_val(const ExprPtr& e, const IntPoint& p);

Val power_val(const ExprPtr& base, const ExprPtr& exp, const IntPoint& p) {
    long n = index_value(exp, p);
    Val b = eval_val(base, p);
    if (n == 0) return {RatFunc(1), 0};
    if (n < 0) b = inv(b);
    Val r{RatFunc(1), 0};
    for (long i = 0; i < std::abs(n); ++i) r = mul(r, b);
    return r;
}

Val eval_call(const ExprPtr& e, const IntPoint& p) {
    const std::string& f = e->name;
    auto idx = [&](std::size_t i) { return index_value(e->args[i], p); };
    if (f == "pow") return power_val(e->args[0], e->args[1], p);
    if (f == "binom") return {binomial(idx(0), idx(1)), 0};
    if (f == "qbinom") return {qbinomial(idx(0), idx(1)), 0};
    if (f == "fact") {
        long a = idx(0);
        if (a >= 0) return {RatFunc(factorial(a)), 0};
        long j = -a - 1;  // Gamma(-j + eps) ~ (-1)^j / (j! eps)
        return {RatFunc(Rational(j % 2 ? -1 : 1) / factorial(j)), 1};
    }
    if (f == "dfact") return {double_factorial(idx(0)), 0};
    if (f == "bernpoly") {
        RatFunc x = finite(eval_val(e->args[1], p));
        return {eval_sequence(SequenceKind::BernoulliPoly, {idx(0)}, x), 0};
    }
    auto kind = sequence_kind(f);
    if (!kind) throw AlgebraError("unknown function '" + f + "'");
    std::vector<long> ix;
    for (std::size_t i = 0; i < e->args.size(); ++i) ix.push_back(idx(i));
    return {eval_sequence(*kind, ix), 0};
}

Val eval_val(const ExprPtr& e, const IntPoint& p) {
    switch (e->kind) {
        case ExprKind::Int:
            return {RatFunc(Rational(e->value)), 0};
        case ExprKind::Symbol: {
            Var v = var(e->name);
            auto it = p.find(v);
            if (it != p.end()) return {RatFunc(it->second), 0};
            return {RatFunc::variable(v), 0};
        }
        case ExprKind::Neg: {
            Val a = eval_val(e->args[0], p);
            return {-a.v, a.ord};
        }
        case ExprKind::Add:
            return add(eval_val(e->args[0], p), eval_val(e->args[1], p));
        case ExprKind::Sub: {
            Val b = eval_val(e->args[1], p);
            return add(eval_val(e->args[0], p), {-b.v, b.ord});
        }
        case ExprKind::Mul:
            return mul(eval_val(e->args[0], p), eval_val(e->args[1], p));
        case ExprKind::Div:
            return mul(eval_val(e->args[0], p), inv(eval_val(e->args[1], p)));
        case ExprKind::Pow:
            return power_val(e->args[0], e->args[1], p);
        case ExprKind::Call:
            return eval_call(e, p);
        case ExprKind::Sum:
            return {eval_sum(e, p), 0};
    }
    return {};
}

std::string point_str(const IntPoint& p) {
    std::string s = "(";
    for (const auto& [v, x] : p) s += std::string(s.size() > 1 ? ", " : "") + var_name(v) + "=" + std::to_string(x);
    return s + ")";
}

}  // namespace

RatFunc eval_expr(const ExprPtr& e, const IntPoint& point) { return finite(eval_val(e, point)); }

RatFunc eval_sum(const ExprPtr& sum, const IntPoint& point) {
    const Var k = var(sum->name);
    auto [lo, hi] = summation_range(sum, point);
    RatFunc s;
    IntPoint p = point;
    for (long j = lo; j <= hi; ++j) {
        p[k] = j;
        s += eval_expr(sum->body(), p);
    }
    return s;
}

RatFunc eval_rhs(const Identity& id, const IntPoint& point) {
    if (id.when && !holds(*id.when, point)) return eval_expr(id.otherwise, point);
    return eval_expr(id.rhs, point);
}

ExprPtr normalize_indices(const ExprPtr& e) {
    if (!e) return e;
    auto lin = [](const ExprPtr& a) {
        auto l = to_linexpr(a);
        return l ? from_linexpr(*l) : normalize_indices(a);
    };
    auto out = std::make_shared<Expr>(*e);
    if (e->kind == ExprKind::Call) {
        for (std::size_t i = 0; i < out->args.size(); ++i)
            out->args[i] = (e->name == "bernpoly" && i == 1) ? normalize_indices(e->args[i]) : lin(e->args[i]);
    } else if (e->kind == ExprKind::Pow) {
        out->args[0] = normalize_indices(e->args[0]);
        out->args[1] = lin(e->args[1]);
    } else if (e->kind == ExprKind::Sum) {
        if (e->has_range()) {
            out->args[0] = lin(e->args[0]);
            out->args[1] = lin(e->args[1]);
        }
        out->args[2] = normalize_indices(e->args[2]);
    } else {
        for (auto& a : out->args) a = normalize_indices(a);
    }
    return out;
}

ExprPtr shift_sum(const ExprPtr& sum, const std::map<Var, long>& shift) {
    ExprPtr s = sum;
    for (const auto& [v, d] : shift)
        if (d != 0) s = substitute(s, v, from_linexpr(LinExpr::variable(v) + d));
    return normalize_indices(s);
}

// ------------------------------------------------------------ recurrences

std::string mode_name(RecurrenceMode m) {
    switch (m) {
        case RecurrenceMode::Ordinary:
            return "ordinary";
        case RecurrenceMode::Q:
            return "q";
        case RecurrenceMode::Derivative:
            return "derivative";
        case RecurrenceMode::AuxPolynomial:
            return "aux-polynomial";
    }
    return "ordinary";
}

SearchExhausted::SearchExhausted(std::vector<std::string> searched)
    : std::runtime_error("no recurrence found in " + std::to_string(searched.size()) + " shift set(s)"),
      searched_(std::move(searched)) {}

std::vector<Var> Recurrence::params() const {
    std::vector<Var> out;
    for (Var v = 0; v < kNumVars; ++v)
        if (rs.params & mask_of(v)) out.push_back(v);
    return out;
}

namespace {

std::string member_text(const FamilyMember& m, const std::vector<Var>& params, const std::string& name) {
    std::string s = name + "(";
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto it = m.shift.find(params[i]);
        std::string e = (LinExpr::variable(params[i]) + (it == m.shift.end() ? 0 : it->second)).str();
        e.erase(std::remove(e.begin(), e.end(), ' '), e.end());
        s += (i ? "," : "") + e;
    }
    return s + ")";
}

std::string scaled_term(const Poly& c, const std::string& t) {
    if (c.is_one()) return t;
    if ((-c).is_one()) return "-" + t;
    std::string cs = c.str();
    if (c.is_constant()) return cs + "*" + t;
    return "(" + cs + ")*" + t;
}

std::string join_terms(const std::vector<std::string>& terms) {
    std::string s;
    for (const auto& t : terms) {
        if (s.empty())
            s = t;
        else if (t[0] == '-')
            s += " - " + t.substr(1);
        else
            s += " + " + t;
    }
    return s.empty() ? "0" : s;
}

std::string family_text(const ShiftSet& fam, const std::vector<Var>& params, const std::vector<bool>& diff,
                         Var dx) {
    std::string s = "{";
    for (std::size_t i = 0; i < fam.size(); ++i) {
        s += i ? ", " : "";
        if (i < diff.size() && diff[i]) s += std::string("D_") + var_name(dx) + " ";
        s += member_text(fam[i], params, "F");
    }
    return s + "}";
}

}  // namespace

std::string Recurrence::operator_text(const std::string& name) const {
    std::vector<std::string> terms;
    auto ps = params();
    for (std::size_t i = 0; i < family.size(); ++i) {
        if (coeffs[i].is_zero()) continue;
        std::string t = member_text(family[i], ps, name);
        if (i < differentiated.size() && differentiated[i]) t = std::string("D_") + var_name(*derivative) + " " + t;
        terms.push_back(scaled_term(coeffs[i], t));
    }
    return join_terms(terms);
}

std::string Recurrence::relation_text() const {
    std::vector<std::string> terms;
    for (const auto& r : relation) terms.push_back(scaled_term(r.coefficient, render(r.sum)));
    return join_terms(terms);
}

std::vector<ShiftSet> search_families(const std::vector<Var>& params) {
    std::vector<ShiftSet> out;
    if (params.size() == 1) {
        for (long d = 1; d <= 4; ++d) out.push_back(shift_range(params[0], d));
        return out;
    }
    out.push_back(shift_box(params, 1));
    for (Var v : params) out.push_back(shift_box_wide(params, v));
    if (params.size() <= 2) out.push_back(shift_box(params, 2));
    return out;
}

RatFunc derivative_multiplier(const HyperTerm& t, Var x) {
    RatFunc mu = t.prefactor().derivative(x) / t.prefactor();
    for (const auto& [a, m] : t.atoms()) {
        if (a.is_opaque()) {
            mu += RatFunc(m) * a.derivative_multiplier(x);
            continue;
        }
        if (a.symbol_vars() & mask_of(x))
            throw AlgebraError("cannot differentiate " + a.str() + " with respect to " + var_name(x));
    }
    return mu;
}

namespace {

std::optional<Var> derivative_variable(const HyperTerm& base) {
    VarMask m = 0;
    for (const auto& [a, mult] : base.atoms())
        if (a.kind == AtomKind::ExpLinear) m |= a.base.vars();
    for (Var v = 0; v < kNumVars; ++v)
        if (m & mask_of(v)) return v;
    return std::nullopt;
}

VarMask aux_mask(const ResidueSum& rs) {
    VarMask m = 0;
    for (Var a : rs.aux) m |= mask_of(a);
    return m;
}

RecurrenceMode shift_mode_of(const ResidueSum& rs, const ShiftSet& family) {
    auto ratios = family_ratios(rs.base, family);
    ratios.push_back(shift_quotient(rs.base, rs.k));
    return detect_shift_mode(ratios, rs.k) == ShiftMode::Q ? RecurrenceMode::Q : RecurrenceMode::Ordinary;
}

void fill_relation(Recurrence& rec) {
    const Var z = rec.rs.aux.front();
    for (std::size_t i = 0; i < rec.family.size(); ++i) {
        if (rec.coeffs[i].is_zero()) continue;
        ExprPtr shifted = shift_sum(rec.sum, rec.family[i].shift);
        auto cs = rec.coeffs[i].coefficients_in(z);
        for (std::size_t j = 0; j < cs.size(); ++j) {
            if (cs[j].is_zero()) continue;
            ExprPtr body = absorb_aux_power(rec.rs, shifted->body(), z, static_cast<long>(j));
            ExprPtr s = Expr::sum(shifted->name, shifted->args[0], shifted->args[1], body);
            rec.relation.push_back({cs[j], normalize_indices(s)});
        }
    }
}

}  // namespace

constexpr long kSearchGrid = 4;

Recurrence derive_recurrence(const ExprPtr& sum, const SearchOptions& opts) {
    Recurrence rec;
    rec.sum = sum;
    rec.rs = rewrite_sum(sum);
    const auto params = rec.params();
    if (params.empty()) throw AlgebraError("the sum has no discrete parameters");
    const Var k = rec.rs.k;
    const VarMask auxm = aux_mask(rec.rs);

    std::optional<Var> dx;
    if (!opts.shifts && opts.aux_degree == 0) dx = derivative_variable(rec.rs.base);
    if (opts.aux_degree > 0 && rec.rs.aux.size() != 1)
        throw AlgebraError("aux-polynomial coefficients need exactly one residue variable");

    // Candidate families, with the members differentiated in derivative mode.
    std::vector<std::pair<ShiftSet, std::vector<bool>>> families;
    if (opts.shifts) {
        families.push_back({*opts.shifts, std::vector<bool>(opts.shifts->size(), false)});
    } else if (dx) {
        for (long d = 1; d <= 3; ++d) {
            ShiftSet f = {{{{params[0], d}}, RatFunc(1)}};
            std::vector<bool> diff = {true};
            for (long j = 0; j < d; ++j) {
                f.push_back({{{params[0], j}}, RatFunc(1)});
                diff.push_back(false);
            }
            families.push_back({f, diff});
        }
    } else {
        for (auto& f : search_families(params)) families.push_back({f, std::vector<bool>(f.size(), false)});
    }

    for (auto& [family, diff] : families) {
        for (std::size_t i = 0; i < family.size(); ++i)
            if (diff[i]) family[i].multiplier = derivative_multiplier(family[i].apply(rec.rs.base), *dx);
        rec.searched.push_back(family_text(family, params, diff, dx.value_or(0)));

        if (!dx && opts.aux_degree == 0) {
            auto rep = analyze_sum(rec.rs, family);
            if (rep.verdict == Applicability::CertificateForcedZero) {
                auto basis = sister_celine(rec.rs.base, family, k, auxm);
                if (basis.empty()) continue;
                rec.family = family;
                rec.differentiated = diff;
                rec.coeffs = basis.front();
                rec.certificate = RatFunc();
                rec.route = Route::SisterCeline;
                rec.mode = shift_mode_of(rec.rs, family);
                rec.applicability = rep;
                return rec;
            }
            rec.applicability = rep;
        }

        TelescopeOptions o;
        o.free_of = auxm;
        if (opts.aux_degree > 0) {
            o.aux_poly = rec.rs.aux.front();
            o.aux_degree = opts.aux_degree;
            o.free_of = auxm & ~mask_of(*o.aux_poly);
        }
        auto res = extended_zeilberger(rec.rs.base, family, k, o);
        if (!res) continue;
        rec.family = family;
        rec.differentiated = diff;
        rec.coeffs = res->coeffs;
        rec.certificate = res->certificate;
        rec.route = Route::ExtendedZeilberger;
        if (dx) {
            rec.mode = RecurrenceMode::Derivative;
            rec.derivative = dx;
        } else if (opts.aux_degree > 0) {
            rec.mode = RecurrenceMode::AuxPolynomial;
            fill_relation(rec);
        } else {
            rec.mode = res->mode == ShiftMode::Q ? RecurrenceMode::Q : RecurrenceMode::Ordinary;
        }
        // A telescoper gives a recurrence only when its boundary terms vanish.
        if (recurrence_boundary(rec, kSearchGrid).verdict == BoundaryVerdict::Unknown) {
            rec.searched.back() += " (rejected: boundary terms do not vanish)";
            rec.relation.clear();
            rec.derivative.reset();
            continue;
        }
        return rec;
    }
    throw SearchExhausted(rec.searched);
}

bool check_certificate(const HyperTerm& base, const ShiftSet& family, const std::vector<Poly>& coeffs,
                       const RatFunc& certificate, Var k) {
    if (coeffs.size() != family.size()) return false;
    if (std::all_of(coeffs.begin(), coeffs.end(), [](const Poly& p) { return p.is_zero(); })) return false;
    try {
        return check_core_identity(shift_quotient(base, k), family_ratios(base, family), coeffs, certificate, k);
    } catch (const AlgebraError&) {
        return false;
    }
}

bool check_certificate(const Recurrence& rec) {
    return check_certificate(rec.rs.base, rec.family, rec.coeffs, rec.certificate, rec.rs.k);
}

namespace {

// All points of the box 0..bound(v) over the variables, in lexicographic order.
std::vector<IntPoint> grid_points(const std::vector<Var>& vars, const std::map<Var, long>& bounds, long dflt) {
    std::vector<IntPoint> out;
    IntPoint cur;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == vars.size()) {
            out.push_back(cur);
            return;
        }
        auto it = bounds.find(vars[i]);
        long b = it == bounds.end() ? dflt : it->second;
        for (long x = 0; x <= b; ++x) {
            cur[vars[i]] = x;
            rec(i + 1);
        }
    };
    rec(0);
    return out;
}

IntPoint shifted_point(const IntPoint& p, const FamilyMember& m) {
    IntPoint q = p;
    for (const auto& [v, s] : m.shift) q[v] += s;
    return q;
}

RatFunc at(const Poly& c, const IntPoint& p) { return RatFunc(c).substitute(point_substitution(p)); }

class SumCache {
public:
    explicit SumCache(ExprPtr sum) : sum_(std::move(sum)) {}
    std::optional<RatFunc> operator()(const IntPoint& p) {
        auto it = cache_.find(p);
        if (it != cache_.end()) return it->second;
        std::optional<RatFunc> v;
        try {
            v = eval_sum(sum_, p);
        } catch (const AlgebraError&) {
        }
        cache_[p] = v;
        return v;
    }

private:
    ExprPtr sum_;
    std::map<IntPoint, std::optional<RatFunc>> cache_;
};

}  // namespace

BoundaryEvidence recurrence_boundary(const Recurrence& rec, long grid_max) {
    const Var k = rec.rs.k;
    std::vector<BoundaryProbe> probes;
    std::string truncation;
    for (const auto& p : grid_points(rec.params(), {}, grid_max)) {
        std::optional<long> lo, hi;
        std::vector<std::pair<long, long>> ranges;
        for (const auto& m : rec.family) {
            std::pair<long, long> r;
            try {
                r = summation_range(rec.sum, shifted_point(p, m));
            } catch (const AlgebraError&) {
                r = {0, -1};
            }
            ranges.push_back(r);
            if (r.first > r.second) continue;
            lo = lo ? std::min(*lo, r.first) : r.first;
            hi = hi ? std::max(*hi, r.second) : r.second;
        }
        if (!lo) continue;
        probes.push_back({p, *lo, *hi + 1});
        // With explicit bounds every member must vanish on the rest of the window.
        if (!rec.sum->has_range() || !truncation.empty()) continue;
        for (std::size_t i = 0; i < rec.family.size() && truncation.empty(); ++i) {
            IntPoint q = shifted_point(p, rec.family[i]);
            for (long j = *lo; j <= *hi && truncation.empty(); ++j) {
                if (j >= ranges[i].first && j <= ranges[i].second) continue;
                q[k] = j;
                try {
                    if (!eval_expr(rec.sum->body(), q).is_zero())
                        truncation = "the explicit range truncates a nonzero summand at " + point_str(q);
                } catch (const AlgebraError&) {
                }
            }
        }
    }
    if (!truncation.empty()) return {BoundaryVerdict::Unknown, truncation};
    return boundary_vanishes(rec.rs.base, rec.certificate, k, probes, rec.rs.aux);
}

GridReport annihilates_on_grid(const Recurrence& rec, long grid_max) {
    GridReport rep;
    const auto params = rec.params();
    SumCache main(rec.sum);
    std::vector<SumCache> terms;
    for (const auto& r : rec.relation) terms.emplace_back(r.sum);
    for (const auto& p : grid_points(params, {}, grid_max)) {
        RatFunc total;
        bool skip = false;
        if (rec.mode == RecurrenceMode::AuxPolynomial) {
            for (std::size_t i = 0; i < rec.relation.size() && !skip; ++i) {
                auto v = terms[i](p);
                if (!v) skip = true;
                else total += at(rec.relation[i].coefficient, p) * *v;
            }
        } else {
            for (std::size_t i = 0; i < rec.family.size() && !skip; ++i) {
                if (rec.coeffs[i].is_zero()) continue;
                auto v = main(shifted_point(p, rec.family[i]));
                if (!v) {
                    skip = true;
                    continue;
                }
                RatFunc x = *v;
                if (i < rec.differentiated.size() && rec.differentiated[i]) x = x.derivative(*rec.derivative);
                total += at(rec.coeffs[i], p) * x;
            }
        }
        if (skip) continue;
        ++rep.points;
        if (!total.is_zero() && rep.ok) {
            rep.ok = false;
            rep.detail = "operator applied to the sum is " + total.str() + " at " + point_str(p);
        }
    }
    if (rep.ok) rep.detail = "vanishes at " + std::to_string(rep.points) + " grid points";
    return rep;
}

// ----------------------------------------------------------------- proofs

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Proved:
            return "proved";
        case Verdict::Refuted:
            return "refuted";
        case Verdict::Inconclusive:
            return "inconclusive";
    }
    return "inconclusive";
}

int exit_code(Verdict v) {
    switch (v) {
        case Verdict::Proved:
            return 0;
        case Verdict::Refuted:
            return 2;
        case Verdict::Inconclusive:
            return 3;
    }
    return 3;
}

long grid_max_from_env() {
    const char* s = std::getenv("RT_GRID_MAX");
    if (!s || !*s) return 10;
    char* end = nullptr;
    long v = std::strtol(s, &end, 10);
    return (end && *end == '\0' && v > 0) ? v : 10;
}

namespace {

bool in_domain(const Identity& id, const IntPoint& p) {
    for (const auto& [v, x] : p)
        if (x < 0) return false;
    return !id.domain || holds(*id.domain, p);
}

// Symbolic check that the operator annihilates a residue kernel of the right
// side; nullopt when the right side has no such kernel.
std::optional<bool> rhs_symbolic(const Recurrence& rec, const Identity& id) {
    if (id.when || rec.mode == RecurrenceMode::Derivative || rec.mode == RecurrenceMode::AuxPolynomial)
        return std::nullopt;
    const VarMask used = free_vars(id.rhs);
    std::string dummy;
    for (char c : std::string("kjih"))
        if (!(used & mask_of(var(std::string(1, c))))) {
            dummy = std::string(1, c);
            break;
        }
    try {
        ResidueSum r = rewrite_sum(Expr::sum(dummy, nullptr, nullptr, id.rhs));
        RatFunc total;
        for (std::size_t i = 0; i < rec.family.size(); ++i) {
            if (rec.coeffs[i].is_zero()) continue;
            auto ratio = similar_ratio(rec.family[i].apply(r.base), r.base);
            if (!ratio) return std::nullopt;
            total += RatFunc(rec.coeffs[i]) * *ratio;
        }
        if (total.is_zero()) return true;
    } catch (const AlgebraError&) {
    }
    return std::nullopt;
}

}  // namespace

Proof prove_identity(const std::string& text, const ProveOptions& opts) {
    Proof pf;
    pf.text = text;
    pf.grid_max = opts.grid_max;
    pf.identity = parse_identity(text);
    const Identity& id = pf.identity;

    std::vector<std::string> problems;
    try {
        pf.recurrence = derive_recurrence(id.lhs, opts.search);
    } catch (const SearchExhausted& e) {
        std::string s = std::string(e.what()) + ": ";
        for (std::size_t i = 0; i < e.searched().size(); ++i) s += (i ? "; " : "") + e.searched()[i];
        problems.push_back(s);
    } catch (const AlgebraError& e) {
        problems.push_back(std::string("recurrence derivation failed: ") + e.what());
    }

    std::vector<Var> params;
    if (pf.recurrence) {
        params = pf.recurrence->params();
    } else {
        VarMask m = index_vars(id.lhs) & ~mask_of(var(id.lhs->name));
        for (Var v = 0; v < kNumVars; ++v)
            if (m & mask_of(v)) params.push_back(v);
    }

    // Values on the grid.
    std::map<IntPoint, ValueCheck> values;
    std::string eval_failure;
    for (const auto& p : grid_points(params, opts.grid_bounds, opts.grid_max)) {
        if (!in_domain(id, p)) continue;
        try {
            ValueCheck v{p, eval_sum(id.lhs, p), eval_rhs(id, p)};
            ++pf.grid_points;
            if (!v.match()) pf.mismatches.push_back(v);
            values[p] = v;
        } catch (const AlgebraError& e) {
            if (eval_failure.empty()) eval_failure = "evaluation failed at " + point_str(p) + ": " + e.what();
        }
    }
    if (!eval_failure.empty()) problems.push_back(eval_failure);

    if (pf.recurrence) {
        const Recurrence& rec = *pf.recurrence;
        pf.certificate_ok = check_certificate(rec);
        if (!pf.certificate_ok) problems.push_back("certificate fails the core identity");
        pf.boundary = recurrence_boundary(rec, opts.grid_max);
        if (pf.boundary.verdict == BoundaryVerdict::Unknown)
            problems.push_back("boundary terms not shown to vanish: " + pf.boundary.witness);
        pf.annihilation = annihilates_on_grid(rec, opts.grid_max);
        if (!pf.annihilation.ok) problems.push_back("derived operator: " + pf.annihilation.detail);

        // The right side satisfies the operator.
        long max_shift = 0;
        for (const auto& m : rec.family)
            for (const auto& [v, s] : m.shift) max_shift = std::max(max_shift, s);
        if (auto sym = rhs_symbolic(rec, id); sym && *sym) {
            pf.rhs = {"symbolic", true, "the operator annihilates the residue kernel of the right side"};
        } else if (rec.mode == RecurrenceMode::AuxPolynomial) {
            pf.rhs = {"grid", false, "aux-polynomial operators relate several sums; no right-side check"};
        } else {
            pf.rhs.method = "grid";
            std::map<IntPoint, RatFunc> rv;
            auto rhs_at = [&](const IntPoint& p) {
                auto it = rv.find(p);
                if (it != rv.end()) return it->second;
                return rv[p] = eval_rhs(id, p);
            };
            std::size_t n = 0;
            std::string bad;
            try {
                for (const auto& p : grid_points(params, opts.grid_bounds, opts.grid_max)) {
                    bool ok = in_domain(id, p);
                    for (const auto& m : rec.family) ok = ok && in_domain(id, shifted_point(p, m));
                    if (!ok) continue;
                    RatFunc total;
                    for (std::size_t i = 0; i < rec.family.size(); ++i) {
                        if (rec.coeffs[i].is_zero()) continue;
                        RatFunc x = rhs_at(shifted_point(p, rec.family[i]));
                        if (i < rec.differentiated.size() && rec.differentiated[i])
                            x = x.derivative(*rec.derivative);
                        total += at(rec.coeffs[i], p) * x;
                    }
                    ++n;
                    if (!total.is_zero() && bad.empty()) bad = "operator applied to the right side is nonzero at " + point_str(p);
                }
            } catch (const AlgebraError& e) {
                bad = std::string("right side evaluation failed: ") + e.what();
            }
            if (opts.grid_max < max_shift + 3) bad = "grid too small for the operator order";
            pf.rhs.passed = bad.empty() && n > 0;
            pf.rhs.detail = bad.empty() ? "operator vanishes on the right side at " + std::to_string(n) + " grid points"
                                        : bad;
        }
        if (!pf.rhs.passed) problems.push_back("right side check failed: " + pf.rhs.detail);

        // Initial values: points the recurrence cannot reach from smaller ones.
        if (rec.mode == RecurrenceMode::Derivative) {
            // The derivative fixes each value up to its constant term in x.
            for (const auto& [p, v] : values) {
                IntPoint p0 = p;
                p0[*rec.derivative] = 0;
                try {
                    pf.initial_values.push_back({p0, eval_sum(id.lhs, p0), eval_rhs(id, p0)});
                } catch (const AlgebraError& e) {
                    problems.push_back("initial value failed at " + point_str(p0) + ": " + e.what());
                }
            }
        } else if (rec.mode != RecurrenceMode::AuxPolynomial) {
            std::size_t lead = rec.family.size();
            for (std::size_t i : lex_descending(rec.family))
                if (!rec.coeffs[i].is_zero()) {
                    lead = i;
                    break;
                }
            // Every point with some coordinate below the operator's reach in
            // that parameter, or where the recurrence cannot be solved for
            // the leading member.
            std::map<Var, long> reach;
            for (std::size_t i = 0; i < rec.family.size(); ++i)
                if (!rec.coeffs[i].is_zero())
                    for (const auto& [v, d] : rec.family[i].shift) reach[v] = std::max(reach[v], d);
            for (const auto& [p, v] : values) {
                bool initial = false;
                for (const auto& [v_, d] : reach) initial = initial || p.at(v_) < d;
                IntPoint b = p;
                for (const auto& [v_, d] : rec.family[lead].shift) b[v_] -= d;
                for (const auto& mem : rec.family) initial = initial || !in_domain(id, shifted_point(b, mem));
                if (!initial) {
                    try {
                        initial = at(rec.coeffs[lead], b).is_zero();
                    } catch (const AlgebraError&) {
                        initial = true;
                    }
                }
                if (initial) pf.initial_values.push_back(v);
            }
        }
        for (const auto& v : pf.initial_values)
            if (!v.match()) problems.push_back("initial value mismatch at " + point_str(v.point));
    }

    if (!pf.mismatches.empty()) {
        const auto& m = pf.mismatches.front();
        pf.verdict = Verdict::Refuted;
        pf.reason = "left side " + m.lhs.str() + " differs from right side " + m.rhs.str() + " at " +
                    point_str(m.point) + " (" + std::to_string(pf.mismatches.size()) + " mismatching point(s))";
    } else if (problems.empty()) {
        pf.verdict = Verdict::Proved;
        pf.reason = "certificate verified, boundary terms vanish, and " + std::to_string(pf.initial_values.size()) +
                    " initial value(s) agree";
    } else {
        pf.verdict = Verdict::Inconclusive;
        pf.reason = problems.front();
        for (std::size_t i = 1; i < problems.size(); ++i) pf.reason += "; " + problems[i];
    }
    return pf;
}

// ------------------------------------------------------------------- JSON

namespace {

Json point_json(const IntPoint& p) {
    Json j = Json::object();
    for (const auto& [v, x] : p) j[std::string(1, var_name(v))] = x;
    return j;
}

IntPoint point_from_json(const Json& j) {
    IntPoint p;
    for (const auto& [name, x] : j.items()) p[var(name)] = x.get<long>();
    return p;
}

Json recurrence_fields(const Recurrence& rec) {
    Json j;
    const auto params = rec.params();
    j["sum"] = render(rec.sum);
    j["summation_variable"] = std::string(1, var_name(rec.rs.k));
    j["parameters"] = Json::array();
    for (Var v : params) j["parameters"].push_back(std::string(1, var_name(v)));
    j["aux"] = Json::array();
    for (Var v : rec.rs.aux) j["aux"].push_back(std::string(1, var_name(v)));
    j["field"] = (rec.rs.symbols & mask_of(var("q"))) ? "Q(q)" : "Q";
    j["base_term"] = rec.rs.base.str();
    j["mode"] = mode_name(rec.mode);
    j["route"] = route_name(rec.route);
    j["derivative"] = rec.derivative ? Json(std::string(1, var_name(*rec.derivative))) : Json(nullptr);
    j["shift_set"] = Json::array();
    for (std::size_t i = 0; i < rec.family.size(); ++i) {
        Json s = Json::object();
        for (Var v : params) {
            auto it = rec.family[i].shift.find(v);
            s[std::string(1, var_name(v))] = it == rec.family[i].shift.end() ? 0 : it->second;
        }
        bool d = i < rec.differentiated.size() && rec.differentiated[i];
        j["shift_set"].push_back({{"shift", s}, {"derivative", d}, {"multiplier", rec.family[i].multiplier.str()}});
    }
    j["coefficients"] = Json::array();
    for (const auto& c : rec.coeffs) j["coefficients"].push_back(c.str());
    j["operator"] = rec.operator_text();
    j["certificate_ratfunc"] = rec.certificate.str();
    j["relation"] = rec.relation.empty() ? Json(nullptr) : Json(rec.relation_text());
    if (rec.applicability) {
        const auto& a = *rec.applicability;
        j["applicability"] = {{"kernel_class", kernel_class_name(a.kernel_class)},
                              {"verdict", applicability_name(a.verdict)},
                              {"route", route_name(a.route)},
                              {"skeleton", a.skeleton.str()},
                              {"reason", a.reason}};
    } else {
        j["applicability"] = nullptr;
    }
    j["searched"] = rec.searched;
    return j;
}

Json value_json(const ValueCheck& v) {
    return {{"point", point_json(v.point)}, {"lhs", v.lhs.str()}, {"rhs", v.rhs.str()}, {"match", v.match()}};
}

}  // namespace

Json to_json(const Recurrence& rec) {
    Json j;
    j["schema"] = 1;
    j["kind"] = "recurrence";
    j.update(recurrence_fields(rec));
    return j;
}

Json to_json(const Proof& pf) {
    Json j;
    j["schema"] = 1;
    j["kind"] = "proof";
    j["identity"] = render(pf.identity);
    if (pf.recurrence) {
        j.update(recurrence_fields(*pf.recurrence));
        j["certificate_ok"] = pf.certificate_ok;
        j["boundary"] = {{"verdict", verdict_name(pf.boundary.verdict)}, {"witness", pf.boundary.witness}};
        j["rhs_check"] = {{"method", pf.rhs.method}, {"passed", pf.rhs.passed}, {"detail", pf.rhs.detail}};
        j["annihilation"] = {
            {"ok", pf.annihilation.ok}, {"points", pf.annihilation.points}, {"detail", pf.annihilation.detail}};
    } else {
        j["sum"] = render(pf.identity.lhs);
    }
    j["initial_values"] = Json::array();
    for (const auto& v : pf.initial_values) j["initial_values"].push_back(value_json(v));
    Json mism = Json::array();
    for (const auto& v : pf.mismatches) mism.push_back(value_json(v));
    j["grid"] = {{"max", pf.grid_max}, {"points", pf.grid_points}, {"mismatches", mism}};
    j["counterexample"] = pf.mismatches.empty() ? Json(nullptr) : value_json(pf.mismatches.front());
    j["verdict"] = verdict_name(pf.verdict);
    j["reason"] = pf.reason;
    return j;
}

CheckReport check_json(const Json& cert, long grid_max) {
    CheckReport rep;
    auto line = [&](bool ok, const std::string& what) {
        rep.lines.push_back(std::string(ok ? "PASS " : "FAIL ") + what);
        return ok;
    };
    bool ok = true;
    try {
        if (cert.value("schema", 0) != 1) {
            line(false, "unsupported schema");
            return rep;
        }
        if (cert.value("kind", "") == "proof" && !cert.contains("coefficients")) {
            line(false, "the proof carries no recurrence");
            return rep;
        }
        Recurrence rec;
        rec.sum = parse_sum(cert.at("sum").get<std::string>());
        rec.rs = rewrite_sum(rec.sum);
        ok &= line(rec.rs.base.str() == cert.at("base_term").get<std::string>(), "base term rebuilt from the sum");

        const auto& mode = cert.at("mode").get<std::string>();
        for (auto m : {RecurrenceMode::Ordinary, RecurrenceMode::Q, RecurrenceMode::Derivative,
                       RecurrenceMode::AuxPolynomial})
            if (mode_name(m) == mode) rec.mode = m;
        rec.route = cert.value("route", "") == route_name(Route::SisterCeline) ? Route::SisterCeline
                                                                             : Route::ExtendedZeilberger;
        if (!cert.at("derivative").is_null()) rec.derivative = var(cert.at("derivative").get<std::string>());
        for (const auto& m : cert.at("shift_set")) {
            FamilyMember fm;
            for (const auto& [name, s] : m.at("shift").items())
                if (s.get<long>() != 0) fm.shift[var(name)] = s.get<long>();
            bool d = m.value("derivative", false);
            if (d) {
                if (!rec.derivative) throw AlgebraError("derivative member without a derivative variable");
                fm.multiplier = derivative_multiplier(fm.apply(rec.rs.base), *rec.derivative);
            }
            rec.family.push_back(fm);
            rec.differentiated.push_back(d);
        }
        for (const auto& c : cert.at("coefficients")) {
            RatFunc r = parse_ratfunc(c.get<std::string>());
            if (!r.is_polynomial()) throw AlgebraError("coefficient is not a polynomial");
            rec.coeffs.push_back(r.num() * (Rational(1) / r.den().constant_value()));
        }
        rec.certificate = parse_ratfunc(cert.at("certificate_ratfunc").get<std::string>());
        if (rec.mode == RecurrenceMode::AuxPolynomial) fill_relation(rec);

        ok &= line(check_certificate(rec), "certificate satisfies the telescoping identity");
        auto b = recurrence_boundary(rec, grid_max);
        ok &= line(b.verdict != BoundaryVerdict::Unknown,
                   "boundary terms: " + verdict_name(b.verdict) + (b.witness.empty() ? "" : " (" + b.witness + ")"));
        auto g = annihilates_on_grid(rec, grid_max);
        ok &= line(g.ok && g.points > 0, "operator annihilates the sum: " + g.detail);

        if (cert.value("kind", "") == "proof") {
            Identity id = parse_identity(cert.at("identity").get<std::string>());
            ok &= line(equal(id.lhs, rec.sum), "identity left side matches the sum");
            std::size_t bad = 0;
            for (const auto& v : cert.at("initial_values")) {
                IntPoint p = point_from_json(v.at("point"));
                RatFunc l = eval_sum(id.lhs, p), r = eval_rhs(id, p);
                bool agree = l.str() == v.at("lhs").get<std::string>() && r.str() == v.at("rhs").get<std::string>() &&
                             (l == r) == v.at("match").get<bool>();
                if (!agree || (cert.value("verdict", "") == "proved" && l != r)) ++bad;
            }
            ok &= line(bad == 0, std::to_string(cert.at("initial_values").size()) + " initial value(s) recomputed, " +
                                     std::to_string(bad) + " disagreement(s)");
        }
    } catch (const std::exception& e) {
        ok = line(false, std::string("malformed certificate: ") + e.what());
    }
    rep.ok = ok;
    return rep;
}

}  // namespace rt
