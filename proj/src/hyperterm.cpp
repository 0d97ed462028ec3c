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

#include "rt/hyperterm.hpp"

#include <algorithm>
#include <ostream>
#include <random>
#include <tuple>

#include "rt/roots.hpp"

namespace rt {

// ---------------------------------------------------------------- LinExpr

LinExpr LinExpr::variable(Var v, long coef) {
    LinExpr e;
    if (coef != 0) e.terms_[v] = coef;
    return e;
}

std::optional<LinExpr> LinExpr::from_poly(const Poly& p) {
    LinExpr e;
    for (const auto& [m, c] : p.terms()) {
        if (m.deg > 1 || c.get_den() != 1 || !c.get_num().fits_slong_p()) return std::nullopt;
        long v = c.get_num().get_si();
        if (m.deg == 0) {
            e.constant_ = v;
            continue;
        }
        for (std::size_t i = 0; i < kNumVars; ++i)
            if (m.e[i]) e.terms_[static_cast<Var>(i)] = v;
    }
    return e;
}

long LinExpr::coeff(Var v) const {
    auto it = terms_.find(v);
    return it == terms_.end() ? 0 : it->second;
}

VarMask LinExpr::vars() const {
    VarMask m = 0;
    for (const auto& [v, c] : terms_) m |= mask_of(v);
    return m;
}

LinExpr LinExpr::nonconstant() const {
    LinExpr e = *this;
    e.constant_ = 0;
    return e;
}

LinExpr LinExpr::shifted(Var v, long s) const {
    LinExpr e = *this;
    e.constant_ += coeff(v) * s;
    return e;
}

LinExpr LinExpr::substitute(Var v, const LinExpr& val) const {
    long c = coeff(v);
    if (c == 0) return *this;
    LinExpr e = *this;
    e.terms_.erase(v);
    return e + c * val;
}

long LinExpr::eval(const IntPoint& p) const {
    long r = constant_;
    for (const auto& [v, c] : terms_) {
        auto it = p.find(v);
        if (it == p.end()) throw AlgebraError(std::string("unassigned variable ") + var_name(v) + " in " + str());
        r += c * it->second;
    }
    return r;
}

LinExpr LinExpr::partial_eval(const IntPoint& p) const {
    LinExpr e;
    e.constant_ = constant_;
    for (const auto& [v, c] : terms_) {
        auto it = p.find(v);
        if (it == p.end())
            e.terms_[v] = c;
        else
            e.constant_ += c * it->second;
    }
    return e;
}

Poly LinExpr::to_poly() const {
    Poly p(constant_);
    for (const auto& [v, c] : terms_) p += Poly::variable(v) * Rational(c);
    return p;
}

RatFunc LinExpr::q_power() const {
    RatFunc r = rt::q_power(constant_);
    for (const auto& [v, c] : terms_) {
        auto qv = qpower_var(v);
        if (!qv) throw AlgebraError(std::string("no q-power companion for ") + var_name(v));
        r *= RatFunc::variable(*qv).pow(c);
    }
    return r;
}

LinExpr LinExpr::operator-() const { return -1 * *this; }

LinExpr& LinExpr::operator+=(const LinExpr& o) {
    constant_ += o.constant_;
    for (const auto& [v, c] : o.terms_) {
        long& x = terms_[v];
        x += c;
        if (x == 0) terms_.erase(v);
    }
    return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& o) { return *this += -o; }

LinExpr operator*(long c, const LinExpr& e) {
    LinExpr r;
    if (c == 0) return r;
    r.constant_ = c * e.constant_;
    for (const auto& [v, x] : e.terms_) r.terms_[v] = c * x;
    return r;
}

bool LinExpr::operator<(const LinExpr& o) const {
    return std::tie(terms_, constant_) < std::tie(o.terms_, o.constant_);
}

std::string LinExpr::str() const {
    std::string s;
    for (const auto& [v, c] : terms_) {
        long a = c < 0 ? -c : c;
        if (s.empty())
            s += c < 0 ? "-" : "";
        else
            s += c < 0 ? " - " : " + ";
        if (a != 1) s += std::to_string(a) + "*";
        s += var_name(v);
    }
    if (s.empty()) return std::to_string(constant_);
    if (constant_ > 0) s += " + " + std::to_string(constant_);
    if (constant_ < 0) s += " - " + std::to_string(-constant_);
    return s;
}

// ------------------------------------------------------------------- Atom

namespace {

Atom make_atom(AtomKind kind, LinExpr a, LinExpr b, RatFunc base, Var aux) {
    Atom t;
    t.kind = kind;
    t.arg = std::move(a);
    t.arg2 = std::move(b);
    t.base = std::move(base);
    t.aux = aux;
    return t;
}

RatFunc q_bracket_of(const LinExpr& e) {
    // [e] = (1 - q^e) / (1 - q)
    return (RatFunc(1) - e.q_power()) / (RatFunc(1) - RatFunc::variable(q_var()));
}

std::string paren(const RatFunc& f) {
    std::string s = f.str();
    bool simple = f.is_polynomial() && f.num().size() == 1 &&
                  (f.num().leading_coeff() == 1 || f.num().total_degree() == 0) && s[0] != '-';
    return simple ? s : "(" + s + ")";
}

}  // namespace

Atom Atom::binomial(LinExpr top, LinExpr bottom) {
    return make_atom(AtomKind::Binomial, std::move(top), std::move(bottom), RatFunc(), 0);
}
Atom Atom::qbinomial(LinExpr top, LinExpr bottom) {
    return make_atom(AtomKind::QBinomial, std::move(top), std::move(bottom), RatFunc(), 0);
}
Atom Atom::factorial(LinExpr a) { return make_atom(AtomKind::Factorial, std::move(a), 0, RatFunc(), 0); }
Atom Atom::falling(RatFunc base, LinExpr length) {
    return make_atom(AtomKind::Falling, std::move(length), 0, std::move(base), 0);
}
Atom Atom::qfalling(RatFunc base, LinExpr length) {
    return make_atom(AtomKind::QFalling, std::move(length), 0, std::move(base), 0);
}
Atom Atom::bracket(RatFunc base, LinExpr length) {
    return make_atom(AtomKind::Bracket, std::move(length), 0, std::move(base), 0);
}
Atom Atom::qbracket(RatFunc base, LinExpr length) {
    return make_atom(AtomKind::QBracket, std::move(length), 0, std::move(base), 0);
}
Atom Atom::power(RatFunc base, LinExpr exponent) {
    if (base.is_zero()) throw AlgebraError("power atom with zero base");
    return make_atom(AtomKind::Power, std::move(exponent), 0, std::move(base), 0);
}
Atom Atom::exp_linear(RatFunc coefficient, Var aux) {
    return make_atom(AtomKind::ExpLinear, 0, 0, std::move(coefficient), aux);
}
Atom Atom::inv_expm1(Var aux) { return make_atom(AtomKind::InvExpm1, 0, 0, RatFunc(), aux); }

bool Atom::is_q() const {
    if (kind == AtomKind::QBinomial || kind == AtomKind::QFalling || kind == AtomKind::QBracket) return true;
    if (base.has_var(q_var())) return true;
    for (Var v = 0; v < kNumVars; ++v)
        if (qpower_base(v) && base.has_var(v)) return true;
    return false;
}

RatFunc Atom::derivative_multiplier(Var v) const {
    switch (kind) {
        case AtomKind::ExpLinear:
            // d/dv exp(c * aux) = (dc/dv * aux + c * daux/dv) exp(c * aux)
            return base.derivative(v) * RatFunc::variable(aux) + (v == aux ? base : RatFunc());
        case AtomKind::InvExpm1:
            if (v == aux) throw AlgebraError("derivative of 1/(exp(z) - 1) in its own variable is not a multiplier");
            return RatFunc();
        default:
            throw AlgebraError("derivative multipliers exist only for shift-free kernels");
    }
}

VarMask Atom::symbol_vars() const {
    VarMask m = base.vars();
    if (is_opaque()) m |= mask_of(aux);
    return m;
}

Atom Atom::shifted(Var v, long s) const {
    Atom r = *this;
    r.arg = arg.shifted(v, s);
    r.arg2 = arg2.shifted(v, s);
    if (base.has_var(v) || (qpower_var(v) && base.has_var(*qpower_var(v)))) r.base = shift_discrete(base, v, s);
    return r;
}

Atom Atom::substitute(Var v, const LinExpr& e) const {
    Atom r = *this;
    r.arg = arg.substitute(v, e);
    r.arg2 = arg2.substitute(v, e);
    if (base.has_var(v)) r.base = base.substitute(v, RatFunc(e.to_poly()));
    if (auto qv = qpower_var(v); qv && base.has_var(*qv)) r.base = r.base.substitute(*qv, e.q_power());
    return r;
}

std::string Atom::str() const {
    switch (kind) {
        case AtomKind::Binomial: return "binom(" + arg.str() + ", " + arg2.str() + ")";
        case AtomKind::QBinomial: return "qbinom(" + arg.str() + ", " + arg2.str() + ")";
        case AtomKind::Factorial: return "fact(" + arg.str() + ")";
        case AtomKind::Falling: return "falling(" + base.str() + ", " + arg.str() + ")";
        case AtomKind::QFalling: return "qfalling(" + base.str() + ", " + arg.str() + ")";
        case AtomKind::Bracket: return "bracket(" + base.str() + ", " + arg.str() + ")";
        case AtomKind::QBracket: return "qbracket(" + base.str() + ", " + arg.str() + ")";
        case AtomKind::Power: {
            std::string e = arg.str();
            bool simple = arg.is_constant() ? arg.constant() >= 0 : (arg.terms().size() == 1 && arg.constant() == 0 &&
                                                                     arg.terms().begin()->second == 1);
            return paren(base) + "^" + (simple ? e : "(" + e + ")");
        }
        case AtomKind::ExpLinear: {
            RatFunc ex = base * RatFunc::variable(aux);
            return "exp(" + ex.str() + ")";
        }
        case AtomKind::InvExpm1: return std::string("1/(exp(") + var_name(aux) + ") - 1)";
    }
    return "?";
}

namespace {

auto atom_key(const Atom& a) {
    return std::make_tuple(static_cast<int>(a.kind), a.base.str(), a.aux, a.arg, a.arg2);
}

}  // namespace

bool Atom::operator==(const Atom& o) const {
    return kind == o.kind && arg == o.arg && arg2 == o.arg2 && base == o.base && aux == o.aux;
}

bool Atom::operator<(const Atom& o) const { return atom_key(*this) < atom_key(o); }

// -------------------------------------------------------------- HyperTerm

namespace {

// Step factor f(L) = G(L) / G(L - 1) of a factorial-like atom family G.
enum class Family { Fact, QFact, Falling, QFalling, Bracket, QBracket };

RatFunc step_factor(Family f, const RatFunc& base, const LinExpr& L) {
    switch (f) {
        case Family::Fact: return RatFunc(L.to_poly());
        case Family::QFact: return q_bracket_of(L);
        case Family::Falling: return base - RatFunc(L.to_poly()) + RatFunc(1);
        case Family::QFalling: return base - q_bracket_of(L - 1);
        case Family::Bracket: return RatFunc(1) - RatFunc(L.to_poly()) * base;
        case Family::QBracket: return RatFunc(1) - q_bracket_of(L) * base;
    }
    return RatFunc(1);
}

// G(L0 + c) / G(L0) as a product of step factors (reciprocal for c < 0).
RatFunc step_product(Family f, const RatFunc& base, const LinExpr& L0, long c) {
    RatFunc r(1);
    if (c >= 0) {
        for (long j = 1; j <= c; ++j) r *= step_factor(f, base, L0 + j);
    } else {
        for (long j = c + 1; j <= 0; ++j) r *= step_factor(f, base, L0 + j);
        r = r.inverse();
    }
    return r;
}

std::optional<Family> family_of(AtomKind k) {
    switch (k) {
        case AtomKind::Factorial: return Family::Fact;
        case AtomKind::Falling: return Family::Falling;
        case AtomKind::QFalling: return Family::QFalling;
        case AtomKind::Bracket: return Family::Bracket;
        case AtomKind::QBracket: return Family::QBracket;
        default: return std::nullopt;
    }
}

// Folds atoms whose value is a fixed rational function into the prefactor.
std::optional<RatFunc> constant_value(const Atom& a, int mult) {
    if (!a.arg.is_constant() || !a.arg2.is_constant()) return std::nullopt;
    long x = a.arg.constant();
    switch (a.kind) {
        case AtomKind::Power: return a.base.pow(x * mult);
        case AtomKind::Factorial:
        case AtomKind::Falling:
        case AtomKind::QFalling:
        case AtomKind::Bracket:
        case AtomKind::QBracket: {
            if (x < 0) return std::nullopt;
            RatFunc v = step_product(*family_of(a.kind), a.base, 0, x);
            if (v.is_zero() && mult < 0) return std::nullopt;
            return v.pow(mult);
        }
        default: return std::nullopt;
    }
}

}  // namespace

HyperTerm& HyperTerm::mul(const Atom& a0, int mult) {
    if (mult == 0) return *this;
    Atom a = a0;
    if (a.kind == AtomKind::Power) {
        // One power atom per base, with the multiplicity folded into the exponent.
        a.arg = static_cast<long>(mult) * a.arg;
        mult = 1;
        if (a.base.is_one()) return *this;
        for (auto it = atoms_.begin(); it != atoms_.end(); ++it) {
            if (it->first.kind == AtomKind::Power && it->first.base == a.base) {
                a.arg += it->first.arg;
                atoms_.erase(it);
                break;
            }
        }
        if (a.arg.is_constant() && a.arg.constant() == 0) return *this;
    }
    if (auto c = constant_value(a, mult)) {
        if (c->is_zero()) {
            prefactor_ = RatFunc();
            atoms_.clear();
            return *this;
        }
        prefactor_ *= *c;
        return *this;
    }
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), a,
                               [](const std::pair<Atom, int>& p, const Atom& x) { return p.first < x; });
    if (it != atoms_.end() && it->first == a) {
        it->second += mult;
        if (it->second == 0) atoms_.erase(it);
    } else {
        atoms_.insert(it, {a, mult});
    }
    return *this;
}

HyperTerm& HyperTerm::scale(const RatFunc& c) {
    prefactor_ *= c;
    return *this;
}

HyperTerm& HyperTerm::operator*=(const HyperTerm& o) {
    prefactor_ *= o.prefactor_;
    for (const auto& [a, m] : o.atoms_) mul(a, m);
    return *this;
}

HyperTerm HyperTerm::inverse() const {
    HyperTerm r(prefactor_.inverse());
    for (const auto& [a, m] : atoms_) r.mul(a, -m);
    return r;
}

HyperTerm HyperTerm::shifted(Var v, long s) const {
    HyperTerm r(shift_discrete(prefactor_, v, s));
    for (const auto& [a, m] : atoms_) r.mul(a.shifted(v, s), m);
    return r;
}

HyperTerm HyperTerm::substitute(Var v, const LinExpr& e) const {
    RatFunc p = prefactor_;
    if (p.has_var(v)) p = p.substitute(v, RatFunc(e.to_poly()));
    if (auto qv = qpower_var(v); qv && p.has_var(*qv)) p = p.substitute(*qv, e.q_power());
    HyperTerm r(p);
    for (const auto& [a, m] : atoms_) r.mul(a.substitute(v, e), m);
    return r;
}

HyperTerm HyperTerm::without_opaque() const {
    HyperTerm r(prefactor_);
    for (const auto& [a, m] : atoms_)
        if (!a.is_opaque()) r.mul(a, m);
    return r;
}

VarMask HyperTerm::discrete_vars() const {
    VarMask m = 0;
    for (const auto& [a, x] : atoms_) m |= a.discrete_vars();
    return m;
}

bool HyperTerm::has_opaque() const {
    return std::any_of(atoms_.begin(), atoms_.end(), [](const auto& p) { return p.first.is_opaque(); });
}

bool HyperTerm::is_q() const {
    if (prefactor_.has_var(q_var())) return true;
    for (Var v = 0; v < kNumVars; ++v)
        if (qpower_base(v) && prefactor_.has_var(v)) return true;
    return std::any_of(atoms_.begin(), atoms_.end(), [](const auto& p) { return p.first.is_q(); });
}

std::string HyperTerm::str() const {
    std::string num, den;
    for (const auto& [a, m] : atoms_) {
        std::string s = a.str();
        int e = m < 0 ? -m : m;
        if (e != 1) s += "^" + std::to_string(e);
        std::string& dst = m > 0 ? num : den;
        dst += (dst.empty() ? "" : "*") + s;
    }
    std::string out;
    if (prefactor_.is_one()) {
        out = num.empty() ? "1" : num;
    } else if (num.empty()) {
        out = prefactor_.str();
    } else if (prefactor_ == RatFunc(-1)) {
        out = "-" + num;
    } else {
        out = paren(prefactor_) + "*" + num;
    }
    if (!den.empty()) out += "/(" + den + ")";
    return out;
}

// ------------------------------------------------------- ratio and shifts

std::optional<RatFunc> similar_ratio(const HyperTerm& t1, const HyperTerm& t2) {
    HyperTerm t = t1 * t2.inverse();
    if (t.prefactor().is_zero()) return RatFunc();

    struct Item {
        LinExpr arg;
        int mult;
    };
    // (family, base) -> nonconstant argument part -> items
    std::map<std::pair<int, std::string>, std::map<LinExpr, std::vector<Item>>> groups;
    std::map<std::pair<int, std::string>, RatFunc> bases;
    auto add = [&](Family f, const RatFunc& base, const LinExpr& arg, int mult) {
        auto key = std::make_pair(static_cast<int>(f), base.str());
        bases.emplace(key, base);
        groups[key][arg.nonconstant()].push_back({arg, mult});
    };

    RatFunc r = t.prefactor();
    for (const auto& [a, m] : t.atoms()) {
        switch (a.kind) {
            case AtomKind::Binomial:
            case AtomKind::QBinomial: {
                Family f = a.kind == AtomKind::Binomial ? Family::Fact : Family::QFact;
                add(f, RatFunc(), a.arg, m);
                add(f, RatFunc(), a.arg2, -m);
                add(f, RatFunc(), a.arg - a.arg2, -m);
                break;
            }
            case AtomKind::Power:
                // Powers of one base are merged, so a survivor has a
                // nonconstant exponent.
                return std::nullopt;
            case AtomKind::ExpLinear:
            case AtomKind::InvExpm1:
                return std::nullopt;
            default:
                add(*family_of(a.kind), a.base, a.arg, m);
        }
    }
    for (const auto& [key, by_arg] : groups) {
        const RatFunc& base = bases.at(key);
        for (const auto& [L0, items] : by_arg) {
            int total = 0;
            for (const auto& it : items) total += it.mult;
            if (total != 0) return std::nullopt;
            for (const auto& it : items) {
                if (it.arg.constant() == 0) continue;
                r *= step_product(static_cast<Family>(key.first), base, L0, it.arg.constant()).pow(it.mult);
            }
        }
    }
    return r;
}

RatFunc shift_quotient(const HyperTerm& t, Var v) {
    auto r = similar_ratio(t.shifted(v, 1), t);
    if (!r) throw AlgebraError(std::string("term is not hypergeometric in ") + var_name(v) + ": " + t.str());
    return *r;
}

// ------------------------------------------------------------- evaluation

std::map<Var, RatFunc> point_substitution(const IntPoint& point) {
    std::map<Var, RatFunc> sub;
    for (const auto& [v, x] : point) {
        sub[v] = RatFunc(Poly(x));
        if (auto qv = qpower_var(v)) sub[*qv] = q_power(x);
    }
    return sub;
}

namespace {

RatFunc binomial_value(bool q, long a, long b) {
    // prod_{i=1}^{b} (a - b + i) / i, with q-brackets in the q case
    RatFunc r(1);
    for (long i = 1; i <= b; ++i) {
        if (q) {
            r *= q_bracket(a - b + i) / q_bracket(i);
        }
        else {
            Rational c(a - b + i, i);
            c.canonicalize();
            r *= RatFunc(c);
        }
    }
    return r;
}

}  // namespace

RatFunc evaluate(const HyperTerm& t, const IntPoint& point, ProductExtension ext, bool skip_opaque) {
    // A zero-forcing factor decides the value unless some other factor has a
    // pole there; that 0/0 form is reported, since only rewriting the term
    // (rewrite_removable) recovers the limit.
    bool zero = false;
    for (const auto& [a, m] : t.atoms()) {
        if (m > 0 && (a.kind == AtomKind::Binomial || a.kind == AtomKind::QBinomial)) {
            long x = a.arg.eval(point), y = a.arg2.eval(point);
            zero = zero || y < 0 || (x >= 0 && y > x);
        }
        if (m < 0 && a.kind == AtomKind::Factorial) zero = zero || a.arg.eval(point) < 0;
    }
    auto pole = [&](const std::string& why) {
        return AlgebraError((zero ? "indeterminate 0/0 form of " : "pole of ") + t.str() + " (" + why + ")");
    };
    auto sub = point_substitution(point);
    auto subst = [&](const RatFunc& f) {
        try {
            return f.substitute(sub);
        } catch (const AlgebraError&) {
            throw pole("vanishing denominator");
        }
    };

    RatFunc r = subst(t.prefactor());
    for (const auto& [a, m] : t.atoms()) {
        RatFunc v;
        switch (a.kind) {
            case AtomKind::Binomial:
            case AtomKind::QBinomial: {
                long x = a.arg.eval(point), y = a.arg2.eval(point);
                if (y < 0 || (x >= 0 && y > x)) {
                    if (m < 0) throw pole("binomial in the denominator vanishes");
                    continue;
                }
                v = binomial_value(a.kind == AtomKind::QBinomial, x, y);
                break;
            }
            case AtomKind::Factorial: {
                long x = a.arg.eval(point);
                if (x < 0) {
                    if (m > 0) throw pole("factorial of a negative integer");
                    continue;
                }
                v = step_product(Family::Fact, RatFunc(), 0, x);
                break;
            }
            case AtomKind::Falling:
            case AtomKind::QFalling:
            case AtomKind::Bracket:
            case AtomKind::QBracket: {
                long L = a.arg.eval(point);
                if (L < 0 && ext == ProductExtension::Strict)
                    throw AlgebraError("negative product length in " + a.str());
                try {
                    v = step_product(*family_of(a.kind), subst(a.base), 0, L);
                } catch (const AlgebraError&) {
                    throw pole("product continuation");
                }
                break;
            }
            case AtomKind::Power: {
                RatFunc b = subst(a.base);
                long e = a.arg.eval(point);
                if (b.is_zero() && e * m < 0) throw pole("zero base");
                v = b.pow(e);
                break;
            }
            case AtomKind::ExpLinear:
            case AtomKind::InvExpm1:
                if (skip_opaque) continue;
                throw AlgebraError("cannot evaluate the shift-free kernel " + a.str() + " as a rational function");
        }
        if (v.is_zero()) {
            if (m < 0) throw pole(a.str() + " vanishes");
            zero = true;
            continue;
        }
        r *= v.pow(m);
    }
    return zero ? RatFunc() : r;
}

// ---------------------------------------------------- removable rewriting

namespace {

// Replaces one copy of atom `from` (multiplicity sign given by m) with `to`,
// multiplying the prefactor by `factor`.
HyperTerm replace_one(const HyperTerm& t, const Atom& from, int m, const Atom& to, const RatFunc& factor) {
    HyperTerm r(t.prefactor() * factor);
    for (const auto& [a, x] : t.atoms()) r.mul(a, x);
    int s = m > 0 ? 1 : -1;
    r.mul(from, -s);
    r.mul(to, s);
    return r;
}

bool divides_den(const HyperTerm& t, const Poly& f) {
    if (f.is_constant()) return false;
    return try_div(t.prefactor().den(), f).has_value();
}

std::optional<HyperTerm> rewrite_step(const HyperTerm& t) {
    for (const auto& [a, m] : t.atoms()) {
        switch (a.kind) {
            case AtomKind::Binomial:
                if (m > 0) {
                    // binom(a, b) / (a - b + 1) = binom(a + 1, b) / (a + 1)
                    Poly c1 = (a.arg - a.arg2 + 1).to_poly();
                    if (divides_den(t, c1))
                        return replace_one(t, a, m, Atom::binomial(a.arg + 1, a.arg2),
                                           RatFunc(c1, (a.arg + 1).to_poly()));
                    // binom(a, b) / b = binom(a - 1, b - 1) / a
                    Poly c2 = a.arg2.to_poly();
                    if (divides_den(t, c2))
                        return replace_one(t, a, m, Atom::binomial(a.arg - 1, a.arg2 - 1),
                                           RatFunc(c2, a.arg.to_poly()));
                    // binom(a, b) / (b + 1) = binom(a + 1, b + 1) / (a + 1)
                    Poly c3 = (a.arg2 + 1).to_poly();
                    if (divides_den(t, c3))
                        return replace_one(t, a, m, Atom::binomial(a.arg + 1, a.arg2 + 1),
                                           RatFunc(c3, (a.arg + 1).to_poly()));
                }
                break;
            case AtomKind::Factorial: {
                if (m > 0) {
                    // a! / a = (a - 1)!
                    Poly c = a.arg.to_poly();
                    if (divides_den(t, c)) return replace_one(t, a, m, Atom::factorial(a.arg - 1), RatFunc(c));
                } else {
                    // 1 / (a! (a + 1)) = 1 / (a + 1)!
                    Poly c = (a.arg + 1).to_poly();
                    if (divides_den(t, c)) return replace_one(t, a, m, Atom::factorial(a.arg + 1), RatFunc(c));
                }
                break;
            }
            case AtomKind::Falling:
            case AtomKind::Bracket: {
                Family f = *family_of(a.kind);
                auto make = [&](const LinExpr& L) {
                    return a.kind == AtomKind::Falling ? Atom::falling(a.base, L) : Atom::bracket(a.base, L);
                };
                RatFunc last = step_factor(f, a.base, a.arg), next = step_factor(f, a.base, a.arg + 1);
                if (m > 0 && last.is_polynomial() && divides_den(t, last.num()))
                    return replace_one(t, a, m, make(a.arg - 1), last);
                if (m < 0 && next.is_polynomial() && divides_den(t, next.num()))
                    return replace_one(t, a, m, make(a.arg + 1), next);
                break;
            }
            default: break;
        }
    }
    return std::nullopt;
}

}  // namespace

HyperTerm rewrite_removable(const HyperTerm& t) {
    HyperTerm r = t;
    for (int i = 0; i < 64; ++i) {
        auto next = rewrite_step(r);
        if (!next) break;
        r = *next;
    }
    return r;
}

// ------------------------------------------------- dispersion and GP form

Var shift_poly_var(Var k, ShiftMode mode) {
    if (mode == ShiftMode::Ordinary) return k;
    auto qv = qpower_var(k);
    if (!qv) throw AlgebraError(std::string("no q-power companion for ") + var_name(k));
    return *qv;
}

namespace {

// Removes the largest monomial factor of p in the variables of `mask`.
Poly strip_monomial(const Poly& p, VarMask mask) {
    if (p.is_zero()) return p;
    Mono m = p.leading_mono();
    for (const auto& t : p.terms())
        for (std::size_t i = 0; i < kNumVars; ++i) m.e[i] = std::min(m.e[i], t.first.e[i]);
    m.deg = 0;
    for (std::size_t i = 0; i < kNumVars; ++i) {
        if (!(mask & mask_of(static_cast<Var>(i)))) m.e[i] = 0;
        m.deg += m.e[i];
    }
    if (m.deg == 0) return p;
    return exact_div(p, Poly::monomial(m, Rational(1)));
}

// Sign of a polynomial's leading coefficient in x, judged by the grlex
// leading coefficient of that coefficient.
Poly positive_in(const Poly& p, Var x) {
    if (p.is_zero()) return p;
    Poly lc = p.coefficient(x, p.degree(x));
    return lc.leading_coeff() < 0 ? -p : p;
}

}  // namespace

Poly shift_poly(const Poly& p, Var k, long h, ShiftMode mode) {
    if (h == 0) return p;
    if (mode == ShiftMode::Ordinary) return p.shift(k, h);
    RatFunc s = shift_discrete(RatFunc(p), k, h);
    return strip_monomial(s.num(), mask_of(q_var()));
}

std::set<long> dispersion_set(const Poly& a0, const Poly& b0, Var k, ShiftMode mode) {
    if (a0.is_zero() || b0.is_zero()) throw AlgebraError("dispersion of a zero polynomial");
    const Var x = shift_poly_var(k, mode);
    Poly a = a0, b = b0;
    if (mode == ShiftMode::Q) {
        a = strip_monomial(a, mask_of(x));
        b = strip_monomial(b, mask_of(x));
    }
    std::set<long> out;
    if (!a.has_var(x) || !b.has_var(x)) return out;

    // Candidates come from a resultant after specializing every other
    // variable; a common factor survives specialization whenever the leading
    // coefficients do not vanish, so no genuine shift is lost.
    const Var h = x == var("w") ? var("y") : var("w");
    VarMask others = (a.vars() | b.vars()) & ~mask_of(x);
    std::mt19937_64 rng(0x5eed);
    std::uniform_int_distribution<long> dist(3, 41);
    std::optional<Poly> res;
    for (int attempt = 0; attempt < 20 && !res; ++attempt) {
        std::map<Var, Poly> sub;
        for (Var v = 0; v < kNumVars; ++v) {
            if (!(others & mask_of(v))) continue;
            sub[v] = Poly(mode == ShiftMode::Q && v == q_var() ? 2L : dist(rng));
        }
        Poly as = a.substitute(sub), bs = b.substitute(sub);
        if (as.degree(x) != a.degree(x) || bs.degree(x) != b.degree(x)) continue;
        Poly shifted = mode == ShiftMode::Ordinary
                           ? bs.substitute(x, Poly::variable(x) + Poly::variable(h))
                           : bs.substitute(x, Poly::variable(x) * Poly::variable(h));
        Poly r = resultant(as, shifted, x);
        if (!r.is_zero()) res = r;
    }
    if (!res) throw AlgebraError("dispersion: no admissible specialization found");
    std::set<long> cand;
    if (!res->is_constant()) {
        for (long root : integer_roots(*res, h)) {
            if (mode == ShiftMode::Ordinary) {
                if (root >= 0) cand.insert(root);
            } else if (root > 0 && (root & (root - 1)) == 0) {
                long e = 0;
                while ((1L << e) < root) ++e;
                cand.insert(e);
            }
        }
    }
    for (long c : cand)
        if (gcd(a, shift_poly(b, k, c, mode)).has_var(x)) out.insert(c);
    return out;
}

GPForm gosper_normal_form(const RatFunc& r, Var k, ShiftMode mode) {
    if (r.is_zero()) throw AlgebraError("Gosper-Petkovsek form of zero");
    const Var x = shift_poly_var(k, mode);
    if (mode == ShiftMode::Q && r.has_var(k)) throw AlgebraError("q-shift normal form expects a function of q^k only");
    Poly a = r.num(), b = r.den();
    long xpow = 0;
    if (mode == ShiftMode::Q) {
        Poly sa = strip_monomial(a, mask_of(x)), sb = strip_monomial(b, mask_of(x));
        xpow = static_cast<long>(a.low_degree(x)) - static_cast<long>(b.low_degree(x));
        a = sa;
        b = sb;
    }
    a = exact_div(a, content_in(a, x));
    b = exact_div(b, content_in(b, x));
    Poly C(1);
    for (int round = 0; round < 16; ++round) {
        auto hs = dispersion_set(a, b, k, mode);
        if (hs.empty()) break;
        for (long h : hs) {
            Poly s = gcd(a, shift_poly(b, k, h, mode));
            if (!s.has_var(x)) continue;
            a = exact_div(a, s);
            b = exact_div(b, shift_poly(s, k, -h, mode));
            for (long i = 1; i <= h; ++i) C *= shift_poly(s, k, -i, mode);
        }
    }
    if (xpow > 0) a *= Poly::variable(x, static_cast<unsigned>(xpow));
    if (xpow < 0) b *= Poly::variable(x, static_cast<unsigned>(-xpow));
    GPForm f;
    f.A = a.primitive();
    f.B = positive_in(b.primitive(), x);
    f.C = positive_in(C.primitive(), x);
    RatFunc cs = shift_discrete(RatFunc(f.C), k, 1);
    f.u = r * RatFunc(f.B) * RatFunc(f.C) / (RatFunc(f.A) * cs);
    if (f.u.has_var(x) || f.u.has_var(k)) throw AlgebraError("internal: GP factor u depends on the shift variable");
    return f;
}

RatFunc gp_recompose(const GPForm& f, Var k, ShiftMode) {
    return f.u * RatFunc(f.A, f.B) * shift_discrete(RatFunc(f.C), k, 1) / RatFunc(f.C);
}

bool gp_conditions_hold(const GPForm& f, Var k, ShiftMode mode, long hmax) {
    const Var x = shift_poly_var(k, mode);
    for (long h = 0; h <= hmax; ++h)
        if (gcd(f.A, shift_poly(f.B, k, h, mode)).has_var(x)) return false;
    if (gcd(f.A, f.C).has_var(x)) return false;
    return !gcd(f.B, shift_poly(f.C, k, 1, mode)).has_var(x);
}

std::ostream& operator<<(std::ostream& os, const LinExpr& e) { return os << e.str(); }
std::ostream& operator<<(std::ostream& os, const HyperTerm& t) { return os << t.str(); }

}  // namespace rt
