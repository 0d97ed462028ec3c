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

#ifndef RT_HYPERTERM_HPP
#define RT_HYPERTERM_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rt/ratfunc.hpp"

namespace rt {

using IntPoint = std::map<Var, long>;

/// Integer-linear form  c + sum_v a_v * v  over discrete variables.
class LinExpr {
public:
    LinExpr() = default;
    LinExpr(long c) : constant_(c) {}  // NOLINT(google-explicit-constructor)
    static LinExpr variable(Var v, long coef = 1);
    /// Accepts polynomials of total degree <= 1 with integer coefficients.
    static std::optional<LinExpr> from_poly(const Poly& p);

    long constant() const { return constant_; }
    long coeff(Var v) const;
    const std::map<Var, long>& terms() const { return terms_; }
    bool is_constant() const { return terms_.empty(); }
    VarMask vars() const;
    LinExpr nonconstant() const;

    /// v -> v + s.
    LinExpr shifted(Var v, long s) const;
    LinExpr substitute(Var v, const LinExpr& e) const;
    /// Requires every variable to be assigned.
    long eval(const IntPoint& p) const;
    /// Assigns the variables present in p, keeps the rest.
    LinExpr partial_eval(const IntPoint& p) const;

    Poly to_poly() const;
    /// q^(this), with q^v written as the companion variable of v.
    RatFunc q_power() const;

    LinExpr operator-() const;
    LinExpr& operator+=(const LinExpr& o);
    LinExpr& operator-=(const LinExpr& o);
    friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
    friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
    friend LinExpr operator*(long c, const LinExpr& e);
    bool operator==(const LinExpr& o) const = default;
    bool operator<(const LinExpr& o) const;

    std::string str() const;

private:
    std::map<Var, long> terms_;  // no zero coefficients
    long constant_ = 0;
};

enum class AtomKind {
    Binomial,   // binom(arg, arg2)
    QBinomial,  // q-binomial [arg, arg2]
    Factorial,  // arg!
    Falling,    // base (base - 1) ... (base - arg + 1)
    QFalling,   // (base - [0]) (base - [1]) ... (base - [arg - 1])
    Bracket,    // prod_{i=1}^{arg} (1 - i base)
    QBracket,   // prod_{i=1}^{arg} (1 - [i] base)
    Power,      // base^arg
    ExpLinear,  // exp(base * aux), shift-free
    InvExpm1,   // 1 / (exp(aux) - 1), shift-free
};

/// One catalogued factor of a hypergeometric term.
struct Atom {
    AtomKind kind = AtomKind::Factorial;
    LinExpr arg, arg2;
    RatFunc base;
    Var aux = 0;

    static Atom binomial(LinExpr top, LinExpr bottom);
    static Atom qbinomial(LinExpr top, LinExpr bottom);
    static Atom factorial(LinExpr a);
    static Atom falling(RatFunc base, LinExpr length);
    static Atom qfalling(RatFunc base, LinExpr length);
    static Atom bracket(RatFunc base, LinExpr length);
    static Atom qbracket(RatFunc base, LinExpr length);
    static Atom power(RatFunc base, LinExpr exponent);
    static Atom exp_linear(RatFunc coefficient, Var aux);
    static Atom inv_expm1(Var aux);

    bool is_opaque() const { return kind == AtomKind::ExpLinear || kind == AtomKind::InvExpm1; }
    bool is_q() const;
    /// Multiplier produced by d/dv; only defined for opaque atoms.
    RatFunc derivative_multiplier(Var v) const;
    VarMask discrete_vars() const { return arg.vars() | arg2.vars(); }
    VarMask symbol_vars() const;

    Atom shifted(Var v, long s) const;
    Atom substitute(Var v, const LinExpr& e) const;

    std::string str() const;
    bool operator==(const Atom& o) const;
    bool operator<(const Atom& o) const;
};

/// prefactor * prod atoms^multiplicity.  Atoms are kept sorted and merged so
/// equal terms compare equal structurally.
class HyperTerm {
public:
    HyperTerm() : prefactor_(1) {}
    explicit HyperTerm(RatFunc prefactor) : prefactor_(std::move(prefactor)) {}
    HyperTerm(const Atom& a, int mult = 1) : prefactor_(1) { mul(a, mult); }  // NOLINT

    const RatFunc& prefactor() const { return prefactor_; }
    const std::vector<std::pair<Atom, int>>& atoms() const { return atoms_; }

    HyperTerm& mul(const Atom& a, int mult = 1);
    HyperTerm& scale(const RatFunc& c);
    HyperTerm& operator*=(const HyperTerm& o);
    friend HyperTerm operator*(HyperTerm a, const HyperTerm& b) { return a *= b; }
    HyperTerm inverse() const;

    /// Discrete shift v -> v + s everywhere (index arguments and prefactor).
    HyperTerm shifted(Var v, long s) const;
    HyperTerm substitute(Var v, const LinExpr& e) const;
    HyperTerm without_opaque() const;

    VarMask discrete_vars() const;
    bool has_opaque() const;
    bool is_q() const;

    bool operator==(const HyperTerm& o) const { return prefactor_ == o.prefactor_ && atoms_ == o.atoms_; }
    std::string str() const;

private:
    RatFunc prefactor_;
    std::vector<std::pair<Atom, int>> atoms_;
};

/// t(v + 1) / t(v) as a rational function.
RatFunc shift_quotient(const HyperTerm& t, Var v);

/// t1 / t2 when the atoms cancel to a rational function.
std::optional<RatFunc> similar_ratio(const HyperTerm& t1, const HyperTerm& t2);

/// Negative-length falling and bracket products are an error under Strict and
/// continue as reciprocal products under Formal (the continuation that keeps
/// every shift quotient valid).
enum class ProductExtension { Strict, Formal };

/// Value at an integer point of the discrete variables; remaining variables
/// stay symbolic.  Binomials vanish for bottom < 0 and for 0 <= top < bottom,
/// a reciprocal factorial of a negative integer makes the term vanish.  Poles,
/// including a pole next to a vanishing factor, throw AlgebraError.  Opaque
/// atoms are an error unless skip_opaque is set.
RatFunc evaluate(const HyperTerm& t, const IntPoint& point, ProductExtension ext = ProductExtension::Strict,
                 bool skip_opaque = false);

/// Substitution map sending each assigned variable (and its q-power
/// companion) to its value.
std::map<Var, RatFunc> point_substitution(const IntPoint& point);

/// Cancels linear prefactor denominators against binomial and factorial
/// atoms, e.g. binom(a, b) / (a + 1 - b) -> binom(a + 1, b) / (a + 1), so that
/// removable 0/0 forms disappear before evaluation.
HyperTerm rewrite_removable(const HyperTerm& t);

/// Shift action on the summation variable: k -> k + 1 on polynomials in k,
/// or K -> q K on polynomials in K = q^k.
enum class ShiftMode { Ordinary, Q };

/// The polynomial variable a k-shift acts on.
Var shift_poly_var(Var k, ShiftMode mode);

/// Shift of a polynomial by h steps, up to a constant factor.
Poly shift_poly(const Poly& p, Var k, long h, ShiftMode mode);

/// All h >= 0 with gcd(a(k), b(k + h)) of positive degree (for Q: gcd(a(K),
/// b(q^h K))).  Parameters are generic: root differences involving them do
/// not count.
std::set<long> dispersion_set(const Poly& a, const Poly& b, Var k, ShiftMode mode = ShiftMode::Ordinary);

/// r = u * (A / B) * (C(k+1) / C(k)) with gcd(A(k), B(k+h)) = 1 for h >= 0.
/// u is free of the shift variable; A is primitive with positive leading
/// coefficient, B and C have positive leading coefficient in the shift
/// variable.
struct GPForm {
    RatFunc u;
    Poly A, B, C;
};

GPForm gosper_normal_form(const RatFunc& r, Var k, ShiftMode mode = ShiftMode::Ordinary);
RatFunc gp_recompose(const GPForm& f, Var k, ShiftMode mode = ShiftMode::Ordinary);

/// Checks gcd(A(k), B(k+h)) = 1 for 0 <= h <= hmax, gcd(A, C) = 1 and
/// gcd(B(k), C(k+1)) = 1.
bool gp_conditions_hold(const GPForm& f, Var k, ShiftMode mode, long hmax);

std::ostream& operator<<(std::ostream& os, const LinExpr& e);
std::ostream& operator<<(std::ostream& os, const HyperTerm& t);

}  // namespace rt

#endif  // RT_HYPERTERM_HPP
