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

#ifndef RT_RATFUNC_HPP
#define RT_RATFUNC_HPP

#include <map>
#include <string>

#include "rt/poly.hpp"

namespace rt {

/// Coefficient field of a computation.  Q(q) elements are rational
/// functions in the symbol q; both live in RatFunc.
enum class Field { Q, Qq };

std::string field_name(Field f);

/// Rational function num/den over Q in canonical form: coprime, denominator
/// with leading grlex coefficient 1.  Zero is 0/1.
class RatFunc {
public:
    RatFunc() : num_(0), den_(1) {}
    RatFunc(long c) : num_(c), den_(1) {}  // NOLINT(google-explicit-constructor)
    RatFunc(const Rational& c) : num_(c), den_(1) {}  // NOLINT(google-explicit-constructor)
    RatFunc(const Poly& p) : num_(p), den_(1) {}  // NOLINT(google-explicit-constructor)
    RatFunc(const Poly& num, const Poly& den);  // normalizes; throws on den == 0

    static RatFunc variable(Var v) { return RatFunc(Poly::variable(v)); }

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    bool is_one() const { return num_.is_one() && den_.is_one(); }
    bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
    bool is_polynomial() const { return den_.is_constant(); }
    Rational constant_value() const;
    VarMask vars() const { return num_.vars() | den_.vars(); }
    bool has_var(Var v) const { return num_.has_var(v) || den_.has_var(v); }

    RatFunc operator-() const;
    RatFunc& operator+=(const RatFunc& o);
    RatFunc& operator-=(const RatFunc& o);
    RatFunc& operator*=(const RatFunc& o);
    RatFunc& operator/=(const RatFunc& o);
    friend RatFunc operator+(RatFunc a, const RatFunc& b) { return a += b; }
    friend RatFunc operator-(RatFunc a, const RatFunc& b) { return a -= b; }
    friend RatFunc operator*(RatFunc a, const RatFunc& b) { return a *= b; }
    friend RatFunc operator/(RatFunc a, const RatFunc& b) { return a /= b; }
    bool operator==(const RatFunc& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const RatFunc& o) const { return !(*this == o); }

    RatFunc inverse() const;
    RatFunc pow(long e) const;

    RatFunc substitute(Var v, const RatFunc& value) const;
    RatFunc substitute(const std::map<Var, RatFunc>& values) const;
    RatFunc shift(Var v, long s) const;
    RatFunc scale_var(Var v, const Poly& factor) const;
    RatFunc derivative(Var v) const;

    std::string str() const;

private:
    Poly num_, den_;
    struct Raw {};
    RatFunc(Raw, Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {}
};

/// Canonical representative of num/den; throws "division by zero polynomial".
RatFunc ratfunc_normalize(const Poly& num, const Poly& den);

/// Shift of a discrete variable: v -> v + s and, when the q-power companion V
/// of v is present, V -> q^s * V.
RatFunc shift_discrete(const RatFunc& f, Var v, long s);
Poly shift_discrete(const Poly& f, Var v, long s);

/// q^e as a rational function (negative e allowed).
RatFunc q_power(long e);
/// [e]_q = (1 - q^e) / (1 - q) for any integer e.
RatFunc q_bracket(long e);

std::ostream& operator<<(std::ostream& os, const RatFunc& f);

}  // namespace rt

#endif  // RT_RATFUNC_HPP
