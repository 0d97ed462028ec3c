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

#include "rt/ratfunc.hpp"

#include <ostream>

namespace rt {

std::string field_name(Field f) { return f == Field::Q ? "Q" : "Q(q)"; }

RatFunc ratfunc_normalize(const Poly& num, const Poly& den) {
    if (den.is_zero()) throw AlgebraError("division by zero polynomial");
    return RatFunc(num, den);
}

RatFunc::RatFunc(const Poly& num, const Poly& den) {
    if (den.is_zero()) throw AlgebraError("division by zero polynomial");
    if (num.is_zero()) {
        num_ = Poly();
        den_ = Poly(1);
        return;
    }
    if (den.is_constant()) {
        num_ = num * Rational(1 / den.constant_value());
        den_ = Poly(1);
        return;
    }
    Poly g = gcd(num, den);
    Poly n = g.is_one() ? num : exact_div(num, g);
    Poly d = g.is_one() ? den : exact_div(den, g);
    Rational lc = d.leading_coeff();
    if (lc != 1) {
        Rational inv = 1 / lc;
        n *= inv;
        d *= inv;
    }
    num_ = std::move(n);
    den_ = std::move(d);
}

Rational RatFunc::constant_value() const {
    if (!is_constant()) throw AlgebraError("rational function is not constant: " + str());
    return num_.constant_value();
}

RatFunc RatFunc::operator-() const { return RatFunc(Raw{}, -num_, den_); }

RatFunc& RatFunc::operator+=(const RatFunc& o) {
    if (o.is_zero()) return *this;
    if (is_zero()) return *this = o;
    if (den_.is_one() && o.den_.is_one()) {
        num_ += o.num_;
        return *this;
    }
    if (den_ == o.den_) return *this = RatFunc(num_ + o.num_, den_);
    Poly g = gcd(den_, o.den_);
    if (g.is_one()) return *this = RatFunc(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
    Poly d1 = exact_div(den_, g), d2 = exact_div(o.den_, g);
    return *this = RatFunc(num_ * d2 + o.num_ * d1, den_ * d2);
}

RatFunc& RatFunc::operator-=(const RatFunc& o) { return *this += -o; }

RatFunc& RatFunc::operator*=(const RatFunc& o) {
    if (is_zero() || o.is_zero()) return *this = RatFunc();
    if (den_.is_one() && o.den_.is_one()) {
        num_ *= o.num_;
        return *this;
    }
    if (o.is_constant()) {
        num_ *= o.constant_value();
        return *this;
    }
    if (is_constant()) {
        Rational c = constant_value();
        *this = o;
        num_ *= c;
        return *this;
    }
    Poly g1 = gcd(num_, o.den_), g2 = gcd(o.num_, den_);
    Poly n1 = g1.is_one() ? num_ : exact_div(num_, g1);
    Poly d2 = g1.is_one() ? o.den_ : exact_div(o.den_, g1);
    Poly n2 = g2.is_one() ? o.num_ : exact_div(o.num_, g2);
    Poly d1 = g2.is_one() ? den_ : exact_div(den_, g2);
    Poly n = n1 * n2, d = d1 * d2;
    Rational lc = d.leading_coeff();
    if (lc != 1) {
        Rational inv = 1 / lc;
        n *= inv;
        d *= inv;
    }
    num_ = std::move(n);
    den_ = std::move(d);
    return *this;
}

RatFunc& RatFunc::operator/=(const RatFunc& o) { return *this *= o.inverse(); }

RatFunc RatFunc::inverse() const {
    if (is_zero()) throw AlgebraError("division by zero polynomial");
    Poly n = den_, d = num_;
    Rational lc = d.leading_coeff();
    if (lc != 1) {
        Rational inv = 1 / lc;
        n *= inv;
        d *= inv;
    }
    return RatFunc(Raw{}, std::move(n), std::move(d));
}

RatFunc RatFunc::pow(long e) const {
    if (e < 0) return inverse().pow(-e);
    return RatFunc(Raw{}, num_.pow(static_cast<unsigned>(e)), den_.pow(static_cast<unsigned>(e)));
}

RatFunc RatFunc::substitute(Var v, const RatFunc& value) const {
    if (!has_var(v)) return *this;
    if (value.is_polynomial()) {
        Poly p = value.num();
        return RatFunc(num_.substitute(v, p), den_.substitute(v, p));
    }
    // Horner over the fraction field.
    auto eval = [&](const Poly& p) {
        auto cs = p.coefficients_in(v);
        RatFunc r = RatFunc(cs.back());
        for (std::size_t i = cs.size() - 1; i-- > 0;) r = r * value + RatFunc(cs[i]);
        return r;
    };
    return eval(num_) / eval(den_);
}

RatFunc RatFunc::substitute(const std::map<Var, RatFunc>& values) const {
    RatFunc r = *this;
    for (const auto& [v, val] : values) r = r.substitute(v, val);
    return r;
}

RatFunc RatFunc::shift(Var v, long s) const {
    if (s == 0 || !has_var(v)) return *this;
    Poly n = num_.shift(v, s), d = den_.shift(v, s);
    // A shift is a ring automorphism: coprimality survives, only the
    // denominator scaling may need fixing.
    Rational lc = d.leading_coeff();
    if (lc != 1) {
        Rational inv = 1 / lc;
        n *= inv;
        d *= inv;
    }
    return RatFunc(Raw{}, std::move(n), std::move(d));
}

RatFunc RatFunc::scale_var(Var v, const Poly& factor) const {
    if (!has_var(v)) return *this;
    return RatFunc(num_.scale_var(v, factor), den_.scale_var(v, factor));
}

RatFunc RatFunc::derivative(Var v) const {
    Poly n = num_.derivative(v) * den_ - num_ * den_.derivative(v);
    return RatFunc(n, den_ * den_);
}

std::string RatFunc::str() const {
    if (den_.is_one()) return num_.str();
    std::string n = num_.size() > 1 ? "(" + num_.str() + ")" : num_.str();
    std::string d = den_.size() > 1 || den_.total_degree() > 0 ? "(" + den_.str() + ")" : den_.str();
    return n + "/" + d;
}

RatFunc q_power(long e) {
    Poly qe = Poly::variable(q_var(), static_cast<unsigned>(e < 0 ? -e : e));
    return e < 0 ? RatFunc(Poly(1), qe) : RatFunc(qe);
}

RatFunc q_bracket(long e) {
    // (1 - q^e) / (1 - q); for e >= 0 this is 1 + q + ... + q^{e-1}.
    if (e >= 0) {
        Poly s;
        for (long i = 0; i < e; ++i) s += Poly::variable(q_var(), static_cast<unsigned>(i));
        return RatFunc(s);
    }
    // [-e] = -q^{-e} [e]
    return -(q_power(e) * q_bracket(-e));
}

Poly shift_discrete(const Poly& f, Var v, long s) {
    Poly r = f.shift(v, s);
    if (auto qv = qpower_var(v); qv && r.has_var(*qv)) {
        if (s < 0) throw AlgebraError("negative q-shift of a polynomial leaves the ring");
        r = r.scale_var(*qv, Poly::variable(q_var(), static_cast<unsigned>(s)));
    }
    return r;
}

RatFunc shift_discrete(const RatFunc& f, Var v, long s) {
    if (s == 0) return f;
    RatFunc r = f.shift(v, s);
    if (auto qv = qpower_var(v); qv && r.has_var(*qv)) {
        RatFunc factor = q_power(s);
        r = r.substitute(*qv, factor * RatFunc::variable(*qv));
    }
    return r;
}

std::ostream& operator<<(std::ostream& os, const RatFunc& f) { return os << f.str(); }

}  // namespace rt
