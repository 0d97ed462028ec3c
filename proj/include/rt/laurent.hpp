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

#ifndef RT_LAURENT_HPP
#define RT_LAURENT_HPP

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "rt/ratfunc.hpp"

namespace rt {

inline bool coeff_is_zero(const Rational& c) { return c == 0; }
inline bool coeff_is_zero(const RatFunc& c) { return c.is_zero(); }
inline std::string coeff_str(const Rational& c) { return c.get_str(); }
inline std::string coeff_str(const RatFunc& c) { return c.str(); }

/// Truncated formal Laurent series  sum_{i = val}^{order} c_i z^i.
///
/// Coefficients with exponent greater than `order` are unknown.  Arithmetic
/// propagates the reliable order; asking for an unknown coefficient throws.
template <class C>
class LaurentSeries {
public:
    LaurentSeries() = default;

    /// The exact finite sum  sum_i coeffs[i] z^(val + i), reliable to `order`.
    LaurentSeries(int val, std::vector<C> coeffs, int order)
        : val_(val), coeffs_(std::move(coeffs)), order_(order) {
        normalize();
    }

    static LaurentSeries zero(int order) { return LaurentSeries(0, {}, order); }
    static LaurentSeries one(int order) { return monomial(C(1), 0, order); }
    static LaurentSeries monomial(const C& c, int exponent, int order) {
        return LaurentSeries(exponent, {c}, order);
    }
    /// exp(a z) to the given order.
    static LaurentSeries exp_linear(const C& a, int order) {
        std::vector<C> cs;
        C term(1);
        for (int i = 0; i <= std::max(order, 0); ++i) {
            cs.push_back(term);
            term = term * a / C(i + 1);
        }
        return LaurentSeries(0, std::move(cs), order);
    }

    int valuation() const { return val_; }
    int order() const { return order_; }
    bool is_zero() const { return coeffs_.empty(); }
    const std::vector<C>& coefficients() const { return coeffs_; }

    /// Exact coefficient of z^i; throws beyond the reliable order.
    C coeff(int i) const {
        if (i > order_) throw AlgebraError("coefficient beyond truncation");
        if (i < val_) return C(0);
        std::size_t idx = static_cast<std::size_t>(i - val_);
        return idx < coeffs_.size() ? coeffs_[idx] : C(0);
    }
    C residue() const { return coeff(-1); }

    LaurentSeries truncate(int order) const {
        LaurentSeries r = *this;
        r.order_ = std::min(order_, order);
        r.normalize();
        return r;
    }

    LaurentSeries operator-() const {
        LaurentSeries r = *this;
        for (auto& c : r.coeffs_) c = -c;
        return r;
    }

    friend LaurentSeries operator+(const LaurentSeries& a, const LaurentSeries& b) {
        int order = std::min(a.order_, b.order_);
        if (a.is_zero()) return b.truncate(order);
        if (b.is_zero()) return a.truncate(order);
        int val = std::min(a.val_, b.val_);
        std::vector<C> cs;
        for (int i = val; i <= order; ++i) cs.push_back(a.coeff(i) + b.coeff(i));
        return LaurentSeries(val, std::move(cs), order);
    }
    friend LaurentSeries operator-(const LaurentSeries& a, const LaurentSeries& b) { return a + (-b); }

    friend LaurentSeries operator*(const LaurentSeries& a, const LaurentSeries& b) {
        // Each factor is known up to its order, so the product is reliable up
        // to the smaller of order_a + val_b and order_b + val_a.
        if (a.is_zero() || b.is_zero()) {
            int order = std::min(a.order_ + (b.is_zero() ? b.order_ : b.val_),
                                 b.order_ + (a.is_zero() ? a.order_ : a.val_));
            return zero(order);
        }
        int order = std::min(a.order_ + b.val_, b.order_ + a.val_);
        int val = a.val_ + b.val_;
        std::vector<C> cs(static_cast<std::size_t>(std::max(0, order - val + 1)), C(0));
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
            if (coeff_is_zero(a.coeffs_[i])) continue;
            for (std::size_t j = 0; j < b.coeffs_.size() && i + j < cs.size(); ++j)
                cs[i + j] += a.coeffs_[i] * b.coeffs_[j];
        }
        return LaurentSeries(val, std::move(cs), order);
    }

    LaurentSeries scaled(const C& c) const {
        LaurentSeries r = *this;
        for (auto& x : r.coeffs_) x = x * c;
        r.normalize();
        return r;
    }

    /// Multiplicative inverse; the reliable order becomes order - 2 * valuation.
    LaurentSeries inverse() const {
        if (is_zero()) throw AlgebraError("inverse of a series that is zero to its truncation order");
        int rel = order_ - val_;  // unit part known for relative exponents 0..rel
        const C& u0 = coeffs_[0];
        C inv0 = C(1) / u0;
        std::vector<C> out;
        out.reserve(static_cast<std::size_t>(rel + 1));
        out.push_back(inv0);
        for (int n = 1; n <= rel; ++n) {
            C s(0);
            for (int i = 1; i <= n && static_cast<std::size_t>(i) < coeffs_.size(); ++i) {
                if (coeff_is_zero(coeffs_[static_cast<std::size_t>(i)])) continue;
                s += coeffs_[static_cast<std::size_t>(i)] * out[static_cast<std::size_t>(n - i)];
            }
            out.push_back(-s * inv0);
        }
        return LaurentSeries(-val_, std::move(out), -val_ + rel);
    }

    friend LaurentSeries operator/(const LaurentSeries& a, const LaurentSeries& b) { return a * b.inverse(); }

    /// Multiply by z^s.
    LaurentSeries shifted(int s) const {
        LaurentSeries r = *this;
        r.val_ += s;
        r.order_ += s;
        return r;
    }

    template <class F>
    LaurentSeries map_coefficients(F f) const {
        LaurentSeries r = *this;
        for (auto& c : r.coeffs_) c = f(c);
        r.normalize();
        return r;
    }

    std::string str() const {
        std::ostringstream os;
        bool first = true;
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            if (coeff_is_zero(coeffs_[i])) continue;
            if (!first) os << " + ";
            os << "(" << coeff_str(coeffs_[i]) << ")*z^" << (val_ + static_cast<int>(i));
            first = false;
        }
        if (first) os << "0";
        os << " + O(z^" << order_ + 1 << ")";
        return os.str();
    }

private:
    void normalize() {
        if (static_cast<int>(coeffs_.size()) > order_ - val_ + 1)
            coeffs_.resize(static_cast<std::size_t>(std::max(0, order_ - val_ + 1)), C(0));
        std::size_t lead = 0;
        while (lead < coeffs_.size() && coeff_is_zero(coeffs_[lead])) ++lead;
        if (lead == coeffs_.size()) {
            coeffs_.clear();
            val_ = 0;
            return;
        }
        if (lead) {
            coeffs_.erase(coeffs_.begin(), coeffs_.begin() + static_cast<long>(lead));
            val_ += static_cast<int>(lead);
        }
        while (!coeffs_.empty() && coeff_is_zero(coeffs_.back())) coeffs_.pop_back();
    }

    int val_ = 0;
    std::vector<C> coeffs_;  // coeffs_[i] multiplies z^(val_ + i)
    int order_ = 0;
};

/// Series inversion (free-function form).
template <class C>
LaurentSeries<C> laurent_invert(const LaurentSeries<C>& s) {
    return s.inverse();
}

template <class C>
C laurent_coeff(const LaurentSeries<C>& s, int i) {
    return s.coeff(i);
}

}  // namespace rt

#endif  // RT_LAURENT_HPP
