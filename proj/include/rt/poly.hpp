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

#ifndef RT_POLY_HPP
#define RT_POLY_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace rt {

using Integer = mpz_class;
using Rational = mpq_class;

/// Raised for every algebraic precondition violation (division by zero,
/// inexact division, unknown variable names).
class AlgebraError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Variables are single letters drawn from a fixed table.  The table position
// is the variable's rank in the monomial order: parameters first, their
// q-power companions, then the summation variable k, then auxiliary residue
// variables, and the field symbol q last.
inline constexpr std::string_view kVarTable = "nmljirsabcdefghoptuvNMLJIRSkKzxywq";
inline constexpr std::size_t kNumVars = kVarTable.size();

using Var = std::uint8_t;

std::optional<Var> var_of(std::string_view name);
Var var(std::string_view name);  // throws AlgebraError for unknown names
char var_name(Var v);
/// The variable standing for q^v (uppercase letter), if the table has one.
std::optional<Var> qpower_var(Var v);
/// Inverse of qpower_var.
std::optional<Var> qpower_base(Var v);
Var q_var();

using VarMask = std::uint64_t;
inline VarMask mask_of(Var v) { return VarMask{1} << v; }

/// Dense exponent vector, ordered graded-lexicographically.
struct Mono {
    std::array<std::uint16_t, kNumVars> e{};
    std::uint32_t deg = 0;

    bool operator==(const Mono&) const = default;
    bool divides(const Mono& other) const;
    Mono operator*(const Mono& o) const;
    Mono operator/(const Mono& o) const;  // requires divides
    VarMask mask() const;
};

/// Strict "greater" in grlex: higher total degree first, then lexicographic by
/// variable rank.
bool mono_greater(const Mono& a, const Mono& b);

/// Sparse multivariate polynomial over Q.  Terms are kept sorted in
/// descending grlex order with no zero coefficients, so equality is
/// structural.
class Poly {
public:
    using Term = std::pair<Mono, Rational>;

    Poly() = default;
    Poly(long c);  // NOLINT(google-explicit-constructor)
    Poly(const Rational& c);  // NOLINT(google-explicit-constructor)

    static Poly variable(Var v, unsigned exponent = 1);
    static Poly monomial(const Mono& m, const Rational& c);
    static Poly from_terms(std::vector<Term> terms);  // any order, duplicates summed

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    bool is_one() const;
    Rational constant_value() const;  // requires is_constant
    Rational constant_term() const;
    const std::vector<Term>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }

    const Rational& leading_coeff() const;
    const Mono& leading_mono() const;

    unsigned degree(Var v) const;
    unsigned low_degree(Var v) const;
    unsigned total_degree() const;
    bool has_var(Var v) const;
    VarMask vars() const;

    /// Coefficients as a polynomial in v: result[i] multiplies v^i.
    std::vector<Poly> coefficients_in(Var v) const;
    static Poly from_coefficients(Var v, const std::vector<Poly>& coeffs);
    /// Coefficient of v^i.
    Poly coefficient(Var v, unsigned i) const;
    /// Coefficients grouped by the monomial in the variables of `mask`.
    std::map<std::vector<std::uint16_t>, Poly> collect(VarMask mask) const;

    Poly substitute(Var v, const Poly& value) const;
    Poly substitute(const std::map<Var, Poly>& values) const;
    /// v -> v + s.
    Poly shift(Var v, long s) const;
    /// v -> factor * v.
    Poly scale_var(Var v, const Poly& factor) const;
    Poly derivative(Var v) const;

    Poly operator-() const;
    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);
    Poly& operator*=(const Poly& o);
    Poly& operator*=(const Rational& c);
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(const Poly& a, const Poly& b);
    friend Poly operator*(Poly a, const Rational& c) { return a *= c; }
    bool operator==(const Poly& o) const;
    bool operator!=(const Poly& o) const { return !(*this == o); }

    Poly pow(unsigned e) const;

    /// Positive rational c with this/c having coprime integer coefficients.
    Rational content() const;
    /// Integer-coefficient primitive associate with positive leading coefficient.
    Poly primitive() const;
    /// Associate with leading coefficient 1.
    Poly monic() const;

    std::string str() const;

private:
    std::vector<Term> terms_;
    friend class PolyBuilder;
};

/// a / b when b divides a; throws AlgebraError otherwise.
Poly exact_div(const Poly& a, const Poly& b);
/// a / b when exact, nullopt otherwise.
std::optional<Poly> try_div(const Poly& a, const Poly& b);

/// Normalized gcd: integer-primitive with positive leading coefficient
/// (gcd(0, 0) = 0).
Poly gcd(const Poly& a, const Poly& b);

/// gcd of the coefficients of p viewed as a polynomial in v (normalized like
/// gcd; 1 when p has no factor free of v).
Poly content_in(const Poly& p, Var v);

/// Same result as gcd, computed by the recursive primitive remainder
/// sequence only, without the modular coprimality test or the heuristic
/// evaluation gcd.
Poly gcd_prs(const Poly& a, const Poly& b);

/// Reference Euclidean gcd for univariate polynomials (slow; tests only).
Poly gcd_euclid_univariate(const Poly& a, const Poly& b, Var v);

/// Pseudo-remainder of a by b with respect to v.
Poly prem(const Poly& a, const Poly& b, Var v);

/// Resultant with respect to v, via a fraction-free Sylvester determinant.
Poly resultant(const Poly& a, const Poly& b, Var v);

std::string rational_str(const Rational& c);

std::ostream& operator<<(std::ostream& os, const Poly& p);

}  // namespace rt

#endif  // RT_POLY_HPP
