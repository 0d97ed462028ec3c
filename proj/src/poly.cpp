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

#include "rt/poly.hpp"

#include <ostream>

#include <algorithm>
#include <bit>
#include <cctype>
#include <sstream>

namespace rt {

std::optional<Var> var_of(std::string_view name) {
    if (name.size() != 1) return std::nullopt;
    auto pos = kVarTable.find(name[0]);
    if (pos == std::string_view::npos) return std::nullopt;
    return static_cast<Var>(pos);
}

Var var(std::string_view name) {
    auto v = var_of(name);
    if (!v) throw AlgebraError("unknown variable '" + std::string(name) + "'");
    return *v;
}

char var_name(Var v) { return kVarTable.at(v); }

std::optional<Var> qpower_var(Var v) {
    char c = var_name(v);
    if (!std::islower(static_cast<unsigned char>(c))) return std::nullopt;
    char up = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return var_of(std::string_view(&up, 1));
}

std::optional<Var> qpower_base(Var v) {
    char c = var_name(v);
    if (!std::isupper(static_cast<unsigned char>(c))) return std::nullopt;
    char low = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return var_of(std::string_view(&low, 1));
}

Var q_var() {
    static const Var q = var("q");
    return q;
}

// ---------------------------------------------------------------- Mono

bool Mono::divides(const Mono& o) const {
    if (deg > o.deg) return false;
    for (std::size_t i = 0; i < kNumVars; ++i)
        if (e[i] > o.e[i]) return false;
    return true;
}

Mono Mono::operator*(const Mono& o) const {
    Mono r;
    for (std::size_t i = 0; i < kNumVars; ++i) r.e[i] = static_cast<std::uint16_t>(e[i] + o.e[i]);
    r.deg = deg + o.deg;
    return r;
}

Mono Mono::operator/(const Mono& o) const {
    Mono r;
    for (std::size_t i = 0; i < kNumVars; ++i) r.e[i] = static_cast<std::uint16_t>(e[i] - o.e[i]);
    r.deg = deg - o.deg;
    return r;
}

VarMask Mono::mask() const {
    VarMask m = 0;
    for (std::size_t i = 0; i < kNumVars; ++i)
        if (e[i]) m |= mask_of(static_cast<Var>(i));
    return m;
}

bool mono_greater(const Mono& a, const Mono& b) {
    if (a.deg != b.deg) return a.deg > b.deg;
    for (std::size_t i = 0; i < kNumVars; ++i)
        if (a.e[i] != b.e[i]) return a.e[i] > b.e[i];
    return false;
}

// ---------------------------------------------------------------- Poly basics

Poly::Poly(long c) {
    if (c != 0) terms_.emplace_back(Mono{}, Rational(c));
}

Poly::Poly(const Rational& c) {
    if (c != 0) terms_.emplace_back(Mono{}, c);
}

Poly Poly::variable(Var v, unsigned exponent) {
    Mono m;
    m.e[v] = static_cast<std::uint16_t>(exponent);
    m.deg = exponent;
    return monomial(m, Rational(1));
}

Poly Poly::monomial(const Mono& m, const Rational& c) {
    Poly p;
    if (c != 0) p.terms_.emplace_back(m, c);
    return p;
}

Poly Poly::from_terms(std::vector<Term> terms) {
    std::sort(terms.begin(), terms.end(),
              [](const Term& a, const Term& b) { return mono_greater(a.first, b.first); });
    Poly p;
    for (auto& t : terms) {
        if (!p.terms_.empty() && p.terms_.back().first == t.first) {
            p.terms_.back().second += t.second;
            if (p.terms_.back().second == 0) p.terms_.pop_back();
        } else if (t.second != 0) {
            p.terms_.push_back(std::move(t));
        }
    }
    return p;
}

bool Poly::is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].first.deg == 0); }

bool Poly::is_one() const { return terms_.size() == 1 && terms_[0].first.deg == 0 && terms_[0].second == 1; }

Rational Poly::constant_value() const {
    if (!is_constant()) throw AlgebraError("polynomial is not constant: " + str());
    return terms_.empty() ? Rational(0) : terms_[0].second;
}

Rational Poly::constant_term() const {
    if (!terms_.empty() && terms_.back().first.deg == 0) return terms_.back().second;
    return Rational(0);
}

const Rational& Poly::leading_coeff() const {
    if (terms_.empty()) throw AlgebraError("leading coefficient of zero polynomial");
    return terms_.front().second;
}

const Mono& Poly::leading_mono() const {
    if (terms_.empty()) throw AlgebraError("leading monomial of zero polynomial");
    return terms_.front().first;
}

unsigned Poly::degree(Var v) const {
    unsigned d = 0;
    for (const auto& t : terms_) d = std::max<unsigned>(d, t.first.e[v]);
    return d;
}

unsigned Poly::low_degree(Var v) const {
    if (terms_.empty()) return 0;
    unsigned d = ~0u;
    for (const auto& t : terms_) d = std::min<unsigned>(d, t.first.e[v]);
    return d;
}

unsigned Poly::total_degree() const { return terms_.empty() ? 0 : terms_.front().first.deg; }

bool Poly::has_var(Var v) const {
    for (const auto& t : terms_)
        if (t.first.e[v]) return true;
    return false;
}

VarMask Poly::vars() const {
    VarMask m = 0;
    for (const auto& t : terms_) m |= t.first.mask();
    return m;
}

std::vector<Poly> Poly::coefficients_in(Var v) const {
    std::vector<std::vector<Term>> buckets(degree(v) + 1);
    for (const auto& t : terms_) {
        Mono m = t.first;
        unsigned e = m.e[v];
        m.e[v] = 0;
        m.deg -= e;
        buckets[e].emplace_back(m, t.second);
    }
    std::vector<Poly> out;
    out.reserve(buckets.size());
    // Removing v preserves relative grlex order only within equal exponents,
    // so each bucket is re-sorted.
    for (auto& b : buckets) out.push_back(from_terms(std::move(b)));
    if (is_zero()) out.assign(1, Poly());
    return out;
}

Poly Poly::from_coefficients(Var v, const std::vector<Poly>& coeffs) {
    std::vector<Term> all;
    for (std::size_t i = 0; i < coeffs.size(); ++i)
        for (const auto& t : coeffs[i].terms_) {
            Mono m = t.first;
            m.e[v] = static_cast<std::uint16_t>(m.e[v] + i);
            m.deg += static_cast<std::uint32_t>(i);
            all.emplace_back(m, t.second);
        }
    return from_terms(std::move(all));
}

Poly Poly::coefficient(Var v, unsigned i) const {
    std::vector<Term> out;
    for (const auto& t : terms_)
        if (t.first.e[v] == i) {
            Mono m = t.first;
            m.e[v] = 0;
            m.deg -= i;
            out.emplace_back(m, t.second);
        }
    return from_terms(std::move(out));
}

std::map<std::vector<std::uint16_t>, Poly> Poly::collect(VarMask mask) const {
    std::map<std::vector<std::uint16_t>, std::vector<Term>> groups;
    for (const auto& t : terms_) {
        std::vector<std::uint16_t> key;
        Mono rest = t.first;
        for (std::size_t i = 0; i < kNumVars; ++i)
            if (mask & mask_of(static_cast<Var>(i))) {
                key.push_back(t.first.e[i]);
                rest.deg -= rest.e[i];
                rest.e[i] = 0;
            }
        groups[key].emplace_back(rest, t.second);
    }
    std::map<std::vector<std::uint16_t>, Poly> out;
    for (auto& [k, ts] : groups) out.emplace(k, from_terms(std::move(ts)));
    return out;
}

Poly Poly::substitute(Var v, const Poly& value) const {
    if (!has_var(v)) return *this;
    auto cs = coefficients_in(v);
    Poly r = cs.back();
    for (std::size_t i = cs.size() - 1; i-- > 0;) {
        r *= value;
        r += cs[i];
    }
    return r;
}

Poly Poly::substitute(const std::map<Var, Poly>& values) const {
    Poly r = *this;
    for (const auto& [v, p] : values) r = r.substitute(v, p);
    return r;
}

Poly Poly::shift(Var v, long s) const {
    if (s == 0 || !has_var(v)) return *this;
    return substitute(v, variable(v) + Poly(s));
}

Poly Poly::scale_var(Var v, const Poly& factor) const {
    if (!has_var(v)) return *this;
    auto cs = coefficients_in(v);
    Poly r;
    Poly f = 1;
    for (std::size_t i = 0; i < cs.size(); ++i) {
        if (!cs[i].is_zero()) r += cs[i] * f * variable(v, static_cast<unsigned>(i));
        f *= factor;
    }
    return r;
}

Poly Poly::derivative(Var v) const {
    std::vector<Term> out;
    for (const auto& t : terms_) {
        unsigned e = t.first.e[v];
        if (!e) continue;
        Mono m = t.first;
        m.e[v] = static_cast<std::uint16_t>(e - 1);
        m.deg -= 1;
        out.emplace_back(m, t.second * e);
    }
    return from_terms(std::move(out));
}

// ---------------------------------------------------------------- arithmetic

Poly Poly::operator-() const {
    Poly r = *this;
    for (auto& t : r.terms_) t.second = -t.second;
    return r;
}

namespace {

std::vector<Poly::Term> merge_terms(const std::vector<Poly::Term>& a, const std::vector<Poly::Term>& b,
                                    bool subtract) {
    std::vector<Poly::Term> out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && mono_greater(a[i].first, b[j].first))) {
            out.push_back(a[i++]);
        } else if (i == a.size() || mono_greater(b[j].first, a[i].first)) {
            out.emplace_back(b[j].first, subtract ? Rational(-b[j].second) : b[j].second);
            ++j;
        } else {
            Rational c = subtract ? Rational(a[i].second - b[j].second) : Rational(a[i].second + b[j].second);
            if (c != 0) out.emplace_back(a[i].first, std::move(c));
            ++i;
            ++j;
        }
    }
    return out;
}

}  // namespace

Poly& Poly::operator+=(const Poly& o) {
    if (o.is_zero()) return *this;
    if (is_zero()) return *this = o;
    terms_ = merge_terms(terms_, o.terms_, false);
    return *this;
}

Poly& Poly::operator-=(const Poly& o) {
    if (o.is_zero()) return *this;
    terms_ = merge_terms(terms_, o.terms_, true);
    return *this;
}

Poly& Poly::operator*=(const Poly& o) { return *this = *this * o; }

Poly& Poly::operator*=(const Rational& c) {
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& t : terms_) t.second *= c;
    return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly();
    if (b.terms_.size() == 1) {
        Poly r;
        r.terms_.reserve(a.terms_.size());
        const auto& [bm, bc] = b.terms_[0];
        for (const auto& [m, c] : a.terms_) r.terms_.emplace_back(m * bm, c * bc);
        return r;  // multiplying by one monomial preserves the order
    }
    if (a.terms_.size() == 1) return b * a;
    std::vector<Poly::Term> all;
    all.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& [am, ac] : a.terms_)
        for (const auto& [bm, bc] : b.terms_) all.emplace_back(am * bm, ac * bc);
    return Poly::from_terms(std::move(all));
}

bool Poly::operator==(const Poly& o) const {
    if (terms_.size() != o.terms_.size()) return false;
    for (std::size_t i = 0; i < terms_.size(); ++i)
        if (!(terms_[i].first == o.terms_[i].first) || terms_[i].second != o.terms_[i].second) return false;
    return true;
}

Poly Poly::pow(unsigned e) const {
    Poly r = 1, b = *this;
    while (e) {
        if (e & 1u) r *= b;
        e >>= 1;
        if (e) b *= b;
    }
    return r;
}

Rational Poly::content() const {
    if (terms_.empty()) return Rational(0);
    Integer g = 0, l = 1;
    for (const auto& t : terms_) {
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.second.get_num_mpz_t());
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), t.second.get_den_mpz_t());
    }
    Rational c(g, l);
    c.canonicalize();
    return c;
}

Poly Poly::primitive() const {
    if (terms_.empty()) return *this;
    Rational c = content();
    if (leading_coeff() < 0) c = -c;
    Poly r = *this;
    if (c != 1) r *= Rational(1 / c);
    return r;
}

Poly Poly::monic() const {
    if (terms_.empty()) return *this;
    Poly r = *this;
    if (leading_coeff() != 1) r *= Rational(1 / leading_coeff());
    return r;
}

std::string rational_str(const Rational& c) { return c.get_str(); }

std::string Poly::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
        std::string mono;
        for (std::size_t i = 0; i < kNumVars; ++i) {
            if (!m.e[i]) continue;
            if (!mono.empty()) mono += '*';
            mono += kVarTable[i];
            if (m.e[i] > 1) mono += "^" + std::to_string(m.e[i]);
        }
        Rational ac = abs(c);
        std::string body;
        if (mono.empty())
            body = rational_str(ac);
        else if (ac == 1)
            body = mono;
        else
            body = rational_str(ac) + "*" + mono;
        if (first)
            os << (c < 0 ? "-" : "") << body;
        else
            os << (c < 0 ? " - " : " + ") << body;
        first = false;
    }
    return os.str();
}

// ---------------------------------------------------------------- division

std::optional<Poly> try_div(const Poly& a, const Poly& b) {
    if (b.is_zero()) throw AlgebraError("division by zero polynomial");
    if (a.is_zero()) return Poly();
    if (b.is_constant()) return a * Rational(1 / b.constant_value());
    const Mono& lb = b.leading_mono();
    const Rational& lcb = b.leading_coeff();
    // Cheap rejection: every variable degree of a must dominate b's.
    VarMask bm = b.vars();
    for (Var v = 0; v < kNumVars; ++v)
        if ((bm & mask_of(v)) && a.degree(v) < b.degree(v)) return std::nullopt;
    std::vector<Poly::Term> q;
    Poly r = a;
    while (!r.is_zero()) {
        const Mono& lr = r.leading_mono();
        if (!lb.divides(lr)) return std::nullopt;
        Poly t = Poly::monomial(lr / lb, r.leading_coeff() / lcb);
        q.push_back(t.terms()[0]);
        r -= t * b;
    }
    Poly out = Poly::from_terms(std::move(q));
    return out;
}

Poly exact_div(const Poly& a, const Poly& b) {
    auto q = try_div(a, b);
    if (!q) throw AlgebraError("inexact polynomial division: (" + a.str() + ") / (" + b.str() + ")");
    return *q;
}

// ---------------------------------------------------------------- gcd

namespace {

using UPoly = std::vector<Poly>;  // coefficients, index = power

// Cleared only by gcd_prs, which checks the shortcuts against the plain
// remainder sequence.
thread_local bool use_shortcuts = true;

void trim(UPoly& p) {
    while (p.size() > 1 && p.back().is_zero()) p.pop_back();
}

bool uzero(const UPoly& p) { return p.size() == 1 && p[0].is_zero(); }

long udeg(const UPoly& p) { return uzero(p) ? -1 : static_cast<long>(p.size()) - 1; }

UPoly uprem(UPoly a, const UPoly& b) {
    long db = udeg(b);
    const Poly& lcb = b.back();
    long e = udeg(a) - db + 1;
    while (!uzero(a) && udeg(a) >= db) {
        long d = udeg(a) - db;
        Poly t = a.back();
        for (auto& c : a) c *= lcb;
        for (long i = 0; i <= db; ++i) a[static_cast<std::size_t>(i + d)] -= t * b[static_cast<std::size_t>(i)];
        trim(a);
        --e;
    }
    if (e > 0) {
        Poly s = lcb.pow(static_cast<unsigned>(e));
        for (auto& c : a) c *= s;
    }
    return a;
}

Poly gcd_impl(Poly a, Poly b);

Poly ucontent(const UPoly& p) {
    Poly g;
    for (const auto& c : p) {
        if (c.is_zero()) continue;
        g = g.is_zero() ? c.primitive() : gcd_impl(g, c);
        if (g.is_constant()) return Poly(1);
    }
    return g;
}

void udivide(UPoly& p, const Poly& c) {
    if (c.is_one()) return;
    for (auto& x : p)
        if (!x.is_zero()) x = exact_div(x, c);
}

// Polynomial content over Q ignores integer factors, so those are removed
// separately to keep the remainder sequence small.
void uprimitive(UPoly& p) {
    udivide(p, ucontent(p));
    Integer g = 0, l = 1;
    for (const auto& x : p)
        for (const auto& t : x.terms()) {
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.second.get_num_mpz_t());
            mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), t.second.get_den_mpz_t());
        }
    if (g == 0) return;
    Rational c(l, g);
    c.canonicalize();
    if (c != 1)
        for (auto& x : p) x *= c;
}

Poly monomial_gcd(const Poly& mono, const Poly& other) {
    Mono m = mono.leading_mono();
    for (const auto& t : other.terms())
        for (std::size_t i = 0; i < kNumVars; ++i) m.e[i] = std::min(m.e[i], t.first.e[i]);
    m.deg = 0;
    for (auto x : m.e) m.deg += x;
    return Poly::monomial(m, Rational(1));
}

Poly content_wrt(const Poly& p, Var v) { return ucontent(p.coefficients_in(v)); }

// Arithmetic modulo the Mersenne prime 2^61 - 1, used to detect coprime
// inputs cheaply before running the remainder sequence.
constexpr std::uint64_t kPrime = (std::uint64_t{1} << 61) - 1;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b) {
    unsigned __int128 r = static_cast<unsigned __int128>(a) * b;
    std::uint64_t lo = static_cast<std::uint64_t>(r & kPrime), hi = static_cast<std::uint64_t>(r >> 61);
    std::uint64_t s = lo + hi;
    return s >= kPrime ? s - kPrime : s;
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e) {
    std::uint64_t r = 1;
    for (; e; e >>= 1, a = mulmod(a, a))
        if (e & 1) r = mulmod(r, a);
    return r;
}

std::uint64_t invmod(std::uint64_t a) { return powmod(a, kPrime - 2); }

std::optional<std::uint64_t> reduce(const Rational& c) {
    Integer num = c.get_num() % Integer(kPrime), den = c.get_den() % Integer(kPrime);
    if (num < 0) num += Integer(kPrime);
    if (den == 0) return std::nullopt;
    std::uint64_t n = mpz_get_ui(num.get_mpz_t()), d = mpz_get_ui(den.get_mpz_t());
    return mulmod(n, invmod(d));
}

using ModPoly = std::vector<std::uint64_t>;

// Image of p in Z_p[x] after substituting point[v] for every other variable;
// empty when a denominator vanishes mod p.
std::optional<ModPoly> mod_image(const Poly& p, Var x, const std::array<std::uint64_t, kNumVars>& point) {
    ModPoly out(p.degree(x) + 1, 0);
    for (const auto& [m, c] : p.terms()) {
        auto r = reduce(c);
        if (!r) return std::nullopt;
        std::uint64_t t = *r;
        for (std::size_t i = 0; i < kNumVars; ++i)
            if (i != x && m.e[i]) t = mulmod(t, powmod(point[i], m.e[i]));
        std::uint64_t& slot = out[m.e[x]];
        slot += t;
        if (slot >= kPrime) slot -= kPrime;
    }
    return out;
}

long mod_gcd_degree(ModPoly a, ModPoly b) {
    auto strip = [](ModPoly& p) {
        while (!p.empty() && p.back() == 0) p.pop_back();
    };
    strip(a);
    strip(b);
    while (!b.empty()) {
        std::uint64_t inv = invmod(b.back());
        while (a.size() >= b.size()) {
            std::uint64_t f = mulmod(a.back(), inv);
            std::size_t off = a.size() - b.size();
            for (std::size_t i = 0; i < b.size(); ++i) {
                std::uint64_t t = mulmod(f, b[i]);
                std::uint64_t& s = a[off + i];
                s = s >= t ? s - t : s + kPrime - t;
            }
            strip(a);
        }
        std::swap(a, b);
    }
    return static_cast<long>(a.size()) - 1;
}

// True when a and b are certainly coprime: for some shared variable x the
// modular images at a point keeping both x-degrees have a constant gcd.  The
// images of gcd(a, b) divide both images with its x-degree preserved, so a
// constant image gcd for every shared variable proves coprimality.
bool certainly_coprime(const Poly& a, const Poly& b, VarMask shared) {
    std::uint64_t seed = 0x9E3779B97F4A7C15ull;
    auto next = [&]() {
        seed ^= seed << 13;
        seed ^= seed >> 7;
        seed ^= seed << 17;
        return seed % kPrime;
    };
    for (Var x = 0; x < kNumVars; ++x) {
        if (!(shared & mask_of(x))) continue;
        bool decided = false;
        for (int attempt = 0; attempt < 3 && !decided; ++attempt) {
            std::array<std::uint64_t, kNumVars> point{};
            for (auto& v : point) v = next();
            auto ia = mod_image(a, x, point), ib = mod_image(b, x, point);
            if (!ia || !ib) return false;
            if (ia->back() == 0 || ib->back() == 0) continue;
            if (mod_gcd_degree(*ia, *ib) > 0) return false;
            decided = true;
        }
        if (!decided) return false;
    }
    return true;
}

Integer max_norm(const Poly& p) {
    Integer m = 0;
    for (const auto& t : p.terms()) {
        Integer a = abs(t.second.get_num());
        if (a > m) m = a;
    }
    return m;
}

Integer int_content(const Poly& p) {
    Integer g = 0;
    for (const auto& t : p.terms()) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.second.get_num_mpz_t());
    return g;
}

// Inverse of evaluation at x = xi: split every integer coefficient into
// balanced base-xi digits, digit i becoming the coefficient of x^i.
Poly xi_adic(const Poly& g, Var x, const Integer& xi) {
    std::vector<Poly::Term> out;
    Integer half = xi / 2;
    for (const auto& [m, c] : g.terms()) {
        Integer v = c.get_num();
        unsigned i = 0;
        while (v != 0) {
            Integer d = v % xi;  // truncates toward zero
            if (d > half) d -= xi;
            if (d < -half) d += xi;
            if (d != 0) {
                Mono mm = m;
                mm.e[x] = static_cast<std::uint16_t>(mm.e[x] + i);
                mm.deg += i;
                out.emplace_back(mm, Rational(d));
            }
            v = (v - d) / xi;
            ++i;
        }
    }
    return Poly::from_terms(std::move(out));
}

// Heuristic gcd over Z[vars] by evaluation at large integers.  Inputs have
// integer coefficients; the result includes the integer content.  Only
// answers that divide both inputs are returned.
std::optional<Poly> heu_gcd(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return std::nullopt;
    if (a.is_constant() || b.is_constant()) {
        Integer g = gcd(int_content(a), int_content(b));
        return Poly(Rational(g));
    }
    VarMask vars = a.vars() | b.vars();
    Var x = static_cast<Var>(std::countr_zero(vars));
    Integer xi = 2 * std::min(max_norm(a), max_norm(b)) + 29;
    Integer ic = gcd(int_content(a), int_content(b));
    for (int attempt = 0; attempt < 6; ++attempt) {
        if (mpz_sizeinbase(xi.get_mpz_t(), 2) > 4096) break;
        Poly ea = a.substitute(x, Poly(Rational(xi))), eb = b.substitute(x, Poly(Rational(xi)));
        if (auto g = heu_gcd(ea, eb)) {
            Poly cand = xi_adic(*g, x, xi);
            if (!cand.is_zero()) {
                cand = cand.primitive();
                if (try_div(a, cand) && try_div(b, cand)) return cand * Rational(ic);
            }
        }
        xi = xi * 73794 / 27011;
    }
    return std::nullopt;
}

Poly gcd_impl(Poly a, Poly b) {
    if (a.is_zero()) return b.primitive();
    if (b.is_zero()) return a.primitive();
    if (a.is_constant() || b.is_constant()) return Poly(1);
    if (a.size() == 1) return monomial_gcd(a, b);
    if (b.size() == 1) return monomial_gcd(b, a);
    a = a.primitive();
    b = b.primitive();
    if (a == b) return a;
    // Variables present in only one input contribute only through contents.
    for (;;) {
        VarMask ma = a.vars(), mb = b.vars();
        if (ma == mb) break;
        VarMask only = ma ^ mb;
        Var v = static_cast<Var>(std::countr_zero(only));
        if (ma & mask_of(v))
            a = content_wrt(a, v);
        else
            b = content_wrt(b, v);
        if (a.is_constant() || b.is_constant()) return Poly(1);
        if (a.size() == 1) return monomial_gcd(a, b);
        if (b.size() == 1) return monomial_gcd(b, a);
    }
    if (a.total_degree() >= b.total_degree()) {
        if (auto q = try_div(a, b)) return b.primitive();
    } else if (auto q = try_div(b, a)) {
        return a.primitive();
    }
    VarMask shared = a.vars();
    if (use_shortcuts) {
        if (certainly_coprime(a, b, shared)) return Poly(1);
        if (auto g = heu_gcd(a, b)) return g->primitive();
    }
    Var best = 0;
    unsigned best_deg = ~0u;
    for (Var v = 0; v < kNumVars; ++v)
        if (shared & mask_of(v)) {
            unsigned d = std::max(a.degree(v), b.degree(v));
            if (d < best_deg) {
                best_deg = d;
                best = v;
            }
        }
    UPoly ua = a.coefficients_in(best), ub = b.coefficients_in(best);
    Poly ca = ucontent(ua), cb = ucontent(ub);
    Poly c = gcd_impl(ca, cb);
    udivide(ua, ca);
    udivide(ub, cb);
    uprimitive(ua);
    uprimitive(ub);
    if (udeg(ua) < udeg(ub)) std::swap(ua, ub);
    while (!uzero(ub)) {
        UPoly r = uprem(ua, ub);
        trim(r);
        ua = std::move(ub);
        if (!uzero(r)) uprimitive(r);
        ub = std::move(r);
    }
    if (udeg(ua) == 0) return c.primitive();
    udivide(ua, ucontent(ua));
    return (c * Poly::from_coefficients(best, ua)).primitive();
}

}  // namespace

Poly gcd(const Poly& a, const Poly& b) { return gcd_impl(a, b); }

Poly content_in(const Poly& p, Var v) { return p.is_zero() ? Poly() : content_wrt(p, v); }

Poly gcd_prs(const Poly& a, const Poly& b) {
    struct Restore {
        ~Restore() { use_shortcuts = true; }
    } restore;
    use_shortcuts = false;
    return gcd_impl(a, b);
}

Poly prem(const Poly& a, const Poly& b, Var v) {
    UPoly r = uprem(a.coefficients_in(v), b.coefficients_in(v));
    trim(r);
    return Poly::from_coefficients(v, r);
}

Poly gcd_euclid_univariate(const Poly& a, const Poly& b, Var v) {
    // Plain Euclid over Q[v] with monic normalization at every step.
    Poly x = a, y = b;
    while (!y.is_zero()) {
        Poly r = x;
        unsigned dy = y.degree(v);
        Rational lcy = y.coefficient(v, dy).constant_value();
        while (!r.is_zero() && r.degree(v) >= dy) {
            unsigned dr = r.degree(v);
            Rational c = r.coefficient(v, dr).constant_value() / lcy;
            r -= y * Poly::variable(v, dr - dy) * c;
        }
        x = y;
        y = r;
    }
    return x.primitive();
}

namespace {

Poly bareiss_det(std::vector<std::vector<Poly>> m) {
    std::size_t n = m.size();
    if (n == 0) return Poly(1);
    Poly prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k].is_zero()) {
            std::size_t p = k + 1;
            while (p < n && m[p][k].is_zero()) ++p;
            if (p == n) return Poly();
            std::swap(m[k], m[p]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                Poly t = m[k][k] * m[i][j] - m[i][k] * m[k][j];
                m[i][j] = prev.is_one() ? t : exact_div(t, prev);
            }
            m[i][k] = Poly();
        }
        prev = m[k][k];
    }
    Poly d = m[n - 1][n - 1];
    return sign < 0 ? -d : d;
}

}  // namespace

Poly resultant(const Poly& a, const Poly& b, Var v) {
    if (a.is_zero() || b.is_zero()) return Poly();
    unsigned da = a.degree(v), db = b.degree(v);
    if (da == 0) return a.pow(db);
    if (db == 0) return b.pow(da);
    auto ca = a.coefficients_in(v), cb = b.coefficients_in(v);
    std::size_t n = da + db;
    std::vector<std::vector<Poly>> s(n, std::vector<Poly>(n));
    for (std::size_t i = 0; i < db; ++i)
        for (std::size_t j = 0; j <= da; ++j) s[i][i + j] = ca[da - j];
    for (std::size_t i = 0; i < da; ++i)
        for (std::size_t j = 0; j <= db; ++j) s[db + i][i + j] = cb[db - j];
    return bareiss_det(std::move(s));
}

std::ostream& operator<<(std::ostream& os, const Poly& p) { return os << p.str(); }

}  // namespace rt
