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

// Sequences with residue representations, and rewriting sums over them as
// residues of hypergeometric terms.

#ifndef RT_RESIDUE_HPP
#define RT_RESIDUE_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rt/dsl.hpp"
#include "rt/hyperterm.hpp"
#include "rt/laurent.hpp"

namespace rt {

enum class SequenceKind {
    StirlingFirst,    // S1(a, b), signed: (z)_a = sum_b S1(a, b) z^b
    StirlingSecond,   // S2(a, b)
    QStirlingFirst,   // qS1(a, b)
    QStirlingSecond,  // qS2(a, b)
    PowerSeq,         // c^e with c depending on the summation variable
    BernoulliNumber,  // bernoulli(a)
    BernoulliPoly,    // bernpoly(a, x)
};

struct CatalogEntry {
    SequenceKind kind;
    std::string name;            // DSL spelling
    std::string signature;       // e.g. "S2(a, b)"
    std::string representation;  // residue representation, human readable
    std::string oracle;          // the defining recurrence used for evaluation
};

const std::vector<CatalogEntry>& catalog();
const CatalogEntry& catalog_entry(SequenceKind kind);
std::optional<SequenceKind> sequence_kind(const std::string& name);

/// A term whose residue in `aux` is the sequence value.  For PowerSeq the
/// indices are (base, exponent); `x` is the argument of BernoulliPoly.
HyperTerm residue_rep(SequenceKind kind, const std::vector<LinExpr>& indices, Var aux,
                      const RatFunc& x = RatFunc());

/// Exact value from the triangular recurrence (zero outside the natural
/// support).  Independent of the residue machinery.
RatFunc eval_sequence(SequenceKind kind, const std::vector<long>& indices, const RatFunc& x = RatFunc());

struct SequenceFactor {
    SequenceKind kind;
    std::vector<LinExpr> indices;
    RatFunc x;              // BernoulliPoly argument
    Var aux = 0;
    std::size_t call_index = 0;  // position among sequence calls in the body
};

struct ResidueSum {
    ExprPtr sum;  // the original sum
    Var k = 0;
    HyperTerm base;
    std::vector<Var> aux;  // introduction order; residues are taken last-first
    std::vector<SequenceFactor> factors;
    VarMask params = 0;   // discrete parameters
    VarMask symbols = 0;  // continuous symbols, q included
};

/// Throws AlgebraError for an uncatalogued or malformed factor.
ResidueSum rewrite_sum(const ExprPtr& sum);

/// The summand with aux^j folded into the sequence factor introduced with aux,
/// e.g. z S2(a, b) -> S2(a - 1, b); Bernoulli kernels pick up a falling
/// factorial.  `body` must have the shape of the original summand.
ExprPtr absorb_aux_power(const ResidueSum& rs, const ExprPtr& body, Var aux, long j);

/// Laurent expansion in aux of the kernel with all discrete variables fixed.
LaurentSeries<RatFunc> kernel_series(const HyperTerm& kernel, const IntPoint& point, Var aux, int order,
                                     ProductExtension ext = ProductExtension::Strict);

/// res_{aux_1} ... res_{aux_r} of the kernel at the point; the last aux is
/// taken first.
RatFunc residue_value(const HyperTerm& kernel, const IntPoint& point, const std::vector<Var>& aux,
                      ProductExtension ext = ProductExtension::Strict);

/// Coefficient of aux^-1 of a rational function expanded at aux = 0.
RatFunc residue_of(const RatFunc& f, Var aux);

/// Summation range of k at a point: the explicit bounds if present,
/// intersected with the natural support read off the summand.
std::pair<long, long> summation_range(const ExprPtr& sum, const IntPoint& point);
/// Whether the natural support of the summand is bounded on both sides for
/// generic nonnegative parameters.
bool has_finite_support(const ExprPtr& sum);

enum class BoundaryVerdict { VanishesSymbolically, VanishesOnGrid, Unknown };
std::string verdict_name(BoundaryVerdict v);

struct BoundaryEvidence {
    BoundaryVerdict verdict = BoundaryVerdict::Unknown;
    std::string witness;
};

/// Points where G = R F must vanish: just outside the summation range.
struct BoundaryProbe {
    IntPoint point;  // parameters and continuous specialisations
    long below = 0;
    long above = 0;
};

/// Whether G = certificate * base vanishes outside a finite window of k.
/// The symbolic test looks for zero-forcing factors after removable
/// rewriting; otherwise the probes are evaluated, taking the residue in
/// `aux` when G has no opaque factor and a one-parameter limit at removable
/// singularities.
BoundaryEvidence boundary_vanishes(const HyperTerm& base, const RatFunc& certificate, Var k,
                                   const std::vector<BoundaryProbe>& probes = {}, const std::vector<Var>& aux = {});

}  // namespace rt

#endif  // RT_RESIDUE_HPP
