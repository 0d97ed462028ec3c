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

// Proving identities: exact evaluation, recurrence derivation, certificate
// checking, and proof objects.

#ifndef RT_PROVER_HPP
#define RT_PROVER_HPP

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rt/applicability.hpp"
#include "rt/residue.hpp"
#include "rt/telescope.hpp"

namespace rt {

// ------------------------------------------------------------ evaluation

/// Exact value with the discrete variables taken from `point`; other
/// symbols stay symbolic.  Sequences come from their recurrence oracles.
/// A pole (negative factorial in a numerator, division by zero) throws.
RatFunc eval_expr(const ExprPtr& e, const IntPoint& point);
/// Finite sum over summation_range.
RatFunc eval_sum(const ExprPtr& sum, const IntPoint& point);
/// The right side, with the when/else split applied.
RatFunc eval_rhs(const Identity& id, const IntPoint& point);

/// Index arguments written as normalized linear expressions.
ExprPtr normalize_indices(const ExprPtr& e);
/// The sum with each parameter v replaced by v + shift[v].
ExprPtr shift_sum(const ExprPtr& sum, const std::map<Var, long>& shift);

// ------------------------------------------------------------ recurrences

enum class RecurrenceMode { Ordinary, Q, Derivative, AuxPolynomial };
std::string mode_name(RecurrenceMode m);

struct SearchOptions {
    std::optional<ShiftSet> shifts;  // fixed family instead of the search
    int aux_degree = 0;              // > 0: coefficients polynomial in the aux
};

/// A term c * sum of the operator read back on sums (aux-polynomial mode).
struct RelationTerm {
    Poly coefficient;
    ExprPtr sum;
};

struct Recurrence {
    ExprPtr sum;
    ResidueSum rs;
    ShiftSet family;
    std::vector<Poly> coeffs;
    RatFunc certificate;
    Route route = Route::ExtendedZeilberger;
    RecurrenceMode mode = RecurrenceMode::Ordinary;
    std::optional<Var> derivative;  // d/dx of the derivative members
    std::vector<bool> differentiated;
    std::optional<ApplicabilityReport> applicability;
    std::vector<std::string> searched;
    std::vector<RelationTerm> relation;

    /// Discrete parameters in table order.
    std::vector<Var> params() const;
    std::string operator_text(const std::string& name = "L") const;
    std::string relation_text() const;
};

class SearchExhausted : public std::runtime_error {
public:
    explicit SearchExhausted(std::vector<std::string> searched);
    const std::vector<std::string>& searched() const { return searched_; }

private:
    std::vector<std::string> searched_;
};

/// Families tried in order: unit box, unit box widened to 0..2 in one
/// parameter, box of side 2 (for at most two parameters).  One parameter:
/// orders 1..4.
std::vector<ShiftSet> search_families(const std::vector<Var>& params);

/// The rational factor d/dx contributes to t: t' = multiplier * t.
RatFunc derivative_multiplier(const HyperTerm& t, Var x);

Recurrence derive_recurrence(const ExprPtr& sum, const SearchOptions& opts = {});

/// sum_alpha p_alpha F_alpha / F = rho R(k+1) - R(k), as an exact identity.
bool check_certificate(const HyperTerm& base, const ShiftSet& family, const std::vector<Poly>& coeffs,
                       const RatFunc& certificate, Var k);
bool check_certificate(const Recurrence& rec);

/// Evidence that G = R F vanishes outside the summation window, with grid
/// probes over 0..grid_max for each parameter.
BoundaryEvidence recurrence_boundary(const Recurrence& rec, long grid_max);

struct GridReport {
    bool ok = true;
    std::size_t points = 0;
    std::string detail;
};

/// The operator applied to the oracle-evaluated sum vanishes on the grid
/// (points where a shifted sum cannot be evaluated are skipped).
GridReport annihilates_on_grid(const Recurrence& rec, long grid_max);

// ----------------------------------------------------------------- proofs

struct ValueCheck {
    IntPoint point;
    RatFunc lhs, rhs;
    bool match() const { return lhs == rhs; }
};

struct RhsCheck {
    std::string method;  // "symbolic" or "grid"
    bool passed = false;
    std::string detail;
};

enum class Verdict { Proved, Refuted, Inconclusive };
std::string verdict_name(Verdict v);
int exit_code(Verdict v);

struct ProveOptions {
    long grid_max = 10;
    std::map<Var, long> grid_bounds;  // per-parameter override of grid_max
    SearchOptions search;
};

struct Proof {
    std::string text;
    Identity identity;
    std::optional<Recurrence> recurrence;
    bool certificate_ok = false;
    BoundaryEvidence boundary;
    GridReport annihilation;
    RhsCheck rhs;
    std::vector<ValueCheck> initial_values;
    std::size_t grid_points = 0;
    std::vector<ValueCheck> mismatches;
    Verdict verdict = Verdict::Inconclusive;
    std::string reason;
    long grid_max = 10;
};

Proof prove_identity(const std::string& text, const ProveOptions& opts = {});

/// RT_GRID_MAX if set to a positive integer, else 10.
long grid_max_from_env();

// ------------------------------------------------------------------- JSON

using Json = nlohmann::ordered_json;

Json to_json(const Recurrence& rec);
Json to_json(const Proof& proof);

struct CheckReport {
    bool ok = false;
    std::vector<std::string> lines;
};

/// Rebuilds the base term from the recorded sum and re-runs the certificate,
/// boundary and grid checks independently of how the certificate was found.
CheckReport check_json(const Json& cert, long grid_max);

}  // namespace rt

#endif  // RT_PROVER_HPP
