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

#ifndef RT_ROOTS_HPP
#define RT_ROOTS_HPP

#include <set>

#include "rt/poly.hpp"

namespace rt {

/// Integer roots of a nonzero univariate polynomial over Q, found from the
/// divisors of the trailing coefficient of the primitive part.
std::set<long> integer_roots(const Poly& p);

/// Same, for a polynomial whose only variable is v (other variables are an
/// error).
std::set<long> integer_roots(const Poly& p, Var v);

}  // namespace rt

#endif  // RT_ROOTS_HPP
