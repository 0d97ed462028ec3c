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

// Identities and sums shared by the test suites.

#ifndef RT_TESTS_CORPUS_HPP
#define RT_TESTS_CORPUS_HPP

#include <string>
#include <vector>

namespace rt::corpus {

inline const std::string kStirlingPascal = "sum(k, binom(n,k)*S2(k,m)) == S2(n+1,m+1)";
inline const std::string kStirlingConvolution =
    "sum(k, binom(n,k)*S2(k,l)*S2(n-k,m)) == binom(l+m,l)*S2(n,l+m)";
inline const std::string kStirlingInverse = "sum(k, S1(k,m)*S2(n+1,k+1)) == binom(n,m)";
inline const std::string kDoubleFactorial =
    "sum(k=-m..n, (-1)^k*binom(2*n,n+k)*S1(n+k,k+m)) == dfact(2*n-1) when m==0 else 0";
inline const std::string kAlternatingStirling =
    "sum(k=0..n, binom(n+m+1,k)*(-1)^k*S2(n+m-k,n-k)) == (-1)^(n+m)*fact(m) for m <= n";
inline const std::string kPowers = "sum(k, binom(m,k)*k^n*(-1)^(m-k)) == fact(m)*S2(n,m)";
inline const std::string kBernoulliAddition = "sum(k, binom(n,k)*y^(n-k)*bernpoly(k,x)) == bernpoly(n,x+y)";
inline const std::string kFalseClaim = "sum(k, binom(n,k)*S2(k,m)) == S2(n+1,m)";

inline const std::string kQFirstSum = "sum(k=m..n, (-1)^(n-k)*qbinom(k,m)*qS1(n,k)*q^(-k))";
inline const std::string kQSecondSum = "sum(k=0..n, (-1)^(n-k)*qbinom(n,k)*qS2(k,m)*q^(-k))";
inline const std::string kBernoulliShift = "sum(k, binom(n,k-m)*bernoulli(k))";

inline const std::vector<std::string>& identities() {
    static const std::vector<std::string> v = {kStirlingPascal, kStirlingConvolution, kStirlingInverse,
                                               kDoubleFactorial, kAlternatingStirling,        kPowers,
                                               kBernoulliAddition, kFalseClaim};
    return v;
}

inline const std::vector<std::string>& sums() {
    static const std::vector<std::string> v = {kQFirstSum, kQSecondSum, kBernoulliShift,
                                               "sum(k, qbinom(k,m)*qS1(n,k)*(-1)^(n-k)*q^(-k))"};
    return v;
}

}  // namespace rt::corpus

#endif  // RT_TESTS_CORPUS_HPP
