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

// Command-line front end: prove, recurrence, check, eval, analyze, catalog.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "rt/prover.hpp"

namespace {

using namespace rt;

constexpr int kExitUsage = 64;
constexpr int kExitFailure = 1;

// "n:1,m:2" -> the box 0..1 x 0..2 over n and m.
ShiftSet parse_box(const std::string& text) {
    std::map<Var, long> reach;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto colon = item.find(':');
        if (colon == std::string::npos) throw std::invalid_argument("expected name:depth in '" + item + "'");
        long d = std::stol(item.substr(colon + 1));
        if (d < 0) throw std::invalid_argument("negative depth in '" + item + "'");
        reach[var(item.substr(0, colon))] = d;
    }
    ShiftSet box = {FamilyMember{}};
    for (const auto& [v, d] : reach) {
        ShiftSet next;
        for (const auto& mem : box)
            for (long s = 0; s <= d; ++s) {
                FamilyMember f = mem;
                if (s) f.shift[v] = s;
                next.push_back(f);
            }
        box = next;
    }
    return box;
}

// "n=3,m=2"
IntPoint parse_point(const std::string& text) {
    IntPoint p;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("expected name=value in '" + item + "'");
        p[var(item.substr(0, eq))] = std::stol(item.substr(eq + 1));
    }
    return p;
}

int emit(const Json& j, const std::string& out) {
    if (out.empty()) {
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    std::ofstream f(out);
    if (!f) {
        std::cerr << "error: cannot write " << out << "\n";
        return kExitFailure;
    }
    f << j.dump(2) << "\n";
    return 0;
}

std::string searched_report(const SearchExhausted& e) {
    std::string s = std::string(e.what()) + "\n";
    for (const auto& f : e.searched()) s += "  searched " + f + "\n";
    return s;
}

Json gp_json(const GPForm& gp) {
    return {{"u", gp.u.str()}, {"A", gp.A.str()}, {"B", gp.B.str()}, {"C", gp.C.str()}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Proves combinatorial sum identities by formal residues and creative telescoping"};
    app.require_subcommand(1);

    std::string text, out, shifts, at, path;
    int aux_degree = 0;
    long grid = grid_max_from_env();

    auto* prove = app.add_subcommand("prove", "derive, certify and verify an identity");
    prove->add_option("identity", text, "identity, e.g. \"sum(k, binom(n,k)*S2(k,m)) == S2(n+1,m+1)\"")->required();
    prove->add_option("--grid", grid, "verification grid bound per parameter (default RT_GRID_MAX or 10)");
    prove->add_option("--shifts", shifts, "fixed shift box, e.g. n:1,m:2");
    prove->add_option("--out", out, "write the proof JSON here instead of stdout");

    auto* recurrence = app.add_subcommand("recurrence", "derive a recurrence and certificate for a sum");
    recurrence->add_option("sum", text, "sum, e.g. \"sum(k, binom(n,k)*S2(k,m))\"")->required();
    recurrence->add_option("--shifts", shifts, "fixed shift box, e.g. n:1,m:2");
    recurrence->add_option("--aux-degree", aux_degree, "allow coefficients of this degree in the residue variable");
    recurrence->add_option("--out", out, "write the certificate JSON here instead of stdout");

    auto* check = app.add_subcommand("check", "re-verify a certificate independently");
    check->add_option("certificate", path, "certificate JSON file")->required();
    check->add_option("--grid", grid, "grid bound for the boundary and annihilation checks");

    auto* eval = app.add_subcommand("eval", "exact value of a sum or expression");
    eval->add_option("expr", text, "sum or expression")->required();
    eval->add_option("--at", at, "parameter values, e.g. n=3,m=2");

    auto* analyze = app.add_subcommand("analyze", "applicability report for a sum");
    analyze->add_option("sum", text, "sum")->required();
    analyze->add_option("--shifts", shifts, "shift box (default: unit box over the parameters)");
    analyze->add_option("--out", out, "write the report JSON here instead of stdout");

    app.add_subcommand("catalog", "list sequence kinds and their residue representations");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*prove) {
            ProveOptions o;
            o.grid_max = grid;
            if (!shifts.empty()) o.search.shifts = parse_box(shifts);
            Proof pf = prove_identity(text, o);
            std::cerr << verdict_name(pf.verdict) << ": " << pf.reason << "\n";
            if (int rc = emit(to_json(pf), out)) return rc;
            return exit_code(pf.verdict);
        }
        if (*recurrence) {
            SearchOptions o;
            o.aux_degree = aux_degree;
            if (!shifts.empty()) o.shifts = parse_box(shifts);
            try {
                return emit(to_json(derive_recurrence(parse_sum(text), o)), out);
            } catch (const SearchExhausted& e) {
                std::cerr << searched_report(e);
                return exit_code(Verdict::Inconclusive);
            }
        }
        if (*check) {
            std::ifstream f(path);
            if (!f) {
                std::cerr << "error: cannot read " << path << "\n";
                return kExitFailure;
            }
            Json j;
            try {
                j = Json::parse(f);
            } catch (const Json::parse_error& e) {
                std::cerr << "error: " << path << " is not JSON: " << e.what() << "\n";
                return kExitFailure;
            }
            CheckReport rep = check_json(j, grid);
            for (const auto& line : rep.lines) std::cout << line << "\n";
            std::cout << (rep.ok ? "certificate accepted" : "certificate rejected") << "\n";
            return rep.ok ? 0 : kExitFailure;
        }
        if (*eval) {
            IntPoint p = at.empty() ? IntPoint{} : parse_point(at);
            std::cout << eval_expr(parse_expr(text), p).str() << "\n";
            return 0;
        }
        if (*analyze) {
            ExprPtr sum = parse_sum(text);
            ResidueSum rs = rewrite_sum(sum);
            std::vector<Var> params;
            for (Var v = 0; v < kNumVars; ++v)
                if (rs.params & mask_of(v)) params.push_back(v);
            ShiftSet family = shifts.empty() ? shift_box(params, 1) : parse_box(shifts);
            ApplicabilityReport rep = analyze_sum(rs, family);
            Json j;
            j["schema"] = 1;
            j["kind"] = "applicability";
            j["sum"] = render(sum);
            j["base_term"] = rs.base.str();
            j["summand"] = rep.summand.str();
            j["kernel_class"] = kernel_class_name(rep.kernel_class);
            j["skeleton"] = rep.skeleton.str();
            j["gp_form"] = gp_json(rep.gp);
            j["verdict"] = applicability_name(rep.verdict);
            j["route"] = route_name(rep.route);
            j["reason"] = rep.reason;
            j["cfinite"] = cfinite_name(cfinite_witness(rep.skeleton, rs.k));
            try {
                SearchOptions o;
                if (!shifts.empty()) o.shifts = family;
                Recurrence rec = derive_recurrence(sum, o);
                j["operator"] = rec.operator_text();
                j["coefficients"] = Json::array();
                for (const auto& c : rec.coeffs) j["coefficients"].push_back(c.str());
            } catch (const SearchExhausted& e) {
                j["operator"] = nullptr;
                j["searched"] = e.searched();
            }
            return emit(j, out);
        }
        for (const auto& e : catalog()) {
            std::cout << e.signature << "\n"
                      << "  residue: " << e.representation << "\n"
                      << "  oracle:  " << e.oracle << "\n";
        }
        return 0;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(Verdict::Inconclusive);
    }
}
