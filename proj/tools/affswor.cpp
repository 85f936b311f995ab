// Command-line front end: feasibility/variance analysis, polytope geometry
// exports, stratified sampling, and the self-check suites.
//
// Exit codes: 0 success, 1 I/O or malformed input, 2 infeasible design or
// violated precondition.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "affswor/design.hpp"
#include "affswor/json_io.hpp"
#include "affswor/polytope.hpp"
#include "affswor/sampler.hpp"
#include "affswor/variance.hpp"
#include "affswor/verify.hpp"

using json = nlohmann::ordered_json;
using namespace affswor;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitInfeasible = 2;

double default_tol() {
    if (const char* env = std::getenv("AFFSWOR_TOL")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end != env && v > 0.0) return v;
        std::cerr << "warning: ignoring invalid AFFSWOR_TOL='" << env << "'\n";
    }
    return 1e-9;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open input file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw InputError("file '" + path + "' is not valid JSON: " + e.what());
    }
    return j;
}

std::vector<double> parse_x_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) throw InputError("flag --x: empty entry in list");
        out.push_back(to_double(parse_rational(tok)));
    }
    if (out.empty()) throw InputError("flag --x: no values given");
    return out;
}

/// Scales an eigenvector so its maximum-absolute entry becomes exactly 1.
std::vector<double> normalize_witness(std::vector<double> v) {
    std::size_t arg = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
    const double s = v[arg];
    for (auto& vi : v) vi /= s;
    return v;
}

json spectral_to_json(const SpectralReport& rep) {
    json out;
    out["eigenvalues"] = rep.eigenvalues;
    out["min_eigenvalue"] = rep.min_eigenvalue;
    out["verdict"] = to_string(rep.verdict);
    if (rep.witness) out["witness"] = normalize_witness(*rep.witness);
    return out;
}

void emit_kv(std::ostream& os, const json& j, const std::string& prefix, const char* sep) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) emit_kv(os, v, prefix.empty() ? k : prefix + "." + k, sep);
    } else if (j.is_array()) {
        bool scalar = true;
        for (const auto& v : j) scalar = scalar && !v.is_structured();
        if (scalar) {
            std::string joined;
            for (const auto& v : j) {
                if (!joined.empty()) joined += ';';
                joined += v.is_string() ? v.get<std::string>() : v.dump();
            }
            os << prefix << sep << joined << "\n";
        } else {
            std::size_t i = 0;
            for (const auto& v : j) emit_kv(os, v, prefix + "[" + std::to_string(i++) + "]", sep);
        }
    } else {
        os << prefix << sep << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
    }
}

void print_report(const json& report, const std::string& format) {
    if (format == "json") {
        std::cout << report.dump(2) << "\n";
    } else if (format == "csv") {
        std::cout << "key,value\n";
        emit_kv(std::cout, report, "", ",");
    } else {
        emit_kv(std::cout, report, "", " = ");
    }
}

// --------------------------------------------------------------------------
// analyze
// --------------------------------------------------------------------------

template <class S>
json analyze_population(const PopulationInput& in, const std::vector<S>& weights,
                        const std::optional<std::vector<double>>& x, double tol, bool* feasible_out) {
    json report;
    report["input"]["p"] = rationals_to_json(in.p);
    report["input"]["n"] = in.n;
    report["mode"] = ScalarTraits<S>::mode_name;
    report["tolerance"] = tol;

    const ProbabilityVector<S> p(weights);
    const auto chk = existence_check(p, in.n);
    *feasible_out = chk.feasible;
    report["feasible"] = chk.feasible;
    if constexpr (ScalarTraits<S>::exact)
        report["margin"] = to_fraction_string(chk.margin);
    else
        report["margin"] = chk.margin;
    json viol = json::array();
    for (int i : chk.min_subset) viol.push_back(i + 1);
    report["min_weight_labels"] = viol;

    const auto cond = sufficient_condition(p);
    report["sufficient_condition"]["verdict"] =
        cond.verdict == SufficientVerdict::GUARANTEED_PSD ? "GUARANTEED_PSD" : "UNDECIDED";
    if constexpr (ScalarTraits<S>::exact) {
        report["sufficient_condition"]["threshold"] = to_fraction_string(cond.threshold);
        report["sufficient_condition"]["smallest_two"] = to_fraction_string(cond.smallest_two);
    } else {
        report["sufficient_condition"]["threshold"] = cond.threshold;
        report["sufficient_condition"]["smallest_two"] = cond.smallest_two;
    }

    // pairwise pmf matrix (uses the (N,2) coefficients whatever n is)
    {
        const CoeffPair c2 = coeff_pair(p.size(), 2);
        json rows = json::array();
        for (int u = 0; u < p.size(); ++u) {
            json row = json::array();
            for (int v = 0; v < p.size(); ++v) {
                if constexpr (ScalarTraits<S>::exact) {
                    const Rational duv = u == v ? Rational(0) : Rational(c2.a + c2.b * (p[u] + p[v]));
                    row.push_back(to_fraction_string(duv));
                } else {
                    row.push_back(u == v ? 0.0 : c2.a.template convert_to<double>() +
                                                     c2.b.template convert_to<double>() * (p[u] + p[v]));
                }
            }
            rows.push_back(std::move(row));
        }
        report["delta_matrix"] = std::move(rows);
    }

    const SpectralReport gamma_rep = symmetric_eigenvalues(
        [&] {
            if constexpr (ScalarTraits<S>::exact)
                return gamma_matrix(p).to_float();
            else
                return gamma_matrix(p);
        }(),
        tol);
    report["gamma"] = spectral_to_json(gamma_rep);

    std::optional<SpectralReport> psi_rep;
    if (p.all_positive()) {
        psi_rep = symmetric_eigenvalues(
            [&] {
                if constexpr (ScalarTraits<S>::exact)
                    return psi_matrix(p).to_float();
                else
                    return psi_matrix(p);
            }(),
            tol);
        report["psi"] = spectral_to_json(*psi_rep);
        report["psd_verdict"] = to_string(psi_rep->verdict);
    } else {
        report["psi"] = nullptr;
        report["psi_note"] = "some weights are zero; Psi is undefined there, see gamma";
        report["psd_verdict"] = to_string(gamma_rep.verdict);
    }

    if (chk.feasible && p.all_positive()) {
        const AffineDesign<S> design(p, in.n);
        auto variances = [&](const std::vector<double>& xs) {
            const PopulationValues<S> pv(p, xs);
            json v;
            v["x"] = xs;
            v["with_replacement"] = variance_with_replacement(pv, in.n);
            v["without_replacement"] = variance_without_replacement(pv, design);
            return v;
        };
        if (x) report["variance"] = variances(*x);
        if (psi_rep && psi_rep->witness) report["witness_variance"] = variances(normalize_witness(*psi_rep->witness));
    }
    return report;
}

int cmd_analyze(const std::string& file, std::optional<int> n_flag, const std::string& x_csv,
                double tol, const std::string& format, const std::string& mode) {
    PopulationInput in = load_population(load_json_file(file));
    if (n_flag) in.n = *n_flag;
    std::optional<std::vector<double>> x = in.x;
    if (!x_csv.empty()) x = parse_x_list(x_csv);
    if (x && x->size() != in.p.size()) throw InputError("flag --x: length must match the population size");

    bool feasible = false;
    json report;
    if (mode == "rational")
        report = analyze_population<Rational>(in, in.p, x, tol, &feasible);
    else
        report = analyze_population<double>(in, in.p_float(), x, tol, &feasible);
    print_report(report, format);
    return feasible ? kExitOk : kExitInfeasible;
}

// --------------------------------------------------------------------------
// polytope
// --------------------------------------------------------------------------

int cmd_polytope(int N, int n, const std::string& emit, double tol) {
    json out;
    out["N"] = N;
    if (emit == "counterexample") {
        const auto ce = theorem7_counterexample(N, tol);
        out["p"] = rationals_to_json(ce.p.weights());
        out["gamma_eigenvalues"] = ce.gamma_report.eigenvalues;
        out["min_eigenvalue"] = ce.gamma_report.min_eigenvalue;
        out["lambda_closed_form"] = ce.lambda;
        out["verdict"] = to_string(ce.gamma_report.verdict);
        std::cout << out.dump(2) << "\n";
        return kExitOk;
    }
    out["n"] = n;
    const auto verts = vertices(N, n);
    if (emit == "vertices") {
        json arr = json::array();
        for (int id = 0; id < static_cast<int>(verts.size()); ++id) {
            const auto& v = verts[static_cast<std::size_t>(id)];
            json jv;
            jv["id"] = id;
            jv["kind"] = v.kind == VertexKind::ZERO ? "zero" : "one_over_n";
            jv["pivot"] = v.pivot + 1;
            jv["coords"] = rationals_to_json(v.coords);
            arr.push_back(std::move(jv));
        }
        out["count"] = verts.size();
        out["vertices"] = std::move(arr);
    } else if (emit == "facets") {
        json arr = json::array();
        for (const auto& f : facets(N, n)) {
            json jf;
            json subset = json::array();
            for (int i : f.subset) subset.push_back(i + 1);
            jf["subset"] = std::move(subset);
            jf["vertex_ids"] = f.vertex_ids;
            arr.push_back(std::move(jf));
        }
        out["count"] = arr.size();
        out["facets"] = std::move(arr);
    } else if (emit == "adjacency") {
        json arr = json::array();
        for (std::size_t i = 0; i < verts.size(); ++i)
            for (std::size_t j = i + 1; j < verts.size(); ++j)
                if (adjacent(verts[i], verts[j], N, n)) arr.push_back({i, j});
        out["edges"] = std::move(arr);
    } else {
        throw InputError("flag --emit: expected vertices, facets, adjacency, or counterexample");
    }
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

// --------------------------------------------------------------------------
// sample
// --------------------------------------------------------------------------

int cmd_sample(const std::string& file, long draws, std::optional<std::uint64_t> seed_flag, bool stats) {
    const StratifiedInput in = load_stratified(load_json_file(file));
    const StratifiedPopulation<double> pop(in.probs_float(), in.sizes);
    StratifiedSampler sampler(pop, in.n, seed_flag.value_or(in.seed));
    std::ostringstream buf;
    for (long d = 0; d < draws; ++d) {
        const auto draw = sampler.draw();
        buf << '[';
        for (std::size_t i = 0; i < draw.labels.size(); ++i) {
            if (i) buf << ',';
            buf << (draw.labels[i] + 1);
        }
        buf << "]\n";
    }
    std::cout << buf.str();
    if (stats) {
        const auto& st = sampler.stats();
        json js;
        js["draws"] = draws;
        js["accepted"] = st.accepted;
        js["proposals"] = st.proposals;
        js["bound_C"] = st.bound_C;
        js["empirical_iterations_per_accept"] = st.empirical_iterations_per_accept();
        const auto b = bound_C(pop, in.n);
        js["approx_bound"] = b.approx;
        js["omega"] = b.omega;
        std::cerr << js.dump(2) << "\n";
    }
    return kExitOk;
}

// --------------------------------------------------------------------------
// verify
// --------------------------------------------------------------------------

int cmd_verify(std::vector<std::string> suites) {
    if (suites.empty())
        suites = {"identities", "variance-oracle", "polytope-oracle", "lemma2", "theorem8"};
    bool all_ok = true;
    for (const auto& name : suites) {
        SuiteResult r;
        if (name == "identities")
            r = run_identities_suite();
        else if (name == "variance-oracle")
            r = run_variance_oracle_suite();
        else if (name == "polytope-oracle")
            r = run_polytope_oracle_suite();
        else if (name == "lemma2")
            r = run_lemma2_suite();
        else if (name == "theorem8")
            r = run_theorem8_suite();
        else
            throw InputError("flag --suite: unknown suite '" + name + "'");
        std::cout << "suite " << r.name << ": " << r.checks << " checks, " << r.failures << " failures"
                  << (r.passed() ? "" : "  [FAIL]") << "\n";
        for (const auto& msg : r.messages) std::cout << "  - " << msg << "\n";
        all_ok = all_ok && r.passed();
    }
    return all_ok ? kExitOk : kExitInput;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"affine sampling-without-replacement toolkit"};
    app.require_subcommand(1);

    std::string pop_file, x_csv, format = "json", mode = "rational", emit;
    std::optional<int> n_flag;
    double tol = default_tol();
    int poly_N = 4, poly_n = 2;
    long draws = 1;
    std::optional<std::uint64_t> seed_flag;
    bool stats = false;
    std::vector<std::string> suites;

    auto* analyze = app.add_subcommand("analyze", "feasibility, spectra, and HT variance report");
    analyze->add_option("file", pop_file, "population JSON file")->required();
    analyze->add_option("--n", n_flag, "sample size (overrides the file's)");
    analyze->add_option("--x", x_csv, "attribute values, comma separated (overrides the file's)");
    analyze->add_option("--tol", tol, "PSD tolerance (default from AFFSWOR_TOL or 1e-9)");
    analyze->add_option("--format", format, "json, csv, or text")->check(CLI::IsMember({"json", "csv", "text"}));
    analyze->add_option("--mode", mode, "rational (exact) or float")->check(CLI::IsMember({"rational", "float"}));

    auto* polytope = app.add_subcommand("polytope", "vertex/facet/adjacency geometry of T_{N,n}");
    polytope->add_option("--N", poly_N, "population size")->required();
    polytope->add_option("--n", poly_n, "sample size (ignored for counterexample)");
    polytope->add_option("--emit", emit, "vertices, facets, adjacency, or counterexample")->required();
    polytope->add_option("--tol", tol, "PSD tolerance");

    auto* sample = app.add_subcommand("sample", "draw from the stratified affine design");
    sample->add_option("file", pop_file, "stratified population JSON file")->required();
    sample->add_option("--draws", draws, "number of samples to emit (default 1)");
    sample->add_option("--seed", seed_flag, "seed (overrides the file's)");
    sample->add_flag("--stats", stats, "print rejection statistics to stderr");

    auto* verify = app.add_subcommand("verify", "run self-check suites");
    verify->add_option("--suite", suites,
                       "identities, variance-oracle, polytope-oracle, lemma2, theorem8 (default: all)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) return cmd_analyze(pop_file, n_flag, x_csv, tol, format, mode);
        if (polytope->parsed()) return cmd_polytope(poly_N, poly_n, emit, tol);
        if (sample->parsed()) return cmd_sample(pop_file, draws, seed_flag, stats);
        if (verify->parsed()) return cmd_verify(suites);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const InfeasibleDesign& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
