// cli.hpp: command dispatch, config files and report writing for the
// auxeng command-line tool.
//
// Exit codes: 0 success, 2 computed but failed verification, 1 error.

#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "auxeng/conditions.hpp"
#include "auxeng/designer.hpp"
#include "auxeng/dynamics.hpp"
#include "auxeng/errors.hpp"
#include "auxeng/fixtures.hpp"
#include "auxeng/perturbation.hpp"
#include "auxeng/records.hpp"
#include "auxeng/robustness.hpp"

#ifndef AUXENG_VERSION
#define AUXENG_VERSION "0.0.0"
#endif

namespace auxeng::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitVerification = 2;

enum class OutputFormat { jsonl, csv, both };

inline OutputFormat format_from_string(std::string_view s) {
    if (s == "jsonl" || s == "structured-text") return OutputFormat::jsonl;
    if (s == "csv") return OutputFormat::csv;
    if (s == "both") return OutputFormat::both;
    throw ConfigError("unknown format \"" + std::string(s) + "\" (jsonl, csv or both)");
}

inline std::string_view to_string(OutputFormat f) {
    switch (f) {
        case OutputFormat::jsonl: return "jsonl";
        case OutputFormat::csv: return "csv";
        case OutputFormat::both: return "both";
    }
    return "both";
}

struct RunConfig {
    std::string command;
    std::string config_path;
    std::string fixture;
    std::uint64_t seed = 0;
    std::string output_dir = ".";
    OutputFormat format = OutputFormat::both;
    std::optional<int> order;
    std::optional<int> samples;
    bool all = false;
    std::string candidates_path;  // reproduce: re-verify a search log
    unsigned threads = 0;
};

inline const std::vector<std::string>& commands() {
    static const std::vector<std::string> c{"expand", "conditions", "search", "robustness", "dynamics", "reproduce"};
    return c;
}

// ---------------------------------------------------------------------------
// Config file

struct SearchSettings {
    int budget = 5000;
    int starts = 20;
};

struct DynamicsSettings {
    int n_max = 40;
    double omega = 0.01;  // in units of delta unless omega_per_s is given
    double alpha = 2.0;
    std::optional<double> t_final;  // default: cat time of the x^4 term
    int steps = 20;
    std::vector<int> orders{2, 4, 6};
};

struct FileConfig {
    std::optional<AuxiliaryConfig> aux;
    std::vector<int> levels{0};
    int max_order = 6;
    ExpansionMethod method = ExpansionMethod::rs_recursion;
    std::optional<ConstraintSet> constraints;
    std::vector<PauliString> engineerable_basis;
    std::vector<PauliString> coupling_basis;
    SearchSettings search;
    NoiseModel noise;
    double gamma = 1e-3;
    std::vector<DecayBasis> decay_bases{DecayBasis::energy, DecayBasis::charge};
    DynamicsSettings dynamics;
};

namespace detail {

inline void reject_unknown(const nlohmann::json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [k, v] : obj.items())
        if (!allowed.count(k)) throw ConfigError("unknown key \"" + k + "\" in " + where);
}

inline std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

inline HermitianOperator operator_from_json(const nlohmann::json& j, const std::string& where) {
    reject_unknown(j, {"pauli", "matrix", "diagonal"}, where);
    if (j.size() != 1) throw ConfigError(where + " needs exactly one of pauli, matrix, diagonal");
    if (j.contains("pauli")) {
        const auto terms = j["pauli"].get<std::vector<PauliTerm>>();
        if (terms.empty()) throw ConfigError(where + ".pauli is empty");
        return pauli_assemble(terms, static_cast<int>(terms.front().factors.size()));
    }
    if (j.contains("diagonal")) return HermitianOperator::diagonal(j["diagonal"].get<std::vector<double>>());
    return HermitianOperator(matrix_from_json(j["matrix"]), true);
}

inline std::vector<PauliString> strings_from_json(const nlohmann::json& j) {
    return parse_pauli_strings(j.get<std::vector<std::string>>());
}

}  // namespace detail

inline FileConfig parse_config_text(const std::string& text, const std::string& path = "<config>") {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        const auto [line, col] = detail::line_column(text, e.byte == 0 ? 0 : e.byte - 1);
        throw ConfigError(path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
    }
    try {
        detail::reject_unknown(j, {"h0", "v", "delta_per_s", "mu_per_s", "levels", "max_order", "method", "constraints",
                                   "engineerable_basis", "coupling_basis", "search", "noise", "decay", "dynamics"},
                               "config");
        FileConfig c;
        if (j.contains("h0") != j.contains("v")) throw ConfigError("config needs both h0 and v");
        if (j.contains("h0")) {
            c.aux = AuxiliaryConfig(detail::operator_from_json(j["h0"], "h0"), detail::operator_from_json(j["v"], "v"),
                                    j.value("delta_per_s", 1.0), j.value("mu_per_s", 0.0));
        }
        if (j.contains("levels")) c.levels = j["levels"].get<std::vector<int>>();
        c.max_order = j.value("max_order", c.max_order);
        if (j.contains("method")) c.method = expansion_method_from_string(j["method"].get<std::string>());
        if (j.contains("constraints")) {
            const auto& k = j["constraints"];
            detail::reject_unknown(k, {"target_levels", "engineer_order", "eliminate_orders", "zero_diagonal"}, "constraints");
            ConstraintSet cs;
            cs.dim = c.aux ? c.aux->dim() : 4;
            cs.target_levels = k.at("target_levels").get<std::vector<int>>();
            cs.engineer_order = k.at("engineer_order").get<int>();
            cs.eliminate_orders = k.value("eliminate_orders", std::vector<int>{});
            cs.zero_diagonal = k.value("zero_diagonal", true);
            c.constraints = cs;
        }
        if (j.contains("engineerable_basis")) c.engineerable_basis = detail::strings_from_json(j["engineerable_basis"]);
        if (j.contains("coupling_basis")) c.coupling_basis = detail::strings_from_json(j["coupling_basis"]);
        if (j.contains("search")) {
            detail::reject_unknown(j["search"], {"budget", "starts"}, "search");
            c.search.budget = j["search"].value("budget", c.search.budget);
            c.search.starts = j["search"].value("starts", c.search.starts);
        }
        if (j.contains("noise")) {
            const auto& k = j["noise"];
            detail::reject_unknown(k, {"sigma", "samples", "dofs"}, "noise");
            c.noise.sigma = k.value("sigma", c.noise.sigma);
            c.noise.samples = k.value("samples", c.noise.samples);
            if (k.contains("dofs")) {
                c.noise.per_qubit_dof.clear();
                for (char ch : k["dofs"].get<std::string>()) c.noise.per_qubit_dof.push_back(parse_pauli_string(std::string(1, ch)).front());
            }
        }
        if (j.contains("decay")) {
            const auto& k = j["decay"];
            detail::reject_unknown(k, {"gamma", "bases"}, "decay");
            c.gamma = k.value("gamma", c.gamma);
            if (k.contains("bases")) {
                c.decay_bases.clear();
                for (const auto& b : k["bases"].get<std::vector<std::string>>()) c.decay_bases.push_back(decay_basis_from_string(b));
            }
        }
        if (j.contains("dynamics")) {
            const auto& k = j["dynamics"];
            detail::reject_unknown(k, {"n_max", "omega", "omega_per_s", "alpha", "t_final", "t_final_s", "steps", "orders"}, "dynamics");
            auto& d = c.dynamics;
            d.n_max = k.value("n_max", d.n_max);
            d.omega = k.contains("omega_per_s") ? k["omega_per_s"].get<double>() : k.value("omega", d.omega) * (c.aux ? c.aux->delta : 1.0);
            d.alpha = k.value("alpha", d.alpha);
            if (k.contains("t_final_s")) d.t_final = k["t_final_s"].get<double>();
            else if (k.contains("t_final")) d.t_final = k["t_final"].get<double>() / (c.aux ? c.aux->delta : 1.0);
            d.steps = k.value("steps", d.steps);
            if (k.contains("orders")) d.orders = k["orders"].get<std::vector<int>>();
        }
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

inline FileConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

// ---------------------------------------------------------------------------
// Reports

class Reporter {
public:
    Reporter(const RunConfig& rc, std::ostream& out) : rc_(rc), out_(out) {
        std::filesystem::create_directories(rc.output_dir);
        const auto probe = std::filesystem::path(rc.output_dir) / ".auxeng_write_test";
        {
            std::ofstream t(probe);
            if (!t) throw Error("output directory " + rc.output_dir + " is not writable");
        }
        std::filesystem::remove(probe);
    }

    bool jsonl() const { return rc_.format != OutputFormat::csv; }
    bool csv() const { return rc_.format != OutputFormat::jsonl; }

    void records(const std::string& name, const std::vector<nlohmann::json>& recs) {
        if (!jsonl()) return;
        const auto p = path(name + ".jsonl");
        write_lines(p, recs);
        files_.push_back(p);
    }

    void table(const std::string& name, const std::string& text) {
        if (!csv()) return;
        const auto p = path(name + ".csv");
        write_text(p, text);
        files_.push_back(p);
    }

    void manifest(int status, double wall) {
        nlohmann::json m = {{"record", "manifest"},
                            {"command", rc_.command},
                            {"fixture", rc_.fixture},
                            {"config", rc_.config_path},
                            {"seed", rc_.seed},
                            {"format", std::string(to_string(rc_.format))},
                            {"version", AUXENG_VERSION},
                            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                          std::to_string(EIGEN_MINOR_VERSION)},
                            {"compiler", compiler()},
                            {"exit_status", status},
                            {"wall_time_s", wall},
                            {"files", files_}};
        if (rc_.order) m["order"] = *rc_.order;
        if (rc_.samples) m["samples"] = *rc_.samples;
        write_lines(path("manifest.jsonl"), {m});
    }

    std::ostream& out() { return out_; }

private:
    std::string path(const std::string& file) const { return (std::filesystem::path(rc_.output_dir) / file).string(); }

    static std::string compiler() {
#if defined(__clang__)
        return "clang " __clang_version__;
#elif defined(__GNUC__)
        return "gcc " __VERSION__;
#else
        return "unknown";
#endif
    }

    const RunConfig& rc_;
    std::ostream& out_;
    std::vector<std::string> files_;
};

inline std::string fmt(double v, const char* spec = "%.6g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

// ---------------------------------------------------------------------------
// Commands

namespace detail {

struct Source {
    AuxiliaryConfig aux;
    std::vector<int> levels;
    int max_order = 6;
    std::optional<Fixture> fixture;
    FileConfig file;
};

inline Source resolve_source(const RunConfig& rc, const std::string& default_fixture = "") {
    Source s;
    if (!rc.config_path.empty()) s.file = load_config(rc.config_path);
    if (s.file.aux) {
        s.aux = *s.file.aux;
        s.levels = s.file.levels;
        s.max_order = s.file.max_order;
    } else {
        const std::string name = rc.fixture.empty() ? default_fixture : rc.fixture;
        if (name.empty()) throw ConfigError("this command needs --fixture or a --config with h0 and v");
        s.fixture = make_fixture(name);
        s.aux = s.fixture->config;
        s.levels = s.fixture->levels;
        s.max_order = s.fixture->max_order;
    }
    if (rc.order) s.max_order = *rc.order;
    return s;
}

inline std::string label(const RunConfig& rc) { return rc.fixture.empty() ? rc.config_path : rc.fixture; }

}  // namespace detail

inline int cmd_expand(const RunConfig& rc, Reporter& rep) {
    auto src = detail::resolve_source(rc);
    std::vector<nlohmann::json> recs;
    std::string csv = "level,order,coefficient,imaginary,uncertainty\n";
    for (int level : src.levels) {
        const auto s = src.file.method == ExpansionMethod::spectral_fit ? expand_spectral_fit(src.aux, level, src.max_order)
                                                                         : expand_rs(src.aux, level, src.max_order);
        recs.push_back(s);
        rep.out() << "level " << level << " (" << to_string(s.method) << ")\n";
        for (int m = 0; m <= s.max_order; ++m) {
            rep.out() << "  E" << level << "^(" << m << ") = " << fmt(s[m], "%.10g") << "  +/- " << fmt(s.uncertainty[static_cast<std::size_t>(m)], "%.2g")
                      << "\n";
            csv += std::to_string(level) + "," + std::to_string(m) + "," + fmt(s[m], "%.17g") + "," + fmt(s.complex_at(m).imag(), "%.17g") + "," +
                   fmt(s.uncertainty[static_cast<std::size_t>(m)], "%.17g") + "\n";
        }
    }
    rep.records("expand", recs);
    rep.table("expand", csv);
    return kExitOk;
}

inline int cmd_conditions(const RunConfig& rc, Reporter& rep) {
    auto src = detail::resolve_source(rc);
    ConstraintSet cs;
    if (src.file.constraints) cs = *src.file.constraints;
    else if (src.fixture) cs = default_constraints(src.fixture->name);
    else throw ConfigError("conditions needs a constraints section or a fixture");
    cs.dim = src.aux.dim();

    const auto generic = generic_conditions(src.aux, cs);
    std::vector<nlohmann::json> recs{generic};
    std::string csv = "name,value,class\n";
    bool present = false;
    rep.out() << "numeric residuals (eliminated below " << fmt(kEliminatedThreshold) << "):\n";
    for (const auto& r : generic.residuals) {
        const auto cls = classify(r.value);
        present = present || cls == ResidualClass::present;
        rep.out() << "  " << r.name << " = " << fmt(r.value, "%.3e") << "  " << to_string(cls) << "\n";
        csv += r.name + "," + fmt(r.value, "%.17g") + "," + std::string(to_string(cls)) + "\n";
    }
    for (const auto& r : generic.reported) rep.out() << "  " << r.name << " = " << fmt(r.value, "%.10g") << "  (engineered)\n";

    // Closed forms apply in the H0 eigenframe when the spectrum is an even ladder.
    const auto frame = eigendecompose(src.aux.h0);
    const RealVector e = frame.real_eigenvalues();
    bool ladder = true;
    for (Eigen::Index k = 1; k < e.size(); ++k) ladder = ladder && std::abs(e(k) - e(k - 1) - 1.0) < 1e-2;
    if (ladder && closed_form_family(cs) != ClosedFormFamily::none) {
        const Matrix vt = frame.eigenvectors.adjoint() * src.aux.v.matrix() * frame.eigenvectors;
        std::vector<NamedValue> named;
        const auto raw = closed_form_residuals(vt, cs);
        for (std::size_t i = 0; i < raw.size(); ++i) named.push_back({"closed_form_" + std::to_string(i), raw[i]});
        const auto closed = ConstraintResidual::make(named, kClosedFormThreshold);
        recs.push_back(closed);
        rep.out() << "closed-form residuals (diagonal frame):\n";
        for (const auto& r : closed.residuals) rep.out() << "  " << r.name << " = " << fmt(r.value, "%.3e") << "\n";
    }
    rep.records("conditions", recs);
    rep.table("conditions", csv);
    rep.out() << (present ? "FAIL: some eliminated orders are present\n" : "OK\n");
    return present ? kExitVerification : kExitOk;
}

inline DesignProblem problem_from(const RunConfig& rc, const detail::Source& src) {
    if (src.fixture) return design_problem_for(src.fixture->name);
    if (!src.file.constraints) throw ConfigError("search needs a constraints section or a fixture");
    DesignProblem p;
    p.dim = src.aux.dim();
    p.h0_tilde = HermitianOperator::ladder(p.dim);
    p.constraints = *src.file.constraints;
    p.engineerable_basis = src.file.engineerable_basis.empty() ? local_pauli_strings(qubit_count(p.dim)) : src.file.engineerable_basis;
    p.coupling_basis = src.file.coupling_basis;
    (void)rc;
    return p;
}

inline void print_candidate(std::ostream& out, const DesignCandidate& c) {
    out << "  score " << fmt(c.score, "%.3e") << "  start " << c.start_index << "  H0:";
    for (const auto& t : c.pauli_decomposition)
        if (std::abs(t.coefficient) > 1e-6) out << " " << fmt(t.coefficient, "%+.4f") << "*" << to_string(t.factors);
    out << "  V:";
    for (const auto& t : c.couplings) out << " " << fmt(t.coefficient, "%+.4f") << "*" << to_string(t.factors);
    out << "\n";
}

inline int cmd_search(const RunConfig& rc, Reporter& rep) {
    auto src = detail::resolve_source(rc, "twoqubit_probe");
    const auto problem = problem_from(rc, src);
    const int starts = src.file.search.starts;
    const int budget = src.file.search.budget;
    const auto result = search(problem, budget, rc.seed, starts, rc.threads);
    std::vector<nlohmann::json> recs;
    std::string csv = "rank,score,start_index,h0_terms,couplings\n";
    int rank = 0;
    for (const auto& c : result.candidates) {
        recs.push_back(c);
        std::string h0, v;
        for (const auto& t : c.pauli_decomposition) h0 += (h0.empty() ? "" : " ") + fmt(t.coefficient, "%.10g") + "*" + to_string(t.factors);
        for (const auto& t : c.couplings) v += (v.empty() ? "" : " ") + fmt(t.coefficient, "%.10g") + "*" + to_string(t.factors);
        csv += std::to_string(rank++) + "," + fmt(c.score, "%.17g") + "," + std::to_string(c.start_index) + "," + h0 + "," + v + "\n";
    }
    rep.records("search", recs);
    rep.table("search", csv);
    rep.out() << "search: " << result.candidates.size() << " distinct candidates from " << starts << " starts, " << result.total_evaluations
              << " evaluations\n";
    for (std::size_t i = 0; i < std::min<std::size_t>(result.candidates.size(), 10); ++i) print_candidate(rep.out(), result.candidates[i]);
    return result.status == SearchStatus::found ? kExitOk : kExitVerification;
}

inline int cmd_robustness(const RunConfig& rc, Reporter& rep) {
    auto src = detail::resolve_source(rc, "twoqubit_probe");
    NoiseModel noise = src.file.noise;
    noise.seed = rc.seed;
    if (rc.samples) noise.samples = *rc.samples;
    const int level = src.levels.back();
    const int order = rc.order.value_or(7);
    const auto report = coefficient_sensitivity(src.aux, level, order, noise, rc.threads);
    std::vector<nlohmann::json> recs{report};
    rep.out() << "sensitivity of level " << level << " (sigma " << noise.sigma << ", " << noise.samples << " samples, " << report.rejections
              << " rejected)\n";
    for (int m = 1; m <= order; ++m)
        rep.out() << "  Sigma_(" << m << ") = " << fmt(report.at(m), "%.4e") << " +/- " << fmt(report.stderr_m[static_cast<std::size_t>(m - 1)], "%.2e") << "\n";
    for (auto basis : src.file.decay_bases) {
        const auto d = decay_shift(src.aux, src.file.gamma, level, order, basis);
        recs.push_back(d);
        rep.out() << "decay shift (" << to_string(basis) << " basis, gamma " << src.file.gamma << "): max |shift| over orders >= 1 = "
                  << fmt(d.max_abs(1), "%.3e") << "\n";
    }
    rep.records("robustness", recs);
    rep.table("sensitivity", to_csv(report));
    return kExitOk;
}

inline int cmd_dynamics(const RunConfig& rc, Reporter& rep) {
    auto src = detail::resolve_source(rc, "twoqubit_probe");
    AuxiliaryConfig aux = src.aux;
    auto d = src.file.dynamics;
    if (!src.file.aux) {
        // Dimensionless demonstration regime for the probe fixtures.
        aux = AuxiliaryConfig(aux.h0, aux.v, 1.0, 0.03);
        d.omega = 0.01;
        d.alpha = 1.0;
        d.n_max = 60;
    }
    const int level = src.levels.back();
    const auto series = expand_rs(aux, level, std::max(4, *std::max_element(d.orders.begin(), d.orders.end())));
    const double kappa = engineered_coefficients(series, aux, {4}).at(4);
    const double t_final = d.t_final.value_or(cat_time(kappa));
    const FockSpace fock{d.n_max, d.omega};
    auto result = evolve_and_compare(aux, fock, d.alpha, level, t_final, d.steps, d.orders);
    const auto cat = cat_benchmark(kappa, d.alpha, FockSpace{std::max(d.n_max, 60), 0.0});
    result.cat_fidelity = cat.cat_fidelity;
    rep.records("dynamics", {result, cat});
    rep.table("dynamics", to_csv(result));
    rep.out() << "x^4 coefficient " << fmt(kappa) << ", cat time " << fmt(t_final) << "\n";
    rep.out() << "fidelity at t_final " << fmt(result.fidelity_effective.back()) << ", max leakage "
              << fmt(*std::max_element(result.adiabatic_leakage.begin(), result.adiabatic_leakage.end())) << ", truncation "
              << fmt(result.truncation_population, "%.2e") << (result.valid ? "" : " (INVALID: raise n_max)") << "\n";
    rep.out() << "Kerr cat fidelity " << fmt(cat.cat_fidelity, "%.12f") << "\n";
    return result.valid ? kExitOk : kExitVerification;
}

inline bool report_fixture(const Fixture& fx, Reporter& rep, std::vector<nlohmann::json>& recs, std::string& csv) {
    const auto r = evaluate_fixture(fx);
    rep.out() << fx.name << ": " << (r.pass() ? "PASS" : "FAIL") << "\n";
    rep.out() << "  quantity            expected       computed       tolerance           result\n";
    for (const auto& c : r.checks) {
        char line[256];
        std::snprintf(line, sizeof line, "  %-18s  %-13.6g  %-13.6g  %-8s %-9.3g  %s\n", c.expectation.quantity.c_str(), c.expectation.expected,
                      c.computed, std::string(to_string(c.expectation.kind)).c_str(), c.expectation.tolerance, c.pass ? "pass" : "FAIL");
        rep.out() << line;
        recs.push_back({{"record", "check"},
                        {"fixture", fx.name},
                        {"quantity", c.expectation.quantity},
                        {"expected", c.expectation.expected},
                        {"computed", c.computed},
                        {"kind", std::string(to_string(c.expectation.kind))},
                        {"tolerance", c.expectation.tolerance},
                        {"source", c.expectation.source},
                        {"pass", c.pass}});
        csv += fx.name + "," + c.expectation.quantity + "," + fmt(c.expectation.expected, "%.17g") + "," + fmt(c.computed, "%.17g") + "," +
               std::string(to_string(c.expectation.kind)) + "," + fmt(c.expectation.tolerance, "%.17g") + "," + (c.pass ? "pass" : "fail") + "\n";
    }
    for (const auto& s : r.series) recs.push_back(s);
    return r.pass();
}

inline int cmd_reproduce(const RunConfig& rc, Reporter& rep) {
    std::vector<nlohmann::json> recs;
    std::string csv = "fixture,quantity,expected,computed,kind,tolerance,result\n";
    bool ok = true;
    if (!rc.candidates_path.empty()) {
        const auto problem = design_problem_for(rc.fixture.empty() ? "twoqubit_probe" : rc.fixture);
        int n = 0;
        for (const auto& line : read_lines(rc.candidates_path)) {
            if (line.value("record", "") != "candidate") continue;
            const auto logged = line.get<DesignCandidate>();
            const auto again = reverify(logged, problem);
            const bool pass = again.verified && std::abs(again.score - logged.score) <= 1e-9 * std::max(1.0, std::abs(logged.score));
            ok = ok && pass;
            rep.out() << "candidate " << n++ << ": " << (pass ? "pass" : "FAIL") << "  score " << fmt(logged.score, "%.3e") << " -> "
                      << fmt(again.score, "%.3e") << "\n";
            recs.push_back(again);
        }
    } else {
        std::vector<std::string> names;
        if (rc.all) names = fixture_names();
        else if (!rc.fixture.empty()) names = {rc.fixture};
        else throw ConfigError("reproduce needs --fixture, --all or --candidates");
        for (const auto& n : names) ok = report_fixture(make_fixture(n), rep, recs, csv) && ok;
    }
    rep.records("reproduce", recs);
    rep.table("reproduce", csv);
    return ok ? kExitOk : kExitVerification;
}

/// Runs one command; errors become exit status 1 with a message on `err`.
inline int run(const RunConfig& rc, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
        Reporter rep(rc, out);
        int status = kExitError;
        if (rc.command == "expand") status = cmd_expand(rc, rep);
        else if (rc.command == "conditions") status = cmd_conditions(rc, rep);
        else if (rc.command == "search") status = cmd_search(rc, rep);
        else if (rc.command == "robustness") status = cmd_robustness(rc, rep);
        else if (rc.command == "dynamics") status = cmd_dynamics(rc, rep);
        else if (rc.command == "reproduce") status = cmd_reproduce(rc, rep);
        else throw ConfigError("unknown command \"" + rc.command + "\"");
        rep.manifest(status, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        return status;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
}

}  // namespace auxeng::cli
