// records.hpp: JSON-lines serialization of results.
//
// Every record is one compact JSON object per line. Doubles are written in
// shortest round-trip form, so reading a record back gives equal values.

#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "auxeng/conditions.hpp"
#include "auxeng/designer.hpp"
#include "auxeng/dynamics.hpp"
#include "auxeng/errors.hpp"
#include "auxeng/operator_algebra.hpp"
#include "auxeng/perturbation.hpp"
#include "auxeng/robustness.hpp"

namespace auxeng {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Building blocks

inline json matrix_to_json(const Matrix& m) {
    json re = json::array(), im = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json r = json::array(), s = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            r.push_back(m(i, j).real());
            s.push_back(m(i, j).imag());
        }
        re.push_back(std::move(r));
        im.push_back(std::move(s));
    }
    return {{"re", re}, {"im", im}};
}

inline Matrix matrix_from_json(const json& j) {
    const auto& re = j.at("re");
    const auto n = static_cast<Eigen::Index>(re.size());
    const bool has_im = j.contains("im");
    Matrix m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto& row = re.at(static_cast<std::size_t>(r));
        if (static_cast<Eigen::Index>(row.size()) != n) throw ConfigError("matrix rows must all have length " + std::to_string(n));
        for (Eigen::Index c = 0; c < n; ++c) {
            const double im = has_im ? j["im"].at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)).get<double>() : 0.0;
            m(r, c) = Complex(row.at(static_cast<std::size_t>(c)).get<double>(), im);
        }
    }
    return m;
}

inline json complex_to_json(Complex c) { return json::array({c.real(), c.imag()}); }
inline Complex complex_from_json(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

inline void to_json(json& j, const PauliTerm& t) { j = {{"coefficient", t.coefficient}, {"factors", to_string(t.factors)}}; }
inline void from_json(const json& j, PauliTerm& t) {
    t.coefficient = j.at("coefficient").get<double>();
    t.factors = parse_pauli_string(j.at("factors").get<std::string>());
}

inline void to_json(json& j, const NamedValue& v) { j = {{"name", v.name}, {"value", v.value}}; }
inline void from_json(const json& j, NamedValue& v) {
    v.name = j.at("name").get<std::string>();
    v.value = j.at("value").get<double>();
}

// ---------------------------------------------------------------------------
// Results

inline void to_json(json& j, const ExpansionSeries& s) {
    json coeffs = json::array();
    for (const auto& c : s.coefficients) coeffs.push_back(complex_to_json(c));
    j = {{"record", "expansion"},
         {"level", s.level_index},
         {"max_order", s.max_order},
         {"method", std::string(to_string(s.method))},
         {"coefficients", coeffs},
         {"uncertainty", s.uncertainty}};
}

inline void from_json(const json& j, ExpansionSeries& s) {
    s.level_index = j.at("level").get<int>();
    s.max_order = j.at("max_order").get<int>();
    s.method = expansion_method_from_string(j.at("method").get<std::string>());
    s.coefficients.clear();
    for (const auto& c : j.at("coefficients")) s.coefficients.push_back(complex_from_json(c));
    s.uncertainty = j.at("uncertainty").get<std::vector<double>>();
}

inline void to_json(json& j, const ConstraintResidual& r) {
    j = {{"record", "constraint_residual"},
         {"residuals", r.residuals},
         {"reported", r.reported},
         {"threshold", r.threshold},
         {"satisfied", r.satisfied}};
}

inline void from_json(const json& j, ConstraintResidual& r) {
    r.residuals = j.at("residuals").get<std::vector<NamedValue>>();
    r.reported = j.at("reported").get<std::vector<NamedValue>>();
    r.threshold = j.at("threshold").get<double>();
    r.satisfied = j.at("satisfied").get<bool>();
}

inline void to_json(json& j, const SensitivityReport& r) {
    j = {{"record", "sensitivity"}, {"level", r.level},     {"max_order", r.max_order}, {"sigma", r.sigma},
         {"samples", r.samples},    {"rejections", r.rejections}, {"seed", r.seed},      {"sigma_m", r.sigma_m},
         {"stderr", r.stderr_m}};
}

inline void from_json(const json& j, SensitivityReport& r) {
    r.level = j.at("level").get<int>();
    r.max_order = j.at("max_order").get<int>();
    r.sigma = j.at("sigma").get<double>();
    r.samples = j.at("samples").get<int>();
    r.rejections = j.at("rejections").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.sigma_m = j.at("sigma_m").get<std::vector<double>>();
    r.stderr_m = j.at("stderr").get<std::vector<double>>();
}

inline void to_json(json& j, const DecayShift& d) {
    json shifts = json::array();
    for (const auto& c : d.shift) shifts.push_back(complex_to_json(c));
    j = {{"record", "decay_shift"}, {"level", d.level}, {"gamma", d.gamma}, {"basis", std::string(to_string(d.basis))}, {"shift", shifts}};
}

inline void from_json(const json& j, DecayShift& d) {
    d.level = j.at("level").get<int>();
    d.gamma = j.at("gamma").get<double>();
    d.basis = decay_basis_from_string(j.at("basis").get<std::string>());
    d.shift.clear();
    for (const auto& c : j.at("shift")) d.shift.push_back(complex_from_json(c));
}

inline void to_json(json& j, const JointSimResult& r) {
    j = {{"record", "joint_simulation"},
         {"times", r.times},
         {"fidelity_effective", r.fidelity_effective},
         {"adiabatic_leakage", r.adiabatic_leakage},
         {"max_norm_drift", r.max_norm_drift},
         {"max_energy_drift", r.max_energy_drift},
         {"truncation_population", r.truncation_population},
         {"valid", r.valid},
         {"cat_fidelity", r.cat_fidelity ? json(*r.cat_fidelity) : json(nullptr)}};
}

inline void from_json(const json& j, JointSimResult& r) {
    r.times = j.at("times").get<std::vector<double>>();
    r.fidelity_effective = j.at("fidelity_effective").get<std::vector<double>>();
    r.adiabatic_leakage = j.at("adiabatic_leakage").get<std::vector<double>>();
    r.max_norm_drift = j.at("max_norm_drift").get<double>();
    r.max_energy_drift = j.at("max_energy_drift").get<double>();
    r.truncation_population = j.at("truncation_population").get<double>();
    r.valid = j.at("valid").get<bool>();
    if (j.at("cat_fidelity").is_null()) r.cat_fidelity.reset();
    else r.cat_fidelity = j.at("cat_fidelity").get<double>();
}

inline void to_json(json& j, const CatBenchmark& b) {
    j = {{"record", "cat_benchmark"}, {"tau", b.tau}, {"cat_fidelity", b.cat_fidelity}, {"truncation_population", b.truncation_population}, {"valid", b.valid}};
}

inline void from_json(const json& j, CatBenchmark& b) {
    b.tau = j.at("tau").get<double>();
    b.cat_fidelity = j.at("cat_fidelity").get<double>();
    b.truncation_population = j.at("truncation_population").get<double>();
    b.valid = j.at("valid").get<bool>();
}

/// Search-log record of an accepted candidate. vtilde is stored in full so
/// the candidate can be rebuilt and re-verified without searching again.
inline void to_json(json& j, const DesignCandidate& c) {
    j = {{"record", "candidate"},
         {"score", c.score},
         {"implementability", c.implementability},
         {"higher_order", c.higher_order},
         {"pauli_decomposition", c.pauli_decomposition},
         {"h0_residual", c.h0_residual},
         {"f_g_couplings", c.couplings},
         {"coupling_residual", c.coupling_residual},
         {"coupling_scale", c.coupling_scale},
         {"residuals", c.residuals},
         {"verified", c.verified},
         {"seed", c.seed},
         {"start_index", c.start_index},
         {"evaluations", c.evaluations},
         {"vtilde", matrix_to_json(c.vtilde)}};
}

inline void from_json(const json& j, DesignCandidate& c) {
    c.score = j.at("score").get<double>();
    c.implementability = j.at("implementability").get<double>();
    c.higher_order = j.at("higher_order").get<double>();
    c.pauli_decomposition = j.at("pauli_decomposition").get<std::vector<PauliTerm>>();
    c.h0_residual = j.at("h0_residual").get<double>();
    c.couplings = j.at("f_g_couplings").get<std::vector<PauliTerm>>();
    c.coupling_residual = j.at("coupling_residual").get<double>();
    c.coupling_scale = j.at("coupling_scale").get<double>();
    c.residuals = j.at("residuals").get<ConstraintResidual>();
    c.verified = j.at("verified").get<bool>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.start_index = j.at("start_index").get<int>();
    c.evaluations = j.at("evaluations").get<int>();
    c.vtilde = matrix_from_json(j.at("vtilde"));
}

// ---------------------------------------------------------------------------
// JSON-lines files

inline std::string to_line(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::strict); }

inline void write_lines(const std::string& path, const std::vector<json>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    for (const auto& r : records) out << to_line(r) << '\n';
    if (!out) throw Error("write to " + path + " failed");
}

inline std::vector<json> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path + " for reading");
    std::vector<json> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            out.push_back(json::parse(line));
        } catch (const json::parse_error& e) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << text;
    if (!out) throw Error("write to " + path + " failed");
}

/// Rebuilds a logged candidate from its vtilde and re-runs the numeric check.
inline DesignCandidate reverify(const DesignCandidate& logged, const DesignProblem& problem) {
    problem.validate();
    const auto pp = detail::prepare(problem);
    const bool closed = closed_form_family(problem.constraints) != ClosedFormFamily::none;
    DesignCandidate c = detail::build_candidate(pp, logged.vtilde, closed);
    AuxiliaryConfig scaled(problem.h0_tilde, HermitianOperator(Matrix(c.coupling_scale * logged.vtilde), true));
    c.residuals = generic_conditions(scaled, problem.constraints);
    c.verified = c.residuals.satisfied;
    c.seed = logged.seed;
    c.start_index = logged.start_index;
    c.evaluations = logged.evaluations;
    return c;
}

}  // namespace auxeng
