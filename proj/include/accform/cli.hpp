#pragma once

// Command-line driver. Exit codes: 0 all requested checks hold, 1 a
// mathematical verdict fails, 2 usage or input error, 3 numerical degeneracy.

#include <openssl/evp.h>

#include <CLI11.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "accform/gallery.hpp"
#include "accform/generation.hpp"

namespace accform::cli {

inline constexpr std::string_view tool_version = "accform 1.0.0";

enum ExitCode : int { exit_ok = 0, exit_negative = 1, exit_usage = 2, exit_degenerate = 3 };

inline std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
        throw Error("sha256: digest computation failed");
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return os.str();
}

// Temp file in the same directory, then rename over the target.
inline void write_atomic(const std::string& path, const std::string& content) {
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot write " + tmp.string());
        out << content;
        if (!out.flush()) throw InputError("cannot write " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw InputError("cannot move report into place at " + path);
    }
}

// --- serialization of library results ---------------------------------------

inline Json certificate_to_json(const Certificate& c) {
    Json w = Json::array();
    for (const auto& v : c.witness) w.push_back(vector_to_json(v));
    return Json{{"check", c.check},   {"verdict", to_string(c.verdict)}, {"margin", c.margin},
                {"tolerance", c.tolerance}, {"witness", w},          {"note", c.note}};
}

inline Certificate certificate_from_json(const Json& j) {
    Certificate c;
    c.check = j.at("check").get<std::string>();
    const std::string v = j.at("verdict").get<std::string>();
    if (v != "holds" && v != "fails") throw InputError("certificate: bad verdict \"" + v + "\"");
    c.verdict = v == "holds" ? Verdict::holds : Verdict::fails;
    c.margin = j.at("margin").get<double>();
    c.tolerance = j.at("tolerance").get<double>();
    for (const auto& w : j.at("witness")) c.witness.push_back(vector_from_json(w, "witness"));
    c.note = j.at("note").get<std::string>();
    return c;
}

inline Json complex_list_to_json(const std::vector<Complex>& zs) {
    Json out = Json::array();
    for (Complex z : zs) out.push_back(complex_to_json(z));
    return out;
}

inline std::vector<Complex> complex_list_from_json(const Json& j, const std::string& what) {
    std::vector<Complex> out;
    for (const auto& z : j) out.push_back(complex_from_json(z, what));
    return out;
}

template <class T>
Json optional_to_json(const std::optional<T>& v, auto&& f) {
    return v ? Json(f(*v)) : Json(nullptr);
}

// --- analysis report --------------------------------------------------------

struct ConditionCertificates {
    Certificate condition_i;
    Certificate condition_ii;
    Certificate condition_iii;
    Certificate j_elliptic;        // margin lambda_min(Re T0 + omega J*J) at the reported omega
    std::optional<double> j_elliptic_omega;
    Certificate incomplete_bound;  // margin rho
    double incomplete_bound_rho_upper = 0.0;
};

struct Dims {
    Index D_ja = 0;
    Index V_ja = 0;
    Index ker_T = 0;
    Index ker_j = 0;
    Index rg_j_adjoint = 0;
};

struct OperatorRecord {
    ComplexMatrix domain_basis;
    ComplexMatrix action;
};

struct FovRecord {
    Index n_angles = 0;
    std::vector<Complex> boundary_points;
    double outer_gap = 0.0;
};

struct AnalysisReport {
    std::string input_digest;
    ConditionCertificates condition_certificates;
    Dims dims;
    std::optional<Certificate> association;   // absent when Condition (I) or (II) fails
    std::optional<Certificate> m_accretivity; // present when associated
    std::optional<OperatorRecord> op;         // serialized as "operator"
    std::optional<ComplexMatrix> resolvent_at_one;
    FovRecord field_of_values;
    std::string tool_version{cli::tool_version};
};

inline Json to_json(const FovRecord& f) {
    return Json{{"n_angles", f.n_angles},
                {"boundary_points", complex_list_to_json(f.boundary_points)},
                {"outer_gap", f.outer_gap}};
}

inline FovRecord fov_record(const ComplexMatrix& m, Index n_angles) {
    const FieldOfValues w = field_of_values(m, n_angles);
    return {w.n_angles, w.boundary_points, w.outer_gap};
}

inline Json to_json(const AnalysisReport& r) {
    const auto& c = r.condition_certificates;
    Json j;
    j["input_digest"] = r.input_digest;
    j["condition_certificates"] = Json{
        {"condition_i", certificate_to_json(c.condition_i)},
        {"condition_ii", certificate_to_json(c.condition_ii)},
        {"condition_iii", certificate_to_json(c.condition_iii)},
        {"j_elliptic", certificate_to_json(c.j_elliptic)},
        {"j_elliptic_omega", optional_to_json(c.j_elliptic_omega, [](double w) { return w; })},
        {"incomplete_bound", certificate_to_json(c.incomplete_bound)},
        {"incomplete_bound_rho_upper", c.incomplete_bound_rho_upper}};
    j["dims"] = Json{{"D_ja", r.dims.D_ja},
                     {"V_ja", r.dims.V_ja},
                     {"ker_T", r.dims.ker_T},
                     {"ker_j", r.dims.ker_j},
                     {"rg_j_adjoint", r.dims.rg_j_adjoint}};
    j["association"] = optional_to_json(r.association, certificate_to_json);
    j["m_accretivity"] = optional_to_json(r.m_accretivity, certificate_to_json);
    j["operator"] = optional_to_json(r.op, [](const OperatorRecord& o) {
        return Json{{"domain_basis", matrix_to_json(o.domain_basis)}, {"action", matrix_to_json(o.action)}};
    });
    j["resolvent_at_one"] = optional_to_json(r.resolvent_at_one, [](const ComplexMatrix& m) { return matrix_to_json(m); });
    j["field_of_values"] = to_json(r.field_of_values);
    j["tool_version"] = r.tool_version;
    return j;
}

inline AnalysisReport analysis_report_from_json(const Json& j) {
    try {
        reject_unknown_keys(j,
                            {"input_digest", "condition_certificates", "dims", "association", "m_accretivity", "operator",
                             "resolvent_at_one", "field_of_values", "tool_version"},
                            "analysis report");
        AnalysisReport r;
        r.input_digest = j.at("input_digest").get<std::string>();
        const Json& c = j.at("condition_certificates");
        auto& cc = r.condition_certificates;
        cc.condition_i = certificate_from_json(c.at("condition_i"));
        cc.condition_ii = certificate_from_json(c.at("condition_ii"));
        cc.condition_iii = certificate_from_json(c.at("condition_iii"));
        cc.j_elliptic = certificate_from_json(c.at("j_elliptic"));
        if (!c.at("j_elliptic_omega").is_null()) cc.j_elliptic_omega = c.at("j_elliptic_omega").get<double>();
        cc.incomplete_bound = certificate_from_json(c.at("incomplete_bound"));
        cc.incomplete_bound_rho_upper = c.at("incomplete_bound_rho_upper").get<double>();
        const Json& d = j.at("dims");
        r.dims = {d.at("D_ja").get<Index>(), d.at("V_ja").get<Index>(), d.at("ker_T").get<Index>(),
                  d.at("ker_j").get<Index>(), d.at("rg_j_adjoint").get<Index>()};
        if (!j.at("association").is_null()) r.association = certificate_from_json(j.at("association"));
        if (!j.at("m_accretivity").is_null()) r.m_accretivity = certificate_from_json(j.at("m_accretivity"));
        if (!j.at("operator").is_null())
            r.op = OperatorRecord{matrix_from_json(j.at("operator").at("domain_basis"), "domain_basis"),
                                  matrix_from_json(j.at("operator").at("action"), "action")};
        if (!j.at("resolvent_at_one").is_null())
            r.resolvent_at_one = matrix_from_json(j.at("resolvent_at_one"), "resolvent_at_one");
        const Json& f = j.at("field_of_values");
        r.field_of_values = {f.at("n_angles").get<Index>(),
                             complex_list_from_json(f.at("boundary_points"), "boundary_points"),
                             f.at("outer_gap").get<double>()};
        r.tool_version = j.at("tool_version").get<std::string>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("analysis report: ") + e.what());
    }
}

inline Certificate j_elliptic_certificate(const FormSystem& fs, std::optional<double>& omega) {
    const auto grid = default_omega_grid();
    const double tol = fs.tolerances().residual_tol;
    if (const auto je = check_j_elliptic(fs, grid)) {
        omega = je->omega;
        return Certificate::pass("check_j_elliptic", je->mu, tol, "omega from the default grid");
    }
    omega.reset();
    if (fs.dim_V() == 0) return Certificate::pass("check_j_elliptic", 0.0, tol, "empty V");
    const ComplexMatrix m = hermitian_part(fs.T0()) + grid.back() * fs.J().adjoint() * fs.J();
    const EigenPair e = min_eigen(m);
    return Certificate::fail("check_j_elliptic", e.value, tol, {e.vector},
                             "no omega on the default grid; margin at the largest omega");
}

inline AnalysisReport analyze(const FormSystem& fs, std::string digest, Index fov_angles = 360) {
    const ToleranceConfig& tol = fs.tolerances();
    AnalysisReport r;
    r.input_digest = std::move(digest);
    auto& cc = r.condition_certificates;
    cc.condition_i = check_condition_i(fs);
    cc.condition_ii = check_condition_ii(fs);
    cc.condition_iii = check_condition_iii(fs).certificate;
    cc.j_elliptic = j_elliptic_certificate(fs, cc.j_elliptic_omega);
    const IncompleteBound ib = check_incomplete_bound(fs);
    cc.incomplete_bound = ib.certificate;
    cc.incomplete_bound_rho_upper = ib.rho_upper;

    const ComplexMatrix t = derived_T(fs);
    r.dims.ker_T = kernel(t, tol).dim();
    r.dims.ker_j = kernel(fs.J(), tol).dim();
    r.dims.rg_j_adjoint = numerical_rank(fs.J(), tol);
    r.dims.D_ja = domain_subspace(fs).dim();
    r.dims.V_ja = vja_subspace(fs).dim();

    if (cc.condition_i.holds() && cc.condition_ii.holds()) {
        const AssociationResult a = check_associated(fs);
        r.association = a.associated;
        if (a.op) {
            r.m_accretivity = check_m_accretive(fs, a);
            r.op = OperatorRecord{a.op->domain.basis(), a.op->action};
            if (r.m_accretivity->holds()) r.resolvent_at_one = resolvent_factor(fs, a).R;
        }
    }
    r.field_of_values = fov_record(t, fov_angles);
    return r;
}

// 0 when Conditions (I), (II), association and m-accretivity hold; (III),
// j-ellipticity and the incomplete bound are informational.
inline int analysis_exit_code(const AnalysisReport& r) {
    const auto& cc = r.condition_certificates;
    const bool ok = cc.condition_i.holds() && cc.condition_ii.holds() && r.association && r.association->holds() &&
                    r.m_accretivity && r.m_accretivity->holds();
    return ok ? exit_ok : exit_negative;
}

// --- text rendering ---------------------------------------------------------

namespace detail {

inline bool is_complex_pair(const Json& j) {
    return j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number();
}

inline std::string scalar_text(const Json& j) {
    if (j.is_string()) return j.get<std::string>();
    if (is_complex_pair(j)) {
        std::ostringstream os;
        os << std::setprecision(10) << j[0].get<double>() << (j[1].get<double>() < 0 ? " - " : " + ")
           << std::abs(j[1].get<double>()) << "i";
        return os.str();
    }
    if (j.is_number_float()) {
        std::ostringstream os;
        os << std::setprecision(10) << j.get<double>();
        return os.str();
    }
    return j.dump();
}

inline void render(const Json& j, const std::string& path, std::ostream& os) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) render(v, path.empty() ? k : path + "." + k, os);
        return;
    }
    if (j.is_array() && !is_complex_pair(j)) {
        if (j.empty()) {
            os << path << ": []\n";
            return;
        }
        const bool matrix = j[0].is_array() && !is_complex_pair(j[0]);
        if (matrix && j.size() * j[0].size() <= 8) {
            for (std::size_t i = 0; i < j.size(); ++i) {
                os << path << "[" << i << "]: (";
                for (std::size_t k = 0; k < j[i].size(); ++k) os << (k ? ", " : "") << scalar_text(j[i][k]);
                os << ")\n";
            }
            return;
        }
        if (matrix) {
            os << path << ": [" << j.size() << " x " << j[0].size() << " matrix]\n";
            return;
        }
        if (j.size() > 8 && !j[0].is_object()) {
            os << path << ": [" << j.size() << " entries]\n";
            return;
        }
        for (std::size_t i = 0; i < j.size(); ++i) render(j[i], path + "[" + std::to_string(i) + "]", os);
        return;
    }
    os << path << ": " << scalar_text(j) << "\n";
}

}  // namespace detail

inline std::string render_text(const Json& report) {
    std::ostringstream os;
    detail::render(report, "", os);
    return os.str();
}

// --- command plumbing -------------------------------------------------------

struct CommonOptions {
    std::string report_path;
    bool text = false;
    std::optional<double> tol_rank;
    std::optional<double> tol_angle;
    std::optional<double> tol_residual;
};

inline double positive_env(const char* name) {
    const char* v = std::getenv(name);
    if (v == nullptr) return -1.0;
    char* end = nullptr;
    const double x = std::strtod(v, &end);
    if (end == v || *end != '\0' || !std::isfinite(x) || x <= 0.0)
        throw InputError(std::string(name) + " must be a positive number");
    return x;
}

// Precedence: flag, then the problem file, then ACCFORM_TOL_RANK, then defaults.
inline ToleranceConfig resolve_tolerances(const CommonOptions& o, const std::optional<ToleranceConfig>& from_file) {
    ToleranceConfig t;
    if (from_file) {
        t = *from_file;
    } else if (const double env = positive_env("ACCFORM_TOL_RANK"); env > 0.0) {
        t.rank_rtol = env;
    }
    auto set = [](double& dst, const std::optional<double>& v, const char* flag) {
        if (!v) return;
        if (!std::isfinite(*v) || *v <= 0.0) throw InputError(std::string(flag) + " must be positive");
        dst = *v;
    };
    set(t.rank_rtol, o.tol_rank, "--tol-rank");
    set(t.angle_tol, o.tol_angle, "--tol-angle");
    set(t.residual_tol, o.tol_residual, "--tol-residual");
    return t;
}

struct LoadedProblem {
    FormSystem system;
    std::string digest;
};

inline LoadedProblem load_problem_file(const std::string& path, const CommonOptions& o) {
    const std::string text = read_file(path);
    const Json j = parse_json(text, path);
    RawProblem p = problem_from_json(j);
    std::optional<ToleranceConfig> file_tol;
    if (j.contains("tolerances")) file_tol = p.tolerances;
    p.tolerances = resolve_tolerances(o, file_tol);
    return {normalize(p).system, sha256_hex(text)};
}

inline void emit(const Json& report, const CommonOptions& o, std::ostream& out) {
    const std::string body = o.text ? render_text(report) : report.dump(2) + "\n";
    if (o.report_path.empty())
        out << body;
    else
        write_atomic(o.report_path, body);
}

inline Json with_header(std::string_view command, const std::string& digest, Json body) {
    Json j;
    j["command"] = command;
    j["input_digest"] = digest;
    for (auto& [k, v] : body.items()) j[k] = std::move(v);
    j["tool_version"] = tool_version;
    return j;
}

// "e3" or "e1,e2": 1-based standard basis vectors of V.
inline Subspace parse_restriction(const std::string& spec, Index dim_V) {
    std::vector<Index> idx;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.size() < 2 || item[0] != 'e') throw InputError("--restrict: expected e<k>[,e<k>...], got \"" + spec + "\"");
        Index k = 0;
        try {
            std::size_t used = 0;
            k = static_cast<Index>(std::stoll(item.substr(1), &used));
            if (used != item.size() - 1) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw InputError("--restrict: bad basis index in \"" + item + "\"");
        }
        if (k < 1 || k > dim_V) throw InputError("--restrict: index out of range in \"" + item + "\"");
        idx.push_back(k - 1);
    }
    if (idx.empty()) throw InputError("--restrict: empty specification");
    ComplexMatrix m = ComplexMatrix::Zero(dim_V, static_cast<Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) m(idx[c], static_cast<Index>(c)) = 1.0;
    const Subspace w = orthonormal_range(m, ToleranceConfig{}, 1.0);
    if (w.dim() != m.cols()) throw InputError("--restrict: repeated basis vectors");
    return w;
}

// "k=v" with v parsed as JSON when possible, else kept as a string.
inline Json parse_params(const std::vector<std::string>& kvs) {
    Json p = Json::object();
    for (const auto& kv : kvs) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) throw InputError("--param: expected k=v, got \"" + kv + "\"");
        const std::string key = kv.substr(0, eq);
        const std::string val = kv.substr(eq + 1);
        Json v = Json::parse(val, nullptr, false);
        p[key] = v.is_discarded() ? Json(val) : v;
    }
    return p;
}

inline Json approx_report_to_json(const ApproxSchedule& s, const ApproxReport& r) {
    Json pts = Json::array();
    for (std::size_t i = 0; i < r.schedule.size(); ++i) {
        const auto& p = r.schedule[i];
        pts.push_back(Json{{"n", p.n},
                           {"delta", p.delta},
                           {"epsilon", p.epsilon},
                           {"theta", p.theta},
                           {"error", r.errors[i]},
                           {"bound", r.bounds[i]}});
    }
    return Json{{"family", to_string(s.family)}, {"n_max", s.n_max}, {"ratio", s.ratio},
                {"z_norm", r.z_norm}, {"points", pts}, {"warnings", r.warnings}};
}

inline ApproxSchedule approx_config_from_json(const Json& j) {
    if (!j.is_object()) throw InputError("experiment config must be an object");
    reject_unknown_keys(j, {"family", "matrix", "theta", "n_max", "ratio"}, "experiment config");
    ApproxSchedule s;
    if (!j.contains("family") || !j.at("family").is_string()) throw InputError("experiment config: missing \"family\"");
    const std::string f = j.at("family").get<std::string>();
    if (f == "scaled_identity")
        s.family = ApproxSchedule::Family::scaled_identity;
    else if (f == "scaled_matrix")
        s.family = ApproxSchedule::Family::scaled_matrix;
    else
        throw InputError("experiment config: unknown family \"" + f + "\"");
    if (j.contains("matrix") && !j.at("matrix").is_null()) s.matrix = matrix_from_json(j.at("matrix"), "matrix");
    if (j.contains("theta") && !j.at("theta").is_null()) {
        if (!j.at("theta").is_number()) throw InputError("experiment config: theta must be a number");
        s.theta = j.at("theta").get<double>();
    }
    if (j.contains("n_max")) s.n_max = static_cast<long long>(count_from_json(j, "n_max", "experiment config"));
    if (j.contains("ratio")) s.ratio = static_cast<long long>(count_from_json(j, "ratio", "experiment config"));
    return s;
}

inline Json invariance_criterion_json(const CriterionResult& c) {
    return Json{{"certificate", certificate_to_json(c.certificate)},
                {"evidence", to_string(c.evidence)},
                {"worst", c.worst}};
}

inline Json invariance_report_to_json(const FormInvarianceReport& r) {
    const InvarianceReport& o = r.operator_criteria;
    return Json{{"set", to_string(o.kind)},
                {"semigroup", invariance_criterion_json(o.semigroup)},
                {"resolvent", invariance_criterion_json(o.resolvent)},
                {"generator", invariance_criterion_json(o.generator)},
                {"operator_criteria_agree", o.agree},
                {"operator_note", o.note},
                {"form_criterion", certificate_to_json(r.form_criterion)},
                {"form_evidence", to_string(r.evidence)},
                {"form_worst", r.worst},
                {"approximation_required", r.approximation_required},
                {"form_agrees_with_operator", r.agree}};
}

inline Json gallery_report_to_json(const GalleryReport& r) {
    Json facts = Json::array();
    for (const auto& f : r.facts)
        facts.push_back(Json{{"id", f.id},
                             {"expected", f.expected},
                             {"provenance", to_string(f.provenance)},
                             {"pass", f.pass},
                             {"value", f.value},
                             {"detail", f.detail}});
    return Json{{"case", r.name}, {"parameters", r.parameters}, {"facts", facts}, {"all_pass", r.all_pass()}};
}

// --- subcommands ------------------------------------------------------------

inline int cmd_analyze(const std::string& path, const CommonOptions& o, std::ostream& out) {
    const LoadedProblem lp = load_problem_file(path, o);
    const AnalysisReport r = analyze(lp.system, lp.digest);
    emit(to_json(r), o, out);
    return analysis_exit_code(r);
}

inline int cmd_fov(const std::string& path, Index angles, const CommonOptions& o, std::ostream& out) {
    if (angles < 3) throw InputError("--angles must be at least 3");
    const LoadedProblem lp = load_problem_file(path, o);
    const SectorialityReport s = check_sectorial(lp.system.T0(), lp.system.tolerances());
    Json body{{"T0", to_json(fov_record(lp.system.T0(), angles))},
              {"T", to_json(fov_record(derived_T(lp.system), angles))},
              {"sectoriality_T0",
               Json{{"vertex_zero", certificate_to_json(s.vertex_zero)},
                    {"sectorial", certificate_to_json(s.sectorial)},
                    {"semi_angle", optional_to_json(s.semi_angle, [](double a) { return a; })}}}};
    emit(with_header("fov", lp.digest, std::move(body)), o, out);
    return exit_ok;
}

inline int cmd_approx(const std::string& path, const std::string& config, const CommonOptions& o, std::ostream& out) {
    const LoadedProblem lp = load_problem_file(path, o);
    const std::string cfg_text = read_file(config);
    const ApproxSchedule s = approx_config_from_json(parse_json(cfg_text, config));
    const ApproxReport r = approx_experiment(lp.system, s);
    Json body = approx_report_to_json(s, r);
    body["config_digest"] = sha256_hex(cfg_text);
    emit(with_header("approx", lp.digest, std::move(body)), o, out);
    return exit_ok;
}

inline int cmd_generate(const std::string& path, const CommonOptions& o, std::ostream& out) {
    const std::string text = read_file(path);
    const Json j = parse_json(text, path);
    if (!j.is_object()) throw InputError("operator file must be an object");
    reject_unknown_keys(j, {"dim_H", "A"}, "operator file");
    const Index n = count_from_json(j, "dim_H", "operator file");
    if (!j.contains("A")) throw InputError("operator file: missing key \"A\"");
    const ComplexMatrix a = matrix_from_json(j.at("A"), "A", n, n);
    const ToleranceConfig tol = resolve_tolerances(o, std::nullopt);
    const AssociatedOperator op = make_operator(Subspace::full(n), a, tol);
    const CayleyData c = cayley(op, tol);
    const FormSystem fs = generate_form(op, tol);
    Json body{{"problem", problem_to_json(raw_problem(fs))},
              {"cayley", matrix_to_json(c.J_matrix)},
              {"roundtrip_residual", norm2(build_operator(fs).matrix() - a)}};
    emit(with_header("generate", sha256_hex(text), std::move(body)), o, out);
    return exit_ok;
}

inline int cmd_invariance(const std::string& path, const std::string& set, const std::vector<double>& lambdas,
                          const std::vector<double>& times, const CommonOptions& o, std::ostream& out) {
    const LoadedProblem lp = load_problem_file(path, o);
    const Index n = lp.system.dim_H();
    std::optional<ProjectionSpec> p;
    std::string set_digest;
    if (set == "orthant") {
        p = ProjectionSpec::orthant(n);
    } else if (set.rfind("subspace:", 0) == 0) {
        const std::string file = set.substr(9);
        const std::string text = read_file(file);
        const Json j = parse_json(text, file);
        if (!j.is_object()) throw InputError("subspace file must be an object");
        reject_unknown_keys(j, {"basis"}, "subspace file");
        if (!j.contains("basis")) throw InputError("subspace file: missing key \"basis\"");
        const ComplexMatrix b = matrix_from_json(j.at("basis"), "basis", n);
        p = ProjectionSpec::onto(orthonormal_range(b, lp.system.tolerances(), 1.0));
        set_digest = sha256_hex(text);
    } else {
        throw InputError("--set must be orthant or subspace:<file>");
    }
    InvarianceOptions opt;
    opt.lambdas = lambdas.empty() ? InvarianceOptions::default_grid() : lambdas;
    opt.ts = times.empty() ? InvarianceOptions::default_grid() : times;
    for (double l : opt.lambdas)
        if (!(l > 0.0)) throw InputError("--lambdas must be positive");
    for (double t : opt.ts)
        if (!(t >= 0.0)) throw InputError("--times must be nonnegative");
    const FormInvarianceReport r = form_invariance_check(lp.system, *p, opt);
    Json body = invariance_report_to_json(r);
    body["lambdas"] = opt.lambdas;
    body["times"] = opt.ts;
    if (!set_digest.empty()) body["set_digest"] = set_digest;
    emit(with_header("invariance", lp.digest, std::move(body)), o, out);
    const InvarianceReport& c = r.operator_criteria;
    if (!c.agree || !r.agree) return exit_degenerate;
    const bool ok = c.semigroup.certificate.holds() && c.resolvent.certificate.holds() &&
                    c.generator.certificate.holds() && r.form_criterion.holds();
    return ok ? exit_ok : exit_negative;
}

inline int cmd_gallery(const std::string& name, const std::vector<std::string>& kvs, const std::string& restrict_spec,
                       const CommonOptions& o, std::ostream& out) {
    const Json params = parse_params(kvs);
    const GalleryCase c = example(name, params, resolve_tolerances(o, std::nullopt));
    const std::string digest = sha256_hex(Json{{"case", name}, {"parameters", c.parameters}}.dump());
    if (restrict_spec.empty()) {
        const GalleryReport r = run_case(c);
        emit(with_header("gallery", digest, gallery_report_to_json(r)), o, out);
        return r.all_pass() ? exit_ok : exit_negative;
    }
    const Subspace w = parse_restriction(restrict_spec, c.system.dim_V());
    const FormSystem restricted = restrict(c.system, w);
    const AnalysisReport r = analyze(restricted, digest);
    emit(with_header("gallery", digest,
                     Json{{"case", name}, {"parameters", c.parameters}, {"restriction", restrict_spec},
                          {"analysis", to_json(r)}}),
         o, out);
    return analysis_exit_code(r);
}

// --- entry point ------------------------------------------------------------

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Accretive form toolkit: association, generation and invariance checks", "accform"};
    app.require_subcommand(1);
    CommonOptions o;
    bool json_flag = false;
    app.add_option("--report", o.report_path, "Write the report to this path (atomically)");
    auto* fj = app.add_flag("--json", json_flag, "JSON report (default)");
    auto* ft = app.add_flag("--text", o.text, "Human-readable report");
    fj->excludes(ft);
    app.add_option("--tol-rank", o.tol_rank, "Relative rank tolerance");
    app.add_option("--tol-angle", o.tol_angle, "Principal angle tolerance");
    app.add_option("--tol-residual", o.tol_residual, "Residual tolerance");

    std::string problem, config, set, name, restrict_spec;
    std::vector<std::string> params;
    std::vector<double> lambdas, times;
    Index angles = 720;

    auto* analyze_cmd = app.add_subcommand("analyze", "Certificates, association, operator and resolvent");
    analyze_cmd->add_option("problem", problem, "Problem file")->required();
    auto* approx_cmd = app.add_subcommand("approx", "Norm-resolvent approximation experiment");
    approx_cmd->add_option("problem", problem, "Problem file")->required();
    approx_cmd->add_option("--config", config, "Experiment config file")->required();
    auto* generate_cmd = app.add_subcommand("generate", "Form generating an everywhere-defined accretive operator");
    generate_cmd->add_option("operator", problem, "Operator file")->required();
    auto* inv_cmd = app.add_subcommand("invariance", "Invariance of a closed convex set under the semigroup");
    inv_cmd->add_option("problem", problem, "Problem file")->required();
    inv_cmd->add_option("--set", set, "orthant or subspace:<file>")->required();
    inv_cmd->add_option("--lambdas", lambdas, "Resolvent parameters")->delimiter(',');
    inv_cmd->add_option("--times", times, "Semigroup times")->delimiter(',');
    auto* gal_cmd = app.add_subcommand("gallery", "Run a named example");
    gal_cmd->add_option("name", name, "Case name")->required()->check(CLI::IsMember(gallery_names()));
    gal_cmd->add_option("--param", params, "Parameter k=v (repeatable)");
    gal_cmd->add_option("--restrict", restrict_spec, "Restrict to basis vectors, e.g. e3 or e1,e2");
    auto* fov_cmd = app.add_subcommand("fov", "Field of values of T0 and T");
    fov_cmd->add_option("problem", problem, "Problem file")->required();
    fov_cmd->add_option("--angles", angles, "Number of support angles");
    for (auto* s : app.get_subcommands({})) s->fallthrough();

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*analyze_cmd) return cmd_analyze(problem, o, out);
        if (*approx_cmd) return cmd_approx(problem, config, o, out);
        if (*generate_cmd) return cmd_generate(problem, o, out);
        if (*inv_cmd) return cmd_invariance(problem, set, lambdas, times, o, out);
        if (*gal_cmd) return cmd_gallery(name, params, restrict_spec, o, out);
        if (*fov_cmd) return cmd_fov(problem, angles, o, out);
    } catch (const InputError& e) {
        err << "accform: input error: " << e.what() << "\n";
        return exit_usage;
    } catch (const PreconditionError& e) {
        err << "accform: " << e.what() << "\n";
        return exit_negative;
    } catch (const NumericalDegeneracyError& e) {
        err << "accform: numerical degeneracy: " << e.what() << "\n";
        return exit_degenerate;
    } catch (const std::exception& e) {
        err << "accform: error: " << e.what() << "\n";
        return exit_degenerate;
    }
    return exit_usage;
}

}  // namespace accform::cli
