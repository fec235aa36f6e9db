#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "accform/cli.hpp"
#include "support/worked_examples.hpp"

using namespace accform;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
    Json json() const { return Json::parse(out); }
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

class TempDir {
public:
    TempDir() : path_(fs::temp_directory_path() / ("accform_cli_" + std::to_string(::getpid()))) {
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    std::string write(const std::string& name, const std::string& text) const {
        const fs::path p = path_ / name;
        std::ofstream(p) << text;
        return p.string();
    }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

std::string problem_text(const FormSystem& f) { return problem_to_json(raw_problem(f)).dump(); }

struct EnvGuard {
    explicit EnvGuard(const char* v) {
        if (v)
            ::setenv("ACCFORM_TOL_RANK", v, 1);
        else
            ::unsetenv("ACCFORM_TOL_RANK");
    }
    ~EnvGuard() { ::unsetenv("ACCFORM_TOL_RANK"); }
};

const char* multival_json = R"({"dim_V": 2, "dim_H": 1,
  "T0": [[[0, 0], [1, 0]], [[-1, 0], [0, 0]]],
  "J": [[[0, 0], [1, 0]]]})";

}  // namespace

TEST_CASE("analyze multival: exit 1 with witness (1, 0)") {
    TempDir dir;
    const Run r = run({"analyze", dir.write("multival.json", multival_json)});
    CHECK(r.code == 1);
    const Json j = r.json();
    CHECK(j.at("condition_certificates").at("condition_iii").at("verdict") == "holds");
    const Json& a = j.at("association");
    CHECK(a.at("verdict") == "fails");
    CHECK(a.at("check") == "check_associated");
    const ComplexVector w = vector_from_json(a.at("witness")[0], "w");
    CHECK(std::abs(w(0) - 1.0) < 1e-12);
    CHECK(std::abs(w(1)) < 1e-12);
    CHECK(j.at("dims").at("D_ja") == 1);
    CHECK(j.at("dims").at("ker_j") == 1);
    CHECK(j.at("operator").is_null());
    CHECK(j.at("tool_version") == std::string(cli::tool_version));
    CHECK(j.at("input_digest") == cli::sha256_hex(multival_json));
}

TEST_CASE("analyze: associated pair gives operator, resolvent and exit 0") {
    TempDir dir;
    ComplexMatrix b(2, 2);
    b << 2.0, 1.0, -1.0, 1.0;
    const Run r = run({"analyze", dir.write("g.json", problem_text(testing::gen_inverse(b)))});
    CHECK(r.code == 0);
    const Json j = r.json();
    CHECK(j.at("m_accretivity").at("verdict") == "holds");
    const ComplexMatrix basis = matrix_from_json(j.at("operator").at("domain_basis"), "q");
    const ComplexMatrix action = matrix_from_json(j.at("operator").at("action"), "f");
    CHECK(norm2(action * basis.adjoint() - b.inverse()) < 1e-10);
    const ComplexMatrix res = matrix_from_json(j.at("resolvent_at_one"), "r");
    CHECK(norm2(res - (ComplexMatrix::Identity(2, 2) + b.inverse()).inverse()) < 1e-10);
}

TEST_CASE("every certificate names its check and tolerance") {
    TempDir dir;
    const Json j = run({"analyze", dir.write("z.json", problem_text(testing::zero_form_rank1()))}).json();
    for (const auto& [k, v] : j.at("condition_certificates").items()) {
        if (!v.is_object()) continue;
        CHECK(v.contains("check"));
        CHECK(v.contains("tolerance"));
        CHECK_FALSE(v.at("check").get<std::string>().empty());
    }
}

TEST_CASE("gallery welldef_nonmacc_truncated restricted to e3 reports A = 4/3") {
    const Run r = run({"gallery", "welldef_nonmacc_truncated", "--param", "N=3", "--restrict", "e3"});
    CHECK(r.code == 0);
    const Json j = r.json();
    const ComplexMatrix a = matrix_from_json(j.at("analysis").at("operator").at("action"), "A");
    REQUIRE(a.size() == 1);
    CHECK(std::abs(a(0, 0) - 4.0 / 3.0) <= 1e-12);
    CHECK(j.at("restriction") == "e3");
}

TEST_CASE("gallery runs all facts and reports them in order") {
    const Run r = run({"gallery", "multival"});
    CHECK(r.code == 0);
    const Json j = r.json();
    CHECK(j.at("all_pass") == true);
    CHECK(j.at("facts")[0].at("id") == "T_invertible");
    CHECK(run({"gallery", "welldef_nonmacc_truncated", "--restrict", "e1,e2"}).code == 1);
    CHECK(run({"gallery", "invar_block", "--param", "R=[1,2]"}).code == 0);
}

TEST_CASE("reports are byte-identical across runs and round-trip losslessly") {
    TempDir dir;
    const std::string p = dir.write("m.json", problem_text(testing::welldef_truncated(5)));
    const Run a = run({"analyze", p});
    const Run b = run({"analyze", p});
    CHECK(a.out == b.out);

    const Json j = a.json();
    const cli::AnalysisReport rep = cli::analysis_report_from_json(j);
    CHECK(cli::to_json(rep) == j);
    CHECK(cli::to_json(rep).dump(2) + "\n" == a.out);
    CHECK_THROWS_AS(cli::analysis_report_from_json(Json{{"input_digest", "x"}}), InputError);
}

TEST_CASE("--report writes atomically and --text renders a summary") {
    TempDir dir;
    const std::string p = dir.write("m.json", multival_json);
    const std::string out = dir.file("report.json");
    const Run r = run({"analyze", p, "--report", out});
    CHECK(r.code == 1);
    CHECK(r.out.empty());
    CHECK(fs::exists(out));
    CHECK_FALSE(fs::exists(out + ".tmp"));
    std::ifstream in(out);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == run({"analyze", p}).out);

    const Run t = run({"--text", "analyze", p});
    CHECK(t.out.find("association.verdict: fails") != std::string::npos);
    CHECK(t.out.find("association.witness[0]: (1 + 0i, 0 + 0i)") != std::string::npos);
    CHECK(run({"analyze", p, "--report", dir.file("missing_dir/r.json")}).code == 2);
}

TEST_CASE("tolerance precedence: flag over file over environment over default") {
    TempDir dir;
    const std::string plain = dir.write("m.json", multival_json);
    auto rank_tol = [](const Run& r) {
        // condition_iii threshold is dim_V * rank_rtol * |T| with dim_V = 2.
        return r.json().at("condition_certificates").at("condition_iii").at("tolerance").get<double>();
    };
    const double norm_t = norm2(derived_T(testing::multival()));
    {
        EnvGuard g(nullptr);
        CHECK(rank_tol(run({"analyze", plain})) == Catch::Approx(2 * 1e-10 * norm_t));
    }
    {
        EnvGuard g("1e-6");
        CHECK(rank_tol(run({"analyze", plain})) == Catch::Approx(2 * 1e-6 * norm_t));
        CHECK(rank_tol(run({"analyze", plain, "--tol-rank", "1e-4"})) == Catch::Approx(2 * 1e-4 * norm_t));
        Json withfile = Json::parse(multival_json);
        withfile["tolerances"] = Json{{"rank_rtol", 1e-8}, {"angle_tol", 1e-8}, {"residual_tol", 1e-9}};
        CHECK(rank_tol(run({"analyze", dir.write("t.json", withfile.dump())})) == Catch::Approx(2 * 1e-8 * norm_t));
    }
    {
        EnvGuard g("not-a-number");
        CHECK(run({"analyze", plain}).code == 2);
    }
    CHECK(run({"analyze", plain, "--tol-rank", "-1"}).code == 2);
}

TEST_CASE("generate: skew operator roundtrips through analyze") {
    TempDir dir;
    const std::string op = dir.write("op.json", R"({"dim_H": 2, "A": [[[0,0],[1,0]],[[-1,0],[0,0]]]})");
    const Run g = run({"generate", op});
    REQUIRE(g.code == 0);
    const Json j = g.json();
    CHECK(j.at("roundtrip_residual").get<double>() < 1e-12);
    const Run a = run({"analyze", dir.write("p.json", j.at("problem").dump())});
    CHECK(a.code == 0);
    const Json aj = a.json();
    const ComplexMatrix q = matrix_from_json(aj.at("operator").at("domain_basis"), "q");
    const ComplexMatrix f = matrix_from_json(aj.at("operator").at("action"), "f");
    ComplexMatrix s(2, 2);
    s << 0.0, 1.0, -1.0, 0.0;
    CHECK(norm2(f * q.adjoint() - s) < 1e-10);

    CHECK(run({"generate", dir.write("bad.json", R"({"dim_H": 1, "A": [[[-1, 0]]]})")}).code == 1);
    CHECK(run({"generate", dir.write("bad2.json", R"({"dim_H": 2, "A": [[[1, 0]]]})")}).code == 2);
    CHECK(run({"generate", dir.write("bad3.json", R"({"dim_H": 1, "A": [[[1, 0]]], "B": 1})")}).code == 2);
}

TEST_CASE("approx: errors stay under the bounds") {
    TempDir dir;
    ComplexMatrix b(2, 2);
    b << 2.0, 1.0, -1.0, 1.0;
    const std::string p = dir.write("g.json", problem_text(testing::gen_inverse(b)));
    const std::string cfg = dir.write("c.json", R"({"family": "scaled_identity", "theta": 0.0, "n_max": 1000})");
    const Run r = run({"approx", p, "--config", cfg});
    REQUIRE(r.code == 0);
    const Json j = r.json();
    CHECK(j.at("points").size() == 4);
    for (const auto& pt : j.at("points")) CHECK(pt.at("error").get<double>() <= pt.at("bound").get<double>() + 1e-10);
    const std::string cfg2 = dir.write("c2.json", R"({"family": "scaled_identity", "n_max": 64, "ratio": 2})");
    CHECK(run({"approx", p, "--config", cfg2}).json().at("points").size() == 7);
    CHECK(run({"approx", p, "--config", dir.write("r.json", R"({"family": "scaled_identity", "ratio": 1})")}).code == 2);
    CHECK(run({"approx", p, "--config", dir.write("x.json", R"({"family": "nope"})")}).code == 2);
    CHECK(run({"approx", p}).code == 2);
}

TEST_CASE("invariance: orthant for the heat form, subspace for the block example") {
    TempDir dir;
    const std::string heat = dir.write("heat.json", problem_text(testing::dirichlet_heat(8)));
    const Run r = run({"invariance", heat, "--set", "orthant", "--lambdas", "0.5,1,2", "--times", "0.1,1"});
    CHECK(r.code == 0);
    CHECK(r.json().at("generator").at("evidence") == "certified");
    CHECK(r.json().at("lambdas").size() == 3);

    RealVector rr(2);
    rr << 1.0, 3.0;
    const std::string blk = dir.write("blk.json", problem_text(testing::invar_block(rr)));
    const std::string sub =
        dir.write("sub.json", Json{{"basis", matrix_to_json(ComplexMatrix::Identity(4, 2))}}.dump());
    const Run s = run({"invariance", blk, "--set", "subspace:" + sub});
    CHECK(s.code == 0);
    CHECK(s.json().at("semigroup").at("evidence") == "exact");

    // span{e3, e4} is not invariant: A e3 has a component -2R along H1.
    ComplexMatrix lower = ComplexMatrix::Zero(4, 2);
    lower(2, 0) = lower(3, 1) = 1.0;
    const std::string sub2 = dir.write("sub2.json", Json{{"basis", matrix_to_json(lower)}}.dump());
    CHECK(run({"invariance", blk, "--set", "subspace:" + sub2}).code == 1);
    CHECK(run({"invariance", blk, "--set", "cone"}).code == 2);
    CHECK(run({"invariance", blk, "--set", "orthant", "--lambdas", "-1"}).code == 2);
}

TEST_CASE("fov: Hermitian T0 polygon lies on the real axis") {
    TempDir dir;
    const std::string p = dir.write("h.json", problem_text(testing::dirichlet_heat(4)));
    const Run r = run({"fov", p, "--angles", "64"});
    CHECK(r.code == 0);
    const Json j = r.json();
    for (const auto& z : j.at("T0").at("boundary_points")) CHECK(std::abs(z[1].get<double>()) < 1e-8);
    CHECK(j.at("sectoriality_T0").at("sectorial").at("verdict") == "holds");
    CHECK(run({"fov", p, "--angles", "2"}).code == 2);
}

TEST_CASE("usage and input errors exit 2") {
    TempDir dir;
    CHECK(run({"analyze", "nosuchfile.json"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"analyze"}).code == 2);
    CHECK(run({"--json", "--text", "analyze", "x.json"}).code == 2);
    CHECK(run({"gallery", "nosuch"}).code == 2);
    CHECK(run({"gallery", "signdiff", "--param", "N=zero"}).code == 2);
    CHECK(run({"gallery", "signdiff", "--param", "novalue"}).code == 2);
    CHECK(run({"gallery", "welldef_nonmacc_truncated", "--restrict", "e9"}).code == 2);
    CHECK(run({"gallery", "welldef_nonmacc_truncated", "--restrict", "x1"}).code == 2);
    CHECK(run({"analyze", dir.write("bad.json", "{not json")}).code == 2);
    CHECK(run({"analyze", dir.write("dim.json", R"({"dim_V": 2, "dim_H": 1, "T0": [[[0,0]]], "J": [[[0,0],[1,0]]]})")})
              .code == 2);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("sha256 matches a published test vector") {
    CHECK(cli::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(cli::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}
