#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

using Json = nlohmann::json;

namespace {

const std::string kCli = RIQS_CLI_PATH;
const std::string kDir = RIQS_TEST_DIR;

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run(const std::string& args) {
    const std::string out_path = kDir + "/cli_stdout.txt";
    const std::string err_path = kDir + "/cli_stderr.txt";
    const std::string cmd = kCli + " " + args + " > " + out_path + " 2> " + err_path;
    const int raw = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    return r;
}

std::string write_file(const std::string& name, const std::string& text) {
    const std::string path = kDir + "/" + name;
    std::ofstream out(path);
    out << text;
    return path;
}

std::string spin_spin_config(const std::string& name, double lambda, double tau = 1.0) {
    Json j;
    j["model_kind"] = "spin-spin";
    j["tau"] = tau;
    j["lambda"] = lambda;
    j["beta_S"] = 0.0;
    j["beta_E"] = 1.0;
    j["spin_spin"] = {{"E_S", 1.0},
                      {"E_E", 1.5},
                      {"I", Json::array({Json::array({{0.0, 0.0}, {1.0, 0.0}}),
                                         Json::array({{1.0, 0.0}, {0.0, 0.0}})})}};
    return write_file(name, j.dump());
}

std::string sf_config(const std::string& name, const std::string& kind, double tau,
                      double lambda, double rate, double beta_e) {
    Json j;
    j["model_kind"] = kind;
    j["tau"] = tau;
    j["lambda"] = lambda;
    j["beta_S"] = 0.0;
    j["beta_E"] = beta_e;
    j["sf"] = {{"family", "exp"}, {"params", {{"amplitude", 1.0}, {"rate", rate}}}};
    return write_file(name, j.dump());
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_CASE("spectrum: ergodic config exits 0 with the unit eigenvalue") {
    const std::string cfg = spin_spin_config("erg.json", 0.6);
    auto r = run("spectrum --config " + cfg);
    CHECK(r.exit_code == 0);
    const Json j = Json::parse(r.out);
    CHECK(j.at("ergodic").get<bool>());
    double best = 1e300;
    for (const auto& ev : j.at("eigenvalues")) {
        const double re = ev[0].get<double>(), im = ev[1].get<double>();
        best = std::min(best, std::hypot(re - 1.0, im));
    }
    CHECK(best <= 1e-10);
    CHECK(j.at("gamma").get<double>() > 0.0);
}

TEST_CASE("spectrum: uncoupled config exits 2 (degenerate fixed point)") {
    const std::string cfg = spin_spin_config("free.json", 0.0);
    auto r = run("spectrum --config " + cfg);
    CHECK(r.exit_code == 2);
    const Json j = Json::parse(r.out);
    CHECK(!j.at("ergodic").get<bool>());
    CHECK(j.at("not_ergodic_reason").get<std::string>() == "degenerate-one");
}

TEST_CASE("malformed JSON exits 1 with a parse diagnostic") {
    const std::string cfg = write_file("broken.json", "{ not json");
    auto r = run("spectrum --config " + cfg);
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("parse") != std::string::npos);
}

TEST_CASE("emitted JSON re-parses bit-exactly and output is deterministic") {
    const std::string cfg = spin_spin_config("erg2.json", 0.6);
    auto r1 = run("spectrum --config " + cfg);
    auto r2 = run("spectrum --config " + cfg);
    CHECK(r1.out == r2.out);
    const Json parsed = Json::parse(r1.out);
    CHECK(parsed.dump(2) + "\n" == r1.out);
}

TEST_CASE("simulate: identity observable stays at one") {
    const std::string cfg = spin_spin_config("sim.json", 0.6);
    auto r = run("simulate --config " + cfg + " --chain 4 --steps 3 --points-per-interval 2");
    CHECK(r.exit_code == 0);
    auto rows = parse_csv(r.out);
    REQUIRE(rows.size() >= 2);
    CHECK(rows[0][0] == "t");
    REQUIRE(rows[0].size() == 6);
    for (size_t i = 1; i < rows.size(); ++i) {
        CHECK(std::abs(std::stod(rows[i][1]) - 1.0) < 1e-9);
        CHECK(std::abs(std::stod(rows[i][5])) < 1e-9);
    }
}

TEST_CASE("simulate: ergodic run decays toward the asymptotic value") {
    const std::string cfg = spin_spin_config("sim2.json", 0.6);
    const std::string obs = write_file(
        "obs.json",
        R"({"a_s": [[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[0.0,0.0]]]})");
    auto r = run("simulate --config " + cfg +
                 " --chain 8 --steps 8 --points-per-interval 1 --observable " + obs);
    CHECK(r.exit_code == 0);
    auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 10);  // header + 9 samples
    const double first = std::stod(rows[1][5]);
    const double last = std::stod(rows.back()[5]);
    CHECK(last < first);
    CHECK(last < 5e-3);
}

TEST_CASE("simulate: insufficient chain capacity exits 1") {
    const std::string cfg = spin_spin_config("sim3.json", 0.6);
    auto r = run("simulate --config " + cfg + " --chain 2 --steps 5");
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("capacity") != std::string::npos);
}

TEST_CASE("thermo: uncoupled model reports zero productions") {
    const std::string cfg = spin_spin_config("th0.json", 0.0);
    auto r = run("thermo --config " + cfg);
    CHECK(r.exit_code == 0);
    const Json j = Json::parse(r.out);
    CHECK(j.at("j_plus_value").get<double>() == 0.0);
    CHECK(j.at("dE_plus").get<double>() == 0.0);
    CHECK(j.at("dS_plus").get<double>() == 0.0);
    CHECK(!j.at("no_invariant_state").get<bool>());
}

TEST_CASE("thermo: benchmark reports a strictly positive flux") {
    const std::string cfg = spin_spin_config("th.json", 0.6);
    auto r = run("thermo --config " + cfg);
    CHECK(r.exit_code == 0);
    const Json j = Json::parse(r.out);
    CHECK(j.at("j_plus_value").get<double>() > 1e-6);
    CHECK(j.at("form_residual").get<double>() <= 1e-7);
    CHECK(j.at("second_law_residual").get<double>() <= 1e-12);
    CHECK(j.at("no_invariant_state").get<bool>());
}

TEST_CASE("oracle: sf-quadratic default has positive alphas") {
    const std::string cfg = sf_config("sfq.json", "sf-quadratic", 1.0, 0.05, 1.0, 1.0);
    auto r = run("oracle --config " + cfg);
    CHECK(r.exit_code == 0);
    const Json j = Json::parse(r.out);
    CHECK(j.at("alpha1").get<double>() > 0.0);
    CHECK(j.at("alpha2").get<double>() > 0.0);
    CHECK(j.at("dS_plus_leading").get<double>() > 0.0);
}

TEST_CASE("oracle: spin-spin closed forms are exposed") {
    const std::string cfg = spin_spin_config("or.json", 0.05);
    auto r = run("oracle --config " + cfg);
    CHECK(r.exit_code == 0);
    const Json j = Json::parse(r.out);
    CHECK(std::abs(j.at("alpha1").get<double>() - 1.1079441331609574) < 1e-9);
    CHECK(j.at("model").get<std::string>() == "spin-spin");
}

TEST_CASE("verify: resonant tau = pi/2 spin-fermion config exits 3") {
    const std::string cfg =
        sf_config("res.json", "sf-quadratic", 1.5707963267948966, 0.05, 1.0, 1.0);
    auto r = run("verify --config " + cfg);
    CHECK(r.exit_code == 3);
}

TEST_CASE("verify: benchmark passes all property checks") {
    const std::string cfg = spin_spin_config("vf.json", 0.6);
    auto r = run("verify --config " + cfg + " --seed 7");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("FAIL") == std::string::npos);
    CHECK(r.out.find("PASS") != std::string::npos);
}

TEST_CASE("verify: spin-fermion checks pass for the linear model") {
    const std::string cfg = sf_config("vfl.json", "sf-linear", 1.0, 0.05, 1.0, 1.0);
    auto r = run("verify --config " + cfg);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("tolerance overrides: valid file honored, unknown key exits 1") {
    const std::string cfg = spin_spin_config("tol.json", 0.6);
    const std::string good = write_file("tols.json", R"({"unit_circle": 1e-6})");
    CHECK(run("spectrum --config " + cfg + " --tol-overrides " + good).exit_code == 0);
    const std::string bad = write_file("tols_bad.json", R"({"nonsense": 1.0})");
    CHECK(run("spectrum --config " + cfg + " --tol-overrides " + bad).exit_code == 1);
}

TEST_CASE("oracle on a custom-finite config exits 1") {
    Json j;
    j["model_kind"] = "custom-finite";
    j["tau"] = 1.0;
    j["lambda"] = 0.1;
    j["beta_S"] = 0.2;
    j["beta_E"] = 1.0;
    const Json h = Json::array({Json::array({{0.0, 0.0}, {0.0, 0.0}}),
                                Json::array({{0.0, 0.0}, {1.0, 0.0}})});
    const Json sx = Json::array({Json::array({{0.0, 0.0}, {1.0, 0.0}}),
                                 Json::array({{1.0, 0.0}, {0.0, 0.0}})});
    j["custom"] = {{"h_S", h}, {"h_E", h}, {"v_terms", Json::array({{{"A", sx}, {"B", sx}}})}};
    const std::string cfg = write_file("custom.json", j.dump());
    CHECK(run("oracle --config " + cfg).exit_code == 1);
    // while spectrum and thermo accept the custom kind
    CHECK(run("spectrum --config " + cfg).exit_code == 0);
    CHECK(run("thermo --config " + cfg).exit_code == 0);
}
