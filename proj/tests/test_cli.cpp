// End-to-end tests of the command-line tool: exit codes, output formats,
// bit-exact agreement with the library, and reproducibility from the echoed
// configuration. The binary location is injected by the build as
// SKEWBM_CLI_PATH.
#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

#include <skewbm/skewbm.hpp>

using nlohmann::json;
using namespace skewbm;

namespace {

struct RunResult {
    int status = -1;
    std::string out;
};

RunResult run_cli(const std::string& args, bool merge_stderr = false) {
    const std::string cmd =
        std::string(SKEWBM_CLI_PATH) + " " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    std::size_t got = 0;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
    const int rc = pclose(pipe);
    REQUIRE(WIFEXITED(rc));
    return {WEXITSTATUS(rc), out};
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

// Data rows of a CSV run: everything between the header line and the trailing
// "# stats" comment.
std::vector<std::vector<std::string>> csv_rows(const std::vector<std::string>& lines) {
    REQUIRE(lines.size() >= 4);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 2; i + 1 < lines.size(); ++i) {
        std::vector<std::string> fields;
        std::istringstream in(lines[i]);
        std::string field;
        while (std::getline(in, field, ',')) fields.push_back(field);
        rows.push_back(fields);
    }
    return rows;
}

json embedded_json(const std::string& line, const std::string& prefix) {
    REQUIRE(line.rfind(prefix, 0) == 0);
    return json::parse(line.substr(prefix.size()));
}

}  // namespace

TEST_CASE("usage errors exit with code 2 and emit error JSON") {
    for (const std::string& args :
         {std::string(""), std::string("frobnicate"), std::string("density --bogus 1"),
          std::string("validate --suite bogus"), std::string("density --format xml"),
          std::string("density --ysteps 0"), std::string("sample --n 0"),
          std::string("density --ymin 2 --ymax 1")}) {
        RunResult r = run_cli(args, /*merge_stderr=*/true);
        INFO("args: " << args);
        CHECK(r.status == 2);
        CHECK(r.out.find("\"error\"") != std::string::npos);
    }
    CHECK(run_cli("--help").status == 0);
}

TEST_CASE("domain errors exit with code 3 and emit error JSON") {
    for (const std::string& args :
         {std::string("density --z1 2 --z2 1"), std::string("density --beta1 1.5"),
          std::string("density --beta1 1 --beta2 1"),
          std::string("density --beta1 0.5 --beta2 -0.5 --mu 1"),
          std::string("sample --mu 0.5"), std::string("density --t 0")}) {
        RunResult r = run_cli(args, /*merge_stderr=*/true);
        INFO("args: " << args);
        CHECK(r.status == 3);
        CHECK(r.out.find("\"error\"") != std::string::npos);
    }
}

TEST_CASE("density CSV reproduces the library bit for bit and exposes the jump") {
    const SkewParams p{-1.0, 1.0, 0.5, -0.5, 0.0};
    const TruncationPolicy policy{10, 1e-10};
    RunResult r = run_cli(
        "density --z1 -1 --z2 1 --beta1 0.5 --beta2 -0.5 --t 0.9 --x 0.4 "
        "--ymin -1.5 --ymax 1.5 --ysteps 7");
    REQUIRE(r.status == 0);
    const auto lines = split_lines(r.out);
    REQUIRE(lines.size() >= 4);
    CHECK(lines[0].rfind("# config ", 0) == 0);
    CHECK(lines[1] == "y,density,error_bound,terms");
    CHECK(lines.back().rfind("# stats ", 0) == 0);

    const auto rows = csv_rows(lines);
    // 7 grid points plus two one-sided rows per interior barrier.
    REQUIRE(rows.size() == 11);
    double left_z2 = 0.0, right_z2 = 0.0;
    for (const auto& row : rows) {
        REQUIRE(row.size() == 4);
        const double y = std::strtod(row[0].c_str(), nullptr);
        const double value = std::strtod(row[1].c_str(), nullptr);
        const double bound = std::strtod(row[2].c_str(), nullptr);
        const int terms = std::atoi(row[3].c_str());
        const DensityValue dv = density_driftless(0.9, 0.4, y, p, policy);
        CHECK(value == dv.value);
        CHECK(bound == dv.error_bound);
        CHECK(terms == dv.terms_used);
        if (y == 1.0 - 1e-9) left_z2 = value;
        if (y == 1.0 + 1e-9) right_z2 = value;
    }
    REQUIRE(left_z2 > 0.0);
    REQUIRE(right_z2 > 0.0);
    // (1 + beta2) p(z2-) = (1 - beta2) p(z2+) with beta2 = -0.5.
    CHECK(left_z2 / right_z2 == Catch::Approx(3.0).epsilon(1e-6));

    const json stats = embedded_json(lines.back(), "# stats ");
    CHECK(stats.at("rows").get<std::size_t>() == rows.size());
}

TEST_CASE("density JSON carries config, data, and stats") {
    const SkewParams p{0.0, 1.0, 0.3, -0.7, 0.0};
    const TruncationPolicy policy{10, 1e-10};
    RunResult r = run_cli(
        "density --beta1 0.3 --beta2 -0.7 --t 0.5 --x 0.2 "
        "--ymin 0.2 --ymax 0.8 --ysteps 5 --format json");
    REQUIRE(r.status == 0);
    const json doc = json::parse(r.out);
    REQUIRE(doc.contains("config"));
    REQUIRE(doc.contains("data"));
    REQUIRE(doc.contains("stats"));
    CHECK(doc["config"].at("command") == "density");
    CHECK(doc["config"].at("beta2").get<double>() == -0.7);
    const json& data = doc["data"];
    REQUIRE(data.size() == 5);  // no barrier inside (0.2, 0.8)
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double y = 0.2 + (0.8 - 0.2) * static_cast<double>(i) / 4.0;
        CHECK(data[i].at("y").get<double>() == y);
        const DensityValue dv = density_driftless(0.5, 0.2, y, p, policy);
        CHECK(data[i].at("density").get<double>() == dv.value);
        CHECK(data[i].at("error_bound").get<double>() == dv.error_bound);
        CHECK(data[i].at("terms").get<int>() == dv.terms_used);
        CHECK(data[i].at("exact_formula").get<bool>() == dv.exact_formula);
    }
}

TEST_CASE("sample output is reproducible and its stats echo the envelope") {
    const std::string args =
        "sample --beta1 0.5 --beta2 -0.5 --t 1 --x 0.5 --n 500 --seed 77 --stream 3 "
        "--format json";
    RunResult r1 = run_cli(args);
    RunResult r2 = run_cli(args);
    REQUIRE(r1.status == 0);
    CHECK(r1.out == r2.out);
    RunResult other = run_cli(
        "sample --beta1 0.5 --beta2 -0.5 --t 1 --x 0.5 --n 500 --seed 77 --stream 4 "
        "--format json");
    CHECK(other.out != r1.out);

    const json doc = json::parse(r1.out);
    const json& data = doc.at("data");
    REQUIRE(data.size() == 500);
    const json& stats = doc.at("stats");
    CHECK(stats.at("n_samples").get<long long>() == 500);
    CHECK(stats.at("seed").get<std::uint64_t>() == 77);
    CHECK(stats.at("vbar").get<double>() == 3.0);
    CHECK(stats.at("delta_nmax").get<double>() == std::pow(0.25, 11));
    CHECK(stats.at("mean_decision_index").get<double>() >= 1.0);
    CHECK(stats.at("exact_fraction").get<double>() <= 1.0);
    CHECK(stats.at("acceptance_rate").get<double>() > 0.0);

    // The draws are exactly what the library produces from the same stream.
    const SkewParams p{0.0, 1.0, 0.5, -0.5, 0.0};
    RandomStream rng{77, 3, 0};
    for (int i = 0; i < 500; ++i) {
        const double draw = sample_transition(1.0, 0.5, p, {10, 1e-10}, rng).first;
        CHECK(data[i].get<double>() == draw);
    }
}

TEST_CASE("path output walks the requested grid") {
    RunResult r = run_cli(
        "path --x0 0.5 --dt 0.25 --horizon 1 --beta1 0.3 --beta2 -0.7 --seed 5");
    REQUIRE(r.status == 0);
    const auto lines = split_lines(r.out);
    CHECK(lines[1] == "time,position");
    const auto rows = csv_rows(lines);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0][0] == "0");
    CHECK(rows[0][1] == "0.5");

    const SkewParams p{0.0, 1.0, 0.3, -0.7, 0.0};
    RandomStream rng{5, 0, 0};
    const PathSample ps = sample_path({0.0, 0.25, 0.5, 0.75, 1.0}, 0.5, p, {10, 1e-10}, rng);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(std::strtod(rows[i][0].c_str(), nullptr) == ps.times[i]);
        CHECK(std::strtod(rows[i][1].c_str(), nullptr) == ps.positions[i]);
    }
    const json stats = embedded_json(lines.back(), "# stats ");
    CHECK(stats.at("steps").get<int>() == 4);
}

TEST_CASE("validate exits 0 on pass and 4 on failure") {
    RunResult pass = run_cli("validate --suite reduction --beta1 0.5 --beta2 -0.5");
    REQUIRE(pass.status == 0);
    const json doc = json::parse(pass.out);
    CHECK(doc.at("stats").at("suite") == "reduction");
    CHECK(doc.at("stats").at("pass").get<bool>() == true);
    REQUIRE(!doc.at("data").empty());
    for (const json& check : doc.at("data")) {
        CHECK(check.contains("name"));
        CHECK(check.contains("residual"));
        CHECK(check.contains("tolerance"));
        CHECK(check.at("pass").get<bool>() == true);
    }

    // A one-term truncation of the drifted series cannot match the
    // quadrature oracle, so this configuration must fail deterministically.
    RunResult fail = run_cli(
        "validate --suite oracle-equivalence --beta1 0.4 --beta2 0.2 --mu 1 --nmax 0");
    CHECK(fail.status == 4);
    const json fdoc = json::parse(fail.out);
    CHECK(fdoc.at("stats").at("pass").get<bool>() == false);
}

TEST_CASE("the echoed config reproduces the run verbatim") {
    const std::string args =
        "sample --beta1 0.3 --beta2 -0.7 --t 0.7 --x 0.4 --n 50 --seed 909 --stream 2 "
        "--format json";
    RunResult first = run_cli(args);
    REQUIRE(first.status == 0);
    const json cfg = json::parse(first.out).at("config");

    char buf[64];
    auto flag = [&buf](const char* name, const json& v) {
        if (v.is_number_float()) {
            std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
            return std::string(" --") + name + " " + buf;
        }
        return std::string(" --") + name + " " + v.dump();
    };
    std::string rebuilt = cfg.at("command").get<std::string>();
    for (const char* name : {"z1", "z2", "beta1", "beta2", "mu", "t", "x", "x0", "n", "seed",
                             "stream", "nmax", "tol", "ymin", "ymax", "ysteps", "dt", "horizon"})
        rebuilt += flag(name, cfg.at(name));
    rebuilt += " --suite " + cfg.at("suite").get<std::string>();
    rebuilt += " --format " + cfg.at("format").get<std::string>();

    RunResult second = run_cli(rebuilt);
    REQUIRE(second.status == 0);
    CHECK(second.out == first.out);
}

TEST_CASE("--out writes the same bytes as stdout") {
    const std::string base =
        "density --beta1 0.5 --beta2 -0.5 --t 1 --x 0.5 --ymin -0.5 --ymax 1.5 --ysteps 9";
    RunResult direct = run_cli(base);
    REQUIRE(direct.status == 0);

    const std::string out_path = "cli_out_check.csv";
    std::remove(out_path.c_str());
    RunResult filed = run_cli(base + " --out " + out_path);
    REQUIRE(filed.status == 0);
    CHECK(filed.out.empty());
    std::ifstream in(out_path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream contents;
    contents << in.rdbuf();
    CHECK(contents.str() == direct.out);
    std::remove(out_path.c_str());
}
