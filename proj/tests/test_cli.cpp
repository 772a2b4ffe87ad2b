#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tanbound/io.hpp"

using namespace tanbound;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli_dispatch(args, out, err);
    return CliResult{code, out.str(), err.str()};
}

fs::path fixture_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("tanbound-cli-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// The 2x2 coupling pair: eigenvalues straddle the window [0,0] with gap 2.
std::pair<std::string, std::string> coupling_files(const fs::path& dir) {
    Eigen::MatrixXcd a(2, 2);
    a << 2.0, 0.1, 0.1, 0.0;
    const std::string a_path = (dir / "A.mtx").string();
    write_matrix_market(a, a_path);

    const std::string q_path = (dir / "Q1.mtx").string();
    write_matrix_market(Eigen::MatrixXcd::Identity(2, 2).leftCols(1), q_path);
    return {a_path, q_path};
}

std::string write_json(const fs::path& dir, const std::string& name,
                       const std::string& content) {
    const fs::path path = dir / name;
    std::ofstream out(path);
    out << content;
    return path.string();
}

std::size_t count_lines(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::size_t lines = 0;
    std::string line;
    while (std::getline(in, line)) ++lines;
    return lines;
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("apriori certifies the coupling pair on stdout") {
    const fs::path dir = fixture_dir("apriori");
    const auto [a_path, q_path] = coupling_files(dir);

    const CliResult plain = run({"apriori", "--matrix", a_path, "--frame", q_path});
    CHECK(plain.code == 0);
    CHECK(plain.err.empty());
    const nlohmann::json report = nlohmann::json::parse(plain.out);
    CHECK(report.at("kind") == "apriori");
    CHECK(report.at("certificate").at("valid") == true);
    CHECK(report.at("certificate").at("tan_bound").get<double>() ==
          doctest::Approx(0.05).epsilon(1e-12));
    CHECK_FALSE(report.contains("oracle"));

    const CliResult oracled =
        run({"apriori", "--matrix", a_path, "--frame", q_path, "--oracle"});
    CHECK(oracled.code == 0);
    const nlohmann::json with_oracle = nlohmann::json::parse(oracled.out);
    CHECK(with_oracle.at("oracle").at("enclosure_ok") == true);
    CHECK(with_oracle.at("oracle").at("exact_tan").get<double>() ==
          doctest::Approx(0.04987562112089027).epsilon(1e-10));

    const std::string report_path = (dir / "report.json").string();
    const CliResult filed =
        run({"apriori", "--matrix", a_path, "--frame", q_path, "--out", report_path});
    CHECK(filed.code == 0);
    CHECK(filed.out.empty());
    REQUIRE(fs::exists(report_path));
    std::ifstream in(report_path);
    const nlohmann::json from_file = nlohmann::json::parse(in);
    CHECK(from_file == report);
}

TEST_CASE("aposteriori certifies and rejects by interval") {
    const fs::path dir = fixture_dir("aposteriori");
    const auto [a_path, q_path] = coupling_files(dir);

    const CliResult good = run({"aposteriori", "--matrix", a_path, "--frame", q_path,
                                "--interior-lo", "-0.01", "--interior-hi", "0.01",
                                "--oracle"});
    CHECK(good.code == 0);
    const nlohmann::json report = nlohmann::json::parse(good.out);
    CHECK(report.at("kind") == "aposteriori");
    CHECK(report.at("certificate").at("valid") == true);
    CHECK(report.at("certificate").at("tan_bound").get<double>() ==
          doctest::Approx(0.1 / 1.99).epsilon(1e-12));
    CHECK(report.at("oracle").at("exact_tan").get<double>() <=
          report.at("certificate").at("tan_bound").get<double>());

    // diag(5,1) with a window that swallows both eigenvalues: count mismatch.
    Eigen::MatrixXcd d(2, 2);
    d << 5.0, 0.0, 0.0, 1.0;
    const std::string d_path = (dir / "D.mtx").string();
    write_matrix_market(d, d_path);

    const CliResult bad = run({"aposteriori", "--matrix", d_path, "--frame", q_path,
                               "--interior-lo", "0.9", "--interior-hi", "5.1"});
    CHECK(bad.code == 2);
    const nlohmann::json rejected = nlohmann::json::parse(bad.out);
    CHECK(rejected.at("certificate").at("valid") == false);
    CHECK(rejected.at("certificate").at("failure_reason") == "INTERIOR_COUNT_MISMATCH");
}

TEST_CASE("counterexample emission feeds back into certification") {
    const fs::path dir = fixture_dir("counterexample");
    const std::string out_dir = (dir / "artifacts").string();

    const CliResult emitted = run({"counterexample", "--out", out_dir});
    CHECK(emitted.code == 0);
    REQUIRE(fs::exists(fs::path(out_dir) / "A.mtx"));
    REQUIRE(fs::exists(fs::path(out_dir) / "Q1.mtx"));
    REQUIRE(fs::exists(fs::path(out_dir) / "report.json"));

    std::ifstream in(fs::path(out_dir) / "report.json");
    const nlohmann::json report = nlohmann::json::parse(in);
    CHECK(report.at("certificate").at("valid") == false);
    CHECK(report.at("certificate").at("failure_reason") == "RHO_TOO_LARGE");

    const CliResult certified = run({"apriori", "--matrix",
                                     (fs::path(out_dir) / "A.mtx").string(), "--frame",
                                     (fs::path(out_dir) / "Q1.mtx").string()});
    CHECK(certified.code == 2);
    CHECK(contains(certified.out, "\"failure_reason\":\"RHO_TOO_LARGE\""));
}

TEST_CASE("angles compares two frames") {
    const fs::path dir = fixture_dir("angles");
    const std::string u_path = (dir / "U.mtx").string();
    write_matrix_market(Eigen::MatrixXcd::Identity(3, 3).leftCols(2), u_path);

    const CliResult same = run({"angles", "--frame-a", u_path, "--frame-b", u_path});
    CHECK(same.code == 0);
    const nlohmann::json j = nlohmann::json::parse(same.out);
    CHECK(j.at("largest").get<double>() <= 1e-10);
    CHECK(j.at("angles").size() == 2);

    const std::string v_path = (dir / "V.mtx").string();
    write_matrix_market(Eigen::MatrixXcd::Identity(4, 4).leftCols(2), v_path);
    const CliResult mismatched = run({"angles", "--frame-a", u_path, "--frame-b", v_path});
    CHECK(mismatched.code == 1);
    CHECK_FALSE(mismatched.err.empty());
}

TEST_CASE("sweep writes a CSV and a summary") {
    const fs::path dir = fixture_dir("sweep");
    const std::string config =
        write_json(dir, "config.json", R"({"count":40,"seed":7,"n_max":16})");
    const std::string csv = (dir / "rows.csv").string();

    const CliResult swept = run({"sweep", "--config", config, "--out", csv});
    CHECK(swept.code == 0);

    REQUIRE(fs::exists(csv));
    CHECK(count_lines(csv) == 41);  // header plus one row per instance
    std::ifstream csv_in(csv);
    std::string header;
    std::getline(csv_in, header);
    CHECK(header + "\n" == sweep_csv_header());

    const nlohmann::json summary = nlohmann::json::parse(swept.out);
    CHECK(summary.at("instances") == 40);
    CHECK(summary.at("violations") == 0);
    CHECK(summary.at("max_tightness").get<double>() <= 1.0 + 1e-9);
}

TEST_CASE("sweep carries the boundary instance as a failure, not a violation") {
    const fs::path dir = fixture_dir("sweep-ce");
    const std::string config = write_json(
        dir, "config.json",
        R"({"count":5,"seed":3,"n_max":8,"include_counterexample":true})");
    const std::string csv = (dir / "rows.csv").string();

    const CliResult swept = run({"sweep", "--config", config, "--out", csv});
    CHECK(swept.code == 0);

    const nlohmann::json summary = nlohmann::json::parse(swept.out);
    CHECK(summary.at("instances") == 6);
    CHECK(summary.at("failures_by_reason").at("RHO_TOO_LARGE").get<int>() >= 1);

    std::ifstream in(csv);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(contains(text, "RHO_TOO_LARGE"));
}

TEST_CASE("usage and input errors exit with code 1") {
    const fs::path dir = fixture_dir("errors");
    const auto [a_path, q_path] = coupling_files(dir);

    CHECK(run({}).code == 1);
    CHECK(run({"frobnicate"}).code == 1);
    CHECK(run({"apriori", "--matrix", a_path}).code == 1);  // missing --frame
    CHECK(run({"apriori", "--matrix", a_path, "--frame", q_path, "--bogus"}).code == 1);
    CHECK(run({"aposteriori", "--matrix", a_path, "--frame", q_path}).code == 1);

    const CliResult missing =
        run({"apriori", "--matrix", (dir / "absent.mtx").string(), "--frame", q_path});
    CHECK(missing.code == 1);
    CHECK_FALSE(missing.err.empty());

    Eigen::MatrixXcd skew(2, 2);
    skew << 1.0, 1.0, 0.0, 1.0;
    const std::string skew_path = (dir / "skew.mtx").string();
    write_matrix_market(skew, skew_path);
    const CliResult rejected =
        run({"apriori", "--matrix", skew_path, "--frame", q_path});
    CHECK(rejected.code == 1);
    CHECK(contains(rejected.err, "error:"));

    const std::string bad_config = write_json(dir, "bad.json", R"({"samples":10})");
    const std::string csv = (dir / "rows.csv").string();
    CHECK(run({"sweep", "--config", bad_config, "--out", csv}).code == 1);
}

TEST_CASE("help is printed on request") {
    const CliResult top = run({"--help"});
    CHECK(top.code == 0);
    CHECK(contains(top.out, "apriori"));
    CHECK(contains(top.out, "sweep"));

    const CliResult sub = run({"apriori", "--help"});
    CHECK(sub.code == 0);
    CHECK(contains(sub.out, "--matrix"));
}
