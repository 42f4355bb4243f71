#include <gtest/gtest.h>
#include <sys/wait.h>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + std::string(STOKES_LATTICE_CLI) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return {-1, {}};
    std::string out;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
    const int st = pclose(p);
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::string cfg(const std::string& name) { return std::string(STOKES_LATTICE_EXAMPLES) + "/" + name; }

fs::path scratch() {
    const fs::path d = fs::temp_directory_path() / ("stokes_lattice_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
}

std::string write_file(const std::string& name, const std::string& body) {
    const fs::path f = scratch() / name;
    std::ofstream(f) << body;
    return f.string();
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

}  // namespace

TEST(Cli, FieldCsvShapeAndWalls) {
    const auto r = run("field --config " + cfg("fig6_h1p9.json") + " --nx 21 --ny 11");
    ASSERT_EQ(r.code, 0);
    const auto lines = split(r.out, '\n');
    ASSERT_EQ(lines.size(), 1u + 21 * 11);
    EXPECT_EQ(lines[0], "x,y,u,v,p_over_eta,omega,masked");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = split(lines[i], ',');
        ASSERT_EQ(f.size(), 7u);
        const double y = std::stod(f[1]);
        if (y == 0.0 || i > lines.size() - 22) {
            EXPECT_LE(std::abs(std::stod(f[2])), 1e-11);
            EXPECT_LE(std::abs(std::stod(f[3])), 1e-11);
        }
    }
}

TEST(Cli, CsvAndJsonAgreeToTheLastDigit) {
    const auto c = run("field --config " + cfg("channel_mixed_period4pi.json") + " --nx 9 --ny 5");
    const auto j = run("field --config " + cfg("channel_mixed_period4pi.json") + " --nx 9 --ny 5 --format json");
    ASSERT_EQ(c.code, 0);
    ASSERT_EQ(j.code, 0);
    const json doc = json::parse(j.out);
    ASSERT_TRUE(doc.contains("meta"));
    const auto lines = split(c.out, '\n');
    ASSERT_EQ(doc["rows"].size() + 1, lines.size());
    const char* keys[] = {"x", "y", "u", "v", "p_over_eta", "omega"};
    for (std::size_t i = 0; i < doc["rows"].size(); ++i) {
        const auto f = split(lines[i + 1], ',');
        const auto& row = doc["rows"][i];
        for (int k = 0; k < 6; ++k) {
            if (row[keys[k]].is_null()) {
                EXPECT_TRUE(f[k].empty());
                continue;
            }
            double v;
            std::from_chars(f[k].data(), f[k].data() + f[k].size(), v);
            EXPECT_EQ(v, row[keys[k]].get<double>()) << keys[k];  // bitwise: 17 significant digits survive
        }
    }
    EXPECT_EQ(doc["meta"]["period_l"].get<double>(), 4 * std::numbers::pi);
}

TEST(Cli, EmptySingularityListGivesZeroField) {
    const auto r = run("field --config " + cfg("empty_channel.json") + " --nx 5 --ny 3 --format json");
    ASSERT_EQ(r.code, 0);
    for (const auto& row : json::parse(r.out)["rows"]) {
        EXPECT_EQ(row["u"].get<double>(), 0.0);
        EXPECT_EQ(row["v"].get<double>(), 0.0);
        EXPECT_EQ(row["p_over_eta"].get<double>(), 0.0);
    }
}

TEST(Cli, MaskedNodesAreBlank) {
    const auto r = run("field --config " + cfg("channel_stokeslet.json") + " --nx 101 --ny 51 --exclusion 0.2");
    ASSERT_EQ(r.code, 0);
    int masked = 0;
    for (const auto& l : split(r.out, '\n'))
        if (l.size() > 5 && l.substr(l.size() - 5) == ",,,,1") ++masked;
    EXPECT_GT(masked, 0);
}

TEST(Cli, ConfigErrorsExitOne) {
    EXPECT_EQ(run("field --config " + cfg("bad_outside.json")).code, 1);
    EXPECT_EQ(run("field --config " + write_file("broken.json", "{ not json")).code, 1);
    EXPECT_EQ(run("field --config " + write_file("nokind.json",
                                                 R"({"geometry":{"domain":"channel","period_l":6.28,"height_h":1},
                                                     "singularities":[{"kind":"rotlet","mu":[1,0],"z0":[1,0.5]}]})"))
                  .code,
              1);
    EXPECT_EQ(run("field --config " + cfg("channel_stokeslet.json") + " --format xml").code, 1);
    EXPECT_EQ(run("coeffs --config " + cfg("fig3_h_pi.json") + " --nmax 0").code, 1);
    EXPECT_EQ(run("frobnicate").code, 1);
}

TEST(Cli, OutsideSingularityMessageNamesEntry) {
    const std::string cmd = std::string(STOKES_LATTICE_CLI) + " field --config " + cfg("bad_outside.json") + " 2>&1";
    FILE* p = popen(cmd.c_str(), "r");
    ASSERT_NE(p, nullptr);
    std::string out;
    char buf[512];
    while (fgets(buf, sizeof buf, p)) out += buf;
    pclose(p);
    EXPECT_NE(out.find("singularity 0"), std::string::npos) << out;
}

TEST(Cli, IoErrorsExitThree) {
    EXPECT_EQ(run("field --config /nonexistent/config.json").code, 3);
    EXPECT_EQ(run("field --config " + cfg("channel_stokeslet.json") + " --out /nonexistent/dir/out.csv").code, 3);
}

TEST(Cli, AccuracyNotMetExitsTwo) {
    // a tolerance below the rounding floor cannot be met at the truncation clamp
    EXPECT_EQ(run("field --config " + cfg("channel_stokeslet.json") + " --tol 1e-20 --nx 3 --ny 3").code, 2);
}

TEST(Cli, VerifyPassesAndReportsJson) {
    const auto r = run("verify --config " + cfg("channel_stokeslet.json") + " --json");
    ASSERT_EQ(r.code, 0) << r.out;
    const json j = json::parse(r.out);
    EXPECT_TRUE(j["pass"].get<bool>());
    EXPECT_EQ(j["meta"]["seed"].get<std::uint64_t>(), 20240229u);
    bool saw_noslip = false;
    for (const auto& c : j["checks"]) {
        EXPECT_TRUE(c.contains("context") && c.contains("name") && c.contains("max_residual") &&
                    c.contains("tolerance") && c.contains("samples") && c.contains("pass"));
        saw_noslip = saw_noslip || c["name"] == "noslip";
    }
    EXPECT_TRUE(saw_noslip);
}

TEST(Cli, InjectedFaultFailsNoSlip) {
    const auto r = run("verify --config " + cfg("channel_stokeslet.json") + " --json --inject-fault");
    EXPECT_NE(r.code, 0);
    const json j = json::parse(r.out);
    EXPECT_FALSE(j["pass"].get<bool>());
    for (const auto& c : j["checks"])
        if (c["name"] == "noslip") {
            EXPECT_FALSE(c["pass"].get<bool>());
        }
}

TEST(Cli, VerifyHalfPlaneAndMixed) {
    EXPECT_EQ(run("verify --config " + cfg("halfplane_force_quadrupole.json")).code, 0);
    EXPECT_EQ(run("verify --config " + cfg("channel_mixed_period4pi.json")).code, 0);
}

TEST(Cli, CompareStresslet) {
    const auto r = run("compare --config " + cfg("channel_stresslet.json") + " --json");
    ASSERT_EQ(r.code, 0) << r.out;
    const json j = json::parse(r.out);
    bool seen = false;
    for (const auto& c : j["checks"])
        if (c["name"] == "cross_method") {
            seen = true;
            EXPECT_LE(c["max_residual"].get<double>(), 1e-6);
        }
    EXPECT_TRUE(seen);
    EXPECT_EQ(run("compare --config " + cfg("halfplane_force_quadrupole.json")).code, 1);
}

TEST(Cli, CoeffsDecay) {
    const auto r = run("coeffs --config " + cfg("fig3_h_pi.json") + " --nmax 60 --format json");
    ASSERT_EQ(r.code, 0);
    const json j = json::parse(r.out);
    ASSERT_EQ(j["rows"].size(), 60u);
    for (const auto& row : j["rows"])
        if (row["n"].get<int>() >= 40) {
            EXPECT_LT(row["abs_FH"].get<double>(), 1e-10);
            EXPECT_LT(row["abs_GK"].get<double>(), 1e-10);
        }
}

TEST(Cli, StreamlinesSeedsAndMidline) {
    const auto r = run("streamlines --config " + cfg("fig6_h2p1.json") + " --seeds '1.0,1.0;2.0,0.0' --format json");
    ASSERT_EQ(r.code, 0);
    const json j = json::parse(r.out);
    ASSERT_EQ(j["rows"].size(), 2u);
    EXPECT_TRUE(j["rows"][1]["points"].empty());  // wall seed
    EXPECT_EQ(j["rows"][1]["reason"], "wall");
    EXPECT_EQ(j["meta"]["midline_sign_changes"].get<int>(), 2);
    EXPECT_EQ(run("streamlines --config " + cfg("fig6_h2p1.json") + " --seeds '1.0,9.0'").code, 1);
    EXPECT_EQ(run("streamlines --config " + cfg("fig6_h2p1.json") + " --seeds 'abc'").code, 1);
}

TEST(Cli, ThreadCountDoesNotChangeOutput) {
    const std::string base = "field --config " + cfg("fig6_h3.json") + " --nx 31 --ny 17";
    EXPECT_EQ(run(base).out, run(base, "STOKES_LATTICE_THREADS=3 ").out);
}
