// Runs the compos executable end to end.

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const std::string cli = COMPOS_CLI_PATH;
const std::string source_dir = COMPOS_SOURCE_DIR;

int run(const std::string& args) {
    const std::string cmd = cli + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("compos_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

} // namespace

TEST_CASE("fit on the lake data writes every artifact") {
    const auto out = scratch("fit");
    const int rc = run("fit " + source_dir + "/data/arctic_lake.csv --parts sand,silt,clay --covariates depth --log depth "
                       "--method both --plot --out " + out.string());
    CHECK(rc == 0);
    for (const char* f : {"coefficients.csv", "dispersion.csv", "residuals.csv", "convergence.log", "ternary.svg"}) {
        CHECK(fs::exists(out / f));
    }
    const std::string svg = slurp(out / "ternary.svg");
    CHECK(svg.find("ql-curve") != std::string::npos);
    CHECK(svg.find("logratio-curve") != std::string::npos);
    CHECK(slurp(out / "coefficients.csv").find("log(depth)") != std::string::npos);
}

TEST_CASE("exit codes") {
    const auto dir = scratch("codes");
    write(dir / "empty.csv", "");
    write(dir / "neg.csv", "a,b,c\n1,2,3\n10,-1,30\n");
    CHECK(run("fit " + (dir / "empty.csv").string() + " --out " + dir.string()) == 2);
    CHECK(run("fit " + (dir / "neg.csv").string() + " --out " + dir.string()) == 2);
    CHECK(run("fit " + (dir / "neg.csv").string() + " --parts a,zzz --out " + dir.string()) == 1);
    CHECK(run("fit " + (dir / "neg.csv").string() + " --method newton") == 1);
    CHECK(run("frobnicate") == 1);
    CHECK(run("--help") == 0);

    write(dir / "bad.txt", "N = 10\nD = 2\np = 0\ntrue_B = 0; 0\nsigma_diag = 0.1, 0.1\nwidth = 3\n");
    CHECK(run("simulate " + (dir / "bad.txt").string() + " --out " + dir.string()) == 1);
}

TEST_CASE("fit with zeros: QL curve only, with a legend note") {
    const auto dir = scratch("zeros");
    write(dir / "z.csv", "a,b,c,x\n1,0,3,0.1\n2,2,1,0.4\n1,1,0,0.8\n3,2,1,1.1\n2,5,1,1.5\n1,3,3,2.0\n");
    CHECK(run("fit " + (dir / "z.csv").string() + " --covariates x --plot --out " + dir.string()) == 0);
    const std::string svg = slurp(dir / "ternary.svg");
    CHECK(svg.find("ql-curve") != std::string::npos);
    CHECK(svg.find("logratio-curve") == std::string::npos);
    CHECK(svg.find("class=\"note\"") != std::string::npos);

    CHECK(run("baseline " + (dir / "z.csv").string() + " --covariates x --out " + dir.string()) == 2);
    CHECK(run("baseline " + (dir / "z.csv").string() + " --covariates x --zero-adjust 0.001 --out " + dir.string()) ==
          0);
    CHECK(run("distances " + (dir / "z.csv").string() + " --covariates x --kind aitchison --out " + dir.string()) ==
          2);
    CHECK(run("distances " + (dir / "z.csv").string() + " --covariates x --kind identity --out " + dir.string()) ==
          0);
    CHECK(run("distances " + (dir / "z.csv").string() + " --covariates x --kind mahalanobis --out " + dir.string()) ==
          0);
}

TEST_CASE("plot without models marks each point") {
    const auto dir = scratch("plot");
    write(dir / "p.csv", "a,b,c\n1,2,3\n3,2,1\n1,1,1\n");
    CHECK(run("plot " + (dir / "p.csv").string() + " --no-models --out " + dir.string()) == 0);
    const std::string svg = slurp(dir / "ternary.svg");
    std::size_t count = 0;
    for (auto pos = svg.find("class=\"point\""); pos != std::string::npos; pos = svg.find("class=\"point\"", pos + 1)) {
        ++count;
    }
    CHECK(count == 3);
}

TEST_CASE("generate then fit recovers a noiseless generator") {
    const auto dir = scratch("gen");
    const std::string scenario = source_dir + "/scenarios/noiseless.txt";
    CHECK(run("generate " + scenario + " --out " + (dir / "d.csv").string()) == 0);
    CHECK(run("fit " + (dir / "d.csv").string() + " --covariates x1 --out " + dir.string()) == 0);
    std::ifstream in(dir / "coefficients.csv");
    std::string line;
    std::getline(in, line);
    const double truth[4][2] = {{1.0, 0.5}, {0.0, -0.5}, {-0.5, 0.25}, {-0.5, -0.25}};
    for (int k = 0; k < 4; ++k) {
        for (int r = 0; r < 2; ++r) {
            REQUIRE(std::getline(in, line));
            std::stringstream ss(line);
            std::string part, cov, est;
            std::getline(ss, part, ',');
            std::getline(ss, cov, ',');
            std::getline(ss, est, ',');
            CHECK(std::abs(std::stod(est) - truth[k][r]) < 1e-6);
        }
    }
}

TEST_CASE("simulate is byte-identical across runs and thread counts") {
    const auto a = scratch("sim_a");
    const auto b = scratch("sim_b");
    const std::string scenario = source_dir + "/scenarios/zero_inflated.txt";
    CHECK(run("simulate " + scenario + " --threads 1 --out " + a.string()) == 0);
    CHECK(run("simulate " + scenario + " --threads 4 --out " + b.string()) == 0);
    CHECK(slurp(a / "replicates.csv") == slurp(b / "replicates.csv"));
    CHECK(slurp(a / "summary.csv") == slurp(b / "summary.csv"));
    CHECK_FALSE(slurp(a / "replicates.csv").empty());
}
