// End-to-end checks of the installed command surface via subprocess calls.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

namespace {

namespace fs = std::filesystem;

std::string cli() { return OTX_CLI_PATH; }

int run(const std::string& args) {
    std::string cmd = cli() + " " + args + " >/dev/null 2>/dev/null";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str(const char* sub = "") const { return (path / sub).string(); }
};

}  // namespace

TEST_CASE("simulate writes four files and reruns byte-identically") {
    TempDir dir("otx_cli_sim");
    std::string args = "simulate --classes 4 --dim 8 --if 10 --eta 0.4 --noise joint --seed 7 "
                       "--head 80 --test-per-class 10 --out " + dir.str("a");
    REQUIRE(run(args) == 0);
    for (const char* f : {"train_embeddings.otsb", "train_labels.csv", "test_embeddings.otsb",
                          "test_labels.csv"}) {
        CHECK(fs::exists(dir.path / "a" / f));
    }
    std::string again = "simulate --classes 4 --dim 8 --if 10 --eta 0.4 --noise joint --seed 7 "
                        "--head 80 --test-per-class 10 --out " + dir.str("b");
    REQUIRE(run(again) == 0);
    for (const char* f : {"train_embeddings.otsb", "train_labels.csv", "test_embeddings.otsb",
                          "test_labels.csv"}) {
        CHECK(slurp(dir.path / "a" / f) == slurp(dir.path / "b" / f));
    }
}

TEST_CASE("argument errors exit with code 2") {
    CHECK(run("simulate --classes 4") == 2);           // missing --out
    CHECK(run("extract --out /tmp/nowhere") == 2);     // missing inputs
    CHECK(run("definitely-not-a-command") == 2);
    CHECK(run("--help") == 0);
}

TEST_CASE("extract, evaluate and rerun determinism") {
    TempDir dir("otx_cli_pipe");
    REQUIRE(run("simulate --classes 4 --dim 8 --if 10 --eta 0.4 --noise joint --seed 3 "
                "--head 80 --test-per-class 10 --out " + dir.str("data")) == 0);
    std::string extract_args =
        " --embeddings " + dir.str("data/train_embeddings.otsb") +
        " --labels " + dir.str("data/train_labels.csv") +
        " --test-embeddings " + dir.str("data/test_embeddings.otsb") +
        " --test-labels " + dir.str("data/test_labels.csv") +
        " --epochs 2 --clf-epochs 40 --seed 5";
    REQUIRE(run("extract" + extract_args + " --out " + dir.str("run1")) == 0);
    REQUIRE(run("extract" + extract_args + " --out " + dir.str("run2")) == 0);
    CHECK(slurp(dir.path / "run1" / "subset.csv") == slurp(dir.path / "run2" / "subset.csv"));

    // epoch lines must match; the leading config echo differs in --out
    auto epoch_lines = [&](const char* run_dir) {
        std::istringstream report(slurp(dir.path / run_dir / "report.jsonl"));
        std::vector<std::string> lines;
        std::string line;
        while (std::getline(report, line)) lines.push_back(line);
        REQUIRE(!lines.empty());
        CHECK(lines.front().find("\"config\"") != std::string::npos);
        lines.erase(lines.begin());
        return lines;
    };
    std::vector<std::string> run1 = epoch_lines("run1");
    CHECK(run1 == epoch_lines("run2"));
    CHECK(run1.size() == 2);  // one line per epoch

    CHECK(run("evaluate --subset " + dir.str("run1/subset.csv") + " --labels " +
              dir.str("data/train_labels.csv")) == 0);
}

TEST_CASE("ot solve reads csv instances") {
    TempDir dir("otx_cli_ot");
    {
        std::ofstream cost(dir.path / "cost.csv");
        cost << "0,1\n1,0\n";
    }
    REQUIRE(run("ot solve --cost " + dir.str("cost.csv") + " --gamma 0.05 --out " +
                dir.str("plan.csv")) == 0);
    std::string plan = slurp(dir.path / "plan.csv");
    CHECK_FALSE(plan.empty());
    // diagonal mass dominates at small gamma
    double p00 = std::stod(plan.substr(0, plan.find(',')));
    CHECK(p00 > 0.4);
}
