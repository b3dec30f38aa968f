#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

namespace {

namespace fs = std::filesystem;

std::string hwrec_bin() {
    const char* bin = std::getenv("HWREC_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "HWREC_BIN must point at the hwrec binary");
    return bin;
}

struct RunResult {
    int exit_code;
    std::string stdout_text;
};

RunResult run(const std::string& args, const fs::path& dir) {
    const fs::path out = dir / "stdout.txt";
    const std::string cmd =
        "cd " + dir.string() + " && " + hwrec_bin() + " " + args + " > " + out.string() + " 2>&1";
    const int raw = std::system(cmd.c_str());
    std::ifstream in(out);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WEXITSTATUS(raw), ss.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("hwrec_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("help lists every subcommand and exits 0") {
    TempDir dir;
    const RunResult r = run("--help", dir.path);
    CHECK(r.exit_code == 0);
    for (const char* sub : {"synth", "preprocess", "subunits", "features", "train", "eval", "compare"}) {
        CHECK(r.stdout_text.find(sub) != std::string::npos);
    }
}

TEST_CASE("usage errors exit 2, data errors exit 3") {
    TempDir dir;
    CHECK(run("frobnicate", dir.path).exit_code == 2);
    CHECK(run("train --no-such-flag", dir.path).exit_code == 2);
    const RunResult missing =
        run("train --classifier sos --features st --in missing.jsonl --model m.json", dir.path);
    CHECK(missing.exit_code == 3);
    CHECK(missing.stdout_text.find("missing.jsonl") != std::string::npos);
}

TEST_CASE("every subcommand runs end-to-end on a small corpus") {
    TempDir dir;

    const RunResult synth =
        run("synth --classes 3 --train 12 --test 4 --noise 0.01 --seed 42 --out-dir data", dir.path);
    REQUIRE(synth.exit_code == 0);
    CHECK(fs::exists(dir.path / "data/train.jsonl"));
    CHECK(fs::exists(dir.path / "data/test.jsonl"));
    CHECK(synth.stdout_text.find("# resolved config: synth") != std::string::npos);
    CHECK(synth.stdout_text.find("# seed=42") != std::string::npos);

    CHECK(run("preprocess --in data/train.jsonl --out pp.jsonl", dir.path).exit_code == 0);
    CHECK(run("subunits --in data/train.jsonl --out su.jsonl", dir.path).exit_code == 0);
    CHECK(run("features --type hpod --in data/train.jsonl --out f.jsonl", dir.path).exit_code == 0);
    {
        std::ifstream f(dir.path / "f.jsonl");
        std::string line;
        REQUIRE(std::getline(f, line));
        CHECK(line.find("\"label\"") != std::string::npos);
        CHECK(line.find("\"values\"") != std::string::npos);
    }

    // preprocessing is reusable input: training on preprocessed data works
    const RunResult train = run(
        "train --classifier sos --features st --in pp.jsonl --model sos.json --seed 42", dir.path);
    REQUIRE(train.exit_code == 0);
    const RunResult eval =
        run("eval --model sos.json --test data/test.jsonl --report r.txt --jsonl r.jsonl", dir.path);
    REQUIRE(eval.exit_code == 0);
    CHECK(fs::exists(dir.path / "r.txt"));
    CHECK(fs::exists(dir.path / "r.jsonl"));
    CHECK(eval.stdout_text.find("overall_accuracy") != std::string::npos);

    // SUB training emits tab-separated per-iteration log-likelihood lines
    const RunResult sub = run(
        "train --classifier sub --features hpod --in data/train.jsonl --model sub.json --nh 3 --seed 42",
        dir.path);
    REQUIRE(sub.exit_code == 0);
    bool saw_trace = false;
    std::stringstream lines(sub.stdout_text);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.find('\t') != std::string::npos && line.rfind("c", 0) == 0) saw_trace = true;
    }
    CHECK(saw_trace);
    CHECK(run("eval --model sub.json --test data/test.jsonl --report rs.txt", dir.path).exit_code == 0);

    const RunResult cmp = run(
        "compare --all-baselines --features st --in data/train.jsonl --test data/test.jsonl "
        "--epochs 30 --lr 0.1 --hidden 16 --n-ef 5 --report cmp.txt --jsonl cmp.jsonl --seed 42",
        dir.path);
    REQUIRE(cmp.exit_code == 0);
    const std::string table = slurp(dir.path / "cmp.txt");
    for (const char* name : {"sos", "ss", "fd", "fnn", "svm"}) {
        CHECK(table.find(name) != std::string::npos);
    }
}

TEST_CASE("identical commands produce byte-identical models and reports") {
    TempDir dir;
    REQUIRE(run("synth --classes 3 --train 10 --test 3 --seed 7 --out-dir d", dir.path).exit_code == 0);

    REQUIRE(run("train --classifier fnn --features st --in d/train.jsonl --model a.json "
                "--hidden 8 --epochs 20 --seed 11",
                dir.path)
                .exit_code == 0);
    REQUIRE(run("train --classifier fnn --features st --in d/train.jsonl --model b.json "
                "--hidden 8 --epochs 20 --seed 11",
                dir.path)
                .exit_code == 0);
    CHECK(slurp(dir.path / "a.json") == slurp(dir.path / "b.json"));

    REQUIRE(run("eval --model a.json --test d/test.jsonl --report ra.txt", dir.path).exit_code == 0);
    REQUIRE(run("eval --model a.json --test d/test.jsonl --report rb.txt", dir.path).exit_code == 0);
    CHECK(slurp(dir.path / "ra.txt") == slurp(dir.path / "rb.txt"));

    // a different seed produces a different model (the seed is not ignored)
    REQUIRE(run("train --classifier fnn --features st --in d/train.jsonl --model c.json "
                "--hidden 8 --epochs 20 --seed 12",
                dir.path)
                .exit_code == 0);
    CHECK(slurp(dir.path / "a.json") != slurp(dir.path / "c.json"));
}

TEST_CASE("config files provide defaults that flags override") {
    TempDir dir;
    REQUIRE(run("synth --classes 2 --train 8 --test 2 --seed 5 --out-dir d", dir.path).exit_code == 0);
    {
        std::ofstream cfg(dir.path / "opts.cfg");
        cfg << "hidden=8\nepochs=15\n";
    }
    const RunResult with_cfg = run(
        "train --config opts.cfg --classifier fnn --features st --in d/train.jsonl --model m1.json",
        dir.path);
    REQUIRE(with_cfg.exit_code == 0);
    CHECK(with_cfg.stdout_text.find("# hidden=8") != std::string::npos);
    CHECK(with_cfg.stdout_text.find("# epochs=15") != std::string::npos);

    const RunResult with_flag =
        run("train --config opts.cfg --classifier fnn --features st --in d/train.jsonl "
            "--model m2.json --hidden 4",
            dir.path);
    REQUIRE(with_flag.exit_code == 0);
    CHECK(with_flag.stdout_text.find("# hidden=4") != std::string::npos);
}
