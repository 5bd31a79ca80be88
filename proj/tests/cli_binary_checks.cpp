// Exercises the installed CLI binary end to end: determinism of output
// files, exit codes, and the circuit -> matrices -> analyze round trip.
// Usage: cli_binary_checks <path-to-cli>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

int failures = 0;

void expect(bool ok, const std::string& what) {
    if (!ok) {
        ++failures;
        std::cerr << "FAILED: " << what << "\n";
    }
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

int run_cli(const std::string& cli, const std::string& args) {
    std::string cmd = cli + " " + args + " 2>/dev/null";
    int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    return WEXITSTATUS(status);
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: cli_binary_checks <path-to-cli>\n";
        return 2;
    }
    std::string cli = argv[1];
    std::string dir = "cli_checks_tmp";
    if (std::system(("rm -rf " + dir + " && mkdir -p " + dir).c_str()) != 0) {
        std::cerr << "cannot prepare scratch directory\n";
        return 2;
    }

    const std::string sweep_config = R"({
      "command": "sweep",
      "input": {"circuit": {"c1":2,"c2":3,"c12":4,"l1":5,"l2":6,"tau":1,"beta":1}},
      "beta_grid": {"min":0,"max":10,"count":101,"spacing":"linear"}
    })";
    write_file(dir + "/sweep.json", sweep_config);

    // Determinism: two runs, byte-identical files.
    int rc1 = run_cli(cli, "--config " + dir + "/sweep.json --output " + dir + "/a.csv");
    int rc2 = run_cli(cli, "--config " + dir + "/sweep.json --output " + dir + "/b.csv");
    expect(rc1 == 0 && rc2 == 0, "sweep runs exit 0");
    std::string a = slurp(dir + "/a.csv");
    expect(!a.empty(), "sweep output is nonempty");
    expect(a == slurp(dir + "/b.csv"), "sweep output is byte-identical across runs");
    expect(a.find("beta0,0.59451190") != std::string::npos, "sweep summary contains beta0");

    // Command override flag.
    int rc3 = run_cli(cli, "--config " + dir + "/sweep.json --command analyze --output " + dir +
                               "/analyze.csv");
    expect(rc3 == 0, "command override exits 0");
    expect(slurp(dir + "/analyze.csv").find("n_b,1") != std::string::npos,
           "analyze output has the loss rank");

    // Validation failure: b = identity violates the loss fraction condition.
    write_file(dir + "/bad.json", R"({
      "command": "analyze",
      "input": {"omega": [[[1,0],[0,0]],[[0,0],[2,0]]],
                 "b": [[[1,0],[0,0]],[[0,0],[1,0]]]}
    })");
    expect(run_cli(cli, "--config " + dir + "/bad.json") == 2, "loss fraction violation exits 2");

    // Resonant frequency: omega = 0 coincides with rho = 0 for the circuit.
    write_file(dir + "/resonant.json", R"({
      "command": "respond",
      "input": {"circuit": {"c1":2,"c2":3,"c12":4,"l1":5,"l2":6,"tau":1,"beta":1}},
      "beta_grid": {"min":1,"max":100,"count":3,"spacing":"log"},
      "response": {"omega": 0.0, "f": [[1,0],[0,0],[0,0],[0,0]]}
    })");
    expect(run_cli(cli, "--config " + dir + "/resonant.json") == 3, "resonant frequency exits 3");

    // Round trip: circuit -> matrices -> analyze matches the direct path.
    write_file(dir + "/circuit.json", R"({
      "command": "circuit",
      "input": {"circuit": {"c1":2,"c2":3,"c12":4,"l1":5,"l2":6,"tau":1,"beta":1}}
    })");
    expect(run_cli(cli, "--config " + dir + "/circuit.json --output " + dir + "/matrices.json") == 0,
           "circuit command exits 0");
    std::string matrices = slurp(dir + "/matrices.json");
    auto omega_pos = matrices.find("\"omega\"");
    expect(omega_pos != std::string::npos, "circuit output contains omega");

    // Build an analyze config around the emitted matrices with a tiny
    // string-level extraction (the values are verbatim JSON arrays).
    auto extract_array = [&](const std::string& key) {
        auto kpos = matrices.find("\"" + key + "\"");
        auto start = matrices.find('[', kpos);
        int depth = 0;
        size_t end = start;
        for (size_t i = start; i < matrices.size(); ++i) {
            if (matrices[i] == '[') ++depth;
            if (matrices[i] == ']') --depth;
            if (depth == 0) {
                end = i;
                break;
            }
        }
        return matrices.substr(start, end - start + 1);
    };
    write_file(dir + "/roundtrip.json",
               std::string("{\"command\":\"analyze\",\"input\":{\"omega\":") +
                   extract_array("omega") + ",\"b\":" + extract_array("b") + "}}");
    expect(run_cli(cli, "--config " + dir + "/roundtrip.json --output " + dir + "/rt.csv") == 0,
           "round-trip analyze exits 0");
    write_file(dir + "/direct.json", R"({
      "command": "analyze",
      "input": {"circuit": {"c1":2,"c2":3,"c12":4,"l1":5,"l2":6,"tau":1,"beta":1}}
    })");
    expect(run_cli(cli, "--config " + dir + "/direct.json --output " + dir + "/direct.csv") == 0,
           "direct analyze exits 0");

    auto mode_block = [](const std::string& text) {
        auto start = text.find("\nmode_class");
        auto end = text.find("\n\n", start + 1);
        return text.substr(start, end - start);
    };
    std::string direct_csv = slurp(dir + "/direct.csv");
    std::string rt_csv = slurp(dir + "/rt.csv");
    expect(!direct_csv.empty() && !rt_csv.empty(), "both analyze outputs are nonempty");
    expect(mode_block(direct_csv) == mode_block(rt_csv),
           "round trip reproduces the mode tables exactly");

    if (failures == 0) {
        std::cout << "cli_binary_checks: all checks passed\n";
        return 0;
    }
    std::cerr << "cli_binary_checks: " << failures << " check(s) failed\n";
    return 1;
}
