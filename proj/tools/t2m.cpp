#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "t2m/suite.hpp"

namespace {

namespace fs = std::filesystem;

// Fixture resolution order: filesystem path, built-in name, then
// <name>.json under $T2M_FIXTURE_DIR.
t2m::Fixture resolve_fixture(const std::string& config) {
    std::error_code ec;
    if (fs::exists(config, ec)) return t2m::load_fixture_file(config);
    if (t2m::is_builtin_fixture(config)) return t2m::load_builtin_fixture(config);
    if (const char* dir = std::getenv("T2M_FIXTURE_DIR")) {
        fs::path p = fs::path(dir) / (config + ".json");
        if (fs::exists(p, ec)) return t2m::load_fixture_file(p.string());
        throw t2m::ConfigError("no fixture named '" + config +
                               "': not a file, not a built-in, and " + p.string() +
                               " does not exist");
    }
    throw t2m::ConfigError("no fixture named '" + config + "': not a file and not a built-in");
}

void list_fixtures() {
    for (const t2m::FixtureInfo& info : t2m::builtin_fixtures())
        std::printf("%-42s %s\n", info.name.c_str(), info.description.c_str());
    const char* dir = std::getenv("T2M_FIXTURE_DIR");
    if (!dir) return;
    std::error_code ec;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir, ec))
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const fs::path& p : files) {
        std::string desc;
        try {
            std::ifstream in(p);
            nlohmann::json doc = nlohmann::json::parse(in);
            desc = doc.value("description", "");
        } catch (const nlohmann::json::exception&) {
            desc = "(unreadable fixture file)";
        }
        std::printf("%-42s %s\n", p.stem().string().c_str(), desc.c_str());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"verification harness for connection-trivialized second-order tangent bundles"};
    app.require_subcommand(1);

    std::string config;
    std::string suite_name = "all";
    std::string out_path;
    t2m::SuiteOptions opts;

    CLI::App* verify = app.add_subcommand("verify", "run a verification suite against a fixture");
    verify->add_option("--config", config,
                       "fixture file, built-in name, or name under $T2M_FIXTURE_DIR")
        ->required();
    verify->add_option("--suite", suite_name, "calculus|atlas|connection|bundle|tower|all");
    verify->add_option("--seed", opts.seed, "master seed for randomized checks");
    verify->add_option("--tol-struct", opts.tol_struct, "tolerance for structural identities");
    verify->add_option("--tol-fd", opts.tol_fd, "tolerance for finite-difference checks");
    verify->add_option("--out", out_path, "write the report body to this path instead of stdout");

    CLI::App* fixtures = app.add_subcommand("fixtures", "fixture utilities");
    fixtures->require_subcommand(1);
    CLI::App* list = fixtures->add_subcommand("list", "list available fixtures");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  //422-style usage problems share the config exit code
    }

    try {
        if (list->parsed()) {
            list_fixtures();
            return 0;
        }
        t2m::Fixture fx = resolve_fixture(config);
        t2m::SuiteReport report = t2m::run_suite(fx, suite_name, opts);
        std::string body = report.to_json().dump(2) + "\n";
        if (out_path.empty()) {
            std::cout << body;
        } else {
            std::ofstream out(out_path, std::ios::binary);
            if (!out) throw t2m::ConfigError("cannot write report to '" + out_path + "'");
            out << body;
        }
        std::cerr << report.summary();
        return report.pass ? 0 : 1;
    } catch (const t2m::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const t2m::ParameterError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const t2m::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
