#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "qml/reports.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 2;
constexpr int kExitValidation = 3;
constexpr int kExitRuntime = 4;

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    int threads = 0; // 0 -> QMLLAB_THREADS or 1
    std::string format = "both";
};

int resolve_threads(int requested)
{
    if (requested > 0)
        return requested;
    if (const char* env = std::getenv("QMLLAB_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0)
            return n;
    }
    return 1;
}

qml::Json load_config(const std::string& path, int& exit_code)
{
    std::ifstream in(path);
    if (!in) {
        std::cerr << "error: cannot open config file '" << path << "'\n";
        exit_code = kExitIo;
        return {};
    }
    try {
        qml::Json j = qml::Json::parse(in);
        exit_code = kExitOk;
        return j;
    } catch (const std::exception& e) {
        std::cerr << "error: config is not valid JSON: " << e.what() << '\n';
        exit_code = kExitValidation;
        return {};
    }
}

int write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot write '" << path.string() << "'\n";
        return kExitIo;
    }
    out << content;
    return out ? kExitOk : kExitIo;
}

using CommandFn = qml::CommandOutput (*)(const qml::Json&, int,
                                         std::optional<std::uint64_t>);

int run_command(const char* name, CommandFn fn, const CommonArgs& args)
{
    int exit_code = kExitOk;
    const qml::Json config = load_config(args.config_path, exit_code);
    if (exit_code != kExitOk)
        return exit_code;

    qml::CommandOutput output;
    const auto start = std::chrono::steady_clock::now();
    try {
        output = fn(config, resolve_threads(args.threads), args.seed);
    } catch (const qml::InvalidParameter& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const qml::InvalidDistribution& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: experiment failed: " << e.what() << '\n';
        return kExitRuntime;
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::error_code ec;
    std::filesystem::create_directories(args.out_dir, ec);
    if (ec) {
        std::cerr << "error: cannot create output directory '" << args.out_dir << "'\n";
        return kExitIo;
    }
    const std::filesystem::path out_dir(args.out_dir);

    if (args.format == "json" || args.format == "both") {
        const auto path = out_dir / (std::string(name) + "_report.json");
        const int rc = write_file(path, output.report.dump(2) + "\n");
        if (rc != kExitOk)
            return rc;
        std::cerr << "wrote " << path.string() << '\n';
    }
    if (args.format == "csv" || args.format == "both") {
        const auto path = out_dir / (output.csv_name + ".csv");
        const int rc = write_file(path, output.csv);
        if (rc != kExitOk)
            return rc;
        std::cerr << "wrote " << path.string() << '\n';
    }
    std::cerr << name << " finished in " << elapsed << " s\n";
    return kExitOk;
}

void add_common(CLI::App* cmd, CommonArgs& args)
{
    cmd->add_option("--config", args.config_path, "Path to the JSON config")->required();
    cmd->add_option("--out", args.out_dir, "Output directory (default: .)");
    cmd->add_option("--seed", args.seed, "Override the config master_seed");
    cmd->add_option("--threads", args.threads,
                    "Worker threads (default: QMLLAB_THREADS or 1)");
    cmd->add_option("--format", args.format, "Report format: json|csv|both")
        ->check(CLI::IsMember({"json", "csv", "both"}));
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"State-learning laboratory: calibration, learning, posterior-sampler and "
                 "security-game experiments"};
    app.require_subcommand(1);

    CommonArgs calibrate_args, learn_args, qmlh_args, owsg_args;
    CLI::App* calibrate =
        app.add_subcommand("calibrate", "Estimate the design's distortion constant");
    add_common(calibrate, calibrate_args);
    CLI::App* learn = app.add_subcommand("learn", "Run a state-learning experiment");
    add_common(learn, learn_args);
    CLI::App* qmlh =
        app.add_subcommand("qmlh", "Measure the posterior sampler's failure rate");
    add_common(qmlh, qmlh_args);
    CLI::App* owsg = app.add_subcommand("owsg", "Run one-way state generator games");
    add_common(owsg, owsg_args);

    CLI11_PARSE(app, argc, argv);

    if (calibrate->parsed())
        return run_command("calibrate", qml::run_calibrate_command, calibrate_args);
    if (learn->parsed())
        return run_command("learn", qml::run_learn_command, learn_args);
    if (qmlh->parsed())
        return run_command("qmlh", qml::run_qmlh_command, qmlh_args);
    return run_command("owsg", qml::run_owsg_command, owsg_args);
}
