#include <chrono>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "pim/core/config.hpp"
#include "pim/experiment/acceptance.hpp"
#include "pim/experiment/sweep.hpp"
#include "pim/experiment/table.hpp"

namespace {

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string read_config(const std::string& path) {
    if (path.empty()) return {};
    std::ifstream f(path);
    if (!f) {
        std::cerr << "pim-model: cannot read config '" << path << "', using defaults\n";
        return {};
    }
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Analytical timing model of a processing-in-memory system"};
    std::string experiment, config_path, out_dir = "results";
    std::optional<std::uint64_t> seed;
    std::optional<std::uint32_t> dpus;
    std::optional<unsigned> tasklets;
    bool dump = false;
    std::string names;
    for (auto n : pim::exp::kExperimentNames) names += (names.empty() ? "" : ", ") + std::string(n);
    app.add_option("experiment", experiment, "One of: " + names)->required();
    app.add_option("--config", config_path, "Config file with system keys and sweep.* keys");
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_option("--seed", seed, "Seed (bench/scale: first seed; accept: first correctness seed)");
    app.add_option("--dpus", dpus, "Run at this DPU count only");
    app.add_option("--tasklets", tasklets, "Run at this tasklet count only");
    app.add_flag("--dump-config", dump, "Print the effective configuration and exit");
    CLI11_PARSE(app, argc, argv);

    try {
        using namespace pim::exp;
        const Experiment e = parse_experiment(experiment);
        const SplitConfig split = split_config(read_config(config_path));
        const pim::SystemConfig sys = pim::load_config(split.system);
        SweepSpec spec = default_spec(e);
        apply_sweep_keys(spec, split.sweep);
        if (seed) spec.seed = *seed;
        if (dpus) spec.dpus = {*dpus};
        if (tasklets) spec.tasklets = {*tasklets};

        if (dump) {
            std::cout << pim::serialize(sys) << serialize(spec);
            return 0;
        }

        Json params = to_json(spec);
        params["seed"] = spec.seed;
        const std::string stamp = utc_timestamp();

        if (e == Experiment::accept) {
            AcceptOptions opts;
            opts.workers = spec.workers;
            opts.first_seed = spec.seed;
            const auto result = run_acceptance(sys, opts);
            std::cout << format_report(result, true);
            write_outputs(out_dir, acceptance_table(result), sys, params, stamp);
            return all_pass(result) ? 0 : 2;
        }

        validate(spec, sys);
        const Table t = run_sweep(spec, sys);
        write_outputs(out_dir, t, sys, params, stamp);
        std::cout << t.rows.size() << " rows written to " << (std::filesystem::path(out_dir) / (t.experiment + ".csv")).string()
                  << "\n";
        return 0;
    } catch (const std::exception& ex) {
        std::cerr << "pim-model: " << ex.what() << "\n";
        return 1;
    }
}
