// Command line front end: run experiments, list the catalog, validate configs.
#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "msfilter/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"multiscale filtering experiment driver"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int jobs = 0;
    const char* env_out = std::getenv("MSFILTER_OUTPUT_DIR");
    std::string default_out = env_out ? env_out : "out";

    CLI::App* run = app.add_subcommand("run", "run an experiment from a config file");
    run->add_option("config", config_path, "INI config file")->required();
    run->add_option("-o,--output", out_dir, "output directory (default $MSFILTER_OUTPUT_DIR or ./out)");
    run->add_option("-j,--jobs", jobs, "worker threads for Monte Carlo stages");

    CLI::App* list = app.add_subcommand("list", "list available experiments");

    CLI::App* validate = app.add_subcommand("validate", "check a config file without running it");
    validate->add_option("config", config_path, "INI config file")->required();

    std::string show_id;
    CLI::App* show = app.add_subcommand("show-config", "print the default config for an experiment");
    show->add_option("experiment", show_id, "experiment id")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) {
            for (const auto& e : msf::list_experiments())
                std::cout << e.id << "\t" << e.description << "\t" << e.runtime_estimate << "\n";
            return 0;
        }
        if (show->parsed()) {
            std::cout << msf::default_config(show_id);
            return 0;
        }
        msf::Config cfg = msf::Config::parse_file(config_path);
        if (validate->parsed()) {
            bool fatal = false;
            for (const auto& p : msf::validate_config(cfg)) {
                std::cout << p << "\n";
                if (p.rfind("warning:", 0) != 0) fatal = true;
            }
            if (!fatal) std::cout << "ok\n";
            return fatal ? 1 : 0;
        }
        // run
        if (out_dir.empty()) out_dir = default_out;
        msf::ExperimentReport rep = msf::run_experiment(cfg, out_dir, jobs);
        std::cout << "experiment: " << rep.experiment_id << "\n";
        std::cout << "config hash: " << rep.content_hash << "\n";
        for (const auto& [k, v] : rep.metrics) std::cout << k << " = " << v << "\n";
        for (const auto& f : rep.files) std::cout << "wrote " << f << "\n";
        if (rep.diverged) {
            std::cerr << "error: a filter diverged during the run\n";
            return 2;
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
