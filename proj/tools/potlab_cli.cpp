#include "potlab/report.hpp"

#include <CLI11.hpp>

int main(int argc, char** argv) {
    CLI::App app{"potlab: potential-theoretic workbench on finite weighted graphs and clouds"};
    app.require_subcommand(1);

    potlab::RunConfig cfg;
    const char* names[] = {"gen-space", "analyze", "green",      "capacity", "hodge-sweep",
                           "weights",   "trace",   "cloud",      "estikernel", "mv", "suite"};
    for (const char* name : names) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", cfg.config_path, "JSON parameter document");
        sub->add_option("--seed", cfg.seed, "64-bit seed (default 1)");
        sub->add_option("--out", cfg.out_path, "output path for the JSON report");
        sub->add_option("--threads", cfg.threads,
                        "worker threads (fallback: POTLAB_THREADS, default 1)");
        sub->callback([&cfg, name]() { cfg.command = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }
    return potlab::run(cfg);
}
