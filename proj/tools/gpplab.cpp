#include "gpp/config.hpp"
#include "gpp/errors.hpp"
#include "gpp/log.hpp"
#include "gpp/run.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Normalized ground states of the radial Gross-Pitaevskii-Poisson problem"};
    std::string config_path;
    std::string output_dir;
    bool verbose = false;
    bool quiet = false;
    app.add_option("config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    app.add_option("-o,--output-dir", output_dir, "Override the configured output directory");
    app.add_flag("-v,--verbose", verbose, "Log solver progress");
    app.add_flag("-q,--quiet", quiet, "Suppress warnings");
    CLI11_PARSE(app, argc, argv);

    gpp::log::set_level(verbose ? gpp::log::Level::verbose
                                : (quiet ? gpp::log::Level::quiet : gpp::log::Level::normal));
    try {
        auto config = gpp::load_config(config_path);
        if (!output_dir.empty()) config.output_dir = output_dir;
        return gpp::run(config, std::cout);
    } catch (const gpp::Error& e) {
        std::cerr << "gpplab: " << gpp::to_string(e.code()) << ": " << e.what() << '\n';
        return e.code() == gpp::Errc::config_parse ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "gpplab: " << e.what() << '\n';
        return 1;
    }
}
