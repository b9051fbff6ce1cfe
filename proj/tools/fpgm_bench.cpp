#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fpgm/bench/commands.hpp"
#include "fpgm/errors.hpp"
#include "fpgm/parallel.hpp"

namespace {

struct Options {
    std::string config;
    std::string out = "out";
    std::string data = "out";
    std::string scale = "desk";
    long long seed = -1;
    unsigned threads = 1;
    bool dump = false;
};

fpgm::bench::Config load(const Options& o) {
    const auto scale = fpgm::bench::parse_scale(o.scale);
    auto c = o.config.empty() ? fpgm::bench::default_config(scale)
                              : fpgm::bench::load_config(o.config, scale);
    if (o.seed >= 0) {
        c.acquisition.seed = static_cast<std::uint64_t>(o.seed);
        c.study.first_seed = static_cast<std::uint64_t>(o.seed);
    }
    return c;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Accelerated proximal gradient solvers and tomography benchmarks"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--config", o.config, "INI configuration file (defaults apply when omitted)");
    app.add_option("--out", o.out, "output directory");
    app.add_option("--data", o.data, "reconstruct: directory holding counts.bin and sinogram.bin");
    app.add_option("--seed", o.seed, "seed for phantom and counts (study: first seed)");
    app.add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--scale", o.scale, "parameter defaults")->check(CLI::IsMember({"desk", "paper"}));
    app.add_flag("--print-config", o.dump, "print the effective configuration and exit");

    auto* simulate = app.add_subcommand("simulate", "write phantom, counts, sinogram and ROI manifest");
    auto* reconstruct = app.add_subcommand(
        "reconstruct", "reconstruct data written by simulate (fista, mfista, oista, fpgm, mfpgm, supart)");
    auto* benchmark = app.add_subcommand(
        "benchmark", "optimality-gap traces per method and L0 against a long FISTA reference; "
                     "fpgm(inf,inf) is a non-convergent configuration and is flagged as such");
    auto* study = app.add_subcommand("study", "repeated phantom study with IROI and paired tests");
    for (auto* sub : {simulate, reconstruct, benchmark, study}) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        fpgm::set_thread_count(o.threads);
        const auto c = load(o);
        if (o.dump) {
            std::cout << fpgm::bench::dump_config(c);
            return 0;
        }
        if (*simulate) {
            const auto d = fpgm::bench::cmd_simulate(c, o.out);
            std::cout << "simulated seed " << d.phantom.seed << " into " << o.out << "\n";
        } else if (*reconstruct) {
            const auto r = fpgm::bench::cmd_reconstruct(c, o.data, o.out);
            std::cout << r.algorithm << ": residual " << r.residual << ", psi " << r.psi_final << "\n";
        } else if (*benchmark) {
            const auto r = fpgm::bench::cmd_benchmark(c, o.out);
            std::cout << "reference psi " << r.psi_ref << "\n";
            for (const auto& run : r.runs)
                std::cout << run.method.display() << " L0=" << run.L0 << " final gap "
                          << run.gap.back() << (run.method.unbounded_phase() ? "  [non-convergent configuration]" : "")
                          << "\n";
            if (!r.reference_lowest) std::cout << "warning: reference is not the lowest objective\n";
        } else if (*study) {
            const auto r = fpgm::bench::cmd_study(c, o.out);
            for (const auto& row : r.summary)
                std::cout << row.algorithm << " mean IROI " << row.iroi << "\n";
        }
    } catch (const fpgm::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const fpgm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const fpgm::ContractError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const fpgm::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
