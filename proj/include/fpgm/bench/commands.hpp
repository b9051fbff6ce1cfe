#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fpgm/acquisition.hpp"
#include "fpgm/baselines.hpp"
#include "fpgm/bench/config.hpp"
#include "fpgm/metrics.hpp"
#include "fpgm/objective.hpp"
#include "fpgm/phantom.hpp"
#include "fpgm/radon.hpp"
#include "fpgm/solvers.hpp"

namespace fpgm::bench {

/// Output names written by cmd_simulate into the output directory.
inline constexpr const char* kPhantomFile = "phantom.bin";
inline constexpr const char* kCountsFile = "counts.bin";   // channels: p, flat, dark
inline constexpr const char* kSinogramFile = "sinogram.bin";
inline constexpr const char* kRoiFile = "roi.json";

std::shared_ptr<RadonOperator> make_projector(const Config& c);

/// Seed used for the photon draws of a run whose phantom uses phantom_seed.
std::uint64_t count_seed(std::uint64_t phantom_seed);

struct SimulationData {
    Phantom phantom;
    CountData counts;
    Vec sinogram;
};

SimulationData simulate(const Config& c, const RadonOperator& R, std::uint64_t seed);

/// Builds Psi for a model: transmission likelihood + nonnegativity, or
/// ||R x - b||^2 + lambda TV + nonnegativity.
CompositeObjective make_objective(Model model, double lambda, const Config& c,
                                  std::shared_ptr<const RadonOperator> R, const CountData& counts,
                                  const Vec& sinogram);

/// Uniform image matching the total projected mass of the sinogram, clipped at 0.
Vec initial_image(const RadonOperator& R, const Vec& sinogram);

struct Reconstruction {
    std::string algorithm;
    Vec x;
    std::vector<IterationRecord> trace; // solver runs
    std::vector<SupArtStep> sweeps;     // SupART runs
    double residual = 0.0;              // ||R x - b||^2
    double psi_final = 0.0;
};

/// Runs the configured algorithm on the given data. SupART needs the
/// least-squares model (row data); other combinations are rejected.
Reconstruction reconstruct(const Config& c, std::shared_ptr<const RadonOperator> R,
                           const CountData& counts, const Vec& sinogram,
                           const IterationObserver& observer = {});

struct BenchmarkRun {
    MethodSpec method;
    double L0 = 0.0;
    std::vector<IterationRecord> trace;
    Vec gap;
    std::vector<bool> chain_violation; // eta_k / L_k > eta_{k-1} / L_{k-1}
    std::string file;
};

struct BenchmarkResult {
    std::vector<IterationRecord> reference;
    double reference_L0 = 0.0;
    double psi_ref = 0.0;
    /// psi_ref <= final psi of every compared run.
    bool reference_lowest = true;
    std::vector<BenchmarkRun> runs;
};

using BenchmarkObserver =
    std::function<void(const MethodSpec&, double L0, const IterationView&)>;

BenchmarkResult run_benchmark(const Config& c, const SimulationData& data,
                              std::shared_ptr<const RadonOperator> R,
                              const BenchmarkObserver& observer = {});

struct StudySeed {
    std::uint64_t seed = 0;
    double epsilon = 0.0;
    double phantom_self_iroi = 0.0;
    std::vector<StudyRow> rows;
    std::vector<SupArtStep> sweeps;
};

struct StudyResult {
    std::vector<StudySeed> seeds;
    std::vector<StudyRow> summary; // one "mean" row per algorithm
    std::string best;              // algorithm with the highest mean IROI
};

std::string study_label(double lambda); // e.g. "fpgm_10_inf_lambda0.005"
inline constexpr const char* kSupArtLabel = "supart";

StudyResult run_study(const Config& c, const std::function<void(const StudySeed&)>& progress = {});

// File-level commands. Each returns what it wrote so callers can inspect it.
SimulationData cmd_simulate(const Config& c, const std::filesystem::path& out_dir);
Reconstruction cmd_reconstruct(const Config& c, const std::filesystem::path& data_dir,
                               const std::filesystem::path& out_dir);
BenchmarkResult cmd_benchmark(const Config& c, const std::filesystem::path& out_dir);
StudyResult cmd_study(const Config& c, const std::filesystem::path& out_dir);

} // namespace fpgm::bench
