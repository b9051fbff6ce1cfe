#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fpgm/baselines.hpp"
#include "fpgm/phantom.hpp"
#include "fpgm/solvers.hpp"

namespace fpgm::bench {

enum class Scale { desk, paper };
Scale parse_scale(const std::string& s);

/// A solver family member with its (K, eta_bar) pair, written as
/// fista | mfista | oista | fpgm(K,eta_bar) | mfpgm(K,eta_bar), K and eta_bar
/// possibly "inf".
struct MethodSpec {
    Variant variant = Variant::fpgm;
    long K = 10;
    double eta_bar = kInfinity;

    std::string label() const; // e.g. "fpgm_10_inf"
    std::string display() const; // e.g. "fpgm(10,inf)"
    bool unbounded_phase() const { return K == kUnboundedPhase; }
};
MethodSpec parse_method(const std::string& token);
std::vector<MethodSpec> parse_method_list(const std::string& text);

struct GeometryConfig {
    std::size_t views = 90;
    std::size_t rays_per_view = 128;
    std::size_t n_side = 128;
    double extent = 9.1;
};

struct AcquisitionConfig {
    double flat = 1e5;
    double dark = 0.0;
    std::uint64_t seed = 1;
    bool noiseless = false;
};

enum class Model { transmission_nonneg, ls_tv };
std::string to_string(Model m);
Model parse_model(const std::string& s);

struct ReconstructConfig {
    std::string algorithm = "fpgm"; // solver variant or "supart"
    Model model = Model::transmission_nonneg;
    double lambda = 5e-3;
    SolverConfig solver;           // variant field follows algorithm
    int tv_inner_iters = 10;
    bool tv_warm_start = true;
    SupArtParams supart;
    double epsilon = 2.33; // SupART squared-residual target
};

struct BenchmarkConfig {
    Model model = Model::transmission_nonneg;
    double lambda = 5e-3;
    std::vector<MethodSpec> methods;
    Vec L0;
    int N = 500;
    int reference_multiplier = 2;
    double reference_L0 = 0.0; // 0: largest of L0
};

struct StudyConfig {
    int seeds = 10;
    std::uint64_t first_seed = 1;
    Vec lambdas{4e-3, 5e-3, 6e-3};
    double calibration_lambda = 5e-3;
    bool epsilon_auto = true;
    double epsilon = 2.33;
    int N = 100;
    double L0 = 1.0;
};

struct Config {
    Scale scale = Scale::desk;
    GeometryConfig geometry;
    PhantomSpec phantom;
    AcquisitionConfig acquisition;
    ReconstructConfig reconstruct;
    BenchmarkConfig benchmark;
    StudyConfig study;
};

/// Built-in parameters for a scale. Desk: 90 views x 128 rays, 128^2 image.
/// Scale::paper: 512 x 2048 with a 2048^2 image for benchmark-style runs.
Config default_config(Scale scale);

/// Reads an INI file over default_config(scale). Unknown sections or keys and
/// malformed values raise ConfigError naming the file and line.
Config load_config(const std::filesystem::path& path, Scale scale);

/// Same from in-memory text (origin is used in messages).
Config parse_config(const std::string& text, Scale scale, const std::string& origin = "<config>");

/// Writes every key with its current value, in a form parse_config accepts.
std::string dump_config(const Config& c);

} // namespace fpgm::bench
