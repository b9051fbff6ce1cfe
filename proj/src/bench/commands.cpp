#include "fpgm/bench/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "fpgm/io.hpp"
#include "fpgm/parallel.hpp"
#include "fpgm/prox.hpp"

namespace fpgm::bench {

namespace fs = std::filesystem;

namespace {

std::ofstream open_text(const fs::path& p) {
    std::ofstream out(p, std::ios::out | std::ios::trunc);
    if (!out) throw DataError("cannot open '" + p.string() + "' for writing");
    out << std::setprecision(17);
    return out;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create directory '" + dir.string() + "': " + ec.message());
}

std::string short_real(double v) {
    std::ostringstream o;
    o << v;
    return o.str();
}

SolverConfig solver_for(const Config& c, const MethodSpec& m, double L0, int N) {
    SolverConfig s = c.reconstruct.solver;
    s.variant = m.variant;
    s.K = m.K;
    s.eta_bar = m.eta_bar;
    s.L0 = L0;
    s.N = N;
    return s;
}

void write_benchmark_trace(const fs::path& p, const std::vector<IterationRecord>& trace,
                           const Vec& gap, const std::vector<bool>& violation) {
    auto out = open_text(p);
    out << "k,wall_ms,psi,gap,L,eta,gamma,backtracks,chain_violation\n";
    for (std::size_t k = 0; k < trace.size(); ++k) {
        const auto& r = trace[k];
        out << r.k << ',' << r.wall_ms << ',' << r.psi << ',' << gap[k] << ',' << r.L << ','
            << r.eta << ',' << r.gamma << ',' << r.backtracks << ','
            << (violation.empty() ? 0 : int(violation[k])) << '\n';
    }
}

std::vector<bool> chain_violations(const std::vector<IterationRecord>& trace) {
    std::vector<bool> v(trace.size(), false);
    for (std::size_t k = 1; k < trace.size(); ++k)
        v[k] = trace[k].eta / trace[k].L > trace[k - 1].eta / trace[k - 1].L;
    return v;
}

Geometry geometry_of(const ArrayFile& a, const std::string& what) {
    if (a.dims.size() != 2 || a.grid == 0)
        throw DataError(what + ": expected a (rays, views) sinogram with a grid size");
    return make_geometry(a.dims[1], a.dims[0], a.grid, a.extent);
}

} // namespace

std::shared_ptr<RadonOperator> make_projector(const Config& c) {
    const auto& g = c.geometry;
    return std::make_shared<RadonOperator>(
        make_geometry(g.views, g.rays_per_view, g.n_side, g.extent));
}

std::uint64_t count_seed(std::uint64_t phantom_seed) {
    return phantom_seed * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL;
}

SimulationData simulate(const Config& c, const RadonOperator& R, std::uint64_t seed) {
    SimulationData d;
    d.phantom = generate_phantom(seed, c.phantom);
    d.counts = simulate_counts(R, d.phantom.image, c.acquisition.flat, c.acquisition.dark,
                               count_seed(seed), c.acquisition.noiseless);
    d.sinogram = estimate_sinogram(d.counts);
    return d;
}

CompositeObjective make_objective(Model model, double lambda, const Config& c,
                                  std::shared_ptr<const RadonOperator> R, const CountData& counts,
                                  const Vec& sinogram) {
    CompositeObjective obj;
    if (model == Model::transmission_nonneg) {
        obj.smooth = std::make_shared<Transmission>(R, counts.flat, counts.dark, counts.p);
        obj.nonsmooth = std::make_shared<NonnegIndicator>();
    } else {
        obj.smooth = std::make_shared<LeastSquares>(R, sinogram);
        obj.nonsmooth = std::make_shared<TvNonneg>(R->geometry().grid(), lambda,
                                                   c.reconstruct.tv_inner_iters,
                                                   c.reconstruct.tv_warm_start);
    }
    return obj;
}

Vec initial_image(const RadonOperator& R, const Vec& sinogram) {
    return project_nonneg(uniform_init(R, sinogram));
}

Reconstruction reconstruct(const Config& c, std::shared_ptr<const RadonOperator> R,
                           const CountData& counts, const Vec& sinogram,
                           const IterationObserver& observer) {
    const auto& rc = c.reconstruct;
    Reconstruction out;
    out.algorithm = rc.algorithm;
    const Vec x0 = initial_image(*R, sinogram);
    const GridShape grid = R->geometry().grid();
    if (rc.algorithm == "supart") {
        if (rc.model != Model::ls_tv)
            throw ConfigError("supart needs the ls_tv model (row-action on the sinogram)");
        const auto order = efficient_order(R->geometry().views, R->geometry().rays_per_view);
        auto res = supart(*R, sinogram, x0, grid, rc.epsilon, order, rc.supart,
                          [&](const SupArtStep& s) { out.sweeps.push_back(s); });
        out.x = std::move(res.x);
        out.residual = res.residual;
        out.psi_final = res.residual + rc.lambda * total_variation(out.x, grid);
        return out;
    }
    SolverConfig s = rc.solver;
    s.variant = parse_variant(rc.algorithm);
    const auto obj = make_objective(rc.model, rc.lambda, c, R, counts, sinogram);
    auto res = run(s, obj, x0, observer);
    out.x = std::move(res.x);
    out.trace = std::move(res.trace);
    const Vec r = R->apply(out.x);
    for (std::size_t i = 0; i < r.size(); ++i) out.residual += (r[i] - sinogram[i]) * (r[i] - sinogram[i]);
    out.psi_final = out.trace.empty() ? obj.value(out.x) : out.trace.back().psi;
    return out;
}

BenchmarkResult run_benchmark(const Config& c, const SimulationData& data,
                              std::shared_ptr<const RadonOperator> R,
                              const BenchmarkObserver& observer) {
    const auto& bc = c.benchmark;
    const auto obj = make_objective(bc.model, bc.lambda, c, R, data.counts, data.sinogram);
    const Vec x0 = initial_image(*R, data.sinogram);

    BenchmarkResult out;
    out.reference_L0 = bc.reference_L0 > 0.0 ? bc.reference_L0
                                             : *std::max_element(bc.L0.begin(), bc.L0.end());
    MethodSpec fista;
    fista.variant = Variant::fista;
    out.reference =
        run(solver_for(c, fista, out.reference_L0, bc.N * bc.reference_multiplier), obj, x0).trace;
    out.psi_ref = out.reference.back().psi;

    for (std::size_t li = 0; li < bc.L0.size(); ++li) {
        for (const auto& m : bc.methods) {
            BenchmarkRun r;
            r.method = m;
            r.L0 = bc.L0[li];
            IterationObserver obs;
            if (observer) obs = [&](const IterationView& v) { observer(m, r.L0, v); };
            r.trace = run(solver_for(c, m, r.L0, bc.N), obj, x0, obs).trace;
            r.gap = optimality_gap_trace(r.trace, out.psi_ref);
            r.chain_violation = chain_violations(r.trace);
            r.file = "trace_" + m.label() + "_L0-" + std::to_string(li) + ".csv";
            if (r.trace.back().psi < out.psi_ref) out.reference_lowest = false;
            out.runs.push_back(std::move(r));
        }
    }
    return out;
}

std::string study_label(double lambda) { return "fpgm_10_inf_lambda" + short_real(lambda); }

StudyResult run_study(const Config& c, const std::function<void(const StudySeed&)>& progress) {
    const auto& sc = c.study;
    auto R = make_projector(c);
    Vec lambdas = sc.lambdas;
    if (sc.epsilon_auto &&
        std::find(lambdas.begin(), lambdas.end(), sc.calibration_lambda) == lambdas.end())
        lambdas.push_back(sc.calibration_lambda);

    StudyResult out;
    out.seeds.resize(static_cast<std::size_t>(sc.seeds));
    parallel_blocks(out.seeds.size(), [&](std::size_t i) {
        StudySeed& s = out.seeds[i];
        s.seed = sc.first_seed + i;
        const SimulationData data = simulate(c, *R, s.seed);
        s.phantom_self_iroi = iroi(data.phantom.image, data.phantom);

        MethodSpec m; // fpgm(10, inf)
        double calibrated = 0.0;
        for (double lambda : lambdas) {
            Config rc = c;
            rc.reconstruct.algorithm = "fpgm";
            rc.reconstruct.model = Model::ls_tv;
            rc.reconstruct.lambda = lambda;
            rc.reconstruct.solver = solver_for(c, m, sc.L0, sc.N);
            const Reconstruction rec = reconstruct(rc, R, data.counts, data.sinogram);
            if (lambda == sc.calibration_lambda) calibrated = rec.residual;
            if (std::find(sc.lambdas.begin(), sc.lambdas.end(), lambda) == sc.lambdas.end())
                continue;
            s.rows.push_back({study_label(lambda), std::to_string(s.seed),
                              iroi(rec.x, data.phantom), rec.residual, rec.psi_final, kInfinity});
        }
        s.epsilon = sc.epsilon_auto ? calibrated : sc.epsilon;

        Config rc = c;
        rc.reconstruct.algorithm = "supart";
        rc.reconstruct.model = Model::ls_tv;
        rc.reconstruct.lambda = sc.calibration_lambda;
        rc.reconstruct.epsilon = s.epsilon;
        const Reconstruction rec = reconstruct(rc, R, data.counts, data.sinogram);
        s.sweeps = rec.sweeps;
        s.rows.push_back({kSupArtLabel, std::to_string(s.seed), iroi(rec.x, data.phantom),
                          rec.residual, rec.psi_final, kInfinity});
        if (progress) progress(s);
    });

    // Summary: means per algorithm, p-values of "best beats this one".
    std::vector<std::string> names;
    for (const auto& r : out.seeds.front().rows) names.push_back(r.algorithm);
    auto column = [&](std::size_t a, double StudyRow::*f) {
        Vec v;
        for (const auto& s : out.seeds) v.push_back(s.rows[a].*f);
        return v;
    };
    std::size_t best = 0;
    for (std::size_t a = 0; a < names.size(); ++a)
        if (sum(column(a, &StudyRow::iroi)) > sum(column(best, &StudyRow::iroi))) best = a;
    out.best = names[best];
    const double n = static_cast<double>(out.seeds.size());
    for (std::size_t a = 0; a < names.size(); ++a) {
        StudyRow r{names[a], "mean", sum(column(a, &StudyRow::iroi)) / n,
                   sum(column(a, &StudyRow::residual)) / n,
                   sum(column(a, &StudyRow::psi_final)) / n, kInfinity};
        if (a != best)
            r.p_value = paired_compare(column(best, &StudyRow::iroi), column(a, &StudyRow::iroi)).p_value;
        out.summary.push_back(r);
    }
    return out;
}

SimulationData cmd_simulate(const Config& c, const fs::path& out_dir) {
    ensure_dir(out_dir);
    const auto R = make_projector(c);
    SimulationData d = simulate(c, *R, c.acquisition.seed);
    const auto& g = R->geometry();

    ArrayFile img{"image", {g.n_side, g.n_side}, 1, g.extent, g.n_side, d.phantom.seed, d.phantom.image};
    write_array(out_dir / kPhantomFile, img);

    ArrayFile cnt{"counts", {g.rays_per_view, g.views}, 3, g.extent, g.n_side, d.counts.seed, {}};
    cnt.data = d.counts.p;
    cnt.data.insert(cnt.data.end(), d.counts.flat.begin(), d.counts.flat.end());
    cnt.data.insert(cnt.data.end(), d.counts.dark.begin(), d.counts.dark.end());
    write_array(out_dir / kCountsFile, cnt);

    ArrayFile sino{"sinogram", {g.rays_per_view, g.views}, 1, g.extent, g.n_side, d.counts.seed, d.sinogram};
    write_array(out_dir / kSinogramFile, sino);

    write_roi_manifest(out_dir / kRoiFile, d.phantom.roi_pairs, g.grid(), d.phantom.seed);
    return d;
}

Reconstruction cmd_reconstruct(const Config& c, const fs::path& data_dir, const fs::path& out_dir) {
    const ArrayFile cnt = read_array(data_dir / kCountsFile);
    const ArrayFile sino = read_array(data_dir / kSinogramFile);
    if (cnt.kind != "counts" || cnt.channels != 3) throw DataError("counts file has wrong layout");
    if (sino.kind != "sinogram" || sino.dims != cnt.dims) throw DataError("sinogram does not match counts");
    const Geometry g = geometry_of(cnt, "counts");
    const std::size_t m = g.rays();

    CountData counts;
    counts.p.assign(cnt.data.begin(), cnt.data.begin() + m);
    counts.flat.assign(cnt.data.begin() + m, cnt.data.begin() + 2 * m);
    counts.dark.assign(cnt.data.begin() + 2 * m, cnt.data.end());
    counts.geometry = g;
    counts.seed = cnt.seed;

    Config cc = c;
    cc.geometry = {g.views, g.rays_per_view, g.n_side, g.extent};
    const auto R = std::make_shared<RadonOperator>(g);
    Reconstruction rec = reconstruct(cc, R, counts, sino.data);

    ensure_dir(out_dir);
    write_array(out_dir / "reconstruction.bin",
                {"image", {g.n_side, g.n_side}, 1, g.extent, g.n_side, cnt.seed, rec.x});
    write_pgm(out_dir / "reconstruction.pgm", rec.x, g.grid(), kLesionWindowLow, kLesionWindowHigh);
    auto out = open_text(out_dir / "trace.csv");
    if (rec.algorithm == "supart") {
        out << "k,residual,tv,l\n";
        for (const auto& s : rec.sweeps)
            out << s.sweep << ',' << s.residual << ',' << s.tv_after << ',' << s.l_after << '\n';
    } else {
        write_trace_csv(out, rec.trace);
    }
    return rec;
}

BenchmarkResult cmd_benchmark(const Config& c, const fs::path& out_dir) {
    ensure_dir(out_dir);
    const auto R = make_projector(c);
    const SimulationData data = simulate(c, *R, c.acquisition.seed);
    BenchmarkResult res = run_benchmark(c, data, R);

    const Vec ref_gap = optimality_gap_trace(res.reference, res.psi_ref);
    write_benchmark_trace(out_dir / "reference.csv", res.reference, ref_gap, {});
    for (const auto& r : res.runs) write_benchmark_trace(out_dir / r.file, r.trace, r.gap, r.chain_violation);

    auto sum_out = open_text(out_dir / "summary.csv");
    sum_out << "method,L0,file,final_psi,final_gap,total_ms,chain_violations,note\n";
    sum_out << "reference_fista," << res.reference_L0 << ",reference.csv," << res.psi_ref << ",0,"
            << res.reference.back().wall_ms << ",0,"
            << (res.reference_lowest ? "" : "reference not lowest") << '\n';
    for (const auto& r : res.runs) {
        const long violations = std::count(r.chain_violation.begin(), r.chain_violation.end(), true);
        sum_out << r.method.label() << ',' << r.L0 << ',' << r.file << ',' << r.trace.back().psi
                << ',' << r.gap.back() << ',' << r.trace.back().wall_ms << ',' << violations << ','
                << (r.method.unbounded_phase() ? "non-convergent configuration" : "") << '\n';
    }

    auto plot = open_text(out_dir / "plot.gp");
    plot << "set datafile separator ','\nset logscale y\nset key outside\n"
            "set xlabel 'iteration'\nset ylabel 'relative optimality gap'\n"
            "set terminal pngcairo size 1200,800\n";
    for (std::size_t li = 0; li < c.benchmark.L0.size(); ++li) {
        plot << "set output 'gap_L0-" << li << ".png'\nset title 'L0 = " << c.benchmark.L0[li]
             << "'\nplot ";
        bool first = true;
        for (const auto& r : res.runs) {
            if (r.L0 != c.benchmark.L0[li]) continue;
            plot << (first ? "" : ", \\\n     ") << "'" << r.file
                 << "' every ::1 using 1:(abs($4)) with lines title '" << r.method.display() << "'";
            first = false;
        }
        plot << "\nset output 'gap_time_L0-" << li << ".png'\nset xlabel 'wall time (ms)'\nplot ";
        first = true;
        for (const auto& r : res.runs) {
            if (r.L0 != c.benchmark.L0[li]) continue;
            plot << (first ? "" : ", \\\n     ") << "'" << r.file
                 << "' every ::1 using 2:(abs($4)) with lines title '" << r.method.display() << "'";
            first = false;
        }
        plot << "\nset xlabel 'iteration'\n";
    }
    return res;
}

StudyResult cmd_study(const Config& c, const fs::path& out_dir) {
    ensure_dir(out_dir);
    StudyResult res = run_study(c);

    std::vector<StudyRow> all;
    for (const auto& s : res.seeds) all.insert(all.end(), s.rows.begin(), s.rows.end());
    all.insert(all.end(), res.summary.begin(), res.summary.end());
    {
        auto out = open_text(out_dir / "results.csv");
        write_study_csv(out, all);
    }
    {
        auto out = open_text(out_dir / "summary.csv");
        write_study_csv(out, res.summary);
    }
    auto mon = open_text(out_dir / "suptv_monitor.csv");
    mon << "seed,epsilon,sweep,tv_before,tv_after,l_before,l_after,residual\n";
    for (const auto& s : res.seeds)
        for (const auto& w : s.sweeps)
            mon << s.seed << ',' << s.epsilon << ',' << w.sweep << ',' << w.tv_before << ','
                << w.tv_after << ',' << w.l_before << ',' << w.l_after << ',' << w.residual << '\n';
    return res;
}

} // namespace fpgm::bench
