#include "fpgm/metrics.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <boost/math/distributions/students_t.hpp>

namespace fpgm {

double region_mean(ConstSpan image, const std::vector<std::size_t>& pixels) {
    if (pixels.empty()) throw DataError("region_mean: empty region");
    double s = 0.0;
    for (std::size_t p : pixels) {
        if (p >= image.size()) throw ContractError("region_mean: pixel index out of range");
        s += image[p];
    }
    return s / static_cast<double>(pixels.size());
}

double roi_ratio(ConstSpan image, const std::vector<RoiPair>& pairs) {
    const std::size_t S = pairs.size();
    if (S < 2) throw DataError("roi_ratio: need at least two ROI pairs");
    Vec tumor(S), control(S);
    for (std::size_t s = 0; s < S; ++s) {
        tumor[s] = region_mean(image, pairs[s].tumor);
        control[s] = region_mean(image, pairs[s].control);
    }
    const double control_mean = sum(control) / static_cast<double>(S);
    double contrast = 0.0, spread = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
        contrast += tumor[s] - control[s];
        spread += (control[s] - control_mean) * (control[s] - control_mean);
    }
    if (!(spread > 0.0)) throw DataError("roi_ratio: control region means are all equal");
    return contrast / spread;
}

double iroi(ConstSpan recon, ConstSpan phantom_image, const std::vector<RoiPair>& pairs) {
    require_size(recon, phantom_image.size(), "iroi");
    const double ref = roi_ratio(phantom_image, pairs);
    if (ref == 0.0) throw DataError("iroi: phantom has zero total contrast");
    return roi_ratio(recon, pairs) / ref;
}

double iroi(ConstSpan recon, const Phantom& phantom) {
    return iroi(recon, phantom.image, phantom.roi_pairs);
}

Vec optimality_gap_trace(const std::vector<IterationRecord>& trace, double psi_star) {
    Vec out(trace.size());
    const double scale = psi_star == 0.0 ? 1.0 : std::abs(psi_star);
    for (std::size_t k = 0; k < trace.size(); ++k) out[k] = (trace[k].psi - psi_star) / scale;
    return out;
}

PairedComparison paired_compare(ConstSpan a, ConstSpan b) {
    if (a.size() != b.size()) throw ContractError("paired_compare: sample lengths differ");
    const std::size_t n = a.size();
    if (n < 2) throw ContractError("paired_compare: need at least two pairs");
    const double nd = static_cast<double>(n);
    Vec diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = a[i] - b[i];
    const double mean_d = sum(diff) / nd;
    double ss = 0.0;
    for (double d : diff) ss += (d - mean_d) * (d - mean_d);

    PairedComparison out{sum(a) / nd, sum(b) / nd, 0.5};
    if (ss == 0.0) {
        out.p_value = mean_d > 0.0 ? 0.0 : (mean_d < 0.0 ? 1.0 : 0.5);
        return out;
    }
    const double se = std::sqrt(ss / (nd - 1.0) / nd);
    const double t = mean_d / se;
    const boost::math::students_t dist(nd - 1.0);
    out.p_value = boost::math::cdf(boost::math::complement(dist, t));
    return out;
}

void write_study_csv(std::ostream& out, const std::vector<StudyRow>& rows) {
    out << "algorithm,seed,iroi,residual,psi_final,p_value\n";
    // Shortest text that reads back to the same double.
    auto num = [](double v) {
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, res.ptr);
    };
    for (const auto& r : rows) {
        out << r.algorithm << ',' << r.seed << ',' << num(r.iroi) << ',' << num(r.residual) << ','
            << num(r.psi_final) << ',';
        if (std::isfinite(r.p_value)) out << num(r.p_value);
        out << '\n';
    }
}

std::vector<StudyRow> read_study_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "algorithm,seed,iroi,residual,psi_final,p_value")
        throw DataError("study csv: unexpected header");
    std::vector<StudyRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() == 5) cells.emplace_back();
        if (cells.size() != 6) throw DataError("study csv: expected 6 columns");
        StudyRow r;
        r.algorithm = cells[0];
        r.seed = cells[1];
        r.iroi = std::stod(cells[2]);
        r.residual = std::stod(cells[3]);
        r.psi_final = std::stod(cells[4]);
        r.p_value = cells[5].empty() ? kInfinity : std::stod(cells[5]);
        rows.push_back(std::move(r));
    }
    return rows;
}

} // namespace fpgm
