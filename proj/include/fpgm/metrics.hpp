#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fpgm/phantom.hpp"
#include "fpgm/solvers.hpp"
#include "fpgm/vec.hpp"

namespace fpgm {

/// Mean of image over a pixel set.
double region_mean(ConstSpan image, const std::vector<std::size_t>& pixels);

/// Contrast-to-spread ratio of one image over the ROI pairs:
/// sum_s (a_t(s) - a_n(s)) / sum_s (a_n(s) - mean_s' a_n(s'))^2.
/// Throws DataError when the control means do not vary.
double roi_ratio(ConstSpan image, const std::vector<RoiPair>& pairs);

/// Imagewise region-of-interest figure of merit: roi_ratio(recon) divided by
/// roi_ratio(phantom). Needs at least two pairs.
double iroi(ConstSpan recon, const Phantom& phantom);
double iroi(ConstSpan recon, ConstSpan phantom_image, const std::vector<RoiPair>& pairs);

/// (psi_k - psi_star) / |psi_star| per record; the plain difference when
/// psi_star is zero.
Vec optimality_gap_trace(const std::vector<IterationRecord>& trace, double psi_star);

struct PairedComparison {
    double mean_a;
    double mean_b;
    double p_value; // one-sided, H0: mean(a - b) <= 0
};

/// One-sided paired t-test on the differences a - b (n - 1 degrees of
/// freedom). With zero spread the p-value is 0, 0.5 or 1 by the sign of the
/// mean difference.
PairedComparison paired_compare(ConstSpan a, ConstSpan b);

struct StudyRow {
    std::string algorithm;
    std::string seed; // seed number, or "mean" for summary rows
    double iroi = 0.0;
    double residual = 0.0;
    double psi_final = 0.0;
    double p_value = kInfinity; // written as empty when not applicable
};

/// CSV with header algorithm,seed,iroi,residual,psi_final,p_value.
void write_study_csv(std::ostream& out, const std::vector<StudyRow>& rows);
std::vector<StudyRow> read_study_csv(std::istream& in);

} // namespace fpgm
