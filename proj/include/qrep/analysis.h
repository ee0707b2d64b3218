// Copyright 2026 The qrep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QREP_ANALYSIS_H
#define QREP_ANALYSIS_H

#include <vector>

#include "qrep/stations.h"

namespace qrep {

struct PowerLawFit {
    double slope = 0;
    double intercept = 0;
    /// Root-mean-square residual of log(T) about the fitted line.
    double residual = 0;
};

/// Least-squares line through (log L, log T).
PowerLawFit scaling_fit(const std::vector<double> &lengths, const std::vector<double> &times);

/// log10(coherence_tolerance / (wavelength / 10)): orders of magnitude gained by needing path
/// stability at a fraction of the coherence length instead of a tenth of the wavelength.
double stability_ratio(double wavelength_m, double coherence_tolerance_m);

struct EkertReport {
    bool has_coincidences = false;
    /// Two-sided single-click probability in each analysis basis.
    double coincidence_hv = 0;
    double coincidence_pm = 0;
    /// P(same) - P(different) among the post-selected events.
    double correlation_hv = 0;
    double correlation_pm = 0;
};

/// Retrieves both memories of `pair`, analyzes the photons in the H/V and +/- bases, keeps events
/// with exactly one click at each site and returns the conditional correlations.
EkertReport ekert_check(
    const BranchEnsemble &pair, const RetrievalParams &retrieval = {}, const DetectorModel &detector = DetectorModel::ideal());

}  // namespace qrep

#endif
