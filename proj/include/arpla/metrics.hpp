// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "arpla/common.hpp"

namespace arpla {

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocResult {
    std::vector<RocPoint> roc;  // (0,0) .. (1,1), non-decreasing in both axes
    double auc = 0.0;
};

/// Higher scores mean "Alice". One ROC vertex per distinct score, so tied
/// scores produce a diagonal segment and the AUC equals the midrank
/// Mann-Whitney statistic. Throws ConfigError on empty input or NaN scores.
RocResult compute_roc_auc(std::span<const double> scores_alice, std::span<const double> scores_eve);

/// Trapezoidal area under a ROC polyline.
double trapezoid_auc(const std::vector<RocPoint>& roc);

}  // namespace arpla
