// SPDX-License-Identifier: Apache-2.0

#include "arpla/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace arpla {

RocResult compute_roc_auc(std::span<const double> scores_alice, std::span<const double> scores_eve) {
    if (scores_alice.empty() || scores_eve.empty()) throw ConfigError("ROC needs non-empty score lists");
    const auto has_nan = [](std::span<const double> s) {
        return std::any_of(s.begin(), s.end(), [](double x) { return std::isnan(x); });
    };
    if (has_nan(scores_alice) || has_nan(scores_eve)) throw ConfigError("ROC scores contain NaN");

    std::vector<double> a(scores_alice.begin(), scores_alice.end());
    std::vector<double> e(scores_eve.begin(), scores_eve.end());
    std::sort(a.begin(), a.end(), std::greater<>());
    std::sort(e.begin(), e.end(), std::greater<>());
    const auto na = static_cast<std::int64_t>(a.size());
    const auto ne = static_cast<std::int64_t>(e.size());

    RocResult r;
    r.roc.push_back({0.0, 0.0});
    // twice the Mann-Whitney U, kept integral so the result is exact
    std::int64_t u2 = 0;
    std::int64_t ia = 0, ie = 0;
    while (ia < na || ie < ne) {
        double tau;
        if (ia < na && ie < ne) {
            tau = std::max(a[static_cast<std::size_t>(ia)], e[static_cast<std::size_t>(ie)]);
        } else if (ia < na) {
            tau = a[static_cast<std::size_t>(ia)];
        } else {
            tau = e[static_cast<std::size_t>(ie)];
        }
        std::int64_t da = 0, de = 0;
        while (ia + da < na && a[static_cast<std::size_t>(ia + da)] == tau) ++da;
        while (ie + de < ne && e[static_cast<std::size_t>(ie + de)] == tau) ++de;
        // alice at tau beats every eve score below tau and ties with de of them
        u2 += da * (2 * (ne - ie - de) + de);
        ia += da;
        ie += de;
        r.roc.push_back({static_cast<double>(ie) / static_cast<double>(ne),
                         static_cast<double>(ia) / static_cast<double>(na)});
    }
    r.auc = static_cast<double>(u2) / (2.0 * static_cast<double>(na) * static_cast<double>(ne));
    return r;
}

double trapezoid_auc(const std::vector<RocPoint>& roc) {
    double area = 0.0;
    for (std::size_t i = 1; i < roc.size(); ++i)
        area += (roc[i].fpr - roc[i - 1].fpr) * 0.5 * (roc[i].tpr + roc[i - 1].tpr);
    return area;
}

}  // namespace arpla
