// SPDX-License-Identifier: Apache-2.0

#include "arpla/montecarlo.hpp"

#include <algorithm>
#include <random>

namespace arpla {

HmmModel synthetic_equal_cov_model(int n_states, int d, double separation, std::uint64_t seed) {
    if (n_states != 2 && n_states != 3) throw ConfigError("synthetic model needs 2 or 3 states");
    if (d < 1) throw ConfigError("d must be >= 1");
    Rng rng(derive_seed(seed, 0x5E7, 0));
    std::normal_distribution<double> n01;
    std::uniform_real_distribution<double> u(0.5, 1.5);
    RMatrix g(d, d);
    for (auto& x : g.reshaped()) x = n01(rng);
    const Eigen::HouseholderQR<RMatrix> qr(g);
    const RMatrix q = qr.householderQ();
    RVector ev(d);
    for (auto& x : ev) x = u(rng);
    const RMatrix sigma = q * ev.asDiagonal() * q.transpose();

    HmmModel m;
    m.n_states = n_states;
    for (int k = 0; k < n_states; ++k) {
        EmissionStats s;
        s.mu.resize(d);
        for (auto& x : s.mu) x = n01(rng) * separation / std::sqrt(2.0 * d);
        s.sigma = sigma;
        s.reg_eps = 0.0;
        s.state_label = k;
        m.emissions.push_back(std::move(s));
    }
    if (n_states == 2) {
        const HmmModel def = default_hmm2(m.emissions[0], m.emissions[1]);
        m.pi = def.pi;
        m.a = def.a;
    } else {
        const HmmModel def = default_hmm3(m.emissions[0], m.emissions[1], m.emissions[2]);
        m.pi = def.pi;
        m.a = def.a;
    }
    return m;
}

namespace {

int draw_state(const RVector& p, Rng& rng) {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    double acc = 0.0;
    for (int k = 0; k < p.size(); ++k) {
        acc += p(k);
        if (u < acc) return k;
    }
    return static_cast<int>(p.size()) - 1;
}

}  // namespace

HmmTrajectories simulate_hmm(const HmmModel& model, int horizon, int trials, std::uint64_t seed) {
    model.validate();
    if (horizon < 1 || trials < 1) throw ConfigError("horizon and trials must be >= 1");
    const int n = model.n_states;
    const auto d = model.emissions.front().mu.size();
    std::vector<GaussianDensity> dens;
    std::vector<RMatrix> chol;
    for (const auto& e : model.emissions) {
        dens.emplace_back(e);
        chol.push_back(Eigen::LLT<RMatrix>(e.regularized()).matrixL());
    }
    const RVector log_pi = model.pi.unaryExpr([](double p) { return safe_log(p); });
    const RMatrix log_a = model.a.unaryExpr([](double p) { return safe_log(p); });

    HmmTrajectories out;
    out.trials = trials;
    out.horizon = horizon;
    out.lambda.resize(static_cast<std::size_t>(trials) * static_cast<std::size_t>(horizon));
    out.state.resize(out.lambda.size());
    std::normal_distribution<double> n01;
    RVector x(d), loglik(n);
    for (int i = 0; i < trials; ++i) {
        Rng rng(derive_seed(seed, 0x7EA1, static_cast<std::uint64_t>(i)));
        ForwardState fwd = initial_forward_state(model);
        int s = -1;
        for (int t = 1; t <= horizon; ++t) {
            s = t == 1 ? draw_state(model.pi, rng) : draw_state(model.a.row(s).transpose(), rng);
            for (auto& v : x) v = n01(rng);
            const RVector z = model.emissions[static_cast<std::size_t>(s)].mu + chol[static_cast<std::size_t>(s)] * x;
            for (int k = 0; k < n; ++k) loglik(k) = dens[static_cast<std::size_t>(k)].log_pdf(z);
            fwd = hmm_forward_step(fwd, log_pi, log_a, loglik);
            const auto idx = static_cast<std::size_t>(i * horizon + t - 1);
            out.lambda[idx] = fwd.lambda;
            out.state[idx] = s;
        }
    }
    return out;
}

std::vector<analysis::OperatingPoint> empirical_operating_curve(const HmmTrajectories& traj, const HmmModel& model,
                                                                double gamma0, bool first_passage) {
    std::vector<analysis::OperatingPoint> out;
    std::vector<double> running(static_cast<std::size_t>(traj.trials), kPosInf);
    for (int t = 1; t <= traj.horizon; ++t) {
        double alice = 0.0, alice_hit = 0.0, eve = 0.0, eve_hit = 0.0;
        for (int i = 0; i < traj.trials; ++i) {
            auto& r = running[static_cast<std::size_t>(i)];
            r = std::min(r, traj.lambda_at(i, t));
            const double stat = first_passage ? r : traj.lambda_at(i, t);
            const bool hit = stat <= gamma0;
            if (model.is_alice_state(traj.state_at(i, t))) {
                alice += 1.0;
                alice_hit += hit;
            } else {
                eve += 1.0;
                eve_hit += hit;
            }
        }
        out.push_back({t, alice > 0.0 ? alice_hit / alice : 0.0, eve > 0.0 ? eve_hit / eve : 0.0});
    }
    return out;
}

}  // namespace arpla
