// Stopping-time decomposition of pair trajectories relative to nested center
// sets, the excursion counters X_t and L_t, and the exponential-moment audit
// of the outer excursion lengths.
#pragma once

#include <string>
#include <vector>

#include "synclaw/exit_prob.hpp"
#include "synclaw/synchro.hpp"

namespace synclaw {

struct CenterSets {
    int p = 4;          // even Lp index of the pair norm
    double R1 = 0.0;    // inner Lp radius
    double R2 = 0.0;    // middle Lp radius
    double R3 = 0.0;    // outer Lp radius
    double Rbar1 = 0.0; // inner L-infinity radius
    double Rbar2 = 0.0; // outer L-infinity radius

    void validate() const;  // throws with the violated invariant named
    bool operator==(const CenterSets&) const = default;
};

struct ExcursionRow {
    double tau = 0.0;      // start of the outer excursion (tau_i)
    double sigma = 0.0;    // re-entry into the inner center (sigma_i)
    double tau_next = 0.0; // exit from the outer center, capped at sigma + 1 (tau_{i+1})
    double tau_in = 0.0;   // entry into the L-inf inner center
    double tau_out = 0.0;  // exit from the L-inf outer center
    double S = 0.0;        // sigma - tau
    double T = 0.0;        // tau_next - sigma
    double T_inf = 0.0;    // tau_out - tau_in
    double start_norm_pow = 0.0;  // pair Lp norm to the p at tau
    double m_inf_window_sup = 0.0;  // sup of the pair L-inf norm over [tau_in, tau_out]
};

struct ExcursionRecord {
    std::vector<ExcursionRow> rows;
    bool truncated_tail = false;
    double horizon = 0.0;
    double dt = 0.0;
};

struct CalibrationResult {
    CenterSets centers;
    double c1_hat = 0.0;
    double c2_hat = 0.0;
    int pilot_excursions = 0;
};

struct CalibrationOptions {
    double delta = 0.1;
    double eps = 0.1;
    int min_excursions = 100;
};

/// Pooled OLS drift fit of the pair norm process y = ||u||_p^p + ||v||_p^p
/// across pilot runs; returns (c1, c2) of dy <= (-c1 y + c2) dt. Throws when
/// the fit degenerates or comes out non-contractive.
std::pair<double, double> pair_drift_fit(const std::vector<PairTrajectory>& pilots, int p);

/// Fits the Lp drift on the pooled pilot pair-norm series, sets
/// R1 = (2 c2/c1 + 1)^(1/p), R2 = 2 R1, picks R3 from a ladder so the
/// empirical escape probability from the middle set within 2*delta is
/// <= eps, and takes the L-inf radii from pilot quantiles (75%, 99%).
CalibrationResult calibrate_centers(const std::vector<PairTrajectory>& pilots,
                                    const FluxModel& model, int p,
                                    CalibrationOptions opts = {});

/// Grid-time stopping times: tau_0 = 0; sigma_i = tau_i when the state is
/// already in the middle set, else the first return to the inner set;
/// tau_{i+1} caps at sigma_i + 1. The final incomplete excursion is flagged
/// and never counted.
ExcursionRecord classify_excursions(const PairTrajectory& pair, const CenterSets& centers);

/// Per-excursion contraction credit -log(1 - bound(min(T_inf, 1), B_sup)).
/// Requires T_inf > 0.
double c_of(double T_inf, double B_sup, const GirsanovBound& bound);

struct CenterTimeRate {
    int X_t = 0;
    double L_t = 0.0;
    double eta_hat = 0.0;
    std::vector<std::pair<double, double>> eta_trace;  // (t, L_t/t) checkpoints
};

CenterTimeRate center_time_rate(const ExcursionRecord& record, double B_sup,
                                double horizon, const GirsanovBound& bound);

struct MomentBin {
    double norm_pow_lo = 0.0, norm_pow_hi = 0.0;
    int count = 0;
    double mean_exp_kappa_S = 0.0;
    double mean_norm_pow = 0.0;
    double ratio = 0.0;  // mean e^{kappa S} / (1 + mean norm^p)
};

struct MomentAudit {
    enum class Status { pass, fail, insufficient_data };
    Status status = Status::insufficient_data;
    double ratio_max_over_min = 0.0;
    double kappa = 0.0;
    std::vector<MomentBin> bins;
};

/// Pools excursions across seeds, bins them by starting pair norm, and
/// checks that mean e^{kappa S} scales with 1 + norm^p across bins
/// (max/min ratio <= 10). Requires kappa <= c1_hat / 2.
MomentAudit moment_audit(const std::vector<ExcursionRecord>& records,
                         const CenterSets& centers, double kappa, double c1_hat);

} // namespace synclaw
