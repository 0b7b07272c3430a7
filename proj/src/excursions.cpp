#include "synclaw/excursions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace synclaw {

void CenterSets::validate() const {
    if (p < 2 || p % 2 != 0)
        throw std::invalid_argument("center sets: p must be an even integer >= 2");
    if (!(R1 > 0.0)) throw std::invalid_argument("center sets: require R1 > 0");
    if (!(R1 < R2)) throw std::invalid_argument("center sets: require R1 < R2");
    if (!(R2 < R3)) throw std::invalid_argument("center sets: require R2 < R3");
    if (!(Rbar1 > 0.0)) throw std::invalid_argument("center sets: require Rbar1 > 0");
    if (!(Rbar1 < Rbar2)) throw std::invalid_argument("center sets: require Rbar1 < Rbar2");
}

namespace {

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("quantile of empty sample");
    std::sort(values.begin(), values.end());
    const double pos = q * (values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(values.size() - 1, lo + 1);
    const double w = pos - lo;
    return values[lo] * (1.0 - w) + values[hi] * w;
}

} // namespace

std::pair<double, double> pair_drift_fit(const std::vector<PairTrajectory>& pilots, int p) {
    if (pilots.empty()) throw std::invalid_argument("pair_drift_fit: no pilot runs");
    double sum_x = 0.0, sum_r = 0.0, sum_xx = 0.0, sum_xr = 0.0;
    std::size_t m = 0;
    for (const auto& pilot : pilots) {
        if (pilot.norm_p != p)
            throw std::invalid_argument("pair_drift_fit: pilot recorded a different p");
        for (std::size_t k = 0; k + 1 < pilot.times.size(); ++k) {
            const double y = pilot.u_lp_pow[k] + pilot.v_lp_pow[k];
            const double y1 = pilot.u_lp_pow[k + 1] + pilot.v_lp_pow[k + 1];
            const double r = (y1 - y) / (pilot.times[k + 1] - pilot.times[k]);
            sum_x += y;
            sum_r += r;
            sum_xx += y * y;
            sum_xr += y * r;
            ++m;
        }
    }
    if (m < 10) throw std::invalid_argument("pair_drift_fit: pilot series too short");
    const double denom = m * sum_xx - sum_x * sum_x;
    if (std::abs(denom) <= 1e-14 * static_cast<double>(m) * static_cast<double>(m))
        throw std::invalid_argument("pair_drift_fit: degenerate pilot norm series");
    const double slope = (m * sum_xr - sum_x * sum_r) / denom;
    const double intercept = (sum_r - slope * sum_x) / m;
    const double c1 = -slope;
    if (!(c1 > 0.0))
        throw std::runtime_error("pair_drift_fit: pilot drift fit is not contractive (c1 <= 0)");
    return {c1, std::max(0.0, intercept)};
}

CalibrationResult calibrate_centers(const std::vector<PairTrajectory>& pilots,
                                    const FluxModel& model, int p,
                                    CalibrationOptions opts) {
    if (model.growth_exponent() == kPInf)
        throw std::invalid_argument("calibrate_centers: finite growth exponent required");
    if (pilots.empty()) throw std::invalid_argument("calibrate_centers: no pilot runs");
    if (p < 2 || p % 2 != 0)
        throw std::invalid_argument("calibrate_centers: p must be an even integer >= 2");

    CalibrationResult result;
    const auto drift = pair_drift_fit(pilots, p);
    result.c1_hat = drift.first;
    result.c2_hat = drift.second;

    CenterSets c;
    c.p = p;
    c.R1 = std::pow(2.0 * result.c2_hat / result.c1_hat + 1.0, 1.0 / p);
    c.R2 = 2.0 * c.R1;

    // escape ladder for R3: empirical probability of leaving the candidate
    // shell within 2*delta of a middle-set visit must be <= eps
    const double dt = pilots.front().dt;
    const int stride = std::max(1, static_cast<int>(std::llround(opts.delta / dt)));
    const int look = std::max(1, static_cast<int>(std::llround(2.0 * opts.delta / dt)));
    const double ladder[] = {1.25, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0};
    bool found = false;
    for (double factor : ladder) {
        const double candidate = factor * c.R2;
        long samples = 0, escapes = 0;
        for (const auto& pilot : pilots) {
            const std::size_t n = pilot.times.size();
            for (std::size_t k = 0; k + 1 < n; k += static_cast<std::size_t>(stride)) {
                const double norm_pow = pilot.u_lp_pow[k] + pilot.v_lp_pow[k];
                if (std::pow(norm_pow, 1.0 / p) > c.R2) continue;
                ++samples;
                const std::size_t end = std::min(n, k + static_cast<std::size_t>(look) + 1);
                for (std::size_t k2 = k + 1; k2 < end; ++k2) {
                    if (std::pow(pilot.u_lp_pow[k2] + pilot.v_lp_pow[k2], 1.0 / p) > candidate) {
                        ++escapes;
                        break;
                    }
                }
            }
        }
        if (samples > 0 && static_cast<double>(escapes) / samples <= opts.eps) {
            c.R3 = candidate;
            found = true;
            break;
        }
    }
    if (!found)
        throw std::runtime_error("calibrate_centers: no ladder radius meets the escape target");

    std::vector<double> inf_samples;
    for (const auto& pilot : pilots)
        inf_samples.insert(inf_samples.end(), pilot.sup_norms.begin(), pilot.sup_norms.end());
    c.Rbar1 = quantile(inf_samples, 0.75);
    c.Rbar2 = quantile(inf_samples, 0.99);
    if (!(c.Rbar1 > 0.0) || !(c.Rbar1 < c.Rbar2))
        throw std::runtime_error("calibrate_centers: degenerate L-infinity pilot quantiles");
    c.validate();

    result.centers = c;
    for (const auto& pilot : pilots) {
        const ExcursionRecord rec = classify_excursions(pilot, c);
        result.pilot_excursions += static_cast<int>(rec.rows.size());
    }
    if (result.pilot_excursions < opts.min_excursions)
        throw std::runtime_error("calibrate_centers: pilot too short, only " +
                                 std::to_string(result.pilot_excursions) + " excursions");
    return result;
}

ExcursionRecord classify_excursions(const PairTrajectory& pair, const CenterSets& centers) {
    centers.validate();
    ExcursionRecord record;
    record.dt = pair.dt;
    record.horizon = pair.times.back();
    const std::size_t n = pair.times.size();
    if (n < 2) {
        record.truncated_tail = true;
        return record;
    }
    auto m_p = [&](std::size_t k) { return pair.pair_lp(k); };
    auto m_inf = [&](std::size_t k) { return pair.sup_norms[k]; };
    auto grid_index_at_or_after = [&](double t) {
        return static_cast<std::size_t>(std::max<long long>(0, std::llround(std::ceil(t / pair.dt - 1e-9))));
    };

    std::size_t k_tau = 0;
    while (true) {
        // sigma: immediate when already in the middle set, else first return
        // to the inner set
        std::size_t k_sigma = k_tau;
        if (m_p(k_tau) > centers.R2) {
            bool found = false;
            for (std::size_t k = k_tau; k < n; ++k) {
                if (m_p(k) <= centers.R1) {
                    k_sigma = k;
                    found = true;
                    break;
                }
            }
            if (!found) {
                record.truncated_tail = true;
                break;
            }
        }
        // tau_next: exit from the outer shell, capped at sigma + 1
        const std::size_t k_cap = grid_index_at_or_after(pair.times[k_sigma] + 1.0);
        std::size_t k_next = std::min(k_cap, n - 1);
        bool capped_within = k_cap <= n - 1;
        bool exited = false;
        for (std::size_t k = k_sigma; k <= std::min(k_cap, n - 1); ++k) {
            if (m_p(k) > centers.R3) {
                k_next = k;
                exited = true;
                break;
            }
        }
        if (!exited && !capped_within) {
            record.truncated_tail = true;
            break;
        }

        // L-infinity window inside [sigma, tau_next]
        std::size_t k_in = k_next;
        for (std::size_t k = k_sigma; k <= k_next; ++k) {
            if (m_inf(k) <= centers.Rbar1) {
                k_in = k;
                break;
            }
        }
        std::size_t k_out = k_next;
        for (std::size_t k = k_in; k <= k_next; ++k) {
            if (m_inf(k) > centers.Rbar2) {
                k_out = k;
                break;
            }
        }

        ExcursionRow row;
        row.tau = pair.times[k_tau];
        row.sigma = pair.times[k_sigma];
        row.tau_next = pair.times[k_next];
        row.tau_in = pair.times[k_in];
        row.tau_out = pair.times[k_out];
        row.S = row.sigma - row.tau;
        row.T = row.tau_next - row.sigma;
        row.T_inf = row.tau_out - row.tau_in;
        row.start_norm_pow = pair.u_lp_pow[k_tau] + pair.v_lp_pow[k_tau];
        row.m_inf_window_sup = 0.0;
        for (std::size_t k = k_in; k <= k_out; ++k)
            row.m_inf_window_sup = std::max(row.m_inf_window_sup, m_inf(k));
        record.rows.push_back(row);

        if (k_next >= n - 1) break;  // horizon reached exactly at a boundary
        k_tau = k_next;
    }
    return record;
}

double c_of(double T_inf, double B_sup, const GirsanovBound& bound) {
    if (!(T_inf > 0.0)) throw std::invalid_argument("c_of: T_inf must be positive");
    const double h = std::min(T_inf, 1.0);
    const double v = bound.value(h, B_sup);
    return -std::log1p(-v);
}

CenterTimeRate center_time_rate(const ExcursionRecord& record, double B_sup,
                                double horizon, const GirsanovBound& bound) {
    CenterTimeRate out;
    if (record.rows.empty() || !(horizon > 0.0)) return out;
    double cum_s = 0.0;
    for (const auto& row : record.rows) {
        cum_s += row.S;
        if (cum_s > horizon + 1e-12) break;
        ++out.X_t;
        if (row.T_inf > 0.0) out.L_t += c_of(row.T_inf, B_sup, bound);
    }
    out.eta_hat = out.L_t / horizon;

    // trailing trend: credit accumulated by wall-clock completion time
    const int n_check = 10;
    for (int j = 1; j <= n_check; ++j) {
        const double t = horizon * j / n_check;
        double credit = 0.0;
        for (const auto& row : record.rows) {
            if (row.tau_next > t + 1e-12) break;
            if (row.T_inf > 0.0) credit += c_of(row.T_inf, B_sup, bound);
        }
        out.eta_trace.emplace_back(t, credit / t);
    }
    return out;
}

MomentAudit moment_audit(const std::vector<ExcursionRecord>& records,
                         const CenterSets& centers, double kappa, double c1_hat) {
    if (!(kappa > 0.0) || kappa > 0.5 * c1_hat + 1e-15)
        throw std::invalid_argument("moment_audit: require 0 < kappa <= c1_hat / 2");
    centers.validate();
    std::vector<std::pair<double, double>> samples;  // (start norm^p, S)
    for (const auto& rec : records)
        for (const auto& row : rec.rows) samples.emplace_back(row.start_norm_pow, row.S);

    MomentAudit audit;
    audit.kappa = kappa;
    if (samples.size() < 30) {
        audit.status = MomentAudit::Status::insufficient_data;
        return audit;
    }
    std::sort(samples.begin(), samples.end());
    const int n_bins = std::max(1, std::min(4, static_cast<int>(samples.size() / 30)));
    const std::size_t per_bin = samples.size() / static_cast<std::size_t>(n_bins);

    double ratio_min = kPInf, ratio_max = 0.0;
    for (int b = 0; b < n_bins; ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * per_bin;
        const std::size_t hi = (b == n_bins - 1) ? samples.size() : lo + per_bin;
        MomentBin bin;
        bin.count = static_cast<int>(hi - lo);
        bin.norm_pow_lo = samples[lo].first;
        bin.norm_pow_hi = samples[hi - 1].first;
        for (std::size_t i = lo; i < hi; ++i) {
            bin.mean_exp_kappa_S += std::exp(kappa * samples[i].second);
            bin.mean_norm_pow += samples[i].first;
        }
        bin.mean_exp_kappa_S /= bin.count;
        bin.mean_norm_pow /= bin.count;
        bin.ratio = bin.mean_exp_kappa_S / (1.0 + bin.mean_norm_pow);
        ratio_min = std::min(ratio_min, bin.ratio);
        ratio_max = std::max(ratio_max, bin.ratio);
        audit.bins.push_back(bin);
    }
    audit.ratio_max_over_min = ratio_max / ratio_min;
    audit.status = audit.ratio_max_over_min <= 10.0 ? MomentAudit::Status::pass
                                                    : MomentAudit::Status::fail;
    return audit;
}

} // namespace synclaw
