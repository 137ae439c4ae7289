// Copyright 2026 The Driftlock Authors
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

#include "driftlock/cli/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>

#include "driftlock/csv.hpp"
#include "driftlock/errors.hpp"
#include "driftlock/feedback/feedback_loop.hpp"
#include "driftlock/fft.hpp"
#include "driftlock/markovianity/markovianity.hpp"
#include "driftlock/noise/noise_models.hpp"
#include "driftlock/noise/trace_io.hpp"
#include "driftlock/qubit/qubit_sim.hpp"
#include "driftlock/rng.hpp"
#include "driftlock/spectra/decoherence.hpp"
#include "driftlock/spectra/diffusion.hpp"
#include "driftlock/spectra/gaussian_fit.hpp"
#include "driftlock/spectra/psd.hpp"

#ifndef DRIFTLOCK_VERSION
#define DRIFTLOCK_VERSION "unknown"
#endif

namespace driftlock::cli {

namespace {

using json = nlohmann::ordered_json;
using Runner = std::function<void(ScenarioOutput &)>;

// ---------------------------------------------------------------- helpers

json nullable(const std::optional<double> &v) { return v ? json(*v) : json(nullptr); }

double sample_variance(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double s = 0.0;
    for (double v : x) s += (v - mean) * (v - mean);
    return s / static_cast<double>(x.size() - 1);
}

std::vector<double> column_values(const CsvTable &table, const std::string &column, const std::string &source) {
    const size_t c = table.column(column);
    std::vector<double> out;
    out.reserve(table.rows.size());
    for (size_t i = 0; i < table.rows.size(); ++i) {
        out.push_back(parse_number(table.rows[i][c], source + ":" + std::to_string(table.line_numbers[i])));
    }
    return out;
}

json fit_json(const spectra::GaussianDecayFit &fit) {
    return json{{"t2_star_s", fit.t2_star},   {"frequency_hz", fit.frequency}, {"visibility", fit.visibility},
                {"offset", fit.offset},       {"phase_rad", fit.phase},        {"rms_residual", fit.rms_residual}};
}

json powerlaw_fit_json(const spectra::PowerLawFit &fit) {
    return json{{"amplitude_A_hz2_per_hz", fit.amplitude_A}, {"exponent_beta", fit.exponent_beta},
                {"band_lo_hz", fit.band_lo},                {"band_hi_hz", fit.band_hi},
                {"log10_rms_residual", fit.residual},       {"n_bins", fit.n_bins}};
}

// ---------------------------------------------------------------- shared blocks

noise::PowerLawSpec read_powerlaw(Config &cfg, const std::string &prefix, Dimension amplitude_dim) {
    noise::PowerLawSpec s;
    s.amplitude_A = cfg.quantity(prefix + ".amplitude_A", amplitude_dim, std::nullopt, Range::non_negative());
    s.exponent_beta = cfg.number(prefix + ".exponent_beta", std::nullopt, Range::closed(0.0, 3.0));
    s.f_low = cfg.quantity(prefix + ".f_low", Dimension::frequency, 1.0 / 300.0, Range::positive());
    s.f_high = cfg.quantity(prefix + ".f_high", Dimension::frequency, 1e5, Range::positive());
    s.validate();
    return s;
}

struct NoiseSetup {
    noise::PowerLawSpec spec;
    bool position = false;
    noise::TransductionSpec transduction;
    double dt = 200e-6;
    double quasi_static_sigma = 0.0;  // spec units (Hz or nm)
    std::optional<noise::BackactionSource> backaction;
    noise::BackactionModel model;
    double epsilon_mV = 0.0;

    double scale() const { return position ? transduction.hz_per_nm() : 1.0; }

    // Variance of the charge-noise part in Hz^2 over the synthesis band.
    double expected_variance(double duration) const {
        const noise::SynthesisBand band = noise::synthesis_band(spec, duration, dt);
        const double s = scale();
        return (noise::band_power(spec, band.lo, band.hi) + quasi_static_sigma * quasi_static_sigma) * s * s;
    }

    noise::NoiseStack build(double duration, std::uint64_t seed) const {
        noise::NoiseStack stack;
        noise::NoiseTrace base = noise::synthesize_powerlaw(spec, duration, dt, derive_seed(seed, "noise.powerlaw"),
                                                            {quasi_static_sigma});
        stack.base = position ? noise::transduce(base, transduction) : std::move(base);
        if (backaction) {
            stack.backaction = noise::synthesize_backaction(*backaction, duration, dt, derive_seed(seed, "noise.backaction"));
        }
        stack.model = model;
        return stack;
    }
};

NoiseSetup read_noise(Config &cfg, double default_dt, double default_epsilon) {
    NoiseSetup ns;
    ns.position = cfg.choice("noise.domain", {"frequency", "position"}, "frequency") == "position";
    const Dimension amp = ns.position ? Dimension::length_psd : Dimension::frequency_psd;
    ns.spec = read_powerlaw(cfg, "noise", amp);
    ns.dt = cfg.quantity("noise.dt", Dimension::time, default_dt, Range::positive());
    ns.quasi_static_sigma = cfg.quantity("noise.quasi_static_sigma", ns.position ? Dimension::length : Dimension::frequency,
                                         0.0, Range::non_negative());
    if (ns.position) {
        ns.transduction.gradient =
            cfg.quantity("transduction.gradient", Dimension::field_gradient, 0.184, Range::non_negative());
        ns.transduction.gyromagnetic_ratio =
            cfg.quantity("transduction.gyromagnetic_ratio", Dimension::gyromagnetic, 28.025, Range::positive());
        ns.transduction.validate();
    }
    if (cfg.boolean("backaction.enabled", false)) {
        noise::BackactionSource src;
        src.telegraph.amplitude =
            cfg.quantity("backaction.telegraph_amplitude", Dimension::frequency, std::nullopt, Range::non_negative());
        src.telegraph.switching_rate =
            cfg.quantity("backaction.switching_rate", Dimension::frequency, std::nullopt, Range::positive());
        src.white_sigma = cfg.quantity("backaction.white_sigma", Dimension::frequency, 0.0, Range::non_negative());
        src.telegraph.validate();
        ns.backaction = src;
        ns.model.peak_gain = cfg.number("backaction.peak_gain", 1.0, Range::non_negative());
        ns.model.period_mV = cfg.quantity("backaction.period", Dimension::voltage, 12.0, Range::positive());
        ns.model.phase_mV = cfg.quantity("backaction.phase", Dimension::voltage, 0.0);
        ns.model.validate();
    }
    ns.epsilon_mV = cfg.quantity("sensor.epsilon", Dimension::voltage, default_epsilon);
    return ns;
}

qubit::QubitParams read_qubit(Config &cfg) {
    qubit::QubitParams q;
    q.rabi_frequency = cfg.quantity("qubit.rabi_frequency", Dimension::frequency, q.rabi_frequency, Range::positive());
    q.t2_rabi = cfg.quantity("qubit.t2_rabi", Dimension::time, q.t2_rabi, Range::positive());
    q.alpha = cfg.number("qubit.alpha", q.alpha, Range::closed(-1.0, 1.0));
    q.beta_vis = cfg.number("qubit.beta_vis", q.beta_vis, Range::closed(0.0, 1.0));
    q.theta = cfg.quantity("qubit.theta", Dimension::angle, q.theta);
    q.readout_fidelity_down = cfg.number("qubit.readout_fidelity_down", 1.0, Range::closed(0.5, 1.0));
    q.readout_fidelity_up = cfg.number("qubit.readout_fidelity_up", 1.0, Range::closed(0.5, 1.0));
    if (auto t = cfg.optional_quantity("qubit.extra_dephasing_time", Dimension::time, Range::positive())) {
        q.extra_dephasing_time = *t;
    }
    q.validate();
    return q;
}

qubit::ShotTiming read_timing(Config &cfg) {
    qubit::ShotTiming t;
    t.manipulation_and_wait =
        cfg.quantity("timing.manipulation_and_wait", Dimension::time, t.manipulation_and_wait, Range::non_negative());
    t.readout = cfg.quantity("timing.readout", Dimension::time, t.readout, Range::non_negative());
    t.calculation = cfg.quantity("timing.calculation", Dimension::time, t.calculation, Range::non_negative());
    t.validate();
    return t;
}

size_t count(Config &cfg, const std::string &key, std::int64_t fallback) {
    return static_cast<size_t>(cfg.integer(key, fallback, 1));
}

// ---------------------------------------------------------------- synthesize-noise

Runner prepare_synthesize(Config &cfg, std::uint64_t seed) {
    const NoiseSetup ns = read_noise(cfg, 1e-3, 0.0);
    const double duration = cfg.quantity("noise.duration", Dimension::time, std::nullopt, Range::positive());
    const bool want_csv = cfg.boolean("output.csv", true);
    const bool want_json = cfg.boolean("output.json", true);
    return [=](ScenarioOutput &out) {
        const noise::NoiseStack stack = ns.build(duration, seed);
        const noise::NoiseTrace trace = stack.effective(ns.epsilon_mV);
        if (want_csv) out.add("noise_trace.csv", noise::trace_to_csv(trace));
        if (want_json) out.add("noise_trace.json", noise::trace_to_json(trace));
        const noise::SynthesisBand band = noise::synthesis_band(ns.spec, duration, ns.dt);
        const double var = sample_variance(trace.samples);
        out.summary = json{{"samples", trace.samples.size()},
                           {"dt_s", trace.dt},
                           {"duration_s", trace.duration()},
                           {"synthesis_band_lo_hz", band.lo},
                           {"synthesis_band_hi_hz", band.hi},
                           {"expected_variance_hz2", ns.expected_variance(duration)},
                           {"sample_variance_hz2", var},
                           {"sample_std_hz", std::sqrt(var)},
                           {"backaction_gain", ns.backaction ? noise::backaction_gain(ns.epsilon_mV, ns.model) : 0.0},
                           {"descriptor", trace.descriptor}};
    };
}

// ---------------------------------------------------------------- repeated-ramsey

// Magnitude spectrum of one row of single-shot outcomes (0/1, mean removed).
std::vector<double> row_spectrum(const qubit::RamseyMap &map, size_t r, size_t pad) {
    std::vector<double> x(map.cols * pad, 0.0);
    double mean = 0.0;
    for (size_t c = 0; c < map.cols; ++c) mean += map.outcome(r, c) > 0 ? 1.0 : 0.0;
    mean /= static_cast<double>(map.cols);
    for (size_t c = 0; c < map.cols; ++c) x[c] = (map.outcome(r, c) > 0 ? 1.0 : 0.0) - mean;
    const auto X = fft::forward_real(x);
    std::vector<double> mag(X.size());
    for (size_t k = 0; k < X.size(); ++k) mag[k] = 2.0 * std::abs(X[k]) / static_cast<double>(map.cols);
    return mag;
}

void emit_row_fft(const qubit::RamseyMap &map, double t_step, ScenarioOutput &out) {
    const size_t nk = map.cols / 2 + 1;
    const double df = 1.0 / (static_cast<double>(map.cols) * t_step);
    std::vector<std::string> header{"row_time_s/frequency_hz"};
    for (size_t k = 0; k < nk; ++k) header.push_back(format_double(static_cast<double>(k) * df));
    std::vector<std::string_view> hv(header.begin(), header.end());
    CsvWriter fft_csv(hv);

    constexpr size_t kPad = 16;
    const double fine_df = df / static_cast<double>(kPad);
    CsvWriter peak_csv({"row_time_s", "peak_frequency_hz"});
    std::vector<double> row(nk + 1);
    for (size_t r = 0; r < map.rows; ++r) {
        const std::vector<double> coarse = row_spectrum(map, r, 1);
        row[0] = map.row_times[r];
        std::copy(coarse.begin(), coarse.begin() + static_cast<std::ptrdiff_t>(nk), row.begin() + 1);
        fft_csv.row(row);
        const std::vector<double> fine = row_spectrum(map, r, kPad);
        const auto it = std::max_element(fine.begin() + 1, fine.end());
        peak_csv.row({map.row_times[r], static_cast<double>(it - fine.begin()) * fine_df});
    }
    out.add("ramsey_row_fft.csv", fft_csv.text());
    out.add("ramsey_row_frequency.csv", peak_csv.text());
}

Runner prepare_repeated_ramsey(Config &cfg, std::uint64_t seed) {
    const NoiseSetup ns = read_noise(cfg, 200e-6, 0.0);
    const qubit::QubitParams qp = read_qubit(cfg);
    const qubit::ShotTiming timing = read_timing(cfg);
    const size_t reps = count(cfg, "ramsey.repetitions", 1000);
    const double t_step = cfg.quantity("ramsey.t_step", Dimension::time, 40e-9, Range::positive());
    const double t_max = cfg.quantity("ramsey.t_max", Dimension::time, 4e-6, Range::positive());
    qubit::RamseyMapOptions opts;
    opts.mw_detuning = cfg.quantity("ramsey.mw_detuning", Dimension::frequency, 2e6);
    opts.row_period = cfg.quantity("ramsey.row_period", Dimension::time, 0.0, Range::non_negative());
    const size_t ensemble = count(cfg, "ramsey.ensemble", 1);
    const bool shot_log = cfg.boolean("output.shot_log", false);

    const size_t cols = static_cast<size_t>(std::floor(t_max / t_step + 1e-9));
    if (cols < 8) throw ConfigError("field 'ramsey.t_max': need at least 8 evolution times (t_max / t_step >= 8)");
    const double row_span = static_cast<double>(cols) * timing.shot_period();
    if (opts.row_period > 0 && opts.row_period < row_span) {
        throw ConfigError("field 'ramsey.row_period': shorter than one row of shots (" + format_double(row_span) + " s)");
    }
    const double row_eff = opts.row_period > 0 ? opts.row_period : row_span;
    const double duration = static_cast<double>(reps) * row_eff + timing.shot_period();

    return [=](ScenarioOutput &out) {
        std::vector<double> mean_p(cols, 0.0), mean_down(cols, 0.0);
        std::vector<double> times;
        for (size_t m = 0; m < ensemble; ++m) {
            const std::uint64_t member = derive_seed(seed, "ramsey.member." + std::to_string(m));
            const noise::NoiseTrace trace = ns.build(duration, member).effective(ns.epsilon_mV);
            const qubit::RamseyMap map = qubit::simulate_repeated_ramsey(trace, qp, timing, t_max, t_step, reps,
                                                                         derive_seed(member, "ramsey.shots"), opts);
            const auto p = map.mean_probability();
            const auto d = map.mean_down_fraction();
            for (size_t c = 0; c < cols; ++c) {
                mean_p[c] += p[c] / static_cast<double>(ensemble);
                mean_down[c] += d[c] / static_cast<double>(ensemble);
            }
            if (m == 0) {
                times = map.evolution_times;
                out.add("ramsey_map.csv", qubit::ramsey_map_csv(map));
                if (shot_log) out.add("ramsey_shots.csv", qubit::ramsey_shot_log_csv(map));
                emit_row_fft(map, t_step, out);
            }
        }

        std::optional<spectra::GaussianDecayFit> fit;
        std::string fit_error;
        try {
            fit = spectra::fit_gaussian_decay(times, mean_down);
        } catch (const spectra::FitError &e) {
            fit_error = e.what();
        }
        CsvWriter curve({"t_evolution_s", "mean_probability_down", "down_fraction", "fit_probability_down"});
        for (size_t c = 0; c < cols; ++c) {
            const std::string fitted = fit ? format_double(fit->evaluate(times[c])) : "nan";
            curve.raw_row(std::vector<std::string>{format_double(times[c]), format_double(mean_p[c]),
                                                   format_double(mean_down[c]), fitted});
        }
        out.add("ramsey_mean.csv", curve.text());

        const double sigma = std::sqrt(ns.expected_variance(duration));
        const double predicted = sigma > 0 ? spectra::t2_from_sigma(sigma) : 0.0;
        const noise::SynthesisBand band = noise::synthesis_band(ns.spec, duration, ns.dt);
        out.summary = json{{"rows", reps},
                           {"cols", cols},
                           {"ensemble", ensemble},
                           {"row_period_s", row_eff},
                           {"row_rate_hz", 1.0 / row_eff},
                           {"mw_detuning_hz", opts.mw_detuning},
                           {"synthesis_band_lo_hz", band.lo},
                           {"synthesis_band_hi_hz", band.hi},
                           {"predicted_sigma_static_hz", sigma},
                           {"predicted_t2_star_s", predicted > 0 ? json(predicted) : json(nullptr)},
                           {"fit", fit ? fit_json(*fit) : json(nullptr)}};
        if (fit && predicted > 0) out.summary["fit_over_predicted_t2_star"] = fit->t2_star / predicted;
        if (!fit) out.summary["fit_error"] = fit_error;
    };
}

// ---------------------------------------------------------------- rabi-chevron

Runner prepare_chevron(Config &cfg, std::uint64_t seed) {
    const NoiseSetup ns = read_noise(cfg, 200e-6, 0.0);
    const qubit::QubitParams qp = read_qubit(cfg);
    const qubit::ShotTiming timing = read_timing(cfg);
    const double span = cfg.quantity("chevron.detuning_span", Dimension::frequency, 10e6, Range::positive());
    const double t_max = cfg.quantity("chevron.t_max", Dimension::time, 1e-6, Range::positive());
    qubit::ChevronResolution res;
    res.detunings = count(cfg, "chevron.n_detuning", 41);
    res.times = count(cfg, "chevron.n_time", 41);
    qubit::ChevronOptions opts;
    opts.averages = count(cfg, "chevron.averages", 20);
    const double duration =
        static_cast<double>(res.detunings * res.times * opts.averages + 1) * timing.shot_period();

    return [=](ScenarioOutput &out) {
        const noise::NoiseTrace trace = ns.build(duration, seed).effective(ns.epsilon_mV);
        qubit::ChevronMap map = qubit::simulate_rabi_chevron(trace, qp, timing, span, t_max, res,
                                                             derive_seed(seed, "chevron.shots"), opts);
        out.add("chevron.csv", qubit::chevron_csv(map));
        qubit::ChevronMap sampled = map;
        sampled.p_up = map.up_fraction;
        out.add("chevron_up_fraction.csv", qubit::chevron_csv(sampled));

        const size_t mid = res.detunings / 2;
        double lo = 1.0, hi = 0.0, mean = 0.0;
        for (size_t j = 0; j < res.times; ++j) {
            lo = std::min(lo, map.at(mid, j));
            hi = std::max(hi, map.at(mid, j));
        }
        for (double v : map.p_up) mean += v / static_cast<double>(map.p_up.size());
        out.summary = json{{"detunings", res.detunings},
                           {"times", res.times},
                           {"averages", opts.averages},
                           {"epsilon_mv", ns.epsilon_mV},
                           {"backaction_gain", ns.backaction ? noise::backaction_gain(ns.epsilon_mV, ns.model) : 0.0},
                           {"center_detuning_hz", map.detunings[mid]},
                           {"center_contrast", hi - lo},
                           {"mean_p_up", mean}};
    };
}

// ---------------------------------------------------------------- feedback-run

struct ModeStats {
    std::vector<double> residual;  // f_est - f_target, Hz
    double std = 0.0;
    double mean = 0.0;
    size_t degenerate = 0;
};

ModeStats residual_stats(const feedback::ExperimentResult &r, double f_target) {
    ModeStats s;
    for (const auto &c : r.cycles) {
        s.residual.push_back(c.f_est - f_target);
        if (c.degenerate) ++s.degenerate;
    }
    for (double v : s.residual) s.mean += v / static_cast<double>(s.residual.size());
    s.std = std::sqrt(sample_variance(s.residual));
    return s;
}

Runner prepare_feedback(Config &cfg, std::uint64_t seed) {
    const NoiseSetup ns = read_noise(cfg, 200e-6, -6.0);
    const qubit::QubitParams qp = read_qubit(cfg);
    feedback::FeedbackConfig fc;
    fc.timing = read_timing(cfg);
    const std::string mode = cfg.choice("feedback.mode", {"both", "closed", "open"}, "both");
    fc.n_shots = count(cfg, "feedback.n_shots", 100);
    fc.t_step = cfg.quantity("feedback.t_step", Dimension::time, 40e-9, Range::positive());
    fc.t_max = cfg.optional_quantity("feedback.t_max", Dimension::time, Range::positive()).value_or(0.0);
    fc.f_target = cfg.quantity("feedback.f_target", Dimension::frequency, 2e6);
    fc.n_cycles = count(cfg, "feedback.n_cycles", 5000);
    fc.cycle_period = cfg.optional_quantity("feedback.cycle_period", Dimension::time, Range::positive()).value_or(0.0);
    fc.prior_sigma = cfg.quantity("feedback.prior_sigma", Dimension::frequency, 50e3, Range::positive());
    fc.grid.f_min = cfg.quantity("grid.f_min", Dimension::frequency, 0.0);
    fc.grid.f_max = cfg.quantity("grid.f_max", Dimension::frequency, 12.5e6);
    fc.grid.n_bins = count(cfg, "grid.n_bins", 2500);
    fc.likelihood.alpha = cfg.number("estimator.alpha", 0.0, Range::closed(-1.0, 1.0));
    fc.likelihood.beta_vis = cfg.number("estimator.beta_vis", 1.0, Range::closed(0.0, 1.0));
    fc.likelihood.theta = cfg.quantity("estimator.theta", Dimension::angle, 0.0);
    fc.operation.shots_per_cycle = static_cast<size_t>(cfg.integer("operation.shots_per_cycle", 0, 0));
    fc.operation.n_points = count(cfg, "operation.n_points", 100);
    fc.operation.t_step = cfg.quantity("operation.t_step", Dimension::time, 40e-9, Range::positive());
    fc.operation.mw_offset = cfg.quantity("operation.mw_offset", Dimension::frequency, 0.0);
    const double band_hi = cfg.quantity("psd.band_hi", Dimension::frequency, 0.1, Range::positive());
    const bool shot_log = cfg.boolean("output.shot_log", false);
    fc.passive_epsilon_mV = ns.epsilon_mV;
    fc.validate();
    const double period = fc.cycle_period > 0 ? fc.cycle_period : fc.cycle_budget();
    const double duration = fc.start_time + static_cast<double>(fc.n_cycles + 1) * period;

    return [=](ScenarioOutput &out) {
        const noise::NoiseStack stack = ns.build(duration, seed);
        const std::uint64_t shot_seed = derive_seed(seed, "feedback.shots");
        std::vector<std::pair<std::string, feedback::Mode>> modes;
        if (mode != "open") modes.emplace_back("closed", feedback::Mode::closed);
        if (mode != "closed") modes.emplace_back("open", feedback::Mode::open);

        out.summary = json{{"cycles", fc.n_cycles},
                           {"cycle_period_s", period},
                           {"probe_duration_s", fc.probe_duration()},
                           {"f_target_hz", fc.f_target},
                           {"epsilon_mv", ns.epsilon_mV},
                           {"crb_hz", feedback::probe_crb(fc)}};
        const double floor_psd = 2.0 * std::pow(feedback::probe_crb(fc), 2) * period;
        out.summary["estimation_floor_psd_hz2_per_hz"] = floor_psd;

        std::map<std::string, spectra::PsdEstimate> psds;
        std::map<std::string, ModeStats> stats;
        for (const auto &[name, m] : modes) {
            feedback::FeedbackConfig run = fc;
            run.mode = m;
            const feedback::ExperimentResult r = feedback::run_experiment(run, stack, qp, shot_seed);
            out.add("cycles_" + name + ".csv", feedback::cycle_log_csv(r.cycles));
            ModeStats st = residual_stats(r, fc.f_target);
            const spectra::PsdEstimate psd = spectra::estimate_psd(st.residual, period);
            out.add("psd_" + name + ".csv", spectra::psd_csv(psd));

            json ms{{"residual_std_hz", st.std},
                    {"residual_mean_hz", st.mean},
                    {"degenerate_cycles", st.degenerate},
                    {"warnings", r.warnings.size()},
                    {"total_duration_s", r.total_duration}};
            const double f_nyq = 0.5 / period;
            try {
                ms["psd_fit"] = powerlaw_fit_json(spectra::fit_powerlaw(psd, 10.0 * psd.df(), 0.5 * f_nyq));
            } catch (const StatisticsError &e) {
                ms["psd_fit"] = nullptr;
                ms["psd_fit_error"] = e.what();
            }
            if (f_nyq > 1.0) ms["white_plateau_psd_hz2_per_hz"] = spectra::band_mean_power(psd, 1.0, f_nyq);
            if (fc.operation.shots_per_cycle > 0) {
                out.add("operation_" + name + ".csv", feedback::operation_curve_csv(r.operation));
                try {
                    ms["operation_fit"] =
                        fit_json(spectra::fit_gaussian_decay(r.operation.times, r.operation.mean_probability));
                } catch (const spectra::FitError &e) {
                    ms["operation_fit"] = nullptr;
                    ms["operation_fit_error"] = e.what();
                }
            }
            if (shot_log) {
                std::vector<qubit::ShotRecord> shots;
                for (const auto &c : r.cycles) shots.insert(shots.end(), c.shots.begin(), c.shots.end());
                out.add("shots_" + name + ".csv", qubit::shot_log_csv(shots));
            }
            out.summary[name] = ms;
            psds.emplace(name, psd);
            stats.emplace(name, std::move(st));
        }

        if (psds.size() == 2) {
            const auto &pc = psds.at("closed");
            const auto &po = psds.at("open");
            size_t bins = 0, halved = 0;
            for (size_t k = 1; k < pc.freqs.size(); ++k) {
                if (pc.freqs[k] >= band_hi) break;
                ++bins;
                if (pc.power[k] <= 0.5 * po.power[k]) ++halved;
            }
            const double open_sigma = stats.at("open").std;
            json cmp{{"open_sigma_static_hz", open_sigma},
                     {"closed_residual_std_hz", stats.at("closed").std},
                     {"std_ratio", open_sigma > 0 ? stats.at("closed").std / open_sigma : 0.0},
                     {"psd_band_hi_hz", band_hi},
                     {"psd_bins_below_band_hi", bins},
                     {"psd_bins_closed_le_half_open", halved},
                     {"psd_fraction_closed_le_half_open",
                      bins > 0 ? static_cast<double>(halved) / static_cast<double>(bins) : 0.0}};
            out.summary["comparison"] = cmp;
        }
    };
}

// ---------------------------------------------------------------- psd-analysis

Runner prepare_psd(Config &cfg, std::uint64_t seed) {
    const std::string source = cfg.choice("psd.source", {"synthesized", "csv"}, "synthesized");
    const std::string method_s = cfg.choice("psd.method", {"periodogram", "averaged-segments"}, "periodogram");
    const spectra::PsdMethod method =
        method_s == "periodogram" ? spectra::PsdMethod::periodogram : spectra::PsdMethod::averaged_segments;
    const size_t nseg = method == spectra::PsdMethod::periodogram ? 1 : count(cfg, "psd.n_segments", 8);
    const std::optional<double> fit_lo = cfg.optional_quantity("psd.fit_lo", Dimension::frequency, Range::positive());
    const std::optional<double> fit_hi = cfg.optional_quantity("psd.fit_hi", Dimension::frequency, Range::positive());

    std::function<std::vector<std::vector<double>>()> series;
    std::optional<NoiseSetup> ns;
    double dt = 0.0;
    size_t seeds = 1;
    if (source == "csv") {
        const std::filesystem::path input = cfg.path("psd.input");
        const std::string column = cfg.text("psd.column", "delta_f_hz");
        dt = cfg.quantity("psd.dt", Dimension::time, std::nullopt, Range::positive());
        series = [input, column]() {
            return std::vector<std::vector<double>>{column_values(read_csv(input), column, input.string())};
        };
    } else {
        ns = read_noise(cfg, 24e-3, 0.0);
        dt = ns->dt;
        const double duration = cfg.quantity("noise.duration", Dimension::time, std::nullopt, Range::positive());
        seeds = count(cfg, "psd.seeds", 1);
        const NoiseSetup setup = *ns;
        series = [setup, duration, seeds, seed]() {
            std::vector<std::vector<double>> all;
            for (size_t s = 0; s < seeds; ++s) {
                const std::uint64_t member = derive_seed(seed, "psd.member." + std::to_string(s));
                all.push_back(setup.build(duration, member).effective(setup.epsilon_mV).samples);
            }
            return all;
        };
    }

    return [=](ScenarioOutput &out) {
        const auto all = series();
        spectra::PsdEstimate avg;
        for (size_t s = 0; s < all.size(); ++s) {
            const spectra::PsdEstimate one = spectra::estimate_psd(all[s], dt, method, nseg);
            if (s == 0) {
                avg = one;
                std::fill(avg.power.begin(), avg.power.end(), 0.0);
            }
            for (size_t k = 0; k < one.power.size(); ++k) avg.power[k] += one.power[k] / static_cast<double>(all.size());
        }
        out.add("psd.csv", spectra::psd_csv(avg));
        const double lo = fit_lo.value_or(10.0 * avg.df());
        const double hi = fit_hi.value_or(0.25 / dt);
        const spectra::PowerLawFit fit = spectra::fit_powerlaw(avg, lo, hi);
        CsvWriter line({"f_hz", "fit_psd_hz2_per_hz"});
        for (size_t k = 1; k < avg.freqs.size(); ++k) {
            if (avg.freqs[k] >= lo && avg.freqs[k] <= hi) {
                line.row({avg.freqs[k], fit.amplitude_A * std::pow(avg.freqs[k], -fit.exponent_beta)});
            }
        }
        out.add("psd_fit.csv", line.text());
        out.summary = json{{"method", spectra::method_name(method)},
                           {"n_segments", nseg},
                           {"series", all.size()},
                           {"samples_per_series", all.front().size()},
                           {"dt_s", dt},
                           {"df_hz", avg.df()},
                           {"fit", powerlaw_fit_json(fit)}};
        if (ns) {
            const double s2 = ns->scale() * ns->scale();
            out.summary["injected"] = json{{"amplitude_A_hz2_per_hz", ns->spec.amplitude_A * s2},
                                           {"exponent_beta", ns->spec.exponent_beta}};
        }
    };
}

// ---------------------------------------------------------------- diffusion-analysis

Runner prepare_diffusion(Config &cfg, std::uint64_t seed) {
    const std::string source = cfg.choice("diffusion.source", {"synthesized", "csv"}, "synthesized");
    const double interval = cfg.quantity("diffusion.sample_interval", Dimension::time, 24e-3, Range::positive());
    std::function<std::vector<double>()> series;
    double span = 0.0;
    if (source == "csv") {
        const std::filesystem::path input = cfg.path("diffusion.input");
        const std::string column = cfg.text("diffusion.column", "f_est_hz");
        series = [input, column]() { return column_values(read_csv(input), column, input.string()); };
    } else {
        const NoiseSetup ns = read_noise(cfg, interval, 0.0);
        const double duration = cfg.quantity("noise.duration", Dimension::time, std::nullopt, Range::positive());
        const double ratio = interval / ns.dt;
        const auto stride = static_cast<size_t>(std::llround(ratio));
        if (stride < 1 || std::abs(ratio - static_cast<double>(stride)) > 1e-9 * ratio) {
            throw ConfigError("field 'diffusion.sample_interval': must be an integer multiple of noise.dt");
        }
        span = duration;
        series = [ns, duration, stride, seed]() {
            const noise::NoiseTrace trace = ns.build(duration, seed).effective(ns.epsilon_mV);
            std::vector<double> out;
            for (size_t j = 0; j < trace.samples.size(); j += stride) out.push_back(trace.samples[j]);
            return out;
        };
    }
    const std::optional<double> t_min = cfg.optional_quantity("diffusion.T_min", Dimension::time, Range::positive());
    const std::optional<double> t_max = cfg.optional_quantity("diffusion.T_max", Dimension::time, Range::positive());
    const size_t n_intervals = count(cfg, "diffusion.n_intervals", 12);

    return [=](ScenarioOutput &out) {
        const std::vector<double> x = series();
        const double total = span > 0 ? span : interval * static_cast<double>(x.size());
        const double lo = t_min.value_or(interval);
        const double hi = t_max.value_or(total / 30.0);
        const auto intervals = spectra::log_spaced_intervals(interval, lo, hi, n_intervals);
        const spectra::DiffusionFit fit = spectra::fit_diffusion(x, interval, intervals);
        out.add("diffusion.csv", spectra::diffusion_csv(fit));
        out.summary = json{{"samples", x.size()},
                           {"sample_interval_s", interval},
                           {"intervals", fit.intervals.size()},
                           {"interval_lo_s", fit.intervals.front()},
                           {"interval_hi_s", fit.intervals.back()},
                           {"alpha", fit.alpha},
                           {"d_alpha_hz2_per_s_alpha", fit.d_alpha},
                           {"sub_diffusive", fit.alpha > 0 && fit.alpha < 1}};
    };
}

// ---------------------------------------------------------------- predict-t2

Runner prepare_predict(Config &cfg, std::uint64_t /*seed*/) {
    const std::vector<double> amps =
        cfg.quantity_list("spectrum.amplitude_A", Dimension::frequency_psd, std::nullopt, Range::non_negative());
    const std::vector<double> betas = cfg.number_list("spectrum.exponent_beta", std::nullopt, Range::closed(0.0, 3.0));
    if (amps.size() != betas.size()) {
        throw ConfigError("fields 'spectrum.amplitude_A' and 'spectrum.exponent_beta': list lengths differ");
    }
    const double f0 = cfg.quantity("predict.f0", Dimension::frequency, 1.0 / 300.0, Range::positive());
    const double f1 = cfg.quantity("predict.f1", Dimension::frequency, 1e5, Range::positive());
    if (!(f0 < f1)) throw ConfigError("fields 'predict.f0' and 'predict.f1': must satisfy f0 < f1");
    const std::string mode = cfg.choice("predict.mode", {"both", "quasi-static", "full-integral"}, "both");
    const size_t points = count(cfg, "predict.curve_points", 50);

    return [=](ScenarioOutput &out) {
        CsvWriter table({"set", "amplitude_A_hz2_per_hz", "exponent_beta", "f0_hz", "f1_hz", "mode", "sigma_static_hz",
                         "t2_star_s"});
        CsvWriter curve({"set", "t_s", "w_quasi_static", "w_full_integral"});
        CsvWriter model({"set", "f_hz", "psd_hz2_per_hz"});
        json sets = json::array();
        for (size_t i = 0; i < amps.size(); ++i) {
            noise::PowerLawSpec spec{amps[i], betas[i], f0, f1};
            const std::string set = std::to_string(i + 1);
            json entry{{"set", i + 1}, {"amplitude_A_hz2_per_hz", amps[i]}, {"exponent_beta", betas[i]}};
            std::optional<spectra::DecoherencePrediction> qs, full;
            if (mode != "full-integral") qs = spectra::predict_t2star(spec, f0, f1, spectra::PredictionMode::quasi_static);
            if (mode != "quasi-static") full = spectra::predict_t2star(spec, f0, f1, spectra::PredictionMode::full_integral);
            for (const auto *p : {&qs, &full}) {
                if (!*p) continue;
                const auto &d = **p;
                table.raw_row(std::vector<std::string>{
                    set, format_double(amps[i]), format_double(betas[i]), format_double(f0), format_double(f1),
                    std::string(spectra::mode_name(d.mode)), format_double(d.sigma_static.value_or(0.0)),
                    d.t2_star ? format_double(*d.t2_star) : "none"});
                json m{{"sigma_static_hz", d.sigma_static.value_or(0.0)}, {"t2_star_s", nullable(d.t2_star)}};
                entry[std::string(spectra::mode_name(d.mode))] = m;
            }
            if (qs && full && qs->t2_star && full->t2_star) entry["full_over_quasi_static"] = *full->t2_star / *qs->t2_star;

            // W(t) on log-spaced t around the quasi-static T2*.
            const double t_ref = (qs && qs->t2_star) ? *qs->t2_star : (full && full->t2_star) ? *full->t2_star : 1e-6;
            const double sigma = std::sqrt(noise::band_power(spec, f0, f1));
            for (size_t j = 0; j < points; ++j) {
                const double frac = points > 1 ? static_cast<double>(j) / static_cast<double>(points - 1) : 0.0;
                const double t = t_ref * 0.05 * std::pow(60.0, frac);
                const std::string wq = mode != "full-integral" ? format_double(spectra::quasi_static_w(t, sigma)) : "nan";
                const std::string wf = mode != "quasi-static" ? format_double(spectra::decoherence_w(t, spec, f0, f1)) : "nan";
                curve.raw_row(std::vector<std::string>{set, format_double(t), wq, wf});
            }
            for (size_t j = 0; j < 61; ++j) {
                const double f = f0 * std::pow(f1 / f0, static_cast<double>(j) / 60.0);
                model.raw_row(std::vector<std::string>{set, format_double(f), format_double(spec.density(f))});
            }
            sets.push_back(entry);
        }
        out.add("predictions.csv", table.text());
        out.add("decoherence_curve.csv", curve.text());
        out.add("model_psd.csv", model.text());
        out.summary = json{{"f0_hz", f0}, {"f1_hz", f1}, {"mode", mode}, {"sets", sets}};
    };
}

// ---------------------------------------------------------------- gst-violation

Runner prepare_gst(Config &cfg, std::uint64_t /*seed*/) {
    const std::filesystem::path dataset = cfg.path("gst.dataset");
    std::optional<int> k;
    if (cfg.has("gst.k")) k = static_cast<int>(cfg.integer("gst.k", std::nullopt, 1));
    const double confidence = cfg.number("gst.confidence", 0.95, {0.5, 1.0, true, true});

    return [=](ScenarioOutput &out) {
        const auto records = markovianity::read_dataset_csv(dataset, k);
        const markovianity::ViolationReport report = markovianity::aggregate(records, confidence);
        out.add("violation_report.json", markovianity::report_json(report));
        out.add("violation_per_circuit.csv", markovianity::per_circuit_csv(report));
        CsvWriter by_length({"L", "total_two_delta_loglik", "circuits", "violations"});
        json lengths = json::array();
        size_t violations = 0;
        for (const auto &[L, agg] : report.by_length) {
            const double total = agg.total();
            by_length.raw_row(std::vector<std::string>{std::to_string(L), std::isinf(total) ? "inf" : format_double(total),
                                                       std::to_string(agg.circuits), std::to_string(agg.violations)});
            lengths.push_back(json{{"L", L},
                                   {"total_two_delta_loglik", std::isinf(total) ? json("inf") : json(total)},
                                   {"circuits", agg.circuits},
                                   {"violations", agg.violations}});
            violations += agg.violations;
        }
        out.add("violation_by_length.csv", by_length.text());
        out.summary = json{{"circuits", report.per_circuit.size()},
                           {"violations", violations},
                           {"confidence", confidence},
                           {"totals_rendered", report.render_totals()},
                           {"by_length", lengths}};
    };
}

using Preparer = Runner (*)(Config &, std::uint64_t);

const std::vector<std::pair<std::string_view, Preparer>> &registry() {
    static const std::vector<std::pair<std::string_view, Preparer>> r{
        {"synthesize-noise", prepare_synthesize}, {"repeated-ramsey", prepare_repeated_ramsey},
        {"rabi-chevron", prepare_chevron},        {"feedback-run", prepare_feedback},
        {"psd-analysis", prepare_psd},            {"diffusion-analysis", prepare_diffusion},
        {"predict-t2", prepare_predict},          {"gst-violation", prepare_gst},
    };
    return r;
}

}  // namespace

std::vector<std::string_view> scenario_names() {
    std::vector<std::string_view> names;
    for (const auto &[name, fn] : registry()) names.push_back(name);
    return names;
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view role) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : role) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return mix64(seed ^ h);
}

void ScenarioOutput::add(std::string name, std::string text) {
    for (const auto &[n, t] : files) {
        if (n == name) throw ConfigError("scenario emitted '" + name + "' twice");
    }
    files.emplace_back(std::move(name), std::move(text));
}

std::string ScenarioOutput::summary_json() const {
    json j{{"scenario", scenario}, {"seed", seed}, {"version", DRIFTLOCK_VERSION}};
    for (const auto &[k, v] : summary.items()) j[k] = v;
    return j.dump(2) + "\n";
}

std::string ScenarioOutput::manifest_json() const {
    json config = json::object();
    for (const auto &[k, v] : resolved_config) config[k] = v;
    json outputs = json::array();
    for (const auto &[name, text] : files) outputs.push_back(name);
    outputs.push_back("summary.json");
    json j{{"artifact", "driftlock"},
           {"version", DRIFTLOCK_VERSION},
           {"scenario", scenario},
           {"seed", seed},
           {"config", config},
           {"outputs", outputs}};
    return j.dump(2) + "\n";
}

ScenarioOutput run_scenario(Config &cfg) {
    std::string list;
    for (auto n : scenario_names()) list += (list.empty() ? "" : ", ") + std::string(n);
    const std::string name = cfg.text("scenario");
    const auto &reg = registry();
    const auto it = std::find_if(reg.begin(), reg.end(), [&](const auto &e) { return e.first == name; });
    if (it == reg.end()) throw ConfigError("field 'scenario': unknown scenario '" + name + "' (one of " + list + ")");
    const std::uint64_t seed = cfg.seed("seed");
    const std::string out_dir = cfg.text("output_directory", "out");

    const Runner run = it->second(cfg, seed);
    cfg.reject_unknown(name);

    ScenarioOutput out;
    out.scenario = name;
    out.seed = seed;
    out.output_directory = out_dir;
    run(out);
    // Where the files land is not part of the result, so reruns into
    // different directories stay byte-identical.
    for (const auto &kv : cfg.resolved()) {
        if (kv.first != "output_directory") out.resolved_config.push_back(kv);
    }
    return out;
}

void write_output(const ScenarioOutput &out, const std::filesystem::path &dir) {
    std::filesystem::create_directories(dir);
    for (const auto &[name, text] : out.files) write_text_file(dir / name, text);
    write_text_file(dir / "summary.json", out.summary_json());
    write_text_file(dir / "manifest.json", out.manifest_json());
}

}  // namespace driftlock::cli
