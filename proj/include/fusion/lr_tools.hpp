#pragma once

// Learning-rate range test helpers: the log-spaced sweep, max-LR suggestion
// from a (step, lr, loss) log, and the triangular cyclical schedule.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "fusion/csv.hpp"
#include "fusion/error.hpp"

namespace fusion {

struct LrLogEntry {
    std::int64_t step;
    double learning_rate;
    double loss;
};

struct LrLog {
    std::vector<LrLogEntry> entries;

    void validate() const {
        for (std::size_t i = 0; i < entries.size(); ++i) {
            if (!(entries[i].learning_rate > 0.0) || !std::isfinite(entries[i].learning_rate))
                throw InputError("lr log: learning rate must be positive at entry " + std::to_string(i));
            if (i > 0 && entries[i].step <= entries[i - 1].step)
                throw InputError("lr log: steps must be strictly increasing at entry " + std::to_string(i));
        }
    }
};

inline LrLog parse_lr_log(std::istream& in, const std::string& source = "lr log") {
    std::string line;
    if (!csv::read_line(in, line)) throw InputError(source + ": missing header");
    {
        auto h = csv::split(csv::strip_bom(line));
        if (h.size() != 3 || csv::trim(h[0]) != "step" || csv::trim(h[1]) != "lr" || csv::trim(h[2]) != "loss")
            throw InputError(source + ": header must be step,lr,loss");
    }
    LrLog log;
    std::size_t line_no = 1;
    while (csv::read_line(in, line)) {
        ++line_no;
        if (csv::trim(line).empty()) continue;
        auto f = csv::split(line);
        if (f.size() != 3) throw InputError(csv::row_context(source, line_no) + ": expected 3 fields");
        auto step = csv::parse_int<std::int64_t>(f[0]);
        auto lr = csv::parse_double(f[1]);
        auto loss = csv::parse_double(f[2]);
        if (!step || !lr || !loss) throw InputError(csv::row_context(source, line_no) + ": malformed value");
        log.entries.push_back({*step, *lr, *loss});
    }
    log.validate();
    return log;
}

/// `iterations` log-spaced rates from min_lr to max_lr inclusive.
inline std::vector<double> generate_sweep(double min_lr, double max_lr, std::size_t iterations) {
    if (!(min_lr > 0.0) || !(max_lr > min_lr) || !std::isfinite(max_lr))
        throw ComputeError("lr sweep: require 0 < min_lr < max_lr");
    if (iterations < 2) throw ComputeError("lr sweep: require at least 2 iterations");
    const double lo = std::log10(min_lr), hi = std::log10(max_lr);
    std::vector<double> lrs(iterations);
    for (std::size_t i = 0; i < iterations; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(iterations - 1);
        lrs[i] = std::pow(10.0, lo + t * (hi - lo));
    }
    lrs.front() = min_lr;
    lrs.back() = max_lr;
    return lrs;
}

struct LrRangeOptions {
    double smoothing_beta = 0.98;
    std::size_t window = 5;
    double divergence_factor = 4.0;
    // Windows whose slope reaches this fraction of the steepest slope, and
    // touch the steepest window, form the steepest descending portion.
    double steep_fraction = 0.5;
};

struct LrRangeResult {
    double suggested_max_lr = 0.0;
    std::int64_t window_start = 0; // step of the first entry of the steepest portion
    std::int64_t window_end = 0;   // step of the last entry
    double slope = 0.0;            // steepest d(smoothed loss)/d(log10 lr)
    std::vector<double> smoothed_loss;
};

/// Bias-corrected exponential moving average. beta = 0 returns the input.
inline std::vector<double> smooth_losses(const std::vector<double>& losses, double beta) {
    if (!(beta >= 0.0 && beta < 1.0)) throw ComputeError("smoothing beta must lie in [0,1)");
    std::vector<double> out(losses.size());
    double avg = 0.0, decay = 1.0;
    for (std::size_t i = 0; i < losses.size(); ++i) {
        avg = beta * avg + (1.0 - beta) * losses[i];
        decay *= beta;
        out[i] = avg / (1.0 - decay);
    }
    return out;
}

/// Least-squares slope of y against x.
inline double fit_slope(const double* x, const double* y, std::size_t n) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

/// Suggests the CLR upper bound: the log-lr midpoint of the steepest descending portion.
///
/// Entries past the minimum of the smoothed loss, or past the first point
/// where it exceeds divergence_factor times its running minimum, are ignored.
inline LrRangeResult suggest_max_lr(const LrLog& log, const LrRangeOptions& opt = {}) {
    log.validate();
    const auto& e = log.entries;
    if (e.size() < 10) throw ComputeError("lr suggest: need at least 10 log entries");
    for (std::size_t i = 1; i < e.size(); ++i)
        if (!(e[i].learning_rate > e[i - 1].learning_rate))
            throw ComputeError("lr suggest: learning rates must increase along the log");
    if (opt.window < 2) throw ComputeError("lr suggest: window must be at least 2");
    if (!(opt.steep_fraction > 0.0 && opt.steep_fraction <= 1.0))
        throw ComputeError("lr suggest: steep_fraction must lie in (0,1]");

    std::vector<double> losses, x;
    for (const auto& entry : e) {
        if (!std::isfinite(entry.loss)) break;
        losses.push_back(entry.loss);
        x.push_back(std::log10(entry.learning_rate));
    }
    LrRangeResult result;
    result.smoothed_loss = smooth_losses(losses, opt.smoothing_beta);
    const auto& s = result.smoothed_loss;

    std::size_t cut = s.size();
    double running_min = s.empty() ? 0.0 : s[0];
    for (std::size_t i = 0; i < s.size(); ++i) {
        running_min = std::min(running_min, s[i]);
        if (s[i] > opt.divergence_factor * running_min && running_min > 0.0) { cut = i; break; }
    }
    if (cut > 0) cut = static_cast<std::size_t>(std::min_element(s.begin(), s.begin() + cut) - s.begin()) + 1;
    if (cut < opt.window) throw ComputeError("lr suggest: no descending window found");

    std::vector<double> slopes(cut - opt.window + 1);
    for (std::size_t i = 0; i < slopes.size(); ++i) slopes[i] = fit_slope(&x[i], &s[i], opt.window);
    const auto k = static_cast<std::size_t>(std::min_element(slopes.begin(), slopes.end()) - slopes.begin());
    if (!(slopes[k] < 0.0)) throw ComputeError("lr suggest: no descending window found");

    const double threshold = opt.steep_fraction * slopes[k];
    std::size_t lo = k, hi = k;
    while (lo > 0 && slopes[lo - 1] <= threshold) --lo;
    while (hi + 1 < slopes.size() && slopes[hi + 1] <= threshold) ++hi;
    const std::size_t last = hi + opt.window - 1;

    result.slope = slopes[k];
    result.window_start = e[lo].step;
    result.window_end = e[last].step;
    result.suggested_max_lr = std::sqrt(e[lo].learning_rate * e[last].learning_rate);
    return result;
}

inline void write_lr_result(std::ostream& out, const LrRangeResult& r) {
    out << "suggested_max_lr " << csv::format_double(r.suggested_max_lr) << '\n'
        << "window_start " << r.window_start << '\n'
        << "window_end " << r.window_end << '\n'
        << "slope " << csv::format_double(r.slope) << '\n';
}

struct ClrSchedule {
    double min_lr;
    double max_lr;
    std::uint64_t step_size; // steps per half-cycle

    void validate() const {
        if (!(min_lr > 0.0) || !(max_lr >= min_lr) || !std::isfinite(max_lr))
            throw ComputeError("clr: require 0 < min_lr <= max_lr");
        if (step_size == 0) throw ComputeError("clr: step_size must be positive");
    }
};

/// Triangular cyclical learning rate at `step`: min_lr at multiples of
/// 2*step_size, max_lr at odd multiples of step_size, linear in between.
inline double clr_at(const ClrSchedule& schedule, std::uint64_t step) {
    schedule.validate();
    const std::uint64_t period = 2 * schedule.step_size;
    const std::uint64_t pos = step % period;
    const std::uint64_t rise = pos <= schedule.step_size ? pos : period - pos;
    if (rise == 0) return schedule.min_lr;
    if (rise == schedule.step_size) return schedule.max_lr;
    const double frac = static_cast<double>(rise) / static_cast<double>(schedule.step_size);
    return schedule.min_lr + (schedule.max_lr - schedule.min_lr) * frac;
}

} // namespace fusion
