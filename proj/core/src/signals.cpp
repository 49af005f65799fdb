#include "lcsf/signals.hpp"

#include "lcsf/errors.hpp"
#include "lcsf/rng.hpp"

#include <cmath>
#include <numbers>
#include <set>

namespace lcsf {

std::vector<int> MultisineConfig::make_line_range(int l_min, int l_max, int stride) {
    if (l_min <= 0 || stride <= 0 || l_max < l_min)
        throw ConfigError("multisine line range requires 0 < l_min <= l_max, stride > 0");
    std::vector<int> lines;
    for (int l = l_min; l <= l_max; l += stride) lines.push_back(l);
    return lines;
}

std::vector<int> MultisineConfig::make_line_band(double f_s, std::size_t n_samples,
                                                 double f_min, double f_max) {
    if (!(f_max > f_min && f_min > 0.0))
        throw ConfigError("line band requires f_max > f_min > 0");
    const double f0 = f_s / static_cast<double>(n_samples);
    int lo = static_cast<int>(std::ceil(f_min / f0 - 1e-12));
    int hi = static_cast<int>(std::floor(f_max / f0 + 1e-12));
    lo = std::max(lo, 1);
    if (hi < lo) throw ConfigError("line band is empty at this frequency resolution");
    std::vector<int> lines;
    lines.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (int l = lo; l <= hi; ++l) lines.push_back(l);
    return lines;
}

void MultisineConfig::validate() const {
    if (f_s <= 0.0) throw ConfigError("sampling frequency must be positive");
    if (n_samples == 0) throw ConfigError("samples per period must be positive");
    if (line_indices.empty()) throw ConfigError("no excited lines");
    std::set<int> seen;
    const double nyquist = static_cast<double>(n_samples) / 2.0;
    for (int l : line_indices) {
        if (l <= 0) throw ConfigError("line indices must be positive");
        if (static_cast<double>(l) > nyquist)
            throw ConfigError("line index " + std::to_string(l) + " exceeds Nyquist");
        if (!seen.insert(l).second)
            throw ConfigError("duplicate line index " + std::to_string(l));
    }
}

SignalParams SignalParams::constant(std::size_t lines, double amplitude) {
    return SignalParams{std::vector<double>(lines, amplitude),
                        std::vector<double>(lines, 0.0)};
}

void SignalParams::validate(const MultisineConfig& config) const {
    if (amplitudes.size() != phases.size())
        throw ConfigError("amplitude/phase vectors differ in length");
    if (amplitudes.size() != config.line_count())
        throw ConfigError("signal parameters do not match the excited line count");
    for (double a : amplitudes)
        if (!std::isfinite(a)) throw ConfigError("non-finite amplitude");
    for (double p : phases)
        if (!std::isfinite(p)) throw ConfigError("non-finite phase");
}

void TestSignalSpec::validate() const {
    switch (kind) {
    case Kind::multisine:
        if (amplitude <= 0.0) throw ConfigError("multisine test amplitude must be positive");
        break;
    case Kind::log_sweep:
        if (duration <= 0.0) throw ConfigError("sweep duration must be positive");
        if (!(f_max > f_min && f_min > 0.0))
            throw ConfigError("sweep requires f_max > f_min > 0");
        break;
    case Kind::white_uniform:
        if (variance <= 0.0) throw ConfigError("white-noise variance must be positive");
        break;
    }
}

double multisine_eval(const SignalParams& params, const MultisineConfig& config,
                      std::size_t k) {
    params.validate(config);
    const double n = static_cast<double>(config.n_samples);
    const double k_mod = static_cast<double>(k % config.n_samples);
    double u = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double arg =
            2.0 * std::numbers::pi * config.line_indices[i] * k_mod / n + params.phases[i];
        u += params.amplitudes[i] * std::sin(arg);
    }
    return u;
}

std::vector<double> multisine_sequence(const SignalParams& params,
                                       const MultisineConfig& config, std::size_t n) {
    params.validate(config);
    const std::size_t period = config.n_samples;
    const std::size_t one = std::min(n, period);
    std::vector<double> u(n);
    const double nd = static_cast<double>(period);
    for (std::size_t k = 0; k < one; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < params.size(); ++i) {
            const double arg = 2.0 * std::numbers::pi * config.line_indices[i] *
                                   static_cast<double>(k) / nd +
                               params.phases[i];
            s += params.amplitudes[i] * std::sin(arg);
        }
        u[k] = s;
    }
    // Periodic continuation reuses the first period bit-for-bit.
    for (std::size_t k = one; k < n; ++k) u[k] = u[k % period];
    return u;
}

double signal_power(const std::vector<double>& u) {
    if (u.empty()) throw ConfigError("signal power of an empty sequence");
    double acc = 0.0;
    for (double s : u) {
        if (!std::isfinite(s)) throw ConfigError("non-finite sample in power computation");
        acc += s * s;
    }
    return acc / static_cast<double>(u.size());
}

double signal_max_abs(const std::vector<double>& u) {
    if (u.empty()) throw ConfigError("max-abs of an empty sequence");
    double m = 0.0;
    for (double s : u) m = std::max(m, std::abs(s));
    return m;
}

double log_sweep_eval(std::size_t k, double f_min, double f_max, double duration,
                      double amplitude, double f_s) {
    if (!(f_max > f_min && f_min > 0.0))
        throw ConfigError("log sweep requires f_max > f_min > 0");
    if (duration <= 0.0) throw ConfigError("log sweep requires positive duration");
    const double rate = duration / std::log(f_max / f_min);
    const double t = static_cast<double>(k) / f_s;
    return amplitude * std::sin(2.0 * std::numbers::pi * f_min * rate * std::exp(t / rate));
}

std::vector<double> log_sweep_sequence(double f_min, double f_max, double duration,
                                       double amplitude, double f_s, std::size_t n) {
    std::vector<double> u(n);
    for (std::size_t k = 0; k < n; ++k)
        u[k] = log_sweep_eval(k, f_min, f_max, duration, amplitude, f_s);
    return u;
}

std::vector<double> white_uniform_sequence(std::uint64_t seed, double variance,
                                           std::size_t n) {
    if (variance <= 0.0) throw ConfigError("white-noise variance must be positive");
    const double half_width = std::sqrt(3.0 * variance);
    SplitMix64 rng(seed);
    std::vector<double> u(n);
    for (std::size_t k = 0; k < n; ++k) u[k] = rng.uniform(-half_width, half_width);
    return u;
}

} // namespace lcsf
