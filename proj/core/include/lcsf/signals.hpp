#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace lcsf {

/// Harmonic grid of a periodic multisine: sampling rate, samples per period
/// and the set of excited frequency lines. Frequency resolution is
/// f0 = f_s / n_samples; line l excites l * f0 Hz.
struct MultisineConfig {
    double f_s = 100.0;
    std::size_t n_samples = 1024;
    std::vector<int> line_indices = make_line_range(12, 103, 7);

    double f0() const { return f_s / static_cast<double>(n_samples); }
    std::size_t line_count() const { return line_indices.size(); }

    /// Excited lines l_min, l_min+stride, ..., <= l_max.
    static std::vector<int> make_line_range(int l_min, int l_max, int stride);

    /// All integer lines whose frequency falls inside [f_min, f_max].
    static std::vector<int> make_line_band(double f_s, std::size_t n_samples,
                                           double f_min, double f_max);

    /// Throws ConfigError unless lines are distinct, positive and below the
    /// Nyquist index n_samples / 2.
    void validate() const;
};

/// Box bounds on per-line amplitudes. Phases are unconstrained.
struct AmplitudeBounds {
    double lo = 0.0;
    double hi = 500.0;
};

/// Multisine parameter vector: one (amplitude, phase) pair per excited line.
struct SignalParams {
    std::vector<double> amplitudes;
    std::vector<double> phases;

    std::size_t size() const { return amplitudes.size(); }

    /// Constant amplitude, all phases zero.
    static SignalParams constant(std::size_t lines, double amplitude);

    /// Throws ConfigError on length mismatch with the config.
    void validate(const MultisineConfig& config) const;
};

/// One test-signal family of the validation suite.
struct TestSignalSpec {
    enum class Kind { multisine, log_sweep, white_uniform };

    Kind kind = Kind::multisine;
    std::string name;
    double amplitude = 8.0;   // per-line (multisine) or scale (sweep)
    double variance = 19.0;   // white_uniform only
    double duration = 0.0;    // log_sweep only, seconds
    double f_min = 1.0;       // band edges (multisine, log_sweep)
    double f_max = 10.0;
    std::uint64_t seed = 0;

    void validate() const;
};

/// u(k) = sum_l A_l sin(2*pi*l*k/n + phi_l). Exactly periodic in n samples:
/// the phase argument is built from k mod n.
double multisine_eval(const SignalParams& params, const MultisineConfig& config,
                      std::size_t k);

/// Evaluates n consecutive samples starting at k = 0.
std::vector<double> multisine_sequence(const SignalParams& params,
                                       const MultisineConfig& config,
                                       std::size_t n);

/// Time-average of squared samples, (1/N) sum u(k)^2.
double signal_power(const std::vector<double>& u);

/// Largest absolute sample, max_k |u(k)|.
double signal_max_abs(const std::vector<double>& u);

/// Logarithmic sweep amplitude * sin(2*pi*f_min*L*exp(t/L)) with
/// L = T / ln(f_max/f_min) and t = k / f_s; the instantaneous frequency
/// rises from f_min to f_max over [0, T].
double log_sweep_eval(std::size_t k, double f_min, double f_max, double duration,
                      double amplitude, double f_s);

std::vector<double> log_sweep_sequence(double f_min, double f_max, double duration,
                                       double amplitude, double f_s, std::size_t n);

/// I.i.d. samples uniform on [-h, h] with h = sqrt(3 * variance).
std::vector<double> white_uniform_sequence(std::uint64_t seed, double variance,
                                           std::size_t n);

} // namespace lcsf
