#include "lcsf/errors.hpp"
#include "lcsf/harness.hpp"
#include "lcsf/io.hpp"
#include "lcsf/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace lcsf {

namespace {

std::string format_double(double v) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

const RealizationRecord* first_ok(const StudyResult& result) {
    for (const auto& rec : result.records)
        if (rec.ok) return &rec;
    return nullptr;
}

void write_table1(const StudyResult& result, const StudyAggregates& agg,
                  const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "# Median simulation RMSE per test family and design.\n";
    out << "# Values are scaled by 1e-5 (multiply by 1e-5 to recover meters).\n";
    out << "family,initial,classical,least_costly\n";
    for (int f = 0; f < kTestFamilyCount; ++f) {
        const std::string name = f < static_cast<int>(result.test_names.size())
                                     ? result.test_names[static_cast<std::size_t>(f)]
                                     : "family_" + std::to_string(f);
        out << name;
        for (int d = 0; d < kDesignCount; ++d)
            out << ','
                << format_double(
                       agg.median_rmse[static_cast<std::size_t>(d)][static_cast<std::size_t>(f)] /
                       1e-5);
        out << '\n';
    }
    if (!out) throw IoError("write failed for " + path.string());
}

void write_designs_csv(const StudyResult& result, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "realization,seed,ok,power_initial,power_classical,power_least_costly,"
           "v_initial,v_classical,v_least_costly,gamma0,gamma,"
           "rho_initial,rho_classical,rho_least_costly\n";
    for (const auto& rec : result.records) {
        out << rec.index << ',' << rec.seed << ',' << (rec.ok ? 1 : 0) << ','
            << format_double(rec.power_ini) << ',' << format_double(rec.power_cl) << ','
            << format_double(rec.power_lc) << ',' << format_double(rec.v_ini) << ','
            << format_double(rec.v_cl) << ',' << format_double(rec.v_lc) << ','
            << format_double(rec.gamma0) << ',' << format_double(rec.gamma) << ','
            << format_double(rec.rho_ini) << ',' << format_double(rec.rho_cl) << ','
            << format_double(rec.rho_lc) << '\n';
    }
    if (!out) throw IoError("write failed for " + path.string());
}

void plot_signals_time(const StudyResult& result, const RealizationRecord& rec,
                       const std::filesystem::path& path) {
    const auto& ms = result.config.multisine;
    const auto u_cl = multisine_sequence(rec.theta_cl, ms, ms.n_samples);
    const auto u_lc = multisine_sequence(rec.theta_lc, ms, ms.n_samples);

    double lo = 0.0, hi = 0.0;
    for (double v : u_cl) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    for (double v : u_lc) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }

    SvgCanvas canvas(760, 420);
    Axes axes(canvas, 70, 40, 650, 320, 0.0,
              static_cast<double>(ms.n_samples) / ms.f_s, lo * 1.05, hi * 1.05);
    axes.frame("Designed excitation signals, one period (realization " +
                   std::to_string(rec.index) + ")",
               "time (s)", "force (N)");
    auto series = [&](const std::vector<double>& u) {
        std::vector<std::pair<double, double>> pts;
        pts.reserve(u.size());
        for (std::size_t k = 0; k < u.size(); ++k)
            pts.emplace_back(static_cast<double>(k) / ms.f_s, u[k]);
        return pts;
    };
    axes.polyline(series(u_cl), "#2e8b57");
    axes.polyline(series(u_lc), "#d62728");
    canvas.text(620, 30, "classical", 11, "start");
    canvas.circle(610, 26, 4, "#2e8b57");
    canvas.text(620, 46, "least costly", 11, "start");
    canvas.circle(610, 42, 4, "#d62728");
    canvas.save(path.string());
}

void plot_signals_spectrum(const StudyResult& result, const RealizationRecord& rec,
                           const std::filesystem::path& path) {
    const auto& ms = result.config.multisine;
    double a_max = 1.0;
    for (double a : rec.theta_cl.amplitudes) a_max = std::max(a_max, std::abs(a));
    for (double a : rec.theta_lc.amplitudes) a_max = std::max(a_max, std::abs(a));

    SvgCanvas canvas(760, 420);
    Axes axes(canvas, 70, 40, 650, 320, 0.0,
              ms.f0() * (ms.line_indices.back() + 5), 0.0, a_max * 1.1);
    axes.frame("Per-line amplitudes (realization " + std::to_string(rec.index) + ")",
               "frequency (Hz)", "amplitude (N)");
    for (std::size_t i = 0; i < ms.line_indices.size(); ++i) {
        const double f = ms.f0() * ms.line_indices[i];
        canvas.line(axes.px(f) - 2, axes.py(0.0), axes.px(f) - 2,
                    axes.py(std::abs(rec.theta_cl.amplitudes[i])), "#2e8b57", 3.0);
        canvas.line(axes.px(f) + 2, axes.py(0.0), axes.px(f) + 2,
                    axes.py(std::abs(rec.theta_lc.amplitudes[i])), "#d62728", 3.0);
    }
    canvas.text(620, 30, "classical", 11, "start");
    canvas.circle(610, 26, 4, "#2e8b57");
    canvas.text(620, 46, "least costly", 11, "start");
    canvas.circle(610, 42, 4, "#d62728");
    canvas.save(path.string());
}

void plot_features(const StudyResult& result, const RealizationRecord& rec,
                   const std::filesystem::path& path) {
    const StudyConfig& cfg = result.config;
    IoModel plant;
    plant.kind = IoModel::Kind::nonlinear_msd;
    plant.msd = cfg.msd;
    plant.f_s = cfg.multisine.f_s;

    const Dataset d_cl = simulate_dataset(plant, rec.theta_cl, cfg.multisine, State::Zero(),
                                          cfg.warmup_periods, cfg.dy_scale());
    const Dataset d_lc = simulate_dataset(plant, rec.theta_lc, cfg.multisine, State::Zero(),
                                          cfg.warmup_periods, cfg.dy_scale());

    double x_lo = cfg.region.lower[0], x_hi = cfg.region.upper[0];
    double y_lo = cfg.region.lower[1], y_hi = cfg.region.upper[1];
    auto widen = [](double& lo, double& hi, const Eigen::MatrixX2d& m, int col) {
        lo = std::min(lo, m.col(col).minCoeff());
        hi = std::max(hi, m.col(col).maxCoeff());
    };
    widen(x_lo, x_hi, d_cl.features, 0);
    widen(x_lo, x_hi, d_lc.features, 0);
    widen(y_lo, y_hi, d_cl.features, 1);
    widen(y_lo, y_hi, d_lc.features, 1);

    SvgCanvas canvas(760, 560);
    Axes axes(canvas, 80, 40, 620, 460, x_lo * 1.05, x_hi * 1.05, y_lo * 1.05, y_hi * 1.05);
    axes.frame("Feature-space coverage (realization " + std::to_string(rec.index) + ")",
               "y(k-1)", "dy(k-1)");

    auto points = [](const Dataset& d) {
        std::vector<std::pair<double, double>> pts;
        const auto n = d.features.rows();
        const auto stride = std::max<Eigen::Index>(1, n / 2000);
        for (Eigen::Index r = 0; r < n; r += stride)
            pts.emplace_back(d.features(r, 0), d.features(r, 1));
        return pts;
    };
    axes.scatter(points(d_cl), "#2e8b57", 1.4);
    axes.scatter(points(d_lc), "#d62728", 1.4);
    axes.data_rect(cfg.region.lower[0], cfg.region.lower[1], cfg.region.upper[0],
                   cfg.region.upper[1], "#404040");
    const AnchorGrid anchors = build_anchor_grid(cfg.region, cfg.anchor_counts);
    for (Eigen::Index i = 0; i < anchors.size(); ++i)
        canvas.circle(axes.px(anchors.points(i, 0)), axes.py(anchors.points(i, 1)), 2.6,
                      "#1f77b4");
    canvas.text(620, 30, "classical", 11, "start");
    canvas.circle(610, 26, 4, "#2e8b57");
    canvas.text(620, 46, "least costly", 11, "start");
    canvas.circle(610, 42, 4, "#d62728");
    canvas.text(620, 62, "anchors", 11, "start");
    canvas.circle(610, 58, 4, "#1f77b4");
    canvas.save(path.string());
}

void plot_rmse_box(const StudyResult& result, const std::filesystem::path& path) {
    std::vector<const RealizationRecord*> ok;
    for (const auto& rec : result.records)
        if (rec.ok) ok.push_back(&rec);
    if (ok.empty()) return;

    double lo = 1e300, hi = -1e300;
    std::array<std::array<std::vector<double>, kTestFamilyCount>, kDesignCount> values;
    for (int d = 0; d < kDesignCount; ++d)
        for (int f = 0; f < kTestFamilyCount; ++f) {
            auto& v = values[static_cast<std::size_t>(d)][static_cast<std::size_t>(f)];
            for (const auto* rec : ok) {
                const double e =
                    rec->rmse[static_cast<std::size_t>(d)][static_cast<std::size_t>(f)];
                const double le = std::log10(std::max(e, 1e-300));
                v.push_back(le);
                lo = std::min(lo, le);
                hi = std::max(hi, le);
            }
            std::sort(v.begin(), v.end());
        }

    SvgCanvas canvas(820, 460);
    Axes axes(canvas, 80, 40, 690, 340, 0.0, 4.0, lo - 0.3, hi + 0.3);
    axes.frame("Simulation RMSE by test family", "", "log10 RMSE (m)");
    const char* colors[kDesignCount] = {"#7f7f7f", "#2e8b57", "#d62728"};
    auto quantile = [](const std::vector<double>& sorted, double q) {
        const double pos = q * static_cast<double>(sorted.size() - 1);
        const auto i = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(i);
        if (i + 1 >= sorted.size()) return sorted.back();
        return sorted[i] * (1.0 - frac) + sorted[i + 1] * frac;
    };
    for (int f = 0; f < kTestFamilyCount; ++f) {
        for (int d = 0; d < kDesignCount; ++d) {
            const auto& v = values[static_cast<std::size_t>(d)][static_cast<std::size_t>(f)];
            const double x = f + 0.25 + 0.25 * d;
            axes.box(x, 18.0, v.front(), quantile(v, 0.25), quantile(v, 0.5),
                     quantile(v, 0.75), v.back(), colors[d]);
        }
        const std::string name = f < static_cast<int>(result.test_names.size())
                                     ? result.test_names[static_cast<std::size_t>(f)]
                                     : "family " + std::to_string(f);
        canvas.text(axes.px(f + 0.5), 408, name, 10, "middle");
    }
    canvas.text(640, 30, "initial", 11, "start");
    canvas.circle(630, 26, 4, "#7f7f7f");
    canvas.text(640, 46, "classical", 11, "start");
    canvas.circle(630, 42, 4, "#2e8b57");
    canvas.text(640, 62, "least costly", 11, "start");
    canvas.circle(630, 58, 4, "#d62728");
    canvas.save(path.string());
}

} // namespace

void write_report(const StudyResult& result, const std::string& out_dir) {
    if (result.records.empty())
        throw ConfigError("refusing to write a report with zero realizations");

    const std::filesystem::path dir(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir);

    save_json(study_result_to_json(result), (dir / "study.json").string());
    const StudyAggregates agg = aggregate(result);
    write_table1(result, agg, dir / "table1.csv");
    write_designs_csv(result, dir / "designs.csv");

    if (const RealizationRecord* rec = first_ok(result)) {
        plot_signals_time(result, *rec, dir / "signals_time.svg");
        plot_signals_spectrum(result, *rec, dir / "signals_spectrum.svg");
        plot_features(result, *rec, dir / "features.svg");
        plot_rmse_box(result, dir / "rmse_box.svg");
    }
}

} // namespace lcsf
