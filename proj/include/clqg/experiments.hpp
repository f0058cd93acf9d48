#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "clqg/bessel.hpp"
#include "clqg/chaos.hpp"
#include "clqg/concentric.hpp"
#include "clqg/config.hpp"
#include "clqg/gauge.hpp"
#include "clqg/gff.hpp"
#include "clqg/hausdorff.hpp"
#include "clqg/io.hpp"
#include "clqg/lattice.hpp"
#include "clqg/rng.hpp"
#include "clqg/stats.hpp"
#include "clqg/version.hpp"

// Experiment runners. Each is a pure function of (config, master seed):
// replica seeds derive deterministically, replica work may run on several
// threads, and aggregation folds in replica-index order, so outputs are
// byte-identical across re-runs regardless of scheduling.

namespace clqg::harness {

struct ExperimentResult {
    nlohmann::json summary;
    io::CsvWriter rows{std::vector<std::string>{}};
    std::optional<gff::FieldSample> saved_field;

    void write(const std::filesystem::path& dir) const {
        std::filesystem::create_directories(dir);
        io::write_json(dir / "summary.json", summary);
        rows.write(dir / "rows.csv");
        if (saved_field) io::write_field_bin(dir / "field.bin", *saved_field);
    }
};

namespace detail {

inline nlohmann::json tolerance_table() {
    return nlohmann::json{{"gauge_phi_rel_tol", 1e-7},
                          {"green_row_identity_dense", 1e-10},
                          {"green_row_identity_spectral", 1e-8},
                          {"measure_total_rel", 1e-12},
                          {"harmonic_solver", "direct DST solve"},
                          {"bessel_grid_resolution", 0.1},
                          {"bessel_fine_resolution", 0.01}};
}

inline nlohmann::json base_summary(const Config& cfg, const std::string& experiment) {
    char hash[20];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(cfg.hash()));
    return nlohmann::json{{"experiment", experiment},
                          {"config_hash", hash},
                          {"code_version", version_string},
                          {"seed", cfg.get_u64("seed", 1)},
                          {"tolerances", tolerance_table()}};
}

// Deterministic replica map: results land in replica order no matter which
// thread produced them.
template <class Row>
std::vector<Row> run_replicas(int replicas, int threads,
                              const std::function<Row(int)>& work) {
    std::vector<Row> out(static_cast<std::size_t>(replicas));
    if (threads <= 1) {
        for (int r = 0; r < replicas; ++r) out[static_cast<std::size_t>(r)] = work(r);
        return out;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&]() {
            while (true) {
                const int r = next.fetch_add(1);
                if (r >= replicas) return;
                try {
                    out[static_cast<std::size_t>(r)] = work(r);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
    return out;
}

inline int thread_count(const Config& cfg) {
    return static_cast<int>(cfg.get_int("threads", 1));
}

inline int kmax_of(int N, double delta) {
    return static_cast<int>(std::floor(std::log(static_cast<double>(N)))) -
           lattice::kappa_of_delta(delta) - 1;
}

inline std::string fmt(double v) { return io::format_double(v); }

} // namespace detail

// ---------------------------------------------------------------- green-check
inline ExperimentResult run_green_check(const Config& cfg) {
    const int N = static_cast<int>(cfg.get_int("N", 19));
    const auto dom = lattice::discretize(cfg.domain_shape(), N);
    const auto G = gff::green(dom, gff::GreenKind::Dense, 20000);

    rng::Rng pick(cfg.get_u64("seed", 1));
    const int pairs = static_cast<int>(cfg.get_int("pairs", 30));
    double max_residual = 0.0;
    io::CsvWriter rows({"i", "j", "green", "row_residual"});
    const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
    for (int p = 0; p < pairs; ++p) {
        const auto i = static_cast<std::size_t>(pick.uniform() * dom.size());
        const auto j = static_cast<std::size_t>(pick.uniform() * dom.size());
        double acc = G.entry(i, j);
        const auto& site = dom.sites[i];
        for (int d = 0; d < 4; ++d) {
            const auto nb = dom.site_index(site.x + dx[d], site.y + dy[d]);
            if (nb >= 0) acc -= 0.25 * G.entry(static_cast<std::size_t>(nb), j);
        }
        const double res = acc - (i == j ? 1.0 : 0.0);
        max_residual = std::max(max_residual, std::abs(res));
        rows.add_row({std::to_string(i), std::to_string(j), detail::fmt(G.entry(i, j)),
                      detail::fmt(res)});
    }

    ExperimentResult out;
    out.summary = detail::base_summary(cfg, "green-check");
    out.summary["N"] = N;
    out.summary["sites"] = dom.size();
    out.summary["max_row_residual"] = max_residual;
    out.summary["pass"] = max_residual < 1e-10;
    out.rows = std::move(rows);
    return out;
}

// ---------------------------------------------------------------- field-stats
inline ExperimentResult run_field_stats(const Config& cfg) {
    const int N = static_cast<int>(cfg.get_int("N", 64));
    const int replicas = static_cast<int>(cfg.get_int("replicas", 2000));
    const std::uint64_t seed = cfg.get_u64("seed", 1);
    const auto dom = lattice::discretize(cfg.domain_shape(), N);

    const lattice::Point center{dom.x_lo + dom.width / 2, dom.y_lo + dom.height / 2};
    const auto cidx = static_cast<std::size_t>(dom.site_index(center.x, center.y));

    struct Row {
        double center = 0.0, max = 0.0;
        std::uint64_t seed = 0;
    };
    const auto rows_data = detail::run_replicas<Row>(
        replicas, detail::thread_count(cfg), [&](int r) {
            Row row;
            row.seed = rng::derive_seed(seed, static_cast<std::uint64_t>(r));
            const auto f = gff::sample_spectral(dom, row.seed);
            row.center = f.values[cidx];
            row.max = f.max_value();
            return row;
        });

    io::CsvWriter rows({"replica", "seed", "center_value", "max_value"});
    std::vector<double> centers;
    for (int r = 0; r < replicas; ++r) {
        const auto& row = rows_data[static_cast<std::size_t>(r)];
        centers.push_back(row.center);
        rows.add_row({std::to_string(r), std::to_string(row.seed), detail::fmt(row.center),
                      detail::fmt(row.max)});
    }

    const double g_diag = fft::green_diag_rect(dom.width, dom.height, center.x - dom.x_lo,
                                               center.y - dom.y_lo);
    ExperimentResult out;
    out.summary = detail::base_summary(cfg, "field-stats");
    out.summary["N"] = N;
    out.summary["replicas"] = replicas;
    out.summary["center_variance_empirical"] = stats::variance(centers);
    out.summary["center_variance_green"] = g_diag;
    out.rows = std::move(rows);
    if (cfg.get_int("write_field", 0) != 0)
        out.saved_field = gff::sample_spectral(dom, rng::derive_seed(seed, 0));
    return out;
}

// ------------------------------------------------------------------- max-tail
inline ExperimentResult run_max_tail(const Config& cfg) {
    const int N = static_cast<int>(cfg.get_int("N", 256));
    const int replicas = static_cast<int>(cfg.get_int("replicas", 10000));
    const std::uint64_t seed = cfg.get_u64("seed", 1);
    const auto u_grid = cfg.get_real_list("u_grid", {0.5, 1.0, 1.5, 2.0, 2.5});
    const auto dom = lattice::discretize(cfg.domain_shape(), N);
    const double m_N = chaos::m_centering(static_cast<double>(N));

    const auto maxima = detail::run_replicas<double>(
        replicas, detail::thread_count(cfg), [&](int r) {
            return gff::sample_spectral(dom, rng::derive_seed(seed, r)).max_value();
        });

    io::CsvWriter rows({"u", "exceed_count", "frequency"});
    std::vector<double> us, logfreq;
    nlohmann::json freq_table = nlohmann::json::array();
    for (const double u : u_grid) {
        long count = 0;
        for (const double m : maxima)
            if (m > m_N + u) ++count;
        const double freq = static_cast<double>(count) / replicas;
        rows.add_row({detail::fmt(u), std::to_string(count), detail::fmt(freq)});
        freq_table.push_back({{"u", u}, {"count", count}, {"frequency", freq}});
        if (count > 0) {
            us.push_back(u);
            logfreq.push_back(std::log(freq));
        }
    }

    ExperimentResult out;
    out.summary = detail::base_summary(cfg, "max-tail");
    out.summary["N"] = N;
    out.summary["replicas"] = replicas;
    out.summary["m_N"] = m_N;
    out.summary["frequencies"] = freq_table;
    out.summary["alpha"] = chaos::alpha_const;
    if (us.size() >= 2) {
        const double slope = stats::linear_fit(us, logfreq).slope;
        out.summary["log_slope"] = slope;
        out.summary["slope_over_minus_alpha"] = slope / (-chaos::alpha_const);
    }
    out.rows = std::move(rows);
    return out;
}

// -------------------------------------------------------------- near-extremal
inline ExperimentResult run_near_extremal(const Config& cfg) {
    const int N = static_cast<int>(cfg.get_int("N", 1024));
    const int replicas = static_cast<int>(cfg.get_int("replicas", 2000));
    const std::uint64_t seed = cfg.get_u64("seed", 1);
    const double a = cfg.get_real("a", std::sqrt(2.0 * chaos::g_const * std::log(2.0)));
    const auto dom = lattice::discretize(cfg.domain_shape(), N);

    struct Row {
        std::uint64_t seed = 0;
        lattice::Point x;
        double t = 0.0;
    };
    const auto data = detail::run_replicas<Row>(
        replicas, detail::thread_count(cfg), [&](int r) {
            Row row;
            row.seed = rng::derive_seed(seed, static_cast<std::uint64_t>(r));
            const auto f = gff::sample_spectral(dom, row.seed);
            const auto m = chaos::build_measure(f);
            const auto d = chaos::draw_point(m, rng::derive_seed(row.seed, 1));
            row.x = d.point;
            row.t = chaos::near_extremal_statistic(f, d);
            return row;
        });

    io::CsvWriter rows({"replica", "seed", "x", "y", "t_statistic"});
    long outside = 0;
    for (int r = 0; r < replicas; ++r) {
        const auto& row = data[static_cast<std::size_t>(r)];
        if (row.t < 0.0 || row.t > a) ++outside;
        rows.add_row({std::to_string(r), std::to_string(row.seed), std::to_string(row.x.x),
                      std::to_string(row.x.y), detail::fmt(row.t)});
    }

    ExperimentResult out;
    out.summary = detail::base_summary(cfg, "near-extremal");
    out.summary["N"] = N;
    out.summary["replicas"] = replicas;
    out.summary["a"] = a;
    out.summary["p_outside"] = static_cast<double>(outside) / replicas;
    out.summary["p_limit"] = std::exp(-a * a / (2.0 * chaos::g_const));
    out.rows = std::move(rows);
    return out;
}

// ------------------------------------------------------------------ ball-decay
inline ExperimentResult run_ball_decay(const Config& cfg) {
    const int N = static_cast<int>(cfg.get_int("N", 1024));
    const int replicas = static_cast<int>(cfg.get_int("replicas", 200));
    const std::uint64_t seed = cfg.get_u64("seed", 1);
    const double delta = cfg.get_real("delta", 0.4);
    const int k_max = detail::kmax_of(N, delta);
    if (k_max < 3) throw ConfigError("ball-decay: k_max(N) below 3; increase N");
    const auto dom = lattice::discretize(cfg.domain_shape(), N);

    struct Row {
        std::uint64_t seed = 0;
        lattice::Point x;
        double t = 0.0;
        std::vector<double> mass; // k = 2..k_max
    };
    const auto data = detail::run_replicas<Row>(
        replicas, detail::thread_count(cfg), [&](int r) {
            Row row;
            row.seed = rng::derive_seed(seed, static_cast<std::uint64_t>(r));
            const auto f = gff::sample_spectral(dom, row.seed);
            const auto m = chaos::build_measure(f);
            const auto d = chaos::draw_point(m, rng::derive_seed(row.seed, 1));
            row.x = d.point;
            row.t = chaos::near_extremal_statistic(f, d);
            for (int k = 2; k <= k_max; ++k)
                row.mass.push_back(chaos::ball_mass(m, d.point, std::exp(-k)));
            return row;
        });

    std::vector<std::string> header{"replica", "seed", "x", "y", "t_statistic"};
    for (int k = 2; k <= k_max; ++k) header.push_back("M_" + std::to_string(k));
    io::CsvWriter rows(header);

    std::vector<std::vector<double>> neglog(static_cast<std::size_t>(k_max) + 1);
    std::vector<double> fit_x, fit_y;
    long skipped = 0;
    for (int r = 0; r < replicas; ++r) {
        const auto& row = data[static_cast<std::size_t>(r)];
        std::vector<std::string> cells{std::to_string(r), std::to_string(row.seed),
                                       std::to_string(row.x.x), std::to_string(row.x.y),
                                       detail::fmt(row.t)};
        for (int k = 2; k <= k_max; ++k) {
            const double mass = row.mass[static_cast<std::size_t>(k - 2)];
            cells.push_back(detail::fmt(mass));
            const double nl = -std::log(mass);
            neglog[static_cast<std::size_t>(k)].push_back(nl);
            if (k >= 3) {
                if (nl > 0.0) {
                    fit_x.push_back(std::log(static_cast<double>(k)));
                    fit_y.push_back(std::log(nl));
                } else {
                    ++skipped;
                }
            }
        }
        rows.add_row(cells);
    }

    nlohmann::json medians = nlohmann::json::array();
    for (int k = 2; k <= k_max; ++k)
        medians.push_back({{"k", k},
                           {"median_neglog_mass", stats::median(neglog[static_cast<std::size_t>(k)])}});

    ExperimentResult out;
    out.summary = detail::base_summary(cfg, "ball-decay");
    out.summary["N"] = N;
    out.summary["replicas"] = replicas;
    out.summary["delta"] = delta;
    out.summary["k_range"] = {{"k_min", 2}, {"k_fit_min", 3}, {"k_max", k_max}};
    out.summary["median_neglog"] = medians;
    out.summary["slope"] = stats::linear_fit(fit_x, fit_y).slope;
    out.summary["nonpositive_neglog_skipped"] = skipped;
    out.rows = std::move(rows);
    return out;
}

// ----------------------------------------------------------------------- spine
inline ExperimentResult run_spine(const Config& cfg) {
    const int N = static_cast<int>(cfg.get_int("N", 1024));
    const int replicas = static_cast<int>(cfg.get_int("replicas", 500));
    const std::uint64_t seed = cfg.get_u64("seed", 1);
    const double delta = cfg.get_real("delta", 0.4);
    const double eta = cfg.get_real("eta", 0.2);
    const int ell = static_cast<int>(cfg.get_int("ell", 10));
    const bool size_biased = cfg.get_string("spine.root", "center") == "size-biased";
    const bool with_xi = cfg.get_int("spine.xi", 1) != 0;
    const int redraw_budget = static_cast<int>(cfg.get_int("spine.redraw_budget", 1000));
    const auto dom = lattice::discretize(cfg.domain_shape(), N);

    const lattice::Point center{dom.x_lo + dom.width / 2, dom.y_lo + dom.height / 2};
    std::optional<lattice::ConcentricFrame> center_frame;
    std::optional<std::vector<double>> center_t;
    std::vector<std::uint8_t> interior_mask;
    if (!size_biased) {
        center_frame = lattice::build_frame(dom, center, delta);
        center_t = concentric::step_variances(nullptr, *center_frame);
    } else {
        // Size-biased roots are conditioned into the delta-interior, the
        // same restriction the near-extremal analysis imposes on X-hat.
        interior_mask.assign(dom.size(), 0);
        const auto dist = dom.complement_distance();
        for (std::size_t i = 0; i < dom.size(); ++i)
            interior_mask[i] = static_cast<double>(dist[i]) > delta * N ? 1 : 0;
    }

    struct Row {
        std::uint64_t seed = 0;
        lattice::Point root;
        bool skipped = false;
        int n = 0, K = 0;
        std::vector<double> S, S_hat, S_tilde, xi, t;
    };
    const auto data = detail::run_replicas<Row>(
        replicas, detail::thread_count(cfg), [&](int r) {
            Row row;
            row.seed = rng::derive_seed(seed, static_cast<std::uint64_t>(r));
            const auto f = gff::sample_spectral(dom, row.seed);

            lattice::ConcentricFrame frame;
            std::vector<double> t_local;
            std::optional<chaos::CriticalMeasure> measure;
            if (with_xi || size_biased) measure = chaos::build_measure(f);
            if (size_biased) {
                row.skipped = true;
                for (int attempt = 0; attempt < redraw_budget; ++attempt) {
                    const auto d = chaos::draw_point(
                        *measure, rng::derive_seed(row.seed, 1 + static_cast<std::uint64_t>(attempt)));
                    const auto idx = dom.site_index(d.point.x, d.point.y);
                    if (interior_mask[static_cast<std::size_t>(idx)]) {
                        row.root = d.point;
                        row.skipped = false;
                        break;
                    }
                }
                if (row.skipped) return row;
                frame = lattice::build_frame(dom, row.root, delta);
                t_local = concentric::step_variances(nullptr, frame);
            } else {
                row.root = center;
                frame = *center_frame;
                t_local = *center_t;
            }

            row.n = frame.n;
            row.t = t_local;
            row.S = concentric::spine_walk(f, frame);
            const double m_N = chaos::m_centering(static_cast<double>(N));
            const auto b = concentric::centering_gaps(N, frame.n);
            const double t_n = t_local[static_cast<std::size_t>(frame.n)];
            for (int k = 0; k <= frame.n; ++k) {
                const double s = row.S[static_cast<std::size_t>(k)];
                row.S_hat.push_back(-chaos::alpha_const * s +
                                    chaos::alpha_const *
                                        (t_local[static_cast<std::size_t>(k)] / t_n) * m_N);
                row.S_tilde.push_back(-chaos::alpha_const * s +
                                      chaos::alpha_const * b[static_cast<std::size_t>(k)]);
            }
            if (with_xi) {
                row.xi.assign(static_cast<std::size_t>(frame.n) + 1,
                              std::numeric_limits<double>::quiet_NaN());
                for (int k = 1; k <= frame.n; ++k) {
                    try {
                        row.xi[static_cast<std::size_t>(k)] =
                            concentric::extract_xi(*measure, row.S, frame, k);
                    } catch (const concentric::EmptyAnnulus&) {
                    }
                }
                row.K = concentric::control_variable(row.xi, eta, ell, frame.n);
            }
            return row;
        });

    io::CsvWriter rows({"replica", "seed", "root_x", "root_y", "k", "S", "S_hat", "S_tilde",
                        "Xi", "K"});
    int n_common = 0;
    for (const auto& row : data)
        if (!row.skipped) n_common = std::max(n_common, row.n);

    std::vector<std::vector<double>> alpha_s(static_cast<std::size_t>(n_common) + 1);
    std::vector<long> xi_exceed(static_cast<std::size_t>(n_common) + 1, 0);
    std::vector<long> xi_count(static_cast<std::size_t>(n_common) + 1, 0);
    long skipped = 0;
    for (int r = 0; r < replicas; ++r) {
        const auto& row = data[static_cast<std::size_t>(r)];
        if (row.skipped) {
            ++skipped;
            continue;
        }
        for (int k = 0; k <= row.n; ++k) {
            const double xi_k = with_xi ? row.xi[static_cast<std::size_t>(k)]
                                        : std::numeric_limits<double>::quiet_NaN();
            rows.add_row({std::to_string(r), std::to_string(row.seed),
                          std::to_string(row.root.x), std::to_string(row.root.y),
                          std::to_string(k), detail::fmt(row.S[static_cast<std::size_t>(k)]),
                          detail::fmt(row.S_hat[static_cast<std::size_t>(k)]),
                          detail::fmt(row.S_tilde[static_cast<std::size_t>(k)]),
                          detail::fmt(xi_k), std::to_string(row.K)});
            alpha_s[static_cast<std::size_t>(k)].push_back(
                chaos::alpha_const * row.S[static_cast<std::size_t>(k)]);
            if (with_xi && k >= 1 && k <= row.n) {
                ++xi_count[static_cast<std::size_t>(k)];
                if (!(std::abs(xi_k) <= std::pow(static_cast<double>(k), eta)))
                    ++xi_exceed[static_cast<std::size_t>(k)];
            }
        }
    }

    ExperimentResult out;
    out.summary = detail::base_summary(cfg, "spine");
    out.summary["N"] = N;
    out.summary["replicas"] = replicas;
    out.summary["skipped_roots"] = skipped;
    out.summary["delta"] = delta;
    out.summary["eta"] = eta;
    out.summary["ell"] = ell;
    out.summary["root_mode"] = size_biased ? "size-biased" : "center";
    nlohmann::json per_k = nlohmann::json::array();
    const auto& t_ref = size_biased ? data.front().t : *center_t;
    for (int k = 0; k <= n_common; ++k) {
        nlohmann::json entry{{"k", k}};
        if (!size_biased && k < static_cast<int>(t_ref.size()))
            entry["t_k"] = t_ref[static_cast<std::size_t>(k)];
        if (alpha_s[static_cast<std::size_t>(k)].size() >= 2)
            entry["var_alpha_S_empirical"] = stats::variance(alpha_s[static_cast<std::size_t>(k)]);
        if (with_xi && xi_count[static_cast<std::size_t>(k)] > 0)
            entry["p_xi_exceed"] = static_cast<double>(xi_exceed[static_cast<std::size_t>(k)]) /
                                   static_cast<double>(xi_count[static_cast<std::size_t>(k)]);
        per_k.push_back(entry);
    }
    out.summary["per_k"] = per_k;
    out.rows = std::move(rows);
    return out;
}

// ----------------------------------------------------------------------- motoo
inline ExperimentResult run_motoo(const Config& cfg) {
    const auto g = cfg.gauge_spec("gauge");
    const auto horizons = cfg.get_real_list("motoo.horizons", {1000.0, 100000.0});
    const double t_start = cfg.get_real("motoo.t_start", 10.0);
    const int paths = static_cast<int>(cfg.get_int("motoo.paths", 1000));
    const double res = cfg.get_real("motoo.resolution", 0.1);
    const double fine = cfg.get_real("motoo.fine_resolution", 0.01);
    const std::uint64_t seed = cfg.get_u64("seed", 1);

    const auto rep = bessel::motoo_report(g, horizons, t_start, paths, seed, res, fine);

    io::CsvWriter rows({"T", "stay_above_fraction"});
    nlohmann::json table = nlohmann::json::array();
    for (std::size_t i = 0; i < rep.horizons.size(); ++i) {
        rows.add_row({detail::fmt(rep.horizons[i]), detail::fmt(rep.fractions[i])});
        table.push_back({{"T", rep.horizons[i]}, {"fraction", rep.fractions[i]}});
    }

    ExperimentResult out;
    out.summary = detail::base_summary(cfg, "motoo");
    out.summary["I_psi_class"] = gauge::to_string(gauge::classify_I_psi(g));
    out.summary["fractions"] = table;
    out.summary["n_paths"] = paths;
    out.summary["t_start"] = t_start;
    out.summary["resolution"] = res;
    out.rows = std::move(rows);
    return out;
}

// ---------------------------------------------------------------- bridge-limit
inline ExperimentResult run_bridge_limit(const Config& cfg) {
    const double v = cfg.get_real("bridge.v", 1.0);
    const double b = cfg.get_real("bridge.b", 1.0);
    const auto t_list = cfg.get_real_list("bridge.T_list", {10.0, 100.0});
    const int paths = static_cast<int>(cfg.get_int("bridge.paths", 2000));
    const double endpoint = cfg.get_real("bridge.endpoint", 0.0);
    const double dt = cfg.get_real("bridge.dt", 0.1);
    const std::uint64_t seed = cfg.get_u64("seed", 1);

    const auto rep = bessel::bridge_to_bessel_check(v, b, t_list, paths, seed, endpoint, dt);

    io::CsvWriter rows({"T", "ks_p_half", "ks_p_end", "acceptance"});
    nlohmann::json table = nlohmann::json::array();
    for (std::size_t i = 0; i < rep.horizons.size(); ++i) {
        rows.add_row({detail::fmt(rep.horizons[i]), detail::fmt(rep.p_half[i]),
                      detail::fmt(rep.p_end[i]), detail::fmt(rep.acceptance[i])});
        table.push_back({{"T", rep.horizons[i]},
                         {"ks_p_half", rep.p_half[i]},
                         {"ks_p_end", rep.p_end[i]},
                         {"acceptance", rep.acceptance[i]}});
    }

    ExperimentResult out;
    out.summary = detail::base_summary(cfg, "bridge-limit");
    out.summary["v"] = v;
    out.summary["b"] = b;
    out.summary["endpoint"] = endpoint;
    out.summary["n_paths"] = paths;
    out.summary["per_T"] = table;
    out.rows = std::move(rows);
    return out;
}

// ------------------------------------------------------------------- dichotomy
inline ExperimentResult run_dichotomy(const Config& cfg) {
    const int N = static_cast<int>(cfg.get_int("N", 1024));
    const int replicas = static_cast<int>(cfg.get_int("replicas", 200));
    const std::uint64_t seed = cfg.get_u64("seed", 1);
    const int k_lo = static_cast<int>(cfg.get_int("dichotomy.k_lo", 3));
    const int k_hi = static_cast<int>(cfg.get_int("dichotomy.k_hi", 8));
    const double threshold = cfg.get_real("dichotomy.threshold", 1.0);
    const auto dom = lattice::discretize(cfg.domain_shape(), N);

    const auto g_div = cfg.gauge_spec("gauge");
    const auto g_conv = cfg.gauge_spec("gauge2");
    const auto class_div = gauge::classify_I_psi(g_div);
    const auto class_conv = gauge::classify_I_psi(g_conv);
    if (class_div != gauge::IntegralClass::Divergent ||
        class_conv != gauge::IntegralClass::Convergent)
        throw ConfigError("dichotomy: gauge must be divergent and gauge2 convergent");

    std::vector<double> phi_div, phi_conv;
    for (int k = k_lo; k <= k_hi; ++k) {
        phi_div.push_back(gauge::eval_phi(g_div, std::exp(-k)));
        phi_conv.push_back(gauge::eval_phi(g_conv, std::exp(-k)));
    }

    struct Row {
        std::uint64_t seed = 0;
        std::vector<double> mass;
    };
    const auto data = detail::run_replicas<Row>(
        replicas, detail::thread_count(cfg), [&](int r) {
            Row row;
            row.seed = rng::derive_seed(seed, static_cast<std::uint64_t>(r));
            const auto f = gff::sample_spectral(dom, row.seed);
            const auto m = chaos::build_measure(f);
            const auto d = chaos::draw_point(m, rng::derive_seed(row.seed, 1));
            for (int k = k_lo; k <= k_hi; ++k)
                row.mass.push_back(chaos::ball_mass(m, d.point, std::exp(-k)));
            return row;
        });

    io::CsvWriter rows({"replica", "seed", "k", "mass", "ratio_divergent", "ratio_convergent"});
    const std::size_t n_k = static_cast<std::size_t>(k_hi - k_lo + 1);
    std::vector<std::vector<double>> r_div(n_k), r_conv(n_k);
    long exceed_div = 0, exceed_conv = 0;
    for (int r = 0; r < replicas; ++r) {
        const auto& row = data[static_cast<std::size_t>(r)];
        double max_div = 0.0, max_conv = 0.0;
        for (std::size_t i = 0; i < n_k; ++i) {
            const double rd = row.mass[i] / phi_div[i];
            const double rc = row.mass[i] / phi_conv[i];
            r_div[i].push_back(rd);
            r_conv[i].push_back(rc);
            max_div = std::max(max_div, rd);
            max_conv = std::max(max_conv, rc);
            rows.add_row({std::to_string(r), std::to_string(row.seed),
                          std::to_string(k_lo + static_cast<int>(i)), detail::fmt(row.mass[i]),
                          detail::fmt(rd), detail::fmt(rc)});
        }
        if (max_div > threshold) ++exceed_div;
        if (max_conv > threshold) ++exceed_conv;
    }

    std::vector<double> ks, med_div, med_conv;
    nlohmann::json medians = nlohmann::json::array();
    for (std::size_t i = 0; i < n_k; ++i) {
        ks.push_back(static_cast<double>(k_lo + static_cast<int>(i)));
        med_div.push_back(stats::median(r_div[i]));
        med_conv.push_back(stats::median(r_conv[i]));
        medians.push_back({{"k", k_lo + static_cast<int>(i)},
                           {"median_ratio_divergent", med_div.back()},
                           {"median_ratio_convergent", med_conv.back()}});
    }

    ExperimentResult out;
    out.summary = detail::base_summary(cfg, "dichotomy");
    out.summary["N"] = N;
    out.summary["replicas"] = replicas;
    out.summary["k_range"] = {{"k_lo", k_lo}, {"k_hi", k_hi}};
    out.summary["gauge_divergent_class"] = gauge::to_string(class_div);
    out.summary["gauge_convergent_class"] = gauge::to_string(class_conv);
    out.summary["medians"] = medians;
    out.summary["spearman_divergent"] = stats::spearman_rho(ks, med_div);
    out.summary["spearman_convergent"] = stats::spearman_rho(ks, med_conv);
    out.summary["threshold"] = threshold;
    out.summary["fraction_max_exceeds_divergent"] =
        static_cast<double>(exceed_div) / replicas;
    out.summary["fraction_max_exceeds_convergent"] =
        static_cast<double>(exceed_conv) / replicas;
    out.rows = std::move(rows);
    return out;
}

// ----------------------------------------------------------- hausdorff-fixture
inline ExperimentResult run_hausdorff_fixture(const Config& cfg) {
    const int N = static_cast<int>(cfg.get_int("N", 64));
    const std::uint64_t seed = cfg.get_u64("seed", 1);

    hausdorff::SetDescriptor segment;
    for (int i = 0; i <= (1 << 12); ++i)
        segment.points.push_back({static_cast<double>(i) / (1 << 12), 0.25});
    hausdorff::SetDescriptor square;
    square.boxes.push_back(lattice::Rect{0, 0, 1, 1});
    hausdorff::SetDescriptor dust;
    {
        std::vector<double> xs{0.0};
        double len = 1.0;
        for (int d = 0; d < 5; ++d) {
            len /= 3.0;
            std::vector<double> next;
            for (double x : xs) {
                next.push_back(x);
                next.push_back(x + 2.0 * len);
            }
            xs.swap(next);
        }
        for (double x : xs)
            for (double y : xs) dust.points.push_back({x, y});
    }

    const std::vector<double> s_grid{0.01, 2.0};
    const double dim_segment = hausdorff::dim_estimate(segment, s_grid);
    const double dim_square = hausdorff::dim_estimate(square, s_grid);
    const double dim_dust = hausdorff::dim_estimate(dust, s_grid);

    // Lebesgue fixture: uniform weights with total mass one.
    const auto dom = lattice::discretize(cfg.domain_shape(), N);
    gff::FieldSample flat;
    flat.domain = &dom;
    const double level =
        chaos::m_centering(static_cast<double>(N)) +
        std::log(std::log(static_cast<double>(N)) / static_cast<double>(dom.size())) /
            chaos::alpha_const;
    flat.values.assign(dom.size(), level);
    const auto lebesgue = chaos::build_measure(flat);
    std::vector<chaos::SizeBiasedDraw> draws;
    for (int i = 0; i < 100; ++i)
        draws.push_back(chaos::draw_point(lebesgue, rng::derive_seed(seed, i)));
    const std::vector<double> radii{std::exp(-2.0), std::exp(-3.0), std::exp(-4.0)};
    const auto rep2 = hausdorff::rogers_taylor_classify(lebesgue, draws,
                                                        gauge::PowerGauge{2.0}, radii, 0.5, 100.0);
    const auto rep3 = hausdorff::rogers_taylor_classify(lebesgue, draws,
                                                        gauge::PowerGauge{3.0}, radii, 0.5, 100.0);

    io::CsvWriter rows({"fixture", "value"});
    rows.add_row({"dim_segment", detail::fmt(dim_segment)});
    rows.add_row({"dim_square", detail::fmt(dim_square)});
    rows.add_row({"dim_cantor_dust", detail::fmt(dim_dust)});
    rows.add_row({"rt_r2", hausdorff::to_string(rep2.classification)});
    rows.add_row({"rt_r3", hausdorff::to_string(rep3.classification)});

    ExperimentResult out;
    out.summary = detail::base_summary(cfg, "hausdorff-fixture");
    out.summary["dim_segment"] = dim_segment;
    out.summary["dim_square"] = dim_square;
    out.summary["dim_cantor_dust"] = dim_dust;
    out.summary["dim_cantor_expected"] = 2.0 * std::log(2.0) / std::log(3.0);
    out.summary["rt_lebesgue_r2"] = hausdorff::to_string(rep2.classification);
    out.summary["rt_lebesgue_r3"] = hausdorff::to_string(rep3.classification);
    out.rows = std::move(rows);
    return out;
}

// ----------------------------------------------------------- conditioned-ballot
inline ExperimentResult run_conditioned_ballot(const Config& cfg) {
    const auto n_list = cfg.get_real_list("ballot.N_list", {128.0, 256.0, 512.0});
    const auto t_grid = cfg.get_real_list("ballot.t_grid", {0.0, 0.5, 1.0, 1.5});
    const double u = cfg.get_real("u", 1.0);
    const int replicas = static_cast<int>(cfg.get_int("replicas", 2000));
    const std::uint64_t seed = cfg.get_u64("seed", 1);
    const auto shape = cfg.domain_shape();

    io::CsvWriter rows({"N", "t", "accepted", "replicas", "p", "rescaled"});
    nlohmann::json cells = nlohmann::json::array();
    std::vector<std::vector<double>> rescaled_by_t(t_grid.size());
    std::uint64_t cell_index = 0;
    for (const double Nd : n_list) {
        const int N = static_cast<int>(Nd);
        const auto dom = lattice::discretize(shape, N);
        const lattice::Point center{dom.x_lo + dom.width / 2, dom.y_lo + dom.height / 2};
        const double m_N = chaos::m_centering(static_cast<double>(N));
        const double sqrt_log = std::sqrt(std::log(static_cast<double>(N)));
        for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
            const double t = t_grid[ti];
            const double pinned = m_N - t * sqrt_log;
            const std::uint64_t cell_seed = rng::derive_seed(seed, cell_index++);
            const auto accepted_flags = detail::run_replicas<int>(
                replicas, detail::thread_count(cfg), [&](int r) {
                    const auto f = gff::condition_root(dom, nullptr, center, pinned,
                                                       rng::derive_seed(cell_seed, r));
                    return gff::filter_max(f, m_N + u) ? 1 : 0;
                });
            long accepted = 0;
            for (int flag : accepted_flags) accepted += flag;
            const double p = static_cast<double>(accepted) / replicas;
            const double rescaled = sqrt_log * p / (1.0 + t);
            rescaled_by_t[ti].push_back(rescaled);
            rows.add_row({std::to_string(N), detail::fmt(t), std::to_string(accepted),
                          std::to_string(replicas), detail::fmt(p), detail::fmt(rescaled)});
            cells.push_back({{"N", N}, {"t", t}, {"p", p}, {"rescaled", rescaled}});
        }
    }

    // spread of the rescaled statistic across N, per t
    nlohmann::json spreads = nlohmann::json::array();
    for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
        const auto [lo, hi] =
            std::minmax_element(rescaled_by_t[ti].begin(), rescaled_by_t[ti].end());
        spreads.push_back({{"t", t_grid[ti]},
                           {"min_rescaled", *lo},
                           {"max_rescaled", *hi},
                           {"ratio", *lo > 0.0 ? *hi / *lo : 0.0}});
    }

    ExperimentResult out;
    out.summary = detail::base_summary(cfg, "conditioned-ballot");
    out.summary["u"] = u;
    out.summary["replicas"] = replicas;
    out.summary["cells"] = cells;
    out.summary["spread"] = spreads;
    out.rows = std::move(rows);
    return out;
}

// ------------------------------------------------------------------ dispatcher
inline ExperimentResult run_experiment(const std::string& name, const Config& cfg) {
    if (static_cast<int>(cfg.get_int("replicas", 1)) < 1)
        throw ConfigError("config: replicas must be >= 1");
    if (cfg.has("N") && cfg.get_int("N") < 3) throw ConfigError("config: N must be >= 3");
    if (cfg.has("eta")) {
        const double eta = cfg.get_real("eta");
        if (!(eta > 0.0 && eta < 0.25)) throw ConfigError("config: eta must lie in (0, 1/4)");
    }

    if (name == "green-check") return run_green_check(cfg);
    if (name == "field-stats") return run_field_stats(cfg);
    if (name == "max-tail") return run_max_tail(cfg);
    if (name == "near-extremal") return run_near_extremal(cfg);
    if (name == "ball-decay") return run_ball_decay(cfg);
    if (name == "spine") return run_spine(cfg);
    if (name == "motoo") return run_motoo(cfg);
    if (name == "bridge-limit") return run_bridge_limit(cfg);
    if (name == "dichotomy") return run_dichotomy(cfg);
    if (name == "hausdorff-fixture") return run_hausdorff_fixture(cfg);
    if (name == "conditioned-ballot") return run_conditioned_ballot(cfg);
    throw ConfigError("unknown experiment '" + name + "'");
}

} // namespace clqg::harness
