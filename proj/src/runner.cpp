#include "phsub/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>
#include <utility>

#include <CLI11.hpp>
#include <json.hpp>

#include "phsub/analysis.hpp"
#include "phsub/detection.hpp"

namespace phsub::cli {

namespace {

using json = nlohmann::json;
using Provenance = std::vector<std::pair<std::string, std::string>>;

// Round-trips a value through the artifact precision so JSON and CSV agree.
double rounded(double x) {
    if (!std::isfinite(x)) return x;
    return std::stod(format_number(x));
}

template <class T>
std::string join(const std::vector<T>& xs, const char* sep = ",") {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s += sep;
        if constexpr (std::is_floating_point_v<T>) {
            s += format_number(xs[i]);
        } else {
            s += std::to_string(xs[i]);
        }
    }
    return s;
}

// Runs f(0..n-1) on up to `jobs` threads. The first exception is rethrown after all workers finish.
template <class F>
void parallel_for(std::size_t n, int jobs, F&& f) {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
            try {
                f(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const auto extra = static_cast<std::size_t>(std::max(jobs, 1) - 1);
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < std::min(extra, n); ++k) pool.emplace_back(worker);
    worker();
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

Provenance provenance(const RunConfig& c, const std::string& command) {
    Provenance p{
        {"command", command},
        {"r", join(c.r_values)},
        {"N", join(c.n_values)},
        {"eta_b", format_number(c.eta_b)},
        {"eta_outer", format_number(c.eta_outer)},
        {"kappa", format_number(c.kappa)},
        {"z_mode", c.z ? "explicit" : "ratio"},
        {"ratio", c.z ? "" : format_number(c.ratio)},
        {"z", format_number(c.resolved_z())},
        {"theta", format_number(c.theta())},
        {"tail_tol", format_number(c.tail_tolerance)},
        {"lmax_override", c.l_max ? std::to_string(*c.l_max) : "auto"},
    };
    std::vector<int> lmax;
    for (double r : c.r_values) lmax.push_back(c.resolved_lmax(r));
    p.emplace_back("lmax", join(lmax));
    p.emplace_back("format", c.format == OutputFormat::Csv ? "csv" : "json");
    p.emplace_back("jobs", std::to_string(c.jobs));
    return p;
}

json provenance_json(const Provenance& p) {
    json j = json::object();
    for (const auto& [k, v] : p) j[k] = v;
    return j;
}

void write_comment_header(std::ostringstream& os, const Provenance& p) {
    os << "# phsub\n";
    for (const auto& [k, v] : p) os << "# " << k << '=' << v << '\n';
}

std::vector<EvolvedSource> evolve_all(const RunConfig& config) {
    const TrimerUnitary u = unitary_from_theta(config.theta());
    std::vector<EvolvedSource> evolved(config.r_values.size());
    parallel_for(evolved.size(), config.jobs, [&](std::size_t i) {
        evolved[i] = evolve_source(Complex{config.r_values[i], 0.0}, u, config.l_max, config.tail_tolerance);
    });
    return evolved;
}

void require_points(const RunConfig& config) {
    if (config.r_values.empty()) throw UsageError("at least one squeeze value (--r) is required");
    if (config.n_values.empty()) throw UsageError("at least one subtracted count (--N) is required");
}

}  // namespace

std::string format_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

void RunConfig::validate() const {
    for (double r : r_values) {
        if (!(r > 0.0 && r < 1.0)) throw DomainError("every |r| must lie in (0, 1); got " + format_number(r));
    }
    for (int n : n_values) {
        if (n < 0) throw DomainError("subtracted counts must be non-negative");
    }
    if (!(eta_b > 0.0 && eta_b <= 1.0)) throw DomainError("eta_b must lie in (0, 1]");
    if (!(eta_outer > 0.0 && eta_outer <= 1.0)) throw DomainError("eta_outer must lie in (0, 1]");
    if (!(kappa > 0.0)) throw DomainError("kappa must be positive");
    if (z && !(*z >= 0.0)) throw DomainError("z must be non-negative");
    if (!(ratio >= 0.0)) throw DomainError("intensity ratio must be non-negative");
    if (l_max && *l_max < 0) throw DomainError("l_max must be non-negative");
    if (!(tail_tolerance > 0.0)) throw DomainError("tail tolerance must be positive");
    if (jobs < 1) throw DomainError("jobs must be at least 1");
}

double RunConfig::resolved_z() const { return z ? *z : solve_zf(kappa, ratio); }

double RunConfig::theta() const { return CouplerConfig{kappa, resolved_z(), 0.0}.theta(); }

int RunConfig::resolved_lmax(double abs_r) const {
    return l_max ? *l_max : observable_lmax(abs_r, tail_tolerance);
}

std::string cmd_jointdist(const RunConfig& config) {
    require_points(config);
    config.validate();
    const auto evolved = evolve_all(config);

    struct Cell {
        std::optional<JointDistribution> dist;
        std::string error;
    };
    const std::size_t nn = config.n_values.size();
    std::vector<Cell> cells(evolved.size() * nn);
    parallel_for(cells.size(), config.jobs, [&](std::size_t k) {
        try {
            cells[k].dist = heralded_distribution(evolved[k / nn], config.n_values[k % nn], config.eta_b,
                                                  config.eta_outer);
        } catch (const HeraldImpossibleError& e) {
            cells[k].error = e.what();
        }
    });

    const Provenance prov = provenance(config, "jointdist");
    std::ostringstream os;
    if (config.format == OutputFormat::Json) {
        json doc;
        doc["config"] = provenance_json(prov);
        doc["distributions"] = json::array();
        for (std::size_t k = 0; k < cells.size(); ++k) {
            json entry;
            entry["params"] = {{"r", rounded(config.r_values[k / nn])},
                               {"N", config.n_values[k % nn]},
                               {"eta_b", rounded(config.eta_b)},
                               {"eta_a", rounded(config.eta_outer)},
                               {"eta_c", rounded(config.eta_outer)},
                               {"theta", rounded(config.theta())},
                               {"lmax", evolved[k / nn].source.l_max}};
            if (!cells[k].dist) {
                entry["error"] = cells[k].error;
            } else {
                const auto& d = *cells[k].dist;
                const int extent = d.reported_extent();
                json matrix = json::array();
                for (int m = 0; m < extent; ++m) {
                    json row = json::array();
                    for (int n = 0; n < extent; ++n) row.push_back(rounded(d.probabilities(m, n)));
                    matrix.push_back(std::move(row));
                }
                entry["matrix"] = std::move(matrix);
                entry["success_probability"] = rounded(d.success_probability);
            }
            doc["distributions"].push_back(std::move(entry));
        }
        os << doc.dump(2) << '\n';
    } else {
        write_comment_header(os, prov);
        os << "r,N,eta_b,eta_outer,theta,success_probability,m,n,probability\n";
        for (std::size_t k = 0; k < cells.size(); ++k) {
            const std::string prefix = format_number(config.r_values[k / nn]) + ',' +
                                       std::to_string(config.n_values[k % nn]) + ',' + format_number(config.eta_b) +
                                       ',' + format_number(config.eta_outer) + ',' + format_number(config.theta()) +
                                       ',';
            if (!cells[k].dist) {
                os << "# error r=" << format_number(config.r_values[k / nn]) << " N=" << config.n_values[k % nn]
                   << ": " << cells[k].error << '\n';
                continue;
            }
            const auto& d = *cells[k].dist;
            const int extent = d.reported_extent();
            for (int m = 0; m < extent; ++m) {
                for (int n = 0; n < extent; ++n) {
                    os << prefix << format_number(d.success_probability) << ',' << m << ',' << n << ','
                       << format_number(d.probabilities(m, n)) << '\n';
                }
            }
        }
    }
    return os.str();
}

std::string cmd_sweep(const RunConfig& config, Observable observable) {
    require_points(config);
    config.validate();
    if (observable == Observable::Xi && (config.eta_b != 1.0 || config.eta_outer != 1.0)) {
        throw UsageError("the xi sweep requires ideal detection (eta_b = eta_outer = 1)");
    }
    const auto evolved = evolve_all(config);

    struct Row {
        double value = std::nan("");
        std::string error;
    };
    const std::size_t nn = config.n_values.size();
    std::vector<Row> rows(evolved.size() * nn);
    parallel_for(rows.size(), config.jobs, [&](std::size_t k) {
        try {
            rows[k].value =
                observable_value(evolved[k / nn], observable, config.n_values[k % nn], config.eta_b, config.eta_outer);
        } catch (const HeraldImpossibleError& e) {
            rows[k].error = e.what();
        }
    });

    Provenance prov = provenance(config, "sweep");
    prov.emplace_back("observable", std::string(observable_name(observable)));
    std::ostringstream os;
    if (config.format == OutputFormat::Json) {
        json doc;
        doc["config"] = provenance_json(prov);
        doc["rows"] = json::array();
        for (std::size_t k = 0; k < rows.size(); ++k) {
            json row = {{"r", rounded(config.r_values[k / nn])},
                        {"N", config.n_values[k % nn]},
                        {"eta_b", rounded(config.eta_b)},
                        {"eta_outer", rounded(config.eta_outer)},
                        {"theta", rounded(config.theta())},
                        {"observable", std::string(observable_name(observable))}};
            if (rows[k].error.empty()) {
                row["value"] = rounded(rows[k].value);
            } else {
                row["value"] = nullptr;
                row["error"] = rows[k].error;
            }
            doc["rows"].push_back(std::move(row));
        }
        os << doc.dump(2) << '\n';
    } else {
        write_comment_header(os, prov);
        os << "r,N,eta_b,eta_outer,theta,observable,value\n";
        for (std::size_t k = 0; k < rows.size(); ++k) {
            os << format_number(config.r_values[k / nn]) << ',' << config.n_values[k % nn] << ','
               << format_number(config.eta_b) << ',' << format_number(config.eta_outer) << ','
               << format_number(config.theta()) << ',' << observable_name(observable) << ','
               << format_number(rows[k].value) << '\n';
        }
        for (std::size_t k = 0; k < rows.size(); ++k) {
            if (!rows[k].error.empty()) {
                os << "# error r=" << format_number(config.r_values[k / nn]) << " N=" << config.n_values[k % nn]
                   << ": " << rows[k].error << '\n';
            }
        }
    }
    return os.str();
}

bool ValidationReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.passed; });
}

std::string ValidationReport::render() const {
    std::ostringstream os;
    if (config.format == OutputFormat::Json) {
        json doc;
        doc["config"] = provenance_json(provenance(config, "validate"));
        doc["checks"] = json::array();
        for (const auto& c : checks) {
            doc["checks"].push_back({{"name", c.name},
                                     {"passed", c.passed},
                                     {"residual", rounded(c.residual)},
                                     {"tolerance", c.tolerance},
                                     {"detail", c.detail}});
        }
        doc["passed"] = passed();
        os << doc.dump(2) << '\n';
    } else {
        write_comment_header(os, provenance(config, "validate"));
        for (const auto& c : checks) {
            os << (c.passed ? "PASS " : "FAIL ") << c.name << " residual=" << format_number(c.residual)
               << " tol=" << format_number(c.tolerance);
            if (!c.detail.empty()) os << " (" << c.detail << ')';
            os << '\n';
        }
        os << (passed() ? "all checks passed\n" : "validation FAILED\n");
    }
    return os.str();
}

ValidationReport cmd_validate(const RunConfig& input_config, const ValidateOptions& options) {
    RunConfig config = input_config;
    if (config.r_values.empty()) config.r_values = {0.2, 0.6};
    config.validate();
    ValidationReport report;
    report.config = config;
    auto add = [&](std::string name, double residual, double tol, std::string detail = {}) {
        report.checks.push_back({std::move(name), residual < tol, residual, tol, std::move(detail)});
    };

    {
        std::mt19937_64 rng(20240501);
        std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
        double worst = 0.0;
        for (int k = 0; k < 100; ++k) {
            const auto u = unitary_from_theta(angle(rng)).entries;
            worst = std::max(worst, (u * u.adjoint() - Eigen::Matrix3cd::Identity()).cwiseAbs().maxCoeff());
        }
        add("unitarity", worst, 1e-12, "100 random angles");
    }
    {
        double worst = 0.0;
        for (int k = 0; k <= 20; ++k) {
            const double x = 0.5 * k;
            const double z = solve_zf(config.kappa, x);
            worst = std::max(worst, std::abs(intensity_ratio({config.kappa, z, 0.0}) - x));
        }
        add("zf_round_trip", worst, 1e-10, "ratio 0..10");
    }

    const double theta = config.theta();
    const CouplerConfig coupler{config.kappa, theta / (std::numbers::sqrt2 * config.kappa), 0.0};
    const TrimerUnitary u_multinomial = unitary_from_theta(theta + options.theta_perturbation);

    double oracle_gap = 0.0, norm_gap = 0.0, swap_gap = 0.0, parity = 0.0, asym = 0.0, norm_dist = 0.0;
    double worst_tail = 0.0, worst_conv = 0.0;
    std::string tail_detail, conv_detail;
    for (double r : config.r_values) {
        // Oracle comparison on totals <= 20.
        const auto small = prepare_input(SqueezeSource{Complex{r, 0.0}, std::min(config.resolved_lmax(r), 10)});
        const auto via_terms = evolve_multinomial(small, u_multinomial);
        const auto via_oracle = evolve_oracle(small, coupler);
        via_oracle.for_each([&](const OccupationTriple& t, Complex amp) {
            oracle_gap = std::max(oracle_gap, std::abs(amp - via_terms.amplitude(t)));
        });

        const int l_max = config.resolved_lmax(r);
        const auto input = prepare_input(SqueezeSource{Complex{r, 0.0}, l_max});
        const auto out = evolve_multinomial(input, u_multinomial);
        norm_gap = std::max(norm_gap, std::abs(out.norm_squared() - input.norm_squared()));
        out.for_each([&](const OccupationTriple& t, Complex amp) {
            swap_gap = std::max(swap_gap, std::abs(amp - out.amplitude({t.c, t.b, t.a})));
        });

        const EvolvedSource evolved{SqueezeSource{Complex{r, 0.0}, l_max}, u_multinomial, out};
        for (int n : config.n_values) {
            try {
                const auto ideal = heralded_distribution(evolved, n, 1.0, 1.0);
                for (Eigen::Index m = 0; m < ideal.probabilities.rows(); ++m) {
                    for (Eigen::Index k = 0; k < ideal.probabilities.cols(); ++k) {
                        if ((m + k + n) % 2 == 1) parity = std::max(parity, ideal.probabilities(m, k));
                    }
                }
                for (const auto& [eta_b, eta_outer] : {std::pair{config.eta_b, config.eta_outer}, std::pair{0.8, 0.8}}) {
                    const auto d = heralded_distribution(evolved, n, eta_b, eta_outer);
                    asym = std::max(asym, (d.probabilities - d.probabilities.transpose()).cwiseAbs().maxCoeff());
                    norm_dist = std::max(norm_dist, std::abs(d.total() - 1.0));
                }
            } catch (const HeraldImpossibleError&) {
            }
        }

        const double tail = truncation_tail(r, l_max);
        if (tail >= worst_tail) {
            worst_tail = tail;
            tail_detail = "r=" + format_number(r) + " lmax=" + std::to_string(l_max);
        }

        if (r <= 0.6) {
            const EvolvedSource bigger = evolve_source(Complex{r, 0.0}, u_multinomial, l_max + 4);
            for (int n : config.n_values) {
                try {
                    const double d0 = observable_value(evolved, Observable::DetM, n, config.eta_b, config.eta_outer);
                    const double d1 = observable_value(bigger, Observable::DetM, n, config.eta_b, config.eta_outer);
                    const double x0 = observable_value(evolved, Observable::Xi, n, 1.0, 1.0);
                    const double x1 = observable_value(bigger, Observable::Xi, n, 1.0, 1.0);
                    const double delta = std::max(std::abs(d1 - d0), std::abs(x1 - x0));
                    if (delta >= worst_conv) {
                        worst_conv = delta;
                        conv_detail = "lmax " + std::to_string(l_max) + " -> " + std::to_string(l_max + 4) +
                                      " at r=" + format_number(r);
                    }
                } catch (const HeraldImpossibleError&) {
                }
            }
        }
    }
    add("oracle_equivalence", oracle_gap, 1e-9, "totals <= 20");
    add("norm_preservation", norm_gap, 1e-10);
    add("exchange_symmetry", swap_gap, 1e-10, "amplitude (v1,v2,v3) vs (v3,v2,v1)");
    add("parity_selection", parity, 1e-12, "eta = 1, cells with m+n+N odd");
    add("distribution_symmetry", asym, 1e-10);
    add("distribution_normalization", norm_dist, 1e-9);
    add("truncation_tail", worst_tail, config.tail_tolerance, "tail mass " + format_number(worst_tail) + ", " + tail_detail);
    add("observable_convergence", worst_conv, 1e-8, conv_detail.empty() ? "no |r| <= 0.6 in grid" : conv_detail);
    return report;
}

namespace {

void emit(const RunConfig& config, const std::string& text, std::ostream& out) {
    if (config.output_path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(config.output_path, std::ios::binary);
    if (!file) throw UsageError("cannot open output file " + config.output_path);
    file << text;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Photon subtraction from a two-mode squeezed vacuum in a waveguide trimer"};
    app.set_config("--config", "", "Flat key=value file mirroring the long flags; flags take precedence");
    app.require_subcommand(1);

    RunConfig config;
    std::optional<double> z;
    std::optional<int> l_max;
    std::string format = "csv";
    app.add_option("--r", config.r_values, "Squeeze magnitudes |r|, comma separated")->delimiter(',');
    app.add_option("--N", config.n_values, "Subtracted photon counts, comma separated")->delimiter(',');
    app.add_option("--eta-b", config.eta_b, "Center detector efficiency")->capture_default_str();
    app.add_option("--eta-outer", config.eta_outer, "Outer detectors efficiency")->capture_default_str();
    app.add_option("--kappa", config.kappa, "Coupling constant")->capture_default_str();
    auto* z_opt = app.add_option("--z", z, "Explicit propagation length");
    auto* ratio_opt = app.add_option("--ratio", config.ratio, "Target I_center/I_outer solved for z")
                          ->capture_default_str();
    z_opt->excludes(ratio_opt);
    app.add_option("--lmax", l_max, "Override the squeeze-sum truncation");
    app.add_option("--tail-tol", config.tail_tolerance, "Truncation tail bound")->capture_default_str();
    app.add_option("--format", format, "Artifact format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app.add_option("--out", config.output_path, "Output file (default: standard output)");
    app.add_option("--jobs", config.jobs, "Worker threads")->capture_default_str();

    auto* jointdist = app.add_subcommand("jointdist", "Joint photon-number distributions at the outer ports");
    auto* sweep = app.add_subcommand("sweep", "Observable over the (r, N) grid");
    std::string observable = "meanphoton";
    sweep->add_option("--observable", observable, "meanphoton | detM | xi")
        ->check(CLI::IsMember({"meanphoton", "detM", "xi"}))
        ->capture_default_str();
    auto* validate = app.add_subcommand("validate", "Run the invariant checks and report residuals");
    ValidateOptions vopts;
    validate->add_option("--perturb-theta", vopts.theta_perturbation, "Test hook: offset Theta in one path")
        ->group("");
    auto* zf = app.add_subcommand("zf", "Coupling length for the target intensity ratio");
    for (auto* sub : {jointdist, sweep, validate, zf}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }
    config.z = z;
    config.l_max = l_max;
    config.format = format == "json" ? OutputFormat::Json : OutputFormat::Csv;

    try {
        if (*jointdist) {
            emit(config, cmd_jointdist(config), out);
        } else if (*sweep) {
            emit(config, cmd_sweep(config, *parse_observable(observable)), out);
        } else if (*validate) {
            const auto report = cmd_validate(config, vopts);
            emit(config, report.render(), out);
            return report.passed() ? kExitOk : kExitValidation;
        } else if (*zf) {
            config.validate();
            std::ostringstream os;
            os << "kappa=" << format_number(config.kappa) << " ratio=" << format_number(config.ratio)
               << " z_f=" << format_number(config.resolved_z()) << " theta=" << format_number(config.theta())
               << '\n';
            emit(config, os.str(), out);
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitDomain;
    }
    return kExitOk;
}

}  // namespace phsub::cli
