#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "phsub/errors.hpp"
#include "phsub/evolution.hpp"
#include "phsub/pipeline.hpp"
#include "phsub/trimer.hpp"

namespace phsub::cli {

/// Bad or inconsistent command-line input.
class UsageError : public Error {
public:
    using Error::Error;
};

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitDomain = 2,
    kExitValidation = 3,
};

enum class OutputFormat { Csv, Json };

struct RunConfig {
    std::vector<double> r_values;
    std::vector<int> n_values{0, 1, 2, 3};
    double eta_b = 1.0;
    double eta_outer = 1.0;
    double kappa = 1.0;
    std::optional<double> z;  // explicit length; otherwise solved from `ratio`
    double ratio = kDefaultSplitRatio;
    std::optional<int> l_max;
    double tail_tolerance = kDefaultTailTolerance;
    OutputFormat format = OutputFormat::Csv;
    std::string output_path;  // empty: standard output
    int jobs = 1;

    /// Throws DomainError for out-of-range physics parameters.
    void validate() const;
    double resolved_z() const;
    double theta() const;
    int resolved_lmax(double abs_r) const;
};

/// Twelve significant digits, "%.12g".
std::string format_number(double x);

/// Distributions for every (r, N); one per row, herald failures recorded inline.
std::string cmd_jointdist(const RunConfig& config);

/// Long-format (r, N, value) table, r major and N minor.
std::string cmd_sweep(const RunConfig& config, Observable observable);

struct ValidationCheck {
    std::string name;
    bool passed = false;
    double residual = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct ValidationReport {
    RunConfig config;  // as resolved for the run
    std::vector<ValidationCheck> checks;

    bool passed() const;
    std::string render() const;
};

struct ValidateOptions {
    /// Test hook: shifts Theta in the multinomial path only.
    double theta_perturbation = 0.0;
};

ValidationReport cmd_validate(const RunConfig& config, const ValidateOptions& options = {});

/// Full command-line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace phsub::cli
