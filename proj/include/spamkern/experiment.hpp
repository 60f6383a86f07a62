#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spamkern/kernels.hpp"

namespace spamkern {

enum class Mode { fit, sweep_n, sweep_d, sweep_s, lower_bound, packing, complexity, sandwich };

std::optional<Mode> parse_mode(std::string_view name);
const char* to_string(Mode mode);

struct KernelSpec {
    std::string kind = "sobolev";  // "sobolev" or "finite-rank"
    double alpha = 1.0;
    std::size_t m = 4;
    std::size_t m_trunc = 1000;

    SpectralKernel build() const;
};

struct ExperimentConfig {
    Mode mode = Mode::fit;
    KernelSpec kernel;
    std::vector<std::size_t> n_grid{200};
    std::vector<std::size_t> d_grid{10};
    std::vector<std::size_t> s_grid{2};
    std::size_t replicates = 1;
    double kappa = 1.0;
    double c_mult = 16.0;
    std::uint64_t seed = 0;
    double mu = 0.0;
    double noise_std = 1.0;
    double signal_radius = 1.0;
    std::size_t max_sweeps = 10000;
    double kkt_tol = 1e-6;
    // complexity
    std::vector<double> t_grid{0.05, 0.1, 0.2, 0.4};
    std::size_t reps = 200;
    // sandwich: t = t_multiplier * nu_n
    double t_multiplier = 10.0;
    std::size_t trials = 200;
    // packing / lower-bound
    std::size_t alphabet = 2;
    std::size_t max_size = 1000;
    double scale = 0.1;
    double bound_b = 1.0;
    bool record_wall_time = false;
};

/// Parses a flat JSON object. Unknown keys and malformed values throw
/// config_error. When `mode` is given it must agree with any "mode" key.
ExperimentConfig parse_config(std::string_view json_text, std::optional<Mode> mode = std::nullopt);
ExperimentConfig load_config(const std::string& path, std::optional<Mode> mode = std::nullopt);

/// CSV table of preformatted cells; an empty cell is a missing value.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const;  // throws config_error when absent
};

std::string format_real(double value);  // 17 significant digits

void write_csv(const Table& table, const std::string& path);
std::string to_csv(const Table& table);
Table read_csv(const std::string& path);
Table parse_csv(std::string_view text);

std::vector<std::string> sweep_columns();

/// Runs every (grid point, replicate) task on `threads` workers and returns
/// rows in grid order.
Table run(const ExperimentConfig& config, std::size_t threads = 1);

struct Slope {
    double slope = 0.0;
    double std_err = 0.0;
};

/// OLS of log(median y) on log x, the median taken over rows sharing an x
/// value. Rows with an empty y cell are skipped.
Slope fit_slope(const Table& table, std::string_view x_col, std::string_view y_col);

/// Same regression on raw (x, y) pairs.
Slope fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace spamkern
