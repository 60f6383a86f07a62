#include "spamkern/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <utility>

#include <json.hpp>

#include "spamkern/bounds.hpp"
#include "spamkern/error.hpp"
#include "spamkern/estimator.hpp"
#include "spamkern/rates.hpp"
#include "spamkern/rng.hpp"
#include "spamkern/simulate.hpp"

namespace spamkern {

namespace {

using json = nlohmann::json;
using Row = std::vector<std::string>;

constexpr std::pair<Mode, const char*> kModeNames[] = {
    {Mode::fit, "fit"},
    {Mode::sweep_n, "sweep-n"},
    {Mode::sweep_d, "sweep-d"},
    {Mode::sweep_s, "sweep-s"},
    {Mode::lower_bound, "lower-bound"},
    {Mode::packing, "packing"},
    {Mode::complexity, "complexity"},
    {Mode::sandwich, "sandwich"},
};

[[noreturn]] void config_fail(const std::string& what) { throw Error(ErrorCode::config_error, what); }

std::size_t get_count(const json& value, const std::string& key) {
    if (value.is_number_unsigned()) {
        return value.get<std::size_t>();
    }
    if (value.is_number_integer() && value.get<long long>() >= 0) {
        return static_cast<std::size_t>(value.get<long long>());
    }
    config_fail("'" + key + "' must be a nonnegative integer");
}

double get_real(const json& value, const std::string& key) {
    if (!value.is_number()) {
        config_fail("'" + key + "' must be a number");
    }
    return value.get<double>();
}

template <typename T, typename Get>
std::vector<T> get_grid(const json& value, const std::string& key, Get get) {
    std::vector<T> grid;
    if (value.is_array()) {
        for (const auto& item : value) {
            grid.push_back(get(item, key));
        }
    } else {
        grid.push_back(get(value, key));
    }
    if (grid.empty()) {
        config_fail("'" + key + "' grid is empty");
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i - 1] < grid[i])) {
            config_fail("'" + key + "' grid must be strictly increasing");
        }
    }
    return grid;
}

std::string cell(std::size_t value) { return std::to_string(value); }
std::string cell(double value) { return format_real(value); }

template <typename F>
std::string optional_cell(F&& compute) {
    try {
        return format_real(compute());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::invalid_parameter) {
            return {};
        }
        throw;
    }
}

// Each task fills one row; tasks are independent and seeded by what they
// compute, never by scheduling order.
template <typename Task>
std::vector<Row> run_pool(const std::vector<Task>& tasks, std::size_t threads) {
    std::vector<Row> rows(tasks.size());
    std::vector<std::exception_ptr> errors(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            try {
                rows[i] = tasks[i]();
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t count = std::max<std::size_t>(1, std::min(threads, tasks.size()));
    if (count == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < count; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return rows;
}

std::uint64_t real_key(double x) {
    std::uint64_t bits = 0;
    static_assert(sizeof(bits) == sizeof(x));
    std::memcpy(&bits, &x, sizeof(x));
    return bits;
}

Row sweep_row(const ExperimentConfig& cfg, const SpectralKernel& kernel, std::size_t n, std::size_t d, std::size_t s,
              std::size_t rep) {
    const auto start = std::chrono::steady_clock::now();
    SyntheticSpec spec{.d = d,
                       .s = s,
                       .n = n,
                       .kernel = kernel,
                       .mu = cfg.mu,
                       .noise_std = cfg.noise_std,
                       .signal_radius = cfg.signal_radius,
                       .seed = derive_seed(cfg.seed, {n, d, s, rep})};
    const Dataset data = generate(spec);
    const RegParams params = make_reg_params(kernel, n, d, cfg.kappa, cfg.c_mult);
    SolverOptions opts;
    opts.max_sweeps = cfg.max_sweeps;
    opts.kkt_tol = cfg.kkt_tol;

    Row row{cell(n), cell(d), cell(s), cell(rep)};
    try {
        const AdditiveFit f = fit(data.design, data.responses, kernel, params, opts);
        row.push_back(cell(l2p_error_exact(f, data, kernel, data.design)));
        row.push_back(cell(l2pn_error(f, data, kernel)));
        row.push_back(cell(f.active_set.size()));
        row.push_back(cell(params.lambda_n));
        row.push_back(cell(params.rho_n));
        row.push_back(cell(params.nu_n));
        row.push_back(cell(f.sweeps_used));
        row.emplace_back();
        row.push_back("0");
    } catch (const Error& e) {
        if (e.code() != ErrorCode::not_converged) {
            throw;
        }
        row.insert(row.end(), {"", "", "", cell(params.lambda_n), cell(params.rho_n), cell(params.nu_n),
                               cell(opts.max_sweeps), "", "1"});
    }
    const double elapsed =
        cfg.record_wall_time ? std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() : 0.0;
    row[11] = cell(elapsed);
    return row;
}

Row lower_bound_row(const ExperimentConfig& cfg, const SpectralKernel& kernel, std::size_t n, std::size_t d,
                    std::size_t s) {
    const bool sobolev = cfg.kernel.kind == "sobolev";
    const double alpha = cfg.kernel.alpha;
    const double b = cfg.bound_b;
    Row row{cell(n), cell(d), cell(s)};
    row.push_back(cell(critical_rate(kernel, n)));
    row.push_back(optional_cell([&] { return upper_rate(s, static_cast<double>(d), n, kernel); }));
    row.push_back(optional_cell([&] {
        return sobolev ? lower_rate_polynomial(s, d, n, alpha) : lower_rate_logarithmic(s, d, n, cfg.kernel.m);
    }));
    if (sobolev) {
        row.push_back(optional_cell([&] { return delta_n(s, d, n, alpha, b); }));
        row.push_back(optional_cell([&] { return k_bound(s, n, alpha, b); }));
        row.push_back(optional_cell([&] { return bounded_class_rate(s, d, n, alpha, b); }));
        row.push_back(optional_cell([&] { return rate_ratio(s, d, n, alpha, b); }));
    } else {
        row.insert(row.end(), 4, std::string{});
    }
    return row;
}

// Exact squared L2 distance between two packing functions. Each column holds
// at most one nonzero coefficient, so the dense difference reduces to these
// entries without changing any floating-point term.
struct SparseColumns {
    std::vector<Eigen::Index> index;  // -1 for a zero column
    std::vector<double> value;
};

SparseColumns compress(const Eigen::MatrixXd& coeffs) {
    SparseColumns out{std::vector<Eigen::Index>(static_cast<std::size_t>(coeffs.cols()), -1),
                      std::vector<double>(static_cast<std::size_t>(coeffs.cols()), 0.0)};
    for (Eigen::Index j = 0; j < coeffs.cols(); ++j) {
        for (Eigen::Index k = 0; k < coeffs.rows(); ++k) {
            if (coeffs(k, j) != 0.0) {
                out.index[static_cast<std::size_t>(j)] = k;
                out.value[static_cast<std::size_t>(j)] = coeffs(k, j);
            }
        }
    }
    return out;
}

double squared_distance(const SparseColumns& a, const SparseColumns& b) {
    double sum = 0.0;
    for (std::size_t j = 0; j < a.index.size(); ++j) {
        if (a.index[j] == b.index[j]) {
            const double diff = a.value[j] - b.value[j];
            sum += diff * diff;
        } else {
            sum += a.value[j] * a.value[j] + b.value[j] * b.value[j];
        }
    }
    return sum;
}

Row packing_row(const ExperimentConfig& cfg, const SpectralKernel& kernel, std::size_t n, std::size_t d,
                std::size_t s, std::size_t rep) {
    Rng rng = make_stream(cfg.seed, {d, s, rep});
    const PackingSet pack = greedy_packing(d, s, cfg.alphabet, cfg.max_size, rng);
    const auto functions = packing_to_functions(pack, kernel, cfg.scale);
    std::vector<SparseColumns> compact;
    compact.reserve(functions.size());
    for (const auto& f : functions) {
        compact.push_back(compress(f));
    }
    double min_sep = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < compact.size(); ++a) {
        for (std::size_t b = a + 1; b < compact.size(); ++b) {
            min_sep = std::min(min_sep, squared_distance(compact[a], compact[b]));
        }
    }
    Row row{cell(n), cell(d), cell(s), cell(rep), cell(cfg.alphabet)};
    row.push_back(optional_cell([&] { return n_star(d, s, cfg.alphabet); }));
    row.push_back(cell(pack.codewords.size()));
    row.push_back(cell(pack.min_distance));
    row.push_back(compact.size() >= 2 ? cell(min_sep) : std::string{});
    row.push_back(compact.size() >= 2
                      ? cell(fano_bound(n, cfg.scale, std::log(static_cast<double>(compact.size()))))
                      : std::string{});
    return row;
}

Row complexity_row(const ExperimentConfig& cfg, const SpectralKernel& kernel, std::size_t n, double t,
                   std::size_t rep) {
    Rng design_rng = make_stream(cfg.seed, {n, rep});
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::VectorXd column(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < column.size(); ++i) {
        column(i) = unif(design_rng);
    }
    Rng noise_rng = make_stream(cfg.seed, {n, rep, real_key(t)});
    const McEstimate est = gaussian_complexity_mc(kernel, column, t, cfg.reps, noise_rng);
    const double q = q_sigma(t, kernel, n);
    return {cell(n), cell(t), cell(rep), cell(est.mean), cell(est.std_err), cell(q),
            q > 0.0 ? cell(est.mean / q) : std::string{}};
}

Row sandwich_row(const ExperimentConfig& cfg, const SpectralKernel& kernel, std::size_t n, std::size_t rep) {
    const double t = cfg.t_multiplier * critical_rate(kernel, n);
    Rng rng = make_stream(cfg.seed, {n, rep});
    const double freq = sandwich_check(kernel, n, cfg.trials, t, rng);
    return {cell(n), cell(rep), cell(t), cell(cfg.trials), cell(freq)};
}

void require_single(const std::vector<std::size_t>& grid, const char* name, const char* mode) {
    if (grid.size() != 1) {
        config_fail(std::string("mode ") + mode + " takes a single '" + name + "' value");
    }
}

double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t m = values.size();
    return m % 2 == 1 ? values[m / 2] : 0.5 * (values[m / 2 - 1] + values[m / 2]);
}

}  // namespace

std::optional<Mode> parse_mode(std::string_view name) {
    for (const auto& [mode, label] : kModeNames) {
        if (name == label) {
            return mode;
        }
    }
    return std::nullopt;
}

const char* to_string(Mode mode) {
    for (const auto& [m, label] : kModeNames) {
        if (m == mode) {
            return label;
        }
    }
    return "unknown";
}

SpectralKernel KernelSpec::build() const {
    if (kind == "sobolev") {
        return make_sobolev_kernel(alpha, m_trunc);
    }
    if (kind == "finite-rank") {
        return make_finite_rank_kernel(m);
    }
    throw Error(ErrorCode::config_error, "unknown kernel kind '" + kind + "'");
}

ExperimentConfig parse_config(std::string_view json_text, std::optional<Mode> mode) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        config_fail(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        config_fail("config must be a JSON object");
    }
    ExperimentConfig cfg;
    if (mode) {
        cfg.mode = *mode;
    }
    for (const auto& [key, value] : doc.items()) {
        if (key == "mode") {
            if (!value.is_string()) {
                config_fail("'mode' must be a string");
            }
            const auto named = parse_mode(value.get<std::string>());
            if (!named) {
                config_fail("unknown mode '" + value.get<std::string>() + "'");
            }
            if (mode && *named != *mode) {
                config_fail("config mode '" + value.get<std::string>() + "' does not match '" + to_string(*mode) + "'");
            }
            cfg.mode = *named;
        } else if (key == "kernel") {
            if (!value.is_string()) {
                config_fail("'kernel' must be a string");
            }
            cfg.kernel.kind = value.get<std::string>();
        } else if (key == "alpha") {
            cfg.kernel.alpha = get_real(value, key);
        } else if (key == "m") {
            cfg.kernel.m = get_count(value, key);
        } else if (key == "m_trunc") {
            cfg.kernel.m_trunc = get_count(value, key);
        } else if (key == "n") {
            cfg.n_grid = get_grid<std::size_t>(value, key, get_count);
        } else if (key == "d") {
            cfg.d_grid = get_grid<std::size_t>(value, key, get_count);
        } else if (key == "s") {
            cfg.s_grid = get_grid<std::size_t>(value, key, get_count);
        } else if (key == "t") {
            cfg.t_grid = get_grid<double>(value, key, get_real);
        } else if (key == "replicates") {
            cfg.replicates = get_count(value, key);
        } else if (key == "kappa") {
            cfg.kappa = get_real(value, key);
        } else if (key == "c_mult") {
            cfg.c_mult = get_real(value, key);
        } else if (key == "seed") {
            cfg.seed = get_count(value, key);
        } else if (key == "mu") {
            cfg.mu = get_real(value, key);
        } else if (key == "noise_std") {
            cfg.noise_std = get_real(value, key);
        } else if (key == "signal_radius") {
            cfg.signal_radius = get_real(value, key);
        } else if (key == "max_sweeps") {
            cfg.max_sweeps = get_count(value, key);
        } else if (key == "kkt_tol") {
            cfg.kkt_tol = get_real(value, key);
        } else if (key == "reps") {
            cfg.reps = get_count(value, key);
        } else if (key == "t_multiplier") {
            cfg.t_multiplier = get_real(value, key);
        } else if (key == "trials") {
            cfg.trials = get_count(value, key);
        } else if (key == "alphabet") {
            cfg.alphabet = get_count(value, key);
        } else if (key == "max_size") {
            cfg.max_size = get_count(value, key);
        } else if (key == "scale") {
            cfg.scale = get_real(value, key);
        } else if (key == "bound_b") {
            cfg.bound_b = get_real(value, key);
        } else if (key == "record_wall_time") {
            if (!value.is_boolean()) {
                config_fail("'record_wall_time' must be a boolean");
            }
            cfg.record_wall_time = value.get<bool>();
        } else {
            config_fail("unknown key '" + key + "'");
        }
    }

    try {
        (void)cfg.kernel.build();
    } catch (const Error& e) {
        config_fail(std::string("bad kernel: ") + e.what());
    }
    auto positive = [](const std::vector<std::size_t>& grid) { return grid.front() > 0; };
    if (!positive(cfg.n_grid) || !positive(cfg.d_grid) || !positive(cfg.s_grid)) {
        config_fail("n, d and s must be positive");
    }
    if (cfg.replicates == 0) {
        config_fail("'replicates' must be at least 1");
    }
    if (!(cfg.kappa > 0.0) || !(cfg.c_mult >= 16.0)) {
        config_fail("need kappa > 0 and c_mult >= 16");
    }
    if (!(cfg.noise_std >= 0.0) || !(cfg.signal_radius > 0.0 && cfg.signal_radius <= 1.0)) {
        config_fail("need noise_std >= 0 and signal_radius in (0, 1]");
    }
    if (cfg.max_sweeps == 0 || !(cfg.kkt_tol > 0.0)) {
        config_fail("need max_sweeps >= 1 and kkt_tol > 0");
    }
    if (cfg.t_grid.front() < 0.0 || cfg.reps < 30) {
        config_fail("need t >= 0 and reps >= 30");
    }
    if (!(cfg.t_multiplier > 0.0) || cfg.trials == 0) {
        config_fail("need t_multiplier > 0 and trials >= 1");
    }
    if (cfg.alphabet == 0 || cfg.max_size == 0 || !(cfg.scale > 0.0) || !(cfg.bound_b >= 0.0)) {
        config_fail("need alphabet >= 1, max_size >= 1, scale > 0, bound_b >= 0");
    }

    switch (cfg.mode) {
        case Mode::fit:
            require_single(cfg.n_grid, "n", "fit");
            require_single(cfg.d_grid, "d", "fit");
            require_single(cfg.s_grid, "s", "fit");
            break;
        case Mode::sweep_n:
            require_single(cfg.d_grid, "d", "sweep-n");
            require_single(cfg.s_grid, "s", "sweep-n");
            break;
        case Mode::sweep_d:
            require_single(cfg.n_grid, "n", "sweep-d");
            require_single(cfg.s_grid, "s", "sweep-d");
            break;
        case Mode::sweep_s:
            require_single(cfg.n_grid, "n", "sweep-s");
            require_single(cfg.d_grid, "d", "sweep-s");
            break;
        default:
            break;
    }
    if (cfg.mode == Mode::fit || cfg.mode == Mode::sweep_n || cfg.mode == Mode::sweep_d ||
        cfg.mode == Mode::sweep_s || cfg.mode == Mode::packing) {
        if (cfg.s_grid.back() > cfg.d_grid.front()) {
            config_fail("every s must be at most every d");
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path, std::optional<Mode> mode) {
    std::ifstream in(path);
    if (!in) {
        config_fail("cannot read config '" + path + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), mode);
}

std::size_t Table::column(std::string_view name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
        config_fail("no column '" + std::string(name) + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
}

std::string format_real(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

std::string to_csv(const Table& table) {
    std::string out;
    auto append = [&](const Row& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) {
                out += ',';
            }
            out += row[i];
        }
        out += '\n';
    };
    append(table.header);
    for (const auto& row : table.rows) {
        append(row);
    }
    return out;
}

void write_csv(const Table& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::io_error, "cannot open '" + path + "' for writing");
    }
    const std::string text = to_csv(table);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
        throw Error(ErrorCode::io_error, "failed writing '" + path + "'");
    }
}

Table parse_csv(std::string_view text) {
    Table table;
    bool first = true;
    while (!text.empty()) {
        const std::size_t eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        Row row;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            row.emplace_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
            if (comma == std::string_view::npos) {
                break;
            }
            start = comma + 1;
        }
        if (first) {
            table.header = std::move(row);
            first = false;
        } else {
            if (row.size() != table.header.size()) {
                throw Error(ErrorCode::io_error, "CSV row width does not match header");
            }
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

Table read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::io_error, "cannot read '" + path + "'");
    }
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_csv(text);
}

std::vector<std::string> sweep_columns() {
    return {"n",      "d",      "s",     "replicate",   "l2p_error",         "l2pn_error", "active_set_size",
            "lambda_n", "rho_n", "nu_n", "sweeps_used", "wall_time_seconds", "not_converged"};
}

Table run(const ExperimentConfig& cfg, std::size_t threads) {
    const SpectralKernel kernel = cfg.kernel.build();
    Table table;
    using Task = std::function<Row()>;
    std::vector<Task> tasks;

    switch (cfg.mode) {
        case Mode::fit:
        case Mode::sweep_n:
        case Mode::sweep_d:
        case Mode::sweep_s:
            table.header = sweep_columns();
            for (auto n : cfg.n_grid) {
                for (auto d : cfg.d_grid) {
                    for (auto s : cfg.s_grid) {
                        for (std::size_t rep = 0; rep < cfg.replicates; ++rep) {
                            tasks.emplace_back([&, n, d, s, rep] { return sweep_row(cfg, kernel, n, d, s, rep); });
                        }
                    }
                }
            }
            break;
        case Mode::lower_bound:
            table.header = {"n",       "d",       "s",          "nu_n",       "upper_rate",
                            "lower_rate", "delta_n", "k_bound", "bounded_class_rate", "rate_ratio"};
            for (auto n : cfg.n_grid) {
                for (auto d : cfg.d_grid) {
                    for (auto s : cfg.s_grid) {
                        tasks.emplace_back([&, n, d, s] { return lower_bound_row(cfg, kernel, n, d, s); });
                    }
                }
            }
            break;
        case Mode::packing:
            table.header = {"n",           "d",           "s",                  "replicate",  "alphabet",
                            "n_star",      "packing_size", "min_hamming", "min_sq_separation", "fano_bound"};
            for (auto n : cfg.n_grid) {
                for (auto d : cfg.d_grid) {
                    for (auto s : cfg.s_grid) {
                        for (std::size_t rep = 0; rep < cfg.replicates; ++rep) {
                            tasks.emplace_back([&, n, d, s, rep] { return packing_row(cfg, kernel, n, d, s, rep); });
                        }
                    }
                }
            }
            break;
        case Mode::complexity:
            table.header = {"n", "t", "replicate", "mean", "std_err", "q_sigma", "ratio"};
            for (auto n : cfg.n_grid) {
                for (double t : cfg.t_grid) {
                    for (std::size_t rep = 0; rep < cfg.replicates; ++rep) {
                        tasks.emplace_back([&, n, t, rep] { return complexity_row(cfg, kernel, n, t, rep); });
                    }
                }
            }
            break;
        case Mode::sandwich:
            table.header = {"n", "replicate", "t", "trials", "frequency"};
            for (auto n : cfg.n_grid) {
                for (std::size_t rep = 0; rep < cfg.replicates; ++rep) {
                    tasks.emplace_back([&, n, rep] { return sandwich_row(cfg, kernel, n, rep); });
                }
            }
            break;
    }
    table.rows = run_pool(tasks, threads);
    return table;
}

Slope fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) {
        throw Error(ErrorCode::dimension_mismatch, "fit_slope: x and y differ in length");
    }
    std::map<double, std::vector<double>> groups;
    for (std::size_t i = 0; i < x.size(); ++i) {
        groups[x[i]].push_back(y[i]);
    }
    if (groups.size() < 3) {
        throw Error(ErrorCode::insufficient_data, "fit_slope needs at least 3 distinct x values");
    }
    std::vector<double> lx;
    std::vector<double> ly;
    for (auto& [xv, ys] : groups) {
        const double m = median(ys);
        if (!(xv > 0.0) || !(m > 0.0)) {
            throw Error(ErrorCode::domain_error, "fit_slope needs positive x and positive medians");
        }
        lx.push_back(std::log(xv));
        ly.push_back(std::log(m));
    }
    const auto k = static_cast<double>(lx.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= k;
    my /= k;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    Slope out;
    out.slope = sxy / sxx;
    double sse = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double r = ly[i] - my - out.slope * (lx[i] - mx);
        sse += r * r;
    }
    out.std_err = std::sqrt(sse / (k - 2.0) / sxx);
    return out;
}

Slope fit_slope(const Table& table, std::string_view x_col, std::string_view y_col) {
    const std::size_t xi = table.column(x_col);
    const std::size_t yi = table.column(y_col);
    std::vector<double> x;
    std::vector<double> y;
    for (const auto& row : table.rows) {
        if (row[yi].empty() || row[xi].empty()) {
            continue;
        }
        x.push_back(std::strtod(row[xi].c_str(), nullptr));
        y.push_back(std::strtod(row[yi].c_str(), nullptr));
    }
    return fit_slope(x, y);
}

}  // namespace spamkern
