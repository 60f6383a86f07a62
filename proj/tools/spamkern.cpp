#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "spamkern/error.hpp"
#include "spamkern/experiment.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

const char* kSchemas = R"(Output columns by mode:
  fit, sweep-n, sweep-d, sweep-s:
    n,d,s,replicate,l2p_error,l2pn_error,active_set_size,lambda_n,rho_n,nu_n,
    sweeps_used,wall_time_seconds,not_converged
    (error columns are empty and not_converged=1 when the solver hits max_sweeps;
     wall_time_seconds is 0 unless record_wall_time is set)
  lower-bound:
    n,d,s,nu_n,upper_rate,lower_rate,delta_n,k_bound,bounded_class_rate,rate_ratio
  packing:
    n,d,s,replicate,alphabet,n_star,packing_size,min_hamming,min_sq_separation,fano_bound
  complexity:
    n,t,replicate,mean,std_err,q_sigma,ratio
  sandwich:
    n,replicate,t,trials,frequency
)";

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse additive kernel regression experiments"};
    app.footer(kSchemas);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::size_t threads = 1;
    for (const char* name :
         {"fit", "sweep-n", "sweep-d", "sweep-s", "lower-bound", "packing", "complexity", "sandwich"}) {
        auto* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
        sub->add_option("--config", config_path, "JSON config")->required();
        sub->add_option("--out", out_path, "CSV output path")->required();
        sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    }

    std::string csv_path;
    std::string x_col;
    std::string y_col;
    auto* slope = app.add_subcommand("slope", "log-log slope of median y against x");
    slope->add_option("--in", csv_path, "CSV produced by a sweep")->required();
    slope->add_option("--x", x_col, "x column")->required();
    slope->add_option("--y", y_col, "y column")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    try {
        if (slope->parsed()) {
            const auto fit = spamkern::fit_slope(spamkern::read_csv(csv_path), x_col, y_col);
            std::printf("slope %.17g\nstd_err %.17g\n", fit.slope, fit.std_err);
            return 0;
        }
        const std::string mode_name = app.get_subcommands().front()->get_name();
        const spamkern::ExperimentConfig config = spamkern::load_config(config_path, spamkern::parse_mode(mode_name));
        const spamkern::Table table = spamkern::run(config, threads);
        spamkern::write_csv(table, out_path);
    } catch (const spamkern::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == spamkern::ErrorCode::config_error ? kConfigError : kRuntimeError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
    return 0;
}
