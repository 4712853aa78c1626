// pplda: estimate discriminant directions from CSV data, tabulate the
// asymptotic efficiency theory, run Monte-Carlo experiment configs, and
// check PCA applicability.
//
// Exit codes: 0 success, 1 validation error, 2 numerical failure.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pplda/asymptotics.hpp"
#include "pplda/csv.hpp"
#include "pplda/estimators.hpp"
#include "pplda/indices.hpp"
#include "pplda/simulate.hpp"

namespace {

using namespace pplda;
using nlohmann::json;

std::string fmt(double v) { return csv::format_double(v); }

std::string join_vector(const Vector& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += fmt(v[i]);
    }
    return s;
}

/// First coordinate of largest magnitude made positive (report convention
/// for blind estimates, whose sign is arbitrary).
Vector canonical_sign(Vector u) {
    std::size_t imax = 0;
    for (std::size_t i = 1; i < u.size(); ++i)
        if (std::abs(u[i]) > std::abs(u[imax])) imax = i;
    if (u[imax] < 0.0)
        for (double& x : u) x = -x;
    return u;
}

std::vector<double> parse_number_list(const std::string& text, const char* flag,
                                      bool allow_inf = false) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok == "inf" && allow_inf) {
            out.push_back(std::numeric_limits<double>::infinity());
            continue;
        }
        try {
            std::size_t used = 0;
            const double v = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            out.push_back(v);
        } catch (const std::exception&) {
            throw ValidationError(std::string(flag) + ": cannot parse number '" + tok +
                                  "'");
        }
    }
    if (out.empty()) throw ValidationError(std::string(flag) + ": empty list");
    return out;
}

// ---------------------------------------------------------------------------
// model flags shared by fisher-check and asymptotics --which psi-trace

struct ModelFlags {
    std::string model_file;
    double alpha1 = 0.3;
    std::string mu1_text;
    std::string mu2_text;
    std::string sigma_text; // rows separated by ';'
    double sigma_ar1 = std::numeric_limits<double>::quiet_NaN();
    double sigma_spherical = std::numeric_limits<double>::quiet_NaN();

    void add_to(CLI::App* cmd, bool with_alpha = true) {
        cmd->add_option("--model", model_file,
                        "JSON model file {alpha1, mu1, mu2, sigma}");
        if (with_alpha)
            cmd->add_option("--alpha1", alpha1, "mixing proportion of group 1");
        cmd->add_option("--mu1", mu1_text, "comma-separated mean of group 1 (default 0)");
        cmd->add_option("--mu2", mu2_text, "comma-separated mean of group 2");
        cmd->add_option("--sigma", sigma_text,
                        "explicit covariance, rows separated by ';'");
        cmd->add_option("--sigma-ar1", sigma_ar1, "AR(1) covariance with this rho");
        cmd->add_option("--sigma-spherical", sigma_spherical,
                        "spherical covariance with this variance");
    }

    MixtureModel build() const {
        if (!model_file.empty()) {
            std::ifstream is(model_file);
            if (!is) throw ValidationError("cannot open model file '" + model_file + "'");
            json j;
            try {
                j = json::parse(is);
            } catch (const json::parse_error& e) {
                throw ValidationError(std::string("model file: invalid JSON: ") + e.what());
            }
            const double a = j.at("alpha1").get<double>();
            Vector m2 = j.at("mu2").get<Vector>();
            Vector m1(m2.size(), 0.0);
            if (j.contains("mu1")) m1 = j.at("mu1").get<Vector>();
            const auto rows = j.at("sigma");
            Matrix s(rows.size(), rows.size());
            for (std::size_t i = 0; i < rows.size(); ++i)
                for (std::size_t k = 0; k < rows.size(); ++k)
                    s(i, k) = rows.at(i).at(k).get<double>();
            return MixtureModel(a, std::move(m1), std::move(m2),
                                SymmetricMatrix(std::move(s)));
        }
        if (mu2_text.empty())
            throw ValidationError("either --model or --mu2 (with a sigma flag) required");
        Vector mu2 = parse_number_list(mu2_text, "--mu2");
        const std::size_t p = mu2.size();
        Vector mu1(p, 0.0);
        if (!mu1_text.empty()) {
            mu1 = parse_number_list(mu1_text, "--mu1");
            if (mu1.size() != p) throw ValidationError("--mu1: dimension mismatch");
        }
        SymmetricMatrix sigma;
        if (!sigma_text.empty()) {
            std::vector<Vector> rows;
            std::stringstream ss(sigma_text);
            std::string row;
            while (std::getline(ss, row, ';'))
                rows.push_back(parse_number_list(row, "--sigma"));
            if (rows.size() != p) throw ValidationError("--sigma: need p rows");
            Matrix m(p, p);
            for (std::size_t i = 0; i < p; ++i) {
                if (rows[i].size() != p) throw ValidationError("--sigma: ragged rows");
                for (std::size_t k = 0; k < p; ++k) m(i, k) = rows[i][k];
            }
            sigma = SymmetricMatrix(std::move(m));
        } else if (!std::isnan(sigma_ar1)) {
            sigma = ar1_covariance(p, sigma_ar1);
        } else if (!std::isnan(sigma_spherical)) {
            sigma = SymmetricMatrix::diagonal(Vector(p, sigma_spherical));
        } else {
            throw ValidationError(
                "one of --sigma, --sigma-ar1, --sigma-spherical required");
        }
        return MixtureModel(alpha1, std::move(mu1), std::move(mu2), std::move(sigma));
    }
};

bool sigma_is_spherical(const SymmetricMatrix& s) {
    const double v = s(0, 0);
    for (std::size_t i = 0; i < s.dim(); ++i)
        for (std::size_t j = 0; j < s.dim(); ++j) {
            const double want = i == j ? v : 0.0;
            if (std::abs(s(i, j) - want) > 1e-12 * std::max(1.0, std::abs(v)))
                return false;
        }
    return true;
}

void emit_table(const csv::Table& table, const std::string& out_path) {
    if (out_path.empty())
        csv::write(std::cout, table);
    else
        csv::write_file(out_path, table);
}

// ---------------------------------------------------------------------------
// estimate

struct EstimateArgs {
    std::string input;
    std::string method = "pp";
    std::string index = "hybrid";
    double w1 = 0.8;
    std::string labels;
    std::uint64_t seed = 1;
    std::size_t restarts = 10;
    std::size_t max_iter = 2000;
    double tol = 1e-10;
    std::string json_out;
};

int run_estimate(const EstimateArgs& args) {
    const csv::NumericTable table = csv::read_numeric_file(args.input);
    const std::size_t total_cols = table.cols();

    std::optional<std::size_t> label_col;
    if (!args.labels.empty()) {
        try {
            std::size_t used = 0;
            const unsigned long idx = std::stoul(args.labels, &used);
            if (used == args.labels.size()) {
                if (idx >= total_cols)
                    throw ValidationError("--labels: column index out of range");
                label_col = idx;
            }
        } catch (const std::invalid_argument&) {
        } catch (const std::out_of_range&) {
        }
        if (!label_col) {
            for (std::size_t j = 0; j < total_cols; ++j)
                if (table.column_names[j] == args.labels) label_col = j;
            if (!label_col)
                throw ValidationError("--labels: no column named '" + args.labels + "'");
        }
    }

    const std::size_t p = total_cols - (label_col ? 1 : 0);
    if (p == 0) throw ValidationError("estimate: no feature columns left");
    const std::size_t n = table.rows.size();

    Dataset data(n, p);
    std::vector<std::uint8_t> labels(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t jj = 0;
        for (std::size_t j = 0; j < total_cols; ++j) {
            if (label_col && j == *label_col) {
                const double v = table.rows[i][j];
                if (v != 0.0 && v != 1.0)
                    throw ValidationError("labels column must be binary 0/1");
                labels[i] = static_cast<std::uint8_t>(v);
            } else {
                data(i, jj++) = table.rows[i][j];
            }
        }
    }
    if (label_col) {
        bool has0 = false, has1 = false;
        for (auto l : labels) (l ? has1 : has0) = true;
        if (!has0 || !has1)
            throw ValidationError("labels column is constant; LDA is impossible");
    }

    IndexSpec spec = IndexSpec::hybrid(args.w1);
    if (args.index == "skewness") spec = IndexSpec::skewness();
    else if (args.index == "kurtosis") spec = IndexSpec::kurtosis();
    else if (args.index != "hybrid")
        throw ValidationError("--index must be skewness, kurtosis or hybrid");

    OptimizerOptions opts;
    opts.restarts = args.restarts;
    opts.max_iter = args.max_iter;
    opts.tol = args.tol;

    EstimateResult result;
    if (args.method == "pp") {
        result = pp_direction(data, spec, opts, args.seed);
    } else if (args.method == "pca") {
        result = pca_direction(data);
    } else if (args.method == "fobi") {
        result.direction = fobi_direction(data, spec);
        result.method = "fobi-" + spec.name();
        result.index_value = index_value(spec, center(data), result.direction);
        result.low_information = result.index_value < 1e-6;
    } else if (args.method == "lda") {
        if (!label_col) throw ValidationError("--method lda requires --labels");
        result = lda_direction({data, labels});
    } else {
        throw ValidationError("--method must be pp, lda, pca or fobi");
    }

    const bool blind = args.method != "lda";
    const Vector report_dir = blind ? canonical_sign(result.direction) : result.direction;

    json report;
    report["method"] = result.method;
    report["n"] = n;
    report["p"] = p;
    report["index"] = spec.name();
    report["w1"] = spec.weight_skew();
    report["direction"] = report_dir;
    report["index_value"] = result.index_value;
    report["converged"] = result.converged;
    report["iterations"] = result.iterations;
    report["grad_norm_at_opt"] = result.grad_norm_at_opt;
    report["low_information"] = result.low_information;
    report["seed"] = args.seed;

    std::cout << "method: " << result.method << "\n";
    std::cout << "index: " << spec.name() << " (w1=" << fmt(spec.weight_skew()) << ")\n";
    std::cout << "n: " << n << "  p: " << p << "\n";
    std::cout << "direction: " << join_vector(report_dir) << "\n";
    std::cout << "index_value: " << fmt(result.index_value) << "\n";
    std::cout << "converged: " << (result.converged ? "true" : "false") << "\n";
    std::cout << "iterations: " << result.iterations << "\n";
    std::cout << "grad_norm_at_opt: " << fmt(result.grad_norm_at_opt) << "\n";
    std::cout << "low_information: " << (result.low_information ? "true" : "false")
              << "\n";

    if (label_col && blind) {
        const EstimateResult lda = lda_direction({data, labels});
        const MsiResult m = msi_against(result.direction, lda.direction);
        report["lda_direction"] = lda.direction;
        report["msi_vs_lda"] = m.msi;
        std::cout << "lda_direction: " << join_vector(lda.direction) << "\n";
        std::cout << "msi_vs_lda: " << fmt(m.msi) << "\n";
    }

    if (!args.json_out.empty()) {
        std::ofstream os(args.json_out);
        if (!os) throw ValidationError("cannot open '" + args.json_out + "'");
        os << report.dump(2) << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// asymptotics

struct AsymptoticsArgs {
    std::string which;
    std::string alpha1_text;
    std::string tau_text = "5";
    std::string w1_text = "0.8";
    std::string out;
    ModelFlags model;
};

double c_any(double beta, double tau, double w1) {
    if (w1 <= 0.0) return c_kappa(beta, tau);
    if (w1 >= 1.0) return c_gamma(beta, tau);
    return c_eta(beta, tau, w1);
}

int run_asymptotics(const AsymptoticsArgs& args) {
    const bool have_alpha = !args.alpha1_text.empty();
    const auto taus = parse_number_list(args.tau_text, "--tau", /*allow_inf=*/true);

    csv::Table table;
    if (args.which == "constants" || args.which == "efficiencies") {
        const auto alphas = parse_number_list(
            have_alpha ? args.alpha1_text : "0.3", "--alpha1");
        const auto w1s = parse_number_list(args.w1_text, "--w1");
        const bool eff = args.which == "efficiencies";
        table.header = {"alpha1", "tau", "w1"};
        if (eff) {
            table.header.insert(table.header.end(),
                                {"eff_kappa", "eff_gamma", "eff_eta"});
        } else {
            table.header.insert(table.header.end(), {"c_kappa", "c_gamma", "c_eta"});
        }
        for (double a : alphas) {
            const double beta = a * (1.0 - a);
            for (double t : taus) {
                const double ck = c_kappa(beta, t);
                const double cg = c_gamma(beta, t);
                for (double w1 : w1s) {
                    const double ce = c_any(beta, t, w1);
                    std::vector<std::string> row = {fmt(a), fmt(t), fmt(w1)};
                    if (eff) {
                        row.push_back(fmt(std::isinf(ck) ? 0.0 : 1.0 / ck));
                        row.push_back(fmt(std::isinf(cg) ? 0.0 : 1.0 / cg));
                        row.push_back(fmt(std::isinf(ce) ? 0.0 : 1.0 / ce));
                    } else {
                        row.push_back(fmt(ck));
                        row.push_back(fmt(cg));
                        row.push_back(fmt(ce));
                    }
                    table.rows.push_back(std::move(row));
                }
            }
        }
    } else if (args.which == "optimal-weight") {
        if (have_alpha) {
            const auto alphas = parse_number_list(args.alpha1_text, "--alpha1");
            table.header = {"alpha1", "tau", "w1_star", "unique"};
            for (double t : taus)
                for (double a : alphas) {
                    const OptimalWeight w = optimal_weight(a, t);
                    table.rows.push_back(
                        {fmt(a), fmt(t), fmt(w.w1_star), w.unique ? "1" : "0"});
                }
        } else {
            // Without an alpha grid: the weight maximizing average efficiency.
            table.header = {"tau", "w1_best_average"};
            for (double t : taus)
                table.rows.push_back({fmt(t), fmt(best_average_weight(t))});
        }
    } else if (args.which == "psi-trace") {
        ModelFlags flags = args.model;
        if (have_alpha) {
            const auto alphas = parse_number_list(args.alpha1_text, "--alpha1");
            if (alphas.size() != 1)
                throw ValidationError("psi-trace takes a single --alpha1 value");
            flags.alpha1 = alphas[0];
        }
        const MixtureModel model = flags.build();
        const auto w1s = parse_number_list(args.w1_text, "--w1");
        table.header = {"method", "constant", "trace", "efficiency_vs_lda"};
        const auto push = [&table](const AsymptoticSummary& s, const std::string& name) {
            table.rows.push_back(
                {name, fmt(s.constant), fmt(s.trace), fmt(s.efficiency_vs_lda)});
        };
        push(psi_matrix(Method::Lda, model), "lda");
        push(psi_matrix(Method::PpKurtosis, model), "pp-kurtosis");
        push(psi_matrix(Method::PpSkewness, model), "pp-skewness");
        for (double w1 : w1s) {
            std::ostringstream name;
            name << "pp-hybrid:" << w1;
            push(psi_matrix(Method::PpHybrid, model, w1), name.str());
        }
        if (pca_fisher_check(model).consistent) push(psi_pca(model), "pca");
    } else {
        throw ValidationError(
            "--which must be constants, efficiencies, optimal-weight or psi-trace");
    }

    emit_table(table, args.out);
    return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
    std::string config_path;
    std::int64_t replicates = -1;
    std::int64_t seed = -1;
    std::string out_dir;
    std::string layout;
    std::size_t workers = 0;
};

int run_simulate(const SimulateArgs& args) {
    ExperimentConfig cfg = ExperimentConfig::from_json_file(args.config_path);
    if (args.replicates >= 0) cfg.replicates = static_cast<std::size_t>(args.replicates);
    if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);
    if (!args.out_dir.empty()) cfg.output.dir = args.out_dir;
    if (!args.layout.empty()) cfg.output.layout = args.layout;
    cfg.validate();

    namespace fs = std::filesystem;
    if (!fs::exists(cfg.output.dir)) {
        fs::create_directories(cfg.output.dir);
        std::cerr << "created output directory " << cfg.output.dir << "\n";
    }

    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<CellResult> results = run_grid(cfg, args.workers);
    const auto t1 = std::chrono::steady_clock::now();
    const double elapsed = std::chrono::duration<double>(t1 - t0).count();

    const fs::path csv_path =
        fs::path(cfg.output.dir) / (cfg.output.basename + "_" + cfg.output.layout + ".csv");
    csv::write_file(csv_path.string(), aggregate_to_table(results, cfg.output.layout));

    std::size_t cells = 0, skipped = 0;
    for (const CellResult& r : results) (r.skipped_reason.empty() ? cells : skipped)++;
    std::cout << "cells: " << cells << " (skipped: " << skipped << ")"
              << "  elapsed_s: " << fmt(elapsed) << "\n";
    std::cout << "wrote: " << csv_path.string() << "\n";

    if (cfg.output.json_bundle) {
        const fs::path json_path =
            fs::path(cfg.output.dir) / (cfg.output.basename + "_bundle.json");
        std::ofstream os(json_path);
        if (!os) throw ValidationError("cannot open '" + json_path.string() + "'");
        os << results_to_json(results);
        std::cout << "wrote: " << json_path.string() << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// fisher-check

int run_fisher_check(const ModelFlags& flags) {
    const MixtureModel model = flags.build();
    const PcaFisherCheck check = pca_fisher_check(model);
    const DerivedParams d = derive(model);

    std::cout << "consistent: " << (check.consistent ? "true" : "false") << "\n";
    std::cout << "eigen_margin: " << fmt(check.eigen_margin) << "\n";
    std::cout << "beta: " << fmt(d.beta) << "\n";
    std::cout << "tau: " << fmt(d.tau) << "\n";
    if (sigma_is_spherical(model.sigma)) {
        std::cout << "spherical_sigma: true\n";
        std::cout << "pca_efficiency_vs_lda: " << fmt(d.tau * d.beta) << "\n";
    } else {
        std::cout << "spherical_sigma: false\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Blind and label-based estimation of the optimal linear discriminant "
                 "of a two-component Gaussian mixture, with asymptotic efficiency "
                 "tables and Monte-Carlo experiments"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    EstimateArgs est;
    CLI::App* estimate = app.add_subcommand(
        "estimate", "Estimate a discriminant direction from a CSV file");
    estimate->add_option("--input", est.input, "CSV file (n rows, numeric columns)")
        ->required();
    estimate->add_option("--method", est.method, "pp | lda | pca | fobi");
    estimate->add_option("--index", est.index, "skewness | kurtosis | hybrid");
    estimate->add_option("--w1", est.w1, "skewness weight of the hybrid index");
    estimate->add_option("--labels", est.labels, "labels column (name or index)");
    estimate->add_option("--seed", est.seed, "seed for optimizer restarts");
    estimate->add_option("--restarts", est.restarts, "random restarts after FOBI");
    estimate->add_option("--max-iter", est.max_iter, "iteration cap per start");
    estimate->add_option("--tol", est.tol, "convergence tolerance");
    estimate->add_option("--json", est.json_out, "also write the report as JSON");

    AsymptoticsArgs asym;
    CLI::App* asymptotics = app.add_subcommand(
        "asymptotics", "Emit plot-ready tables of the limiting-efficiency theory");
    asymptotics
        ->add_option("--which", asym.which,
                     "constants | efficiencies | optimal-weight | psi-trace")
        ->required();
    asymptotics->add_option("--alpha1", asym.alpha1_text,
                            "comma-separated mixing proportions");
    asymptotics->add_option("--tau", asym.tau_text,
                            "comma-separated separations; 'inf' for the limit");
    asymptotics->add_option("--w1", asym.w1_text, "comma-separated hybrid weights");
    asymptotics->add_option("--out", asym.out, "output CSV path (default stdout)");
    asym.model.add_to(asymptotics, /*with_alpha=*/false); // psi-trace model flags

    SimulateArgs sim;
    CLI::App* simulate =
        app.add_subcommand("simulate", "Run a Monte-Carlo experiment config");
    simulate->add_option("--config", sim.config_path, "JSON config (schema 1)")
        ->required();
    simulate->add_option("--replicates", sim.replicates, "override replicate count");
    simulate->add_option("--seed", sim.seed, "override experiment seed");
    simulate->add_option("--out-dir", sim.out_dir, "override output directory");
    simulate->add_option("--layout", sim.layout, "override table layout");
    simulate->add_option("--workers", sim.workers,
                         "worker threads (default: PPLDA_THREADS or all cores)");

    ModelFlags fisher_flags;
    CLI::App* fisher = app.add_subcommand(
        "fisher-check", "Check whether PCA can recover the discriminant direction");
    fisher_flags.add_to(fisher);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1; // flag errors are validation errors
    }

    try {
        if (estimate->parsed()) return run_estimate(est);
        if (asymptotics->parsed()) return run_asymptotics(asym);
        if (simulate->parsed()) return run_simulate(sim);
        if (fisher->parsed()) return run_fisher_check(fisher_flags);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
