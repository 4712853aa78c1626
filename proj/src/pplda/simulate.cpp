#include "pplda/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "pplda/asymptotics.hpp"
#include "pplda/rng.hpp"

namespace pplda {

using nlohmann::json;

SymmetricMatrix SigmaSpec::build(std::size_t p) const {
    switch (type) {
        case Type::Ar1: return ar1_covariance(p, rho);
        case Type::Spherical: {
            if (!(variance > 0.0))
                throw ValidationError("sigma.variance must be positive");
            Vector d(p, variance);
            return SymmetricMatrix::diagonal(d);
        }
        case Type::Explicit: {
            if (!matrix) throw ValidationError("sigma.matrix missing");
            if (matrix->dim() != p)
                throw ValidationError("sigma.matrix dimension does not match p");
            return *matrix;
        }
    }
    throw ValidationError("sigma.type unknown");
}

Vector MeanSpec::build(const SymmetricMatrix& sigma, double tau, std::uint64_t seed,
                       std::size_t tau_index, std::size_t alpha_index) const {
    if (type == Type::Explicit) {
        if (!mu2) throw ValidationError("mean.mu2 missing");
        if (mu2->size() != sigma.dim())
            throw ValidationError("mean.mu2 dimension does not match p");
        return *mu2;
    }
    // Top bit tags mean-draw streams so they can never collide with the
    // replicate data streams (cell << 32 | r).
    const std::uint64_t stream = (std::uint64_t{1} << 63) |
                                 (static_cast<std::uint64_t>(tau_index) << 16) |
                                 static_cast<std::uint64_t>(alpha_index);
    return random_mean_at_distance(sigma, tau, seed, stream);
}

std::string EstimatorSpec::label() const {
    switch (kind) {
        case Kind::Lda: return "lda";
        case Kind::Pca: return "pca";
        case Kind::Fobi: return "fobi-" + index.name();
        case Kind::Pp:
            if (index.kind == IndexKind::Hybrid) {
                std::ostringstream os;
                os << "pp-hybrid:" << index.w1;
                return os.str();
            }
            return "pp-" + index.name();
    }
    return "unknown";
}

void ExperimentConfig::validate() const {
    if (tau_grid.empty() || alpha1_grid.empty() || n_grid.empty())
        throw ValidationError("config: tau_grid, alpha1_grid, n_grid must be non-empty");
    if (p < 1) throw ValidationError("config: p must be at least 1");
    if (replicates < 1) throw ValidationError("config: replicates must be at least 1");
    if (replicates >= (std::uint64_t{1} << 32))
        throw ValidationError("config: replicates must fit in 32 bits");
    if (estimators.empty()) throw ValidationError("config: estimators must be non-empty");
    for (double t : tau_grid)
        if (!(t > 0.0)) throw ValidationError("config: tau_grid values must be positive");
    for (double a : alpha1_grid)
        if (!(a > 0.0 && a < 1.0))
            throw ValidationError("config: alpha1_grid values must lie in (0,1)");
    for (std::size_t n : n_grid)
        if (n < 1) throw ValidationError("config: n_grid values must be positive");
    if (output.layout != "heatmap" && output.layout != "curve")
        throw ValidationError("config: output.layout must be 'heatmap' or 'curve'");
}

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
    throw ValidationError("config field '" + field + "': " + what);
}

const json& require_field(const json& j, const std::string& name) {
    const auto it = j.find(name);
    if (it == j.end()) field_error(name, "missing");
    return *it;
}

double as_number(const json& j, const std::string& field) {
    if (!j.is_number()) field_error(field, "expected a number");
    return j.get<double>();
}

std::uint64_t as_uint(const json& j, const std::string& field) {
    if (!j.is_number_unsigned() && !j.is_number_integer())
        field_error(field, "expected a non-negative integer");
    const auto v = j.get<std::int64_t>();
    if (v < 0) field_error(field, "expected a non-negative integer");
    return static_cast<std::uint64_t>(v);
}

IndexSpec parse_index(const json& j, const std::string& where) {
    const std::string name =
        j.contains("index") ? require_field(j, "index").get<std::string>() : "hybrid";
    if (name == "skewness") return IndexSpec::skewness();
    if (name == "kurtosis") return IndexSpec::kurtosis();
    if (name == "hybrid") {
        const double w1 =
            j.contains("w1") ? as_number(j.at("w1"), where + ".w1") : 0.8;
        if (!(w1 >= 0.0 && w1 <= 1.0)) field_error(where + ".w1", "must lie in [0,1]");
        return IndexSpec::hybrid(w1);
    }
    field_error(where + ".index", "must be 'skewness', 'kurtosis' or 'hybrid'");
}

EstimatorSpec parse_estimator(const json& j, std::size_t pos) {
    const std::string where = "estimators[" + std::to_string(pos) + "]";
    EstimatorSpec e;
    const std::string method = require_field(j, "method").get<std::string>();
    if (method == "lda") {
        e.kind = EstimatorSpec::Kind::Lda;
    } else if (method == "pca") {
        e.kind = EstimatorSpec::Kind::Pca;
    } else if (method == "fobi") {
        e.kind = EstimatorSpec::Kind::Fobi;
        e.index = parse_index(j, where);
    } else if (method == "pp") {
        e.kind = EstimatorSpec::Kind::Pp;
        e.index = parse_index(j, where);
        if (j.contains("restarts"))
            e.opts.restarts = as_uint(j.at("restarts"), where + ".restarts");
        if (j.contains("max_iter"))
            e.opts.max_iter = as_uint(j.at("max_iter"), where + ".max_iter");
        if (j.contains("tol")) e.opts.tol = as_number(j.at("tol"), where + ".tol");
    } else {
        field_error(where + ".method", "must be 'lda', 'pp', 'pca' or 'fobi'");
    }
    return e;
}

} // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config: invalid JSON: ") + e.what());
    }

    if (as_uint(require_field(j, "schema"), "schema") != 1)
        field_error("schema", "unsupported version (expected 1)");

    ExperimentConfig cfg;
    cfg.p = static_cast<std::size_t>(as_uint(require_field(j, "p"), "p"));

    for (const auto& v : require_field(j, "tau_grid"))
        cfg.tau_grid.push_back(as_number(v, "tau_grid"));
    for (const auto& v : require_field(j, "alpha1_grid"))
        cfg.alpha1_grid.push_back(as_number(v, "alpha1_grid"));
    for (const auto& v : require_field(j, "n_grid"))
        cfg.n_grid.push_back(static_cast<std::size_t>(as_uint(v, "n_grid")));

    const json& sig = require_field(j, "sigma");
    const std::string sig_type = require_field(sig, "type").get<std::string>();
    if (sig_type == "ar1") {
        cfg.sigma.type = SigmaSpec::Type::Ar1;
        cfg.sigma.rho = as_number(require_field(sig, "rho"), "sigma.rho");
        if (!(std::abs(cfg.sigma.rho) < 1.0)) field_error("sigma.rho", "|rho| must be < 1");
    } else if (sig_type == "spherical") {
        cfg.sigma.type = SigmaSpec::Type::Spherical;
        cfg.sigma.variance =
            sig.contains("variance") ? as_number(sig.at("variance"), "sigma.variance") : 1.0;
    } else if (sig_type == "explicit") {
        cfg.sigma.type = SigmaSpec::Type::Explicit;
        const json& mat = require_field(sig, "matrix");
        const std::size_t p = mat.size();
        Matrix m(p, p);
        for (std::size_t i = 0; i < p; ++i) {
            if (mat.at(i).size() != p) field_error("sigma.matrix", "must be square");
            for (std::size_t jj = 0; jj < p; ++jj)
                m(i, jj) = as_number(mat.at(i).at(jj), "sigma.matrix");
        }
        try {
            cfg.sigma.matrix = SymmetricMatrix(std::move(m));
        } catch (const ValidationError& e) {
            field_error("sigma.matrix", e.what());
        }
    } else {
        field_error("sigma.type", "must be 'ar1', 'spherical' or 'explicit'");
    }

    const json& mean = require_field(j, "mean");
    const std::string mean_type = require_field(mean, "type").get<std::string>();
    if (mean_type == "random-at-distance") {
        cfg.mean.type = MeanSpec::Type::RandomAtDistance;
    } else if (mean_type == "explicit") {
        cfg.mean.type = MeanSpec::Type::Explicit;
        Vector mu2;
        for (const auto& v : require_field(mean, "mu2"))
            mu2.push_back(as_number(v, "mean.mu2"));
        cfg.mean.mu2 = std::move(mu2);
    } else {
        field_error("mean.type", "must be 'random-at-distance' or 'explicit'");
    }

    const json& est = require_field(j, "estimators");
    if (!est.is_array()) field_error("estimators", "expected an array");
    for (std::size_t i = 0; i < est.size(); ++i)
        cfg.estimators.push_back(parse_estimator(est.at(i), i));

    cfg.replicates =
        static_cast<std::size_t>(as_uint(require_field(j, "replicates"), "replicates"));
    cfg.seed = as_uint(require_field(j, "seed"), "seed");

    if (j.contains("output")) {
        const json& out = j.at("output");
        if (out.contains("dir")) cfg.output.dir = out.at("dir").get<std::string>();
        if (out.contains("basename"))
            cfg.output.basename = out.at("basename").get<std::string>();
        if (out.contains("layout"))
            cfg.output.layout = out.at("layout").get<std::string>();
        if (out.contains("json_bundle"))
            cfg.output.json_bundle = out.at("json_bundle").get<bool>();
    }

    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << is.rdbuf();
    return from_json_text(buf.str());
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t pp_seed_for(std::uint64_t seed, std::uint64_t substream) {
    return detail::mix64(seed + 0x7070707070707070ULL) ^ detail::mix64(substream);
}

std::vector<ReplicateOutcome> run_replicate_impl(
    const MixtureSampler& sampler, const DerivedParams& derived, std::size_t n,
    const std::vector<EstimatorSpec>& estimators, std::uint64_t seed,
    std::uint64_t substream) {
    const LabeledDataset ld = sampler.sample(n, seed, substream);

    std::vector<ReplicateOutcome> out;
    out.reserve(estimators.size());
    for (const EstimatorSpec& spec : estimators) {
        ReplicateOutcome o{kNaN, kNaN, false};
        try {
            Vector direction;
            bool converged = true;
            switch (spec.kind) {
                case EstimatorSpec::Kind::Lda: {
                    const EstimateResult r = lda_direction(ld);
                    direction = r.direction;
                    break;
                }
                case EstimatorSpec::Kind::Pca: {
                    const EstimateResult r = pca_direction(ld.data);
                    direction = r.direction;
                    break;
                }
                case EstimatorSpec::Kind::Fobi:
                    direction = fobi_direction(ld.data, spec.index);
                    break;
                case EstimatorSpec::Kind::Pp: {
                    const EstimateResult r = pp_direction(ld.data, spec.index, spec.opts,
                                                          pp_seed_for(seed, substream));
                    direction = r.direction;
                    converged = r.converged;
                    break;
                }
            }
            const MsiResult m = msi_against(direction, derived.theta_unit);
            o = {m.msi, m.scaled_loss_factor, converged};
        } catch (const Error&) {
            // Failed estimator replicates are recorded, never fatal.
        }
        out.push_back(o);
    }
    return out;
}

double theory_trace_for(const EstimatorSpec& spec, const MixtureModel& model) {
    switch (spec.kind) {
        case EstimatorSpec::Kind::Lda: return psi_matrix(Method::Lda, model).trace;
        case EstimatorSpec::Kind::Pp:
            switch (spec.index.kind) {
                case IndexKind::SquaredSkewness:
                    return psi_matrix(Method::PpSkewness, model).trace;
                case IndexKind::SquaredExcessKurtosis:
                    return psi_matrix(Method::PpKurtosis, model).trace;
                case IndexKind::Hybrid:
                    return psi_matrix(Method::PpHybrid, model, spec.index.w1).trace;
            }
            return kNaN;
        case EstimatorSpec::Kind::Pca:
            if (pca_fisher_check(model).consistent) return psi_pca(model).trace;
            return kNaN;
        case EstimatorSpec::Kind::Fobi: return kNaN;
    }
    return kNaN;
}

} // namespace

std::vector<ReplicateOutcome> run_replicate(const MixtureModel& model, std::size_t n,
                                            const std::vector<EstimatorSpec>& estimators,
                                            std::uint64_t seed, std::uint64_t substream) {
    if (n < model.dim()) throw ValidationError("run_replicate: need n >= p");
    return run_replicate_impl(MixtureSampler(model), derive(model), n, estimators, seed,
                              substream);
}

std::size_t resolve_worker_count(std::size_t requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("PPLDA_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? hc : 1;
}

std::vector<CellResult> run_grid(const ExperimentConfig& config, std::size_t workers) {
    config.validate();
    const std::size_t nworkers = resolve_worker_count(workers);
    std::vector<CellResult> results;

    std::uint64_t cell_ordinal = 0;
    for (std::size_t ti = 0; ti < config.tau_grid.size(); ++ti) {
        const double tau = config.tau_grid[ti];
        for (std::size_t ai = 0; ai < config.alpha1_grid.size(); ++ai) {
            const double alpha1 = config.alpha1_grid[ai];
            const SymmetricMatrix sigma = config.sigma.build(config.p);
            const Vector mu2 = config.mean.build(sigma, tau, config.seed, ti, ai);
            const Vector mu1(config.p, 0.0);
            const MixtureModel model(alpha1, mu1, mu2, sigma);
            const DerivedParams derived = derive(model);
            const MixtureSampler sampler(model);

            std::vector<double> traces(config.estimators.size());
            for (std::size_t e = 0; e < config.estimators.size(); ++e)
                traces[e] = theory_trace_for(config.estimators[e], model);

            for (std::size_t n : config.n_grid) {
                const std::uint64_t cell = cell_ordinal++;
                if (n < config.p) {
                    for (const EstimatorSpec& spec : config.estimators) {
                        CellResult r;
                        r.tau = tau;
                        r.alpha1 = alpha1;
                        r.n = n;
                        r.method = spec.label();
                        r.theory_trace = kNaN;
                        r.skipped_reason = "n < p";
                        results.push_back(std::move(r));
                    }
                    continue;
                }

                const std::size_t m = config.replicates;
                std::vector<std::vector<ReplicateOutcome>> outcomes(m);
                std::atomic<std::size_t> next{0};
                auto work = [&] {
                    for (std::size_t r; (r = next.fetch_add(1)) < m;) {
                        const std::uint64_t substream = (cell << 32) | r;
                        outcomes[r] = run_replicate_impl(sampler, derived, n,
                                                         config.estimators, config.seed,
                                                         substream);
                    }
                };
                if (nworkers <= 1 || m <= 1) {
                    work();
                } else {
                    std::vector<std::thread> pool;
                    const std::size_t launch = std::min(nworkers, m);
                    pool.reserve(launch);
                    for (std::size_t w = 0; w < launch; ++w) pool.emplace_back(work);
                    for (auto& th : pool) th.join();
                }

                for (std::size_t e = 0; e < config.estimators.size(); ++e) {
                    CellResult r;
                    r.tau = tau;
                    r.alpha1 = alpha1;
                    r.n = n;
                    r.method = config.estimators[e].label();
                    r.theory_trace = traces[e];

                    double sum = 0.0, sum_loss = 0.0;
                    std::size_t valid = 0, nonconv = 0;
                    for (std::size_t rr = 0; rr < m; ++rr) {
                        const ReplicateOutcome& o = outcomes[rr][e];
                        if (!o.converged) ++nonconv;
                        if (std::isnan(o.msi)) continue;
                        sum += o.msi;
                        sum_loss += static_cast<double>(n) * o.scaled_loss_factor;
                        ++valid;
                    }
                    r.replicate_count = valid;
                    r.nonconverged = nonconv;
                    if (valid > 0) {
                        r.msi_mean = sum / static_cast<double>(valid);
                        r.scaled_loss_mean = sum_loss / static_cast<double>(valid);
                        double ss = 0.0;
                        for (std::size_t rr = 0; rr < m; ++rr) {
                            const ReplicateOutcome& o = outcomes[rr][e];
                            if (std::isnan(o.msi)) continue;
                            const double d = o.msi - r.msi_mean;
                            ss += d * d;
                        }
                        r.msi_sd = valid > 1
                                       ? std::sqrt(ss / static_cast<double>(valid - 1))
                                       : 0.0;
                    } else {
                        r.msi_mean = kNaN;
                        r.msi_sd = kNaN;
                        r.scaled_loss_mean = kNaN;
                    }
                    results.push_back(std::move(r));
                }
            }
        }
    }
    return results;
}

csv::Table aggregate_to_table(const std::vector<CellResult>& results,
                              const std::string& layout) {
    if (layout != "heatmap" && layout != "curve")
        throw ValidationError("aggregate_to_table: layout must be 'heatmap' or 'curve'");
    const bool curve = layout == "curve";

    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < results.size(); ++i)
        if (results[i].skipped_reason.empty()) order.push_back(i);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const CellResult& x = results[a];
        const CellResult& y = results[b];
        if (x.tau != y.tau) return x.tau < y.tau;
        if (x.alpha1 != y.alpha1) return x.alpha1 < y.alpha1;
        if (x.n != y.n) return x.n < y.n;
        return x.method < y.method;
    });

    csv::Table table;
    table.header = {"tau", "alpha1", "n", "method", "msi_mean", "msi_sd"};
    if (curve) {
        table.header.push_back("scaled_loss_mean");
        table.header.push_back("theory_trace");
    }
    for (std::size_t i : order) {
        const CellResult& r = results[i];
        std::vector<std::string> row = {
            csv::format_double(r.tau),      csv::format_double(r.alpha1),
            std::to_string(r.n),            r.method,
            csv::format_double(r.msi_mean), csv::format_double(r.msi_sd)};
        if (curve) {
            row.push_back(csv::format_double(r.scaled_loss_mean));
            row.push_back(csv::format_double(r.theory_trace));
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string results_to_json(const std::vector<CellResult>& results) {
    json cells = json::array();
    for (const CellResult& r : results) {
        json c;
        c["tau"] = r.tau;
        c["alpha1"] = r.alpha1;
        c["n"] = r.n;
        c["method"] = r.method;
        if (r.skipped_reason.empty()) {
            c["msi_mean"] = r.msi_mean;
            c["msi_sd"] = r.msi_sd;
            c["scaled_loss_mean"] = r.scaled_loss_mean;
            c["theory_trace"] = r.theory_trace; // null when NaN/inf
            c["replicate_count"] = r.replicate_count;
            c["nonconverged"] = r.nonconverged;
        } else {
            c["skipped"] = r.skipped_reason;
        }
        cells.push_back(std::move(c));
    }
    json root;
    root["schema"] = 1;
    root["cells"] = std::move(cells);
    return root.dump(2) + "\n";
}

} // namespace pplda
