#ifndef PPLDA_SIMULATE_HPP
#define PPLDA_SIMULATE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pplda/csv.hpp"
#include "pplda/estimators.hpp"
#include "pplda/mixture.hpp"

namespace pplda {

struct SigmaSpec {
    enum class Type { Ar1, Spherical, Explicit };
    Type type = Type::Ar1;
    double rho = 0.6;       // Ar1
    double variance = 1.0;  // Spherical
    std::optional<SymmetricMatrix> matrix; // Explicit

    SymmetricMatrix build(std::size_t p) const;
};

struct MeanSpec {
    enum class Type { RandomAtDistance, Explicit };
    Type type = Type::RandomAtDistance;
    std::optional<Vector> mu2; // Explicit

    /// mu1 is always the origin; mu2 comes from the spec. For the random
    /// variant the draw depends only on (seed, tau index, alpha index), so
    /// the same mean is reused across every n within a (tau, alpha1) cell.
    Vector build(const SymmetricMatrix& sigma, double tau, std::uint64_t seed,
                 std::size_t tau_index, std::size_t alpha_index) const;
};

struct EstimatorSpec {
    enum class Kind { Lda, Pp, Pca, Fobi };
    Kind kind = Kind::Pp;
    IndexSpec index = IndexSpec::hybrid(0.8); // Pp and Fobi
    OptimizerOptions opts;                    // Pp

    std::string label() const;
};

struct OutputSpec {
    std::string dir = ".";
    std::string basename = "results";
    std::string layout = "curve"; // "heatmap" | "curve"
    bool json_bundle = false;
};

/// Monte-Carlo experiment description. Parsed from a versioned JSON
/// document ("schema": 1); see configs/fig8.json for the shape.
struct ExperimentConfig {
    std::vector<double> tau_grid;
    std::vector<double> alpha1_grid;
    std::vector<std::size_t> n_grid;
    std::size_t p = 0;
    SigmaSpec sigma;
    MeanSpec mean;
    std::vector<EstimatorSpec> estimators;
    std::size_t replicates = 1;
    std::uint64_t seed = 0;
    OutputSpec output;

    void validate() const;
    static ExperimentConfig from_json_text(const std::string& text);
    static ExperimentConfig from_json_file(const std::string& path);
};

struct ReplicateOutcome {
    double msi;
    double scaled_loss_factor; // 2(1 - msi); multiply by n for the statistic
    bool converged;
};

/// One dataset drawn with Rng(seed, substream); every estimator sees the
/// same dataset and is scored against the population discriminant.
std::vector<ReplicateOutcome> run_replicate(const MixtureModel& model, std::size_t n,
                                            const std::vector<EstimatorSpec>& estimators,
                                            std::uint64_t seed, std::uint64_t substream);

struct CellResult {
    double tau;    // grid value
    double alpha1;
    std::size_t n;
    std::string method;
    double msi_mean = 0.0;
    double msi_sd = 0.0;
    double scaled_loss_mean = 0.0; // mean of n * 2(1-MSI)
    double theory_trace = 0.0;     // tr(Psi); inf when degenerate, NaN when undefined
    std::size_t replicate_count = 0;
    std::size_t nonconverged = 0;
    std::string skipped_reason;    // non-empty when the cell was infeasible
};

/// Runs the whole grid. Replicate r of cell c uses data substream
/// (c << 32) | r; random means use streams tagged with the top bit, so the
/// output is a pure function of (config, seed) no matter how many workers
/// execute it (0 workers = PPLDA_THREADS env var or all cores).
std::vector<CellResult> run_grid(const ExperimentConfig& config,
                                 std::size_t workers = 0);

/// Plot-ready table, one row per (cell, method), sorted by cell key.
/// heatmap: tau,alpha1,n,method,msi_mean,msi_sd
/// curve:   heatmap columns + scaled_loss_mean,theory_trace
csv::Table aggregate_to_table(const std::vector<CellResult>& results,
                              const std::string& layout);

/// JSON bundle with every CellResult field (including skipped cells).
std::string results_to_json(const std::vector<CellResult>& results);

std::size_t resolve_worker_count(std::size_t requested);

} // namespace pplda

#endif
