#ifndef SPLITMETRIC_DATABENCH_HPP
#define SPLITMETRIC_DATABENCH_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace splitmetric {

/// A preprocessed design matrix and target: column means removed from both,
/// no NaNs.  provenance records the source path and every preprocessing
/// step applied.
struct Dataset {
    Eigen::MatrixXd features;
    Eigen::VectorXd target;
    long long m = 0;
    long long n = 0;
    std::vector<std::string> provenance;
};

struct LoadOptions {
    int target_column = 0;              // index into the original columns
    std::vector<int> drop_columns;      // original column indices to ignore
    bool header = false;
    std::string missing_token = "?";
    char delimiter = ',';
};

/// Reads a delimited numeric table, drops the designated columns, drops
/// rows containing NaN cells, imputes missing_token cells with the column
/// mean (computed after the row drops), selects the target column, and
/// removes column means from features and target.
Dataset load_dataset(const std::string& path, const LoadOptions& options = {});

/// In-memory variant of load_dataset for already-parsed rows.
Dataset build_dataset(const std::vector<std::vector<std::string>>& rows,
                      const LoadOptions& options,
                      const std::string& provenance_source = "<memory>");

/// Average test loss over row permutations: for each permutation shuffle
/// (X, y) jointly, fit on the first p rows by minimum-norm least squares,
/// and accumulate (1/(m-p))||X_test b_hat - y_test||^2.  Deterministic for
/// a fixed seed under any schedule.
double permutation_loss(const Dataset& data, long long p,
                        std::int64_t permutations, std::uint64_t seed,
                        int threads = 0);

struct PolicyResult {
    std::string policy;
    long long p;
    double mean_loss;
};

struct BenchReport {
    PolicyResult half;           // p = round(m/2)
    PolicyResult three_quarter;  // p = round(3m/4)
    PolicyResult optimal;        // p = p*(m,n), clamped to [n+1, m-1]
    double optimal_ratio;
    std::int64_t permutations;
    std::uint64_t seed;
    long long m;
    long long n;
    std::vector<std::string> notes;
};

BenchReport bench_table(const Dataset& data, std::int64_t permutations,
                        std::uint64_t seed, int threads = 0);

}  // namespace splitmetric

#endif
