#include "splitmetric/databench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "splitmetric/integrity.hpp"
#include "splitmetric/rng.hpp"

namespace splitmetric {

namespace {

constexpr std::int64_t kBlockSize = 64;

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_line(const std::string& line, char delimiter) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream stream(line);
    while (std::getline(stream, cell, delimiter)) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == delimiter) cells.push_back("");
    return cells;
}

// Unbiased bounded draw; self-contained so shuffles do not depend on the
// standard library's distribution internals.
std::uint64_t bounded(std::mt19937_64& eng, std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t r = eng();
        if (r >= threshold) return r % bound;
    }
}

void shuffle_indices(std::vector<Eigen::Index>& idx, std::mt19937_64& eng) {
    for (std::size_t i = idx.size() - 1; i > 0; --i) {
        std::swap(idx[i], idx[bounded(eng, static_cast<std::uint64_t>(i + 1))]);
    }
}

}  // namespace

Dataset build_dataset(const std::vector<std::vector<std::string>>& rows,
                      const LoadOptions& options,
                      const std::string& provenance_source) {
    if (rows.empty()) throw std::domain_error("dataset has no rows");
    const std::size_t total_cols = rows.front().size();
    if (options.target_column < 0 ||
        static_cast<std::size_t>(options.target_column) >= total_cols) {
        throw std::domain_error("target_column out of range");
    }
    std::vector<bool> dropped(total_cols, false);
    for (int c : options.drop_columns) {
        if (c < 0 || static_cast<std::size_t>(c) >= total_cols) {
            throw std::domain_error("drop_columns index out of range");
        }
        dropped[static_cast<std::size_t>(c)] = true;
    }
    if (dropped[static_cast<std::size_t>(options.target_column)]) {
        throw std::domain_error("target_column is also listed in drop_columns");
    }

    std::vector<std::size_t> kept;
    for (std::size_t c = 0; c < total_cols; ++c) {
        if (!dropped[c]) kept.push_back(c);
    }

    // Parse kept cells; missing_token becomes a hole, a cell parsing to NaN
    // marks the whole row for removal.
    struct Cell {
        double value;
        bool missing;
    };
    std::vector<std::vector<Cell>> parsed;
    std::size_t rows_dropped = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != total_cols) {
            throw std::runtime_error("row " + std::to_string(r + 1) + " has " +
                                     std::to_string(row.size()) + " cells, expected " +
                                     std::to_string(total_cols));
        }
        std::vector<Cell> out;
        out.reserve(kept.size());
        bool has_nan = false;
        for (std::size_t c : kept) {
            const std::string& cell = row[c];
            if (cell == options.missing_token) {
                out.push_back({0.0, true});
                continue;
            }
            char* end = nullptr;
            const double value = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0') {
                throw std::runtime_error("unparseable cell at row " + std::to_string(r + 1) +
                                         ", column " + std::to_string(c + 1) + ": '" +
                                         cell + "'");
            }
            if (std::isnan(value)) has_nan = true;
            out.push_back({value, false});
        }
        if (has_nan) {
            ++rows_dropped;
            continue;
        }
        parsed.push_back(std::move(out));
    }
    if (parsed.empty()) throw std::domain_error("no rows remain after NaN-row drops");

    const std::size_t m = parsed.size();
    const std::size_t ncols = kept.size();

    // Column means over non-missing entries, computed after the row drops.
    std::size_t imputed = 0;
    for (std::size_t c = 0; c < ncols; ++c) {
        double sum = 0.0;
        std::size_t count = 0;
        for (const auto& row : parsed) {
            if (!row[c].missing) {
                sum += row[c].value;
                ++count;
            }
        }
        if (count == 0) {
            throw std::domain_error("column " + std::to_string(kept[c] + 1) +
                                    " has only missing values");
        }
        const double mean = sum / static_cast<double>(count);
        for (auto& row : parsed) {
            if (row[c].missing) {
                row[c].value = mean;
                row[c].missing = false;
                ++imputed;
            }
        }
    }

    std::size_t target_pos = 0;
    for (std::size_t c = 0; c < ncols; ++c) {
        if (kept[c] == static_cast<std::size_t>(options.target_column)) target_pos = c;
    }

    Dataset data;
    data.m = static_cast<long long>(m);
    data.n = static_cast<long long>(ncols - 1);
    data.features.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(ncols - 1));
    data.target.resize(static_cast<Eigen::Index>(m));
    for (std::size_t r = 0; r < m; ++r) {
        std::size_t j = 0;
        for (std::size_t c = 0; c < ncols; ++c) {
            if (c == target_pos) {
                data.target(static_cast<Eigen::Index>(r)) = parsed[r][c].value;
            } else {
                data.features(static_cast<Eigen::Index>(r),
                              static_cast<Eigen::Index>(j++)) = parsed[r][c].value;
            }
        }
    }

    data.features.rowwise() -= data.features.colwise().mean();
    data.target.array() -= data.target.mean();

    data.provenance.push_back("source: " + provenance_source);
    data.provenance.push_back("rows dropped for NaN cells: " + std::to_string(rows_dropped));
    data.provenance.push_back("cells imputed with column mean (after row drops): " +
                              std::to_string(imputed));
    data.provenance.push_back("columns dropped: " + std::to_string(total_cols - ncols));
    data.provenance.push_back("column means removed from features and target");
    return data;
}

Dataset load_dataset(const std::string& path, const LoadOptions& options) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        if (first && options.header) {
            first = false;
            continue;
        }
        first = false;
        rows.push_back(split_line(line, options.delimiter));
    }
    return build_dataset(rows, options, path);
}

double permutation_loss(const Dataset& data, long long p,
                        std::int64_t permutations, std::uint64_t seed,
                        int threads) {
    if (p < data.n + 1 || p > data.m - 1) {
        throw std::domain_error("permutation_loss requires n+1 <= p <= m-1");
    }
    if (permutations < 1) throw std::domain_error("permutations must be >= 1");

    const Eigen::Index m = data.features.rows();
    const Eigen::Index n = data.features.cols();
    const Eigen::Index pe = static_cast<Eigen::Index>(p);

    const std::int64_t nblocks = (permutations + kBlockSize - 1) / kBlockSize;
    std::vector<double> block_sums(static_cast<std::size_t>(nblocks), 0.0);

    auto run_block = [&](std::int64_t block) {
        const std::int64_t begin = block * kBlockSize;
        const std::int64_t end = std::min(begin + kBlockSize, permutations);
        double sum = 0.0;
        std::vector<Eigen::Index> idx(static_cast<std::size_t>(m));
        Eigen::MatrixXd xs(m, n);
        Eigen::VectorXd ys(m);
        for (std::int64_t k = begin; k < end; ++k) {
            std::iota(idx.begin(), idx.end(), Eigen::Index{0});
            auto eng = make_engine(seed, static_cast<std::uint64_t>(k));
            shuffle_indices(idx, eng);
            for (Eigen::Index i = 0; i < m; ++i) {
                xs.row(i) = data.features.row(idx[static_cast<std::size_t>(i)]);
                ys(i) = data.target(idx[static_cast<std::size_t>(i)]);
            }
            // Minimum-norm solution; real data may be collinear.
            Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(xs.topRows(pe));
            Eigen::VectorXd bhat = cod.solve(ys.head(pe));
            sum += (xs.bottomRows(m - pe) * bhat - ys.tail(m - pe)).squaredNorm() /
                   static_cast<double>(m - pe);
        }
        block_sums[static_cast<std::size_t>(block)] = sum;
    };

    unsigned workers = threads > 0 ? static_cast<unsigned>(threads)
                                   : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(nblocks));
    if (workers <= 1) {
        for (std::int64_t blk = 0; blk < nblocks; ++blk) run_block(blk);
    } else {
        std::atomic<std::int64_t> next{0};
        auto work = [&] {
            for (;;) {
                const std::int64_t blk = next.fetch_add(1);
                if (blk >= nblocks) return;
                run_block(blk);
            }
        };
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    double total = 0.0;
    for (double s : block_sums) total += s;
    return total / static_cast<double>(permutations);
}

BenchReport bench_table(const Dataset& data, std::int64_t permutations,
                        std::uint64_t seed, int threads) {
    if (data.m < data.n + 2) {
        throw std::domain_error("bench_table requires m >= n + 2");
    }
    BenchReport report;
    report.m = data.m;
    report.n = data.n;
    report.permutations = permutations;
    report.seed = seed;

    auto clamp_p = [&](long long p) {
        return std::min(std::max(p, data.n + 1), data.m - 1);
    };

    long long p_opt;
    if (data.m >= data.n + 5) {
        p_opt = clamp_p(optimal_p(SplitProblem{data.m, data.n}));
    } else {
        p_opt = data.m - 1;
        report.notes.push_back("analytic domain empty (m < n + 5); optimal policy falls back to p = m - 1");
    }

    const long long p_half = clamp_p(std::llround(static_cast<double>(data.m) / 2.0));
    const long long p_three = clamp_p(std::llround(3.0 * static_cast<double>(data.m) / 4.0));

    report.half = {"half", p_half, permutation_loss(data, p_half, permutations, seed, threads)};
    report.three_quarter = {"three_quarter", p_three,
                            permutation_loss(data, p_three, permutations, seed, threads)};
    report.optimal = {"optimal", p_opt,
                      permutation_loss(data, p_opt, permutations, seed, threads)};
    report.optimal_ratio = static_cast<double>(p_opt) / static_cast<double>(data.m);
    return report;
}

}  // namespace splitmetric
