// sortbench: sort and rank integer keys with fusion trees, B-trees or
// std::sort, verifying every result and reporting operation counts as CSV.
//
// Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O error.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include "fusion/bench.hpp"
#include "fusion/btree.hpp"
#include "fusion/fusion_tree.hpp"

namespace {

using namespace fusion;

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kUsage = 2;
constexpr int kIoError = 3;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<Key> loadKeys(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    try {
        return bench::readKeys(in);
    } catch (const std::runtime_error& e) {
        throw IoError(path + ": " + e.what());
    }
}

struct Cell {
    bench::Algo algo;
    bench::Dist dist;
    std::uint64_t n;
    unsigned capacity;
};

bench::SortOutcome runCell(const Cell& cell, std::uint64_t seed) {
    const auto input = bench::generate(cell.dist, cell.n, seed);
    auto outcome = bench::runSort(cell.algo, input, cell.capacity);
    outcome.record.dist = cell.dist;
    outcome.record.seed = seed;
    if (cell.algo == bench::Algo::std) outcome.record.capacity = 0;
    outcome.output.clear();
    outcome.output.shrink_to_fit();
    return outcome;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Integer sorting and rank benchmarks over fusion trees and B-trees"};
    app.require_subcommand(1);

    const std::vector<std::string> algoNames = {"fusion", "btree", "std"};

    auto* run = app.add_subcommand("run", "generate inputs, sort, verify and record counters");
    std::vector<std::string> algos;
    std::vector<std::uint64_t> sizes;
    std::vector<std::string> dists{"uniform"};
    std::uint64_t seed = 42;
    unsigned capacity = 8;
    std::string mode = "fixed";
    std::string csvPath;
    bool parallel = false;
    run->add_option("--algo", algos, "fusion, btree and/or std")->required()->check(CLI::IsMember(algoNames));
    run->add_option("--n", sizes, "input sizes")->required();
    run->add_option("--dist", dists, "uniform, sorted, reverse and/or clustered")
        ->check(CLI::IsMember({"uniform", "sorted", "reverse", "clustered"}));
    run->add_option("--seed", seed, "generator seed");
    run->add_option("--capacity", capacity, "tree degree for --mode fixed")->check(CLI::Range(2u, 64u));
    run->add_option("--mode", mode, "degree policy")->check(CLI::IsMember({"theoretical", "fixed"}));
    run->add_option("--csv", csvPath, "output CSV (stdout when omitted)");
    run->add_flag("--parallel", parallel, "run independent cells concurrently");

    auto* sort = app.add_subcommand("sort", "sort a newline-delimited key file");
    std::string inPath;
    std::string outPath;
    std::string sortAlgo = "fusion";
    sort->add_option("--in", inPath, "input keys")->required();
    sort->add_option("--out", outPath, "sorted output")->required();
    sort->add_option("--algo", sortAlgo)->check(CLI::IsMember(algoNames));
    sort->add_option("--capacity", capacity)->check(CLI::Range(2u, 64u));

    auto* rank = app.add_subcommand("rank", "count keys <= a query");
    std::uint64_t query = 0;
    std::string rankAlgo = "fusion";
    rank->add_option("--in", inPath, "input keys")->required();
    rank->add_option("--key", query, "query key")->required();
    rank->add_option("--algo", rankAlgo)->check(CLI::IsMember(algoNames));
    rank->add_option("--capacity", capacity)->check(CLI::Range(2u, 64u));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*run) {
            const auto policy = mode == "theoretical" ? CapacityPolicy::theoretical() : CapacityPolicy::fixed(capacity);
            std::vector<Cell> cells;
            for (const auto& a : algos)
                for (const auto& d : dists)
                    for (auto n : sizes)
                        cells.push_back({*bench::parseAlgo(a), *bench::parseDist(d), n,
                                         policy.kind == CapacityPolicy::Kind::fixed ? capacity
                                                                                    : degreeFor(n, policy)});

            std::vector<bench::SortOutcome> outcomes;
            if (parallel) {
                std::vector<std::future<bench::SortOutcome>> pending;
                for (const auto& c : cells) pending.push_back(std::async(std::launch::async, runCell, c, seed));
                for (auto& f : pending) outcomes.push_back(f.get());
            } else {
                for (const auto& c : cells) outcomes.push_back(runCell(c, seed));
            }

            std::vector<bench::BenchRecord> records;
            for (const auto& o : outcomes) {
                if (!o.record.verified) {
                    std::cerr << "verification failed for " << bench::toString(o.record.algo) << " n=" << o.record.n
                              << " dist=" << bench::toString(o.record.dist) << ": " << o.mismatch << '\n';
                    return kVerifyFailed;
                }
                records.push_back(o.record);
            }
            if (csvPath.empty()) {
                bench::writeCsv(std::cout, records);
            } else {
                try {
                    bench::emitCsv(records, csvPath);
                } catch (const std::runtime_error& e) {
                    throw IoError(e.what());
                }
            }
            return kOk;
        }

        if (*sort) {
            const auto keys = loadKeys(inPath);
            auto outcome = bench::runSort(*bench::parseAlgo(sortAlgo), keys, capacity);
            if (!outcome.record.verified) {
                std::cerr << "verification failed: " << outcome.mismatch << '\n';
                return kVerifyFailed;
            }
            std::ofstream out(outPath, std::ios::binary | std::ios::trunc);
            if (!out) throw IoError("cannot open " + outPath + " for writing");
            bench::writeKeys(out, outcome.output);
            out.flush();
            if (!out) throw IoError("failed writing " + outPath);
            return kOk;
        }

        if (*rank) {
            const auto keys = loadKeys(inPath);
            std::size_t r = 0;
            switch (*bench::parseAlgo(rankAlgo)) {
                case bench::Algo::fusion: {
                    FusionTree tree(capacity);
                    for (Key k : keys) tree.insert(k);
                    r = tree.rank(query);
                    break;
                }
                case bench::Algo::btree: {
                    BTree tree(capacity);
                    for (Key k : keys) tree.insert(k);
                    r = tree.rank(query);
                    break;
                }
                case bench::Algo::std: {
                    for (Key k : keys) r += k <= query ? 1 : 0;
                    break;
                }
            }
            std::cout << r << '\n';
            return kOk;
        }
    } catch (const IoError& e) {
        std::cerr << "sortbench: " << e.what() << '\n';
        return kIoError;
    }
    return kUsage;
}
