#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fusion/word.hpp"

namespace fusion::bench {

enum class Algo { fusion, btree, std };
enum class Dist { uniform, sorted, reverse, clustered };

std::string_view toString(Algo a);
std::string_view toString(Dist d);
std::optional<Algo> parseAlgo(std::string_view s);
std::optional<Dist> parseDist(std::string_view s);

struct BenchRecord {
    Algo algo = Algo::std;
    std::uint64_t n = 0;
    Dist dist = Dist::uniform;
    std::uint64_t seed = 0;
    unsigned capacity = 0;
    std::uint64_t nodeVisits = 0;
    std::uint64_t wordOps = 0;
    std::uint64_t keyComparisons = 0;
    std::uint64_t wallNanos = 0;
    bool verified = false;

    friend bool operator==(const BenchRecord&, const BenchRecord&) = default;
};

/// Result of one sort: the record plus the sorted output and, when the
/// output is wrong, a short description of the first mismatch.
struct SortOutcome {
    BenchRecord record;
    std::vector<Key> output;
    std::string mismatch;
};

/// Deterministic input for (dist, n, seed).  Clustered keys fall into a few
/// 2^16-wide bands, so nodes see long shared prefixes.
std::vector<Key> generate(Dist dist, std::size_t n, std::uint64_t seed);

/// Sorts `input` with the named structure, checks it against std::sort and
/// fills every counter.  `capacity` is the tree degree (ignored for std).
SortOutcome runSort(Algo algo, std::span<const Key> input, unsigned capacity);

inline constexpr std::string_view kCsvHeader =
    "algo,n,dist,seed,capacity,node_visits,word_ops,key_comparisons,wall_ns,verified";

void writeCsv(std::ostream& out, std::span<const BenchRecord> records);
/// Throws std::runtime_error when the file cannot be written.
void emitCsv(std::span<const BenchRecord> records, const std::filesystem::path& path);
/// Throws std::runtime_error on a malformed header or row.
std::vector<BenchRecord> readCsv(std::istream& in);

/// Newline-delimited unsigned decimal keys.  Throws std::runtime_error on
/// malformed lines.
std::vector<Key> readKeys(std::istream& in);
void writeKeys(std::ostream& out, std::span<const Key> keys);

}  // namespace fusion::bench
