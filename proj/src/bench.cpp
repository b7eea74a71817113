#include "fusion/bench.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>

#include "fusion/btree.hpp"
#include "fusion/counters.hpp"
#include "fusion/fusion_tree.hpp"

namespace fusion::bench {

namespace {

constexpr std::array<std::string_view, 3> kAlgoNames = {"fusion", "btree", "std"};
constexpr std::array<std::string_view, 4> kDistNames = {"uniform", "sorted", "reverse", "clustered"};

constexpr unsigned kClusterBits = 16;
constexpr std::size_t kClusterCount = 16;

template <class T>
T parseNumber(std::string_view field, std::string_view what) {
    T value{};
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc{} || ptr != end || field.empty())
        throw std::runtime_error("malformed " + std::string(what) + ": '" + std::string(field) + "'");
    return value;
}

std::vector<std::string_view> splitFields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string describeMismatch(std::span<const Key> got, std::span<const Key> want) {
    if (got.size() != want.size())
        return "output has " + std::to_string(got.size()) + " keys, expected " + std::to_string(want.size());
    const auto [g, w] = std::mismatch(got.begin(), got.end(), want.begin());
    if (g == got.end()) return {};
    return "first difference at index " + std::to_string(g - got.begin()) + ": got " + std::to_string(*g) +
           ", expected " + std::to_string(*w);
}

}  // namespace

std::string_view toString(Algo a) { return kAlgoNames[static_cast<std::size_t>(a)]; }
std::string_view toString(Dist d) { return kDistNames[static_cast<std::size_t>(d)]; }

std::optional<Algo> parseAlgo(std::string_view s) {
    for (std::size_t i = 0; i < kAlgoNames.size(); ++i)
        if (kAlgoNames[i] == s) return static_cast<Algo>(i);
    return std::nullopt;
}

std::optional<Dist> parseDist(std::string_view s) {
    for (std::size_t i = 0; i < kDistNames.size(); ++i)
        if (kDistNames[i] == s) return static_cast<Dist>(i);
    return std::nullopt;
}

std::vector<Key> generate(Dist dist, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Key> keys(n);
    switch (dist) {
        case Dist::uniform:
            for (auto& k : keys) k = rng();
            break;
        case Dist::sorted:
        case Dist::reverse:
            for (auto& k : keys) k = rng();
            std::sort(keys.begin(), keys.end());
            if (dist == Dist::reverse) std::reverse(keys.begin(), keys.end());
            break;
        case Dist::clustered: {
            std::array<Key, kClusterCount> bands{};
            for (auto& b : bands) b = rng() & ~((Key{1} << kClusterBits) - 1);
            std::uniform_int_distribution<std::size_t> pick(0, kClusterCount - 1);
            for (auto& k : keys) k = bands[pick(rng)] | (rng() & ((Key{1} << kClusterBits) - 1));
            break;
        }
    }
    return keys;
}

SortOutcome runSort(Algo algo, std::span<const Key> input, unsigned capacity) {
    SortOutcome out;
    BenchRecord& rec = out.record;
    rec.algo = algo;
    rec.n = input.size();

    Counters counters;
    const auto start = std::chrono::steady_clock::now();
    switch (algo) {
        case Algo::fusion: {
            FusionTree tree(capacity);
            rec.capacity = tree.capacity();
            for (Key x : input) tree.insert(x, counters);
            out.output = tree.inorder();
            break;
        }
        case Algo::btree: {
            BTree tree(capacity);
            rec.capacity = tree.degree();
            for (Key x : input) tree.insert(x, counters);
            out.output = tree.inorder();
            break;
        }
        case Algo::std: {
            out.output.assign(input.begin(), input.end());
            std::uint64_t comparisons = 0;
            std::sort(out.output.begin(), out.output.end(), [&comparisons](Key a, Key b) {
                ++comparisons;
                return a < b;
            });
            counters.keyComparisons = comparisons;
            counters.wordOps = comparisons;
            break;
        }
    }
    const auto stop = std::chrono::steady_clock::now();
    rec.wallNanos = static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count());
    rec.nodeVisits = counters.nodeVisits;
    rec.wordOps = counters.wordOps;
    rec.keyComparisons = counters.keyComparisons;

    std::vector<Key> oracle(input.begin(), input.end());
    std::sort(oracle.begin(), oracle.end());
    out.mismatch = describeMismatch(out.output, oracle);
    rec.verified = out.mismatch.empty();
    return out;
}

void writeCsv(std::ostream& out, std::span<const BenchRecord> records) {
    out << kCsvHeader << '\n';
    for (const auto& r : records) {
        out << toString(r.algo) << ',' << r.n << ',' << toString(r.dist) << ',' << r.seed << ',' << r.capacity << ','
            << r.nodeVisits << ',' << r.wordOps << ',' << r.keyComparisons << ',' << r.wallNanos << ','
            << (r.verified ? 1 : 0) << '\n';
    }
}

void emitCsv(std::span<const BenchRecord> records, const std::filesystem::path& path) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw std::runtime_error("cannot open " + path.string() + " for writing");
    writeCsv(file, records);
    file.flush();
    if (!file) throw std::runtime_error("failed writing " + path.string());
}

std::vector<BenchRecord> readCsv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) throw std::runtime_error("missing or unexpected CSV header");
    std::vector<BenchRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = splitFields(line);
        if (f.size() != 10) throw std::runtime_error("CSV row has " + std::to_string(f.size()) + " fields");
        BenchRecord r;
        const auto algo = parseAlgo(f[0]);
        const auto dist = parseDist(f[2]);
        if (!algo) throw std::runtime_error("unknown algo '" + std::string(f[0]) + "'");
        if (!dist) throw std::runtime_error("unknown dist '" + std::string(f[2]) + "'");
        r.algo = *algo;
        r.n = parseNumber<std::uint64_t>(f[1], "n");
        r.dist = *dist;
        r.seed = parseNumber<std::uint64_t>(f[3], "seed");
        r.capacity = parseNumber<unsigned>(f[4], "capacity");
        r.nodeVisits = parseNumber<std::uint64_t>(f[5], "node_visits");
        r.wordOps = parseNumber<std::uint64_t>(f[6], "word_ops");
        r.keyComparisons = parseNumber<std::uint64_t>(f[7], "key_comparisons");
        r.wallNanos = parseNumber<std::uint64_t>(f[8], "wall_ns");
        const auto verified = parseNumber<unsigned>(f[9], "verified");
        if (verified > 1) throw std::runtime_error("verified must be 0 or 1");
        r.verified = verified == 1;
        records.push_back(r);
    }
    return records;
}

std::vector<Key> readKeys(std::istream& in) {
    std::vector<Key> keys;
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        try {
            keys.push_back(parseNumber<Key>(line, "key"));
        } catch (const std::runtime_error& e) {
            throw std::runtime_error("line " + std::to_string(lineNo) + ": " + e.what());
        }
    }
    return keys;
}

void writeKeys(std::ostream& out, std::span<const Key> keys) {
    for (Key k : keys) out << k << '\n';
}

}  // namespace fusion::bench
