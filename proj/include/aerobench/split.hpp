#pragma once

// Drag-stratified train/validation split: the validation set holds the
// highest- and lowest-drag tails of the sorted dataset plus a seeded random
// draw from the middle; everything else is training data.

#include <aerobench/core.hpp>
#include <aerobench/random.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace aerobench {

/// Orders ids with embedded numbers numerically ("run_2" < "run_10").
inline bool natural_less(const std::string& a, const std::string& b)
{
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() && j < b.size()) {
        const bool da = std::isdigit(static_cast<unsigned char>(a[i])) != 0;
        const bool db = std::isdigit(static_cast<unsigned char>(b[j])) != 0;
        if (da && db) {
            std::size_t ie = i;
            std::size_t je = j;
            while (ie < a.size() && std::isdigit(static_cast<unsigned char>(a[ie]))) ++ie;
            while (je < b.size() && std::isdigit(static_cast<unsigned char>(b[je]))) ++je;
            std::size_t is = i;
            std::size_t js = j;
            while (is + 1 < ie && a[is] == '0') ++is;
            while (js + 1 < je && b[js] == '0') ++js;
            if (ie - is != je - js) {
                return ie - is < je - js;
            }
            const int cmp = a.compare(is, ie - is, b, js, je - js);
            if (cmp != 0) {
                return cmp < 0;
            }
            if (ie - i != je - j) {
                return ie - i < je - j;
            }
            i = ie;
            j = je;
        } else {
            if (a[i] != b[j]) {
                return a[i] < b[j];
            }
            ++i;
            ++j;
        }
    }
    if (a.size() - i != b.size() - j) {
        return a.size() - i < b.size() - j;
    }
    return a < b;
}

struct NaturalLess
{
    bool operator()(const std::string& a, const std::string& b) const { return natural_less(a, b); }
};

using IdSet = std::set<std::string, NaturalLess>;

struct SplitSpec
{
    IdSet train_ids;
    IdSet val_ids;
    IdSet top_tail;
    IdSet bottom_tail;
    IdSet random_ids;
    std::uint64_t seed = 0;
    double val_frac = 0.1;
    double tail_frac = 0.1;
};

struct DragRecord
{
    std::string id;
    double drag = 0.0;
};

inline constexpr std::size_t kMinSplitSamples = 10;

/// Rounding used for the validation and tail sizes: half away from zero.
inline std::size_t round_count(double x) { return static_cast<std::size_t>(std::llround(x)); }

/// Splits by drag. n_val = round(N val_frac), at least 2; n_tail =
/// round(n_val tail_frac), at least 1, taken from each end of the order
/// sorted by (drag, id); the remaining n_val - 2 n_tail validation ids are
/// drawn without replacement from the middle by a partial Fisher-Yates
/// shuffle driven by uniform_index over mt19937_64(seed).
inline SplitSpec compute_split(std::vector<DragRecord> records, double val_frac = 0.1, double tail_frac = 0.1,
                               std::uint64_t seed = 0)
{
    if (records.size() < kMinSplitSamples) {
        fail(ErrorCode::TooFewSamples, "a split needs at least " + std::to_string(kMinSplitSamples) +
                                           " samples, got " + std::to_string(records.size()));
    }
    if (!(val_frac > 0.0 && val_frac < 1.0) || !(tail_frac >= 0.0 && tail_frac <= 0.5)) {
        fail(ErrorCode::InvalidArgument, "val_frac must be in (0, 1) and tail_frac in [0, 0.5]");
    }
    for (const auto& r : records) {
        if (!std::isfinite(r.drag)) {
            fail(ErrorCode::NonFiniteDrag, "sample '" + r.id + "' has non-finite drag");
        }
    }
    std::sort(records.begin(), records.end(), [](const DragRecord& a, const DragRecord& b) {
        return a.drag < b.drag || (a.drag == b.drag && natural_less(a.id, b.id));
    });
    IdSet seen;
    for (const auto& r : records) {
        if (!seen.insert(r.id).second) {
            fail(ErrorCode::InvalidArgument, "duplicate sample id '" + r.id + "'");
        }
    }

    const std::size_t n = records.size();
    const std::size_t n_tail =
        std::max<std::size_t>(1, round_count(static_cast<double>(round_count(static_cast<double>(n) * val_frac)) * tail_frac));
    const std::size_t n_val = std::min(n - 1, std::max(round_count(static_cast<double>(n) * val_frac), 2 * n_tail));

    SplitSpec s;
    s.seed = seed;
    s.val_frac = val_frac;
    s.tail_frac = tail_frac;
    for (std::size_t i = 0; i < n_tail; ++i) {
        s.bottom_tail.insert(records[i].id);
        s.top_tail.insert(records[n - 1 - i].id);
    }
    std::vector<std::string> middle;
    for (std::size_t i = n_tail; i < n - n_tail; ++i) {
        middle.push_back(records[i].id);
    }
    const std::size_t n_random = n_val - 2 * n_tail;
    Rng rng(seed);
    for (std::size_t i = 0; i < n_random; ++i) {
        const auto j = i + static_cast<std::size_t>(uniform_index(rng, middle.size() - i));
        std::swap(middle[i], middle[j]);
        s.random_ids.insert(middle[i]);
    }
    s.val_ids.insert(s.bottom_tail.begin(), s.bottom_tail.end());
    s.val_ids.insert(s.top_tail.begin(), s.top_tail.end());
    s.val_ids.insert(s.random_ids.begin(), s.random_ids.end());
    for (const auto& r : records) {
        if (!s.val_ids.count(r.id)) {
            s.train_ids.insert(r.id);
        }
    }
    return s;
}

namespace split_detail {

inline std::string trim(const std::string& s)
{
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

} // namespace split_detail

/// Reads an (id, drag) CSV. A first row whose drag column is not numeric is
/// treated as a header.
inline std::vector<DragRecord> read_drag_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        fail(ErrorCode::IoError, "cannot open '" + path + "'");
    }
    std::vector<DragRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = split_detail::trim(line);
        if (line.empty() || line[0] == '#') {
            continue;
        }
        auto comma = line.find(',');
        if (comma == std::string::npos) {
            fail(ErrorCode::ParseError, path + ":" + std::to_string(line_no) + ": expected 'id,drag'");
        }
        const std::string id = split_detail::trim(line.substr(0, comma));
        const std::string value = split_detail::trim(line.substr(comma + 1, line.find(',', comma + 1) - comma - 1));
        char* end = nullptr;
        const double drag = std::strtod(value.c_str(), &end);
        if (value.empty() || end != value.c_str() + value.size()) {
            if (out.empty() && line_no == 1) {
                continue;
            }
            fail(ErrorCode::ParseError, path + ":" + std::to_string(line_no) + ": bad drag value '" + value + "'");
        }
        out.push_back({id, drag});
    }
    return out;
}

inline void write_id_list(const IdSet& ids, const std::string& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        fail(ErrorCode::IoError, "cannot open '" + path + "' for writing");
    }
    for (const auto& id : ids) {
        out << id << '\n';
    }
    if (!out) {
        fail(ErrorCode::IoError, "failed writing '" + path + "'");
    }
}

/// One id per line; blank lines and '#' comments are ignored.
inline std::vector<std::string> read_id_list(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        fail(ErrorCode::IoError, "cannot open '" + path + "'");
    }
    std::vector<std::string> ids;
    std::string line;
    while (std::getline(in, line)) {
        line = split_detail::trim(line);
        if (!line.empty() && line[0] != '#') {
            ids.push_back(line);
        }
    }
    return ids;
}

} // namespace aerobench
