#include "rejectx/dataset.hpp"

#include "rejectx/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <unordered_set>

namespace rejectx {

std::string_view to_string(Label label) noexcept {
    switch (label) {
        case Label::negative: return "negative";
        case Label::rejected: return "rejected";
        case Label::positive: return "positive";
    }
    return "unknown";
}

FeatureSpace::FeatureSpace(std::vector<Feature> features) : features_{std::move(features)} {
    std::unordered_set<std::string> seen;
    for (const Feature &f : features_) {
        if (!seen.insert(f.name).second) {
            throw validation_error{"duplicate feature name '" + f.name + "'"};
        }
        if (!std::isfinite(f.lower) || !std::isfinite(f.upper) || !(f.lower < f.upper)) {
            throw validation_error{"feature '" + f.name + "' has a degenerate domain"};
        }
    }
}

FeatureSpace FeatureSpace::unit_box(std::vector<std::string> names) {
    std::vector<Feature> features;
    features.reserve(names.size());
    for (std::string &name : names) {
        features.push_back({std::move(name), 0.0, 1.0});
    }
    return FeatureSpace{std::move(features)};
}

FeatureSpace FeatureSpace::unit_box(std::size_t count) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < count; ++i) {
        names.push_back("f" + std::to_string(i + 1));
    }
    return unit_box(std::move(names));
}

std::vector<std::string> FeatureSpace::names() const {
    std::vector<std::string> out;
    out.reserve(features_.size());
    for (const Feature &f : features_) {
        out.push_back(f.name);
    }
    return out;
}

std::size_t FeatureSpace::index_of(std::string_view name) const {
    const auto it = std::find_if(features_.begin(), features_.end(), [&](const Feature &f) { return f.name == name; });
    if (it == features_.end()) {
        throw validation_error{"unknown feature '" + std::string{name} + "'"};
    }
    return static_cast<std::size_t>(it - features_.begin());
}

bool FeatureSpace::contains(std::span<const double> x) const noexcept {
    if (x.size() != features_.size()) {
        return false;
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] >= features_[i].lower && x[i] <= features_[i].upper)) {
            return false;
        }
    }
    return true;
}

std::size_t LabeledDataset::count(Label label) const noexcept {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        s = s.substr(1, s.size() - 2);
    }
    return s;
}

std::vector<std::string> split_line(const std::string &line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        const std::string_view cell{line.data() + start, (comma == std::string::npos ? line.size() : comma) - start};
        cells.emplace_back(trim(cell));
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return cells;
}

bool blank(const std::string &line) {
    return std::all_of(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

struct CsvText {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvText read_csv(const std::filesystem::path &path) {
    std::ifstream in{path};
    if (!in) {
        throw io_error{"cannot open '" + path.string() + "'"};
    }
    CsvText csv;
    std::string line;
    bool have_header = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) {
            continue;
        }
        std::vector<std::string> cells = split_line(line);
        if (!have_header) {
            csv.header = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != csv.header.size()) {
            std::ostringstream msg;
            msg << path.string() << ": row " << csv.rows.size() + 1 << " (line " << line_no << ") has " << cells.size()
                << " cells, header has " << csv.header.size();
            throw validation_error{msg.str()};
        }
        csv.rows.push_back(std::move(cells));
    }
    if (!have_header) {
        throw validation_error{path.string() + ": missing header row"};
    }
    return csv;
}

double parse_cell(const std::string &cell, std::size_t row, const std::string &column) {
    double value = 0.0;
    const char *first = cell.data();
    const char *last = cell.data() + cell.size();
    if (!cell.empty() && *first == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (cell.empty() || ec != std::errc{} || ptr != last || !std::isfinite(value)) {
        throw validation_error{"row " + std::to_string(row) + ", column '" + column + "': cannot parse '" + cell +
                               "' as a real number"};
    }
    return value;
}

std::size_t column_index(const std::vector<std::string> &header, std::string_view name,
                         const std::filesystem::path &path) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
        throw validation_error{path.string() + ": column '" + std::string{name} + "' not found"};
    }
    return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

std::vector<std::string> read_csv_header(const std::filesystem::path &path) {
    return read_csv(path).header;
}

RawLabeledTable load_csv(const std::filesystem::path &path, std::string_view label_column,
                         std::string_view positive_label) {
    const CsvText csv = read_csv(path);
    const std::size_t label_at = column_index(csv.header, label_column, path);

    RawLabeledTable out;
    for (std::size_t c = 0; c < csv.header.size(); ++c) {
        if (c != label_at) {
            out.table.columns.push_back(csv.header[c]);
        }
    }
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        const auto &cells = csv.rows[r];
        std::vector<double> row;
        row.reserve(cells.size() - 1);
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c != label_at) {
                row.push_back(parse_cell(cells[c], r + 1, csv.header[c]));
            }
        }
        out.table.rows.push_back(std::move(row));
        out.labels.push_back(cells[label_at] == positive_label ? Label::positive : Label::negative);
    }
    const auto positives = std::count(out.labels.begin(), out.labels.end(), Label::positive);
    if (positives == 0 || positives == static_cast<std::ptrdiff_t>(out.labels.size())) {
        throw validation_error{path.string() + ": only one class present for positive label '" +
                               std::string{positive_label} + "'"};
    }
    return out;
}

RawTable load_feature_columns(const std::filesystem::path &path, std::span<const std::string> columns) {
    const CsvText csv = read_csv(path);
    std::vector<std::size_t> at;
    for (const std::string &name : columns) {
        at.push_back(column_index(csv.header, name, path));
    }
    RawTable out;
    out.columns.assign(columns.begin(), columns.end());
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        std::vector<double> row;
        row.reserve(at.size());
        for (const std::size_t c : at) {
            row.push_back(parse_cell(csv.rows[r][c], r + 1, csv.header[c]));
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

ScalingParams::ScalingParams(std::vector<ColumnScale> columns) : columns_{std::move(columns)} {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (!std::isfinite(columns_[i].min) || !std::isfinite(columns_[i].max) ||
            !(columns_[i].max > columns_[i].min)) {
            throw validation_error{"scaling column " + std::to_string(i) + " has a degenerate domain"};
        }
    }
}

ScalingParams ScalingParams::identity(std::size_t count) {
    return ScalingParams{std::vector<ColumnScale>(count, ColumnScale{0.0, 1.0})};
}

double ScalingParams::apply(std::size_t column, double raw) const {
    const ColumnScale &s = columns_.at(column);
    return (raw - s.min) / (s.max - s.min);
}

double ScalingParams::invert(std::size_t column, double scaled) const {
    const ColumnScale &s = columns_.at(column);
    return scaled * (s.max - s.min) + s.min;
}

Instance ScalingParams::invert(std::span<const double> scaled) const {
    if (scaled.size() != columns_.size()) {
        throw validation_error{"scaling expects " + std::to_string(columns_.size()) + " values, got " +
                               std::to_string(scaled.size())};
    }
    Instance raw(scaled.size());
    for (std::size_t i = 0; i < scaled.size(); ++i) {
        raw[i] = invert(i, scaled[i]);
    }
    return raw;
}

ScalingParams fit_scaling(const RawTable &table) {
    const std::size_t cols = table.columns.size();
    if (table.rows.empty()) {
        throw validation_error{"cannot fit scaling on an empty table"};
    }
    std::vector<ColumnScale> scales(cols);
    for (std::size_t c = 0; c < cols; ++c) {
        double lo = table.rows.front().at(c);
        double hi = lo;
        for (const auto &row : table.rows) {
            lo = std::min(lo, row.at(c));
            hi = std::max(hi, row.at(c));
        }
        if (!(hi > lo)) {
            throw validation_error{"column '" + table.columns[c] + "' is constant: degenerate domain"};
        }
        scales[c] = {lo, hi};
    }
    return ScalingParams{std::move(scales)};
}

bool ScaledTable::row_in_domain(std::size_t row) const noexcept {
    return std::none_of(out_of_domain.begin(), out_of_domain.end(), [&](const DomainFlag &f) { return f.row == row; });
}

ScaledTable apply_scaling(const RawTable &table, const ScalingParams &params) {
    if (table.columns.size() != params.size()) {
        throw validation_error{"table has " + std::to_string(table.columns.size()) + " columns, scaling has " +
                               std::to_string(params.size())};
    }
    ScaledTable out;
    out.space = FeatureSpace::unit_box(table.columns);
    out.instances.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto &row = table.rows[r];
        if (row.size() != params.size()) {
            throw validation_error{"row " + std::to_string(r + 1) + " has " + std::to_string(row.size()) +
                                   " values, expected " + std::to_string(params.size())};
        }
        Instance x(row.size());
        for (std::size_t c = 0; c < row.size(); ++c) {
            x[c] = params.apply(c, row[c]);
            if (!(x[c] >= 0.0 && x[c] <= 1.0)) {
                out.out_of_domain.push_back({r, c, x[c]});
            }
        }
        out.instances.push_back(std::move(x));
    }
    return out;
}

namespace {

// Fisher-Yates over mt19937_64 with rejection sampling; unlike std::shuffle the
// result is identical across standard library implementations.
void shuffle(std::vector<std::size_t> &v, std::mt19937_64 &rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::uint64_t bound = i;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    (std::numeric_limits<std::uint64_t>::max() % bound);
        std::uint64_t draw = rng();
        while (draw >= limit) {
            draw = rng();
        }
        std::swap(v[i - 1], v[static_cast<std::size_t>(draw % bound)]);
    }
}

}  // namespace

Split stratified_split(const LabeledDataset &data, double train_fraction, std::uint64_t seed) {
    if (data.instances.size() != data.labels.size()) {
        throw validation_error{"instance and label counts differ"};
    }
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw validation_error{"train fraction must lie in (0, 1)"};
    }
    std::mt19937_64 rng{seed};
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> test_idx;
    for (const Label label : {Label::negative, Label::positive}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < data.labels.size(); ++i) {
            if (data.labels[i] == label) {
                members.push_back(i);
            }
        }
        if (members.size() < 2) {
            throw validation_error{"class " + std::string{to_string(label)} + " has fewer than 2 instances"};
        }
        shuffle(members, rng);
        auto take = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(members.size())));
        take = std::clamp<std::size_t>(take, 1, members.size() - 1);
        train_idx.insert(train_idx.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(take));
        test_idx.insert(test_idx.end(), members.begin() + static_cast<std::ptrdiff_t>(take), members.end());
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());

    Split split;
    split.train = subset(data, train_idx);
    split.test = subset(data, test_idx);
    split.train_indices = std::move(train_idx);
    split.test_indices = std::move(test_idx);
    return split;
}

LabeledDataset subset(const LabeledDataset &data, std::span<const std::size_t> indices) {
    LabeledDataset out;
    out.instances.reserve(indices.size());
    out.labels.reserve(indices.size());
    for (const std::size_t i : indices) {
        out.instances.push_back(data.instances.at(i));
        out.labels.push_back(data.labels.at(i));
    }
    return out;
}

}  // namespace rejectx
