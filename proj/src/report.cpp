#include "rejectx/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <vector>

namespace rejectx {

Statistic describe(std::span<const double> values) {
    Statistic s;
    if (values.empty()) {
        return s;
    }
    double sum = 0.0;
    for (const double v : values) {
        sum += v;
    }
    s.mean = sum / static_cast<double>(values.size());
    double sq = 0.0;
    for (const double v : values) {
        sq += (v - s.mean) * (v - s.mean);
    }
    s.stddev = std::sqrt(sq / static_cast<double>(values.size()));
    return s;
}

std::map<Label, ClassSummary> summarize(std::span<const Explanation> explanations) {
    std::map<Label, std::vector<double>> times;
    std::map<Label, std::vector<double>> sizes;
    std::map<Label, ClassSummary> out;
    for (const Explanation &e : explanations) {
        times[e.label].push_back(e.seconds);
        sizes[e.label].push_back(static_cast<double>(e.kept.size()));
        ClassSummary &s = out[e.label];
        ++s.patterns;
        s.queries += e.queries;
    }
    for (auto &[label, s] : out) {
        s.seconds = describe(times[label]);
        s.size = describe(sizes[label]);
    }
    return out;
}

namespace {

// Right-aligned columns, widths sized to the widest cell.
std::string render(const std::vector<std::vector<std::string>> &rows) {
    std::vector<std::size_t> width;
    for (const auto &row : rows) {
        width.resize(std::max(width.size(), row.size()), 0);
        for (std::size_t c = 0; c < row.size(); ++c) {
            width[c] = std::max(width[c], row[c].size());
        }
    }
    std::ostringstream out;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            if (c > 0) {
                out << "  ";
            }
            out << std::setw(static_cast<int>(width[c])) << rows[r][c];
        }
        out << '\n';
        if (r == 0) {
            std::size_t total = 0;
            for (const std::size_t w : width) {
                total += w;
            }
            out << std::string(total + 2 * (width.size() - 1), '-') << '\n';
        }
    }
    return out.str();
}

std::string fixed(double v, int digits) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
}

std::string percent(double v) { return fixed(100.0 * v, 2) + "%"; }

std::string class_name(Label label) {
    switch (label) {
        case Label::negative: return "Negative";
        case Label::rejected: return "Rejected";
        case Label::positive: return "Positive";
    }
    return "?";
}

}  // namespace

std::string format_metrics_table(std::string_view dataset, const EvalMetrics &m) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"Dataset", "t-", "t+", "Accuracy w/o RO", "Accuracy w/ RO", "Rejection", "Negative", "Rejected",
                    "Positive"});
    rows.push_back({std::string{dataset}, fixed(m.t_minus, 4), fixed(m.t_plus, 4), percent(m.accuracy_without_ro),
                    m.accuracy_with_ro ? percent(*m.accuracy_with_ro) : "-", percent(m.rejection_ratio),
                    std::to_string(m.negative), std::to_string(m.rejected), std::to_string(m.positive)});
    return render(rows);
}

std::string format_frequency_table(const FrequencyTable &table, const FeatureSpace &space) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header{"Class"};
    for (std::size_t i = 0; i < table.feature_count; ++i) {
        header.push_back(i < space.size() ? space[i].name : "f" + std::to_string(i + 1));
    }
    header.push_back("Patterns");
    rows.push_back(std::move(header));
    // Positive, Negative, Rejected: same row order as the usual reporting layout.
    for (const Label label : {Label::positive, Label::negative, Label::rejected}) {
        const auto it = table.classes.find(label);
        if (it == table.classes.end()) {
            continue;
        }
        std::vector<std::string> row{class_name(label)};
        for (const std::size_t c : it->second.counts) {
            row.push_back(std::to_string(c));
        }
        row.push_back(std::to_string(it->second.patterns));
        rows.push_back(std::move(row));
    }
    return render(rows);
}

std::string format_summary_table(const std::map<Label, ClassSummary> &summary) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"Class", "Patterns", "Time (s)", "Size", "Queries"});
    for (const Label label : {Label::negative, Label::rejected, Label::positive}) {
        const auto it = summary.find(label);
        if (it == summary.end()) {
            continue;
        }
        const ClassSummary &s = it->second;
        std::ostringstream t;
        t << std::scientific << std::setprecision(3) << s.seconds.mean << " +- " << s.seconds.stddev;
        rows.push_back({class_name(label), std::to_string(s.patterns), t.str(),
                        fixed(s.size.mean, 2) + " +- " + fixed(s.size.stddev, 3), std::to_string(s.queries)});
    }
    return render(rows);
}

}  // namespace rejectx
