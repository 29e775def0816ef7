#include "rejectx/rejector.hpp"

#include "rejectx/error.hpp"

#include <algorithm>
#include <cmath>

namespace rejectx {

void RejectModel::validate() const {
    if (!std::isfinite(t_minus) || !std::isfinite(t_plus)) {
        throw validation_error{"reject thresholds must be finite"};
    }
    if (!(t_minus <= 0.0 && 0.0 <= t_plus)) {
        throw validation_error{"reject thresholds must satisfy t_minus <= 0 <= t_plus"};
    }
    if (!(w_r > 0.0 && w_r <= 1.0)) {
        throw validation_error{"rejection cost w_r must lie in (0, 1]"};
    }
}

std::vector<ThresholdPair> threshold_grid(std::span<const double> decision_values, std::size_t steps) {
    if (steps == 0) {
        throw validation_error{"threshold grid needs at least one step"};
    }
    if (decision_values.empty()) {
        throw validation_error{"degenerate threshold grid: no decision values"};
    }
    const auto [lo, hi] = std::minmax_element(decision_values.begin(), decision_values.end());
    const double lower = *lo;
    const double upper = *hi;
    if (!(upper > 0.0 && lower < 0.0)) {
        throw validation_error{"degenerate threshold grid: decision values must include both signs"};
    }
    const double step = 1.0 / static_cast<double>(steps);
    std::vector<ThresholdPair> grid;
    grid.reserve(steps);
    for (std::size_t i = 1; i <= steps; ++i) {
        const double fraction = static_cast<double>(i) * step;
        grid.push_back({fraction * upper, fraction * lower});
    }
    return grid;
}

Label classify_decision(double d, double t_minus, double t_plus) noexcept {
    if (d > t_plus) {
        return Label::positive;
    }
    if (d < t_minus) {
        return Label::negative;
    }
    return Label::rejected;
}

RiskReport empirical_risk(std::span<const Label> labels, std::span<const double> decision_values, double t_plus,
                          double t_minus, double w_r) {
    if (labels.size() != decision_values.size()) {
        throw validation_error{"labels and decision values differ in length"};
    }
    if (!(t_minus <= t_plus)) {
        throw validation_error{"t_minus must not exceed t_plus"};
    }
    RiskReport r;
    r.total = labels.size();
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const Label predicted = classify_decision(decision_values[i], t_minus, t_plus);
        if (predicted == Label::rejected) {
            ++r.rejected;
        } else if (predicted != labels[i]) {
            ++r.misclassified;
        }
    }
    const std::size_t accepted = r.total - r.rejected;
    r.error_ratio = accepted == 0 ? 0.0 : static_cast<double>(r.misclassified) / static_cast<double>(accepted);
    r.rejection_ratio = r.total == 0 ? 0.0 : static_cast<double>(r.rejected) / static_cast<double>(r.total);
    r.risk = r.error_ratio + w_r * r.rejection_ratio;
    return r;
}

namespace {

std::vector<double> decision_values(const LinearModel &model, const LabeledDataset &data) {
    std::vector<double> out(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        out[i] = decision_value(model, data.instances[i]);
    }
    return out;
}

void check_cost(double w_r) {
    if (!(w_r > 0.0 && w_r <= 1.0)) {
        throw validation_error{"rejection cost w_r must lie in (0, 1]"};
    }
}

Calibration pick_best(const LinearModel &model, double w_r, const std::vector<ThresholdPair> &grid,
                      const std::vector<RiskReport> &reports) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < reports.size(); ++k) {
        if (reports[k].risk < reports[best].risk) {
            best = k;
        }
    }
    Calibration out;
    out.reject_model = RejectModel{model, grid[best].t_minus, grid[best].t_plus, w_r};
    out.report = reports[best];
    return out;
}

}  // namespace

Calibration calibrate(const LinearModel &model, const LabeledDataset &train, double w_r, std::size_t steps) {
    check_cost(w_r);
    const std::vector<double> values = decision_values(model, train);
    const std::vector<ThresholdPair> grid = threshold_grid(values, steps);
    std::vector<RiskReport> reports(grid.size());
    const auto count = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
        const auto u = static_cast<std::size_t>(k);
        reports[u] = empirical_risk(train.labels, values, grid[u].t_plus, grid[u].t_minus, w_r);
        reports[u].grid_index = u + 1;
    }
    return pick_best(model, w_r, grid, reports);
}

Calibration calibrate_serial(const LinearModel &model, const LabeledDataset &train, double w_r, std::size_t steps) {
    check_cost(w_r);
    const std::vector<double> values = decision_values(model, train);
    const std::vector<ThresholdPair> grid = threshold_grid(values, steps);
    std::vector<RiskReport> reports;
    reports.reserve(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        reports.push_back(empirical_risk(train.labels, values, grid[k].t_plus, grid[k].t_minus, w_r));
        reports.back().grid_index = k + 1;
    }
    return pick_best(model, w_r, grid, reports);
}

Label predict_with_reject(const RejectModel &rm, std::span<const double> x) {
    return classify_decision(decision_value(rm.model, x), rm.t_minus, rm.t_plus);
}

EvalMetrics evaluate(const RejectModel &rm, const LabeledDataset &data) {
    EvalMetrics m;
    m.total = data.size();
    m.t_minus = rm.t_minus;
    m.t_plus = rm.t_plus;
    std::size_t correct_plain = 0;
    std::size_t correct_accepted = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double d = decision_value(rm.model, data.instances[i]);
        const Label plain = d > 0.0 ? Label::positive : Label::negative;
        correct_plain += plain == data.labels[i] ? 1 : 0;
        const Label with_ro = classify_decision(d, rm.t_minus, rm.t_plus);
        switch (with_ro) {
            case Label::negative: ++m.negative; break;
            case Label::rejected: ++m.rejected; break;
            case Label::positive: ++m.positive; break;
        }
        correct_accepted += with_ro == data.labels[i] ? 1 : 0;
    }
    if (m.total > 0) {
        m.accuracy_without_ro = static_cast<double>(correct_plain) / static_cast<double>(m.total);
        m.rejection_ratio = static_cast<double>(m.rejected) / static_cast<double>(m.total);
    }
    const std::size_t accepted = m.total - m.rejected;
    if (accepted > 0) {
        m.accuracy_with_ro = static_cast<double>(correct_accepted) / static_cast<double>(accepted);
    }
    return m;
}

}  // namespace rejectx
