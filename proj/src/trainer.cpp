#include "rejectx/trainer.hpp"

#include "rejectx/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rejectx {

double decision_value(const LinearModel &model, std::span<const double> x) {
    if (x.size() != model.weights.size()) {
        throw validation_error{"instance has " + std::to_string(x.size()) + " values, model expects " +
                               std::to_string(model.weights.size())};
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        acc += model.weights[i] * x[i];
    }
    return acc + model.bias;
}

Label predict(const LinearModel &model, std::span<const double> x) {
    return decision_value(model, x) > 0.0 ? Label::positive : Label::negative;
}

double primal_objective(const LinearModel &model, const LabeledDataset &data, double C) {
    double norm = 0.0;
    for (const double w : model.weights) {
        norm += w * w;
    }
    double slack = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        slack += std::max(0.0, 1.0 - sign(data.labels[i]) * decision_value(model, data.instances[i]));
    }
    return 0.5 * norm + C * slack;
}

double accuracy(const LinearModel &model, const LabeledDataset &data) {
    if (data.empty()) {
        return 0.0;
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        correct += predict(model, data.instances[i]) == data.labels[i] ? 1 : 0;
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

namespace {

constexpr double tau = 1e-12;

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

void check_input(const LabeledDataset &train, const TrainerConfig &config) {
    if (!(config.C > 0.0) || !std::isfinite(config.C)) {
        throw validation_error{"C must be a positive finite number"};
    }
    if (!(config.tolerance > 0.0)) {
        throw validation_error{"tolerance must be positive"};
    }
    if (config.max_passes == 0) {
        throw validation_error{"max_passes must be positive"};
    }
    if (train.instances.size() != train.labels.size()) {
        throw validation_error{"instance and label counts differ"};
    }
    if (train.count(Label::positive) == 0 || train.count(Label::negative) == 0) {
        throw validation_error{"training data must contain both classes"};
    }
    if (train.count(Label::positive) + train.count(Label::negative) != train.size()) {
        throw validation_error{"training labels must be -1 or +1"};
    }
    const std::size_t dim = train.instances.front().size();
    for (const Instance &x : train.instances) {
        if (x.size() != dim) {
            throw validation_error{"training instances have inconsistent dimensions"};
        }
        if (!std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); })) {
            throw validation_error{"training data contains non-finite values"};
        }
    }
}

// Dual: min 1/2 a'Qa - e'a, 0 <= a <= C, y'a = 0, Q_ij = y_i y_j x_i.x_j.
// G = Qa - e is maintained incrementally.
class SmoSolver {
  public:
    SmoSolver(const LabeledDataset &train, const TrainerConfig &config)
        : x_{train.instances}, C_{config.C}, tol_{config.tolerance}, n_{train.size()}, y_(n_), alpha_(n_, 0.0),
          grad_(n_, -1.0), diag_(n_) {
        for (std::size_t i = 0; i < n_; ++i) {
            y_[i] = sign(train.labels[i]);
            diag_[i] = dot(x_[i], x_[i]);
        }
    }

    std::size_t solve(std::size_t max_iterations) {
        std::size_t iter = 0;
        std::vector<double> ki(n_);
        std::vector<double> kj(n_);
        while (iter < max_iterations) {
            std::size_t i = 0;
            std::size_t j = 0;
            if (!select_pair(i, j, ki)) {
                converged_ = true;
                break;
            }
            column(j, kj);
            update_pair(i, j, ki, kj);
            ++iter;
        }
        if (!converged_) {
            std::size_t i = 0;
            std::size_t j = 0;
            std::vector<double> scratch(n_);
            converged_ = !select_pair(i, j, scratch);
        }
        return iter;
    }

    [[nodiscard]] bool converged() const noexcept { return converged_; }
    [[nodiscard]] double gap() const noexcept { return gap_; }

    [[nodiscard]] LinearModel model() const {
        LinearModel m;
        m.weights.assign(x_.front().size(), 0.0);
        for (std::size_t k = 0; k < n_; ++k) {
            if (alpha_[k] != 0.0) {
                const double coef = alpha_[k] * y_[k];
                for (std::size_t d = 0; d < m.weights.size(); ++d) {
                    m.weights[d] += coef * x_[k][d];
                }
            }
        }
        m.bias = -rho();
        return m;
    }

    [[nodiscard]] double dual_objective() const {
        // -(1/2 a'Qa - e'a) = -(1/2 a'(G + e) - e'a) = -1/2 a'(G - e)
        double acc = 0.0;
        for (std::size_t k = 0; k < n_; ++k) {
            acc += alpha_[k] * (grad_[k] - 1.0);
        }
        return -0.5 * acc;
    }

    [[nodiscard]] std::size_t support_vectors() const {
        return static_cast<std::size_t>(std::count_if(alpha_.begin(), alpha_.end(), [](double a) { return a > 0.0; }));
    }

  private:
    [[nodiscard]] bool in_up(std::size_t t) const {
        return (y_[t] > 0 && alpha_[t] < C_) || (y_[t] < 0 && alpha_[t] > 0);
    }
    [[nodiscard]] bool in_low(std::size_t t) const {
        return (y_[t] > 0 && alpha_[t] > 0) || (y_[t] < 0 && alpha_[t] < C_);
    }

    void column(std::size_t i, std::vector<double> &k) const {
        for (std::size_t t = 0; t < n_; ++t) {
            k[t] = dot(x_[i], x_[t]);
        }
    }

    // Second-order working-set selection; writes kernel column of i into ki.
    bool select_pair(std::size_t &out_i, std::size_t &out_j, std::vector<double> &ki) {
        double gmax = -std::numeric_limits<double>::infinity();
        std::size_t i = n_;
        for (std::size_t t = 0; t < n_; ++t) {
            if (in_up(t) && -y_[t] * grad_[t] >= gmax) {
                if (-y_[t] * grad_[t] > gmax || i == n_) {
                    gmax = -y_[t] * grad_[t];
                    i = t;
                }
            }
        }
        double gmin = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < n_; ++t) {
            if (in_low(t)) {
                gmin = std::min(gmin, -y_[t] * grad_[t]);
            }
        }
        gap_ = (i == n_ || !std::isfinite(gmin)) ? 0.0 : gmax - gmin;
        if (i == n_ || gap_ <= tol_) {
            return false;
        }
        column(i, ki);
        double best = std::numeric_limits<double>::infinity();
        std::size_t j = n_;
        for (std::size_t t = 0; t < n_; ++t) {
            if (!in_low(t)) {
                continue;
            }
            const double b = gmax + y_[t] * grad_[t];
            if (b > 0) {
                double a = diag_[i] + diag_[t] - 2.0 * ki[t];
                if (a <= 0) {
                    a = tau;
                }
                const double obj = -(b * b) / a;
                if (obj < best) {
                    best = obj;
                    j = t;
                }
            }
        }
        if (j == n_) {
            return false;
        }
        out_i = i;
        out_j = j;
        return true;
    }

    void update_pair(std::size_t i, std::size_t j, const std::vector<double> &ki, const std::vector<double> &kj) {
        const double old_i = alpha_[i];
        const double old_j = alpha_[j];
        double &ai = alpha_[i];
        double &aj = alpha_[j];
        const double kij = ki[j];
        if (y_[i] != y_[j]) {
            double quad = diag_[i] + diag_[j] - 2.0 * kij;
            if (quad <= 0) {
                quad = tau;
            }
            const double delta = (-grad_[i] - grad_[j]) / quad;
            const double diff = ai - aj;
            ai += delta;
            aj += delta;
            if (diff > 0) {
                if (aj < 0) {
                    aj = 0;
                    ai = diff;
                }
            } else if (ai < 0) {
                ai = 0;
                aj = -diff;
            }
            if (diff > 0) {
                if (ai > C_) {
                    ai = C_;
                    aj = C_ - diff;
                }
            } else if (aj > C_) {
                aj = C_;
                ai = C_ + diff;
            }
        } else {
            double quad = diag_[i] + diag_[j] - 2.0 * kij;
            if (quad <= 0) {
                quad = tau;
            }
            const double delta = (grad_[i] - grad_[j]) / quad;
            const double sum = ai + aj;
            ai -= delta;
            aj += delta;
            if (sum > C_) {
                if (ai > C_) {
                    ai = C_;
                    aj = sum - C_;
                }
            } else if (aj < 0) {
                aj = 0;
                ai = sum;
            }
            if (sum > C_) {
                if (aj > C_) {
                    aj = C_;
                    ai = sum - C_;
                }
            } else if (ai < 0) {
                ai = 0;
                aj = sum;
            }
        }
        const double di = ai - old_i;
        const double dj = aj - old_j;
        for (std::size_t t = 0; t < n_; ++t) {
            grad_[t] += y_[t] * (y_[i] * ki[t] * di + y_[j] * kj[t] * dj);
        }
    }

    [[nodiscard]] double rho() const {
        double ub = std::numeric_limits<double>::infinity();
        double lb = -std::numeric_limits<double>::infinity();
        double sum_free = 0.0;
        std::size_t free = 0;
        for (std::size_t t = 0; t < n_; ++t) {
            const double yg = y_[t] * grad_[t];
            if (alpha_[t] >= C_) {
                if (y_[t] < 0) {
                    ub = std::min(ub, yg);
                } else {
                    lb = std::max(lb, yg);
                }
            } else if (alpha_[t] <= 0) {
                if (y_[t] > 0) {
                    ub = std::min(ub, yg);
                } else {
                    lb = std::max(lb, yg);
                }
            } else {
                ++free;
                sum_free += yg;
            }
        }
        if (free > 0) {
            return sum_free / static_cast<double>(free);
        }
        return (ub + lb) / 2.0;
    }

    const std::vector<Instance> &x_;
    double C_;
    double tol_;
    std::size_t n_;
    std::vector<double> y_;
    std::vector<double> alpha_;
    std::vector<double> grad_;
    std::vector<double> diag_;
    double gap_ = 0.0;
    bool converged_ = false;
};

}  // namespace

std::pair<LinearModel, TrainReport> train_soft_margin(const LabeledDataset &train, const TrainerConfig &config) {
    check_input(train, config);

    SmoSolver solver{train, config};
    const std::size_t n = train.size();
    const std::size_t max_iterations =
        config.max_passes > std::numeric_limits<std::size_t>::max() / n ? std::numeric_limits<std::size_t>::max()
                                                                        : config.max_passes * n;
    TrainReport report;
    report.iterations = solver.solve(max_iterations);
    report.passes = std::max<std::size_t>(1, (report.iterations + n - 1) / n);
    report.converged = solver.converged();
    report.max_dual_violation = solver.gap();
    report.dual_objective = solver.dual_objective();
    report.support_vectors = solver.support_vectors();

    LinearModel model = solver.model();
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = std::max(0.0, 1.0 - sign(train.labels[i]) * decision_value(model, train.instances[i]));
        report.max_slack = std::max(report.max_slack, xi);
        report.margin_violations += xi > 0.0 ? 1 : 0;
    }
    report.primal_objective = primal_objective(model, train, config.C);
    return {std::move(model), report};
}

}  // namespace rejectx
