#include "burstwatch/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "burstwatch/textio.hpp"

namespace burstwatch::eval {

ClassificationMetrics precision_recall_f(std::span<const int> predicted,
                                         std::span<const int> truth, double beta) {
    if (predicted.size() != truth.size())
        throw ContractViolation("prediction/truth length mismatch");
    ClassificationMetrics m;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const bool p = predicted[i] > 0;
        const bool t = truth[i] > 0;
        if (p && t) ++m.tp;
        else if (p && !t) ++m.fp;
        else if (!p && t) ++m.fn;
        else ++m.tn;
    }
    if (m.tp + m.fp > 0)
        m.precision = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
    if (m.tp + m.fn > 0)
        m.recall = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
    if (m.precision && m.recall) {
        const double p = *m.precision;
        const double r = *m.recall;
        const double denom = beta * beta * p + r;
        if (denom > 0.0) m.f = (1.0 + beta * beta) * p * r / denom;
        else m.f = 0.0;
    }
    return m;
}

std::optional<double> rmse_log(std::span<const double> predicted,
                               std::span<const double> truth) {
    if (predicted.size() != truth.size())
        throw ContractViolation("prediction/truth length mismatch");
    if (predicted.empty()) return std::nullopt;
    double sq = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double d = predicted[i] - truth[i];
        sq += d * d;
    }
    return std::sqrt(sq / static_cast<double>(predicted.size()));
}

namespace {

std::string fmt_metric(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string("undefined");
}

std::string beta_suffix(double beta) { return "f" + format_double(beta); }

}  // namespace

std::optional<double> StagedReport::value(const std::string& stage, const std::string& task,
                                          const std::string& model,
                                          const std::string& metric) const {
    for (const auto& row : rows) {
        if (row.stage_tag == stage && row.task == task && row.model == model &&
            row.metric == metric) {
            if (row.value == "undefined") return std::nullopt;
            return parse_double(row.value);
        }
    }
    return std::nullopt;
}

StagedReport staged_evaluation(std::span<const PredictionRow> predictions,
                               std::span<const std::string> stage_order,
                               std::span<const double> betas) {
    StagedReport report;

    // (stage, task, model) -> rows, preserving input model order per group
    struct Group {
        std::vector<double> predicted;
        std::vector<double> truth;
    };
    std::map<std::string, std::map<features::Task, std::map<std::string, Group>>> by_stage;
    for (const auto& row : predictions) {
        Group& g = by_stage[row.stage_tag][row.task][row.model];
        g.predicted.push_back(row.predicted);
        g.truth.push_back(row.truth);
    }

    auto emit = [&report](const std::string& stage, const std::string& task,
                          const std::string& model, const std::string& metric,
                          const std::string& value) {
        report.rows.push_back({stage, task, model, metric, value});
    };

    for (const auto& stage : stage_order) {
        auto stage_it = by_stage.find(stage);
        if (stage_it == by_stage.end()) continue;
        for (auto& [task, by_model] : stage_it->second) {
            const std::string task_name = features::to_string(task);
            // per-stage class balance from the truth labels (identical across models)
            if (task == features::Task::BurstClassification && !by_model.empty()) {
                const Group& any = by_model.begin()->second;
                std::int64_t pos = 0;
                for (double t : any.truth) pos += t > 0 ? 1 : 0;
                emit(stage, task_name, "-", "eligible",
                     std::to_string(any.truth.size()));
                emit(stage, task_name, "-", "positive_fraction",
                     any.truth.empty() ? "undefined"
                                       : format_double(static_cast<double>(pos) /
                                                       static_cast<double>(any.truth.size())));
            }
            for (auto& [model, group] : by_model) {
                if (task == features::Task::BurstClassification) {
                    std::vector<int> pred(group.predicted.size());
                    std::vector<int> truth(group.truth.size());
                    for (std::size_t i = 0; i < pred.size(); ++i) {
                        pred[i] = group.predicted[i] > 0 ? 1 : -1;
                        truth[i] = group.truth[i] > 0 ? 1 : -1;
                    }
                    const auto base = precision_recall_f(pred, truth, 1.0);
                    emit(stage, task_name, model, "precision", fmt_metric(base.precision));
                    emit(stage, task_name, model, "recall", fmt_metric(base.recall));
                    for (double beta : betas) {
                        const auto m = precision_recall_f(pred, truth, beta);
                        emit(stage, task_name, model, beta_suffix(beta), fmt_metric(m.f));
                    }
                } else {
                    emit(stage, task_name, model, "eligible",
                         std::to_string(group.truth.size()));
                    emit(stage, task_name, model, "rmse",
                         fmt_metric(rmse_log(group.predicted, group.truth)));
                }
            }
        }
    }

    // markdown summary: one table per task
    std::ostringstream md;
    md << "# Staged evaluation\n";
    std::vector<features::Task> tasks = {features::Task::BurstClassification,
                                         features::Task::TbbRegression,
                                         features::Task::TraRegression};
    for (features::Task task : tasks) {
        const std::string task_name = features::to_string(task);
        std::set<std::string> models;
        for (const auto& row : report.rows)
            if (row.task == task_name && row.model != "-") models.insert(row.model);
        if (models.empty()) continue;
        const std::string metric =
            task == features::Task::BurstClassification ? "f1" : "rmse";
        md << "\n## " << task_name << " (" << metric << ")\n\n| model |";
        for (const auto& stage : stage_order) md << " " << stage << " |";
        md << "\n|---|";
        for (std::size_t i = 0; i < stage_order.size(); ++i) md << "---|";
        md << "\n";
        for (const auto& model : models) {
            md << "| " << model << " |";
            for (const auto& stage : stage_order) {
                std::string cell = "-";
                for (const auto& row : report.rows)
                    if (row.stage_tag == stage && row.task == task_name &&
                        row.model == model && row.metric == metric)
                        cell = row.value;
                md << " " << cell << " |";
            }
            md << "\n";
        }
    }
    if (!by_stage.empty()) {
        md << "\n## class balance (task 1 positive fraction)\n\n|";
        for (const auto& stage : stage_order) md << " " << stage << " |";
        md << "\n|";
        for (std::size_t i = 0; i < stage_order.size(); ++i) md << "---|";
        md << "\n|";
        for (const auto& stage : stage_order) {
            std::string cell = "-";
            for (const auto& row : report.rows)
                if (row.stage_tag == stage && row.metric == "positive_fraction")
                    cell = row.value;
            md << " " << cell << " |";
        }
        md << "\n";
    }
    report.markdown = md.str();
    return report;
}

std::vector<std::string> check_thresholds(const StagedReport& report,
                                          std::span<const Threshold> thresholds) {
    std::vector<std::string> violations;
    for (const auto& t : thresholds) {
        const auto v = report.value(t.stage_tag, t.task, t.model, t.metric);
        const std::string label = t.stage_tag + "/" + t.task + "/" + t.model + "/" + t.metric;
        if (!v) {
            violations.push_back(label + " is undefined or missing");
            continue;
        }
        bool ok = false;
        if (t.op == "ge") ok = *v >= t.value;
        else if (t.op == "gt") ok = *v > t.value;
        else if (t.op == "le") ok = *v <= t.value;
        else if (t.op == "lt") ok = *v < t.value;
        else throw ConfigError("unknown threshold op: " + t.op);
        if (!ok)
            violations.push_back(label + " = " + format_double(*v) + " violates " + t.op +
                                 " " + format_double(t.value));
    }
    return violations;
}

}  // namespace burstwatch::eval
