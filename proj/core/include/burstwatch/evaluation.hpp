#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "burstwatch/features.hpp"

namespace burstwatch::eval {

/// Undefined denominators surface as empty optionals, never silent zeros.
struct ClassificationMetrics {
    std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f;
};

/// Exact confusion-matrix metrics; F_beta = (1+b^2) * P*R / (b^2*P + R).
ClassificationMetrics precision_recall_f(std::span<const int> predicted,
                                         std::span<const int> truth, double beta);

/// Root mean squared error over log-scale pairs; empty input is undefined.
std::optional<double> rmse_log(std::span<const double> predicted,
                               std::span<const double> truth);

struct PredictionRow {
    std::string stage_tag;
    features::Task task = features::Task::BurstClassification;
    std::string model;
    std::string key;
    int cycle = 0;
    double predicted = 0.0;  // label (+1/-1) for task 1, log-minutes otherwise
    double truth = 0.0;
};

struct ReportRow {
    std::string stage_tag;
    std::string task;
    std::string model;
    std::string metric;
    std::string value;  // number or "undefined"
};

struct StagedReport {
    std::vector<ReportRow> rows;
    std::string markdown;

    /// Numeric lookup; empty when the cell is missing or undefined.
    std::optional<double> value(const std::string& stage, const std::string& task,
                                const std::string& model,
                                const std::string& metric) const;
};

/// Aggregates per (stage, task, model): class balance, P/R/F_beta for
/// classifiers, RMSE for regressors. Stages with no eligible instances are
/// reported as empty rather than failing.
StagedReport staged_evaluation(std::span<const PredictionRow> predictions,
                               std::span<const std::string> stage_order,
                               std::span<const double> betas);

struct Threshold {
    std::string stage_tag, task, model, metric;
    std::string op;  // "ge", "gt", "le", "lt"
    double value = 0.0;
};

/// Returns human-readable violation descriptions (empty means all pass).
std::vector<std::string> check_thresholds(const StagedReport& report,
                                          std::span<const Threshold> thresholds);

}  // namespace burstwatch::eval
