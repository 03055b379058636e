#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "burstwatch/features.hpp"

namespace burstwatch::models {

/// One training/evaluation row: raw (unnormalized) features plus ground truth.
struct Instance {
    std::string key;
    int cycle = 0;
    std::int64_t t_p = 0;           // prediction minute
    std::vector<double> x;
    int label = -1;                 // +1 / -1
    double log_target = 0.0;        // ln(max(TBB,1)) or ln(max(TRA,1)) where applicable
};

using Dataset = std::vector<Instance>;

struct TrainingConfig {
    double train_fraction = 0.75;   // TNS share of the stratified split
    double beta = 1.0;              // F-beta objective of the weight sweep
    double reg_c = 1.0;             // SVM hinge weight (lambda = 1/(C*n))
    int epochs = 150;               // full-batch subgradient epochs
    std::uint64_t seed = 1;
    int cart_max_depth = 6;
    int cart_min_leaf = 8;
    bool allow_ridge_fallback = true;  // OLS falls back to ridge when singular
};

/// z-score statistics fitted on the training rows; applied before any model.
struct FeatureScaler {
    std::vector<double> mean;
    std::vector<double> stddev;  // population; zero-variance features map to 0

    std::vector<double> apply(std::span<const double> x) const;
};

FeatureScaler fit_scaler(const Dataset& data);

struct LinearParams {
    std::vector<double> weights;
    double bias = 0.0;
};

struct CartNode {
    int feature = -1;          // -1 marks a leaf
    double threshold = 0.0;
    double value = 0.0;        // leaf mean
    int left = -1;
    int right = -1;
};

struct CartParams {
    std::vector<CartNode> nodes;  // node 0 is the root
};

struct WeightTraceRow {
    int w = 0;
    double f = 0.0;
    double precision = 0.0;
    double recall = 0.0;
};

enum class ModelKind { WeightedLinearSvm, LinearRegression, Cart };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view s);

struct TrainedModel {
    ModelKind kind = ModelKind::WeightedLinearSvm;
    std::string stage_tag;
    features::Task task = features::Task::BurstClassification;
    int schema_version = features::kSchemaVersion;
    FeatureScaler scaler;
    std::variant<LinearParams, CartParams> params;
    // classifier metadata
    int chosen_weight = 1;
    double beta = 1.0;
    double tts_f = 0.0;
    std::vector<WeightTraceRow> trace;
    double train_positive_fraction = 0.0;
    // regressor metadata
    double train_target_mean = 0.0;

    std::string to_json() const;
    static TrainedModel from_json(const std::string& text);
};

/// L2-regularized hinge loss, positive-class hinge terms scaled by w;
/// deterministic full-batch subgradient descent (no RNG). Features must
/// already be scaled. Throws DegenerateDataError on a single-class set.
LinearParams train_weighted_svm(const std::vector<std::vector<double>>& x,
                                const std::vector<int>& y, int positive_weight,
                                const TrainingConfig& config);

/// Deterministic stratified split into (TNS, TTS).
std::pair<Dataset, Dataset> stratified_split(const Dataset& data,
                                             double train_fraction,
                                             std::uint64_t seed);

/// Sweeps w over {1..2*PNR} (PNR = ceil(#neg/#pos) on TNS), trains a weighted
/// SVM per w, keeps the best F_beta on TTS (strict improvement, so ties keep
/// the smallest w). Throws ConfigError on an empty grid and
/// DegenerateDataError when TTS has no positive instance.
TrainedModel optimize_classifier(const Dataset& tns, const Dataset& tts,
                                 const TrainingConfig& config);

/// Same sweep selected under several F-beta objectives at once; each grid
/// point trains a single time. Returns one model per beta, in order.
std::vector<TrainedModel> optimize_classifier_multi(const Dataset& tns, const Dataset& tts,
                                                    const TrainingConfig& config,
                                                    std::span<const double> betas);

/// Returns {+1,-1}; score >= 0 maps to +1. Raw (unscaled) features in schema
/// order; the model applies its own scaler. Throws ContractViolation on a
/// dimension/kind mismatch.
int predict_label(const TrainedModel& model, std::span<const double> x,
                  double* raw_score = nullptr);

enum class RegressorKind { LinearRegression, Cart };

/// OLS with a ridge fallback when the normal equations are singular, or a
/// variance-reduction CART. Targets are the instances' log_target values.
TrainedModel train_regressor(const Dataset& train, RegressorKind kind,
                             const TrainingConfig& config);

/// Log-scale prediction (ln minutes).
double predict_time(const TrainedModel& model, std::span<const double> x);

}  // namespace burstwatch::models
