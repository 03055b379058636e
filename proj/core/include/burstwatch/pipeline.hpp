#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "burstwatch/evaluation.hpp"
#include "burstwatch/features.hpp"
#include "burstwatch/lifecycle.hpp"
#include "burstwatch/models.hpp"
#include "burstwatch/storage.hpp"
#include "burstwatch/synth.hpp"

namespace burstwatch::pipeline {

std::string stage_tag_for(int offset_minutes);
int stage_offset_for(const std::string& tag);

struct RunConfig {
    int delta = 50;
    int window_minutes = 5;
    std::vector<int> stage_offsets = {5, 15, 30, 60, 180, 360};
    std::vector<double> betas = {0.5, 1.0, 2.0};
    std::uint64_t seed = 1;
    features::SaxConfig sax;
    models::TrainingConfig training;
    std::filesystem::path sentiment_lexicon;
    std::filesystem::path emoticon_lexicon;

    lifecycle::LifecycleParams lifecycle_params() const {
        lifecycle::LifecycleParams p;
        p.delta = delta;
        p.window_minutes = window_minutes;
        return p;
    }
    std::string config_hash() const;
};

struct DetectResult {
    std::vector<lifecycle::LifecycleEvent> events;
    std::vector<lifecycle::CycleRecord> cycles;
    std::size_t records = 0;
    std::size_t parse_errors = 0;
    lifecycle::Minute last_minute = 0;
};

/// parse -> lifecycle engine -> resolved events + per-cycle stage snapshots.
/// The engine is closed `resolve_margin` minutes past the last stream minute
/// so every pending confirmation lands.
DetectResult detect_stream(std::istream& stream, const RunConfig& config,
                           const ingest::SentimentLexicon& sentiment,
                           const ingest::EmoticonLexicon& emoticons,
                           lifecycle::Minute resolve_margin = 2881);

// serialization of detect output
std::string events_to_jsonl(std::span<const lifecycle::LifecycleEvent> events);
std::vector<lifecycle::LifecycleEvent> events_from_jsonl(const std::string& text);
std::string cycles_to_jsonl(std::span<const lifecycle::CycleRecord> cycles);
std::vector<lifecycle::CycleRecord> cycles_from_jsonl(const std::string& text);

/// Builds the per-stage prototype index, top-gram tables and normalization
/// statistics from a historic window's resolved cycles.
std::vector<features::StageIndex> build_index(std::span<const lifecycle::CycleRecord> cycles,
                                              const RunConfig& config);

std::string index_to_json(std::span<const features::StageIndex> index);
std::vector<features::StageIndex> index_from_json(const std::string& text);

/// One stage's labeled feature matrix for one task.
struct StageMatrix {
    std::string stage_tag;
    features::Task task = features::Task::BurstClassification;
    models::Dataset instances;
};

/// Assembles eligible instances per (stage, task) from resolved cycles.
/// Task 1: triggered, not yet burst at t_p. Task 2: positives not yet burst.
/// Task 3: currently bursting. Labels/targets come from each cycle's outcome.
std::vector<StageMatrix> featurize(std::span<const lifecycle::CycleRecord> cycles,
                                   std::span<const features::StageIndex> index,
                                   const RunConfig& config);

std::string matrix_to_csv(const StageMatrix& matrix);
StageMatrix matrix_from_csv(const std::string& text, const std::string& stage_tag,
                            features::Task task);

struct TrainedBundle {
    // task-1 classifiers keyed by (stage_tag, beta)
    std::map<std::pair<std::string, double>, models::TrainedModel> classifiers;
    // regressors keyed by (stage_tag, task, kind)
    std::map<std::tuple<std::string, features::Task, models::RegressorKind>,
             models::TrainedModel> regressors;
    std::vector<std::string> trace_csv_lines;  // per-w F-beta table
};

TrainedBundle train_all(std::span<const StageMatrix> matrices, const RunConfig& config);

/// Applies every model (plus the three reference baselines) to the matching
/// test matrices.
std::vector<eval::PredictionRow> predict_all(const TrainedBundle& bundle,
                                             std::span<const StageMatrix> matrices,
                                             const RunConfig& config);

std::string predictions_to_csv(std::span<const eval::PredictionRow> rows);
std::vector<eval::PredictionRow> predictions_from_csv(const std::string& text);

std::string stats_to_csv(std::span<const lifecycle::LifecycleStatsRow> rows);

/// Schema document: JSON list of (index, name, family).
std::string schema_to_json();

}  // namespace burstwatch::pipeline
