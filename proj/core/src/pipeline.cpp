#include "burstwatch/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "burstwatch/rng.hpp"
#include "burstwatch/textio.hpp"

namespace burstwatch::pipeline {

using ordered_json = nlohmann::ordered_json;

std::string stage_tag_for(int offset_minutes) { return lifecycle::stage_tag(offset_minutes); }
int stage_offset_for(const std::string& tag) { return lifecycle::stage_offset(tag); }

std::string RunConfig::config_hash() const {
    std::string blob = std::to_string(delta) + "|" + std::to_string(window_minutes) + "|";
    for (int s : stage_offsets) blob += std::to_string(s) + ",";
    blob += "|";
    for (double b : betas) blob += format_double(b) + ",";
    blob += "|" + std::to_string(seed) + "|" + std::to_string(sax.alphabet_size) + "|" +
            std::to_string(sax.paa_segments) + "|" + format_double(training.train_fraction) +
            "|" + format_double(training.reg_c) + "|" + std::to_string(training.epochs) + "|" +
            std::to_string(training.cart_max_depth) + "|" +
            std::to_string(training.cart_min_leaf);
    return fnv1a64_hex(blob);
}

DetectResult detect_stream(std::istream& stream, const RunConfig& config,
                           const ingest::SentimentLexicon& sentiment,
                           const ingest::EmoticonLexicon& emoticons,
                           lifecycle::Minute resolve_margin) {
    lifecycle::LifecycleEngine engine(config.lifecycle_params(), config.stage_offsets,
                                      &sentiment);
    DetectResult result;
    lifecycle::Minute last = 0;
    result.records = ingest::read_stream(
        stream, emoticons,
        [&](const ingest::TweetRecord& rec) {
            engine.observe(rec);
            last = std::max(last, lifecycle::minute_of_epoch(rec.timestamp));
        },
        [&](const ParseError&) { ++result.parse_errors; });
    engine.close(last + resolve_margin);
    result.events = engine.events();
    result.cycles = engine.archive();
    std::sort(result.cycles.begin(), result.cycles.end(),
              [](const lifecycle::CycleRecord& a, const lifecycle::CycleRecord& b) {
                  if (a.outcome.key != b.outcome.key) return a.outcome.key < b.outcome.key;
                  return a.outcome.cycle < b.outcome.cycle;
              });
    result.last_minute = last;
    return result;
}

// ---- events ----

std::string events_to_jsonl(std::span<const lifecycle::LifecycleEvent> events) {
    std::string out;
    for (const auto& ev : events) {
        ordered_json j;
        j["key"] = ev.key;
        j["cycle"] = ev.cycle;
        j["kind"] = lifecycle::to_string(ev.kind);
        j["minute"] = ev.minute;
        if (ev.c1) j["c1"] = *ev.c1;
        if (ev.tbb) j["tbb"] = *ev.tbb;
        if (ev.tra) j["tra"] = *ev.tra;
        if (ev.lifetime) j["lifetime"] = *ev.lifetime;
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::vector<lifecycle::LifecycleEvent> events_from_jsonl(const std::string& text) {
    std::vector<lifecycle::LifecycleEvent> events;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ordered_json j = ordered_json::parse(line);
        lifecycle::LifecycleEvent ev;
        ev.key = j.at("key").get<std::string>();
        ev.cycle = j.at("cycle").get<int>();
        ev.kind = lifecycle::event_kind_from_string(j.at("kind").get<std::string>());
        ev.minute = j.at("minute").get<lifecycle::Minute>();
        if (j.contains("c1")) ev.c1 = j.at("c1").get<std::int64_t>();
        if (j.contains("tbb")) ev.tbb = j.at("tbb").get<std::int64_t>();
        if (j.contains("tra")) ev.tra = j.at("tra").get<std::int64_t>();
        if (j.contains("lifetime")) ev.lifetime = j.at("lifetime").get<std::int64_t>();
        events.push_back(std::move(ev));
    }
    return events;
}

// ---- cycles / snapshots ----

namespace {

ordered_json optional_minute(const std::optional<lifecycle::Minute>& v) {
    if (v) return *v;
    return nullptr;
}

std::optional<lifecycle::Minute> minute_from(const ordered_json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<lifecycle::Minute>();
}

template <std::size_t N>
std::array<double, N> array_from(const ordered_json& j) {
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = j.at(i).get<double>();
    return out;
}

}  // namespace

std::string cycles_to_jsonl(std::span<const lifecycle::CycleRecord> cycles) {
    std::string out;
    for (const auto& rec : cycles) {
        ordered_json j;
        j["key"] = rec.outcome.key;
        j["cycle"] = rec.outcome.cycle;
        j["first_seen"] = rec.outcome.first_seen;
        j["trigger"] = optional_minute(rec.outcome.trigger);
        j["c1"] = rec.outcome.c1;
        j["burst"] = optional_minute(rec.outcome.burst_onset);
        j["labeled_negative"] = optional_minute(rec.outcome.labeled_negative);
        j["offburst"] = optional_minute(rec.outcome.offburst);
        j["death"] = optional_minute(rec.outcome.death);
        j["resolved"] = rec.outcome.resolved;
        ordered_json snaps = ordered_json::array();
        for (const auto& s : rec.snapshots) {
            ordered_json sj;
            sj["stage"] = s.stage_tag;
            sj["offset"] = s.stage_offset;
            sj["t_p"] = s.t_p;
            sj["burst_by_tp"] = s.burst_by_tp;
            sj["series"] = s.series;
            sj["meme"] = s.meme;
            sj["user"] = s.user;
            sj["content"] = s.content;
            sj["network"] = s.network;
            sj["hashtag"] = s.hashtag;
            sj["dormancy"] = s.dormancy;
            snaps.push_back(std::move(sj));
        }
        j["snapshots"] = std::move(snaps);
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::vector<lifecycle::CycleRecord> cycles_from_jsonl(const std::string& text) {
    std::vector<lifecycle::CycleRecord> cycles;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ordered_json j = ordered_json::parse(line);
        lifecycle::CycleRecord rec;
        rec.outcome.key = j.at("key").get<std::string>();
        rec.outcome.cycle = j.at("cycle").get<int>();
        rec.outcome.first_seen = j.at("first_seen").get<lifecycle::Minute>();
        rec.outcome.trigger = minute_from(j.at("trigger"));
        rec.outcome.c1 = j.at("c1").get<std::int64_t>();
        rec.outcome.burst_onset = minute_from(j.at("burst"));
        rec.outcome.labeled_negative = minute_from(j.at("labeled_negative"));
        rec.outcome.offburst = minute_from(j.at("offburst"));
        rec.outcome.death = minute_from(j.at("death"));
        rec.outcome.resolved = j.at("resolved").get<bool>();
        for (const auto& sj : j.at("snapshots")) {
            lifecycle::StageSnapshot s;
            s.stage_tag = sj.at("stage").get<std::string>();
            s.stage_offset = sj.at("offset").get<int>();
            s.t_p = sj.at("t_p").get<lifecycle::Minute>();
            s.burst_by_tp = sj.at("burst_by_tp").get<bool>();
            s.series = sj.at("series").get<std::vector<int>>();
            s.meme = array_from<8>(sj.at("meme"));
            s.user = array_from<3>(sj.at("user"));
            s.content = array_from<5>(sj.at("content"));
            s.network = array_from<4>(sj.at("network"));
            s.hashtag = array_from<3>(sj.at("hashtag"));
            s.dormancy = array_from<2>(sj.at("dormancy"));
            rec.snapshots.push_back(std::move(s));
        }
        cycles.push_back(std::move(rec));
    }
    return cycles;
}

// ---- index ----

std::vector<features::StageIndex> build_index(std::span<const lifecycle::CycleRecord> cycles,
                                              const RunConfig& config) {
    std::vector<const lifecycle::CycleRecord*> ordered;
    ordered.reserve(cycles.size());
    for (const auto& rec : cycles) ordered.push_back(&rec);
    std::sort(ordered.begin(), ordered.end(),
              [](const lifecycle::CycleRecord* a, const lifecycle::CycleRecord* b) {
                  if (a->outcome.key != b->outcome.key) return a->outcome.key < b->outcome.key;
                  return a->outcome.cycle < b->outcome.cycle;
              });

    std::vector<features::StageIndex> out;
    for (int offset : config.stage_offsets) {
        features::StageIndex index;
        index.stage_offset = offset;
        index.stage_tag = stage_tag_for(offset);

        struct Raw {
            const lifecycle::CycleRecord* rec;
            const lifecycle::StageSnapshot* snap;
            std::array<double, features::kCoreAlpha> core;
        };
        std::vector<Raw> raws;
        std::vector<std::array<double, features::kCoreAlpha>> population;
        std::map<std::string, std::int64_t> gram_counts;
        std::int64_t gram_cycles = 0;
        for (const auto* rec : ordered) {
            const lifecycle::StageSnapshot* snap = nullptr;
            for (const auto& s : rec->snapshots)
                if (s.stage_offset == offset) snap = &s;
            if (snap == nullptr) continue;
            Raw raw{rec, snap, features::core_features(*snap)};
            population.push_back(raw.core);
            raws.push_back(std::move(raw));
            if (rec->outcome.burst_onset) {
                const std::string symbols = features::sax_encode(snap->series, config.sax);
                ++gram_cycles;
                for (const auto& gram : features::extract_3grams(symbols))
                    gram_counts[gram] += 1;
            }
        }
        index.normalizer = features::fit_normalizer(population);

        std::vector<std::pair<std::string, std::int64_t>> ranked(gram_counts.begin(),
                                                                 gram_counts.end());
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        for (std::size_t i = 0; i < ranked.size() && i < 5; ++i)
            index.gram_table.grams.push_back(ranked[i].first);
        (void)gram_cycles;

        for (const auto& raw : raws) {
            const auto& outcome = raw.rec->outcome;
            features::HistoricEntry entry;
            entry.key = outcome.key;
            entry.cycle = outcome.cycle;
            entry.normalized = index.normalizer.apply(raw.core);
            entry.bursting = outcome.burst_onset.has_value();
            if (!raw.snap->burst_by_tp) {
                if (entry.bursting)
                    entry.tbb = std::max<std::int64_t>(*outcome.burst_onset - raw.snap->t_p, 1);
                index.all.push_back(entry);
            } else if (outcome.offburst && raw.snap->t_p < *outcome.offburst) {
                entry.tra = std::max<std::int64_t>(*outcome.offburst - raw.snap->t_p, 1);
                index.tra_entries.push_back(entry);
            }
        }
        out.push_back(std::move(index));
    }
    return out;
}

std::string index_to_json(std::span<const features::StageIndex> index) {
    ordered_json stages = ordered_json::array();
    for (const auto& idx : index) {
        ordered_json j;
        j["stage"] = idx.stage_tag;
        j["offset"] = idx.stage_offset;
        j["normalizer"] = {{"mean", idx.normalizer.mean}, {"stddev", idx.normalizer.stddev}};
        j["grams"] = idx.gram_table.grams;
        auto entries_json = [](const std::vector<features::HistoricEntry>& entries) {
            ordered_json arr = ordered_json::array();
            for (const auto& e : entries) {
                ordered_json ej;
                ej["key"] = e.key;
                ej["cycle"] = e.cycle;
                ej["v"] = e.normalized;
                ej["bursting"] = e.bursting;
                ej["tbb"] = e.tbb;
                ej["tra"] = e.tra;
                arr.push_back(std::move(ej));
            }
            return arr;
        };
        j["all"] = entries_json(idx.all);
        j["tra_entries"] = entries_json(idx.tra_entries);
        stages.push_back(std::move(j));
    }
    ordered_json root;
    root["schema_version"] = features::kSchemaVersion;
    root["stages"] = std::move(stages);
    return root.dump() + "\n";
}

std::vector<features::StageIndex> index_from_json(const std::string& text) {
    ordered_json root = ordered_json::parse(text);
    std::vector<features::StageIndex> out;
    for (const auto& j : root.at("stages")) {
        features::StageIndex idx;
        idx.stage_tag = j.at("stage").get<std::string>();
        idx.stage_offset = j.at("offset").get<int>();
        idx.normalizer.mean = array_from<features::kCoreAlpha>(j.at("normalizer").at("mean"));
        idx.normalizer.stddev =
            array_from<features::kCoreAlpha>(j.at("normalizer").at("stddev"));
        idx.gram_table.grams = j.at("grams").get<std::vector<std::string>>();
        auto entries_parse = [](const ordered_json& arr) {
            std::vector<features::HistoricEntry> entries;
            for (const auto& ej : arr) {
                features::HistoricEntry e;
                e.key = ej.at("key").get<std::string>();
                e.cycle = ej.at("cycle").get<int>();
                e.normalized = array_from<features::kCoreAlpha>(ej.at("v"));
                e.bursting = ej.at("bursting").get<bool>();
                e.tbb = ej.at("tbb").get<std::int64_t>();
                e.tra = ej.at("tra").get<std::int64_t>();
                entries.push_back(std::move(e));
            }
            return entries;
        };
        idx.all = entries_parse(j.at("all"));
        idx.tra_entries = entries_parse(j.at("tra_entries"));
        out.push_back(std::move(idx));
    }
    return out;
}

// ---- feature matrices ----

std::vector<StageMatrix> featurize(std::span<const lifecycle::CycleRecord> cycles,
                                   std::span<const features::StageIndex> index,
                                   const RunConfig& config) {
    std::vector<const lifecycle::CycleRecord*> ordered;
    ordered.reserve(cycles.size());
    for (const auto& rec : cycles) ordered.push_back(&rec);
    std::sort(ordered.begin(), ordered.end(),
              [](const lifecycle::CycleRecord* a, const lifecycle::CycleRecord* b) {
                  if (a->outcome.key != b->outcome.key) return a->outcome.key < b->outcome.key;
                  return a->outcome.cycle < b->outcome.cycle;
              });

    std::vector<StageMatrix> out;
    for (int offset : config.stage_offsets) {
        const features::StageIndex* stage_index = nullptr;
        for (const auto& idx : index)
            if (idx.stage_offset == offset) stage_index = &idx;
        if (stage_index == nullptr)
            throw ConfigError("prototype index is missing stage " + stage_tag_for(offset) +
                              "; run build-index first");

        StageMatrix task1{stage_tag_for(offset), features::Task::BurstClassification, {}};
        StageMatrix task2{stage_tag_for(offset), features::Task::TbbRegression, {}};
        StageMatrix task3{stage_tag_for(offset), features::Task::TraRegression, {}};
        for (const auto* rec : ordered) {
            const lifecycle::StageSnapshot* snap = nullptr;
            for (const auto& s : rec->snapshots)
                if (s.stage_offset == offset) snap = &s;
            if (snap == nullptr) continue;
            const auto labels = lifecycle::label_instance(rec->outcome, snap->t_p);

            auto make_instance = [&](features::Task task) {
                models::Instance inst;
                inst.key = rec->outcome.key;
                inst.cycle = rec->outcome.cycle;
                inst.t_p = snap->t_p;
                inst.label = labels.burst_label;
                const auto vec = features::assemble(rec->outcome.key, rec->outcome.cycle,
                                                    *snap, config.sax, *stage_index, task);
                inst.x.assign(vec.values.begin(), vec.values.end());
                return inst;
            };

            if (!snap->burst_by_tp) {
                task1.instances.push_back(make_instance(features::Task::BurstClassification));
                if (labels.burst_label > 0 && labels.tbb) {
                    auto inst = make_instance(features::Task::TbbRegression);
                    inst.log_target = std::log(static_cast<double>(*labels.tbb));
                    task2.instances.push_back(std::move(inst));
                }
            } else if (labels.tra) {
                auto inst = make_instance(features::Task::TraRegression);
                inst.log_target = std::log(static_cast<double>(*labels.tra));
                task3.instances.push_back(std::move(inst));
            }
        }
        out.push_back(std::move(task1));
        out.push_back(std::move(task2));
        out.push_back(std::move(task3));
    }
    return out;
}

std::string matrix_to_csv(const StageMatrix& matrix) {
    std::string out = "key,cycle,stage,t_p,label,tbb,tra";
    for (const auto& entry : features::schema()) {
        out += ',';
        out += entry.name;
    }
    out += '\n';
    for (const auto& inst : matrix.instances) {
        out += csv_escape(inst.key);
        out += ',';
        out += std::to_string(inst.cycle);
        out += ',';
        out += matrix.stage_tag;
        out += ',';
        out += std::to_string(inst.t_p);
        out += ',';
        out += inst.label > 0 ? "1" : "-1";
        // tbb / tra in raw minutes for the matching regression task
        const std::string minutes =
            matrix.task == features::Task::BurstClassification
                ? std::string()
                : std::to_string(std::llround(std::exp(inst.log_target)));
        out += ',';
        if (matrix.task == features::Task::TbbRegression) out += minutes;
        out += ',';
        if (matrix.task == features::Task::TraRegression) out += minutes;
        for (double v : inst.x) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

StageMatrix matrix_from_csv(const std::string& text, const std::string& stage_tag,
                            features::Task task) {
    StageMatrix matrix{stage_tag, task, {}};
    std::istringstream in(text);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        auto f = csv_split(line);
        if (f.size() != 7 + features::kAlpha)
            throw ConfigError("feature matrix row has wrong width");
        models::Instance inst;
        inst.key = f[0];
        inst.cycle = static_cast<int>(parse_int(f[1]));
        inst.t_p = parse_int(f[3]);
        inst.label = parse_int(f[4]) > 0 ? 1 : -1;
        const std::string& minutes = task == features::Task::TbbRegression ? f[5] : f[6];
        if (task != features::Task::BurstClassification && !minutes.empty())
            inst.log_target = std::log(std::max(parse_double(minutes), 1.0));
        inst.x.reserve(features::kAlpha);
        for (int i = 0; i < features::kAlpha; ++i)
            inst.x.push_back(parse_double(f[static_cast<std::size_t>(7 + i)]));
        matrix.instances.push_back(std::move(inst));
    }
    return matrix;
}

// ---- training / prediction ----

namespace {

std::string classifier_name(double beta) { return "weighted-svm-f" + format_double(beta); }

const StageMatrix* find_matrix(std::span<const StageMatrix> matrices,
                               const std::string& stage, features::Task task) {
    for (const auto& m : matrices)
        if (m.stage_tag == stage && m.task == task) return &m;
    return nullptr;
}

}  // namespace

TrainedBundle train_all(std::span<const StageMatrix> matrices, const RunConfig& config) {
    TrainedBundle bundle;
    bundle.trace_csv_lines.push_back("stage,beta,w,f,precision,recall");
    for (int offset : config.stage_offsets) {
        const std::string stage = stage_tag_for(offset);
        const StageMatrix* task1 =
            find_matrix(matrices, stage, features::Task::BurstClassification);
        if (task1 != nullptr && !task1->instances.empty()) {
            models::TrainingConfig tc = config.training;
            tc.seed = config.seed ^ fnv1a64(stage);
            auto [tns, tts] = models::stratified_split(task1->instances, tc.train_fraction,
                                                       tc.seed);
            bool splittable = !tns.empty() && !tts.empty();
            std::int64_t tns_pos = 0, tns_neg = 0, tts_pos = 0;
            for (const auto& inst : tns) (inst.label > 0 ? tns_pos : tns_neg) += 1;
            for (const auto& inst : tts) tts_pos += inst.label > 0 ? 1 : 0;
            if (splittable && tns_pos > 0 && tns_neg > 0 && tts_pos > 0) {
                auto selected =
                    models::optimize_classifier_multi(tns, tts, tc, config.betas);
                for (std::size_t b = 0; b < config.betas.size(); ++b) {
                    selected[b].stage_tag = stage;
                    for (const auto& row : selected[b].trace)
                        bundle.trace_csv_lines.push_back(
                            stage + "," + format_double(config.betas[b]) + "," +
                            std::to_string(row.w) + "," + format_double(row.f) + "," +
                            format_double(row.precision) + "," + format_double(row.recall));
                    bundle.classifiers.emplace(std::make_pair(stage, config.betas[b]),
                                               std::move(selected[b]));
                }
            }
        }
        for (features::Task task :
             {features::Task::TbbRegression, features::Task::TraRegression}) {
            const StageMatrix* m = find_matrix(matrices, stage, task);
            if (m == nullptr || m->instances.size() < 3) continue;
            models::TrainingConfig tc = config.training;
            tc.seed = config.seed ^ fnv1a64(stage);
            for (models::RegressorKind kind :
                 {models::RegressorKind::LinearRegression, models::RegressorKind::Cart}) {
                models::TrainedModel model = models::train_regressor(m->instances, kind, tc);
                model.stage_tag = stage;
                model.task = task;
                bundle.regressors.emplace(std::make_tuple(stage, task, kind),
                                          std::move(model));
            }
        }
    }
    return bundle;
}

std::vector<eval::PredictionRow> predict_all(const TrainedBundle& bundle,
                                             std::span<const StageMatrix> matrices,
                                             const RunConfig& config) {
    std::vector<eval::PredictionRow> rows;
    for (int offset : config.stage_offsets) {
        const std::string stage = stage_tag_for(offset);
        const StageMatrix* task1 =
            find_matrix(matrices, stage, features::Task::BurstClassification);
        if (task1 != nullptr && !task1->instances.empty()) {
            double prior = 0.0;
            bool have_model = false;
            for (double beta : config.betas) {
                auto it = bundle.classifiers.find({stage, beta});
                if (it == bundle.classifiers.end()) continue;
                have_model = true;
                prior = it->second.train_positive_fraction;
                for (const auto& inst : task1->instances) {
                    eval::PredictionRow row;
                    row.stage_tag = stage;
                    row.task = features::Task::BurstClassification;
                    row.model = classifier_name(beta);
                    row.key = inst.key;
                    row.cycle = inst.cycle;
                    row.predicted = models::predict_label(it->second, inst.x);
                    row.truth = inst.label;
                    rows.push_back(std::move(row));
                }
            }
            if (have_model) {
                Rng rng(config.seed ^ fnv1a64(stage + "|prior-random"));
                for (const auto& inst : task1->instances) {
                    eval::PredictionRow all_pos{
                        stage, features::Task::BurstClassification, "baseline-all-positive",
                        inst.key, inst.cycle, 1.0, static_cast<double>(inst.label)};
                    rows.push_back(all_pos);
                    eval::PredictionRow random{
                        stage, features::Task::BurstClassification, "baseline-prior-random",
                        inst.key, inst.cycle, rng.next_unit() < prior ? 1.0 : -1.0,
                        static_cast<double>(inst.label)};
                    rows.push_back(random);
                }
            }
        }
        for (features::Task task :
             {features::Task::TbbRegression, features::Task::TraRegression}) {
            const StageMatrix* m = find_matrix(matrices, stage, task);
            if (m == nullptr || m->instances.empty()) continue;
            bool have_baseline = false;
            double baseline_mean = 0.0;
            for (models::RegressorKind kind :
                 {models::RegressorKind::LinearRegression, models::RegressorKind::Cart}) {
                auto it = bundle.regressors.find({stage, task, kind});
                if (it == bundle.regressors.end()) continue;
                if (!have_baseline) {
                    have_baseline = true;
                    baseline_mean = it->second.train_target_mean;
                }
                const std::string name = kind == models::RegressorKind::LinearRegression
                                             ? "linear-regression"
                                             : "cart";
                for (const auto& inst : m->instances) {
                    eval::PredictionRow row;
                    row.stage_tag = stage;
                    row.task = task;
                    row.model = name;
                    row.key = inst.key;
                    row.cycle = inst.cycle;
                    row.predicted = models::predict_time(it->second, inst.x);
                    row.truth = inst.log_target;
                    rows.push_back(std::move(row));
                }
            }
            if (have_baseline) {
                for (const auto& inst : m->instances) {
                    eval::PredictionRow row;
                    row.stage_tag = stage;
                    row.task = task;
                    row.model = "baseline-global-mean";
                    row.key = inst.key;
                    row.cycle = inst.cycle;
                    row.predicted = baseline_mean;
                    row.truth = inst.log_target;
                    rows.push_back(std::move(row));
                }
            }
        }
    }
    return rows;
}

std::string predictions_to_csv(std::span<const eval::PredictionRow> rows) {
    std::string out = "stage,task,model,key,cycle,predicted,truth\n";
    for (const auto& r : rows) {
        out += r.stage_tag;
        out += ',';
        out += features::to_string(r.task);
        out += ',';
        out += r.model;
        out += ',';
        out += csv_escape(r.key);
        out += ',';
        out += std::to_string(r.cycle);
        out += ',';
        out += format_double(r.predicted);
        out += ',';
        out += format_double(r.truth);
        out += '\n';
    }
    return out;
}

std::vector<eval::PredictionRow> predictions_from_csv(const std::string& text) {
    std::vector<eval::PredictionRow> rows;
    std::istringstream in(text);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        auto f = csv_split(line);
        if (f.size() != 7) throw ConfigError("prediction row needs 7 fields");
        eval::PredictionRow r;
        r.stage_tag = f[0];
        r.task = features::task_from_string(f[1]);
        r.model = f[2];
        r.key = f[3];
        r.cycle = static_cast<int>(parse_int(f[4]));
        r.predicted = parse_double(f[5]);
        r.truth = parse_double(f[6]);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string stats_to_csv(std::span<const lifecycle::LifecycleStatsRow> rows) {
    std::string out = "checkpoint_minutes,rab,rob,rad\n";
    for (const auto& r : rows) {
        out += std::to_string(r.checkpoint_minutes);
        out += ',';
        out += format_double(r.rab);
        out += ',';
        out += format_double(r.rob);
        out += ',';
        out += format_double(r.rad);
        out += '\n';
    }
    return out;
}

std::string schema_to_json() {
    ordered_json arr = ordered_json::array();
    for (const auto& entry : features::schema())
        arr.push_back({{"index", entry.index}, {"name", entry.name}, {"family", entry.family}});
    ordered_json root;
    root["schema_version"] = features::kSchemaVersion;
    root["alpha"] = features::kAlpha;
    root["similarity_core"] = features::kCoreAlpha;
    root["features"] = std::move(arr);
    return root.dump(2) + "\n";
}

}  // namespace burstwatch::pipeline
