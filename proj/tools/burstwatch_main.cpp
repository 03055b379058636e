// burstwatch CLI: simulate -> detect -> featurize / build-index -> train ->
// predict -> evaluate, plus lifecycle statistics.

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "burstwatch/pipeline.hpp"
#include "burstwatch/textio.hpp"

namespace bw = burstwatch;
using bw::pipeline::RunConfig;
using bw::storage::DataLayout;

namespace {

constexpr int kArtifactVersion = 1;

std::string iso8601(std::int64_t epoch_seconds) {
    std::time_t t = static_cast<std::time_t>(epoch_seconds);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<int> parse_int_list(const std::string& csv) {
    std::vector<int> out;
    for (auto part : bw::split(csv, ','))
        if (!part.empty()) out.push_back(static_cast<int>(bw::parse_int(part)));
    return out;
}

std::vector<double> parse_double_list(const std::string& csv) {
    std::vector<double> out;
    for (auto part : bw::split(csv, ','))
        if (!part.empty()) out.push_back(bw::parse_double(part));
    return out;
}

struct CliOptions {
    std::string out_dir;
    int delta = 50;
    int window_minutes = 5;
    std::string stages = "5,15,30,60,180,360";
    std::string betas = "0.5,1,2";
    std::uint64_t seed = 1;
    std::string sentiment_lexicon = "assets/lexicons/sentiment.tsv";
    std::string emoticon_lexicon = "assets/lexicons/emoticons.txt";
    int epochs = 150;

    RunConfig run_config() const {
        RunConfig cfg;
        cfg.delta = delta;
        cfg.window_minutes = window_minutes;
        cfg.stage_offsets = parse_int_list(stages);
        cfg.betas = parse_double_list(betas);
        cfg.seed = seed;
        cfg.training.seed = seed;
        cfg.training.epochs = epochs;
        cfg.sentiment_lexicon = sentiment_lexicon;
        cfg.emoticon_lexicon = emoticon_lexicon;
        return cfg;
    }

    DataLayout layout() const {
        std::string root = out_dir;
        if (root.empty()) {
            if (const char* env = std::getenv("BURSTWATCH_DATA_DIR")) root = env;
            else root = ".";
        }
        return DataLayout{root};
    }
};

std::string manifest_created_at(const DataLayout& layout,
                                const std::filesystem::path& source_payload) {
    const auto manifest_path = layout.manifest_for(source_payload);
    if (std::filesystem::exists(manifest_path))
        return bw::storage::Manifest::from_json(bw::storage::read_file(manifest_path))
            .created_at;
    return iso8601(0);
}

std::string require_artifact(const DataLayout& layout, const std::filesystem::path& path,
                             const std::string& kind, const std::string& producer) {
    try {
        return bw::storage::load_artifact(layout, path, kind, kArtifactVersion);
    } catch (const bw::storage::MissingArtifactError&) {
        throw bw::ConfigError("missing " + kind + " artifact '" + path.string() +
                              "'; run `" + producer + "` first");
    }
}

// ---- subcommand bodies ----

int cmd_simulate(const CliOptions& opts, const std::string& scenario_path,
                 std::uint64_t seed_override, bool seed_given) {
    const DataLayout layout = opts.layout();
    layout.ensure_dirs();
    bw::synth::StreamScenario scenario = bw::synth::StreamScenario::load(scenario_path);
    if (seed_given) scenario.seed = seed_override;
    scenario.finalize();

    std::vector<std::string> pos_words, neg_words;
    if (std::filesystem::exists(opts.sentiment_lexicon)) {
        std::ifstream lex(opts.sentiment_lexicon);
        std::string line;
        while (std::getline(lex, line)) {
            if (line.empty() || line[0] == '#') continue;
            auto parts = bw::split(line, '\t');
            if (parts.size() != 3) continue;
            const double pos = bw::parse_double(parts[1]);
            const double neg = bw::parse_double(parts[2]);
            if (pos >= 0.5) pos_words.emplace_back(parts[0]);
            if (neg >= 0.5) neg_words.emplace_back(parts[0]);
        }
    }

    const auto stream_path = layout.streams() / (scenario.name + ".jsonl");
    const auto truth_path = layout.streams() / (scenario.name + ".truth.csv");
    std::vector<bw::synth::TruthRow> truth;
    bw::synth::GenerateSummary summary;
    {
        std::ofstream out(stream_path, std::ios::binary | std::ios::trunc);
        if (!out) throw bw::ConfigError("cannot write " + stream_path.string());
        summary = bw::synth::generate(scenario, out, truth, pos_words, neg_words);
    }
    const std::string created_at =
        iso8601(scenario.origin_epoch_seconds + scenario.duration_minutes * 60);
    const std::string config_hash = bw::fnv1a64_hex(scenario.to_json());
    bw::storage::save_manifest_for_existing(layout, stream_path, "tweet-stream",
                                            kArtifactVersion, created_at, config_hash);
    bw::storage::save_artifact(layout, truth_path, "lifecycle-truth", kArtifactVersion,
                               created_at, config_hash, bw::synth::truth_to_csv(truth));

    std::cout << "simulate: " << summary.tweet_count << " tweets, "
              << summary.triggered_cycles << " triggered cycles ("
              << summary.burst_cycles << " bursting) -> " << stream_path.string() << "\n";
    return 0;
}

int cmd_detect(const CliOptions& opts, const std::string& name) {
    const DataLayout layout = opts.layout();
    layout.ensure_dirs();
    const RunConfig cfg = opts.run_config();
    const auto stream_path = layout.streams() / (name + ".jsonl");
    try {
        bw::storage::verify_artifact(layout, stream_path, "tweet-stream", kArtifactVersion);
    } catch (const bw::storage::MissingArtifactError&) {
        throw bw::ConfigError("missing tweet-stream artifact '" + stream_path.string() +
                              "'; run `simulate` first");
    }
    const auto sentiment = bw::ingest::SentimentLexicon::load(cfg.sentiment_lexicon);
    const auto emoticons = bw::ingest::EmoticonLexicon::load(cfg.emoticon_lexicon);

    std::ifstream in(stream_path, std::ios::binary);
    const auto result = bw::pipeline::detect_stream(in, cfg, sentiment, emoticons);

    const std::string created_at = manifest_created_at(layout, stream_path);
    const auto events_path = layout.events() / (name + ".events.jsonl");
    const auto cycles_path = layout.events() / (name + ".cycles.jsonl");
    bw::storage::save_artifact(layout, events_path, "lifecycle-events", kArtifactVersion,
                               created_at, cfg.config_hash(),
                               bw::pipeline::events_to_jsonl(result.events));
    bw::storage::save_artifact(layout, cycles_path, "cycle-snapshots", kArtifactVersion,
                               created_at, cfg.config_hash(),
                               bw::pipeline::cycles_to_jsonl(result.cycles));
    std::cout << "detect: " << result.records << " records (" << result.parse_errors
              << " parse errors), " << result.cycles.size() << " resolved cycles, "
              << result.events.size() << " events -> " << events_path.string() << "\n";
    return 0;
}

int cmd_build_index(const CliOptions& opts, const std::string& name) {
    const DataLayout layout = opts.layout();
    layout.ensure_dirs();
    const RunConfig cfg = opts.run_config();
    const auto cycles_path = layout.events() / (name + ".cycles.jsonl");
    const std::string payload =
        require_artifact(layout, cycles_path, "cycle-snapshots", "detect");
    const auto cycles = bw::pipeline::cycles_from_jsonl(payload);
    const auto index = bw::pipeline::build_index(cycles, cfg);

    const std::string created_at = manifest_created_at(layout, cycles_path);
    const auto index_path = layout.models() / "index.json";
    bw::storage::save_artifact(layout, index_path, "prototype-index", kArtifactVersion,
                               created_at, cfg.config_hash(),
                               bw::pipeline::index_to_json(index));
    bw::storage::save_artifact(layout, layout.models() / "schema.json", "feature-schema",
                               kArtifactVersion, created_at, cfg.config_hash(),
                               bw::pipeline::schema_to_json());
    std::size_t historic = 0;
    for (const auto& idx : index) historic += idx.all.size();
    std::cout << "build-index: " << historic << " historic stage entries from '" << name
              << "' -> " << index_path.string() << "\n";
    return 0;
}

int cmd_featurize(const CliOptions& opts, const std::string& name) {
    const DataLayout layout = opts.layout();
    layout.ensure_dirs();
    const RunConfig cfg = opts.run_config();
    const auto cycles_path = layout.events() / (name + ".cycles.jsonl");
    const auto cycles = bw::pipeline::cycles_from_jsonl(
        require_artifact(layout, cycles_path, "cycle-snapshots", "detect"));
    const auto index = bw::pipeline::index_from_json(require_artifact(
        layout, layout.models() / "index.json", "prototype-index", "build-index"));

    const auto matrices = bw::pipeline::featurize(cycles, index, cfg);
    const std::string created_at = manifest_created_at(layout, cycles_path);
    std::size_t rows = 0;
    for (const auto& m : matrices) {
        const std::string task_short =
            m.task == bw::features::Task::BurstClassification
                ? "task1"
                : (m.task == bw::features::Task::TbbRegression ? "task2" : "task3");
        const auto path =
            layout.features() / (name + "." + m.stage_tag + "." + task_short + ".csv");
        bw::storage::save_artifact(layout, path, "feature-matrix", kArtifactVersion,
                                   created_at, cfg.config_hash(),
                                   bw::pipeline::matrix_to_csv(m));
        rows += m.instances.size();
    }
    std::cout << "featurize: " << rows << " instances across " << matrices.size()
              << " stage/task matrices for '" << name << "'\n";
    return 0;
}

std::vector<bw::pipeline::StageMatrix> load_matrices(const DataLayout& layout,
                                                     const RunConfig& cfg,
                                                     const std::string& name) {
    std::vector<bw::pipeline::StageMatrix> matrices;
    for (int offset : cfg.stage_offsets) {
        const std::string stage = bw::pipeline::stage_tag_for(offset);
        const std::pair<std::string, bw::features::Task> tasks[] = {
            {"task1", bw::features::Task::BurstClassification},
            {"task2", bw::features::Task::TbbRegression},
            {"task3", bw::features::Task::TraRegression},
        };
        for (const auto& [short_name, task] : tasks) {
            const auto path =
                layout.features() / (name + "." + stage + "." + short_name + ".csv");
            const std::string payload =
                require_artifact(layout, path, "feature-matrix", "featurize");
            matrices.push_back(bw::pipeline::matrix_from_csv(payload, stage, task));
        }
    }
    return matrices;
}

std::string model_file_name(const bw::models::TrainedModel& model) {
    if (model.kind == bw::models::ModelKind::WeightedLinearSvm)
        return "task1_" + model.stage_tag + "_f" + bw::format_double(model.beta) + ".json";
    const std::string task_short =
        model.task == bw::features::Task::TbbRegression ? "task2" : "task3";
    return task_short + "_" + model.stage_tag + "_" + to_string(model.kind) + ".json";
}

int cmd_train(const CliOptions& opts, const std::string& name) {
    const DataLayout layout = opts.layout();
    layout.ensure_dirs();
    const RunConfig cfg = opts.run_config();
    const auto matrices = load_matrices(layout, cfg, name);
    const auto bundle = bw::pipeline::train_all(matrices, cfg);

    const std::string created_at = manifest_created_at(
        layout, layout.features() / (name + "." + bw::pipeline::stage_tag_for(
                                                      cfg.stage_offsets.front()) +
                                     ".task1.csv"));
    std::size_t written = 0;
    for (const auto& [key, model] : bundle.classifiers) {
        bw::storage::save_artifact(layout, layout.models() / model_file_name(model),
                                   "trained-model", kArtifactVersion, created_at,
                                   cfg.config_hash(), model.to_json());
        ++written;
    }
    for (const auto& [key, model] : bundle.regressors) {
        bw::storage::save_artifact(layout, layout.models() / model_file_name(model),
                                   "trained-model", kArtifactVersion, created_at,
                                   cfg.config_hash(), model.to_json());
        ++written;
    }
    std::string trace;
    for (const auto& line : bundle.trace_csv_lines) trace += line + "\n";
    bw::storage::save_artifact(layout, layout.models() / "training_trace.csv",
                               "training-trace", kArtifactVersion, created_at,
                               cfg.config_hash(), trace);
    std::cout << "train: " << written << " models from '" << name << "' -> "
              << layout.models().string() << "\n";
    return 0;
}

int cmd_predict(const CliOptions& opts, const std::string& name) {
    const DataLayout layout = opts.layout();
    layout.ensure_dirs();
    const RunConfig cfg = opts.run_config();
    const auto matrices = load_matrices(layout, cfg, name);

    bw::pipeline::TrainedBundle bundle;
    bool any_model = false;
    for (int offset : cfg.stage_offsets) {
        const std::string stage = bw::pipeline::stage_tag_for(offset);
        for (double beta : cfg.betas) {
            const auto path =
                layout.models() / ("task1_" + stage + "_f" + bw::format_double(beta) + ".json");
            if (!std::filesystem::exists(path)) continue;
            bundle.classifiers.emplace(
                std::make_pair(stage, beta),
                bw::models::TrainedModel::from_json(bw::storage::load_artifact(
                    layout, path, "trained-model", kArtifactVersion)));
            any_model = true;
        }
        const std::tuple<std::string, bw::features::Task, bw::models::RegressorKind> regs[] = {
            {"task2", bw::features::Task::TbbRegression,
             bw::models::RegressorKind::LinearRegression},
            {"task2", bw::features::Task::TbbRegression, bw::models::RegressorKind::Cart},
            {"task3", bw::features::Task::TraRegression,
             bw::models::RegressorKind::LinearRegression},
            {"task3", bw::features::Task::TraRegression, bw::models::RegressorKind::Cart},
        };
        for (const auto& [short_name, task, kind] : regs) {
            const std::string kind_name =
                kind == bw::models::RegressorKind::LinearRegression ? "linear-regression"
                                                                    : "cart";
            const auto path =
                layout.models() / (short_name + "_" + stage + "_" + kind_name + ".json");
            if (!std::filesystem::exists(path)) continue;
            bundle.regressors.emplace(
                std::make_tuple(stage, task, kind),
                bw::models::TrainedModel::from_json(bw::storage::load_artifact(
                    layout, path, "trained-model", kArtifactVersion)));
            any_model = true;
        }
    }
    if (!any_model)
        throw bw::ConfigError("no trained models under " + layout.models().string() +
                              "; run `train` first");

    const auto rows = bw::pipeline::predict_all(bundle, matrices, cfg);
    const std::string created_at = manifest_created_at(
        layout, layout.features() / (name + "." + bw::pipeline::stage_tag_for(
                                                      cfg.stage_offsets.front()) +
                                     ".task1.csv"));
    const auto path = layout.reports() / (name + ".predictions.csv");
    bw::storage::save_artifact(layout, path, "predictions", kArtifactVersion, created_at,
                               cfg.config_hash(), bw::pipeline::predictions_to_csv(rows));
    std::cout << "predict: " << rows.size() << " predictions -> " << path.string() << "\n";
    return 0;
}

int cmd_evaluate(const CliOptions& opts, const std::string& name,
                 const std::string& thresholds_path) {
    const DataLayout layout = opts.layout();
    layout.ensure_dirs();
    const RunConfig cfg = opts.run_config();
    const auto pred_path = layout.reports() / (name + ".predictions.csv");
    const auto rows = bw::pipeline::predictions_from_csv(require_artifact(
        layout, pred_path, "predictions", "predict (after `train`)"));

    std::vector<std::string> stage_order;
    for (int offset : cfg.stage_offsets)
        stage_order.push_back(bw::pipeline::stage_tag_for(offset));
    const auto report = bw::eval::staged_evaluation(rows, stage_order, cfg.betas);

    std::string csv = "stage,task,model,metric,value\n";
    for (const auto& row : report.rows)
        csv += row.stage_tag + "," + row.task + "," + row.model + "," + row.metric + "," +
               row.value + "\n";
    const std::string created_at = manifest_created_at(layout, pred_path);
    bw::storage::save_artifact(layout, layout.reports() / (name + ".report.csv"),
                               "evaluation-report", kArtifactVersion, created_at,
                               cfg.config_hash(), csv);
    bw::storage::save_artifact(layout, layout.reports() / (name + ".report.md"),
                               "evaluation-report-md", kArtifactVersion, created_at,
                               cfg.config_hash(), report.markdown);
    std::cout << report.markdown;

    if (!thresholds_path.empty()) {
        const auto spec = bw::storage::read_file(thresholds_path);
        std::vector<bw::eval::Threshold> thresholds;
        std::istringstream in(spec);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            auto f = bw::csv_split(line);
            if (f.size() != 6)
                throw bw::ConfigError(
                    "threshold rows: stage,task,model,metric,op,value");
            thresholds.push_back({f[0], f[1], f[2], f[3], f[4], bw::parse_double(f[5])});
        }
        const auto violations = bw::eval::check_thresholds(report, thresholds);
        for (const auto& v : violations) std::cerr << "threshold violated: " << v << "\n";
        if (!violations.empty()) return 1;
    }
    return 0;
}

int cmd_stats(const CliOptions& opts, const std::string& name,
              const std::string& checkpoints_csv) {
    const DataLayout layout = opts.layout();
    layout.ensure_dirs();
    const RunConfig cfg = opts.run_config();
    const auto events_path = layout.events() / (name + ".events.jsonl");
    const auto events = bw::pipeline::events_from_jsonl(
        require_artifact(layout, events_path, "lifecycle-events", "detect"));

    std::vector<std::int64_t> checkpoints;
    for (auto part : bw::split(checkpoints_csv, ','))
        if (!part.empty()) checkpoints.push_back(bw::parse_int(part));
    const auto rows = bw::lifecycle::lifecycle_statistics(events, checkpoints);

    const std::string csv = bw::pipeline::stats_to_csv(rows);
    bw::storage::save_artifact(layout, layout.reports() / (name + ".lifecycle_stats.csv"),
                               "lifecycle-stats", kArtifactVersion,
                               manifest_created_at(layout, events_path), cfg.config_hash(),
                               csv);
    std::cout << "checkpoint  RAB      ROB      RAD\n";
    for (const auto& row : rows) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%7lldmin  %6.2f%%  %6.2f%%  %6.2f%%\n",
                      static_cast<long long>(row.checkpoint_minutes), row.rab * 100.0,
                      row.rob * 100.0, row.rad * 100.0);
        std::cout << buf;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bursting-hashtag detection and prediction pipeline"};
    app.require_subcommand(1);
    app.fallthrough();

    CliOptions opts;
    app.add_option("--out", opts.out_dir,
                   "data root (default: $BURSTWATCH_DATA_DIR or '.')");
    app.add_option("--delta", opts.delta, "trigger threshold (sliding-window sum)");
    app.add_option("--window-minutes", opts.window_minutes, "trigger window width");
    app.add_option("--stages", opts.stages, "prediction stage offsets, minutes CSV");
    app.add_option("--beta", opts.betas, "F-beta objectives, CSV");
    app.add_option("--seed", opts.seed, "run seed");
    app.add_option("--sentiment-lexicon", opts.sentiment_lexicon, "TSV word lexicon");
    app.add_option("--emoticon-lexicon", opts.emoticon_lexicon, "emoticon lexicon");
    app.add_option("--epochs", opts.epochs, "SVM training epochs");

    std::string scenario_path, name, thresholds_path;
    std::string checkpoints = "5,15,30,60,180,360,1440,2880";
    std::uint64_t seed_override = 0;

    auto* simulate = app.add_subcommand("simulate", "generate a labeled synthetic stream");
    simulate->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    auto* seed_opt = simulate->add_option("--scenario-seed", seed_override,
                                          "override the scenario seed");

    auto* detect = app.add_subcommand("detect", "run the lifecycle engine over a stream");
    detect->add_option("--name", name, "stream name (from simulate)")->required();

    auto* build_index = app.add_subcommand(
        "build-index", "build prototype index + gram tables from a historic window");
    build_index->add_option("--name", name, "historic stream name")->required();

    auto* featurize = app.add_subcommand("featurize", "assemble staged feature matrices");
    featurize->add_option("--name", name, "stream name")->required();

    auto* train = app.add_subcommand("train", "train classifiers and regressors");
    train->add_option("--name", name, "training stream name")->required();

    auto* predict = app.add_subcommand("predict", "apply trained models to a stream");
    predict->add_option("--name", name, "stream name")->required();

    auto* evaluate = app.add_subcommand("evaluate", "staged evaluation report");
    evaluate->add_option("--name", name, "stream name")->required();
    evaluate->add_option("--thresholds", thresholds_path,
                         "CSV thresholds: stage,task,model,metric,op,value");

    auto* stats = app.add_subcommand("stats", "lifecycle RAB/ROB/RAD statistics");
    stats->add_option("--name", name, "stream name")->required();
    stats->add_option("--checkpoints", checkpoints, "checkpoint offsets, minutes CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed())
            return cmd_simulate(opts, scenario_path, seed_override, seed_opt->count() > 0);
        if (detect->parsed()) return cmd_detect(opts, name);
        if (build_index->parsed()) return cmd_build_index(opts, name);
        if (featurize->parsed()) return cmd_featurize(opts, name);
        if (train->parsed()) return cmd_train(opts, name);
        if (predict->parsed()) return cmd_predict(opts, name);
        if (evaluate->parsed()) return cmd_evaluate(opts, name, thresholds_path);
        if (stats->parsed()) return cmd_stats(opts, name, checkpoints);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    }
    return 0;
}
