#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "burstwatch/lifecycle.hpp"

namespace burstwatch::synth {

using lifecycle::Minute;

/// Piecewise-linear CDF over integer minutes, e.g. {(5,0.30),(15,0.51),...};
/// the final anchor carries probability 1. Sampling is quota-stratified so the
/// realized distribution matches the anchors to within one sample.
struct AnchoredCdf {
    std::vector<std::pair<std::int64_t, double>> anchors;

    void validate(const std::string& what) const;
};

struct StreamScenario {
    std::string name = "scenario";
    std::uint64_t seed = 1;
    std::int64_t origin_epoch_seconds = 1351728000;  // data-time origin of the stream
    Minute duration_minutes = 5760;
    // lifecycle parameters the stream is constructed against
    int delta = 50;
    int window_minutes = 5;

    int n_planted_bursts = 50;
    int n_hard_negatives = 250;      // trigger, never burst
    int n_quiet_background = 100;    // never trigger

    // population
    int author_pool = 20000;
    int core_authors_per_hashtag = 20;
    double core_author_bias = 0.5;
    double followers_log_mu = 4.0;
    double followers_log_sigma = 1.6;
    double statuses_log_mu = 5.5;
    double statuses_log_sigma = 1.4;
    int account_age_days_min = 1;
    int account_age_days_max = 2000;

    // series shaping
    double trickle_rate = 0.08;          // dormant tweets/minute, counts capped at 2
    int dormant_minutes_min = 30;
    int dormant_minutes_max = 1500;
    int c1_min = 8;                      // count planted at the trigger minute
    int c1_max = 22;
    double plateau_gamma_min = 0.8;      // pre-burst climb exponent
    double plateau_gamma_max = 1.6;
    double peak_excess_min = 0.15;       // burst-minute excess over threshold, x threshold
    double peak_excess_max = 0.8;
    int spike_interval_min = 4;          // active-phase heartbeat spacing
    int spike_interval_max = 12;
    double decay_start_frac_min = 0.3;   // post-offburst level, x threshold
    double decay_start_frac_max = 0.6;
    double decay_half_life_min = 20.0;
    double decay_half_life_max = 90.0;
    double negative_half_life_min = 15.0;  // hard-negative post-trigger decay
    double negative_half_life_max = 60.0;

    AnchoredCdf tbb_cdf;     // minutes from trigger to burst onset
    AnchoredCdf active_cdf;  // minutes from onset to off-burst

    // per-tweet content probabilities, [0] positives, [1] negatives/background
    double url_prob[2] = {0.28, 0.12};
    double retweet_prob[2] = {0.30, 0.18};
    double mention_prob[2] = {0.22, 0.14};
    double cooccur_prob[2] = {0.10, 0.05};
    double case_variant_prob[2] = {0.15, 0.06};
    double happy_prob[2] = {0.12, 0.06};
    double sad_prob[2] = {0.05, 0.06};
    double special_prob[2] = {0.10, 0.04};
    double sentiment_word_prob[2] = {0.35, 0.20};

    /// Prediction stages and the positive fraction the stream is calibrated
    /// to show at each one (Task-1 eligibility: triggered, not yet burst).
    std::vector<int> stage_offsets = {5, 15, 30, 60, 180, 360};
    std::vector<double> target_positive_fraction;  // filled by finalize() when empty

    /// Fills derived fields and checks feasibility; throws ConfigError.
    void finalize();

    std::string to_json() const;
    static StreamScenario from_json(const std::string& text);
    static StreamScenario load(const std::string& path);
};

/// One lifecycle cycle recovered by the offline definitional scan.
struct ReplayCycle {
    Minute trigger = -1;
    std::int64_t c1 = 0;
    Minute burst = -1;             // -1: never burst (negative cycle)
    Minute labeled_negative = -1;  // trigger + horizon, when no burst
    Minute offburst = -1;
    Minute death = -1;
};

/// Offline application of the trigger/burst/off-burst/death definitions to a
/// complete series (zeros beyond its end). Independent of the streaming engine.
std::vector<ReplayCycle> replay_series(std::span<const int> counts, Minute origin,
                                       const lifecycle::LifecycleParams& params);

struct TruthRow {
    std::string key;
    Minute trigger = -1;
    Minute burst = -1;
    Minute offburst = -1;
    Minute death = -1;
    std::int64_t tbb = -1;  // burst - trigger
    std::int64_t tra = -1;  // offburst - burst

    bool operator==(const TruthRow&) const = default;
};

std::string truth_to_csv(std::span<const TruthRow> rows);
std::vector<TruthRow> truth_from_csv(const std::string& text);

struct GenerateSummary {
    std::uint64_t tweet_count = 0;
    int triggered_cycles = 0;
    int burst_cycles = 0;
    std::vector<double> realized_positive_fraction;  // per stage
    double realized_rab_6h = 0.0;
};

/// Emits the JSONL stream and the ground-truth table. Deterministic given
/// (scenario, seed). Sentiment word lists flavor tweet text; empty lists are
/// fine. Throws ConfigError if the scenario is infeasible.
GenerateSummary generate(const StreamScenario& scenario, std::ostream& stream_out,
                         std::vector<TruthRow>& truth_out,
                         std::span<const std::string> positive_words = {},
                         std::span<const std::string> negative_words = {});

}  // namespace burstwatch::synth
