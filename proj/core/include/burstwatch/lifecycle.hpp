#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "burstwatch/errors.hpp"
#include "burstwatch/ingest.hpp"

namespace burstwatch::lifecycle {

using Minute = std::int64_t;

inline Minute minute_of_epoch(std::int64_t epoch_seconds) { return epoch_seconds / 60; }

struct LifecycleParams {
    int delta = 50;                       // trigger threshold on the sliding-window sum
    int window_minutes = 5;               // sliding window width
    int burst_horizon_minutes = 1440;     // burst must land in (s, s+horizon]
    int offburst_quiet_minutes = 1440;    // below-threshold span confirming off-burst
    int death_quiet_minutes = 1440;       // trigger-unsatisfiable span confirming death
};

enum class Phase { Dormant, Triggered, Bursting, OffBurst, Dead };

enum class EventKind { Triggered, BurstOnset, OffBurst, Death, LabeledNegative };

std::string to_string(EventKind kind);
EventKind event_kind_from_string(std::string_view s);

/// "5min", "30min", "1h", "6h", ... — whole hours render as hours.
std::string stage_tag(int offset_minutes);
int stage_offset(std::string_view tag);

struct LifecycleEvent {
    std::string key;
    int cycle = 0;
    EventKind kind = EventKind::Triggered;
    Minute minute = 0;  // the definitional moment (off-burst carries t', not its confirmation time)
    // payload, populated per kind
    std::optional<std::int64_t> c1;        // Triggered
    std::optional<std::int64_t> tbb;       // BurstOnset: onset - trigger
    std::optional<std::int64_t> tra;       // OffBurst:   t' - onset
    std::optional<std::int64_t> lifetime;  // Death:      death - trigger

    bool operator==(const LifecycleEvent&) const = default;
};

/// Per-minute counts. Dense over [origin_minute, origin_minute + counts.size()).
struct TimeSeries {
    Minute origin_minute = 0;
    std::vector<int> counts;

    int at(Minute m) const {
        if (m < origin_minute) return 0;
        std::size_t idx = static_cast<std::size_t>(m - origin_minute);
        return idx < counts.size() ? counts[idx] : 0;
    }
    Minute last_minute() const {
        return origin_minute + static_cast<Minute>(counts.size()) - 1;
    }
};

/// max(c1 + delta, ceil(1.5 * c1)); the burst comparison is strict '>'.
std::int64_t burst_threshold(std::int64_t c1, int delta);

/// Sum of the window_minutes-wide window ending at `minute` exceeds delta?
/// Minutes before the series origin count as zero.
bool check_trigger(const TimeSeries& series, Minute minute, const LifecycleParams& params);

struct AdopterStats {
    int tweet_count = 0;
    std::int64_t followers = 0;       // latest seen
    std::int64_t account_created = 0;
    std::int64_t statuses = 0;        // latest seen
};

/// Directed retweet/mention graph for one hashtag cycle. Vertices are the
/// endpoints of at least one edge; parallel edges collapse, self-loops drop.
struct RetweetMentionNetwork {
    std::set<std::pair<std::uint64_t, std::uint64_t>> edges;
    std::map<std::uint64_t, std::int64_t> degree;  // total degree (in + out)

    bool add_edge(std::uint64_t src, std::uint64_t dst) {
        if (src == dst) return false;
        if (!edges.emplace(src, dst).second) return false;
        ++degree[src];
        ++degree[dst];
        return true;
    }
    std::size_t order() const { return degree.size(); }
    std::size_t edge_count() const { return edges.size(); }
};

/// Resolved moments of one lifecycle cycle. Unset optionals mean the phase
/// was never reached; `resolved` flips when the cycle hits Death.
struct CycleOutcome {
    std::string key;
    int cycle = 0;
    Minute first_seen = 0;
    std::optional<Minute> trigger;
    std::int64_t c1 = 0;
    std::optional<Minute> burst_onset;
    std::optional<Minute> labeled_negative;
    std::optional<Minute> offburst;
    std::optional<Minute> death;
    bool resolved = false;
};

/// Feature precursors captured at one prediction stage (t_p = trigger + offset).
struct StageSnapshot {
    std::string stage_tag;       // "5min", "15min", ...
    int stage_offset = 0;        // minutes from trigger
    Minute t_p = 0;
    bool burst_by_tp = false;    // burst_onset <= t_p
    std::vector<int> series;     // counts c_s..c_tp inclusive
    // feature families evaluated at t_p
    std::array<double, 8> meme{};
    std::array<double, 3> user{};
    std::array<double, 5> content{};
    std::array<double, 4> network{};
    std::array<double, 3> hashtag{};
    std::array<double, 2> dormancy{};
};

/// One archived cycle: outcome plus every stage snapshot it reached.
struct CycleRecord {
    CycleOutcome outcome;
    std::vector<StageSnapshot> snapshots;
};

/// Mutable per-hashtag lifecycle state. The engine owns instances; tests may
/// drive `advance` directly. Accumulators cover the whole current cycle
/// (first tweet after the previous death, through the next death).
class HashtagState {
public:
    HashtagState() = default;
    HashtagState(std::string key, const LifecycleParams& params);

    /// Finalizes one minute. Minutes must strictly increase; gaps are allowed
    /// only while Dormant (they are implicit zeros).
    std::vector<LifecycleEvent> advance(Minute minute, int count);

    /// Folds one tweet into the cycle accumulators (call before the minute is
    /// finalized). `sentiment` may be null.
    void accumulate(const ingest::TweetRecord& record,
                    const ingest::SentimentLexicon* sentiment);

    const std::string& key() const { return key_; }
    int cycle() const { return cycle_; }
    Phase phase() const { return phase_; }
    bool post_trigger() const {
        return phase_ == Phase::Triggered || phase_ == Phase::Bursting ||
               phase_ == Phase::OffBurst;
    }
    Minute last_minute() const { return last_minute_; }
    bool has_seen_tweet() const { return has_seen_tweet_; }

    std::optional<Minute> trigger_minute() const { return outcome_.trigger; }
    std::optional<Minute> burst_onset() const { return outcome_.burst_onset; }
    std::int64_t c1() const { return outcome_.c1; }
    Minute first_seen_minute() const { return outcome_.first_seen; }
    const CycleOutcome& outcome() const { return outcome_; }

    /// The outcome of the cycle closed by the most recent Death, if any.
    std::optional<CycleOutcome> take_completed() {
        auto out = std::move(completed_);
        completed_.reset();
        return out;
    }

    /// Post-trigger series slice c_s..c_{last advanced minute}.
    const std::vector<int>& series_from_trigger() const { return series_; }

    // cycle accumulators (read by the features module)
    std::int64_t tweet_count() const { return tweet_count_; }
    std::int64_t retweet_count() const { return retweet_count_; }
    std::int64_t mention_count() const { return mention_count_; }
    std::int64_t url_tweet_count() const { return url_tweet_count_; }
    std::int64_t special_signal_tweet_count() const { return special_tweet_count_; }
    std::int64_t happy_emoticon_tweet_count() const { return happy_tweet_count_; }
    std::int64_t sad_emoticon_tweet_count() const { return sad_tweet_count_; }
    double pos_score_sum() const { return pos_sum_; }
    double neg_score_sum() const { return neg_sum_; }
    std::int64_t scored_word_count() const { return scored_words_; }
    std::int64_t cooccurrence_tweets() const { return cooccurrence_tweets_; }
    const std::map<std::uint64_t, AdopterStats>& adopters() const { return adopters_; }
    const std::set<std::string>& case_variants() const { return case_variants_; }
    const RetweetMentionNetwork& graph() const { return graph_; }

private:
    friend class LifecycleEngine;

    void reset_cycle_accumulators();

    std::string key_;
    LifecycleParams params_;
    Phase phase_ = Phase::Dormant;
    int cycle_ = 0;
    Minute last_minute_ = -1;
    bool has_seen_tweet_ = false;

    // rolling trigger window
    std::vector<int> window_;  // ring buffer, size params_.window_minutes
    std::size_t window_pos_ = 0;
    std::int64_t window_sum_ = 0;
    Minute last_satisfiable_ = -1;  // last minute whose window sum exceeded delta

    // post-trigger bookkeeping
    std::int64_t threshold_ = 0;
    Minute last_hot_ = -1;  // last minute with count >= threshold (onset minute included)
    std::vector<int> series_;  // from trigger minute s
    CycleOutcome outcome_;
    std::optional<CycleOutcome> completed_;

    // cycle accumulators
    std::int64_t tweet_count_ = 0;
    std::int64_t retweet_count_ = 0;
    std::int64_t mention_count_ = 0;
    std::int64_t url_tweet_count_ = 0;
    std::int64_t special_tweet_count_ = 0;
    std::int64_t happy_tweet_count_ = 0;
    std::int64_t sad_tweet_count_ = 0;
    double pos_sum_ = 0.0;
    double neg_sum_ = 0.0;
    std::int64_t scored_words_ = 0;
    std::int64_t cooccurrence_tweets_ = 0;
    std::map<std::uint64_t, AdopterStats> adopters_;
    std::set<std::string> case_variants_;
    RetweetMentionNetwork graph_;
    std::map<std::uint64_t, std::uint64_t> tweet_author_;  // tweet id hash -> author hash
};

/// Streaming engine over an ordered tweet stream. Keyed by casefolded hashtag;
/// a global watermark finalizes minutes, post-trigger states advance every
/// minute, dormant states advance lazily. Keys iterate in sorted order so the
/// event log is deterministic.
class LifecycleEngine {
public:
    LifecycleEngine(LifecycleParams params, std::vector<int> stage_offsets,
                    const ingest::SentimentLexicon* sentiment = nullptr);

    /// Records must arrive with non-decreasing minute(timestamp).
    void observe(const ingest::TweetRecord& record);

    /// Finalizes all minutes through final_minute (inclusive), resolving any
    /// pending off-burst/death confirmations reachable by then.
    void close(Minute final_minute);

    const std::vector<LifecycleEvent>& events() const { return events_; }
    const std::vector<CycleRecord>& archive() const { return archive_; }
    std::size_t tracked_hashtags() const { return states_.size(); }

    /// State access for tests / feature extraction on live cycles.
    const HashtagState* find(const std::string& key) const;

private:
    void finalize_through(Minute minute);  // finalizes minutes [watermark_, minute)
    void finalize_minute(Minute minute);
    void take_snapshot(HashtagState& state, Minute t_p, int offset);

    LifecycleParams params_;
    std::vector<int> stage_offsets_;
    const ingest::SentimentLexicon* sentiment_;
    std::map<std::string, HashtagState> states_;
    std::set<std::string> active_;  // post-trigger keys, advanced every minute
    std::map<std::string, int> pending_;  // counts for the watermark minute
    std::map<std::string, std::vector<StageSnapshot>> live_snapshots_;
    Minute watermark_ = std::numeric_limits<Minute>::min();
    std::vector<LifecycleEvent> events_;
    std::vector<CycleRecord> archive_;
};

struct InstanceLabels {
    int burst_label = -1;  // +1 / -1
    std::optional<std::int64_t> tbb;  // minutes, only when not yet burst at t_p
    std::optional<std::int64_t> tra;  // minutes, only when bursting at t_p
};

/// Ground-truth labels for a prediction made at prediction_minute. The cycle
/// must be resolved (Death reached); throws NotResolvedError otherwise.
InstanceLabels label_instance(const CycleOutcome& outcome, Minute prediction_minute);

struct LifecycleStatsRow {
    std::int64_t checkpoint_minutes = 0;
    double rab = 0.0;
    double rob = 0.0;
    double rad = 0.0;
};

/// RAB/ROB/RAD fractions per checkpoint offset from each bursting hashtag's
/// trigger. Throws UndefinedRatioError when the log has no bursting hashtag.
std::vector<LifecycleStatsRow> lifecycle_statistics(
    std::span<const LifecycleEvent> events,
    std::span<const std::int64_t> checkpoints);

}  // namespace burstwatch::lifecycle
