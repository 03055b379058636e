#include "burstwatch/lifecycle.hpp"

#include <algorithm>

#include "burstwatch/features.hpp"
#include "burstwatch/textio.hpp"

namespace burstwatch::lifecycle {

std::string to_string(EventKind kind) {
    switch (kind) {
        case EventKind::Triggered: return "Triggered";
        case EventKind::BurstOnset: return "BurstOnset";
        case EventKind::OffBurst: return "OffBurst";
        case EventKind::Death: return "Death";
        case EventKind::LabeledNegative: return "LabeledNegative";
    }
    return "?";
}

EventKind event_kind_from_string(std::string_view s) {
    if (s == "Triggered") return EventKind::Triggered;
    if (s == "BurstOnset") return EventKind::BurstOnset;
    if (s == "OffBurst") return EventKind::OffBurst;
    if (s == "Death") return EventKind::Death;
    if (s == "LabeledNegative") return EventKind::LabeledNegative;
    throw ConfigError("unknown event kind: " + std::string(s));
}

std::string stage_tag(int offset_minutes) {
    if (offset_minutes >= 60 && offset_minutes % 60 == 0)
        return std::to_string(offset_minutes / 60) + "h";
    return std::to_string(offset_minutes) + "min";
}

int stage_offset(std::string_view tag) {
    if (tag.ends_with("min"))
        return static_cast<int>(parse_int(tag.substr(0, tag.size() - 3)));
    if (tag.ends_with("h"))
        return static_cast<int>(parse_int(tag.substr(0, tag.size() - 1))) * 60;
    throw ConfigError("bad stage tag: " + std::string(tag));
}

std::int64_t burst_threshold(std::int64_t c1, int delta) {
    return std::max(c1 + delta, (3 * c1 + 1) / 2);
}

bool check_trigger(const TimeSeries& series, Minute minute, const LifecycleParams& params) {
    std::int64_t sum = 0;
    for (int i = 0; i < params.window_minutes; ++i) sum += series.at(minute - i);
    return sum > params.delta;
}

HashtagState::HashtagState(std::string key, const LifecycleParams& params)
    : key_(std::move(key)), params_(params) {
    window_.assign(static_cast<std::size_t>(params_.window_minutes), 0);
    outcome_.key = key_;
}

void HashtagState::reset_cycle_accumulators() {
    // Fresh cycle: everything except the physical trigger window, which keeps
    // tracking the real per-minute counts across the death boundary.
    series_.clear();
    outcome_ = CycleOutcome{};
    outcome_.key = key_;
    outcome_.cycle = cycle_;
    threshold_ = 0;
    last_hot_ = -1;
    has_seen_tweet_ = false;
    tweet_count_ = 0;
    retweet_count_ = 0;
    mention_count_ = 0;
    url_tweet_count_ = 0;
    special_tweet_count_ = 0;
    happy_tweet_count_ = 0;
    sad_tweet_count_ = 0;
    pos_sum_ = 0.0;
    neg_sum_ = 0.0;
    scored_words_ = 0;
    cooccurrence_tweets_ = 0;
    adopters_.clear();
    case_variants_.clear();
    graph_ = RetweetMentionNetwork{};
    tweet_author_.clear();
}

void HashtagState::accumulate(const ingest::TweetRecord& record,
                              const ingest::SentimentLexicon* sentiment) {
    const Minute m = minute_of_epoch(record.timestamp);
    if (!has_seen_tweet_) {
        has_seen_tweet_ = true;
        outcome_.first_seen = m;
        outcome_.cycle = cycle_;
    }
    ++tweet_count_;
    if (record.retweet_of) ++retweet_count_;
    mention_count_ += static_cast<std::int64_t>(record.explicit_mentions.size());
    if (record.urls_present) ++url_tweet_count_;
    if (record.special_signal) ++special_tweet_count_;
    if (record.happy_emoticons > 0) ++happy_tweet_count_;
    if (record.sad_emoticons > 0) ++sad_tweet_count_;
    if (sentiment != nullptr) {
        auto sums = ingest::score_sentiment(record.word_tokens, *sentiment);
        pos_sum_ += sums.pos_sum;
        neg_sum_ += sums.neg_sum;
        scored_words_ += sums.scored_words;
    }
    if (record.hashtags.size() >= 2) ++cooccurrence_tweets_;
    for (const auto& h : record.hashtags) {
        if (h.key == key_) {
            case_variants_.insert(h.surface);
            break;
        }
    }

    const std::uint64_t author = fnv1a64(record.author_id);
    AdopterStats& stats = adopters_[author];
    ++stats.tweet_count;
    stats.followers = record.author_followers;
    stats.account_created = record.author_account_created;
    stats.statuses = record.author_statuses_count;

    tweet_author_[fnv1a64(record.tweet_id)] = author;
    if (record.retweet_of) {
        auto it = tweet_author_.find(fnv1a64(*record.retweet_of));
        if (it != tweet_author_.end()) graph_.add_edge(it->second, author);
    }
    for (const auto& mentioned : record.explicit_mentions)
        graph_.add_edge(author, fnv1a64(mentioned));
}

std::vector<LifecycleEvent> HashtagState::advance(Minute minute, int count) {
    if (minute < 0 || count < 0)
        throw ContractViolation("advance requires minute >= 0 and count >= 0");
    if (minute == last_minute_)
        throw ContractViolation("duplicate minute " + std::to_string(minute) +
                                " for hashtag '" + key_ + "'");
    if (minute < last_minute_)
        throw ContractViolation("out-of-order minute " + std::to_string(minute) +
                                " for hashtag '" + key_ + "'");
    if (post_trigger() && minute != last_minute_ + 1)
        throw ContractViolation("post-trigger minutes must be consecutive for '" + key_ + "'");

    // zero-fill the window across dormant gaps
    if (last_minute_ >= 0 && minute > last_minute_ + 1) {
        Minute gap = minute - last_minute_ - 1;
        if (gap >= static_cast<Minute>(window_.size())) {
            std::fill(window_.begin(), window_.end(), 0);
            window_sum_ = 0;
            window_pos_ = 0;
        } else {
            for (Minute i = 0; i < gap; ++i) {
                window_sum_ -= window_[window_pos_];
                window_[window_pos_] = 0;
                window_pos_ = (window_pos_ + 1) % window_.size();
            }
        }
    }
    window_sum_ -= window_[window_pos_];
    window_[window_pos_] = count;
    window_sum_ += count;
    window_pos_ = (window_pos_ + 1) % window_.size();
    last_minute_ = minute;

    if (window_sum_ > params_.delta) last_satisfiable_ = minute;

    std::vector<LifecycleEvent> out;
    auto emit = [&](EventKind kind, Minute at) -> LifecycleEvent& {
        LifecycleEvent ev;
        ev.key = key_;
        ev.cycle = cycle_;
        ev.kind = kind;
        ev.minute = at;
        out.push_back(std::move(ev));
        return out.back();
    };

    switch (phase_) {
        case Phase::Dormant: {
            if (window_sum_ > params_.delta) {
                phase_ = Phase::Triggered;
                outcome_.trigger = minute;
                outcome_.c1 = count;
                outcome_.cycle = cycle_;
                threshold_ = burst_threshold(count, params_.delta);
                series_.clear();
                series_.push_back(count);
                emit(EventKind::Triggered, minute).c1 = count;
            }
            break;
        }
        case Phase::Triggered: {
            series_.push_back(count);
            const Minute s = *outcome_.trigger;
            if (minute <= s + params_.burst_horizon_minutes && count > threshold_) {
                phase_ = Phase::Bursting;
                outcome_.burst_onset = minute;
                last_hot_ = minute;
                emit(EventKind::BurstOnset, minute).tbb = minute - s;
            } else if (minute == s + params_.burst_horizon_minutes) {
                outcome_.labeled_negative = minute;
                emit(EventKind::LabeledNegative, minute);
            }
            break;
        }
        case Phase::Bursting: {
            series_.push_back(count);
            if (count >= threshold_) {
                last_hot_ = minute;
            } else if (minute - last_hot_ >= params_.offburst_quiet_minutes) {
                phase_ = Phase::OffBurst;
                const Minute t_prime = last_hot_ + 1;
                outcome_.offburst = t_prime;
                emit(EventKind::OffBurst, t_prime).tra = t_prime - *outcome_.burst_onset;
            }
            break;
        }
        case Phase::OffBurst: {
            series_.push_back(count);
            break;
        }
        case Phase::Dead:
            break;
    }

    if (post_trigger() && minute - last_satisfiable_ >= params_.death_quiet_minutes) {
        outcome_.death = minute;
        outcome_.resolved = true;
        emit(EventKind::Death, minute).lifetime = minute - *outcome_.trigger;
        completed_ = outcome_;
        ++cycle_;
        phase_ = Phase::Dormant;
        reset_cycle_accumulators();
    }
    return out;
}

LifecycleEngine::LifecycleEngine(LifecycleParams params, std::vector<int> stage_offsets,
                                 const ingest::SentimentLexicon* sentiment)
    : params_(params), stage_offsets_(std::move(stage_offsets)), sentiment_(sentiment) {
    std::sort(stage_offsets_.begin(), stage_offsets_.end());
}

const HashtagState* LifecycleEngine::find(const std::string& key) const {
    auto it = states_.find(key);
    return it == states_.end() ? nullptr : &it->second;
}

void LifecycleEngine::observe(const ingest::TweetRecord& record) {
    const Minute m = minute_of_epoch(record.timestamp);
    if (watermark_ == std::numeric_limits<Minute>::min()) {
        watermark_ = m;
    } else if (m < watermark_) {
        throw ContractViolation("stream went backwards: minute " + std::to_string(m) +
                                " after watermark " + std::to_string(watermark_));
    } else if (m > watermark_) {
        finalize_through(m);
    }
    for (const auto& h : record.hashtags) {
        auto [it, inserted] = states_.try_emplace(h.key, HashtagState(h.key, params_));
        it->second.accumulate(record, sentiment_);
        pending_[h.key] += 1;
    }
}

void LifecycleEngine::close(Minute final_minute) {
    if (watermark_ == std::numeric_limits<Minute>::min()) return;
    if (final_minute >= watermark_) finalize_through(final_minute + 1);
}

void LifecycleEngine::finalize_through(Minute minute) {
    while (watermark_ < minute) {
        finalize_minute(watermark_);
        pending_.clear();
        ++watermark_;
    }
}

void LifecycleEngine::finalize_minute(Minute minute) {
    // merge pending (tweet-bearing) keys with the post-trigger active set,
    // both already sorted, so processing order is deterministic
    auto pend = pending_.begin();
    auto act = active_.begin();
    std::vector<std::pair<std::string, int>> work;
    work.reserve(pending_.size() + active_.size());
    while (pend != pending_.end() || act != active_.end()) {
        if (act == active_.end() || (pend != pending_.end() && pend->first < *act)) {
            work.emplace_back(pend->first, pend->second);
            ++pend;
        } else if (pend == pending_.end() || *act < pend->first) {
            work.emplace_back(*act, 0);
            ++act;
        } else {
            work.emplace_back(pend->first, pend->second);
            ++pend;
            ++act;
        }
    }

    for (auto& [key, count] : work) {
        HashtagState& state = states_.at(key);
        std::vector<LifecycleEvent> evs = state.advance(minute, count);
        bool died = false;
        for (const auto& ev : evs) {
            if (ev.kind == EventKind::Death) died = true;
            events_.push_back(ev);
        }
        if (died) {
            CycleRecord rec;
            rec.outcome = *state.take_completed();
            auto snap = live_snapshots_.find(key);
            if (snap != live_snapshots_.end()) {
                rec.snapshots = std::move(snap->second);
                live_snapshots_.erase(snap);
            }
            archive_.push_back(std::move(rec));
            active_.erase(key);
        } else if (state.post_trigger()) {
            active_.insert(key);
            if (state.trigger_minute()) {
                const int offset = static_cast<int>(minute - *state.trigger_minute());
                if (std::binary_search(stage_offsets_.begin(), stage_offsets_.end(), offset))
                    take_snapshot(state, minute, offset);
            }
        }
    }
}

void LifecycleEngine::take_snapshot(HashtagState& state, Minute t_p, int offset) {
    StageSnapshot snap;
    snap.stage_offset = offset;
    snap.stage_tag = stage_tag(offset);
    snap.t_p = t_p;
    snap.burst_by_tp = state.burst_onset().has_value() && *state.burst_onset() <= t_p;
    snap.series = state.series_from_trigger();
    snap.meme = features::meme_features(state);
    snap.user = features::user_features(state, t_p);
    snap.content = features::content_features(state);
    snap.network = features::network_features(state.graph());
    snap.hashtag = features::hashtag_features(state);
    snap.dormancy = features::dormancy_features(state, t_p);
    live_snapshots_[state.key()].push_back(std::move(snap));
}

InstanceLabels label_instance(const CycleOutcome& outcome, Minute prediction_minute) {
    if (!outcome.resolved)
        throw NotResolvedError("cycle for '" + outcome.key + "' is not resolved yet");
    if (!outcome.trigger || prediction_minute < *outcome.trigger)
        throw ContractViolation("prediction minute precedes the trigger");
    InstanceLabels labels;
    labels.burst_label = outcome.burst_onset ? 1 : -1;
    if (outcome.burst_onset && prediction_minute <= *outcome.burst_onset)
        labels.tbb = std::max<std::int64_t>(*outcome.burst_onset - prediction_minute, 1);
    if (outcome.burst_onset && outcome.offburst && *outcome.burst_onset <= prediction_minute &&
        prediction_minute < *outcome.offburst)
        labels.tra = std::max<std::int64_t>(*outcome.offburst - prediction_minute, 1);
    return labels;
}

std::vector<LifecycleStatsRow> lifecycle_statistics(
    std::span<const LifecycleEvent> events, std::span<const std::int64_t> checkpoints) {
    struct Cycle {
        std::optional<Minute> trigger, burst, offburst, death;
    };
    std::map<std::pair<std::string, int>, Cycle> cycles;
    for (const auto& ev : events) {
        Cycle& c = cycles[{ev.key, ev.cycle}];
        switch (ev.kind) {
            case EventKind::Triggered: c.trigger = ev.minute; break;
            case EventKind::BurstOnset: c.burst = ev.minute; break;
            case EventKind::OffBurst: c.offburst = ev.minute; break;
            case EventKind::Death: c.death = ev.minute; break;
            case EventKind::LabeledNegative: break;
        }
    }
    std::int64_t bursting = 0;
    for (const auto& [id, c] : cycles)
        if (c.trigger && c.burst) ++bursting;
    if (bursting == 0)
        throw UndefinedRatioError("no bursting hashtags in the event log");

    std::vector<LifecycleStatsRow> rows;
    for (std::int64_t cp : checkpoints) {
        LifecycleStatsRow row;
        row.checkpoint_minutes = cp;
        std::int64_t rab = 0, rob = 0, rad = 0;
        for (const auto& [id, c] : cycles) {
            if (!c.trigger || !c.burst) continue;
            if (*c.burst - *c.trigger <= cp) ++rab;
            if (c.offburst && *c.offburst - *c.trigger <= cp) ++rob;
            if (c.death && *c.death - *c.trigger <= cp) ++rad;
        }
        row.rab = static_cast<double>(rab) / static_cast<double>(bursting);
        row.rob = static_cast<double>(rob) / static_cast<double>(bursting);
        row.rad = static_cast<double>(rad) / static_cast<double>(bursting);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace burstwatch::lifecycle
