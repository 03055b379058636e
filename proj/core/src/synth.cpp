#include "burstwatch/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "burstwatch/rng.hpp"
#include "burstwatch/textio.hpp"

namespace burstwatch::synth {

using ordered_json = nlohmann::ordered_json;

void AnchoredCdf::validate(const std::string& what) const {
    if (anchors.empty()) throw ConfigError(what + ": no anchors");
    double prev_p = 0.0;
    std::int64_t prev_m = 0;
    for (const auto& [minute, p] : anchors) {
        if (minute <= prev_m) throw ConfigError(what + ": anchor minutes must increase");
        if (p < prev_p || p > 1.0) throw ConfigError(what + ": anchor mass must be non-decreasing in [0,1]");
        prev_m = minute;
        prev_p = p;
    }
    if (std::abs(anchors.back().second - 1.0) > 1e-12)
        throw ConfigError(what + ": final anchor must carry mass 1");
}

namespace {

/// Quota-stratified integer samples: each inter-anchor bucket receives
/// round(count * mass) samples (largest remainder), uniform inside the bucket.
std::vector<std::int64_t> stratified_samples(const AnchoredCdf& cdf, int count,
                                             std::int64_t min_value, Rng& rng) {
    std::vector<std::int64_t> out;
    if (count <= 0) return out;
    struct Bucket {
        std::int64_t lo, hi;
        double mass;
        int quota = 0;
        double remainder = 0.0;
        std::size_t order = 0;
    };
    std::vector<Bucket> buckets;
    double prev_p = 0.0;
    std::int64_t prev_m = min_value - 1;
    for (const auto& [minute, p] : cdf.anchors) {
        Bucket b;
        b.lo = prev_m + 1;
        b.hi = minute;
        b.mass = p - prev_p;
        b.order = buckets.size();
        buckets.push_back(b);
        prev_m = minute;
        prev_p = p;
    }
    int assigned = 0;
    for (auto& b : buckets) {
        const double exact = b.mass * count;
        b.quota = static_cast<int>(std::floor(exact));
        b.remainder = exact - b.quota;
        assigned += b.quota;
    }
    std::vector<std::size_t> by_remainder(buckets.size());
    for (std::size_t i = 0; i < buckets.size(); ++i) by_remainder[i] = i;
    std::sort(by_remainder.begin(), by_remainder.end(), [&](std::size_t a, std::size_t b) {
        if (buckets[a].remainder != buckets[b].remainder)
            return buckets[a].remainder > buckets[b].remainder;
        return buckets[a].order < buckets[b].order;
    });
    for (std::size_t i = 0; assigned < count; ++i, ++assigned)
        buckets[by_remainder[i % by_remainder.size()]].quota += 1;

    for (const auto& b : buckets) {
        const std::uint64_t span = static_cast<std::uint64_t>(b.hi - b.lo + 1);
        for (int i = 0; i < b.quota; ++i)
            out.push_back(b.lo + static_cast<std::int64_t>(rng.below(span)));
    }
    // decouple sample order from hashtag planning order
    for (std::size_t i = out.size(); i > 1; --i)
        std::swap(out[i - 1], out[rng.below(i)]);
    return out;
}

double cdf_at(const AnchoredCdf& cdf, std::int64_t minute) {
    double prev_p = 0.0;
    std::int64_t prev_m = 0;
    for (const auto& [m, p] : cdf.anchors) {
        if (minute <= m) {
            if (minute <= prev_m) return prev_p;
            const double frac = static_cast<double>(minute - prev_m) /
                                static_cast<double>(m - prev_m);
            return prev_p + frac * (p - prev_p);
        }
        prev_m = m;
        prev_p = p;
    }
    return 1.0;
}

}  // namespace

void StreamScenario::finalize() {
    if (tbb_cdf.anchors.empty())
        tbb_cdf.anchors = {{5, 0.3032},  {15, 0.5102}, {30, 0.6803}, {60, 0.8088},
                           {180, 0.9268}, {360, 0.9512}, {1380, 1.0}};
    if (active_cdf.anchors.empty())
        active_cdf.anchors = {{5, 0.10},  {15, 0.35}, {30, 0.55}, {60, 0.72},
                              {180, 0.90}, {360, 0.95}, {1020, 1.0}};
    tbb_cdf.validate("tbb_cdf");
    active_cdf.validate("active_cdf");
    if (tbb_cdf.anchors.back().first > 1380)
        throw ConfigError("tbb_cdf must stay within the 24h burst horizon (<= 1380)");

    if (delta <= 0 || window_minutes < 1) throw ConfigError("delta/window out of range");
    const int ramp_base = delta / window_minutes;
    const int c1_floor = delta - (window_minutes - 1) * ramp_base + 1;
    if (c1_min < c1_floor)
        throw ConfigError("c1_min " + std::to_string(c1_min) + " cannot cross the trigger; need >= " +
                          std::to_string(c1_floor));
    if (c1_max < c1_min) throw ConfigError("c1_max < c1_min");
    if (peak_excess_min <= 0.0) throw ConfigError("burst peak must exceed the threshold");
    if (n_planted_bursts < 0 || n_hard_negatives < 0 || n_quiet_background < 0)
        throw ConfigError("negative population size");
    if (author_pool < core_authors_per_hashtag + 1)
        throw ConfigError("author pool smaller than a hashtag core");
    if (duration_minutes < dormant_minutes_max + 2880 + 100)
        throw ConfigError("duration too short to resolve planted lifecycles");
    for (double p : {url_prob[0], url_prob[1], retweet_prob[0], retweet_prob[1],
                     mention_prob[0], mention_prob[1], cooccur_prob[0], cooccur_prob[1],
                     case_variant_prob[0], case_variant_prob[1], happy_prob[0], happy_prob[1],
                     sad_prob[0], sad_prob[1], special_prob[0], special_prob[1],
                     sentiment_word_prob[0], sentiment_word_prob[1]})
        if (p < 0.0 || p > 1.0) throw ConfigError("probability out of [0,1]");

    if (target_positive_fraction.empty()) {
        for (int offset : stage_offsets) {
            const double survivors = (1.0 - cdf_at(tbb_cdf, offset)) * n_planted_bursts;
            const double denom = survivors + n_hard_negatives;
            target_positive_fraction.push_back(denom > 0.0 ? survivors / denom : 0.0);
        }
    }
    if (target_positive_fraction.size() != stage_offsets.size())
        throw ConfigError("target profile length != stage count");
}

std::vector<ReplayCycle> replay_series(std::span<const int> counts, Minute origin,
                                       const lifecycle::LifecycleParams& params) {
    const std::int64_t w = params.window_minutes;
    const std::int64_t len = static_cast<std::int64_t>(counts.size());
    const std::int64_t total = len + params.death_quiet_minutes + w + 1;
    auto count_at = [&](std::int64_t i) -> std::int64_t {
        return (i >= 0 && i < len) ? counts[static_cast<std::size_t>(i)] : 0;
    };

    std::vector<ReplayCycle> cycles;
    std::int64_t window_sum = 0;
    std::int64_t last_sat = std::numeric_limits<std::int64_t>::min() / 4;
    bool in_cycle = false;
    std::int64_t s = -1, thr = 0, b = -1, labneg = -1, t_prime = -1, last_hot = 0, c1 = 0;

    for (std::int64_t i = 0; i < total; ++i) {
        window_sum += count_at(i) - count_at(i - w);
        if (window_sum > params.delta) last_sat = i;

        if (!in_cycle) {
            if (window_sum > params.delta) {
                in_cycle = true;
                s = i;
                c1 = count_at(i);
                thr = lifecycle::burst_threshold(c1, params.delta);
                b = -1;
                labneg = -1;
                t_prime = -1;
                last_hot = std::numeric_limits<std::int64_t>::min() / 4;
            }
            continue;
        }

        if (b < 0) {
            if (i <= s + params.burst_horizon_minutes && count_at(i) > thr) {
                b = i;
                last_hot = i;
            } else if (i == s + params.burst_horizon_minutes) {
                labneg = i;
            }
        } else if (t_prime < 0) {
            if (count_at(i) >= thr) last_hot = i;
            else if (i - last_hot >= params.offburst_quiet_minutes) t_prime = last_hot + 1;
        }

        if (i - last_sat >= params.death_quiet_minutes) {
            ReplayCycle cycle;
            cycle.trigger = origin + s;
            cycle.c1 = c1;
            cycle.burst = b >= 0 ? origin + b : -1;
            cycle.labeled_negative = labneg >= 0 ? origin + labneg : -1;
            cycle.offburst = t_prime >= 0 ? origin + t_prime : -1;
            cycle.death = origin + i;
            cycles.push_back(cycle);
            in_cycle = false;
        }
    }
    return cycles;
}

std::string truth_to_csv(std::span<const TruthRow> rows) {
    std::string out = "key,trigger_min,burst_min,offburst_min,death_min,tbb,tra\n";
    auto cell = [](std::int64_t v) { return v >= 0 ? std::to_string(v) : std::string(); };
    for (const auto& r : rows) {
        out += csv_escape(r.key);
        out += ',';
        out += cell(r.trigger);
        out += ',';
        out += cell(r.burst);
        out += ',';
        out += cell(r.offburst);
        out += ',';
        out += cell(r.death);
        out += ',';
        out += cell(r.tbb);
        out += ',';
        out += cell(r.tra);
        out += '\n';
    }
    return out;
}

std::vector<TruthRow> truth_from_csv(const std::string& text) {
    std::vector<TruthRow> rows;
    std::istringstream in(text);
    std::string line;
    bool header = true;
    auto cell = [](const std::string& s) -> std::int64_t {
        return s.empty() ? -1 : parse_int(s);
    };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        auto f = csv_split(line);
        if (f.size() != 7) throw ConfigError("truth row needs 7 fields");
        TruthRow r;
        r.key = f[0];
        r.trigger = cell(f[1]);
        r.burst = cell(f[2]);
        r.offburst = cell(f[3]);
        r.death = cell(f[4]);
        r.tbb = cell(f[5]);
        r.tra = cell(f[6]);
        rows.push_back(std::move(r));
    }
    return rows;
}

namespace {

struct PlannedTag {
    std::string key;
    int cls = 0;  // 0 planted burst, 1 hard negative, 2 quiet background
    std::vector<std::pair<Minute, int>> series;  // sparse nonzero minutes, ascending
    Minute planned_trigger = -1;
    Minute planned_burst = -1;
};

const char* kFillerWords[] = {
    "the",  "a",    "to",   "of",   "and",  "in",   "it",   "is",   "for",  "on",
    "this", "that", "with", "just", "now",  "new",  "day",  "see",  "come", "look",
    "time", "one",  "out",  "up",   "here", "over", "need", "know", "feel", "make"};

std::string random_tag_suffix(Rng& rng, int min_len, int max_len) {
    const int len = min_len + static_cast<int>(rng.below(
                                 static_cast<std::uint64_t>(max_len - min_len + 1)));
    std::string out;
    for (int i = 0; i < len; ++i)
        out += static_cast<char>('a' + rng.below(26));
    return out;
}

void append_json_string(std::string& out, std::string_view s) {
    out += '"';
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out += '\\';
            out += c;
        } else if (static_cast<unsigned char>(c) >= 0x20) {
            out += c;
        }
    }
    out += '"';
}

}  // namespace

GenerateSummary generate(const StreamScenario& input_scenario, std::ostream& stream_out,
                         std::vector<TruthRow>& truth_out,
                         std::span<const std::string> positive_words,
                         std::span<const std::string> negative_words) {
    StreamScenario sc = input_scenario;
    sc.finalize();
    lifecycle::LifecycleParams params;
    params.delta = sc.delta;
    params.window_minutes = sc.window_minutes;

    Rng plan_rng(sc.seed);
    Rng tweet_rng(sc.seed ^ 0x9e3779b97f4a7c15ull);

    // ---- author pool ----
    struct Author {
        std::string id;
        std::int64_t followers, created_at, statuses;
    };
    std::vector<Author> authors;
    authors.reserve(static_cast<std::size_t>(sc.author_pool));
    for (int i = 0; i < sc.author_pool; ++i) {
        Author a;
        a.id = "u" + std::to_string(i);
        a.followers = std::min<std::int64_t>(
            std::llround(plan_rng.lognormal(sc.followers_log_mu, sc.followers_log_sigma)),
            3000000);
        const std::int64_t age_days =
            sc.account_age_days_min +
            static_cast<std::int64_t>(plan_rng.below(static_cast<std::uint64_t>(
                sc.account_age_days_max - sc.account_age_days_min + 1)));
        a.created_at = sc.origin_epoch_seconds - age_days * 86400;
        a.statuses = std::min<std::int64_t>(
            std::llround(plan_rng.lognormal(sc.statuses_log_mu, sc.statuses_log_sigma)),
            500000);
        authors.push_back(std::move(a));
    }

    // ---- per-class series planning ----
    const int ramp_base = sc.delta / sc.window_minutes;
    const Minute earliest = sc.dormant_minutes_max + 10;
    const Minute latest = sc.duration_minutes - 2880;
    if (latest <= earliest) throw ConfigError("duration leaves no room for planted triggers");

    const auto tbb_samples =
        stratified_samples(sc.tbb_cdf, sc.n_planted_bursts, 1, plan_rng);
    const auto active_samples =
        stratified_samples(sc.active_cdf, sc.n_planted_bursts, 1, plan_rng);

    std::vector<PlannedTag> tags;
    const int total_tags = sc.n_planted_bursts + sc.n_hard_negatives + sc.n_quiet_background;
    tags.reserve(static_cast<std::size_t>(total_tags));

    auto plan_trickle = [&](PlannedTag& tag, Minute from, Minute to) {
        for (Minute m = from; m <= to; ++m) {
            int c = plan_rng.poisson(sc.trickle_rate);
            if (c > 2) c = 2;
            if (c > 0) tag.series.emplace_back(m, c);
        }
    };

    for (int i = 0; i < total_tags; ++i) {
        PlannedTag tag;
        tag.cls = i < sc.n_planted_bursts ? 0 : (i < sc.n_planted_bursts + sc.n_hard_negatives ? 1 : 2);
        const char* prefix = tag.cls == 0 ? "p" : (tag.cls == 1 ? "n" : "q");
        tag.key = prefix + std::to_string(i) + random_tag_suffix(plan_rng, 2, 9);

        if (tag.cls == 2) {
            const Minute span = 200 + static_cast<Minute>(plan_rng.below(2801));
            const Minute f0 = static_cast<Minute>(
                plan_rng.below(static_cast<std::uint64_t>(std::max<Minute>(sc.duration_minutes - span, 1))));
            const double rate = std::exp(plan_rng.uniform(std::log(0.01), std::log(0.3)));
            for (Minute m = f0; m < f0 + span && m <= sc.duration_minutes; ++m) {
                int c = plan_rng.poisson(rate);
                if (c > 2) c = 2;
                if (c > 0) tag.series.emplace_back(m, c);
            }
            tags.push_back(std::move(tag));
            continue;
        }

        const Minute s = earliest + static_cast<Minute>(plan_rng.below(
                                        static_cast<std::uint64_t>(latest - earliest + 1)));
        const int dormant = sc.dormant_minutes_min +
                            static_cast<int>(plan_rng.below(static_cast<std::uint64_t>(
                                sc.dormant_minutes_max - sc.dormant_minutes_min + 1)));
        tag.planned_trigger = s;
        plan_trickle(tag, s - dormant, s - 10);
        // deterministic trigger ramp: base,base,base,base,c1 with a quiet gap before
        for (int j = sc.window_minutes - 1; j >= 1; --j)
            tag.series.emplace_back(s - j, ramp_base);
        const int c1 = sc.c1_min + static_cast<int>(plan_rng.below(
                                       static_cast<std::uint64_t>(sc.c1_max - sc.c1_min + 1)));
        tag.series.emplace_back(s, c1);
        const std::int64_t thr = lifecycle::burst_threshold(c1, sc.delta);

        if (tag.cls == 0) {
            const std::int64_t tbb = tbb_samples[static_cast<std::size_t>(i)];
            const std::int64_t active = active_samples[static_cast<std::size_t>(i)];
            const Minute b = s + tbb;
            tag.planned_burst = b;
            const double gamma =
                plan_rng.uniform(sc.plateau_gamma_min, sc.plateau_gamma_max);
            for (Minute m = s + 1; m < b; ++m) {
                const double frac = static_cast<double>(m - s) / static_cast<double>(tbb);
                const double base =
                    c1 + (static_cast<double>(thr) - c1 - 4.0) * std::pow(frac, gamma);
                int c = static_cast<int>(std::llround(base + plan_rng.normal(0.0, 1.5)));
                c = std::clamp<int>(c, 1, static_cast<int>(thr) - 1);
                tag.series.emplace_back(m, c);
            }
            const double excess = plan_rng.uniform(sc.peak_excess_min, sc.peak_excess_max);
            tag.series.emplace_back(
                b, static_cast<int>(thr + std::max<std::int64_t>(
                                        2, std::llround(static_cast<double>(thr) * excess))));
            const int spike_every =
                sc.spike_interval_min +
                static_cast<int>(plan_rng.below(static_cast<std::uint64_t>(
                    sc.spike_interval_max - sc.spike_interval_min + 1)));
            for (Minute m = b + 1; m < b + active; ++m) {
                const double prog =
                    static_cast<double>(m - b) / static_cast<double>(active);
                int c;
                if ((m - b) % spike_every == 0 || m == b + active - 1) {
                    c = static_cast<int>(
                        thr + std::max<std::int64_t>(
                                  1, std::llround(static_cast<double>(thr) * excess *
                                                  (1.0 - 0.7 * prog))));
                } else {
                    const double base = static_cast<double>(thr) * (0.40 + 0.35 * (1.0 - prog)) +
                                        plan_rng.normal(0.0, static_cast<double>(thr) * 0.05);
                    c = std::clamp<int>(static_cast<int>(std::llround(base)), 1,
                                        static_cast<int>(thr) - 1);
                }
                tag.series.emplace_back(m, c);
            }
            // decay below threshold from the planned off-burst minute b+active
            const double start = static_cast<double>(thr) *
                                 plan_rng.uniform(sc.decay_start_frac_min, sc.decay_start_frac_max);
            const double hl = plan_rng.uniform(sc.decay_half_life_min, sc.decay_half_life_max);
            for (Minute m = b + active;; ++m) {
                const double level =
                    start * std::exp(-static_cast<double>(m - b - active) / hl);
                if (level < 0.5) break;
                int c = static_cast<int>(std::llround(level + plan_rng.normal(0.0, 0.8)));
                c = std::clamp<int>(c, 0, static_cast<int>(thr) - 1);
                if (c > 0) tag.series.emplace_back(m, c);
            }
        } else {
            // hard negative: post-trigger decay capped at delta so the burst
            // threshold is structurally unreachable
            const double hl = plan_rng.uniform(sc.negative_half_life_min,
                                               sc.negative_half_life_max);
            const int cap = std::min<int>(sc.delta, static_cast<int>(thr) - 1);
            for (Minute m = s + 1;; ++m) {
                const double level = c1 * std::exp(-static_cast<double>(m - s) / hl);
                if (level < 0.5) break;
                int c = static_cast<int>(std::llround(level + plan_rng.normal(0.0, 0.8)));
                c = std::clamp<int>(c, 0, cap);
                if (c > 0) tag.series.emplace_back(m, c);
            }
        }
        tags.push_back(std::move(tag));
    }

    // ---- replay every planned series; this is the ground truth ----
    GenerateSummary summary;
    std::vector<std::pair<std::string, ReplayCycle>> truth_cycles;
    std::vector<std::int64_t> realized_tbb;
    for (const auto& tag : tags) {
        if (tag.series.empty()) continue;
        const Minute first = tag.series.front().first;
        const Minute last = tag.series.back().first;
        std::vector<int> dense(static_cast<std::size_t>(last - first + 1), 0);
        for (const auto& [m, c] : tag.series)
            dense[static_cast<std::size_t>(m - first)] += c;
        const auto cycles = replay_series(dense, first, params);
        if (tag.cls == 0) {
            if (cycles.size() != 1 || cycles[0].burst < 0 ||
                cycles[0].trigger != tag.planned_trigger ||
                cycles[0].burst != tag.planned_burst)
                throw ConfigError("scenario infeasible: planted burst '" + tag.key +
                                  "' does not replay as planned");
            realized_tbb.push_back(cycles[0].burst - cycles[0].trigger);
        }
        if (tag.cls == 1) {
            if (cycles.size() != 1 || cycles[0].burst >= 0 ||
                cycles[0].trigger != tag.planned_trigger)
                throw ConfigError("scenario infeasible: hard negative '" + tag.key +
                                  "' does not replay as planned");
        }
        if (tag.cls == 2 && !cycles.empty())
            throw ConfigError("scenario infeasible: quiet background '" + tag.key +
                              "' triggered");
        for (const auto& c : cycles) truth_cycles.emplace_back(tag.key, c);
    }
    std::sort(truth_cycles.begin(), truth_cycles.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second.trigger < b.second.trigger;
    });
    truth_out.clear();
    for (const auto& [key, c] : truth_cycles) {
        TruthRow row;
        row.key = key;
        row.trigger = c.trigger;
        row.burst = c.burst;
        row.offburst = c.offburst;
        row.death = c.death;
        row.tbb = c.burst >= 0 ? c.burst - c.trigger : -1;
        row.tra = (c.burst >= 0 && c.offburst >= 0) ? c.offburst - c.burst : -1;
        truth_out.push_back(std::move(row));
    }

    summary.triggered_cycles = static_cast<int>(truth_cycles.size());
    summary.burst_cycles = static_cast<int>(realized_tbb.size());
    if (!realized_tbb.empty()) {
        std::int64_t within_6h = 0;
        for (std::int64_t tbb : realized_tbb) within_6h += tbb <= 360 ? 1 : 0;
        summary.realized_rab_6h =
            static_cast<double>(within_6h) / static_cast<double>(realized_tbb.size());
    }
    for (std::size_t si = 0; si < sc.stage_offsets.size(); ++si) {
        const int offset = sc.stage_offsets[si];
        std::int64_t survivors = 0;
        for (std::int64_t tbb : realized_tbb) survivors += tbb > offset ? 1 : 0;
        const double denom = static_cast<double>(survivors + sc.n_hard_negatives);
        const double frac = denom > 0.0 ? static_cast<double>(survivors) / denom : 0.0;
        summary.realized_positive_fraction.push_back(frac);
        if (sc.n_planted_bursts > 0 &&
            std::abs(frac - sc.target_positive_fraction[si]) > 0.025)
            throw ConfigError("scenario infeasible: realized class balance drifted at stage " +
                              std::to_string(offset) + "min");
    }
    for (std::size_t si = 1; si < summary.realized_positive_fraction.size(); ++si) {
        if (sc.n_planted_bursts > 0 && sc.n_hard_negatives > 0 &&
            summary.realized_positive_fraction[si] >=
                summary.realized_positive_fraction[si - 1])
            throw ConfigError("scenario infeasible: class balance is not strictly declining");
    }

    // ---- minute-major tweet emission ----
    std::vector<std::vector<std::pair<int, int>>> by_minute(
        static_cast<std::size_t>(sc.duration_minutes + 1));
    for (std::size_t t = 0; t < tags.size(); ++t)
        for (const auto& [m, c] : tags[t].series)
            if (m >= 0 && m <= sc.duration_minutes)
                by_minute[static_cast<std::size_t>(m)].emplace_back(static_cast<int>(t), c);

    // per-hashtag author core and recent tweet ring for retweet targets
    std::vector<std::vector<int>> cores(tags.size());
    for (auto& core : cores) {
        core.reserve(static_cast<std::size_t>(sc.core_authors_per_hashtag));
        for (int j = 0; j < sc.core_authors_per_hashtag; ++j)
            core.push_back(static_cast<int>(tweet_rng.below(authors.size())));
    }
    std::vector<std::vector<std::string>> recent(tags.size());

    const int n_filler = std::max(50, total_tags / 10);
    std::vector<std::string> filler_tags;
    for (int i = 0; i < n_filler; ++i)
        filler_tags.push_back("x" + std::to_string(i) + random_tag_suffix(tweet_rng, 2, 6));

    std::uint64_t tweet_counter = 0;
    std::string line;
    line.reserve(512);
    const std::vector<std::string> happy_faces = {":)", ":-)", ":')", ":]", "=]"};
    const std::vector<std::string> sad_faces = {":(", ":-(", ":'(", ":[", "=["};

    for (Minute m = 0; m <= sc.duration_minutes; ++m) {
        for (const auto& [tag_idx, count] : by_minute[static_cast<std::size_t>(m)]) {
            PlannedTag& tag = tags[static_cast<std::size_t>(tag_idx)];
            const int cls_bucket = tag.cls == 0 ? 0 : 1;
            for (int j = 0; j < count; ++j) {
                const std::int64_t ts = sc.origin_epoch_seconds + m * 60 +
                                        (static_cast<std::int64_t>(j) * 60) / count;
                const int author_idx =
                    tweet_rng.next_unit() < sc.core_author_bias
                        ? cores[static_cast<std::size_t>(tag_idx)][tweet_rng.below(
                              cores[static_cast<std::size_t>(tag_idx)].size())]
                        : static_cast<int>(tweet_rng.below(authors.size()));
                const Author& author = authors[static_cast<std::size_t>(author_idx)];
                const std::string tweet_id = "t" + std::to_string(tweet_counter++);

                // surface casing variant
                std::string surface = tag.key;
                if (tweet_rng.next_unit() < sc.case_variant_prob[cls_bucket]) {
                    surface[0] = static_cast<char>(surface[0] - 'a' + 'A');
                    const std::size_t flip = tweet_rng.below(surface.size());
                    if (surface[flip] >= 'a' && surface[flip] <= 'z')
                        surface[flip] = static_cast<char>(surface[flip] - 'a' + 'A');
                }

                std::string text = "#" + surface;
                const int n_words = 2 + static_cast<int>(tweet_rng.below(5));
                for (int wi = 0; wi < n_words; ++wi) {
                    text += ' ';
                    text += kFillerWords[tweet_rng.below(std::size(kFillerWords))];
                }
                if (tweet_rng.next_unit() < sc.sentiment_word_prob[cls_bucket]) {
                    const bool draw_pos =
                        tweet_rng.next_unit() < (cls_bucket == 0 ? 0.75 : 0.45);
                    const auto& words = draw_pos ? positive_words : negative_words;
                    if (!words.empty()) {
                        text += ' ';
                        text += words[tweet_rng.below(words.size())];
                    }
                }
                if (tweet_rng.next_unit() < sc.special_prob[cls_bucket]) text += "!!!";
                if (tweet_rng.next_unit() < sc.happy_prob[cls_bucket]) {
                    text += ' ';
                    text += happy_faces[tweet_rng.below(happy_faces.size())];
                }
                if (tweet_rng.next_unit() < sc.sad_prob[cls_bucket]) {
                    text += ' ';
                    text += sad_faces[tweet_rng.below(sad_faces.size())];
                }
                if (tweet_rng.next_unit() < sc.cooccur_prob[cls_bucket]) {
                    text += " #";
                    text += filler_tags[tweet_rng.below(filler_tags.size())];
                }
                if (tweet_rng.next_unit() < sc.url_prob[cls_bucket]) {
                    text += " http://x.co/";
                    text += std::to_string(tweet_rng.below(1000000));
                }

                std::optional<std::string> retweet_of;
                auto& ring = recent[static_cast<std::size_t>(tag_idx)];
                if (!ring.empty() && tweet_rng.next_unit() < sc.retweet_prob[cls_bucket])
                    retweet_of = ring[tweet_rng.below(ring.size())];
                std::optional<std::string> mention;
                if (tweet_rng.next_unit() < sc.mention_prob[cls_bucket])
                    mention = authors[tweet_rng.below(authors.size())].id;

                line.clear();
                line += "{\"id\":";
                append_json_string(line, tweet_id);
                line += ",\"ts\":";
                line += std::to_string(ts);
                line += ",\"user\":{\"id\":";
                append_json_string(line, author.id);
                line += ",\"followers\":";
                line += std::to_string(author.followers);
                line += ",\"created_at\":";
                line += std::to_string(author.created_at);
                line += ",\"statuses\":";
                line += std::to_string(author.statuses);
                line += "},\"text\":";
                append_json_string(line, text);
                if (retweet_of) {
                    line += ",\"retweet_of\":";
                    append_json_string(line, *retweet_of);
                }
                if (mention) {
                    line += ",\"mentions\":[";
                    append_json_string(line, *mention);
                    line += "]";
                }
                line += "}\n";
                stream_out << line;
                ++summary.tweet_count;

                if (ring.size() < 8) ring.push_back(tweet_id);
                else ring[tweet_counter % 8] = tweet_id;
            }
        }
    }
    return summary;
}

std::string StreamScenario::to_json() const {
    ordered_json j;
    j["name"] = name;
    j["seed"] = seed;
    j["origin_epoch_seconds"] = origin_epoch_seconds;
    j["duration_minutes"] = duration_minutes;
    j["delta"] = delta;
    j["window_minutes"] = window_minutes;
    j["n_planted_bursts"] = n_planted_bursts;
    j["n_hard_negatives"] = n_hard_negatives;
    j["n_quiet_background"] = n_quiet_background;
    j["author_pool"] = author_pool;
    j["core_authors_per_hashtag"] = core_authors_per_hashtag;
    j["core_author_bias"] = core_author_bias;
    j["followers_log_mu"] = followers_log_mu;
    j["followers_log_sigma"] = followers_log_sigma;
    j["statuses_log_mu"] = statuses_log_mu;
    j["statuses_log_sigma"] = statuses_log_sigma;
    j["account_age_days_min"] = account_age_days_min;
    j["account_age_days_max"] = account_age_days_max;
    j["trickle_rate"] = trickle_rate;
    j["dormant_minutes_min"] = dormant_minutes_min;
    j["dormant_minutes_max"] = dormant_minutes_max;
    j["c1_min"] = c1_min;
    j["c1_max"] = c1_max;
    j["plateau_gamma_min"] = plateau_gamma_min;
    j["plateau_gamma_max"] = plateau_gamma_max;
    j["peak_excess_min"] = peak_excess_min;
    j["peak_excess_max"] = peak_excess_max;
    j["spike_interval_min"] = spike_interval_min;
    j["spike_interval_max"] = spike_interval_max;
    j["decay_start_frac_min"] = decay_start_frac_min;
    j["decay_start_frac_max"] = decay_start_frac_max;
    j["decay_half_life_min"] = decay_half_life_min;
    j["decay_half_life_max"] = decay_half_life_max;
    j["negative_half_life_min"] = negative_half_life_min;
    j["negative_half_life_max"] = negative_half_life_max;
    auto cdf_json = [](const AnchoredCdf& cdf) {
        ordered_json arr = ordered_json::array();
        for (const auto& [m, p] : cdf.anchors) arr.push_back({m, p});
        return arr;
    };
    j["tbb_cdf"] = cdf_json(tbb_cdf);
    j["active_cdf"] = cdf_json(active_cdf);
    auto pair_json = [](const double (&p)[2]) { return ordered_json{p[0], p[1]}; };
    j["url_prob"] = pair_json(url_prob);
    j["retweet_prob"] = pair_json(retweet_prob);
    j["mention_prob"] = pair_json(mention_prob);
    j["cooccur_prob"] = pair_json(cooccur_prob);
    j["case_variant_prob"] = pair_json(case_variant_prob);
    j["happy_prob"] = pair_json(happy_prob);
    j["sad_prob"] = pair_json(sad_prob);
    j["special_prob"] = pair_json(special_prob);
    j["sentiment_word_prob"] = pair_json(sentiment_word_prob);
    j["stage_offsets"] = stage_offsets;
    j["target_positive_fraction"] = target_positive_fraction;
    return j.dump(2) + "\n";
}

StreamScenario StreamScenario::from_json(const std::string& text) {
    ordered_json j = ordered_json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ConfigError("malformed scenario JSON");
    StreamScenario sc;
    auto get = [&](const char* name, auto& field) {
        if (j.contains(name)) field = j.at(name).get<std::decay_t<decltype(field)>>();
    };
    get("name", sc.name);
    get("seed", sc.seed);
    get("origin_epoch_seconds", sc.origin_epoch_seconds);
    get("duration_minutes", sc.duration_minutes);
    get("delta", sc.delta);
    get("window_minutes", sc.window_minutes);
    get("n_planted_bursts", sc.n_planted_bursts);
    get("n_hard_negatives", sc.n_hard_negatives);
    get("n_quiet_background", sc.n_quiet_background);
    get("author_pool", sc.author_pool);
    get("core_authors_per_hashtag", sc.core_authors_per_hashtag);
    get("core_author_bias", sc.core_author_bias);
    get("followers_log_mu", sc.followers_log_mu);
    get("followers_log_sigma", sc.followers_log_sigma);
    get("statuses_log_mu", sc.statuses_log_mu);
    get("statuses_log_sigma", sc.statuses_log_sigma);
    get("account_age_days_min", sc.account_age_days_min);
    get("account_age_days_max", sc.account_age_days_max);
    get("trickle_rate", sc.trickle_rate);
    get("dormant_minutes_min", sc.dormant_minutes_min);
    get("dormant_minutes_max", sc.dormant_minutes_max);
    get("c1_min", sc.c1_min);
    get("c1_max", sc.c1_max);
    get("plateau_gamma_min", sc.plateau_gamma_min);
    get("plateau_gamma_max", sc.plateau_gamma_max);
    get("peak_excess_min", sc.peak_excess_min);
    get("peak_excess_max", sc.peak_excess_max);
    get("spike_interval_min", sc.spike_interval_min);
    get("spike_interval_max", sc.spike_interval_max);
    get("decay_start_frac_min", sc.decay_start_frac_min);
    get("decay_start_frac_max", sc.decay_start_frac_max);
    get("decay_half_life_min", sc.decay_half_life_min);
    get("decay_half_life_max", sc.decay_half_life_max);
    get("negative_half_life_min", sc.negative_half_life_min);
    get("negative_half_life_max", sc.negative_half_life_max);
    auto cdf_parse = [&](const char* name, AnchoredCdf& cdf) {
        if (!j.contains(name)) return;
        cdf.anchors.clear();
        for (const auto& pair : j.at(name))
            cdf.anchors.emplace_back(pair.at(0).get<std::int64_t>(),
                                     pair.at(1).get<double>());
    };
    cdf_parse("tbb_cdf", sc.tbb_cdf);
    cdf_parse("active_cdf", sc.active_cdf);
    auto pair_parse = [&](const char* name, double (&field)[2]) {
        if (!j.contains(name)) return;
        field[0] = j.at(name).at(0).get<double>();
        field[1] = j.at(name).at(1).get<double>();
    };
    pair_parse("url_prob", sc.url_prob);
    pair_parse("retweet_prob", sc.retweet_prob);
    pair_parse("mention_prob", sc.mention_prob);
    pair_parse("cooccur_prob", sc.cooccur_prob);
    pair_parse("case_variant_prob", sc.case_variant_prob);
    pair_parse("happy_prob", sc.happy_prob);
    pair_parse("sad_prob", sc.sad_prob);
    pair_parse("special_prob", sc.special_prob);
    pair_parse("sentiment_word_prob", sc.sentiment_word_prob);
    get("stage_offsets", sc.stage_offsets);
    get("target_positive_fraction", sc.target_positive_fraction);
    return sc;
}

StreamScenario StreamScenario::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

}  // namespace burstwatch::synth
