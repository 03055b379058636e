#pragma once

#include <array>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "burstwatch/lifecycle.hpp"

namespace burstwatch::features {

inline constexpr int kAlpha = 58;      // full feature vector width
inline constexpr int kCoreAlpha = 43;  // similarity representation: everything
                                       // except top-gram indicators and
                                       // prototype features (the trailing 15)

enum class Task { BurstClassification, TbbRegression, TraRegression };

std::string to_string(Task task);
Task task_from_string(std::string_view s);

/// Fixed published layout of the 58-feature schema.
struct SchemaEntry {
    int index;
    const char* name;
    const char* family;
};
std::span<const SchemaEntry> schema();
inline constexpr int kSchemaVersion = 1;

// ---- feature families -------------------------------------------------

/// tweet_count, author_count, retweet_count, mention_count, url_ratio,
/// author_ratio, retweet_ratio, mention_ratio.
std::array<double, 8> meme_features(const lifecycle::HashtagState& state);

/// total_followers, max_followers, mean passivity N_d/(1+N_t) over adopters.
std::array<double, 3> user_features(const lifecycle::HashtagState& state,
                                    lifecycle::Minute t_p);

/// special_signal_tweets, avg_pos_score, avg_neg_score, happy_tweets, sad_tweets.
std::array<double, 5> content_features(const lifecycle::HashtagState& state);

/// order |V|, density, average degree 2|E|/|V|, natural-log entropy of the
/// total-degree distribution. |V| <= 1 degenerates to zeros.
std::array<double, 4> network_features(const lifecycle::RetweetMentionNetwork& graph);

/// key length, distinct surface variants, co-occurrence tweet count.
std::array<double, 3> hashtag_features(const lifecycle::HashtagState& state);

/// dormant minutes (s - first_seen), bursting minutes (t_p - onset, else 0).
std::array<double, 2> dormancy_features(const lifecycle::HashtagState& state,
                                        lifecycle::Minute t_p);

/// The eleven derivative features over the slice c_s..c_tp:
/// mean_value, std_value, d_last_first, d_last_max, d_last_min, idx_max,
/// mean_fod, std_fod, last_fod, max_fod, d_pfod_nfod.
/// mean_fod/std_fod use |c_{j+1}-c_j|; last_fod/max_fod are signed; ties
/// (c_{j+1} == c_j) count as positive steps. A single point zeroes all
/// derivative-of-series features and idx_max.
std::array<double, 11> ts_derivative_features(std::span<const int> slice);

struct PolyFit {
    int beta = 0;                     // min(slice length - 1, 6)
    std::array<double, 7> coeffs{};   // w_0..w_beta, zero-padded
};

/// Least-squares polynomial fit over x = 0..n-1.
PolyFit polyfit(std::span<const int> slice);

/// Evaluates the fitted polynomial at x.
double polyfit_eval(const PolyFit& fit, double x);

struct SaxConfig {
    int alphabet_size = 6;  // symbols 'A'..
    int paa_segments = 8;

    void validate() const;
};

/// Standard SAX: z-normalize, PAA, Gaussian equiprobable breakpoints.
/// Zero-variance slices map every segment to the lower-middle symbol.
/// Slices shorter than paa_segments use one segment per point.
std::string sax_encode(std::span<const int> slice, const SaxConfig& cfg);

/// All order-preserving length-3 subsequences ending with the final symbol.
/// Fewer than 3 symbols yields the empty set.
std::set<std::string> extract_3grams(std::string_view symbols);

/// Per-stage ranking table; the top (at most 5) 3-grams over bursting
/// hashtags of the historic window.
struct TopGramTable {
    std::vector<std::string> grams;
};

/// 0/1 indicator per table slot; absent slots stay 0.
std::array<double, 5> top_gram_features(const std::set<std::string>& grams,
                                        const TopGramTable& table);

/// Per-feature z-score statistics for the similarity representation.
struct Normalizer {
    std::array<double, kCoreAlpha> mean{};
    std::array<double, kCoreAlpha> stddev{};  // population; 0 passes the feature through as 0

    std::array<double, kCoreAlpha> apply(std::span<const double> core) const;
};

Normalizer fit_normalizer(const std::vector<std::array<double, kCoreAlpha>>& rows);

/// Sim(a,b) = 1 / (1 + sqrt(sum((a_n-b_n)^2))) on normalized vectors.
double similarity(std::span<const double> a, std::span<const double> b);

struct HistoricEntry {
    std::string key;
    int cycle = 0;
    std::array<double, kCoreAlpha> normalized{};
    bool bursting = false;          // cycle outcome
    std::int64_t tbb = 0;           // minutes remaining to onset at this stage
    std::int64_t tra = 0;           // minutes remaining active at this stage
};

/// Stage-matched historic index. `all` is the Task-1 search population
/// (not yet burst at the stage moment), ordered by (key, cycle) so
/// similarity ties break on historic key order. `tra_entries` are the
/// currently-bursting cycles at that stage.
struct StageIndex {
    std::string stage_tag;
    int stage_offset = 0;
    Normalizer normalizer;
    TopGramTable gram_table;
    std::vector<HistoricEntry> all;          // task 1 population (labels: bursting flag, tbb)
    std::vector<HistoricEntry> tra_entries;  // task 3 population (labels: tra)
};

/// For k = 1..10: Task 1 counts bursting prototypes among the top-k most
/// similar; Tasks 2/3 take the similarity-weighted mean of TBB/TRA over the
/// top-k bursting prototypes. Small populations repeat the last value.
std::array<double, 10> prototype_features(std::span<const double> normalized_query,
                                          const StageIndex& index, Task task);

/// Assembled vector in published schema order.
struct FeatureVector {
    std::string key;
    int cycle = 0;
    std::string stage_tag;
    lifecycle::Minute t_p = 0;
    int schema_version = kSchemaVersion;
    std::array<double, kAlpha> values{};

    std::span<const double> core() const { return {values.data(), kCoreAlpha}; }
};

/// Concatenates meme(8) + user(3) + content(5) + network(4) + hashtag(3) +
/// dormancy(2) + poly(7) + derivative(11) + top-grams(5) + prototype(10).
/// Throws ContractViolation if any value is non-finite.
FeatureVector assemble(const std::string& key, int cycle,
                       const lifecycle::StageSnapshot& snapshot,
                       const SaxConfig& sax_cfg, const StageIndex& index, Task task);

/// The 43 similarity-representation features of one snapshot (no gram /
/// prototype slots); used for index construction and as assemble's prefix.
std::array<double, kCoreAlpha> core_features(const lifecycle::StageSnapshot& snapshot);

}  // namespace burstwatch::features
