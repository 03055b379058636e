#include "burstwatch/features.hpp"

#include <algorithm>
#include <cmath>

namespace burstwatch::features {

std::string to_string(Task task) {
    switch (task) {
        case Task::BurstClassification: return "burst-classification";
        case Task::TbbRegression: return "tbb-regression";
        case Task::TraRegression: return "tra-regression";
    }
    return "?";
}

Task task_from_string(std::string_view s) {
    if (s == "burst-classification") return Task::BurstClassification;
    if (s == "tbb-regression") return Task::TbbRegression;
    if (s == "tra-regression") return Task::TraRegression;
    throw ConfigError("unknown task: " + std::string(s));
}

namespace {

constexpr SchemaEntry kSchema[kAlpha] = {
    {0, "tweet_count", "meme"},
    {1, "author_count", "meme"},
    {2, "retweet_count", "meme"},
    {3, "mention_count", "meme"},
    {4, "url_ratio", "meme"},
    {5, "author_ratio", "meme"},
    {6, "retweet_ratio", "meme"},
    {7, "mention_ratio", "meme"},
    {8, "total_followers", "user"},
    {9, "max_followers", "user"},
    {10, "mean_passivity", "user"},
    {11, "special_signal_tweets", "content"},
    {12, "avg_pos_score", "content"},
    {13, "avg_neg_score", "content"},
    {14, "happy_emoticon_tweets", "content"},
    {15, "sad_emoticon_tweets", "content"},
    {16, "graph_order", "network"},
    {17, "graph_density", "network"},
    {18, "graph_avg_degree", "network"},
    {19, "graph_degree_entropy", "network"},
    {20, "tag_length", "hashtag"},
    {21, "case_variant_count", "hashtag"},
    {22, "cooccurrence_tweets", "hashtag"},
    {23, "dormant_minutes", "time_series"},
    {24, "bursting_minutes", "time_series"},
    {25, "poly_w0", "time_series"},
    {26, "poly_w1", "time_series"},
    {27, "poly_w2", "time_series"},
    {28, "poly_w3", "time_series"},
    {29, "poly_w4", "time_series"},
    {30, "poly_w5", "time_series"},
    {31, "poly_w6", "time_series"},
    {32, "ts_mean_value", "time_series"},
    {33, "ts_std_value", "time_series"},
    {34, "ts_d_last_first", "time_series"},
    {35, "ts_d_last_max", "time_series"},
    {36, "ts_d_last_min", "time_series"},
    {37, "ts_idx_max", "time_series"},
    {38, "ts_mean_fod", "time_series"},
    {39, "ts_std_fod", "time_series"},
    {40, "ts_last_fod", "time_series"},
    {41, "ts_max_fod", "time_series"},
    {42, "ts_d_pfod_nfod", "time_series"},
    {43, "top_gram_1", "time_series"},
    {44, "top_gram_2", "time_series"},
    {45, "top_gram_3", "time_series"},
    {46, "top_gram_4", "time_series"},
    {47, "top_gram_5", "time_series"},
    {48, "proto_k1", "prototype"},
    {49, "proto_k2", "prototype"},
    {50, "proto_k3", "prototype"},
    {51, "proto_k4", "prototype"},
    {52, "proto_k5", "prototype"},
    {53, "proto_k6", "prototype"},
    {54, "proto_k7", "prototype"},
    {55, "proto_k8", "prototype"},
    {56, "proto_k9", "prototype"},
    {57, "proto_k10", "prototype"},
};

}  // namespace

std::span<const SchemaEntry> schema() { return {kSchema, kAlpha}; }

std::array<double, 8> meme_features(const lifecycle::HashtagState& state) {
    const double tweets = static_cast<double>(state.tweet_count());
    if (state.tweet_count() == 0)
        throw ContractViolation("meme features on a hashtag with zero tweets");
    const double authors = static_cast<double>(state.adopters().size());
    const double retweets = static_cast<double>(state.retweet_count());
    const double mentions = static_cast<double>(state.mention_count());
    const double urls = static_cast<double>(state.url_tweet_count());
    return {tweets,  authors,          retweets,          mentions,
            urls / tweets, authors / tweets, retweets / tweets, mentions / tweets};
}

std::array<double, 3> user_features(const lifecycle::HashtagState& state,
                                    lifecycle::Minute t_p) {
    double total = 0.0;
    double maximum = 0.0;
    double passivity_sum = 0.0;
    const auto& adopters = state.adopters();
    for (const auto& [id, stats] : adopters) {
        const double followers = static_cast<double>(stats.followers);
        total += followers;
        maximum = std::max(maximum, followers);
        std::int64_t age_days = (t_p * 60 - stats.account_created) / 86400;
        if (age_days < 0) age_days = 0;
        passivity_sum += static_cast<double>(age_days) /
                         (1.0 + static_cast<double>(stats.statuses));
    }
    const double mean_passivity =
        adopters.empty() ? 0.0 : passivity_sum / static_cast<double>(adopters.size());
    return {total, maximum, mean_passivity};
}

std::array<double, 5> content_features(const lifecycle::HashtagState& state) {
    const double scored = static_cast<double>(state.scored_word_count());
    const double avg_pos = scored > 0.0 ? state.pos_score_sum() / scored : 0.0;
    const double avg_neg = scored > 0.0 ? state.neg_score_sum() / scored : 0.0;
    return {static_cast<double>(state.special_signal_tweet_count()), avg_pos, avg_neg,
            static_cast<double>(state.happy_emoticon_tweet_count()),
            static_cast<double>(state.sad_emoticon_tweet_count())};
}

std::array<double, 4> network_features(const lifecycle::RetweetMentionNetwork& graph) {
    const double v = static_cast<double>(graph.order());
    if (graph.order() <= 1) return {v, 0.0, 0.0, 0.0};
    const double e = static_cast<double>(graph.edge_count());
    const double density = e / (v * (v - 1.0));
    const double avg_degree = 2.0 * e / v;
    std::map<std::int64_t, std::int64_t> histogram;
    for (const auto& [node, degree] : graph.degree) ++histogram[degree];
    double entropy = 0.0;
    for (const auto& [degree, nodes] : histogram) {
        const double p = static_cast<double>(nodes) / v;
        entropy -= p * std::log(p);
    }
    if (entropy < 0.0) entropy = 0.0;  // -0.0 from the single-class case
    return {v, density, avg_degree, entropy};
}

std::array<double, 3> hashtag_features(const lifecycle::HashtagState& state) {
    return {static_cast<double>(state.key().size()),
            static_cast<double>(state.case_variants().size()),
            static_cast<double>(state.cooccurrence_tweets())};
}

std::array<double, 2> dormancy_features(const lifecycle::HashtagState& state,
                                        lifecycle::Minute t_p) {
    double dormant = 0.0;
    if (state.trigger_minute())
        dormant = static_cast<double>(*state.trigger_minute() - state.first_seen_minute());
    double bursting = 0.0;
    if (state.burst_onset() && t_p >= *state.burst_onset())
        bursting = static_cast<double>(t_p - *state.burst_onset());
    return {dormant, bursting};
}

std::array<double, 11> ts_derivative_features(std::span<const int> slice) {
    if (slice.empty()) throw ContractViolation("derivative features need >= 1 point");
    const std::size_t n = slice.size();
    double sum = 0.0;
    int max_v = slice[0];
    int min_v = slice[0];
    std::size_t idx_max = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sum += slice[i];
        if (slice[i] > max_v) {
            max_v = slice[i];
            idx_max = i;
        }
        min_v = std::min(min_v, slice[i]);
    }
    const double mean = sum / static_cast<double>(n);
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = slice[i] - mean;
        sq += d * d;
    }
    const double stddev = std::sqrt(sq / static_cast<double>(n));
    const double last = slice[n - 1];
    const double d_last_first = last - slice[0];
    const double d_last_max = last - max_v;
    const double d_last_min = last - min_v;

    double mean_fod = 0.0, std_fod = 0.0, last_fod = 0.0, max_fod = 0.0, d_pfod_nfod = 0.0;
    if (n >= 2) {
        double abs_sum = 0.0;
        double signed_max = slice[1] - static_cast<double>(slice[0]);
        std::int64_t pfod = 0, nfod = 0;
        for (std::size_t j = 0; j + 1 < n; ++j) {
            const double d = static_cast<double>(slice[j + 1]) - slice[j];
            abs_sum += std::abs(d);
            signed_max = std::max(signed_max, d);
            if (slice[j + 1] >= slice[j]) ++pfod;
            else ++nfod;
        }
        const double m = static_cast<double>(n - 1);
        mean_fod = abs_sum / m;
        double asq = 0.0;
        for (std::size_t j = 0; j + 1 < n; ++j) {
            const double d = std::abs(static_cast<double>(slice[j + 1]) - slice[j]) - mean_fod;
            asq += d * d;
        }
        std_fod = std::sqrt(asq / m);
        last_fod = static_cast<double>(slice[n - 1]) - slice[n - 2];
        max_fod = signed_max;
        d_pfod_nfod = static_cast<double>(pfod - nfod);
    }
    return {mean,     stddev,  d_last_first, d_last_max, d_last_min, static_cast<double>(idx_max),
            mean_fod, std_fod, last_fod,     max_fod,    d_pfod_nfod};
}

std::array<double, 5> top_gram_features(const std::set<std::string>& grams,
                                        const TopGramTable& table) {
    std::array<double, 5> out{};
    for (std::size_t i = 0; i < table.grams.size() && i < 5; ++i)
        out[i] = grams.count(table.grams[i]) > 0 ? 1.0 : 0.0;
    return out;
}

std::set<std::string> extract_3grams(std::string_view symbols) {
    std::set<std::string> out;
    const std::size_t len = symbols.size();
    if (len < 3) return out;
    const char final_symbol = symbols[len - 1];
    for (std::size_t i = 0; i + 2 < len; ++i) {
        for (std::size_t j = i + 1; j + 1 < len; ++j) {
            std::string gram{symbols[i], symbols[j], final_symbol};
            out.insert(std::move(gram));
        }
    }
    return out;
}

std::array<double, kCoreAlpha> Normalizer::apply(std::span<const double> core) const {
    if (core.size() != kCoreAlpha)
        throw ContractViolation("normalizer expects the 43-feature core");
    std::array<double, kCoreAlpha> out{};
    for (int i = 0; i < kCoreAlpha; ++i)
        out[i] = stddev[i] > 0.0 ? (core[i] - mean[i]) / stddev[i] : 0.0;
    return out;
}

Normalizer fit_normalizer(const std::vector<std::array<double, kCoreAlpha>>& rows) {
    Normalizer norm;
    if (rows.empty()) {
        norm.stddev.fill(0.0);
        return norm;
    }
    const double n = static_cast<double>(rows.size());
    for (int i = 0; i < kCoreAlpha; ++i) {
        double sum = 0.0;
        for (const auto& r : rows) sum += r[i];
        norm.mean[i] = sum / n;
        double sq = 0.0;
        for (const auto& r : rows) {
            const double d = r[i] - norm.mean[i];
            sq += d * d;
        }
        norm.stddev[i] = std::sqrt(sq / n);
    }
    return norm;
}

double similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw ContractViolation("similarity requires identical schemas");
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sq += d * d;
    }
    return 1.0 / (1.0 + std::sqrt(sq));
}

std::array<double, 10> prototype_features(std::span<const double> normalized_query,
                                          const StageIndex& index, Task task) {
    const std::vector<HistoricEntry>* population =
        task == Task::TraRegression ? &index.tra_entries : &index.all;

    // (similarity, population index); ties break on historic order
    std::vector<std::pair<double, std::size_t>> ranked;
    ranked.reserve(population->size());
    for (std::size_t i = 0; i < population->size(); ++i) {
        const HistoricEntry& e = (*population)[i];
        if (task == Task::TbbRegression && !e.bursting) continue;
        ranked.emplace_back(similarity(normalized_query, e.normalized), i);
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });

    std::array<double, 10> out{};
    double count_bursting = 0.0;
    double weighted_num = 0.0;
    double weighted_den = 0.0;
    double last_value = 0.0;
    for (int k = 1; k <= 10; ++k) {
        const std::size_t i = static_cast<std::size_t>(k - 1);
        if (i < ranked.size()) {
            const HistoricEntry& e = (*population)[ranked[i].second];
            const double sim = ranked[i].first;
            switch (task) {
                case Task::BurstClassification:
                    if (e.bursting) count_bursting += 1.0;
                    last_value = count_bursting;
                    break;
                case Task::TbbRegression:
                    weighted_num += sim * static_cast<double>(e.tbb);
                    weighted_den += sim;
                    last_value = weighted_num / weighted_den;
                    break;
                case Task::TraRegression:
                    weighted_num += sim * static_cast<double>(e.tra);
                    weighted_den += sim;
                    last_value = weighted_num / weighted_den;
                    break;
            }
        }
        out[static_cast<std::size_t>(k - 1)] = last_value;
    }
    return out;
}

std::array<double, kCoreAlpha> core_features(const lifecycle::StageSnapshot& snapshot) {
    std::array<double, kCoreAlpha> out{};
    std::size_t pos = 0;
    for (double v : snapshot.meme) out[pos++] = v;
    for (double v : snapshot.user) out[pos++] = v;
    for (double v : snapshot.content) out[pos++] = v;
    for (double v : snapshot.network) out[pos++] = v;
    for (double v : snapshot.hashtag) out[pos++] = v;
    for (double v : snapshot.dormancy) out[pos++] = v;
    const PolyFit fit = polyfit(snapshot.series);
    for (double v : fit.coeffs) out[pos++] = v;
    for (double v : ts_derivative_features(snapshot.series)) out[pos++] = v;
    return out;
}

FeatureVector assemble(const std::string& key, int cycle,
                       const lifecycle::StageSnapshot& snapshot,
                       const SaxConfig& sax_cfg, const StageIndex& index, Task task) {
    FeatureVector vec;
    vec.key = key;
    vec.cycle = cycle;
    vec.stage_tag = snapshot.stage_tag;
    vec.t_p = snapshot.t_p;

    const auto core = core_features(snapshot);
    std::copy(core.begin(), core.end(), vec.values.begin());

    const std::string symbols = sax_encode(snapshot.series, sax_cfg);
    const auto grams = extract_3grams(symbols);
    const auto gram_feats = top_gram_features(grams, index.gram_table);
    std::copy(gram_feats.begin(), gram_feats.end(), vec.values.begin() + kCoreAlpha);

    const auto normalized = index.normalizer.apply(core);
    const auto proto = prototype_features(normalized, index, task);
    std::copy(proto.begin(), proto.end(), vec.values.begin() + kCoreAlpha + 5);

    for (double v : vec.values) {
        if (!std::isfinite(v))
            throw ContractViolation("non-finite feature for '" + key + "' at " +
                                    snapshot.stage_tag);
    }
    return vec;
}

}  // namespace burstwatch::features
