#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "burstwatch/errors.hpp"

namespace burstwatch::ingest {

/// One hashtag use inside a tweet. `key` is the ASCII-casefolded body
/// (no '#'), `surface` the body as written.
struct HashtagOccurrence {
    std::string key;
    std::string surface;

    bool operator==(const HashtagOccurrence&) const = default;
};

struct TweetRecord {
    std::string tweet_id;
    std::string author_id;
    std::int64_t timestamp = 0;  // epoch seconds, UTC
    std::string text;
    std::optional<std::string> retweet_of;
    std::vector<std::string> explicit_mentions;
    std::int64_t author_followers = 0;
    std::int64_t author_account_created = 0;  // epoch seconds
    std::int64_t author_statuses_count = 0;
    std::vector<HashtagOccurrence> hashtags;  // deduplicated per key, first surface kept
    bool urls_present = false;
    bool special_signal = false;
    int happy_emoticons = 0;
    int sad_emoticons = 0;
    std::vector<std::string> word_tokens;  // casefolded maximal alphabetic runs

    bool operator==(const TweetRecord&) const = default;
};

/// word -> (positive score, negative score), both in [0,1].
/// File format: UTF-8 TSV lines `word<TAB>pos<TAB>neg`.
class SentimentLexicon {
public:
    static SentimentLexicon load(const std::filesystem::path& file);
    static SentimentLexicon from_entries(
        std::vector<std::pair<std::string, std::pair<double, double>>> entries);

    const std::pair<double, double>* find(const std::string& word) const {
        auto it = scores_.find(word);
        return it == scores_.end() ? nullptr : &it->second;
    }
    std::size_t size() const { return scores_.size(); }

private:
    std::unordered_map<std::string, std::pair<double, double>> scores_;
};

/// Two token lists. File format: `[happy]` / `[sad]` section headers,
/// one emoticon token per line, `#` comments and blank lines ignored.
struct EmoticonLexicon {
    std::vector<std::string> happy;
    std::vector<std::string> sad;

    static EmoticonLexicon load(const std::filesystem::path& file);
};

struct SentimentSums {
    double pos_sum = 0.0;
    double neg_sum = 0.0;
    int scored_words = 0;
};

/// True iff text has a run of >=3 identical alphabetic characters, or >=3 '!',
/// or >=3 '?' ("goooooood", "!!!", "???").
bool detect_special_signal(std::string_view text);

/// (happy, sad) occurrence counts. Whitespace-delimited tokens, longest
/// lexicon entry that prefixes the token wins; at most one match per token.
std::pair<int, int> count_emoticons(std::string_view text, const EmoticonLexicon& lexicon);

SentimentSums score_sentiment(const std::vector<std::string>& word_tokens,
                              const SentimentLexicon& lexicon);

std::vector<std::string> tokenize_words(std::string_view text);
std::vector<HashtagOccurrence> extract_hashtags(std::string_view text);
bool contains_url(std::string_view text);
std::string ascii_casefold(std::string_view s);

/// Parses one JSONL record. Throws ParseError (carrying line_no) on malformed
/// JSON or a missing/invalid mandatory field.
TweetRecord parse_tweet(std::string_view line, std::size_t line_no,
                        const EmoticonLexicon& emoticons);

/// Drives a whole stream. Parse failures go to on_error and the stream
/// continues. Returns the number of records delivered.
std::size_t read_stream(std::istream& in, const EmoticonLexicon& emoticons,
                        const std::function<void(const TweetRecord&)>& on_record,
                        const std::function<void(const ParseError&)>& on_error = {});

}  // namespace burstwatch::ingest
