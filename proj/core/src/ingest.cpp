#include "burstwatch/ingest.hpp"

#include <algorithm>
#include <cctype>

#include <nlohmann/json.hpp>

namespace burstwatch::ingest {

namespace {

using nlohmann::json;

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_tag_char(char c) {
    return is_alpha(c) || (c >= '0' && c <= '9') || c == '_';
}
bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace

std::string ascii_casefold(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

bool detect_special_signal(std::string_view text) {
    std::size_t run = 0;
    char prev = '\0';
    for (char c : text) {
        const bool counts = is_alpha(c) || c == '!' || c == '?';
        if (counts && c == prev) {
            if (++run >= 3) return true;
        } else {
            run = counts ? 1 : 0;
            prev = counts ? c : '\0';
        }
    }
    return false;
}

std::vector<HashtagOccurrence> extract_hashtags(std::string_view text) {
    std::vector<HashtagOccurrence> out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] != '#') {
            ++i;
            continue;
        }
        std::size_t start = ++i;
        while (i < text.size() && is_tag_char(text[i])) ++i;
        if (i == start) continue;  // bare '#'
        std::string surface(text.substr(start, i - start));
        std::string key = ascii_casefold(surface);
        bool seen = false;
        for (const auto& h : out) {
            if (h.key == key) {
                seen = true;
                break;
            }
        }
        if (!seen) out.push_back({std::move(key), std::move(surface)});
    }
    return out;
}

std::vector<std::string> tokenize_words(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_alpha(text[i])) {
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < text.size() && is_alpha(text[i])) ++i;
        out.push_back(ascii_casefold(text.substr(start, i - start)));
    }
    return out;
}

bool contains_url(std::string_view text) {
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) ++i;
        std::size_t start = i;
        while (i < text.size() && !is_space(text[i])) ++i;
        std::string_view tok = text.substr(start, i - start);
        if (tok.starts_with("http://") || tok.starts_with("https://")) return true;
    }
    return false;
}

std::pair<int, int> count_emoticons(std::string_view text, const EmoticonLexicon& lexicon) {
    int happy = 0;
    int sad = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) ++i;
        std::size_t start = i;
        while (i < text.size() && !is_space(text[i])) ++i;
        std::string_view tok = text.substr(start, i - start);
        if (tok.empty()) continue;
        // longest lexicon entry that prefixes the token wins
        std::size_t best_len = 0;
        int best_class = -1;
        for (const auto& e : lexicon.happy) {
            if (e.size() > best_len && tok.starts_with(e)) {
                best_len = e.size();
                best_class = 0;
            }
        }
        for (const auto& e : lexicon.sad) {
            if (e.size() > best_len && tok.starts_with(e)) {
                best_len = e.size();
                best_class = 1;
            }
        }
        if (best_class == 0) ++happy;
        if (best_class == 1) ++sad;
    }
    return {happy, sad};
}

SentimentSums score_sentiment(const std::vector<std::string>& word_tokens,
                              const SentimentLexicon& lexicon) {
    SentimentSums sums;
    for (const auto& w : word_tokens) {
        if (const auto* s = lexicon.find(w)) {
            sums.pos_sum += s->first;
            sums.neg_sum += s->second;
            ++sums.scored_words;
        }
    }
    return sums;
}

namespace {

const json* get_field(const json& obj, const char* name) {
    auto it = obj.find(name);
    return it == obj.end() ? nullptr : &*it;
}

std::int64_t require_int(const json& obj, const char* name, std::size_t line_no,
                         bool non_negative) {
    const json* f = get_field(obj, name);
    if (f == nullptr || !f->is_number_integer())
        throw ParseError(line_no, std::string("missing or non-integer field '") + name + "'");
    std::int64_t v = f->get<std::int64_t>();
    if (non_negative && v < 0)
        throw ParseError(line_no, std::string("negative value for '") + name + "'");
    return v;
}

std::string require_string(const json& obj, const char* name, std::size_t line_no) {
    const json* f = get_field(obj, name);
    if (f == nullptr || !f->is_string())
        throw ParseError(line_no, std::string("missing or non-string field '") + name + "'");
    return f->get<std::string>();
}

}  // namespace

TweetRecord parse_tweet(std::string_view line, std::size_t line_no,
                        const EmoticonLexicon& emoticons) {
    json obj = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (obj.is_discarded() || !obj.is_object())
        throw ParseError(line_no, "malformed JSON record");

    TweetRecord rec;
    rec.tweet_id = require_string(obj, "id", line_no);
    rec.timestamp = require_int(obj, "ts", line_no, /*non_negative=*/false);
    if (rec.timestamp <= 0) throw ParseError(line_no, "'ts' must be positive");
    rec.text = require_string(obj, "text", line_no);

    const json* user = get_field(obj, "user");
    if (user == nullptr || !user->is_object())
        throw ParseError(line_no, "missing or non-object field 'user'");
    rec.author_id = require_string(*user, "id", line_no);
    rec.author_followers = require_int(*user, "followers", line_no, true);
    rec.author_account_created = require_int(*user, "created_at", line_no, false);
    rec.author_statuses_count = require_int(*user, "statuses", line_no, true);
    if (rec.author_account_created > rec.timestamp)
        throw ParseError(line_no, "account created after tweet timestamp");

    if (const json* rt = get_field(obj, "retweet_of")) {
        if (!rt->is_string()) throw ParseError(line_no, "'retweet_of' must be a string");
        rec.retweet_of = rt->get<std::string>();
    }
    if (const json* men = get_field(obj, "mentions")) {
        if (!men->is_array()) throw ParseError(line_no, "'mentions' must be an array");
        for (const auto& m : *men) {
            if (!m.is_string()) throw ParseError(line_no, "'mentions' entries must be strings");
            rec.explicit_mentions.push_back(m.get<std::string>());
        }
    }

    rec.hashtags = extract_hashtags(rec.text);
    rec.urls_present = contains_url(rec.text);
    rec.special_signal = detect_special_signal(rec.text);
    auto [happy, sad] = count_emoticons(rec.text, emoticons);
    rec.happy_emoticons = happy;
    rec.sad_emoticons = sad;
    rec.word_tokens = tokenize_words(rec.text);
    return rec;
}

std::size_t read_stream(std::istream& in, const EmoticonLexicon& emoticons,
                        const std::function<void(const TweetRecord&)>& on_record,
                        const std::function<void(const ParseError&)>& on_error) {
    std::string line;
    std::size_t line_no = 0;
    std::size_t delivered = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            TweetRecord rec = parse_tweet(line, line_no, emoticons);
            on_record(rec);
            ++delivered;
        } catch (const ParseError& err) {
            if (on_error) on_error(err);
        }
    }
    return delivered;
}

}  // namespace burstwatch::ingest
