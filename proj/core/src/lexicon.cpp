#include <fstream>

#include "burstwatch/ingest.hpp"
#include "burstwatch/textio.hpp"

namespace burstwatch::ingest {

namespace {

std::string strip(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return std::string(s.substr(b, e - b));
}

}  // namespace

SentimentLexicon SentimentLexicon::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open sentiment lexicon: " + file.string());
    std::vector<std::pair<std::string, std::pair<double, double>>> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        auto parts = split(line, '\t');
        if (parts.size() != 3)
            throw ConfigError("sentiment lexicon line " + std::to_string(line_no) +
                              ": expected word<TAB>pos<TAB>neg");
        double pos = parse_double(strip(parts[1]));
        double neg = parse_double(strip(parts[2]));
        if (pos < 0.0 || pos > 1.0 || neg < 0.0 || neg > 1.0)
            throw ConfigError("sentiment lexicon line " + std::to_string(line_no) +
                              ": scores must lie in [0,1]");
        entries.emplace_back(ascii_casefold(strip(parts[0])), std::make_pair(pos, neg));
    }
    return from_entries(std::move(entries));
}

SentimentLexicon SentimentLexicon::from_entries(
    std::vector<std::pair<std::string, std::pair<double, double>>> entries) {
    SentimentLexicon lex;
    for (auto& [word, scores] : entries) lex.scores_[std::move(word)] = scores;
    return lex;
}

EmoticonLexicon EmoticonLexicon::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open emoticon lexicon: " + file.string());
    EmoticonLexicon lex;
    std::vector<std::string>* section = nullptr;
    std::string line;
    while (std::getline(in, line)) {
        std::string tok = strip(line);
        if (tok.empty() || tok[0] == '#') continue;
        if (tok == "[happy]") {
            section = &lex.happy;
        } else if (tok == "[sad]") {
            section = &lex.sad;
        } else {
            if (section == nullptr)
                throw ConfigError("emoticon lexicon: token before any [happy]/[sad] section");
            section->push_back(tok);
        }
    }
    for (const auto& h : lex.happy)
        for (const auto& s : lex.sad)
            if (h == s) throw ConfigError("emoticon lexicon: '" + h + "' in both sections");
    return lex;
}

}  // namespace burstwatch::ingest
