// Copyright 2026 sessim developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sessim/text.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "sessim/collection.hpp"

namespace sessim {

namespace {

constexpr auto is_term_char(unsigned char c) noexcept -> bool
{
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

constexpr auto to_lower(unsigned char c) noexcept -> char
{
    return static_cast<char>((c >= 'A' && c <= 'Z') ? c + ('a' - 'A') : c);
}

// Standard English stopword list (SMART-derived subset).
constexpr std::string_view kEnglishStopwords[] = {
    "a", "about", "above", "across", "after", "afterwards", "again", "against", "all", "almost",
    "alone", "along", "already", "also", "although", "always", "am", "among", "amongst", "an",
    "and", "another", "any", "anyhow", "anyone", "anything", "anyway", "anywhere", "are",
    "around", "as", "at", "back", "be", "became", "because", "become", "becomes", "becoming",
    "been", "before", "beforehand", "behind", "being", "below", "beside", "besides", "between",
    "beyond", "both", "but", "by", "can", "cannot", "could", "did", "do", "does", "doing",
    "done", "down", "due", "during", "each", "either", "else", "elsewhere", "enough", "etc",
    "even", "ever", "every", "everyone", "everything", "everywhere", "except", "few", "first",
    "for", "former", "formerly", "from", "further", "had", "has", "have", "having", "he",
    "hence", "her", "here", "hereafter", "hereby", "herein", "hereupon", "hers", "herself",
    "him", "himself", "his", "how", "however", "i", "ie", "if", "in", "indeed", "into", "is",
    "it", "its", "itself", "just", "last", "latter", "latterly", "least", "less", "made",
    "many", "may", "me", "meanwhile", "might", "mine", "more", "moreover", "most", "mostly",
    "much", "must", "my", "myself", "namely", "neither", "never", "nevertheless", "next", "no",
    "nobody", "none", "noone", "nor", "not", "nothing", "now", "nowhere", "of", "off", "often",
    "on", "once", "one", "only", "onto", "or", "other", "others", "otherwise", "our", "ours",
    "ourselves", "out", "over", "own", "per", "perhaps", "please", "put", "rather", "re",
    "really", "regarding", "same", "say", "says", "said", "see", "seem", "seemed", "seeming",
    "seems", "several", "she", "should", "since", "so", "some", "somehow", "someone",
    "something", "sometime", "sometimes", "somewhere", "still", "such", "than", "that", "the",
    "their", "theirs", "them", "themselves", "then", "thence", "there", "thereafter",
    "thereby", "therefore", "therein", "thereupon", "these", "they", "this", "those",
    "though", "through", "throughout", "thru", "thus", "to", "together", "too", "toward",
    "towards", "under", "unless", "until", "up", "upon", "us", "very", "via", "was", "we",
    "well", "were", "what", "whatever", "when", "whence", "whenever", "where", "whereafter",
    "whereas", "whereby", "wherein", "whereupon", "wherever", "whether", "which", "while",
    "whither", "who", "whoever", "whole", "whom", "whose", "why", "will", "with", "within",
    "without", "would", "yet", "you", "your", "yours", "yourself", "yourselves", "able",
    "according", "actually", "ago", "ah", "ahead", "allow", "allows", "already", "anybody",
    "apart", "appear", "aren", "aside", "ask", "asking", "away", "came", "certain", "certainly",
    "clearly", "come", "comes", "consider", "contain", "containing", "contains", "couldn",
    "despite", "didn", "different", "doesn", "don", "each", "eg", "entirely", "especially",
    "exactly", "far", "followed", "following", "follows", "get", "gets", "getting", "given",
    "gives", "go", "goes", "going", "gone", "got", "hadn", "hasn", "haven", "hi", "isn",
    "keep", "keeps", "kept", "know", "known", "knows", "lately", "later", "let", "like",
    "likely", "little", "look", "looking", "looks", "mainly", "maybe", "mean", "merely",
    "need", "needs", "new", "nearly", "obviously", "oh", "ok", "okay", "old", "ones",
    "particularly", "plus", "possible", "probably", "provides", "quite", "rd", "reasonably",
    "relatively", "right", "saw", "second", "secondly", "seen", "self", "selves", "sent",
    "seriously", "shall", "shouldn", "specified", "specify", "sure", "take", "taken", "tell",
    "tends", "th", "thank", "thanks", "thats", "theres", "think", "third", "thorough",
    "thoroughly", "three", "took", "tried", "tries", "truly", "try", "trying", "twice", "two",
    "unfortunately", "unlikely", "use", "used", "useful", "uses", "using", "usually", "value",
    "various", "want", "wants", "wasn", "way", "welcome", "went", "weren", "won", "wonder",
    "wouldn", "yes", "zero", "s", "t", "d", "ll", "m", "ve", "y"};

}  // namespace

auto tokenize(std::string_view text) -> std::vector<std::string>
{
    std::vector<std::string> terms;
    std::string current;
    for (char ch : text) {
        auto c = static_cast<unsigned char>(ch);
        if (is_term_char(c)) {
            current.push_back(to_lower(c));
        } else if (!current.empty()) {
            terms.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        terms.push_back(std::move(current));
    }
    return terms;
}

auto join_terms(std::vector<std::string> const& terms) -> std::string
{
    std::string joined;
    for (auto const& term : terms) {
        if (!joined.empty()) {
            joined.push_back(' ');
        }
        joined += term;
    }
    return joined;
}

Stopwords::Stopwords(std::vector<std::string> const& terms)
{
    for (auto const& term : terms) {
        if (term.empty()) {
            throw std::invalid_argument("empty stopword");
        }
        for (char ch : term) {
            auto c = static_cast<unsigned char>(ch);
            if (c <= ' ' || (c >= 'A' && c <= 'Z')) {
                throw std::invalid_argument("stopword must be lowercase without whitespace: '" + term + "'");
            }
        }
        terms_.insert(term);
    }
}

auto Stopwords::english() -> Stopwords const&
{
    static Stopwords const list = [] {
        std::vector<std::string> terms(std::begin(kEnglishStopwords), std::end(kEnglishStopwords));
        return Stopwords(terms);
    }();
    return list;
}

auto Stopwords::contains(std::string_view term) const -> bool
{
    return terms_.contains(std::string(term));
}

auto load_stopwords(std::filesystem::path const& path) -> Stopwords
{
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path.string(), 0, "cannot open stopword file");
    }
    std::vector<std::string> terms;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        auto last = line.find_last_not_of(" \t\r");
        auto term = line.substr(first, last - first + 1);
        std::transform(term.begin(), term.end(), term.begin(), [](unsigned char c) { return to_lower(c); });
        if (term.find_first_of(" \t") != std::string::npos) {
            throw ParseError(path.string(), line_no, "stopword contains whitespace");
        }
        terms.push_back(std::move(term));
    }
    return Stopwords(terms);
}

}  // namespace sessim
