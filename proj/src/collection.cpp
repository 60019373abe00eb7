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

#include "sessim/collection.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace sessim {

using nlohmann::json;

ParseError::ParseError(std::string const& source, std::size_t line, std::string const& message)
    : std::runtime_error(line > 0 ? source + ":" + std::to_string(line) + ": " + message
                                  : source + ": " + message),
      line_(line)
{}

auto RelevanceGrade::judged(int grade) -> RelevanceGrade
{
    if (grade < 0) {
        throw std::invalid_argument("relevance grade must be >= 0");
    }
    RelevanceGrade g;
    g.grade_ = grade;
    return g;
}

Corpus::Corpus(std::vector<Document> documents) : documents_(std::move(documents))
{
    by_id_.reserve(documents_.size());
    for (std::size_t i = 0; i < documents_.size(); ++i) {
        auto const& id = documents_[i].doc_id;
        if (id.empty()) {
            throw std::invalid_argument("empty doc_id at position " + std::to_string(i));
        }
        if (!by_id_.emplace(id, i).second) {
            throw std::invalid_argument("duplicate doc_id '" + id + "'");
        }
    }
}

auto Corpus::find(std::string_view doc_id) const -> Document const*
{
    auto it = by_id_.find(std::string(doc_id));
    return it == by_id_.end() ? nullptr : &documents_[it->second];
}

QrelStore::QrelStore(std::vector<QrelEntry> entries) : entries_(std::move(entries))
{
    for (auto const& e : entries_) {
        if (e.grade < 0) {
            throw std::invalid_argument("negative grade for (" + e.topic_id + ", " + e.doc_id + ")");
        }
        if (!grades_[e.topic_id].emplace(e.doc_id, e.grade).second) {
            throw std::invalid_argument("duplicate qrel (" + e.topic_id + ", " + e.doc_id + ")");
        }
    }
}

auto QrelStore::grade(std::string_view topic_id, std::string_view doc_id) const -> RelevanceGrade
{
    auto topic = grades_.find(std::string(topic_id));
    if (topic == grades_.end()) {
        return RelevanceGrade::unjudged();
    }
    auto doc = topic->second.find(std::string(doc_id));
    if (doc == topic->second.end()) {
        return RelevanceGrade::unjudged();
    }
    return RelevanceGrade::judged(doc->second);
}

auto QrelStore::judgments(std::string_view topic_id) const -> std::vector<std::pair<std::string, int>>
{
    std::vector<std::pair<std::string, int>> out;
    for (auto const& e : entries_) {
        if (e.topic_id == topic_id) {
            out.emplace_back(e.doc_id, e.grade);
        }
    }
    return out;
}

namespace {

auto open_input(std::filesystem::path const& path) -> std::ifstream
{
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path.string(), 0, "cannot open file");
    }
    return in;
}

auto parse_object_line(std::string const& line, std::string const& source, std::size_t line_no) -> json
{
    json obj;
    try {
        obj = json::parse(line);
    } catch (json::parse_error const& e) {
        throw ParseError(source, line_no, std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object()) {
        throw ParseError(source, line_no, "expected a JSON object");
    }
    return obj;
}

auto required_string(json const& obj, char const* key, std::string const& source, std::size_t line_no)
    -> std::string
{
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) {
        throw ParseError(source, line_no, std::string("missing string field \"") + key + "\"");
    }
    return it->get<std::string>();
}

auto optional_string(json const& obj, char const* key, std::string const& source, std::size_t line_no)
    -> std::string
{
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        return {};
    }
    if (!it->is_string()) {
        throw ParseError(source, line_no, std::string("field \"") + key + "\" must be a string");
    }
    return it->get<std::string>();
}

auto is_blank(std::string const& line) -> bool
{
    return line.find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace

auto parse_corpus(std::istream& in, std::string const& source) -> Corpus
{
    std::vector<Document> docs;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) {
            continue;
        }
        auto obj = parse_object_line(line, source, line_no);
        Document doc{required_string(obj, "doc_id", source, line_no),
                     required_string(obj, "text", source, line_no)};
        if (doc.doc_id.empty()) {
            throw ParseError(source, line_no, "empty doc_id");
        }
        if (!seen.insert(doc.doc_id).second) {
            throw ParseError(source, line_no, "duplicate doc_id '" + doc.doc_id + "'");
        }
        docs.push_back(std::move(doc));
    }
    return Corpus(std::move(docs));
}

auto load_corpus(std::filesystem::path const& path) -> Corpus
{
    auto in = open_input(path);
    return parse_corpus(in, path.string());
}

void write_corpus(std::ostream& out, Corpus const& corpus)
{
    for (auto const& doc : corpus) {
        out << json{{"doc_id", doc.doc_id}, {"text", doc.text}}.dump() << '\n';
    }
}

auto parse_topics(std::istream& in, std::string const& source) -> std::vector<Topic>
{
    std::vector<Topic> topics;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) {
            continue;
        }
        auto obj = parse_object_line(line, source, line_no);
        Topic topic{required_string(obj, "topic_id", source, line_no),
                    required_string(obj, "title", source, line_no),
                    optional_string(obj, "description", source, line_no),
                    optional_string(obj, "narrative", source, line_no)};
        if (topic.topic_id.empty()) {
            throw ParseError(source, line_no, "empty topic_id");
        }
        if (topic.title.empty()) {
            throw ParseError(source, line_no, "empty title");
        }
        if (!seen.insert(topic.topic_id).second) {
            throw ParseError(source, line_no, "duplicate topic_id '" + topic.topic_id + "'");
        }
        topics.push_back(std::move(topic));
    }
    return topics;
}

auto load_topics(std::filesystem::path const& path) -> std::vector<Topic>
{
    auto in = open_input(path);
    return parse_topics(in, path.string());
}

void write_topics(std::ostream& out, std::vector<Topic> const& topics)
{
    for (auto const& t : topics) {
        out << json{{"topic_id", t.topic_id},
                    {"title", t.title},
                    {"description", t.description},
                    {"narrative", t.narrative}}
                   .dump()
            << '\n';
    }
}

auto parse_qrels(std::istream& in, std::string const& source) -> QrelStore
{
    std::vector<QrelEntry> entries;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) {
            continue;
        }
        std::istringstream fields(line);
        std::string topic_id, iteration, doc_id, grade_text, extra;
        if (!(fields >> topic_id >> iteration >> doc_id >> grade_text) || (fields >> extra)) {
            throw ParseError(source, line_no, "expected 4 columns: topic_id iteration doc_id grade");
        }
        int grade = 0;
        auto const* first = grade_text.data();
        auto const* last = first + grade_text.size();
        auto [ptr, ec] = std::from_chars(first, last, grade);
        if (ec != std::errc{} || ptr != last) {
            throw ParseError(source, line_no, "non-integer grade '" + grade_text + "'");
        }
        if (grade < 0) {
            throw ParseError(source, line_no, "negative grade " + grade_text);
        }
        if (!seen.insert(topic_id + '\x1f' + doc_id).second) {
            throw ParseError(source, line_no, "duplicate qrel (" + topic_id + ", " + doc_id + ")");
        }
        entries.push_back(QrelEntry{std::move(topic_id), std::move(doc_id), grade});
    }
    return QrelStore(std::move(entries));
}

auto load_qrels(std::filesystem::path const& path) -> QrelStore
{
    auto in = open_input(path);
    return parse_qrels(in, path.string());
}

void write_qrels(std::ostream& out, QrelStore const& qrels)
{
    for (auto const& e : qrels.entries()) {
        out << e.topic_id << " 0 " << e.doc_id << ' ' << e.grade << '\n';
    }
}

}  // namespace sessim
