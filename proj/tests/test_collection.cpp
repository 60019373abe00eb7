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

#include <catch_amalgamated.hpp>

#include <sstream>

#include "sessim/collection.hpp"
#include "sessim/index.hpp"
#include "sessim/text.hpp"
#include "test_support.hpp"

using namespace sessim;

TEST_CASE("relevance grades distinguish judged zero from unjudged")
{
    auto zero = RelevanceGrade::judged(0);
    auto two = RelevanceGrade::judged(2);
    auto none = RelevanceGrade::unjudged();
    REQUIRE(zero.is_judged());
    REQUIRE_FALSE(zero.is_relevant());
    REQUIRE(two.is_relevant());
    REQUIRE(two.gain() == 2);
    REQUIRE_FALSE(none.is_judged());
    REQUIRE_FALSE(none.is_relevant());
    REQUIRE(none.gain() == 0);
    REQUIRE(zero != none);
    REQUIRE_THROWS_AS(RelevanceGrade::judged(-1), std::invalid_argument);
}

TEST_CASE("corpus parsing")
{
    SECTION("documents in file order, blank lines skipped")
    {
        std::istringstream in("{\"doc_id\": \"a\", \"text\": \"one two\"}\n\n{\"doc_id\": \"b\", \"text\": \"\"}\n");
        auto corpus = parse_corpus(in);
        REQUIRE(corpus.size() == 2);
        REQUIRE(corpus[0].doc_id == "a");
        REQUIRE(corpus.find("b")->text.empty());
        REQUIRE(corpus.find("c") == nullptr);
    }
    SECTION("malformed JSON reports the line")
    {
        std::istringstream in("{\"doc_id\": \"a\", \"text\": \"x\"}\n{oops\n");
        try {
            (void)parse_corpus(in, "c.jsonl");
            FAIL("expected ParseError");
        } catch (ParseError const& e) {
            REQUIRE(e.line() == 2);
            REQUIRE_THAT(e.what(), Catch::Matchers::StartsWith("c.jsonl:2:"));
        }
    }
    SECTION("duplicate ids and missing fields are rejected")
    {
        std::istringstream dup("{\"doc_id\": \"a\", \"text\": \"x\"}\n{\"doc_id\": \"a\", \"text\": \"y\"}\n");
        REQUIRE_THROWS_AS(parse_corpus(dup), ParseError);
        std::istringstream missing("{\"doc_id\": \"a\"}\n");
        REQUIRE_THROWS_AS(parse_corpus(missing), ParseError);
        std::istringstream wrong_type("{\"doc_id\": 3, \"text\": \"x\"}\n");
        REQUIRE_THROWS_AS(parse_corpus(wrong_type), ParseError);
    }
    SECTION("write and parse round-trip")
    {
        Corpus corpus({{"x", "héllo \"quoted\""}, {"y", "line\nbreak"}});
        std::stringstream buffer;
        write_corpus(buffer, corpus);
        REQUIRE(parse_corpus(buffer).documents() == corpus.documents());
    }
}

TEST_CASE("topic parsing")
{
    std::istringstream in(
        "{\"topic_id\": \"1\", \"title\": \"coral reef\", \"description\": \"d\", \"narrative\": \"n\"}\n"
        "{\"topic_id\": \"2\", \"title\": \"jazz\"}\n");
    auto topics = parse_topics(in);
    REQUIRE(topics.size() == 2);
    REQUIRE(topics[0] == Topic{"1", "coral reef", "d", "n"});
    REQUIRE(topics[1].description.empty());
    REQUIRE(topics[1].narrative.empty());

    std::istringstream no_title("{\"topic_id\": \"1\", \"title\": \"\"}\n");
    REQUIRE_THROWS_AS(parse_topics(no_title), ParseError);

    std::stringstream buffer;
    write_topics(buffer, topics);
    REQUIRE(parse_topics(buffer) == topics);
}

TEST_CASE("qrels parsing")
{
    SECTION("four whitespace-separated columns")
    {
        std::istringstream in("1 0 d1 2\n1 0 d2 0\n\n2\tQ0\td1\t1\n");
        auto qrels = parse_qrels(in);
        REQUIRE(qrels.entries().size() == 3);
        REQUIRE(qrels.grade("1", "d1") == RelevanceGrade::judged(2));
        REQUIRE(qrels.grade("1", "d2") == RelevanceGrade::judged(0));
        REQUIRE(qrels.grade("2", "d1") == RelevanceGrade::judged(1));
        REQUIRE_FALSE(qrels.grade("1", "d9").is_judged());
        REQUIRE_FALSE(qrels.grade("9", "d1").is_judged());
        REQUIRE(qrels.judgments("1") == std::vector<std::pair<std::string, int>>{{"d1", 2}, {"d2", 0}});
    }
    SECTION("errors carry line numbers")
    {
        auto line_of = [](std::string const& text) {
            std::istringstream in(text);
            try {
                (void)parse_qrels(in);
            } catch (ParseError const& e) {
                return e.line();
            }
            return std::size_t{0};
        };
        REQUIRE(line_of("1 0 d1 1\n1 0 d2\n") == 2);
        REQUIRE(line_of("1 0 d1 x\n") == 1);
        REQUIRE(line_of("1 0 d1 1.5\n") == 1);
        REQUIRE(line_of("1 0 d1 -1\n") == 1);
        REQUIRE(line_of("1 0 d1 1\n1 0 d1 2\n") == 2);
    }
    SECTION("round-trip")
    {
        QrelStore qrels({{"1", "a", 3}, {"1", "b", 0}, {"7", "a", 1}});
        std::stringstream buffer;
        write_qrels(buffer, qrels);
        REQUIRE(parse_qrels(buffer).entries() == qrels.entries());
    }
}

TEST_CASE("the bundled synthetic collection loads and is consistent")
{
    auto dir = test::synthetic_dir();
    auto corpus = load_corpus(dir / "corpus.jsonl");
    auto topics = load_topics(dir / "topics.jsonl");
    auto qrels = load_qrels(dir / "qrels.txt");
    REQUIRE(corpus.size() == 500);
    REQUIRE(topics.size() == 5);
    for (auto const& entry : qrels.entries()) {
        REQUIRE(corpus.find(entry.doc_id) != nullptr);
    }
    for (auto const& topic : topics) {
        auto judgments = qrels.judgments(topic.topic_id);
        auto relevant = std::count_if(judgments.begin(), judgments.end(), [](auto const& j) { return j.second > 0; });
        REQUIRE(relevant > 0);
        REQUIRE(static_cast<std::size_t>(relevant) < judgments.size());
    }
}

TEST_CASE("tokenizer")
{
    REQUIRE(tokenize("Coral-Reef bleaching, 2023!") == std::vector<std::string>{"coral", "reef", "bleaching", "2023"});
    REQUIRE(tokenize("  \t\n").empty());
    REQUIRE(tokenize("Café crème") == std::vector<std::string>{"café", "crème"});
    REQUIRE(normalize_query("  What IS  coral?") == "what is coral");
}

TEST_CASE("stopwords")
{
    auto const& english = Stopwords::english();
    REQUIRE(english.contains("the"));
    REQUIRE(english.contains("about"));
    REQUIRE_FALSE(english.contains("coral"));
    REQUIRE_THROWS_AS(Stopwords({"Upper"}), std::invalid_argument);
    REQUIRE_THROWS_AS(Stopwords({"two words"}), std::invalid_argument);

    test::TempDir dir("stopwords");
    test::write_file(dir.path() / "stop.txt", "# comment\nFoo\n\nbar\n");
    auto custom = load_stopwords(dir.path() / "stop.txt");
    REQUIRE(custom.size() == 2);
    REQUIRE(custom.contains("foo"));
}

TEST_CASE("inverted index statistics")
{
    Corpus corpus({{"a", "apple banana apple"}, {"b", "banana cherry"}, {"c", ""}});
    auto index = InvertedIndex::build(corpus);
    REQUIRE(index.num_docs() == 3);
    REQUIRE(index.avgdl() == Catch::Approx(5.0 / 3.0));
    REQUIRE(index.df("apple") == 1);
    REQUIRE(index.df("banana") == 2);
    REQUIRE(index.df("durian") == 0);
    REQUIRE(index.tf("apple", index.ordinal("a")) == 2);
    REQUIRE(index.tf("apple", index.ordinal("b")) == 0);
    REQUIRE(index.doc_len(index.ordinal("c")) == 0);
    REQUIRE(index.sorted_terms() == std::vector<std::string>{"apple", "banana", "cherry"});
    REQUIRE_THROWS_AS((void)index.ordinal("zzz"), std::out_of_range);

    auto postings = index.postings("banana");
    REQUIRE(postings.size() == 2);
    REQUIRE(postings[0].doc < postings[1].doc);
}

TEST_CASE("index snapshot round-trip, including ids with spaces")
{
    Corpus corpus({{"doc one", "alpha beta"}, {"doc\"2", "beta gamma gamma"}, {"d3", "Ünïcode alpha"}});
    auto index = InvertedIndex::build(corpus);
    test::TempDir dir("index");
    index.save(dir.path() / "index.txt");
    auto loaded = InvertedIndex::load(dir.path() / "index.txt");
    REQUIRE(loaded == index);

    test::write_file(dir.path() / "bad.txt", "not an index\n");
    REQUIRE_THROWS_AS(InvertedIndex::load(dir.path() / "bad.txt"), ParseError);
}

TEST_CASE("idf values")
{
    Corpus corpus({{"a", "x y"}, {"b", "x"}, {"c", "z"}, {"d", "x"}});
    auto index = InvertedIndex::build(corpus);
    auto x = idf(index, "x");
    // N = 4, df = 3.
    REQUIRE(x.raw == Catch::Approx(std::log(1.0 + 1.5 / 3.5)));
    REQUIRE(x.normalized == Catch::Approx(std::log(4.0 / 3.0) / std::log(4.0)));
    REQUIRE(idf(index, "y").normalized == Catch::Approx(1.0));
    REQUIRE(idf(index, "unseen").normalized == 1.0);
    REQUIRE(idf(index, "unseen").raw == Catch::Approx(std::log(1.0 + 4.5 / 0.5)));

    auto single = InvertedIndex::build(Corpus(std::vector<Document>{{"only", "word"}}));
    REQUIRE(idf(single, "word").normalized == 0.0);
    REQUIRE_THROWS_AS(idf(InvertedIndex{}, "x"), std::domain_error);
}

TEST_CASE("normalized idf stays in [0, 1] and decreases with df", "[property]")
{
    for (std::uint32_t seed = 0; seed < 20; ++seed) {
        auto corpus = test::random_corpus(30, seed);
        auto index = InvertedIndex::build(corpus);
        for (auto const& term : index.sorted_terms()) {
            auto a = idf(index, term);
            REQUIRE(a.normalized >= 0.0);
            REQUIRE(a.normalized <= 1.0);
            REQUIRE(a.raw > 0.0);
            for (auto const& other : index.sorted_terms()) {
                if (index.df(other) > index.df(term)) {
                    REQUIRE(idf(index, other).normalized <= a.normalized);
                }
            }
        }
    }
}
