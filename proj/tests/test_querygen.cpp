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

#include <set>
#include <sstream>

#include "sessim/index.hpp"
#include "sessim/querygen.hpp"
#include "sessim/text.hpp"
#include "test_support.hpp"

using namespace sessim;

namespace {

class ScriptedChat final : public ChatClient {
  public:
    explicit ScriptedChat(std::vector<std::string> replies) : replies_(std::move(replies)) {}
    auto complete(std::string const& prompt) -> std::string override
    {
        prompts.push_back(prompt);
        return replies_.at(std::min(prompts.size() - 1, replies_.size() - 1));
    }
    std::vector<std::string> prompts;

  private:
    std::vector<std::string> replies_;
};

/// Returns the document's own tokens as a single question.
class EchoD2Q final : public D2QProvider {
  public:
    auto generate(Document const& doc) -> std::vector<std::string> override { return {doc.text}; }
    [[nodiscard]] auto describe() const -> std::string override { return "echo"; }
};

auto drain(QueryGenerator& gen, std::size_t limit = 1000) -> std::vector<std::string>
{
    std::vector<std::string> out;
    while (out.size() < limit) {
        auto q = gen.next();
        if (!q) {
            break;
        }
        out.push_back(*q);
    }
    return out;
}

}  // namespace

TEST_CASE("strategy names round-trip")
{
    for (auto s : {Strategy::Gpt, Strategy::GptPlus, Strategy::GptStar, Strategy::GptStarStar, Strategy::D2Q,
                   Strategy::D2QPlus, Strategy::D2QPlusPlus}) {
        REQUIRE(parse_strategy(to_string(s)) == s);
    }
    REQUIRE(to_string(Strategy::GptStarStar) == "gpt**");
    REQUIRE_THROWS_AS(parse_strategy("gpt***"), std::invalid_argument);
}

TEST_CASE("prompt template")
{
    Topic topic{"1", "coral reef", "How do reefs bleach?", "Relevant documents explain bleaching."};
    REQUIRE(build_prompt(topic, false) == "Please generate one-hundred keyword queries about coral reef.");
    REQUIRE(build_prompt(topic, true) ==
            "Please generate one-hundred keyword queries about coral reef. How do reefs bleach? "
            "Relevant documents explain bleaching.");
    Topic bare{"2", "jazz", "", ""};
    REQUIRE(build_prompt(bare, true) == "Please generate one-hundred keyword queries about jazz.");
    REQUIRE_THROWS_AS(build_prompt(Topic{"3", "", "", ""}, false), std::invalid_argument);
}

TEST_CASE("LLM output parsing")
{
    REQUIRE(parse_llm_queries("1. coral reef\n2) \"reef bleaching\"\n- polyps\n* algae\n\n  3.   “warm water”  \n") ==
            std::vector<std::string>{"coral reef", "reef bleaching", "polyps", "algae", "warm water"});
    REQUIRE(parse_llm_queries("").empty());
    REQUIRE(parse_llm_queries("1.\n2.   \n").empty());
    REQUIRE(parse_llm_queries("2023 coral census") == std::vector<std::string>{"2023 coral census"});

    auto fixture = test::read_file(test::source_dir() / "tests" / "fixtures" / "llm_response_100.txt");
    auto queries = parse_llm_queries(fixture);
    REQUIRE(queries.size() == 100);
    for (auto const& q : queries) {
        REQUIRE(q.rfind("coral reef", 0) == 0);
        REQUIRE(q.back() != ' ');
    }
}

TEST_CASE("query pools")
{
    QueryPool pool("1");
    REQUIRE(pool.add("Coral Reef"));
    REQUIRE_FALSE(pool.add("coral   reef!"));
    REQUIRE_FALSE(pool.add("?!"));
    REQUIRE(pool.add("reef fish"));
    REQUIRE(pool.size() == 2);
    REQUIRE(pool.next() == "Coral Reef");
    REQUIRE(pool.cursor() == 1);
    REQUIRE(pool.next() == "reef fish");
    REQUIRE_FALSE(pool.next());

    PoolSet pools;
    pools["1"] = pool;
    QueryPool other("2");
    other.add("jazz");
    pools["2"] = other;
    std::stringstream buffer;
    write_pools(buffer, pools);
    auto parsed = parse_pools(buffer);
    REQUIRE(parsed.size() == 2);
    REQUIRE(parsed.at("1").queries() == pool.queries());

    std::istringstream shuffled("{\"topic_id\":\"1\",\"rank\":2,\"query\":\"b\"}\n"
                                "{\"topic_id\":\"1\",\"rank\":1,\"query\":\"a\"}\n");
    REQUIRE(parse_pools(shuffled).at("1").queries() == std::vector<std::string>{"a", "b"});
}

TEST_CASE("pool generation issues one prompt per round")
{
    Topic topic{"1", "coral reef", "desc", "narr"};
    ScriptedChat chat({"1. a\n2. b", "1. b\n2. c"});
    auto pool = generate_pool(topic, true, chat, 4);
    REQUIRE(chat.prompts.size() == 4);
    REQUIRE(chat.prompts[0] == build_prompt(topic, true));
    REQUIRE(pool.queries() == std::vector<std::string>{"a", "b", "c"});

    ScriptedChat empty({""});
    REQUIRE_THROWS_AS(generate_pool(topic, false, empty, 2), std::runtime_error);
}

TEST_CASE("vocabulary from a pool")
{
    QueryPool pool("1");
    pool.add("the coral reef");
    pool.add("reef and fish");
    REQUIRE(build_vocabulary(pool, Stopwords::english()) == std::vector<std::string>{"coral", "reef", "fish"});
}

TEST_CASE("fallback doc2query picks top tf-idf terms")
{
    Corpus corpus({{"a", "rare rare common common common"}, {"b", "common"}, {"c", "common other"}});
    auto index = InvertedIndex::build(corpus);
    FallbackD2QProvider provider(index, 2);
    auto questions = provider.generate(corpus[0]);
    REQUIRE(questions.size() == 2);
    REQUIRE(questions[0] == "rare");
    REQUIRE(provider.generate(Document{"x", ""}).empty());
}

TEST_CASE("term filter keeps frequent non-stopword terms")
{
    // 16 documents: "wide" occurs in 9 (normalized idf = ln(16/9)/ln(16) < 0.5),
    // "narrow" in 2 (> 0.5), "the" everywhere but is a stopword.
    std::vector<Document> docs;
    for (int i = 0; i < 16; ++i) {
        std::string text = "the";
        if (i < 9) {
            text += " wide";
        }
        if (i < 2) {
            text += " narrow";
        }
        docs.push_back({"d" + std::to_string(i), text});
    }
    auto index = InvertedIndex::build(Corpus(docs));
    TermFilter filter{&index, &Stopwords::english(), 0.5};
    REQUIRE(filter.accepts("wide"));
    REQUIRE_FALSE(filter.accepts("narrow"));
    REQUIRE_FALSE(filter.accepts("the"));
    REQUIRE_FALSE(filter.accepts("unseen"));

    EchoD2Q echo;
    REQUIRE(phi_terms(docs, echo, filter) == std::vector<std::string>{"wide"});

    Topic topic{"1", "wide", "the wide narrow", "wide"};
    REQUIRE(topic_terms(topic, filter) == std::vector<std::string>{"wide"});
}

TEST_CASE("pool generators skip duplicate queries")
{
    QueryPool pool("1");
    pool.add("a b");
    pool.add("c");
    auto gen = QueryGenerator::from_pool(Strategy::Gpt, pool);
    REQUIRE(drain(gen) == std::vector<std::string>{"a b", "c"});
    REQUIRE(gen.last_source() == QuerySource::Pool);
}

TEST_CASE("vocabulary generators expand the title seed")
{
    Topic topic{"1", "Coral Reef", "", ""};
    auto gen = QueryGenerator::from_vocabulary(Strategy::GptStar, topic, {"fish", "reef", "algae"});
    REQUIRE(drain(gen) == std::vector<std::string>{"coral reef fish", "coral reef reef", "coral reef algae"});
    REQUIRE(gen.last_term() == "algae");

    Rng rng(5);
    auto shuffled = QueryGenerator::from_vocabulary(Strategy::GptStarStar, topic, {"a", "b", "c", "d"},
                                                    {TermOrder::SeededRandom, &rng});
    auto out = drain(shuffled);
    REQUIRE(out.size() == 4);
    REQUIRE(std::set<std::string>(out.begin(), out.end()).size() == 4);
}

TEST_CASE("D2Q generators: seed first, then knowledge terms by precedence")
{
    std::vector<Document> docs;
    for (int i = 0; i < 16; ++i) {
        std::string text;
        text += i < 9 ? "alpha " : "";
        text += i < 10 ? "beta " : "";
        text += i < 11 ? "gamma " : "";
        text += i < 12 ? "delta" : "";
        docs.push_back({"d" + std::to_string(i), text});
    }
    auto index = InvertedIndex::build(Corpus(docs));
    TermFilter filter{&index, &Stopwords::english(), 0.5};
    EchoD2Q echo;
    Topic topic{"1", "topic", "delta", ""};

    Document seen_a{"s1", "alpha beta"};
    Document rel_g{"s2", "gamma"};
    std::vector<Document> seen{seen_a, rel_g};
    std::vector<Document> relevant{rel_g};

    SECTION("D2Q uses ks in insertion order")
    {
        auto gen = QueryGenerator::from_knowledge(Strategy::D2Q, KnowledgeState::for_topic(topic, Strategy::D2Q, filter));
        REQUIRE(gen.next() == "topic");
        REQUIRE(gen.last_source() == QuerySource::Seed);
        REQUIRE_FALSE(gen.next());
        gen.observe(seen, relevant, echo, filter);
        REQUIRE(drain(gen) == std::vector<std::string>{"topic alpha", "topic beta", "topic gamma"});
    }
    SECTION("D2Q+ prefers terms of relevant documents")
    {
        auto gen = QueryGenerator::from_knowledge(Strategy::D2QPlus,
                                                  KnowledgeState::for_topic(topic, Strategy::D2QPlus, filter));
        REQUIRE(gen.next() == "topic");
        gen.observe(seen, relevant, echo, filter);
        REQUIRE(gen.next() == "topic gamma");
        REQUIRE(gen.last_source() == QuerySource::RelevantKnowledge);
        REQUIRE(drain(gen) == std::vector<std::string>{"topic alpha", "topic beta"});
    }
    SECTION("D2Q++ starts with topic terms")
    {
        auto state = KnowledgeState::for_topic(topic, Strategy::D2QPlusPlus, filter);
        REQUIRE(state.topic_terms.terms() == std::vector<std::string>{"delta"});
        auto gen = QueryGenerator::from_knowledge(Strategy::D2QPlusPlus, state);
        gen.observe(seen, relevant, echo, filter);
        REQUIRE(drain(gen) == std::vector<std::string>{"topic", "topic delta", "topic gamma", "topic alpha",
                                                       "topic beta"});
    }
    SECTION("knowledge state update")
    {
        auto state = KnowledgeState::for_topic(topic, Strategy::D2Q, filter);
        REQUIRE(state.topic_terms.empty());
        update_knowledge_state(state, seen, relevant, echo, filter);
        REQUIRE(state.ks.terms() == std::vector<std::string>{"alpha", "beta", "gamma"});
        REQUIRE(state.ks_rel.terms() == std::vector<std::string>{"gamma"});
        REQUIRE(state.used.empty());
    }
}
