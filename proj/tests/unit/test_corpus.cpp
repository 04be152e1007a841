// SPDX-License-Identifier: Apache-2.0
#include "synergy/codebook.hpp"
#include "synergy/corpus.hpp"
#include "synergy/csv.hpp"
#include "synergy/error.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

using namespace synergy;
using namespace synergy::corpus;

namespace {

const char* kHeader = "utterance_id,group_id,week,seq,speaker_id,text,code_human,code_pred\n";
const char* kGroupsHeader = "group_id,problem_type,composition,homogeneity,quality,n_members\n";

std::vector<Utterance> read_csv_text(const std::string& body) {
    std::istringstream in(body);
    return read_utterances_csv(in);
}

std::vector<GroupProfile> read_groups_text(const std::string& body) {
    std::istringstream in(body);
    return read_group_profiles(in);
}

Utterance make(std::string id, std::string group, int week, std::int64_t seq, std::optional<Code> human,
               std::optional<Code> pred = std::nullopt) {
    return Utterance{std::move(id), std::move(group), week, seq, "s", "text", human, pred};
}

template <class F>
ErrorKind kind_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected synergy::Error");
    return ErrorKind::InvalidArgument;
}

} // namespace

TEST_CASE("csv reader handles quotes, embedded newlines and BOM") {
    std::istringstream in("\xEF\xBB\xBF" "a,b\n\"x,1\",\"he said \"\"hi\"\"\"\n\n\"multi\nline\",z\n");
    auto recs = csv::read_all(in);
    REQUIRE(recs.size() == 3);
    CHECK(recs[0].fields == std::vector<std::string>{"a", "b"});
    CHECK(recs[1].fields == std::vector<std::string>{"x,1", "he said \"hi\""});
    CHECK(recs[2].fields[0] == "multi\nline");
    CHECK(recs[2].line == 4);
    CHECK(csv::escape("plain") == "plain");
    CHECK(csv::escape("a,b") == "\"a,b\"");
    CHECK(csv::escape("q\"") == "\"q\"\"\"");
}

TEST_CASE("parse_utterances: well-formed rows come back sorted") {
    auto us = read_csv_text(std::string(kHeader) +
                            "u3,G1,1,5,s1,later,W1,\n"
                            "u1,G1,0,0,s1,first,O1,O2\n"
                            "u2,G1,0,1,s2,\"second, with comma\",,\n");
    REQUIRE(us.size() == 3);
    CHECK(us[0].utterance_id == "u1");
    CHECK(us[1].utterance_id == "u2");
    CHECK(us[2].utterance_id == "u3");
    CHECK(us[0].code_pred == Code::O2);
    CHECK_FALSE(us[1].code_human.has_value());
    CHECK(us[1].text == "second, with comma");
}

TEST_CASE("parse_utterances: unknown code token") {
    try {
        read_csv_text(std::string(kHeader) + "u1,G1,0,0,s,t,X9,\n");
        FAIL("expected UnknownCode");
    } catch (const UnknownCode& e) {
        CHECK(e.token() == "X9");
    }
}

TEST_CASE("parse_utterances: week range 0-4") {
    CHECK(read_csv_text(std::string(kHeader) + "u1,G1,0,0,s,t,W1,\nu2,G1,4,1,s,t,W1,\n").size() == 2);
    try {
        read_csv_text(std::string(kHeader) + "u1,G1,0,0,s,t,W1,\nu2,G1,5,1,s,t,W1,\n");
        FAIL("expected MalformedRow");
    } catch (const MalformedRow& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("parse_utterances: duplicate ids, bad header, seq collisions") {
    CHECK(kind_of([] { read_csv_text(std::string(kHeader) + "u1,G1,0,0,s,t,,\nu1,G1,0,1,s,t,,\n"); }) ==
          ErrorKind::DuplicateId);
    CHECK(kind_of([] { read_csv_text("id,group\nu1,G1\n"); }) == ErrorKind::MalformedRow);
    CHECK(kind_of([] { read_csv_text(std::string(kHeader) + "u1,G1,0,3,s,t,,\nu2,G1,1,3,s,t,,\n"); }) ==
          ErrorKind::MalformedRow);
    CHECK(kind_of([] { read_csv_text(std::string(kHeader) + "u1,G1,0,0,s,t,,\n" + "u2,G1,zero,1,s,t,,\n"); }) ==
          ErrorKind::MalformedRow);
}

TEST_CASE("parse_utterances: jsonl matches csv") {
    const std::string jsonl =
        "{\"utterance_id\":\"u2\",\"group_id\":\"G1\",\"week\":0,\"seq\":1,\"speaker_id\":\"s\",\"text\":\"b\","
        "\"code_human\":\"S2\",\"code_pred\":null}\n"
        "{\"utterance_id\":\"u1\",\"group_id\":\"G1\",\"week\":0,\"seq\":0,\"speaker_id\":\"s\",\"text\":\"a\","
        "\"code_human\":\"C1\",\"code_pred\":\"\"}\n";
    std::istringstream in(jsonl);
    auto from_json = read_utterances_jsonl(in);
    auto from_csv = read_csv_text(std::string(kHeader) + "u2,G1,0,1,s,b,S2,\nu1,G1,0,0,s,a,C1,\n");
    CHECK(from_json == from_csv);

    std::istringstream bad("{\"utterance_id\":\"u1\"}\n");
    CHECK(kind_of([&] { read_utterances_jsonl(bad); }) == ErrorKind::MalformedRow);
}

TEST_CASE("utterances round-trip through csv") {
    auto us = read_csv_text(std::string(kHeader) + "u1,G1,0,0,s,\"a \"\"quoted\"\", text\nwith newline\",I,W3\n");
    std::ostringstream out;
    write_utterances_csv(out, us);
    CHECK(read_csv_text(out.str()) == us);
}

TEST_CASE("parse_group_profiles") {
    auto g = read_groups_text(std::string(kGroupsHeader) + "G3,SS,Industry-mixed,Hetero,Excellent,3\n");
    REQUIRE(g.size() == 1);
    CHECK(g[0].problem_type == ProblemType::SS);
    CHECK(g[0].n_members == 3);
    CHECK(g[0].homogeneity == Homogeneity::Hetero);

    try {
        read_groups_text(std::string(kGroupsHeader) + "G3,SS,x,Hetero,Amazing,3\n");
        FAIL("expected UnknownEnum");
    } catch (const UnknownEnum& e) {
        CHECK(e.field() == "quality");
        CHECK(e.token() == "Amazing");
    }
    CHECK(kind_of([] { read_groups_text(std::string(kGroupsHeader) + "G1,SS,x,Homo,Good,3\nG1,MS,x,Homo,Good,4\n"); }) ==
          ErrorKind::DuplicateGroup);
    CHECK(kind_of([] { read_groups_text(std::string(kGroupsHeader) + "G1,SS,x,Homo,Good,0\n"); }) ==
          ErrorKind::MalformedRow);

    // The table spells these "Hetero." and "Failed".
    auto alias = read_groups_text(std::string(kGroupsHeader) + "G1,SS,Industry-mixed,Hetero.,Failed,3\n");
    CHECK(alias[0].quality == Quality::Fail);
    CHECK(alias[0].homogeneity == Homogeneity::Hetero);
}

TEST_CASE("parse_group_profiles: the bundled twelve groups") {
    auto g = parse_group_profiles(testing::data_dir() / "demo" / "groups.csv");
    CHECK(g.size() == 12);
    int members = 0;
    for (const auto& p : g)
        members += p.n_members;
    CHECK(members == 52);
}

TEST_CASE("validate_corpus") {
    auto profiles = read_groups_text(std::string(kGroupsHeader) + "G1,SS,x,Homo,Good,3\nG2,MS,x,Homo,Good,4\n");
    std::vector<Utterance> us;
    for (int w = 0; w < 5; ++w) {
        us.push_back(make("a" + std::to_string(w), "G1", w, w, Code::W1));
        us.push_back(make("b" + std::to_string(w), "G2", w, w, Code::W1));
    }

    SUBCASE("fully consistent corpus") {
        auto r = validate_corpus(us, profiles);
        CHECK(r.warnings.empty());
        CHECK(r.clean());
        CHECK(r.coverage.utterances == 10);
        CHECK(r.coverage.with_human == 10);
        CHECK(r.coverage.with_pred == 0);
    }
    SUBCASE("orphan group") {
        us.push_back(make("z", "G99", 0, 0, Code::W1));
        auto r = validate_corpus(us, profiles);
        CHECK(r.orphan_groups == std::vector<std::string>{"G99"});
        CHECK_FALSE(r.clean());
    }
    SUBCASE("absent group-weeks are a note, not a warning") {
        us.erase(std::remove_if(us.begin(), us.end(),
                                [](const Utterance& u) { return u.group_id == "G2" && u.week <= 2; }),
                 us.end());
        auto r = validate_corpus(us, profiles);
        CHECK(r.clean());
        REQUIRE(r.absent_group_weeks.size() == 3);
        CHECK(r.absent_group_weeks[0] == GroupWeek{"G2", 0});
        CHECK(r.absent_group_weeks[2] == GroupWeek{"G2", 2});
        CHECK_FALSE(r.notes.empty());
    }
    SUBCASE("profiled group without utterances") {
        us.erase(std::remove_if(us.begin(), us.end(), [](const Utterance& u) { return u.group_id == "G2"; }),
                 us.end());
        auto r = validate_corpus(us, profiles);
        CHECK(r.empty_groups == std::vector<std::string>{"G2"});
    }
}

TEST_CASE("aggregate_metrics") {
    auto profiles = read_groups_text(std::string(kGroupsHeader) + "G1,SS,x,Homo,Good,4\n");

    SUBCASE("eight W2 utterances over four members") {
        std::vector<Utterance> us;
        for (int i = 0; i < 8; ++i)
            us.push_back(make("u" + std::to_string(i), "G1", 1, i, Code::W2));
        auto panel = aggregate_metrics(us, profiles);
        REQUIRE(panel.observations.size() == 1);
        CHECK(panel.observations[0].value(Code::W2) == 2.0);
        CHECK(panel.observations[0].value(Code::W1) == 0.0);
    }
    SUBCASE("I-only week is absent by default, zero-filled on request") {
        std::vector<Utterance> us{make("a", "G1", 0, 0, Code::W1), make("b", "G1", 1, 1, Code::I),
                                  make("c", "G1", 1, 2, Code::I)};
        auto panel = aggregate_metrics(us, profiles);
        REQUIRE(panel.observations.size() == 1);
        CHECK(panel.observations[0].week == 0);
        CHECK(panel.find("G1", 1) == nullptr);

        AggregateOptions fill;
        fill.zero_fill = true;
        auto filled = aggregate_metrics(us, profiles, fill);
        CHECK(filled.observations.size() == 5);
        for (int w = 1; w < 5; ++w) {
            const auto* o = filled.find("G1", w);
            REQUIRE(o != nullptr);
            for (double v : o->values)
                CHECK(v == 0.0);
        }
    }
    SUBCASE("missing code on the chosen source") {
        std::vector<Utterance> us{make("a", "G1", 0, 0, Code::W1, std::nullopt)};
        AggregateOptions pred;
        pred.code_source = CodeSource::Pred;
        try {
            aggregate_metrics(us, profiles, pred);
            FAIL("expected MissingCode");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::MissingCode);
            CHECK(std::string(e.what()).find("a") != std::string::npos);
        }
    }
    SUBCASE("per-member normalization needs a profile") {
        std::vector<Utterance> us{make("a", "G7", 0, 0, Code::W1)};
        CHECK(kind_of([&] { aggregate_metrics(us, profiles); }) == ErrorKind::UnknownGroup);
        AggregateOptions raw;
        raw.normalization = Normalization::RawCount;
        CHECK(aggregate_metrics(us, profiles, raw).observations.size() == 1);
    }
}

TEST_CASE("aggregate_metrics properties on a random corpus") {
    std::mt19937_64 rng(11);
    auto profiles = read_groups_text(std::string(kGroupsHeader) + "A,SS,x,Homo,Good,3\nB,MS,x,Hetero,Pass,7\n");
    std::vector<Utterance> us;
    std::uniform_int_distribution<int> code(0, 9), week(0, 4), group(0, 1);
    for (int i = 0; i < 400; ++i)
        us.push_back(make("u" + std::to_string(i), group(rng) ? "A" : "B", week(rng), i,
                          kAllCodes[static_cast<std::size_t>(code(rng))]));

    AggregateOptions raw_opt;
    raw_opt.normalization = Normalization::RawCount;
    const auto raw = aggregate_metrics(us, profiles, raw_opt);
    const auto per = aggregate_metrics(us, profiles);

    // Count identity: raw counts sum to the non-I utterances of the cell.
    for (const auto& o : raw.observations) {
        double sum = 0.0;
        for (double v : o.values)
            sum += v;
        const auto expected = std::count_if(us.begin(), us.end(), [&](const Utterance& u) {
            return u.group_id == o.group_id && u.week == o.week && *u.code_human != Code::I;
        });
        CHECK(sum == static_cast<double>(expected));
    }
    // per-member x n_members == raw
    REQUIRE(per.observations.size() == raw.observations.size());
    for (std::size_t i = 0; i < per.observations.size(); ++i) {
        const int n = find_profile(profiles, per.observations[i].group_id)->n_members;
        for (std::size_t j = 0; j < kTaskCodeCount; ++j)
            CHECK(per.observations[i].values[j] * n == doctest::Approx(raw.observations[i].values[j]).epsilon(1e-12));
    }
    // Input order never matters.
    auto shuffled = us;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto again = aggregate_metrics(shuffled, profiles);
    REQUIRE(again.observations.size() == per.observations.size());
    for (std::size_t i = 0; i < per.observations.size(); ++i) {
        CHECK(again.observations[i].group_id == per.observations[i].group_id);
        CHECK(again.observations[i].week == per.observations[i].week);
        CHECK(again.observations[i].values == per.observations[i].values);
    }
}

TEST_CASE("codebook") {
    const auto cb = Codebook::builtin();
    REQUIRE(cb.entries().size() == 10);
    CHECK(level_of(Code::O1) == Level::Operation);
    CHECK(level_of(Code::O2) == Level::Operation);
    CHECK(level_of(Code::W3) == Level::Wayfinding);
    CHECK(level_of(Code::S2) == Level::SenseMaking);
    CHECK(level_of(Code::C1) == Level::Creation);
    CHECK(level_of(Code::I) == Level::Irrelevant);
    CHECK(cb.entry(Code::S3).behavior_name.size() > 0);

    std::ostringstream out;
    cb.write_csv(out);
    std::istringstream in(out.str());
    CHECK(Codebook::read_csv(in) == cb);

    std::istringstream missing("code,level,behavior_name,description,example\nI,Irrelevant,x,y,z\n");
    CHECK(kind_of([&] { Codebook::read_csv(missing); }) == ErrorKind::MalformedRow);
    std::istringstream wrong_level("code,level,behavior_name,description,example\nW1,Creation,x,y,z\n");
    CHECK(kind_of([&] { Codebook::read_csv(wrong_level); }) == ErrorKind::MalformedRow);
}
