/*
 * Copyright (c) The webbot Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "support.hpp"
#include "webbot/ingest.hpp"

using namespace webbot;
using webbot::testing::request;

namespace {

const char* kCommon = R"(127.0.0.1 - - [10/Oct/2000:13:55:36 -0700] "GET /a.html HTTP/1.0" 200 2326)";

RawLogEntry with_agent(std::optional<std::string> ua) {
  RawLogEntry e;
  e.ip = "1.2.3.4";
  e.path = "/";
  e.user_agent = std::move(ua);
  return e;
}

std::vector<std::uint64_t> lengths(const std::vector<Session>& sessions) {
  std::vector<std::uint64_t> out;
  for (const auto& s : sessions) out.push_back(s.length);
  return out;
}

}  // namespace

TEST(ParseLogLine, CommonRecord) {
  auto e = parse_log_line(kCommon, LogFormat::Common);
  EXPECT_EQ(e.ip, "127.0.0.1");
  EXPECT_EQ(e.method, "GET");
  EXPECT_EQ(e.path, "/a.html");
  EXPECT_EQ(e.http_version, "HTTP/1.0");
  EXPECT_EQ(e.status, 200);
  EXPECT_EQ(e.response_size, 2326u);
  EXPECT_FALSE(e.user_agent);
  EXPECT_DOUBLE_EQ(e.timestamp, 971211336.0);  // 20:55:36 UTC
}

TEST(ParseLogLine, CombinedRecord) {
  auto e = parse_log_line(std::string(kCommon) + R"( "-" "Googlebot/2.1")", LogFormat::Combined);
  EXPECT_EQ(e.user_agent, "Googlebot/2.1");
  EXPECT_FALSE(e.referrer);
}

TEST(ParseLogLine, EscapedQuotesAndDashSize) {
  auto e = parse_log_line(
      R"(10.0.0.1 - - [01/Jan/2020:00:00:00 +0000] "GET /q?x=1 HTTP/1.1" 304 - "http://r/" "a \"quoted\" bot")",
      LogFormat::Combined);
  EXPECT_EQ(e.user_agent, R"(a "quoted" bot)");
  EXPECT_EQ(e.referrer, "http://r/");
  EXPECT_FALSE(e.response_size);
  EXPECT_DOUBLE_EQ(e.timestamp, 1577836800.0);
}

TEST(ParseLogLine, Errors) {
  EXPECT_ERROR_KIND(parse_log_line("garbage", LogFormat::Common), ErrorKind::MalformedLine);
  EXPECT_ERROR_KIND(parse_log_line(R"(1.1.1.1 - - [10/Foo/2000:13:55:36 -0700] "GET / HTTP/1.0" 200 1)",
                                   LogFormat::Common),
                    ErrorKind::BadTimestamp);
  EXPECT_ERROR_KIND(parse_log_line(R"(1.1.1.1 - - [10/Oct/2000:13:55:36 -0700] "GET / HTTP/1.0" 2x0 1)",
                                   LogFormat::Common),
                    ErrorKind::BadStatus);
  EXPECT_ERROR_KIND(parse_log_line(R"(1.1.1.1 - - [10/Oct/2000:13:55:36 -0700] "GET / HTTP/1.0" 700 1)",
                                   LogFormat::Common),
                    ErrorKind::BadStatus);
  EXPECT_ERROR_KIND(parse_log_line(kCommon, LogFormat::Combined), ErrorKind::MalformedLine);
}

TEST(NormalizePath, StripsQueryFragmentAndHost) {
  EXPECT_EQ(normalize_path("/a/b.html?x=1#top"), "/a/b.html");
  EXPECT_EQ(normalize_path("http://example.org/a/b"), "/a/b");
  EXPECT_EQ(normalize_path("http://example.org"), "/");
}

TEST(UserAgentDatabase, ParseAndMatch) {
  auto db = UserAgentDatabase::parse("# robots\n\nBot\n  spider \n");
  EXPECT_EQ(db.patterns().size(), 2u);
  EXPECT_TRUE(db.matches("Googlebot/2.1"));
  EXPECT_TRUE(db.matches("BaiduSPIDER"));
  EXPECT_FALSE(db.matches("Mozilla/5.0"));
  EXPECT_ERROR_KIND(UserAgentDatabase({}), ErrorKind::InvalidParams);
  EXPECT_ERROR_KIND(UserAgentDatabase({""}), ErrorKind::InvalidParams);
}

TEST(FilterRobots, Examples) {
  std::vector<RawLogEntry> entries{with_agent("Googlebot/2.1"), with_agent("Mozilla/5.0"),
                                   with_agent(std::nullopt)};
  auto kept = filter_robots(entries, UserAgentDatabase({"bot"}));
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].user_agent, "Googlebot/2.1");

  std::vector<RawLogEntry> lower{with_agent("googlebot")};
  EXPECT_EQ(filter_robots(lower, UserAgentDatabase({"BOT"})).size(), 1u);
  EXPECT_TRUE(filter_robots({}, UserAgentDatabase({"bot"})).empty());
}

TEST(FilterRobots, IdempotentAndOrderPreserving) {
  std::vector<RawLogEntry> entries;
  const char* agents[] = {"a-bot", "human", "crawler x", "b-bot", "Mozilla"};
  for (int i = 0; i < 20; ++i) {
    auto e = with_agent(agents[i % 5]);
    e.timestamp = i;
    entries.push_back(e);
  }
  UserAgentDatabase db({"bot", "crawler"});
  auto once = filter_robots(entries, db);
  auto twice = filter_robots(once, db);
  ASSERT_EQ(once.size(), 12u);
  ASSERT_EQ(twice.size(), once.size());
  for (std::size_t i = 0; i < once.size(); ++i) {
    EXPECT_EQ(twice[i].timestamp, once[i].timestamp);
    if (i > 0) {
      EXPECT_LT(once[i - 1].timestamp, once[i].timestamp);
    }
  }
}

TEST(AgentId, ModesSelectFields) {
  AgentId a("bot", "1.1.1.1", AgentMode::UserAgent);
  AgentId b("bot", "2.2.2.2", AgentMode::UserAgent);
  EXPECT_EQ(a, b);
  AgentId c("bot", "1.1.1.1", AgentMode::Ip);
  AgentId d("other", "1.1.1.1", AgentMode::Ip);
  EXPECT_EQ(c, d);
  AgentId e("bot", "1.1.1.1");
  AgentId f("bot", "2.2.2.2");
  EXPECT_NE(e, f);
  EXPECT_ERROR_KIND(AgentId(std::nullopt, std::nullopt), ErrorKind::InvalidParams);
}

TEST(ToRequests, SkipsEntriesMissingTheKey) {
  std::vector<RawLogEntry> entries{with_agent("bot"), with_agent(std::nullopt)};
  entries[0].path = "/a?b=c";
  auto ua = to_requests(entries, AgentMode::UserAgent);
  ASSERT_EQ(ua.size(), 1u);
  EXPECT_EQ(ua[0].path, "/a");
  EXPECT_EQ(to_requests(entries, AgentMode::Ip).size(), 2u);
}

TEST(Sessionize, Examples) {
  std::vector<Request> one{request("a", 0), request("a", 10), request("a", 100)};
  EXPECT_EQ(lengths(sessionize(one, 30)), (std::vector<std::uint64_t>{2, 1}));

  std::vector<Request> two{request("a", 0), request("b", 0), request("a", 5), request("b", 5)};
  auto s = sessionize(two, 30);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_NE(s[0].agent, s[1].agent);
  EXPECT_EQ(lengths(s), (std::vector<std::uint64_t>{2, 2}));

  std::vector<Request> boundary{request("a", 0), request("a", 30)};
  EXPECT_EQ(sessionize(boundary, 30).size(), 1u);

  EXPECT_ERROR_KIND(sessionize(one, 0), ErrorKind::NonPositiveTimeout);
  EXPECT_ERROR_KIND(sessionize(one, -1), ErrorKind::NonPositiveTimeout);
}

TEST(Sessionize, SortsOutOfOrderRequestsPerAgent) {
  std::vector<Request> reqs{request("a", 100, "/3"), request("a", 0, "/1"), request("a", 10, "/2")};
  auto s = sessionize(reqs, 30);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].requests[0].path, "/1");
  EXPECT_EQ(s[0].requests[1].path, "/2");
  EXPECT_DOUBLE_EQ(s[1].start_time, 100);
}

TEST(Sessionize, Properties) {
  Rng rng(5);
  std::vector<Request> reqs;
  for (int i = 0; i < 2000; ++i) {
    reqs.push_back(request("agent" + std::to_string(rng.next_u64() % 17), rng.uniform() * 1e5,
                           "/p" + std::to_string(rng.next_u64() % 50)));
  }
  std::map<std::string, int> agents;
  for (const auto& r : reqs) agents[r.agent.key()]++;

  auto unbounded = sessionize(reqs, kNoTimeout);
  EXPECT_EQ(unbounded.size(), agents.size());

  for (double t : {1.0, 60.0, 600.0, 1800.0, 86400.0, kNoTimeout}) {
    auto sessions = sessionize(reqs, t);
    std::uint64_t total = 0;
    for (const auto& s : sessions) {
      total += s.length;
      EXPECT_EQ(s.length, s.requests.size());
      for (std::size_t i = 1; i < s.requests.size(); ++i) {
        EXPECT_LE(s.requests[i].time - s.requests[i - 1].time, t);
      }
    }
    EXPECT_EQ(total, reqs.size());
    EXPECT_EQ(summarize(sessions).num_requests, reqs.size());
    for (std::size_t i = 1; i < sessions.size(); ++i) {
      EXPECT_LE(sessions[i - 1].start_time, sessions[i].start_time);
    }
  }
}

TEST(Summarize, CountsAndRatio) {
  std::vector<Request> reqs{
      {AgentId("bot", "1.1.1.1"), 0, "/a"},
      {AgentId("bot", "1.1.1.1"), 5, "/b"},
      {AgentId("bot", "2.2.2.2"), 1, "/a"},
      {AgentId("crawler", "2.2.2.2"), 3000, "/c"},
  };
  auto stats = summarize(sessionize(reqs, 1800));
  EXPECT_EQ(stats.num_requests, 4u);
  EXPECT_EQ(stats.num_sessions, 3u);
  EXPECT_EQ(stats.num_agents, 3u);
  EXPECT_EQ(stats.num_ips, 2u);
  EXPECT_EQ(stats.num_resources, 3u);
  EXPECT_DOUBLE_EQ(stats.avg_session_length, 4.0 / 3.0);

  auto empty = summarize({});
  EXPECT_EQ(empty.num_sessions, 0u);
  EXPECT_EQ(empty.avg_session_length, 0.0);
}

TEST(Summarize, ReferenceDatasetRatios) {
  EXPECT_NEAR(average_session_length(269516, 28583), 9.42, 0.02);
  EXPECT_NEAR(average_session_length(1790036, 51898), 34.49, 0.02);
}

TEST(Summarize, JsonHasAllFields) {
  auto text = to_json(SummaryStats{10, 4, 2, 2, 7, 2.5});
  for (const char* key : {"num_requests", "num_sessions", "num_agents", "num_ips", "num_resources",
                          "avg_session_length"}) {
    EXPECT_NE(text.find(key), std::string::npos) << key;
  }
}
