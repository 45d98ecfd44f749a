#include <gtest/gtest.h>

#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include "fpwb/server.hpp"
#include "fpwb/wire.hpp"

using namespace fpwb;
using wire::json;

namespace {

const char* kNaive = "log(x + sqrt(x * x + 1))";

struct Api {
  Workbench bench;
  ApiRouter router{bench};

  json call(std::string_view method, std::string_view path, const json& body, int expect) {
    ApiResponse r = router.dispatch(method, path, body.is_null() ? "" : body.dump());
    EXPECT_EQ(r.status, expect) << method << " " << path << ": " << r.body;
    return json::parse(r.body);
  }
  json get(std::string_view path, int expect = 200) { return call("GET", path, nullptr, expect); }
  json post(std::string_view path, const json& body, int expect = 200) {
    return call("POST", path, body, expect);
  }
  std::string naive_session() {
    return post("/api/sessions",
                {{"math", kNaive}, {"ranges", {{"x", {0, "1e308"}}}}, {"n", 256}, {"seed", 42}},
                201)["session_id"];
  }
};

std::string golden_path() { return std::string(FPWB_GOLDEN_DIR) + "/asinh_errors_seed42.json"; }

std::string read(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

template <class F>
double seconds(F&& f) {
  auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

TEST(Api, CreateSessionReturnsTable) {
  Api api;
  json r = api.post("/api/sessions", {{"math", kNaive}, {"ranges", {{"x", {0, "1e308"}}}}}, 201);
  EXPECT_EQ(r["session_id"], "s1");
  ASSERT_EQ(r["table"]["candidates"].size(), 1u);
  const json& c = r["table"]["candidates"][0];
  EXPECT_EQ(c["math"], kNaive);
  EXPECT_EQ(c["provenance"], "user");
  EXPECT_GT(c["average"].get<double>(), 39.0);
  EXPECT_EQ(r["table"]["spec"]["vars"][0]["hi"], "0x7fe1ccf385ebc8a0");
}

TEST(Api, CreateFromFpcore) {
  Api api;
  json r = api.post("/api/sessions",
                    {{"fpcore", "(FPCore (x) :pre (<= 1e-300 x 1) (log (+ x (hypot 1 x))))"}}, 201);
  EXPECT_EQ(r["table"]["spec"]["vars"][0]["lo_text"], "1e-300");
}

TEST(Api, ErrorsHaveStableShape) {
  Api api;
  json e = api.post("/api/sessions", {{"math", "x + y"}, {"ranges", {{"x", {0, 1}}}}}, 400);
  EXPECT_EQ(e["error"]["code"], "invalid_range");
  EXPECT_TRUE(e["error"]["span"].is_null());
  json p = api.post("/api/sessions", {{"math", "x +* 2"}, {"ranges", {{"x", {0, 1}}}}}, 400);
  EXPECT_EQ(p["error"]["code"], "parse_error");
  EXPECT_EQ(p["error"]["span"]["offset"], 3);
  json u = api.post("/api/sessions", {{"fpcore", "(FPCore (x) (let ((y 1)) y))"}}, 400);
  EXPECT_EQ(u["error"]["code"], "unsupported_construct");
  json empty = api.post("/api/sessions", {{"math", "log(x)"}, {"ranges", {{"x", {-2, -1}}}}}, 422);
  EXPECT_EQ(empty["error"]["code"], "empty_sample");
  EXPECT_EQ(api.get("/api/jobs/j7", 404)["error"]["code"], "job_not_found");
  EXPECT_EQ(api.get("/api/nowhere", 404)["error"]["code"], "not_found");
  ApiResponse bad = api.router.dispatch("POST", "/api/sessions", "{not json");
  EXPECT_EQ(bad.status, 400);
  EXPECT_EQ(json::parse(bad.body)["error"]["code"], "bad_request");
}

TEST(Api, CandidatesAndTable) {
  Api api;
  std::string s = api.naive_session();
  json c = api.post("/api/sessions/" + s + "/candidates", {{"math", "log(x + hypot(1, x))"}}, 201);
  EXPECT_EQ(c["candidate"]["id"], 2);
  json body = api.post("/api/sessions/" + s + "/candidates",
                       {{"fpcore", "(log (+ x (hypot 1 x)))"}}, 201);
  EXPECT_EQ(body["candidate"]["duplicate_of"], 2);
  json unbound = api.post("/api/sessions/" + s + "/candidates", {{"math", "x + y"}}, 400);
  EXPECT_EQ(unbound["error"]["code"], "unbound_variable");
  json t = api.get("/api/sessions/" + s + "/table");
  EXPECT_EQ(t["candidates"].size(), 3u);
  json est = api.post("/api/sessions/" + s + "/estimate", {{"math", "log1p(x + x * (x / (hypot(1, x) + 1)))"}});
  EXPECT_LT(est["average"].get<double>(), 2.0);
  EXPECT_EQ(api.get("/api/sessions/" + s + "/table")["candidates"].size(), 3u);
}

TEST(Api, ErrorsMatchGoldenAndAreFast) {
  Api api;
  std::string s = api.naive_session();
  ApiResponse r;
  double t = seconds([&] { r = api.router.dispatch("GET", "/api/sessions/" + s + "/candidates/1/errors", ""); });
  ASSERT_EQ(r.status, 200);
  EXPECT_LT(t, 1.0);
  json j = json::parse(r.body);
  EXPECT_EQ(j["points"].size(), 256u);
  EXPECT_GE(j["average"].get<double>(), 39.0);
  EXPECT_LE(j["average"].get<double>(), 51.0);
  if (std::getenv("FPWB_UPDATE_GOLDEN")) {
    std::ofstream(golden_path()) << j.dump(1) << "\n";
  }
  EXPECT_EQ(j.dump(1) + "\n", read(golden_path()));
}

TEST(Api, LocalErrorAtAnyPoint) {
  Api api;
  std::string s = api.naive_session();
  json t;
  double secs = seconds([&] {
    t = api.post("/api/sessions/" + s + "/candidates/1/localerror", {{"point", {{"x", "1e200"}}}});
  });
  EXPECT_LT(secs, 1.0);
  std::string worst = t["nodes"][t["worst_node"].get<std::size_t>()]["op"];
  EXPECT_TRUE(worst == "sqrt" || worst == "*") << worst;
  json hex = api.post("/api/sessions/" + s + "/candidates/1/localerror",
                      {{"point", {{"x", "0x3ff0000000000000"}}}});
  EXPECT_EQ(hex["nodes"][2]["exact"], "0x3ff0000000000000");
  json neg = api.post("/api/sessions/" + s + "/candidates/1/localerror", {{"point", {{"x", "-1"}}}});
  EXPECT_EQ(neg["nodes"].size(), hex["nodes"].size());
}

TEST(Api, RangeVisibilityAndRegimes) {
  Api api;
  json r = api.post("/api/sessions",
                    {{"math", "(exp(x) - 2) + exp(-x)"}, {"ranges", {{"x", {-20, 20}}}}}, 201);
  std::string s = r["session_id"];
  std::string key = r["table"]["sample"]["spec_key"];
  api.post("/api/sessions/" + s + "/candidates", {{"math", "pow(sqrt(expm1(x)), 4) * exp(-x)"}}, 201);
  api.post("/api/sessions/" + s + "/candidates", {{"math", "pow(sqrt(-expm1(x)), 4) * exp(-x)"}}, 201);
  json comb = api.post("/api/sessions/" + s + "/regimes", {{"candidates", {2, 3}}, {"var", "x"}});
  EXPECT_EQ(comb["candidate"]["provenance"], "combined");
  EXPECT_LT(comb["candidate"]["average"].get<double>(), 1.0);

  json hidden = api.post("/api/sessions/" + s + "/candidates/2/visibility", {{"visible", false}});
  EXPECT_EQ(hidden["candidate"]["visible"], false);
  json t = api.post("/api/sessions/" + s + "/range", {{"ranges", {{"x", {-1, 1}}}}});
  EXPECT_NE(t["table"]["sample"]["spec_key"], key);
  EXPECT_EQ(t["table"]["candidates"][1]["stale"], true);
  EXPECT_EQ(t["table"]["candidates"][0]["stale"], false);
  json back = api.post("/api/sessions/" + s + "/range", {{"ranges", {{"x", {-20, 20}}}}});
  EXPECT_EQ(back["table"]["sample"]["spec_key"], key);
}

TEST(Api, SuggestJobsPoll) {
  Api api;
  std::string s = api.naive_session();
  json j = api.post("/api/sessions/" + s + "/suggest", {{"start_cid", 1}}, 202);
  std::string id = j["job_id"];
  json st;
  for (int i = 0; i < 400; ++i) {
    st = api.get("/api/jobs/" + id);
    if (st["status"] != "queued" && st["status"] != "running") break;
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  ASSERT_EQ(st["status"], "done");
  EXPECT_GE(st["results"].size(), 1u);
  EXPECT_LE(st["results"].size(), 5u);
  EXPECT_EQ(api.get("/api/sessions/" + s + "/table")["candidates"].size(), 1 + st["results"].size());
  json cancel = api.post("/api/jobs/" + id + "/cancel", nullptr);
  EXPECT_EQ(cancel["status"], "done");
}

TEST(Api, SuggestDoesNotBlock) {
  Api api;
  std::string s = api.naive_session();
  double t = seconds([&] { api.post("/api/sessions/" + s + "/suggest", {{"start_cid", 1}}, 202); });
  EXPECT_LT(t, 0.1);
  t = seconds([&] { api.get("/api/sessions/" + s + "/table"); });
  EXPECT_LT(t, 1.0);
}

TEST(Api, Translate) {
  Api api;
  json r = api.post("/api/translate", {{"direction", "math->fpcore"}, {"text", "log(x + sqrt(x*x+1))"}});
  EXPECT_EQ(r["text"], "(FPCore (x) (log (+ x (sqrt (+ (* x x) 1)))))");
  json back = api.post("/api/translate", {{"from", "fpcore"}, {"to", "math"}, {"text", r["text"]}});
  EXPECT_EQ(back["text"], "log(x + sqrt(x * x + 1))");
  json tex = api.post("/api/translate", {{"direction", "math\xE2\x86\x92latex"}, {"text", "sqrt(x)"}});
  EXPECT_EQ(tex["text"], "\\sqrt{x}");
}

TEST(Api, Rules) {
  Api api;
  json r = api.get("/api/rules");
  EXPECT_GE(r["rules"].size(), 50u);
}

TEST(Api, WireDeterminism) {
  auto run = [] {
    Api api;
    std::string out;
    std::string s = api.naive_session();
    for (auto [m, p, b] : std::vector<std::tuple<std::string, std::string, std::string>>{
             {"GET", "/api/sessions/" + s + "/table", ""},
             {"POST", "/api/sessions/" + s + "/candidates", R"J({"math":"log(x + hypot(1, x))"})J"},
             {"GET", "/api/sessions/" + s + "/candidates/2/errors", ""},
             {"POST", "/api/sessions/" + s + "/candidates/1/localerror", R"J({"point":{"x":"1e-10"}})J"},
             {"POST", "/api/sessions/" + s + "/range", R"J({"ranges":{"x":["1e-52","1e12"]}})J"}}) {
      out += api.router.dispatch(m, p, b).body;
    }
    return out;
  };
  EXPECT_EQ(run(), run());
}
