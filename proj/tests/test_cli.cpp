#include <gtest/gtest.h>

#include <httplib.h>
#include <json.hpp>
#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

using json = nlohmann::ordered_json;

namespace {

struct Exec {
  int code = -1;
  std::string out;
};

Exec fpwb(const std::string& args, bool merge_stderr = false) {
  std::string cmd = std::string(FPWB_BINARY) + " " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
  Exec r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string read(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(Cli, AnalyzeCancellation) {
  Exec r = fpwb("analyze --expr 'x + 1 - x' --range x=1e10:1e20 --format json");
  ASSERT_EQ(r.code, 0) << r.out;
  json j = json::parse(r.out);
  double avg = j["report"]["average"];
  EXPECT_GT(avg, 20.0);
  EXPECT_LT(avg, 40.0);
  EXPECT_EQ(j["report"]["points"].size(), 256u);
}

TEST(Cli, AnalyzeJsonMatchesApiGolden) {
  Exec r = fpwb("analyze --expr 'log(x + sqrt(x * x + 1))' --range x=0:1e308 --seed 42 --format json");
  ASSERT_EQ(r.code, 0);
  json golden = json::parse(read(std::string(FPWB_GOLDEN_DIR) + "/asinh_errors_seed42.json"));
  EXPECT_EQ(json::parse(r.out)["report"], golden);
}

TEST(Cli, SeedFromEnvironment) {
  Exec a = fpwb("analyze --expr 'x + 1 - x' --range x=1e10:1e20 --points 16 --format csv");
  Exec b = fpwb("analyze --expr 'x + 1 - x' --range x=1e10:1e20 --points 16 --format csv --seed 42");
  Exec c = fpwb("analyze --expr 'x + 1 - x' --range x=1e10:1e20 --points 16 --format csv --seed 7");
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
  std::string env = "FPWB_SEED=7 ";
  std::string cmd = env + FPWB_BINARY + " analyze --expr 'x + 1 - x' --range x=1e10:1e20 --points 16 --format csv";
  FILE* p = popen(cmd.c_str(), "r");
  ASSERT_NE(p, nullptr);
  std::string out;
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) out.append(buf, n);
  pclose(p);
  EXPECT_EQ(out, c.out);
}

TEST(Cli, CsvCarriesHexColumns) {
  Exec r = fpwb("analyze --expr 'sqrt(x + 1) - sqrt(x)' --range x=1:1e15 --points 32 --format csv");
  ASSERT_EQ(r.code, 0);
  auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 33u);
  EXPECT_EQ(ls[0], "index,x,x_hex,exact,exact_hex,bits");
  EXPECT_NE(ls[1].find(",0x"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(fpwb("analyze --expr 'x + y' --range x=0:1").code, 2);
  Exec parse = fpwb("analyze --expr 'x +* 1' --range x=0:1", true);
  EXPECT_EQ(parse.code, 2);
  EXPECT_NE(parse.out.find("parse_error"), std::string::npos) << parse.out;
  EXPECT_EQ(fpwb("analyze --bogus").code, 2);
  EXPECT_EQ(fpwb("analyze --expr 'log(x)' --range x=-2:-1").code, 2);
  EXPECT_EQ(fpwb("--help").code, 0);
}

TEST(Cli, FpcoreFile) {
  auto path = std::filesystem::temp_directory_path() / "fpwb_cli_test.fpcore";
  std::ofstream(path) << "(FPCore (x) :pre (<= 1e10 x 1e20) (- (+ x 1) x))\n";
  Exec r = fpwb("analyze --fpcore " + path.string() + " --points 64 --format json");
  std::filesystem::remove(path);
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_GT(json::parse(r.out)["report"]["average"].get<double>(), 10.0);
}

TEST(Cli, Translate) {
  Exec r = fpwb("translate --from math --to fpcore 'log(x + sqrt(x*x+1))'");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "(FPCore (x) (log (+ x (sqrt (+ (* x x) 1)))))\n");
  Exec t = fpwb("translate --from math --to latex 'x / y'");
  EXPECT_EQ(t.out, "\\frac{x}{y}\n");
}

TEST(Cli, LocalErrorTable) {
  Exec r = fpwb("localerror --expr 'log(x + sqrt(x * x + 1))' --point x=1e200");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("sqrt"), std::string::npos);
  Exec j = fpwb("localerror --expr 'x + 1 - x' --point x=1e16 --format json");
  json tree = json::parse(j.out);
  EXPECT_EQ(tree["nodes"][tree["worst_node"].get<std::size_t>()]["op"], "-");
}

TEST(Cli, SuggestOnIdentity) {
  Exec r = fpwb("suggest --expr x --range x=0:1 --k 1 --points 32 --format json");
  ASSERT_EQ(r.code, 0) << r.out;
  json j = json::parse(r.out);
  ASSERT_TRUE(j.contains("candidates"));
  EXPECT_LE(j["candidates"].size(), 1u);
}

TEST(Cli, ServeAnswersHttp) {
  const int port = 18000 + static_cast<int>(std::chrono::steady_clock::now().time_since_epoch().count() % 1000);
  auto pidfile = std::filesystem::temp_directory_path() / "fpwb_serve_test.pid";
  std::string cmd = std::string(FPWB_BINARY) + " serve --port " + std::to_string(port) +
                    " >/dev/null 2>&1 & echo $! > " + pidfile.string();
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  std::string pid = read(pidfile.string());
  std::filesystem::remove(pidfile);

  httplib::Client cli("127.0.0.1", port);
  httplib::Result res;
  for (int i = 0; i < 100 && !res; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    res = cli.Get("/api/rules");
  }
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
  auto opt = cli.Options("/api/sessions");
  ASSERT_TRUE(opt);
  EXPECT_LT(opt->status, 300);
  auto created = cli.Post("/api/sessions", R"J({"math":"x + 1 - x","ranges":{"x":[1e10,1e20]},"n":64})J",
                          "application/json");
  ASSERT_TRUE(created);
  EXPECT_EQ(created->status, 201);
  EXPECT_EQ(cli.Get("/api/jobs/j99")->status, 404);
  EXPECT_EQ(std::system(("kill " + pid).c_str()), 0);
}
