#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "qtk/cli.hpp"

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "qtk");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = qtk::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

/// Runs the installed binary through the shell and returns its exit status.
int run_binary(const std::string& args, std::string* output = nullptr) {
  const std::string cmd = std::string(QTK_BINARY) + " " + args + " 2>&1";
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) return -1;
  std::string text;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) text.append(buf, n);
  const int status = ::pclose(p);
  if (output) *output = text;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Cli, JonesExamples) {
  auto r = run({"jones", "-a", "2", "-b", "3", "-n", "2"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "-t^-18 + t^-10 + t^-6 + t^-2\n");
  EXPECT_EQ(run({"jones", "-a", "3", "-b", "4", "-n", "0"}).out, "0\n");
  EXPECT_EQ(run({"jones", "-a", "3", "-b", "4", "-n", "1"}).out, "1\n");
  EXPECT_EQ(run({"jones", "-a", "4", "-b", "6", "-n", "1"}).code, 2);
}

TEST(Cli, JonesRangeAndDegree) {
  auto r = run({"jones", "-a", "2", "-b", "5", "--n", "1..3", "--check-degree"});
  EXPECT_EQ(r.code, 0);
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 6u);
  EXPECT_EQ(ls[0], "n=1: 1");
  EXPECT_EQ(ls[3], "  lowest degree -30 = formula -30");
  auto j = run({"jones", "-a", "3", "-b", "4", "-n", "-2..-1", "--json", "--check-degree"});
  EXPECT_EQ(j.code, 0);
  for (const auto& l : lines(j.out)) EXPECT_EQ(nlohmann::json::parse(l)["status"], "pass");
}

TEST(Cli, VerifyAllGeneric) {
  auto r = run({"verify", "all", "-a", "3", "-b", "4", "--n", "1..20"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("15 checks, 0 failed"), std::string::npos);
}

TEST(Cli, VerifyJsonSchema) {
  auto r = run({"verify", "F", "-a", "3", "-b", "4", "--n", "1..20", "--json"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "{\"identity\":\"F\",\"status\":\"pass\",\"a\":3,\"b\":4,\"n_from\":1,\"n_to\":20}\n");
  auto all = run({"verify", "all", "-a", "2", "-b", "5", "--json"});
  EXPECT_EQ(all.code, 0);
  for (const auto& l : lines(all.out)) {
    const auto j = nlohmann::json::parse(l);
    for (const char* key : {"identity", "status", "a", "b", "n_from", "n_to"}) EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_EQ(j["status"], "pass");
  }
}

TEST(Cli, VerifyExitCodes) {
  EXPECT_EQ(run({"verify", "F", "-a", "4", "-b", "6"}).code, 2);
  EXPECT_EQ(run({"verify", "G", "-a", "3", "-b", "4"}).code, 2);
  EXPECT_EQ(run({"verify", "nonsense", "-a", "3", "-b", "4"}).code, 2);
  EXPECT_EQ(run({"verify", "F"}).code, 2);
  EXPECT_EQ(run({"verify", "F", "-a", "3", "-b", "4", "--n", "5..1"}).code, 2);
  EXPECT_EQ(run({"verify", "F", "--suite", "-a", "3", "-b", "4"}).code, 2);
}

TEST(Cli, VerifySuite) {
  auto r = run({"verify", "epsilon", "--suite"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("22 checks, 0 failed"), std::string::npos) << r.out;
  auto f = run({"verify", "F", "--suite", "--n", "1..8", "--workers", "3"});
  EXPECT_EQ(f.code, 0);
  EXPECT_NE(f.out.find("4 checks, 0 failed"), std::string::npos);
}

TEST(Cli, VerifyFullZWindow) {
  auto r = run({"verify", "PQ", "-a", "3", "-b", "4", "--n", "1..20", "--full-z", "--json"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(nlohmann::json::parse(r.out)["n_from"], 1);
  auto d = run({"verify", "R", "-a", "2", "-b", "3", "--json"});
  EXPECT_EQ(nlohmann::json::parse(d.out)["n_from"], 3);
}

TEST(Cli, ReduceExamples) {
  auto r = run({"reduce", "R", "-b", "3"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("= (L^-1*M^-3*(L-1)*(L*M^6+1))^2\n"), std::string::npos) << r.out;
  EXPECT_EQ(r.out.find("MISMATCH"), std::string::npos);
  auto f = run({"reduce", "F", "-a", "3", "-b", "4"});
  EXPECT_EQ(f.code, 0);
  EXPECT_NE(f.out.find("cofactor: M^-24*(M^3-M^-3)*(M^4-M^-4) = M^-31 - M^-25 - M^-23 + M^-17"),
            std::string::npos)
      << f.out;
  auto pq = run({"reduce", "PQ", "-a", "3", "-b", "4"});
  EXPECT_EQ(pq.code, 0);
  EXPECT_NE(pq.out.find(")^4"), std::string::npos);
  auto j = run({"reduce", "G", "-b", "5", "--json"});
  const auto parsed = nlohmann::json::parse(j.out);
  EXPECT_EQ(parsed["status"], "pass");
  EXPECT_EQ(parsed["cofactor_display"], "M^-10*(M^2-M^-2)");
  EXPECT_EQ(run({"reduce", "F", "-a", "2", "-b", "3"}).code, 2);
}

TEST(Cli, KernelTrefoil) {
  auto r = run({"kernel", "-a", "2", "-b", "3", "--L-deg", "1", "--M-deg", "12", "--t-window=-24..6", "--n-range",
                "1..50"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("dimension: 0\n"), std::string::npos);
  auto two = run({"kernel", "-a", "2", "-b", "3", "--L-deg", "2", "--M-deg", "11", "--t-window=-22..4", "--n-range",
                  "1..40"});
  EXPECT_EQ(two.code, 0);
  EXPECT_NE(two.out.find("dimension: 10\n"), std::string::npos);
  EXPECT_NE(two.out.find("contains G_{2,3} up to unit t^-2*M^8"), std::string::npos) << two.out;
}

TEST(Cli, KernelDeterministicAcrossRoutes) {
  std::vector<std::string> base{"kernel", "-a", "2", "-b", "3", "--L-deg", "2", "--M-deg", "11", "--t-window=-22..4",
                                "--n-range", "1..40", "--json"};
  auto with_route = [&](const char* route) {
    auto args = base;
    args.push_back("--route");
    args.push_back(route);
    auto j = nlohmann::json::parse(run(args).out);
    j.erase("route");
    return j.dump();
  };
  EXPECT_EQ(with_route("direct"), with_route("structured"));
  EXPECT_EQ(run(base).out, run(base).out);
}

TEST(Cli, KernelCap) {
  auto r = run({"kernel", "-a", "3", "-b", "4", "--L-deg", "3"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("cap of 20000"), std::string::npos) << r.err;
  auto small = run({"kernel", "-a", "2", "-b", "3", "--L-deg", "1", "--cap", "100"});
  EXPECT_EQ(small.code, 2);
  EXPECT_NE(small.err.find("cap of 100"), std::string::npos);
}

TEST(Cli, Help) {
  auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("kernel"), std::string::npos);
  EXPECT_EQ(run({}).code, 2);
}

TEST(Cli, BinaryExitCodes) {
  std::string out;
  EXPECT_EQ(run_binary("jones -a 2 -b 3 -n 2", &out), 0);
  EXPECT_EQ(out, "-t^-18 + t^-10 + t^-6 + t^-2\n");
  EXPECT_EQ(run_binary("verify F -a 4 -b 6"), 2);
  EXPECT_EQ(run_binary("verify recurrence2 -a 2 -b 7 --n 1..10"), 0);
  EXPECT_EQ(run_binary("kernel -a 2 -b 3 --L-deg 1", &out), 0);
  EXPECT_NE(out.find("dimension: 0"), std::string::npos);
  ::setenv("QTK_KERNEL_CAP", "500", 1);
  EXPECT_EQ(run_binary("kernel -a 2 -b 3 --L-deg 1", &out), 2);
  ::unsetenv("QTK_KERNEL_CAP");
  EXPECT_NE(out.find("cap of 500"), std::string::npos) << out;
}
