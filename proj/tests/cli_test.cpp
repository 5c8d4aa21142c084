#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "bpw/cli.hpp"

namespace bpw {
namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const std::string name = ::testing::UnitTest::GetInstance()->current_test_info()->name();
    dir_ = fs::temp_directory_path() / ("bpw_cli_" + name);
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run(const std::vector<std::string>& args, const cli::Context& ctx = {}) {
    out_.str("");
    err_.str("");
    return cli::run_cli(args, out_, err_, ctx);
  }

  std::string out() const { return out_.str(); }
  std::string err() const { return err_.str(); }

 private:
  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST_F(Cli, GenPasswordExample) {
  const auto p = path("p.bpw");
  ASSERT_EQ(run({"gen", "--family", "password", "--w", "5", "--n", "100", "--seed", "7", "--out", p}), 0) << err();
  const Program prog = load_program(p);
  EXPECT_EQ(prog.header.a, 5u);
  EXPECT_EQ(prog.header.b, 1u);
  EXPECT_NE(out().find("n=100"), std::string::npos);

  const auto q = path("q.bpw");
  ASSERT_EQ(run({"gen", "--family", "password", "--w", "5", "--n", "100", "--seed", "7", "--out", q}), 0);
  EXPECT_EQ(read_file(p), read_file(q));
}

TEST_F(Cli, GenErrors) {
  EXPECT_EQ(run({"gen", "--family", "password", "--n", "100"}), 2);
  EXPECT_NE(err().find("--w"), std::string::npos);
  EXPECT_NE(err().find("Usage"), std::string::npos);
  EXPECT_EQ(run({"gen", "--family", "random_nand", "--w", "50", "--n", "10000", "--d", "1/75", "--out", path("x")}), 2);
  EXPECT_EQ(run({"gen", "--family", "circuit", "--w", "5", "--n", "100"}), 2);
  EXPECT_EQ(run({"gen", "--family", "password", "--w", "5", "--n", "100", "--out", path("missing/dir/p.bpw")}), 1);
}

TEST_F(Cli, GenReportsActualN) {
  ASSERT_EQ(run({"gen", "--family", "random_nand", "--w", "50", "--n", "1000000", "--d", "1/50", "--out", path("r.bpw")}), 0);
  EXPECT_NE(out().find("n=1000008"), std::string::npos) << out();
}

TEST_F(Cli, SeedFromEnvironment) {
  const auto a = path("a.bpw"), b = path("b.bpw");
  ASSERT_EQ(setenv("BPW_SEED", "9", 1), 0);
  const int rc = run({"gen", "--family", "random_nand", "--w", "8", "--n", "2000", "--out", a});
  unsetenv("BPW_SEED");
  ASSERT_EQ(rc, 0);
  ASSERT_EQ(run({"gen", "--family", "random_nand", "--w", "8", "--n", "2000", "--seed", "9", "--out", b}), 0);
  EXPECT_EQ(read_file(a), read_file(b));
}

TEST_F(Cli, Validate) {
  const auto p = path("g.bpw");
  ASSERT_EQ(run({"gen", "--family", "random_nand", "--w", "16", "--n", "5000", "--d", "32", "--out", p}), 0);
  EXPECT_EQ(run({"validate", p, "--strict"}), 0);
  EXPECT_NE(out().find("ok"), std::string::npos);

  auto bytes = read_file(p);
  bytes[0] = 'X';
  write_file(path("bad.bpw"), bytes);
  EXPECT_EQ(run({"validate", path("bad.bpw")}), 2);
  EXPECT_NE(err().find("BadMagic"), std::string::npos);

  // Two COPYs two instructions apart.
  std::vector<Instruction> body(4, Instruction::gate(GateKind::NOT, 0));
  body.push_back(Instruction::copy(4, 1, 0));
  body.push_back(Instruction::gate(GateKind::NOT, 0));
  body.push_back(Instruction::copy(4, 1, 1));
  for (int i = 0; i < 3; ++i) body.push_back(Instruction::gate(GateKind::NOT, 0));
  save_program(path("r1.bpw"), make_program(4, 0, 1, body));
  EXPECT_EQ(run({"validate", path("r1.bpw")}), 1);
  EXPECT_NE(out().find("R1"), std::string::npos);

  // Incomplete last level: warning by default, error under --strict.
  save_program(path("r5.bpw"), make_program(4, 0, 1, std::vector<Instruction>(6, Instruction::gate(GateKind::NOT, 0))));
  EXPECT_EQ(run({"validate", path("r5.bpw")}), 0);
  EXPECT_NE(out().find("warning"), std::string::npos);
  EXPECT_EQ(run({"validate", path("r5.bpw"), "--strict"}), 1);
  EXPECT_EQ(run({"validate", path("absent.bpw")}), 1);
}

TEST_F(Cli, RunPassword) {
  const auto p = path("p.bpw");
  ASSERT_EQ(run({"gen", "--family", "password", "--w", "5", "--n", "100", "--out", p}), 0);
  EXPECT_EQ(run({"run", p, "--input", "15"}), 0);
  EXPECT_EQ(out(), "1\n");
  EXPECT_EQ(run({"run", p, "--input", "0x15", "--evaluator", "bitpacked", "--oracle"}), 0);
  EXPECT_EQ(out(), "1\noracle: agree\n");
  EXPECT_EQ(run({"run", p, "--input", "14"}), 0);
  EXPECT_EQ(out(), "0\n");
  write_file(path("in.bin"), std::vector<std::uint8_t>{0x15});
  EXPECT_EQ(run({"run", p, "--input-file", path("in.bin")}), 0);
  EXPECT_EQ(out(), "1\n");
}

TEST_F(Cli, RunEvaluatorsPrintTheSame) {
  const auto p = path("r.bpw");
  ASSERT_EQ(run({"gen", "--family", "random_nand", "--w", "40", "--n", "30000", "--d", "80", "--out", p}), 0);
  const std::string input = "3a5f00c1d2";
  ASSERT_EQ(run({"run", p, "--input", input, "--evaluator", "bytewise"}), 0);
  const std::string bytewise = out();
  ASSERT_EQ(run({"run", p, "--input", input, "--evaluator", "bitpacked", "--oracle"}), 0);
  EXPECT_EQ(out(), bytewise + "oracle: agree\n");
  EXPECT_EQ(bytewise.size(), 10u + 1u);  // 40 output bits
}

TEST_F(Cli, RunOracleMismatch) {
  const auto p = path("p.bpw");
  ASSERT_EQ(run({"gen", "--family", "password", "--w", "8", "--n", "200", "--out", p}), 0);
  cli::Context broken;
  broken.evaluator = [](const Program& prog, const Bits& in, EvaluatorKind k) {
    Bits out = bpw::run(prog, in, k).outputs;
    out[0] ^= 1;
    return out;
  };
  EXPECT_EQ(run({"run", p, "--input", "55", "--oracle"}, broken), 1);
  EXPECT_NE(out().find("MISMATCH"), std::string::npos);
  EXPECT_NE(out().find("bit 0: 0 vs 1"), std::string::npos) << out();
}

TEST_F(Cli, RunErrors) {
  const auto p = path("p.bpw");
  ASSERT_EQ(run({"gen", "--family", "password", "--w", "5", "--n", "100", "--out", p}), 0);
  EXPECT_EQ(run({"run", p}), 2);                      // no input
  EXPECT_EQ(run({"run", p, "--input", "ff"}), 2);     // more than 5 bits
  EXPECT_EQ(run({"run", p, "--input", "1", "--evaluator", "gpu"}), 2);
  save_program(path("locked.bpw"), make_program(4, 0, 1, std::vector<Instruction>(4, Instruction::gate(GateKind::NOT, 8))));
  EXPECT_EQ(run({"run", path("locked.bpw")}), 1);
  EXPECT_NE(err().find("LockedRegisterRead"), std::string::npos);
}

TEST_F(Cli, Dump) {
  const auto p = path("p.bpw");
  ASSERT_EQ(run({"gen", "--family", "password", "--w", "5", "--n", "100", "--out", p}), 0);
  ASSERT_EQ(run({"dump", p, "--limit", "3"}), 0);
  EXPECT_EQ(out(), "0 L0 NOT 0\n1 L0 NOT 1\n2 L0 NOT 2\n");
  ASSERT_EQ(run({"dump", p}), 0);
  const std::string text = out();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 100);
}

TEST_F(Cli, Grid) {
  ASSERT_EQ(run({"grid", "--scale-cap", "10000000"}), 0);
  const GridSpec g = grid_from_json(out());
  EXPECT_EQ(g.widths, GridSpec::full_default().widths);
  EXPECT_EQ(g.scale_cap, 10'000'000u);
  ASSERT_EQ(run({"grid", "--density-rule", "max", "--out", path("g.json")}), 0);
  EXPECT_EQ(grid_from_json(read_text(path("g.json"))).density_rule, DensityRule::WidthOnly);
}

TEST_F(Cli, BenchRowCount) {
  write_text(path("desk.json"), R"({"widths": [5, 20], "sizes": [400, 2000], "density_rule": "eq3"})");
  GridSpec g = grid_from_json(read_text(path("desk.json")));
  const std::size_t cells = parameter_grid(g).size();
  ASSERT_EQ(run({"bench", "--grid", path("desk.json"), "--repeats", "3", "--out", path("r.csv")}), 0) << err();
  std::ifstream in(path("r.csv"));
  const auto ms = read_csv(in);
  EXPECT_EQ(ms.size(), cells * 2 * 3);

  ASSERT_EQ(run({"bench", "--grid", path("desk.json"), "--repeats", "2", "--evaluators", "bitpacked", "--families",
                 "password", "--out", path("r.csv"), "--append"}),
            0);
  std::ifstream again(path("r.csv"));
  g.families = {Family::Password};
  EXPECT_EQ(read_csv(again).size(), cells * 2 * 3 + parameter_grid(g).size() * 2);

  // Without --out the CSV goes to stdout.
  ASSERT_EQ(run({"bench", "--grid", path("desk.json"), "--repeats", "1", "--families", "password"}), 0);
  std::istringstream text(out());
  EXPECT_EQ(read_csv(text).size(), parameter_grid(g).size() * 2);
}

TEST_F(Cli, BenchErrors) {
  write_text(path("bad.json"), R"({"widths": [5]})");
  EXPECT_EQ(run({"bench", "--grid", path("bad.json")}), 2);
  EXPECT_EQ(run({"bench", "--grid", path("none.json")}), 1);
  write_text(path("g.json"), R"({"widths": [5], "sizes": [100]})");
  EXPECT_EQ(run({"bench", "--grid", path("g.json"), "--repeats", "0"}), 2);
}

TEST_F(Cli, FitSyntheticSquareRoot) {
  std::vector<Measurement> ms;
  for (std::uint64_t w : {5, 10, 50, 100, 500, 1000, 5000}) {
    for (std::uint64_t n : {100'000, 1'000'000, 10'000'000}) {
      Measurement m;
      m.n = n;
      m.w = w;
      m.d = w;
      m.runtime_s = 3e-9 * static_cast<double>(n) * std::sqrt(static_cast<double>(w));
      m.gate_rate = static_cast<double>(n) / m.runtime_s;
      ms.push_back(m);
    }
  }
  {
    std::ofstream f(path("s.csv"));
    write_csv(f, ms);
  }
  ASSERT_EQ(run({"fit", "--in", path("s.csv"), "--out", path("fit.json")}), 0) << err();
  EXPECT_NE(out().find("alpha=0.500"), std::string::npos) << out();
  EXPECT_NE(out().find("H1 accepted"), std::string::npos) << out();
  EXPECT_NE(out().find("H2 skipped"), std::string::npos) << out();
  const auto doc = nlohmann::json::parse(read_text(path("fit.json")));
  EXPECT_NEAR(doc["fits"][0]["alpha"].get<double>(), 0.5, 1e-9);
  EXPECT_EQ(doc["hypotheses"][0]["id"], "H1");
  EXPECT_TRUE(doc["hypotheses"][0]["accepted"].get<bool>());

  {
    std::ofstream f(path("s.json"));
    write_json(f, ms);
  }
  ASSERT_EQ(run({"fit", "--in", path("s.json"), "--lo", "40"}), 0);
  EXPECT_NE(out().find("alpha=0.500"), std::string::npos);
  EXPECT_NE(out().find("H1 rejected"), std::string::npos);
}

TEST_F(Cli, FitErrors) {
  write_text(path("bad.csv"), "family,n,w,d,seed,evaluator,repeat,runtime_s,gate_rate\nnope\n");
  EXPECT_EQ(run({"fit", "--in", path("bad.csv")}), 2);
  EXPECT_EQ(run({"fit", "--in", path("none.csv")}), 1);
  write_text(path("empty.csv"), "family,n,w,d,seed,evaluator,repeat,runtime_s,gate_rate\n");
  EXPECT_EQ(run({"fit", "--in", path("empty.csv")}), 1);
}

TEST_F(Cli, UsageAndHelp) {
  EXPECT_EQ(run({}), 2);
  EXPECT_EQ(run({"frobnicate"}), 2);
  EXPECT_EQ(run({"dump"}), 2);
  EXPECT_EQ(run({"validate", "x.bpw", "--no-such-flag"}), 2);
  EXPECT_EQ(run({"--help"}), 0);
  EXPECT_NE(out().find("bench"), std::string::npos);
}

}  // namespace
}  // namespace bpw
