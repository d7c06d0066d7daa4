#include "asp/error.hpp"
#include "asp/experiment.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace asp;
namespace fs = std::filesystem;

namespace {

const std::string kSource = ASP_SOURCE_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream f(p);
  std::string l;
  std::getline(f, l);
  return l;
}

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

fs::path scratch(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("asp_test_" + name);
  fs::create_directories(d);
  return d;
}

const char* kTrimer = "[model]\nmodel = trimer\nj = 1\nj13 = 0.37\nU = -5\n";

}  // namespace

TEST(Config, ParsesFigureConfig) {
  const auto cfg = load_config(kSource + "/figures/fig1_trimer_stepwise.cfg");
  ASSERT_TRUE(cfg.model && cfg.path && cfg.analysis);
  EXPECT_EQ(cfg.model->kind, "trimer");
  EXPECT_DOUBLE_EQ(cfg.model->j13, 0.37);
  EXPECT_DOUBLE_EQ(cfg.model->dU, 1e-6);
  EXPECT_EQ(cfg.path->kind, "stepwise");
  EXPECT_EQ(cfg.path->grid, 401);
  EXPECT_EQ(analysis_name(*cfg.analysis), "gap");
}

TEST(Config, ErrorsNameTheLine) {
  EXPECT_NE(error_of(std::string(kTrimer) + "bogus = 3\n[gap]\n").find("line 6"), std::string::npos);
  EXPECT_NE(error_of(std::string(kTrimer) + "[gap]\ntrack = x\n").find("line 7"), std::string::npos);
  EXPECT_NE(error_of("[model]\nmodel = trimer\nj 1\n[gap]\n").find("line 3"), std::string::npos);
  EXPECT_NE(error_of(std::string(kTrimer) + "j = 2\n[gap]\n").find("line 6"), std::string::npos);
  EXPECT_NE(error_of("[gap]\n[weird]\n").find("line 2"), std::string::npos);
}

TEST(Config, BlockRules) {
  EXPECT_NE(error_of("[gap]\ntrack = 2\n").find("[model]"), std::string::npos);
  EXPECT_NE(error_of(kTrimer).find("missing analysis block"), std::string::npos);
  EXPECT_NE(error_of(std::string(kTrimer) + "[gap]\n[evolve]\n").find("only one analysis block"), std::string::npos);
  EXPECT_EQ(error_of("[bounds]\nL_max = 6\n"), "");
  EXPECT_THROW(load_config("/nonexistent/x.cfg"), ConfigError);
}

TEST(Config, FigureFilesMatchBuiltins) {
  for (const auto& [name, cfg] : figure_experiments("figures/out")) {
    const auto file = load_config(kSource + "/figures/" + name + ".cfg");
    EXPECT_EQ(file, cfg) << name;
  }
}

TEST(Config, StageSelectors) {
  ModelConfig m;
  m.kind = "four_site";
  m.delta = 0.1;
  m.U = -2;
  m.hf = "lowest_orbitals";
  m.policy = ConstantPolicy::drop;
  // Uniform U leaves exactly the four on-site pair counters.
  const auto p = build_problem(m);
  ASSERT_EQ(p.terms.size(), 4u);
  for (const auto& t : p.terms) EXPECT_NEAR(t.eigenvalue, -2.0, 1e-12);
  const auto st = resolve_stages(p, "site:0 | rest");
  ASSERT_EQ(st.size(), 2u);
  EXPECT_EQ(st[0].size(), 1u);
  EXPECT_EQ(st[1].size(), 3u);
  EXPECT_EQ(resolve_stages(p, "each").size(), 4u);
  EXPECT_EQ(resolve_stages(p, "pair:7:6, 0 | rest")[0].size(), 2u);
  EXPECT_THROW(resolve_stages(p, "site:9 | rest"), DomainError);
  EXPECT_THROW(resolve_stages(p, "site:0 | site:0 | rest"), DomainError);
  EXPECT_THROW(resolve_stages(p, "site:x"), DomainError);

  // Split U also leaves small one-body remainders; rest collects them.
  m.dU = 1e-6;
  const auto q = build_problem(m);
  const auto split = resolve_stages(q, "site:0 | rest");
  EXPECT_EQ(split[0].size(), 1u);
  EXPECT_EQ(split[1].size(), q.terms.size() - 1);
  EXPECT_NEAR(q.terms[split[0][0]].eigenvalue, -2.0, 1e-5);
}

TEST(Run, GoldenHeaders) {
  const auto dir = scratch("headers");
  const std::pair<const char*, const char*> blocks[] = {
      {"[gap]\n", kGapHeader},
      {"[evolve]\nT = 5\nsteps = 200\n", kFidelityHeader},
      {"[decompose]\n", kDecomposeHeader},
      {"[numerator]\npoints = 40\n", kNumeratorHeader},
      {"[jansen]\npoints = 40\n", kJansenHeader},
  };
  for (const auto& [block, header] : blocks) {
    const auto prefix = (dir / "t").string();
    const auto cfg = parse_config(std::string(kTrimer) + "[path]\nkind = direct\ngrid = 21\n" + block +
                                  "[output]\nprefix = " + prefix + "\n");
    const auto r = run_experiment(cfg);
    ASSERT_FALSE(r.files.empty());
    EXPECT_EQ(first_line(r.files[0]), header) << block;
  }
  const auto b = run_experiment(parse_config("[bounds]\nL_max = 5\nN_max = 3\nsamples = 3\n[output]\nprefix = " +
                                             (dir / "b").string() + "\n"));
  EXPECT_EQ(first_line(b.files[0]), kBoundsHeader);
  EXPECT_EQ(std::string(kGapHeader), "s,E0,E1,E2,gap,sym0,sym1");
  EXPECT_EQ(std::string(kFidelityHeader), "s,fidelity,norm");
  EXPECT_EQ(std::string(kDecomposeHeader), "k,lambda,P,R,value");
  EXPECT_EQ(std::string(kBoundsHeader), "L,N,bound,max_random_norm,saturating");
}

TEST(Run, GapNeedsPath) {
  EXPECT_THROW(run_experiment(parse_config(std::string(kTrimer) + "[gap]\n")), ConfigError);
}

TEST(Run, Deterministic) {
  const auto dir = scratch("det");
  std::string out[2];
  for (int k = 0; k < 2; ++k) {
    const auto cfg = parse_config("[bounds]\nL_max = 6\nN_max = 4\nsamples = 5\n[output]\nprefix = " +
                                  (dir / ("r" + std::to_string(k))).string() + "\nseed = 42\n");
    out[k] = slurp(run_experiment(cfg).files[0]);
  }
  EXPECT_EQ(out[0], out[1]);
  auto figs = figure_experiments((dir / "fig").string());
  auto cfg = figs[3].second;
  cfg.path->grid = 41;
  const auto a = slurp(run_experiment(cfg).files[0]);
  const auto b = slurp(run_experiment(cfg).files[0]);
  EXPECT_EQ(a, b);
}

TEST(Run, FourSiteStepwisePositiveGap) {
  auto figs = figure_experiments((scratch("fig2") / "f").string());
  const auto it = std::find_if(figs.begin(), figs.end(), [](auto& f) { return f.first == "fig2_four_site_stepwise"; });
  ASSERT_NE(it, figs.end());
  std::ifstream f(run_experiment(it->second).files[0]);
  std::string line;
  std::getline(f, line);
  int rows = 0;
  while (std::getline(f, line)) {
    std::vector<std::string> cols;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cols.push_back(c);
    ASSERT_EQ(cols.size(), 7u);
    EXPECT_GT(std::stod(cols[4]), 0.05);
    ++rows;
  }
  EXPECT_EQ(rows, 401);
}

TEST(Format, Numbers) {
  EXPECT_EQ(format_number(0.5), "0.5");
  EXPECT_EQ(format_number(-2.0), "-2");
  EXPECT_EQ(format_number(1.0 / 3), "0.333333333333");
}
