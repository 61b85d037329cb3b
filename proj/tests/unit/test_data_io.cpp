#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "bibt/data_io.hpp"
#include "bibt/errors.hpp"
#include "bibt/graph_complex.hpp"
#include "bibt/sampler.hpp"

using namespace bibt;
namespace fs = std::filesystem;

namespace {

/// Scratch directory removed when the fixture dies.
struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("bibt_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

}  // namespace

TEST_CASE("game log aggregation") {
  TempDir tmp;
  const std::string path = tmp.file("games.csv");

  SUBCASE("reciprocal results aggregate to one pair") {
    write_file(path,
               "date,winner,loser\n"
               "2024-05-01,A,B\n"
               "2024-05-02,B,A\n"
               "2024-05-03,A,C\n");
    const ComparisonData data = load_games(path, InputFormat::game_log);
    CHECK(data.n_entities == 3);
    CHECK(data.entity_labels == std::vector<std::string>{"A", "B", "C"});
    const ComplexIndex idx(3);
    CHECK(data.wins[idx.edge_index(0, 1)] == 1);
    CHECK(data.trials[idx.edge_index(0, 1)] == 2);
    CHECK(data.trials[idx.edge_index(0, 2)] == 1);
    CHECK(data.trials[idx.edge_index(1, 2)] == 0);  // never observed
  }

  SUBCASE("date column is optional") {
    write_file(path, "winner,loser\nA,B\nC,A\nB,C\n");
    const ComparisonData data = load_games(path, InputFormat::game_log);
    CHECK(data.n_entities == 3);
    CHECK(data.trials.sum() == 3);
  }

  SUBCASE("shuffled logs aggregate identically") {
    write_file(path, "winner,loser\nA,B\nC,A\nB,C\nA,C\n");
    const ComparisonData first = load_games(path, InputFormat::game_log);
    write_file(path, "winner,loser\nA,C\nB,C\nA,B\nC,A\n");
    const ComparisonData second = load_games(path, InputFormat::game_log);
    CHECK(first.wins == second.wins);
    CHECK(first.trials == second.trials);
    CHECK(first.entity_labels == second.entity_labels);
  }

  SUBCASE("header-only file fails") {
    write_file(path, "winner,loser\n");
    CHECK_THROWS_AS(load_games(path, InputFormat::game_log), DataError);
  }

  SUBCASE("self-play fails with the line number") {
    write_file(path, "winner,loser\nA,B\nB,B\n");
    CHECK_THROWS_WITH_AS(load_games(path, InputFormat::game_log),
                         doctest::Contains("line 3"), DataError);
  }

  SUBCASE("short rows fail with the line number") {
    write_file(path, "winner,loser\nA,B\nC\n");
    CHECK_THROWS_WITH_AS(load_games(path, InputFormat::game_log),
                         doctest::Contains("line 3"), DataError);
  }

  SUBCASE("missing file fails") {
    CHECK_THROWS_AS(load_games(tmp.file("absent.csv"), InputFormat::game_log),
                    DataError);
  }
}

TEST_CASE("aggregated format") {
  TempDir tmp;
  const std::string path = tmp.file("agg.csv");

  SUBCASE("round numbers load") {
    write_file(path,
               "label_i,label_j,wins_i,trials\n"
               "A,B,7,10\n"
               "A,C,2,8\n"
               "B,C,5,5\n");
    const ComparisonData data = load_games(path, InputFormat::aggregated);
    const ComplexIndex idx(3);
    CHECK(data.wins[idx.edge_index(0, 1)] == 7);
    CHECK(data.trials[idx.edge_index(0, 2)] == 8);
    CHECK(data.wins[idx.edge_index(1, 2)] == 5);
  }

  SUBCASE("reversed pairs are normalized") {
    write_file(path,
               "label_i,label_j,wins_i,trials\n"
               "B,A,3,10\n"
               "A,C,2,8\n"
               "C,B,1,6\n");
    const ComparisonData data = load_games(path, InputFormat::aggregated);
    const ComplexIndex idx(3);
    CHECK(data.wins[idx.edge_index(0, 1)] == 7);  // A beat B 7 of 10
    CHECK(data.wins[idx.edge_index(1, 2)] == 5);  // B beat C 5 of 6
  }

  SUBCASE("duplicate pair fails") {
    write_file(path,
               "label_i,label_j,wins_i,trials\n"
               "A,B,3,10\n"
               "B,A,2,4\n"
               "A,C,2,8\n");
    CHECK_THROWS_WITH_AS(load_games(path, InputFormat::aggregated),
                         doctest::Contains("duplicate"), DataError);
  }

  SUBCASE("wins above trials fail") {
    write_file(path, "label_i,label_j,wins_i,trials\nA,B,11,10\nA,C,1,2\nB,C,1,2\n");
    CHECK_THROWS_AS(load_games(path, InputFormat::aggregated), DataError);
  }

  SUBCASE("unknown format name fails") {
    CHECK_THROWS_AS(input_format_from_string("parquet"), DataError);
  }
}

TEST_CASE("fit outputs round-trip") {
  TempDir tmp;
  const ComplexIndex idx = build_complex(4);
  const OperatorSet ops = build_curl_basis(idx);

  ComparisonData data;
  data.n_entities = 4;
  data.wins = Eigen::VectorXi::Zero(idx.n_edges());
  data.trials = Eigen::VectorXi::Constant(idx.n_edges(), 30);
  data.wins << 20, 12, 8, 25, 10, 17;
  data.entity_labels = {"ANA", "BOS", "CHC", "DET"};

  Hyperparams hp;
  hp.n_iterations = 500;
  hp.burn_in = 100;
  hp.seed = 11;
  const PosteriorDraws draws = run_chain(data, hp, ops);

  const std::string prefix = tmp.file("fit");
  write_summaries(draws, idx, ops, data.entity_labels, prefix);

  for (const char* suffix : {"_draws.csv", "_summary.json", "_matchup.csv",
                             "_vorticity.csv", "_global_measure.csv"}) {
    CHECK(fs::exists(prefix + suffix));
  }

  SUBCASE("draws reload exactly") {
    const PosteriorDraws reloaded = load_draws(prefix + "_draws.csv");
    REQUIRE(reloaded.draw_count() == draws.draw_count());
    REQUIRE(reloaded.n_entities() == 4);
    CHECK(reloaded.scores == draws.scores);    // 17 digits round-trip exactly
    CHECK(reloaded.weights == draws.weights);
  }

  SUBCASE("matchup table has one row per edge") {
    std::ifstream in(prefix + "_matchup.csv");
    std::string line;
    int rows = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      if (!header_seen) {
        header_seen = true;
        CHECK(line == "label_i,label_j,grad_mean,curl_mean,total_mean");
        continue;
      }
      ++rows;
    }
    CHECK(rows == idx.n_edges());
  }

  SUBCASE("global trace has one row per draw") {
    std::ifstream in(prefix + "_global_measure.csv");
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
      if (!line.empty() && line[0] != '#') ++rows;
    }
    CHECK(rows == draws.draw_count() + 1);  // header + draws
  }

  SUBCASE("summary json carries the format version and quantities") {
    std::ifstream in(prefix + "_summary.json");
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    CHECK(text.find("\"format_version\"") != std::string::npos);
    CHECK(text.find("\"global_measure\"") != std::string::npos);
    CHECK(text.find("\"vorticity\"") != std::string::npos);
    CHECK(text.find("\"flagged_count\"") != std::string::npos);
    CHECK(text.find("ANA") != std::string::npos);
  }
}

TEST_CASE("edge flow files") {
  TempDir tmp;
  const std::string path = tmp.file("flow.csv");

  SUBCASE("loads and respects orientation") {
    write_file(path,
               "label_i,label_j,value\n"
               "B,A,-1.5\n"
               "A,C,2.0\n"
               "C,B,0.25\n");
    const auto [labels, flow] = load_edge_flow(path);
    CHECK(labels == std::vector<std::string>{"A", "B", "C"});
    const ComplexIndex idx(3);
    CHECK(flow.values[idx.edge_index(0, 1)] == doctest::Approx(1.5));
    CHECK(flow.values[idx.edge_index(0, 2)] == doctest::Approx(2.0));
    CHECK(flow.values[idx.edge_index(1, 2)] == doctest::Approx(-0.25));
  }

  SUBCASE("incomplete graphs are rejected") {
    write_file(path, "label_i,label_j,value\nA,B,1.0\nA,C,2.0\nA,D,1.0\n");
    CHECK_THROWS_AS(load_edge_flow(path), DataError);
  }
}

TEST_CASE("study report files") {
  TempDir tmp;
  SimConfig cfg;
  cfg.n_entities = 4;
  cfg.trials = {25, 25};
  cfg.sparsity = 0.5;
  cfg.replications = 2;
  cfg.master_seed = 5;
  cfg.mcmc.n_iterations = 300;
  cfg.mcmc.burn_in = 100;
  const StudyReport report = run_study(cfg);

  const std::string prefix = tmp.file("study");
  write_study_report(report, prefix);
  CHECK(fs::exists(prefix + "_report.csv"));
  CHECK(fs::exists(prefix + "_report.json"));

  std::ifstream in(prefix + "_report.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "# format_version=1");
  std::getline(in, line);
  CHECK(line == "replication,model,metric,component,level,value");
  int rows = 0;
  bool saw_bibt = false, saw_baseline = false;
  while (std::getline(in, line)) {
    ++rows;
    if (line.find(",bibt,") != std::string::npos) saw_bibt = true;
    if (line.find(",baseline,") != std::string::npos) saw_baseline = true;
  }
  CHECK(rows > 10);
  CHECK(saw_bibt);
  CHECK(saw_baseline);

  std::vector<StudyReport> reports{report, report};
  write_sparsity_sweep(reports, tmp.file("sweep.csv"));
  std::ifstream sweep(tmp.file("sweep.csv"));
  std::getline(sweep, line);
  std::getline(sweep, line);
  CHECK(line == "sparsity,model,metric,value");
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-17, -2.5e300, 123456.789}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}
