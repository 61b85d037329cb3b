// Command-line front end: fit, simulate, decompose and report workflows over
// the bibt core library. Exit codes: 0 success, 1 usage error, 2 data error,
// 3 numerical failure.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "bibt/data_io.hpp"
#include "bibt/errors.hpp"
#include "bibt/graph_complex.hpp"
#include "bibt/measures.hpp"
#include "bibt/sampler.hpp"
#include "bibt/sim_harness.hpp"

namespace {

constexpr std::uint64_t kDefaultSeed = 20240101;

std::uint64_t fallback_seed() {
  if (const char* env = std::getenv("BIBT_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw bibt::DataError(std::string("BIBT_SEED is not an integer: '") + env + "'");
    }
  }
  return kDefaultSeed;
}

struct CommonOptions {
  std::uint64_t seed = 0;
  bool seed_given = false;
  int iters = 10000;
  int burnin = 2000;
  int thin = 1;
  std::string out = "bibt";
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--seed", opt.seed, "RNG seed (falls back to BIBT_SEED, then a fixed default)")
      ->each([&](const std::string&) { opt.seed_given = true; });
  cmd->add_option("--iters", opt.iters, "MCMC iterations")->capture_default_str();
  cmd->add_option("--burnin", opt.burnin, "burn-in iterations")->capture_default_str();
  cmd->add_option("--thin", opt.thin, "keep every thin-th draw")->capture_default_str();
  cmd->add_option("--out", opt.out, "output file prefix")->capture_default_str();
}

bibt::Hyperparams make_hyperparams(const CommonOptions& opt) {
  bibt::Hyperparams hp;
  hp.n_iterations = opt.iters;
  hp.burn_in = opt.burnin;
  hp.thin = opt.thin;
  hp.seed = opt.seed_given ? opt.seed : fallback_seed();
  return hp;
}

int run_fit(const CommonOptions& common, const std::string& data_path,
            const std::string& format, const std::string& model) {
  const bibt::ComparisonData data =
      bibt::load_games(data_path, bibt::input_format_from_string(format));
  const bibt::ComplexIndex idx = bibt::build_complex(data.n_entities);
  const bibt::OperatorSet ops =
      bibt::build_curl_basis(idx, 1e-10, /*with_kernel_basis=*/false);
  const bibt::Hyperparams hp = make_hyperparams(common);

  const bibt::ModelKind kind = bibt::model_kind_from_string(model);
  const bibt::PosteriorDraws draws = kind == bibt::ModelKind::bibt
                                         ? bibt::run_chain(data, hp, ops)
                                         : bibt::run_baseline_chain(data, hp, ops);

  bibt::write_summaries(draws, idx, ops, data.entity_labels, common.out);

  const Eigen::VectorXd trace = bibt::global_intransitivity_trace(draws, ops);
  std::cout << "model=" << bibt::to_string(kind) << " entities=" << data.n_entities
            << " draws=" << draws.draw_count()
            << " intransitivity_mean=" << trace.mean()
            << " wall_seconds=" << draws.wall_seconds << "\n";
  std::cout << "wrote " << common.out << "_{draws.csv,summary.json,matchup.csv,"
            << "vorticity.csv,global_measure.csv}\n";
  return 0;
}

int run_simulate(const CommonOptions& common, int n_entities,
                 const std::vector<int>& trials_range, int trials,
                 const std::vector<double>& sparsity_values, int replications,
                 double score_scale, double curl_scale, int jobs) {
  bibt::SimConfig cfg;
  cfg.n_entities = n_entities;
  if (!trials_range.empty()) {
    cfg.trials = {trials_range[0], trials_range[1]};
  } else {
    cfg.trials = {trials, trials};
  }
  cfg.replications = replications;
  cfg.score_scale = score_scale;
  cfg.curl_scale = curl_scale;
  cfg.master_seed = common.seed_given ? common.seed : fallback_seed();
  cfg.mcmc.n_iterations = common.iters;
  cfg.mcmc.burn_in = common.burnin;
  cfg.mcmc.thin = common.thin;

  std::vector<bibt::StudyReport> reports;
  for (std::size_t s = 0; s < sparsity_values.size(); ++s) {
    cfg.sparsity = sparsity_values[s];
    reports.push_back(bibt::run_study(cfg, jobs));
    const std::string prefix =
        sparsity_values.size() == 1
            ? common.out
            : common.out + "_s" + std::to_string(s);
    bibt::write_study_report(reports.back(), prefix);
    std::cout << "sparsity=" << cfg.sparsity << " wrote " << prefix
              << "_{report.csv,report.json}\n";
  }
  if (sparsity_values.size() > 1) {
    bibt::write_sparsity_sweep(reports, common.out + "_sweep.csv");
    std::cout << "wrote " << common.out << "_sweep.csv\n";
  }
  return 0;
}

int run_decompose(const std::string& flow_path, const std::string& out,
                  bool dump_operators) {
  const auto [labels, flow] = bibt::load_edge_flow(flow_path);
  const bibt::ComplexIndex idx = bibt::build_complex(static_cast<int>(labels.size()));
  const bibt::OperatorSet ops = bibt::build_curl_basis(idx);
  const bibt::HodgeDecomposition parts = bibt::hodge_project(flow, ops);

  const double measure =
      bibt::global_intransitivity(parts.grad_part.values, parts.curl_part.values);
  std::cout << "entities=" << labels.size() << " edges=" << idx.n_edges()
            << " |flow|=" << flow.values.norm()
            << " |grad|=" << parts.grad_part.values.norm()
            << " |curl|=" << parts.curl_part.values.norm()
            << " intransitivity=" << measure << " residual=" << parts.residual_norm
            << "\n";
  if (parts.residual_norm > 1e-8 * (1.0 + flow.values.norm())) {
    std::cerr << "warning: decomposition residual " << parts.residual_norm
              << " exceeds tolerance\n";
  }

  if (!out.empty()) {
    std::ostringstream buf;
    buf << "# format_version=1\n";
    buf << "label_i,label_j,value,grad,curl\n";
    for (int e = 0; e < idx.n_edges(); ++e) {
      const auto& [i, j] = idx.edges()[e];
      buf << labels[i] << "," << labels[j] << ","
          << bibt::format_double(flow.values[e]) << ","
          << bibt::format_double(parts.grad_part.values[e]) << ","
          << bibt::format_double(parts.curl_part.values[e]) << "\n";
    }
    bibt::write_text_atomic(out + "_decomposition.csv", buf.str());
    std::cout << "wrote " << out << "_decomposition.csv\n";
  }
  if (dump_operators) {
    const std::string prefix = out.empty() ? "operators" : out;
    bibt::write_matrix_csv(ops.grad, prefix + "_op_grad.csv");
    bibt::write_matrix_csv(ops.curl, prefix + "_op_curl.csv");
    bibt::write_matrix_csv(ops.curl_basis, prefix + "_op_curl_basis.csv");
    bibt::write_matrix_csv(ops.kernel_basis, prefix + "_op_kernel_basis.csv");
    bibt::write_matrix_csv(bibt::helmholtzian(idx), prefix + "_op_helmholtzian.csv");
    std::cout << "wrote operator dumps with prefix " << prefix << "_op_*\n";
  }
  return 0;
}

int run_report(const std::string& draws_path, const std::vector<double>& levels,
               const std::string& out, const std::string& model) {
  const bibt::PosteriorDraws draws =
      bibt::load_draws(draws_path, bibt::model_kind_from_string(model));
  const bibt::ComplexIndex idx = bibt::build_complex(draws.n_entities());
  const bibt::OperatorSet ops =
      bibt::build_curl_basis(idx, 1e-10, /*with_kernel_basis=*/false);
  const std::vector<double> use_levels =
      levels.empty() ? bibt::default_levels() : levels;
  bibt::write_summaries(draws, idx, ops, {}, out, use_levels);
  std::cout << "reloaded " << draws.draw_count() << " draws, wrote summaries with prefix "
            << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian intransitive pairwise-comparison modeling"};
  app.require_subcommand(1);

  CommonOptions common;

  // fit
  auto* fit = app.add_subcommand("fit", "fit a model to comparison data");
  std::string data_path, format = "game-log", model = "bibt";
  fit->add_option("--data", data_path, "input CSV path")->required();
  fit->add_option("--format", format, "input format: game-log|aggregated")
      ->capture_default_str();
  fit->add_option("--model", model, "model: bibt|baseline")->capture_default_str();
  add_common(fit, common);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "run a synthetic replication study");
  int n_entities = 10, trials = 100, replications = 100, jobs = 0;
  std::vector<int> trials_range;
  std::vector<double> sparsity_values{0.5};
  double score_scale = 1.0, curl_scale = 1.0;
  simulate->add_option("--n-entities", n_entities, "number of entities")
      ->capture_default_str();
  simulate->add_option("--trials", trials, "comparisons per pair")->capture_default_str();
  simulate->add_option("--trials-range", trials_range,
                       "lo hi: per-pair comparisons drawn uniformly from {lo..hi}")
      ->expected(2);
  simulate->add_option("--sparsity", sparsity_values,
                       "fraction of zeroed curl weights; repeat for a sweep")
      ->capture_default_str();
  simulate->add_option("--replications", replications, "independent replications")
      ->capture_default_str();
  simulate->add_option("--score-scale", score_scale, "sd of the true scores")
      ->capture_default_str();
  simulate->add_option("--curl-scale", curl_scale, "sd of the nonzero true curl weights")
      ->capture_default_str();
  simulate->add_option("--jobs", jobs, "worker threads (0 = hardware parallelism)")
      ->capture_default_str();
  add_common(simulate, common);

  // decompose
  auto* decompose = app.add_subcommand("decompose", "split an edge flow into grad + curl parts");
  std::string flow_path;
  bool dump_operators = false;
  std::string decompose_out;
  decompose->add_option("--flow-csv", flow_path, "edge flow CSV (label_i,label_j,value)")
      ->required();
  decompose->add_option("--out", decompose_out, "output prefix (optional)");
  decompose->add_flag("--dump-operators", dump_operators,
                      "also dump the operator matrices as CSV");

  // report
  auto* report = app.add_subcommand("report", "recompute summaries from stored draws");
  std::string draws_path, report_model = "bibt";
  std::vector<double> levels;
  report->add_option("--draws", draws_path, "draws CSV written by fit")->required();
  report->add_option("--levels", levels, "quantile levels in (0,1)");
  report->add_option("--model", report_model, "model tag for the summary metadata")
      ->capture_default_str();
  report->add_option("--out", common.out, "output file prefix")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "error: usage: " << e.what() << "\n";
    return 1;
  }

  try {
    if (fit->parsed()) return run_fit(common, data_path, format, model);
    if (simulate->parsed()) {
      return run_simulate(common, n_entities, trials_range, trials, sparsity_values,
                          replications, score_scale, curl_scale, jobs);
    }
    if (decompose->parsed()) return run_decompose(flow_path, decompose_out, dump_operators);
    if (report->parsed()) return run_report(draws_path, levels, common.out, report_model);
  } catch (const bibt::DataError& e) {
    std::cerr << "error: data: " << e.what() << "\n";
    return 2;
  } catch (const bibt::NumericalError& e) {
    std::cerr << "error: numerical: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
