#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bibt/graph_complex.hpp"
#include "bibt/measures.hpp"
#include "bibt/sampler.hpp"
#include "bibt/sim_harness.hpp"

namespace bibt {

/// One game outcome; the date is optional and carried through untouched.
struct GameRecord {
  std::string date;
  std::string winner;
  std::string loser;
};

enum class InputFormat { game_log, aggregated };

InputFormat input_format_from_string(const std::string& name);

/// Reads a comparison file. game_log files have header columns winner,loser
/// (date optional); aggregated files have label_i,label_j,wins_i,trials.
/// Entity labels are collected and sorted lexicographically to fix indices;
/// unobserved pairs get zero trials. Throws DataError with the offending line
/// number on malformed input.
ComparisonData load_games(const std::string& path, InputFormat format);

/// Aggregation used by the game_log path, exposed for direct use.
ComparisonData aggregate_games(const std::vector<GameRecord>& games);

/// Writes the standard fit output set:
///   <prefix>_draws.csv           one row per draw, columns s_1..s_N,w_1..w_K
///   <prefix>_summary.json        posterior summaries of all quantities
///   <prefix>_matchup.csv         posterior-mean grad/curl/total flow per edge
///   <prefix>_vorticity.csv       per-triad summary with 95% zero-exclusion flag
///   <prefix>_global_measure.csv  per-draw trace of the global measure
/// Files are written atomically (temp file + rename). Numeric text carries 17
/// significant digits so values round-trip exactly.
void write_summaries(const PosteriorDraws& draws, const ComplexIndex& idx,
                     const OperatorSet& ops, const std::vector<std::string>& labels,
                     const std::string& prefix,
                     const std::vector<double>& levels = default_levels());

/// Reloads a draws CSV written by write_summaries. The model tag and
/// hyperparameters are not stored in the CSV; the caller supplies the tag.
PosteriorDraws load_draws(const std::string& path,
                          ModelKind model = ModelKind::bibt);

/// Reads an edge flow given as label_i,label_j,value rows covering every pair
/// of the inferred entity set. Returns the sorted labels and the flow on the
/// canonical orientation.
std::pair<std::vector<std::string>, EdgeFlow> load_edge_flow(const std::string& path);

/// Study outputs: <prefix>_report.csv (long format, one metric per row) and
/// <prefix>_report.json (per-model aggregate means plus the configuration).
void write_study_report(const StudyReport& report, const std::string& prefix);

/// Columns: sparsity,model,metric,value — one aggregate row per metric, the
/// flat file behind the sparsity-sweep figures.
void write_sparsity_sweep(const std::vector<StudyReport>& reports,
                          const std::string& path);

/// Dumps a dense matrix as a headerless CSV (operator debugging).
void write_matrix_csv(const Eigen::MatrixXd& matrix, const std::string& path);

/// Atomic text write used by every writer here: temp file in the target
/// directory, then rename.
void write_text_atomic(const std::string& path, const std::string& content);

/// 17 significant digits; round-trips an IEEE double exactly.
std::string format_double(double value);

}  // namespace bibt
