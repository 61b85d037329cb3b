#include "bibt/data_io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "bibt/errors.hpp"

namespace bibt {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

/// All rows of a CSV file with their 1-based line numbers; leading '#'
/// comment lines are skipped.
struct CsvFile {
  std::vector<std::string> header;
  std::vector<std::pair<int, std::vector<std::string>>> rows;
};

CsvFile read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  CsvFile out;
  std::string line;
  int lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') continue;
    if (!have_header) {
      out.header = split_csv(line);
      have_header = true;
      continue;
    }
    out.rows.emplace_back(lineno, split_csv(line));
  }
  if (!have_header) throw DataError("'" + path + "': missing header row");
  return out;
}

int column_of(const CsvFile& csv, const std::string& name, const std::string& path,
              bool required = true) {
  for (std::size_t c = 0; c < csv.header.size(); ++c) {
    if (lower(csv.header[c]) == name) return static_cast<int>(c);
  }
  if (required) throw DataError("'" + path + "': header lacks column '" + name + "'");
  return -1;
}

long parse_count(const std::string& field, const std::string& path, int lineno) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(field, &pos);
    if (pos != field.size() || v < 0) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw DataError("'" + path + "' line " + std::to_string(lineno) +
                    ": expected nonnegative integer, got '" + field + "'");
  }
}

double parse_real(const std::string& field, const std::string& path, int lineno) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(field, &pos);
    if (pos != field.size()) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw DataError("'" + path + "' line " + std::to_string(lineno) +
                    ": expected real number, got '" + field + "'");
  }
}

/// Writes content to path via a temp file in the same directory, then renames.
void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) throw DataError("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

json summary_to_json(const MeasureSummary& s) {
  json out;
  out["quantity"] = to_string(s.quantity);
  out["component_labels"] = s.component_labels;
  out["mean"] = std::vector<double>(s.mean.data(), s.mean.data() + s.mean.size());
  out["sd"] = std::vector<double>(s.sd.data(), s.sd.data() + s.sd.size());
  json quantiles = json::object();
  for (std::size_t q = 0; q < s.levels.size(); ++q) {
    char key[32];
    std::snprintf(key, sizeof(key), "%g", s.levels[q]);
    std::vector<double> row(s.quantiles.cols());
    for (int c = 0; c < s.quantiles.cols(); ++c) row[c] = s.quantiles(static_cast<int>(q), c);
    quantiles[key] = row;
  }
  out["quantiles"] = quantiles;
  json flags = json::array();
  for (char f : s.ci_excludes_zero) flags.push_back(static_cast<bool>(f));
  out["flags"] = flags;
  if (s.quantity == Quantity::vorticity) {
    out["flagged_count"] = s.flagged_count;
    out["flagged_fraction"] = s.flagged_fraction;
  }
  return out;
}

std::string level_percent(double level) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%g", level * 100.0);
  return buf;
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

InputFormat input_format_from_string(const std::string& name) {
  if (name == "game-log" || name == "game_log") return InputFormat::game_log;
  if (name == "aggregated") return InputFormat::aggregated;
  throw DataError("unknown input format '" + name + "' (expected game-log|aggregated)");
}

ComparisonData aggregate_games(const std::vector<GameRecord>& games) {
  std::set<std::string> label_set;
  for (const auto& g : games) {
    if (g.winner.empty() || g.loser.empty()) throw DataError("empty entity label");
    if (g.winner == g.loser) {
      throw DataError("winner equals loser ('" + g.winner + "')");
    }
    label_set.insert(g.winner);
    label_set.insert(g.loser);
  }
  if (label_set.size() < 3) {
    throw DataError("need at least 3 distinct entities, got " +
                    std::to_string(label_set.size()));
  }
  ComparisonData data;
  data.entity_labels.assign(label_set.begin(), label_set.end());
  data.n_entities = static_cast<int>(data.entity_labels.size());
  std::map<std::string, int> index;
  for (int i = 0; i < data.n_entities; ++i) index[data.entity_labels[i]] = i;

  const ComplexIndex idx(data.n_entities);
  data.wins = Eigen::VectorXi::Zero(idx.n_edges());
  data.trials = Eigen::VectorXi::Zero(idx.n_edges());
  for (const auto& g : games) {
    const int w = index[g.winner];
    const int l = index[g.loser];
    const int e = w < l ? idx.edge_index(w, l) : idx.edge_index(l, w);
    data.trials[e] += 1;
    if (w < l) data.wins[e] += 1;
  }
  return data;
}

ComparisonData load_games(const std::string& path, InputFormat format) {
  const CsvFile csv = read_csv(path);

  if (format == InputFormat::game_log) {
    const int winner_col = column_of(csv, "winner", path);
    const int loser_col = column_of(csv, "loser", path);
    const int date_col = column_of(csv, "date", path, /*required=*/false);
    const std::size_t min_cols = static_cast<std::size_t>(std::max(winner_col, loser_col)) + 1;
    std::vector<GameRecord> games;
    games.reserve(csv.rows.size());
    for (const auto& [lineno, fields] : csv.rows) {
      if (fields.size() < min_cols) {
        throw DataError("'" + path + "' line " + std::to_string(lineno) +
                        ": expected " + std::to_string(csv.header.size()) +
                        " columns, got " + std::to_string(fields.size()));
      }
      GameRecord rec;
      rec.winner = fields[winner_col];
      rec.loser = fields[loser_col];
      if (date_col >= 0 && static_cast<std::size_t>(date_col) < fields.size()) {
        rec.date = fields[date_col];
      }
      if (rec.winner.empty() || rec.loser.empty()) {
        throw DataError("'" + path + "' line " + std::to_string(lineno) +
                        ": empty entity label");
      }
      if (rec.winner == rec.loser) {
        throw DataError("'" + path + "' line " + std::to_string(lineno) +
                        ": winner equals loser ('" + rec.winner + "')");
      }
      games.push_back(std::move(rec));
    }
    if (games.empty()) throw DataError("'" + path + "': no game rows, no entities");
    return aggregate_games(games);
  }

  // aggregated format
  const int li = column_of(csv, "label_i", path);
  const int lj = column_of(csv, "label_j", path);
  const int wi = column_of(csv, "wins_i", path);
  const int nt = column_of(csv, "trials", path);
  struct Row {
    std::string a, b;  // a < b
    long wins_a, trials;
    int lineno;
  };
  std::vector<Row> rows;
  std::set<std::string> label_set;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& [lineno, fields] : csv.rows) {
    if (fields.size() < csv.header.size()) {
      throw DataError("'" + path + "' line " + std::to_string(lineno) +
                      ": expected " + std::to_string(csv.header.size()) +
                      " columns, got " + std::to_string(fields.size()));
    }
    Row row;
    row.a = fields[li];
    row.b = fields[lj];
    row.lineno = lineno;
    if (row.a.empty() || row.b.empty()) {
      throw DataError("'" + path + "' line " + std::to_string(lineno) +
                      ": empty entity label");
    }
    if (row.a == row.b) {
      throw DataError("'" + path + "' line " + std::to_string(lineno) +
                      ": pair has identical labels ('" + row.a + "')");
    }
    row.wins_a = parse_count(fields[wi], path, lineno);
    row.trials = parse_count(fields[nt], path, lineno);
    if (row.wins_a > row.trials) {
      throw DataError("'" + path + "' line " + std::to_string(lineno) +
                      ": wins exceed trials");
    }
    if (row.b < row.a) {  // normalize to canonical order
      std::swap(row.a, row.b);
      row.wins_a = row.trials - row.wins_a;
    }
    if (!seen.insert({row.a, row.b}).second) {
      throw DataError("'" + path + "' line " + std::to_string(lineno) +
                      ": duplicate pair (" + row.a + ", " + row.b + ")");
    }
    label_set.insert(row.a);
    label_set.insert(row.b);
    rows.push_back(std::move(row));
  }
  if (label_set.size() < 3) {
    throw DataError("'" + path + "': need at least 3 distinct entities, got " +
                    std::to_string(label_set.size()));
  }
  ComparisonData data;
  data.entity_labels.assign(label_set.begin(), label_set.end());
  data.n_entities = static_cast<int>(data.entity_labels.size());
  std::map<std::string, int> index;
  for (int i = 0; i < data.n_entities; ++i) index[data.entity_labels[i]] = i;
  const ComplexIndex idx(data.n_entities);
  data.wins = Eigen::VectorXi::Zero(idx.n_edges());
  data.trials = Eigen::VectorXi::Zero(idx.n_edges());
  for (const auto& row : rows) {
    const int i = index[row.a];
    const int j = index[row.b];
    const int e = idx.edge_index(std::min(i, j), std::max(i, j));
    // labels sorted lexicographically, so i < j holds; keep the guard cheap
    data.wins[e] = static_cast<int>(i < j ? row.wins_a : row.trials - row.wins_a);
    data.trials[e] = static_cast<int>(row.trials);
  }
  data.validate();
  return data;
}

void write_summaries(const PosteriorDraws& draws, const ComplexIndex& idx,
                     const OperatorSet& ops, const std::vector<std::string>& labels,
                     const std::string& prefix, const std::vector<double>& levels) {
  if (draws.draw_count() < 2) {
    throw std::invalid_argument("write_summaries needs at least two draws");
  }
  const auto names = labels.empty()
                         ? summarize(draws, idx, ops, Quantity::scores).component_labels
                         : labels;

  // draws.csv
  {
    std::ostringstream out;
    out << "# format_version=" << kFormatVersion << "\n";
    for (int i = 0; i < draws.n_entities(); ++i) {
      out << (i ? "," : "") << "s_" << (i + 1);
    }
    for (int k = 0; k < draws.n_weights(); ++k) out << ",w_" << (k + 1);
    out << "\n";
    for (int r = 0; r < draws.draw_count(); ++r) {
      for (int i = 0; i < draws.n_entities(); ++i) {
        out << (i ? "," : "") << format_double(draws.scores(r, i));
      }
      for (int k = 0; k < draws.n_weights(); ++k) {
        out << "," << format_double(draws.weights(r, k));
      }
      out << "\n";
    }
    write_atomic(prefix + "_draws.csv", out.str());
  }

  const MeasureSummary scores = summarize(draws, idx, ops, Quantity::scores, levels, names);
  const MeasureSummary matchup = summarize(draws, idx, ops, Quantity::matchup, levels, names);
  const MeasureSummary grad = summarize(draws, idx, ops, Quantity::grad_flow, levels, names);
  const MeasureSummary curl = summarize(draws, idx, ops, Quantity::curl_flow, levels, names);
  const MeasureSummary global = summarize(draws, idx, ops, Quantity::global_measure, levels, names);
  const MeasureSummary vorticity = summarize(draws, idx, ops, Quantity::vorticity, levels, names);

  // summary.json
  {
    json root;
    root["format_version"] = kFormatVersion;
    root["model"] = to_string(draws.model);
    root["n_entities"] = draws.n_entities();
    root["entity_labels"] = names;
    root["n_iterations"] = draws.hyperparams.n_iterations;
    root["burn_in"] = draws.hyperparams.burn_in;
    root["thin"] = draws.hyperparams.thin;
    root["seed"] = draws.hyperparams.seed;
    root["draw_count"] = draws.draw_count();
    root["wall_seconds"] = draws.wall_seconds;
    root["generated_at"] = timestamp_utc();  // excluded from determinism checks
    root["scores"] = summary_to_json(scores);
    root["matchup"] = summary_to_json(matchup);
    root["grad_flow"] = summary_to_json(grad);
    root["curl_flow"] = summary_to_json(curl);
    root["global_measure"] = summary_to_json(global);
    root["vorticity"] = summary_to_json(vorticity);
    write_atomic(prefix + "_summary.json", root.dump(2) + "\n");
  }

  // matchup.csv: posterior-mean heatmap data
  {
    std::ostringstream out;
    out << "# format_version=" << kFormatVersion << "\n";
    out << "label_i,label_j,grad_mean,curl_mean,total_mean\n";
    for (int e = 0; e < idx.n_edges(); ++e) {
      const auto& [i, j] = idx.edges()[e];
      out << names[i] << "," << names[j] << "," << format_double(grad.mean[e]) << ","
          << format_double(curl.mean[e]) << "," << format_double(matchup.mean[e])
          << "\n";
    }
    write_atomic(prefix + "_matchup.csv", out.str());
  }

  // vorticity.csv
  {
    std::ostringstream out;
    out << "# format_version=" << kFormatVersion << "\n";
    out << "label_i,label_j,label_k,mean,sd,q2.5,q97.5,ci_excludes_zero\n";
    const Eigen::MatrixXd vort_draws = draws.matchup_draws(ops) * ops.curl.transpose();
    for (int t = 0; t < idx.n_triangles(); ++t) {
      const auto& [i, j, k] = idx.triangles()[t];
      out << names[i] << "," << names[j] << "," << names[k] << ","
          << format_double(vorticity.mean[t]) << "," << format_double(vorticity.sd[t])
          << "," << format_double(empirical_quantile(vort_draws.col(t), 0.025)) << ","
          << format_double(empirical_quantile(vort_draws.col(t), 0.975)) << ","
          << static_cast<int>(vorticity.ci_excludes_zero[t]) << "\n";
    }
    write_atomic(prefix + "_vorticity.csv", out.str());
  }

  // global_measure.csv: per-draw trace
  {
    const Eigen::VectorXd trace = global_intransitivity_trace(draws, ops);
    std::ostringstream out;
    out << "# format_version=" << kFormatVersion << "\n";
    out << "draw,value\n";
    for (int r = 0; r < trace.size(); ++r) {
      out << r << "," << format_double(trace[r]) << "\n";
    }
    write_atomic(prefix + "_global_measure.csv", out.str());
  }
}

PosteriorDraws load_draws(const std::string& path, ModelKind model) {
  const CsvFile csv = read_csv(path);
  int n = 0, k = 0;
  for (const auto& col : csv.header) {
    if (col.rfind("s_", 0) == 0) ++n;
    else if (col.rfind("w_", 0) == 0) ++k;
    else throw DataError("'" + path + "': unexpected draws column '" + col + "'");
  }
  if (n < 3) throw DataError("'" + path + "': fewer than 3 score columns");
  if (k != (n - 1) * (n - 2) / 2) {
    throw DataError("'" + path + "': " + std::to_string(k) +
                    " weight columns do not match " + std::to_string(n) + " entities");
  }
  PosteriorDraws draws;
  draws.model = model;
  draws.scores.resize(static_cast<int>(csv.rows.size()), n);
  draws.weights.resize(static_cast<int>(csv.rows.size()), k);
  int r = 0;
  for (const auto& [lineno, fields] : csv.rows) {
    if (fields.size() != static_cast<std::size_t>(n + k)) {
      throw DataError("'" + path + "' line " + std::to_string(lineno) +
                      ": expected " + std::to_string(n + k) + " fields");
    }
    for (int i = 0; i < n; ++i) draws.scores(r, i) = parse_real(fields[i], path, lineno);
    for (int j = 0; j < k; ++j) {
      draws.weights(r, j) = parse_real(fields[n + j], path, lineno);
    }
    ++r;
  }
  if (r == 0) throw DataError("'" + path + "': no draws");
  return draws;
}

std::pair<std::vector<std::string>, EdgeFlow> load_edge_flow(const std::string& path) {
  const CsvFile csv = read_csv(path);
  const int li = column_of(csv, "label_i", path);
  const int lj = column_of(csv, "label_j", path);
  const int lv = column_of(csv, "value", path);
  struct Row {
    std::string a, b;
    double value;
  };
  std::vector<Row> rows;
  std::set<std::string> label_set;
  for (const auto& [lineno, fields] : csv.rows) {
    if (fields.size() < csv.header.size()) {
      throw DataError("'" + path + "' line " + std::to_string(lineno) +
                      ": too few columns");
    }
    Row row{fields[li], fields[lj], parse_real(fields[lv], path, lineno)};
    if (row.a == row.b || row.a.empty() || row.b.empty()) {
      throw DataError("'" + path + "' line " + std::to_string(lineno) +
                      ": bad edge labels");
    }
    label_set.insert(row.a);
    label_set.insert(row.b);
    rows.push_back(std::move(row));
  }
  if (label_set.size() < 3) throw DataError("'" + path + "': need at least 3 entities");
  std::vector<std::string> labels(label_set.begin(), label_set.end());
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < labels.size(); ++i) index[labels[i]] = static_cast<int>(i);
  const ComplexIndex idx(static_cast<int>(labels.size()));
  if (rows.size() != static_cast<std::size_t>(idx.n_edges())) {
    throw DataError("'" + path + "': expected one row per pair (" +
                    std::to_string(idx.n_edges()) + "), got " +
                    std::to_string(rows.size()));
  }
  EdgeFlow flow = EdgeFlow::zero(idx);
  std::vector<bool> seen(idx.n_edges(), false);
  for (const auto& row : rows) {
    const int i = index[row.a];
    const int j = index[row.b];
    const int e = idx.edge_index(std::min(i, j), std::max(i, j));
    if (seen[e]) throw DataError("'" + path + "': duplicate pair (" + row.a + ", " + row.b + ")");
    seen[e] = true;
    flow.values[e] = i < j ? row.value : -row.value;
  }
  return {std::move(labels), std::move(flow)};
}

namespace {

void append_metric(std::ostringstream& out, int replication, const std::string& model,
                   const std::string& metric, const std::string& component,
                   const std::string& level, double value) {
  out << replication << "," << model << "," << metric << "," << component << ","
      << level << "," << format_double(value) << "\n";
}

json aggregate_to_json(const StudyReport& report, ModelKind model) {
  json out;
  const auto put = [&](const char* name, auto metric) {
    if (const auto v = report.mean_of(model, metric)) out[name] = *v;
    else out[name] = nullptr;
  };
  put("mse_m", [](const ReplicationRecord& r) { return std::optional<double>(r.mse.matchup); });
  put("mse_grad", [](const ReplicationRecord& r) { return std::optional<double>(r.mse.grad); });
  put("mse_curl", [](const ReplicationRecord& r) { return std::optional<double>(r.mse.curl); });
  put("accuracy",
      [](const ReplicationRecord& r) { return std::optional<double>(r.recovery.accuracy); });
  put("intransitivity",
      [](const ReplicationRecord& r) { return std::optional<double>(r.intransitivity); });
  put("wall_seconds",
      [](const ReplicationRecord& r) { return std::optional<double>(r.wall_seconds); });
  for (double level : report.config.detection_levels) {
    const std::string tag = level_percent(level);
    const auto get = [level](const ReplicationRecord& r, auto proj) -> std::optional<double> {
      const auto it = r.detection.find(level);
      if (it == r.detection.end()) return std::nullopt;
      return proj(it->second);
    };
    out["recall_" + tag] = nullptr;
    out["precision_" + tag] = nullptr;
    out["f1_" + tag] = nullptr;
    if (const auto v = report.mean_of(model, [&](const ReplicationRecord& r) {
          return get(r, [](const DetectionScores& d) { return d.recall; });
        }))
      out["recall_" + tag] = *v;
    if (const auto v = report.mean_of(model, [&](const ReplicationRecord& r) {
          return get(r, [](const DetectionScores& d) { return d.precision; });
        }))
      out["precision_" + tag] = *v;
    if (const auto v = report.mean_of(model, [&](const ReplicationRecord& r) {
          return get(r, [](const DetectionScores& d) { return d.f1; });
        }))
      out["f1_" + tag] = *v;
  }
  for (double level : {0.90, 0.95}) {
    const std::string tag = level_percent(level);
    const auto coverage_mean = [&](auto proj) {
      return report.mean_of(model, [&](const ReplicationRecord& r) -> std::optional<double> {
        const auto it = r.coverage.find(level);
        if (it == r.coverage.end()) return std::nullopt;
        return proj(it->second);
      });
    };
    if (const auto v = coverage_mean([](const CoverageRates& c) { return c.matchup; }))
      out["cp" + tag + "_m"] = *v;
    if (const auto v = coverage_mean([](const CoverageRates& c) { return c.grad; }))
      out["cp" + tag + "_grad"] = *v;
    if (const auto v = coverage_mean([](const CoverageRates& c) { return c.curl; }))
      out["cp" + tag + "_curl"] = *v;
  }
  int aborted = 0;
  for (const auto& rec : report.records) {
    if (rec.model == model && rec.aborted) ++aborted;
  }
  out["aborted_replications"] = aborted;
  return out;
}

}  // namespace

void write_study_report(const StudyReport& report, const std::string& prefix) {
  // long-format CSV
  std::ostringstream out;
  out << "# format_version=" << kFormatVersion << "\n";
  out << "replication,model,metric,component,level,value\n";
  for (const auto& rec : report.records) {
    const std::string model = to_string(rec.model);
    if (rec.aborted) {
      append_metric(out, rec.replication, model, "aborted", "", "", 1.0);
      continue;
    }
    append_metric(out, rec.replication, model, "mse", "m", "", rec.mse.matchup);
    append_metric(out, rec.replication, model, "mse", "grad", "", rec.mse.grad);
    append_metric(out, rec.replication, model, "mse", "curl", "", rec.mse.curl);
    append_metric(out, rec.replication, model, "accuracy", "m", "", rec.recovery.accuracy);
    append_metric(out, rec.replication, model, "zero_truth_edges", "m", "",
                  rec.recovery.zero_truth_edges);
    append_metric(out, rec.replication, model, "intransitivity", "", "",
                  rec.intransitivity);
    for (const auto& [level, scores] : rec.detection) {
      const std::string tag = level_percent(level);
      if (scores.recall)
        append_metric(out, rec.replication, model, "recall", "curl", tag, *scores.recall);
      if (scores.precision)
        append_metric(out, rec.replication, model, "precision", "curl", tag,
                      *scores.precision);
      if (scores.f1)
        append_metric(out, rec.replication, model, "f1", "curl", tag, *scores.f1);
    }
    for (const auto& [level, rates] : rec.coverage) {
      const std::string tag = level_percent(level);
      append_metric(out, rec.replication, model, "cp", "m", tag, rates.matchup);
      append_metric(out, rec.replication, model, "cp", "grad", tag, rates.grad);
      append_metric(out, rec.replication, model, "cp", "curl", tag, rates.curl);
    }
    // timing lives in the JSON aggregate: the CSV stays byte-deterministic
  }
  write_atomic(prefix + "_report.csv", out.str());

  // JSON aggregate
  json root;
  root["format_version"] = kFormatVersion;
  json cfg;
  cfg["n_entities"] = report.config.n_entities;
  cfg["trials_lo"] = report.config.trials.lo;
  cfg["trials_hi"] = report.config.trials.hi;
  cfg["sparsity"] = report.config.sparsity;
  cfg["score_scale"] = report.config.score_scale;
  cfg["curl_scale"] = report.config.curl_scale;
  cfg["replications"] = report.config.replications;
  cfg["master_seed"] = report.config.master_seed;
  cfg["n_iterations"] = report.config.mcmc.n_iterations;
  cfg["burn_in"] = report.config.mcmc.burn_in;
  cfg["thin"] = report.config.mcmc.thin;
  root["config"] = cfg;
  root["generated_at"] = timestamp_utc();
  root["bibt"] = aggregate_to_json(report, ModelKind::bibt);
  root["baseline"] = aggregate_to_json(report, ModelKind::baseline);
  write_atomic(prefix + "_report.json", root.dump(2) + "\n");
}

void write_sparsity_sweep(const std::vector<StudyReport>& reports,
                          const std::string& path) {
  std::ostringstream out;
  out << "# format_version=" << kFormatVersion << "\n";
  out << "sparsity,model,metric,value\n";
  for (const auto& report : reports) {
    const json per_model[2] = {aggregate_to_json(report, ModelKind::bibt),
                               aggregate_to_json(report, ModelKind::baseline)};
    const char* names[2] = {"bibt", "baseline"};
    for (int m = 0; m < 2; ++m) {
      for (const auto& [metric, value] : per_model[m].items()) {
        if (!value.is_number()) continue;
        if (metric == "wall_seconds") continue;  // timing is not deterministic
        out << format_double(report.config.sparsity) << "," << names[m] << ","
            << metric << "," << format_double(value.get<double>()) << "\n";
      }
    }
  }
  write_atomic(path, out.str());
}

void write_matrix_csv(const Eigen::MatrixXd& matrix, const std::string& path) {
  std::ostringstream out;
  for (int r = 0; r < matrix.rows(); ++r) {
    for (int c = 0; c < matrix.cols(); ++c) {
      out << (c ? "," : "") << format_double(matrix(r, c));
    }
    out << "\n";
  }
  write_atomic(path, out.str());
}

void write_text_atomic(const std::string& path, const std::string& content) {
  write_atomic(path, content);
}

}  // namespace bibt
