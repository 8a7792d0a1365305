/*
 * Copyright 2026 The rfalcf Authors
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

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "rfalcf/rfalcf.hpp"

namespace fs = std::filesystem;
using namespace rfalcf;

namespace {

FileFormat resolve_format(const std::string& flag, const std::string& path) {
  if (flag == "csv") return FileFormat::csv;
  if (flag == "bin") return FileFormat::binary;
  return fs::path(path).extension() == ".csv" ? FileFormat::csv : FileFormat::binary;
}

LabeledDataset load_input(const std::string& path, const std::string& format) {
  if (!fs::exists(path))
    throw InvalidInputError("input file not found: '" + path + "'");
  return load_matrix(path, resolve_format(format, path));
}

RunConfig load_config_or_default(const std::string& path) {
  if (path.empty()) return RunConfig{};
  return load_run_config(path);
}

void save_state_matrix(const Matrix& m, const fs::path& path) {
  LabeledDataset wrapped;
  wrapped.matrix.values = m;
  wrapped.labels.assign(static_cast<std::size_t>(m.cols()), 0);
  save_matrix(wrapped, path.string(), FileFormat::binary);
}

std::string variance_tag(double v) {
  std::string tag = detail::format_double(v);
  for (char& c : tag)
    if (c == '.' || c == '-' || c == '+') c = '_';
  return tag;
}

Matrix top_k_per_row(const Matrix& weights, int k) {
  Matrix out = Matrix::Zero(weights.rows(), weights.cols());
  std::vector<Eigen::Index> idx(weights.cols());
  for (Eigen::Index i = 0; i < weights.rows(); ++i) {
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
      return weights(i, a) > weights(i, b);
    });
    for (int j = 0; j < k && j < static_cast<int>(idx.size()); ++j)
      out(i, idx[j]) = weights(i, idx[j]);
  }
  return out;
}

RepresentationFn make_representation(const RunConfig& cfg) {
  if (cfg.method == "rfa-lcf") {
    return [cfg](const DataMatrix& sub, int rank, std::uint64_t seed) {
      Hyperparams p = cfg.params;
      p.rank = rank;
      return fit(sub, p, seed).state.v;
    };
  }
  if (cfg.method == "cf") {
    return [cfg](const DataMatrix& sub, int rank, std::uint64_t seed) {
      return cf_fit(sub, rank, cfg.params.max_iter, seed, cfg.params.guard_eps)
          .representation;
    };
  }
  return [cfg](const DataMatrix& sub, int rank, std::uint64_t seed) {
    return nmf_fit(sub, rank, cfg.params.max_iter, seed, cfg.params.guard_eps)
        .representation;
  };
}

int cmd_fit(const std::string& input, const std::string& config,
            const std::string& out_dir, std::optional<std::uint64_t> seed,
            const std::string& format) {
  const LabeledDataset dataset = load_input(input, format);
  RunConfig cfg = load_config_or_default(config);
  if (seed) cfg.seed = *seed;

  const FitResult result = fit(dataset.matrix, cfg.params, cfg.seed);

  fs::create_directories(out_dir);
  const fs::path out(out_dir);
  save_state_matrix(result.state.p, out / "state_P.bin");
  save_state_matrix(result.state.w, out / "state_W.bin");
  save_state_matrix(result.state.v, out / "state_V.bin");
  save_state_matrix(result.state.q, out / "state_Q.bin");
  save_state_matrix(result.state.b, out / "state_b.bin");

  std::ofstream trace_file(out / "trace.csv");
  if (!trace_file) throw IoError("cannot open trace.csv for writing");
  export_trace(result.trace, trace_file);

  std::cout << "fit: iterations=" << result.iterations_run
            << " converged=" << (result.converged ? "yes" : "no")
            << " final_total="
            << detail::format_double(result.trace.rows.back().breakdown.total)
            << "\n";
  return 0;
}

int cmd_eval(const std::string& input, const std::string& config,
             const std::string& out_dir, std::optional<std::uint64_t> seed,
             const std::string& format) {
  const LabeledDataset dataset = load_input(input, format);
  RunConfig cfg = load_config_or_default(config);
  if (seed) cfg.seed = *seed;

  ProtocolConfig protocol;
  protocol.k_min = cfg.k_min;
  protocol.k_max = cfg.k_max;
  protocol.subset_draws = cfg.subset_draws;
  protocol.restarts = cfg.restarts;
  protocol.seed = cfg.seed;

  const EvalReport report =
      run_protocol(dataset.matrix, dataset.labels, protocol, make_representation(cfg));

  fs::create_directories(out_dir);
  std::ofstream eval_file(fs::path(out_dir) / "eval.csv");
  if (!eval_file) throw IoError("cannot open eval.csv for writing");
  export_eval(report, eval_file);

  for (const std::string& warning : report.warnings)
    std::cerr << "warning: " << warning << "\n";
  std::cout << "eval: method=" << cfg.method << " mean_ac="
            << detail::format_double(report.mean_ac)
            << " mean_f=" << detail::format_double(report.mean_f) << "\n";
  return 0;
}

int cmd_corrupt(const std::string& input, const std::string& out_dir,
                std::vector<double> variances, double fraction,
                std::uint64_t seed, const std::string& format) {
  const LabeledDataset dataset = load_input(input, format);
  if (variances.empty())
    for (int v = 0; v <= 100; v += 10) variances.push_back(v);

  fs::create_directories(out_dir);
  const FileFormat out_format = resolve_format(format, input);
  const std::string ext = out_format == FileFormat::csv ? ".csv" : ".bin";
  const std::string stem = fs::path(input).stem().string();
  for (double v : variances) {
    const LabeledDataset corrupted = corrupt_gaussian(dataset, v, fraction, seed);
    const fs::path path = fs::path(out_dir) / (stem + "_v" + variance_tag(v) + ext);
    save_matrix(corrupted, path.string(), out_format);
    std::cout << "corrupt: variance=" << detail::format_double(v) << " -> "
              << path.string() << "\n";
  }
  return 0;
}

int cmd_graph(const std::string& input, const std::string& config,
              const std::string& out_dir, int neighbors,
              std::optional<std::uint64_t> seed, const std::string& format) {
  const LabeledDataset dataset = load_input(input, format);
  RunConfig cfg = load_config_or_default(config);
  if (seed) cfg.seed = *seed;
  if (neighbors < 1) throw InvalidInputError("--neighbors must be >= 1");

  // cosine adjacency, negative similarities clamped, zero diagonal
  const Eigen::Index n = dataset.matrix.samples();
  Matrix cosine = Matrix::Zero(n, n);
  const Vector norms = dataset.matrix.values.colwise().norm();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double denom = norms(i) * norms(j);
      if (denom > 0.0)
        cosine(i, j) =
            std::max(0.0, dataset.matrix.values.col(i).dot(dataset.matrix.values.col(j)) / denom);
    }

  const FitResult result = fit(dataset.matrix, cfg.params, cfg.seed);

  fs::create_directories(out_dir);
  const auto save_graph = [&](const Matrix& weights, const std::string& name) {
    LabeledDataset graph;
    // store transposed so each CSV line is one graph row
    graph.matrix.values = top_k_per_row(weights, neighbors).transpose();
    graph.labels = dataset.labels;
    save_matrix(graph, (fs::path(out_dir) / name).string(), FileFormat::csv);
  };
  save_graph(cosine, "cosine_adjacency.csv");
  save_graph(result.state.q, "adaptive_q.csv");
  std::cout << "graph: neighbors=" << neighbors << " samples=" << n << "\n";
  return 0;
}

int cmd_synth(const std::string& out_path, int dim, int per_class, int classes,
              double spread, std::uint64_t seed, const std::string& format) {
  const LabeledDataset dataset = synth_blobs(dim, per_class, classes, spread, seed);
  if (const fs::path parent = fs::path(out_path).parent_path(); !parent.empty())
    fs::create_directories(parent);
  save_matrix(dataset, out_path, resolve_format(format, out_path));
  std::cout << "synth: wrote " << out_path << " (" << dim << " x "
            << per_class * classes << ", " << classes << " classes)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robust flexible auto-weighted local-coordinate concept factorization"};
  app.require_subcommand(1);

  std::string input, config, out = "out", format = "auto";
  std::optional<std::uint64_t> seed;

  auto add_common = [&](CLI::App* cmd, bool needs_input) {
    if (needs_input) cmd->add_option("--input", input, "input dataset file")->required();
    cmd->add_option("--config", config, "key=value run configuration file");
    cmd->add_option("--out", out, "output directory");
    cmd->add_option("--seed", seed, "seed override");
    cmd->add_option("--format", format, "file format: auto, csv or bin")
        ->check(CLI::IsMember({"auto", "csv", "bin"}));
  };

  CLI::App* fit_cmd = app.add_subcommand("fit", "factorize a dataset and export the state");
  add_common(fit_cmd, true);

  CLI::App* eval_cmd = app.add_subcommand("eval", "run the clustering evaluation protocol");
  add_common(eval_cmd, true);

  CLI::App* corrupt_cmd = app.add_subcommand("corrupt", "export noise-corrupted copies");
  add_common(corrupt_cmd, true);
  std::vector<double> variances;
  double fraction = 0.3;
  corrupt_cmd->add_option("--variances", variances,
                          "noise variances (default 0,10,...,100)")
      ->delimiter(',');
  corrupt_cmd->add_option("--fraction", fraction, "fraction of pixels corrupted per sample");

  CLI::App* graph_cmd = app.add_subcommand("graph", "export cosine and adaptive adjacency");
  add_common(graph_cmd, true);
  int neighbors = 7;
  graph_cmd->add_option("--neighbors", neighbors, "kept entries per row");

  CLI::App* synth_cmd = app.add_subcommand("synth", "generate a Gaussian-blob dataset");
  std::string synth_out;
  int dim = 50, per_class = 50, classes = 3;
  double spread = 0.06;
  synth_cmd->add_option("--out", synth_out, "output dataset file")->required();
  synth_cmd->add_option("--dim", dim, "feature dimension");
  synth_cmd->add_option("--per-class", per_class, "samples per class");
  synth_cmd->add_option("--classes", classes, "number of classes");
  synth_cmd->add_option("--spread", spread, "per-coordinate standard deviation");
  synth_cmd->add_option("--seed", seed, "seed override");
  synth_cmd->add_option("--format", format, "file format: auto, csv or bin")
      ->check(CLI::IsMember({"auto", "csv", "bin"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(fit_cmd)) return cmd_fit(input, config, out, seed, format);
    if (app.got_subcommand(eval_cmd)) return cmd_eval(input, config, out, seed, format);
    if (app.got_subcommand(corrupt_cmd))
      return cmd_corrupt(input, out, variances, fraction, seed.value_or(0), format);
    if (app.got_subcommand(graph_cmd))
      return cmd_graph(input, config, out, neighbors, seed, format);
    if (app.got_subcommand(synth_cmd))
      return cmd_synth(synth_out, dim, per_class, classes, spread, seed.value_or(0), format);
  } catch (const InvalidInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
