// Command-line front end: dataset generation, multi-restart solves with
// metric reports, model comparison tables, and bicluster extraction.
#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ssnmf/analysis.hpp"
#include "ssnmf/data.hpp"
#include "ssnmf/metrics.hpp"
#include "ssnmf/solver.hpp"
#include "ssnmf/types.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt17(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.17g", v);
  return buffer;
}

double parse_real(const std::string& token) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end != token.c_str() + token.size() || token.empty() || errno == ERANGE)
    throw std::runtime_error("cannot parse '" + token + "' as a number");
  return v;
}

// SSNMF_THREADS caps restart parallelism; otherwise use what the machine has.
unsigned resolve_threads(int restarts) {
  unsigned threads = std::thread::hardware_concurrency();
  if (threads == 0) threads = 1;
  if (const char* env = std::getenv("SSNMF_THREADS")) {
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && errno == 0 && v >= 1)
      threads = static_cast<unsigned>(v);
  }
  return std::min(threads, static_cast<unsigned>(std::max(restarts, 1)));
}

struct DatasetOptions {
  std::string path;
  std::string generator;
  std::string labels_path;
};

struct ModelOptions {
  std::string model = "nmf";
  int rank = 1;
  long long k = 0;
  double rho = 0.1;
  double gamma = 1.5;
  int continuation_steps = 10;
};

struct RunOptions {
  double epsilon = 1e-3;
  int max_iter = 2000;
  std::string accelerate = "on";
  std::string init = "random";
  int restarts = 1;
  std::uint32_t seed = 0;
};

void add_dataset_options(CLI::App* cmd, DatasetOptions& opts) {
  cmd->add_option("--dataset", opts.path, "Matrix file (csv/tsv/mtx)");
  cmd->add_option("--generate", opts.generator, "Builtin dataset generator")
      ->check(CLI::IsMember({"three-block", "outlier"}));
  cmd->add_option("--labels", opts.labels_path,
                  "Ground-truth labels, one per line (with --dataset only)");
}

void add_model_options(CLI::App* cmd, ModelOptions& opts) {
  cmd->add_option("--model", opts.model, "Factorization variant")
      ->check(CLI::IsMember({"nmf", "onmf", "nmf-l20", "nmf-lc0", "nmf-l0",
                             "onmf-l20", "onmf-lc0", "onmf-l0",
                             "onmf-l20-rho"}));
  cmd->add_option("--rank", opts.rank, "Factorization rank r")
      ->required()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--k", opts.k, "Sparsity budget for constrained variants")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--rho", opts.rho, "Initial orthogonality weight")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--gamma", opts.gamma, "Continuation growth factor");
  cmd->add_option("--continuation-steps", opts.continuation_steps,
                  "Continuation stage count")
      ->check(CLI::PositiveNumber);
}

void add_run_options(CLI::App* cmd, RunOptions& opts) {
  cmd->add_option("--epsilon", opts.epsilon, "Relative-change tolerance");
  cmd->add_option("--max-iter", opts.max_iter, "Iteration cap per solve")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--accelerate", opts.accelerate, "Extrapolated steps")
      ->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--init", opts.init, "Initialization scheme")
      ->check(CLI::IsMember({"random", "warm"}));
  cmd->add_option("--restarts", opts.restarts, "Independent solves")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", opts.seed, "Base seed; restart i uses seed + i");
}

// Dataset plus a stable description for the report's config block.
std::pair<ssnmf::LabeledDataset, std::string> resolve_dataset(
    const DatasetOptions& opts, std::uint32_t seed) {
  const bool from_file = !opts.path.empty();
  const bool from_generator = !opts.generator.empty();
  if (from_file == from_generator)
    throw std::runtime_error("pass exactly one of --dataset and --generate");
  if (from_generator && !opts.labels_path.empty())
    throw std::runtime_error("--labels applies to --dataset only");

  if (from_generator) {
    ssnmf::LabeledDataset ds = opts.generator == "three-block"
                                   ? ssnmf::synthetic_three_block(seed)
                                   : ssnmf::synthetic_outlier(seed);
    return {std::move(ds),
            opts.generator + "(seed=" + std::to_string(seed) + ")"};
  }

  ssnmf::LabeledDataset ds = ssnmf::load_matrix(opts.path);
  if (!opts.labels_path.empty()) {
    ds.truth = ssnmf::load_labels(opts.labels_path);
    if (static_cast<ssnmf::Index>(ds.truth.size()) != ds.x.cols())
      throw std::runtime_error("labels count does not match sample count");
  }
  return {std::move(ds), opts.path};
}

ssnmf::ModelSpec build_spec(const ModelOptions& opts) {
  ssnmf::ModelSpec spec;
  spec.variant = ssnmf::variant_from_name(opts.model);
  spec.rank = opts.rank;
  spec.sparsity = opts.k;
  spec.rho0 = opts.rho;
  spec.gamma = opts.gamma;
  spec.continuation_steps = opts.continuation_steps;
  return spec;
}

ssnmf::SolverConfig build_config(const RunOptions& opts) {
  ssnmf::SolverConfig config;
  config.epsilon = opts.epsilon;
  config.max_iter = opts.max_iter;
  config.accelerate = opts.accelerate == "on";
  config.seed = opts.seed;
  config.init = opts.init == "warm" ? ssnmf::InitMethod::kNmfWarmStart
                                    : ssnmf::InitMethod::kRandomNormalAbs;
  return config;
}

int count_classes(const ssnmf::LabelVector& labels) {
  return static_cast<int>(std::set<int>(labels.begin(), labels.end()).size());
}

struct RestartResult {
  bool ok = false;
  std::string error;
  ssnmf::FactorPair factors;
  ssnmf::SolverReport report;
  ssnmf::LabelVector predicted;
  double orthogonality = 0.0;
  bool has_metrics = false;
  double nmi = 0.0;
  double purity = 0.0;
  bool has_entropy = false;
  double entropy = 0.0;
};

RestartResult run_one(const ssnmf::Matrix& x, const ssnmf::LabelVector& truth,
                      int truth_classes, const ssnmf::ModelSpec& spec,
                      const ssnmf::SolverConfig& base, int index) {
  RestartResult r;
  ssnmf::SolverConfig config = base;
  config.seed = base.seed + static_cast<std::uint32_t>(index);
  try {
    auto [factors, report] = ssnmf::solve_model(x, spec, config);
    r.factors = std::move(factors);
    r.report = std::move(report);
    r.predicted = ssnmf::assign_clusters(r.factors.h);
    r.orthogonality = ssnmf::orthogonality_score(r.factors.h);
    if (!truth.empty()) {
      r.has_metrics = true;
      r.nmi = ssnmf::nmi(r.predicted, truth);
      r.purity = ssnmf::purity(r.predicted, truth);
      if (truth_classes >= 2) {
        r.has_entropy = true;
        r.entropy = ssnmf::entropy_metric(r.predicted, truth);
      }
    }
    r.ok = true;
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

std::vector<RestartResult> run_restarts(const ssnmf::Matrix& x,
                                        const ssnmf::LabelVector& truth,
                                        const ssnmf::ModelSpec& spec,
                                        const ssnmf::SolverConfig& base,
                                        int restarts, unsigned threads) {
  const int truth_classes = truth.empty() ? 0 : count_classes(truth);
  std::vector<RestartResult> results(static_cast<std::size_t>(restarts));
  std::atomic<int> next{0};
  auto worker = [&] {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= restarts) break;
      results[static_cast<std::size_t>(i)] =
          run_one(x, truth, truth_classes, spec, base, i);
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return results;
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

// Sample standard deviation; a single observation reports 0 spread.
MeanStd mean_std(const std::vector<double>& values) {
  MeanStd out;
  if (values.empty()) return out;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

void write_trace(const std::string& path,
                 const std::vector<ssnmf::TraceEntry>& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "iteration,objective,relative_change,rho,accepted_extrapolation\n";
  for (const auto& e : trace)
    out << e.iteration << ',' << fmt17(e.objective) << ','
        << fmt17(e.relative_change) << ',' << fmt17(e.rho) << ','
        << (e.accepted_extrapolation ? 1 : 0) << '\n';
  if (!out) throw std::runtime_error(path + ": write failed");
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

const char* termination_name(ssnmf::Termination t) {
  return t == ssnmf::Termination::kTolerance ? "TOLERANCE" : "MAX_ITER";
}

json restart_json(const RestartResult& r, std::uint32_t base_seed, int index) {
  json j;
  j["restart"] = index;
  j["seed"] = base_seed + static_cast<std::uint32_t>(index);
  j["status"] = r.ok ? "ok" : "failed";
  if (!r.ok) {
    j["error"] = r.error;
    return j;
  }
  j["objective"] = r.factors.objective;
  j["iterations"] = static_cast<long long>(r.factors.iterations);
  j["termination"] = termination_name(r.report.termination);
  if (!r.report.rho_history.empty()) j["rho_history"] = r.report.rho_history;
  j["orthogonality"] = r.orthogonality;
  if (r.has_metrics) {
    json m;
    m["nmi"] = r.nmi;
    m["purity"] = r.purity;
    if (r.has_entropy) m["entropy"] = r.entropy;
    j["metrics"] = m;
  }
  return j;
}

json aggregate_json(const std::vector<RestartResult>& results) {
  std::vector<double> orth, nmis, purities, entropies;
  bool all_have_entropy = true;
  for (const auto& r : results) {
    if (!r.ok) continue;
    orth.push_back(r.orthogonality);
    if (r.has_metrics) {
      nmis.push_back(r.nmi);
      purities.push_back(r.purity);
      if (r.has_entropy)
        entropies.push_back(r.entropy);
      else
        all_have_entropy = false;
    }
  }
  json agg = json::object();
  if (!orth.empty()) agg["orth_mean"] = mean_std(orth).mean;
  if (!nmis.empty()) {
    const MeanStd n = mean_std(nmis);
    const MeanStd p = mean_std(purities);
    agg["nmi_mean"] = n.mean;
    agg["nmi_std"] = n.std;
    agg["purity_mean"] = p.mean;
    agg["purity_std"] = p.std;
    if (all_have_entropy && !entropies.empty()) {
      const MeanStd e = mean_std(entropies);
      agg["entropy_mean"] = e.mean;
      agg["entropy_std"] = e.std;
    }
  }
  return agg;
}

json config_json(const std::string& dataset, const ModelOptions& model,
                 const RunOptions& run, unsigned threads) {
  json j;
  j["accelerate"] = run.accelerate == "on";
  j["continuation_steps"] = model.continuation_steps;
  j["dataset"] = dataset;
  j["epsilon"] =
      std::isfinite(run.epsilon) ? json(run.epsilon) : json(fmt17(run.epsilon));
  j["gamma"] = model.gamma;
  j["init"] = run.init;
  j["k"] = model.k;
  j["max_iter"] = run.max_iter;
  j["model"] = model.model;
  j["rank"] = model.rank;
  j["restarts"] = run.restarts;
  j["rho0"] = model.rho;
  j["seed"] = run.seed;
  j["threads"] = threads;
  j["version"] = ssnmf::kVersion;
  return j;
}

int cmd_generate(const std::string& kind, std::uint32_t seed,
                 const std::string& out_dir) {
  const ssnmf::LabeledDataset ds = kind == "three-block"
                                       ? ssnmf::synthetic_three_block(seed)
                                       : ssnmf::synthetic_outlier(seed);
  fs::create_directories(out_dir);
  const fs::path base(out_dir);
  ssnmf::save_matrix((base / "X.csv").string(), ds.x);
  ssnmf::save_labels((base / "labels.csv").string(), ds.truth);
  std::cout << "wrote " << (base / "X.csv").string() << " ("
            << ds.x.rows() << "x" << ds.x.cols() << ") and "
            << (base / "labels.csv").string() << "\n";
  return 0;
}

int cmd_solve(const DatasetOptions& data_opts, const ModelOptions& model_opts,
              const RunOptions& run_opts, const std::string& out_dir) {
  const auto [ds, description] = resolve_dataset(data_opts, run_opts.seed);
  const ssnmf::ModelSpec spec = build_spec(model_opts);
  const ssnmf::SolverConfig base = build_config(run_opts);
  const unsigned threads = resolve_threads(run_opts.restarts);

  const auto results =
      run_restarts(ds.x, ds.truth, spec, base, run_opts.restarts, threads);

  fs::create_directories(out_dir);
  const fs::path base_dir(out_dir);
  json restarts = json::array();
  int failures = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const RestartResult& r = results[i];
    restarts.push_back(restart_json(r, run_opts.seed, static_cast<int>(i)));
    if (!r.ok) {
      ++failures;
      std::cerr << "restart " << i << " failed: " << r.error << "\n";
      continue;
    }
    const fs::path dir = base_dir / ("restart_" + std::to_string(i));
    fs::create_directories(dir);
    ssnmf::save_matrix((dir / "W.csv").string(), r.factors.w,
                       ds.feature_names, {});
    ssnmf::save_matrix((dir / "H.csv").string(), r.factors.h, {},
                       ds.sample_names);
    ssnmf::save_labels((dir / "labels.csv").string(), r.predicted);
    write_trace((dir / "trace.csv").string(), r.report.trace);
    write_json(dir / "report.json",
               restart_json(r, run_opts.seed, static_cast<int>(i)));
    std::cout << "restart " << i << ": objective=" << fmt17(r.factors.objective)
              << " iterations=" << r.factors.iterations << " "
              << termination_name(r.report.termination) << "\n";
  }

  json report;
  report["config"] = config_json(description, model_opts, run_opts, threads);
  report["restarts"] = restarts;
  report["aggregate"] = aggregate_json(results);
  write_json(base_dir / "report.json", report);
  std::cout << "report: " << (base_dir / "report.json").string() << "\n";
  return failures == 0 ? 0 : 1;
}

int cmd_compare(const DatasetOptions& data_opts,
                const std::vector<std::string>& models,
                const ModelOptions& shared_opts, const RunOptions& run_opts,
                const std::string& out_dir) {
  const auto [ds, description] = resolve_dataset(data_opts, run_opts.seed);
  if (ds.truth.empty())
    throw std::runtime_error("compare needs ground-truth labels");
  if (count_classes(ds.truth) < 2)
    throw std::runtime_error("compare needs at least two truth classes");

  const ssnmf::SolverConfig base = build_config(run_opts);
  const unsigned threads = resolve_threads(run_opts.restarts);

  struct Row {
    std::string model;
    MeanStd nmi, purity, entropy;
  };
  std::vector<Row> rows;
  int failures = 0;
  for (const std::string& model : models) {
    ModelOptions opts = shared_opts;
    opts.model = model;
    const auto results = run_restarts(ds.x, ds.truth, build_spec(opts), base,
                                      run_opts.restarts, threads);
    std::vector<double> nmis, purities, entropies;
    for (const auto& r : results) {
      if (!r.ok) {
        ++failures;
        std::cerr << model << " restart failed: " << r.error << "\n";
        continue;
      }
      nmis.push_back(r.nmi);
      purities.push_back(r.purity);
      entropies.push_back(r.entropy);
    }
    rows.push_back(
        {model, mean_std(nmis), mean_std(purities), mean_std(entropies)});
  }

  fs::create_directories(out_dir);
  const fs::path csv_path = fs::path(out_dir) / "comparison.csv";
  std::ofstream csv(csv_path);
  if (!csv)
    throw std::runtime_error(csv_path.string() + ": cannot open for writing");
  csv << "model,nmi_mean,nmi_std,purity_mean,purity_std,entropy_mean,"
         "entropy_std\n";
  for (const Row& row : rows)
    csv << row.model << ',' << fmt17(row.nmi.mean) << ',' << fmt17(row.nmi.std)
        << ',' << fmt17(row.purity.mean) << ',' << fmt17(row.purity.std) << ','
        << fmt17(row.entropy.mean) << ',' << fmt17(row.entropy.std) << '\n';
  if (!csv) throw std::runtime_error(csv_path.string() + ": write failed");

  std::printf("%-16s %-17s %-17s %-17s\n", "model", "nmi", "purity", "entropy");
  for (const Row& row : rows)
    std::printf("%-16s %7.4f +- %6.4f %7.4f +- %6.4f %7.4f +- %6.4f\n",
                row.model.c_str(), row.nmi.mean, row.nmi.std, row.purity.mean,
                row.purity.std, row.entropy.mean, row.entropy.std);
  std::cout << "table: " << csv_path.string() << "\n";
  return failures == 0 ? 0 : 1;
}

int cmd_biclusters(const std::string& w_path, const std::string& h_path,
                   const std::string& threshold_token,
                   const std::string& out_path) {
  const double threshold = parse_real(threshold_token);
  const ssnmf::LabeledDataset w_ds = ssnmf::load_matrix(w_path);
  const ssnmf::LabeledDataset h_ds = ssnmf::load_matrix(h_path);
  const auto biclusters =
      ssnmf::extract_biclusters(w_ds.x, h_ds.x, threshold, &std::cerr);

  const bool all_empty = std::all_of(
      biclusters.begin(), biclusters.end(),
      [](const ssnmf::Bicluster& b) { return b.feature_indices.empty(); });
  if (all_empty)
    std::cerr << "warning: no feature passes the z-score threshold "
              << threshold_token << " in any factor\n";

  const auto encode_threshold = [threshold]() {
    return std::isfinite(threshold) ? json(threshold) : json(fmt17(threshold));
  };
  json out;
  out["threshold"] = encode_threshold();
  json list = json::array();
  for (const auto& bc : biclusters) {
    json bj;
    bj["factor_index"] = static_cast<long long>(bc.factor_index);
    bj["threshold"] = encode_threshold();
    bj["feature_indices"] = bc.feature_indices;
    bj["sample_indices"] = bc.sample_indices;
    if (!w_ds.feature_names.empty()) {
      std::vector<std::string> names;
      for (ssnmf::Index i : bc.feature_indices)
        names.push_back(w_ds.feature_names[static_cast<std::size_t>(i)]);
      bj["features"] = names;
    }
    if (!h_ds.sample_names.empty()) {
      std::vector<std::string> names;
      for (ssnmf::Index j : bc.sample_indices)
        names.push_back(h_ds.sample_names[static_cast<std::size_t>(j)]);
      bj["samples"] = names;
    }
    list.push_back(bj);
  }
  out["biclusters"] = list;
  write_json(out_path, out);
  std::cout << "wrote " << out_path << " (" << biclusters.size()
            << " biclusters)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured sparse nonnegative matrix factorization toolkit"};
  app.require_subcommand(1);

  // generate
  auto* generate = app.add_subcommand("generate", "Write a synthetic dataset");
  std::string gen_kind;
  std::uint32_t gen_seed = 0;
  std::string gen_out = ".";
  generate->add_option("kind,--generate", gen_kind, "Dataset family")
      ->required()
      ->check(CLI::IsMember({"three-block", "outlier"}));
  generate->add_option("--seed", gen_seed, "Generator seed");
  generate->add_option("--out", gen_out, "Output directory");

  // solve
  auto* solve = app.add_subcommand("solve", "Run multi-restart factorizations");
  DatasetOptions solve_data;
  ModelOptions solve_model;
  RunOptions solve_run;
  std::string solve_out = "ssnmf_out";
  add_dataset_options(solve, solve_data);
  add_model_options(solve, solve_model);
  add_run_options(solve, solve_run);
  solve->add_option("--out", solve_out, "Output directory");

  // compare
  auto* compare =
      app.add_subcommand("compare", "Metric table across model variants");
  DatasetOptions compare_data;
  ModelOptions compare_model;
  RunOptions compare_run;
  std::vector<std::string> compare_models;
  std::string compare_out = "ssnmf_out";
  add_dataset_options(compare, compare_data);
  compare
      ->add_option("--model", compare_models,
                   "Variant to include (repeatable)")
      ->required()
      ->check(CLI::IsMember({"nmf", "onmf", "nmf-l20", "nmf-lc0", "nmf-l0",
                             "onmf-l20", "onmf-lc0", "onmf-l0",
                             "onmf-l20-rho"}));
  compare->add_option("--rank", compare_model.rank, "Factorization rank r")
      ->required()
      ->check(CLI::PositiveNumber);
  compare->add_option("--k", compare_model.k, "Sparsity budget")
      ->check(CLI::NonNegativeNumber);
  compare->add_option("--rho", compare_model.rho, "Initial orthogonality weight")
      ->check(CLI::NonNegativeNumber);
  compare->add_option("--gamma", compare_model.gamma, "Continuation growth");
  compare->add_option("--continuation-steps", compare_model.continuation_steps,
                      "Continuation stage count")
      ->check(CLI::PositiveNumber);
  add_run_options(compare, compare_run);
  compare->add_option("--out", compare_out, "Output directory");

  // biclusters
  auto* biclusters =
      app.add_subcommand("biclusters", "Extract biclusters from saved factors");
  std::string bc_w, bc_h, bc_threshold, bc_out = "biclusters.json";
  biclusters->add_option("W", bc_w, "W matrix file")->required();
  biclusters->add_option("H", bc_h, "H matrix file")->required();
  biclusters
      ->add_option("--threshold-T", bc_threshold, "z-score cutoff (inf allowed)")
      ->required();
  biclusters->add_option("--out", bc_out, "Output JSON path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return cmd_generate(gen_kind, gen_seed, gen_out);
    if (solve->parsed())
      return cmd_solve(solve_data, solve_model, solve_run, solve_out);
    if (compare->parsed())
      return cmd_compare(compare_data, compare_models, compare_model,
                         compare_run, compare_out);
    if (biclusters->parsed())
      return cmd_biclusters(bc_w, bc_h, bc_threshold, bc_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
