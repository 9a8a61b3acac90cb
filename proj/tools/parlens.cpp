#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "parlens/contention_sim.hpp"
#include "parlens/csv.hpp"
#include "parlens/learners.hpp"
#include "parlens/layout.hpp"
#include "parlens/plot.hpp"
#include "parlens/specialization.hpp"
#include "parlens/stats.hpp"
#include "parlens/sweep.hpp"
#include "parlens/task_model.hpp"

namespace {

using parlens::ValidationError;

std::uint64_t global_seed(std::uint64_t flag_seed, bool flag_set) {
  if (flag_set) return flag_seed;
  if (const char* env = std::getenv("PARLENS_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ValidationError("PARLENS_SEED is not an integer");
    }
  }
  return 0;
}

std::string dir_of(const std::string& path) {
  auto pos = path.find_last_of('/');
  return pos == std::string::npos ? std::string() : path.substr(0, pos);
}

parlens::TaskGraph load_task(const std::string& layout_path,
                             const std::string& task_path,
                             parlens::LayoutGraph* graph_out,
                             bool* has_graph) {
  parlens::TaskSpec spec = parlens::load_task_spec(task_path);
  *has_graph = false;
  if (!layout_path.empty()) {
    *graph_out = parlens::build_graph(parlens::load_layout(layout_path));
    *has_graph = true;
    return parlens::analyze_task(graph_out, spec);
  }
  return parlens::analyze_task(nullptr, spec);
}

void cmd_analyze(const std::string& layout_path, const std::string& task_path,
                 const std::string& graph_out_path, int agents) {
  parlens::LayoutGraph graph;
  bool has_graph = false;
  parlens::TaskGraph task = load_task(layout_path, task_path, &graph, &has_graph);
  auto report = parlens::parallelizability(task, agents);
  auto diagnosis = parlens::diagnose(report);
  if (!graph_out_path.empty()) {
    if (!has_graph)
      throw ValidationError("--graph-out needs --layout");
    auto centrality = parlens::edge_betweenness(graph);
    std::ofstream out(graph_out_path);
    if (!out) throw ValidationError("cannot write '" + graph_out_path + "'");
    out << parlens::graph_to_json(graph, &centrality).dump(2) << "\n";
  }
  std::cout << parlens::report_to_json(report, diagnosis).dump(2) << "\n";
}

void cmd_predict(const std::string& layout_path, const std::string& task_path,
                 int agents) {
  parlens::LayoutGraph graph;
  bool has_graph = false;
  parlens::TaskGraph task = load_task(layout_path, task_path, &graph, &has_graph);
  auto report = parlens::parallelizability(task, agents);
  auto diagnosis = parlens::diagnose(report);

  std::printf("S(N=%d, C) = %s   regime: %s\n", agents,
              parlens::format_double(report.s).c_str(),
              parlens::regime_name(report.regime).c_str());
  std::printf("%-18s %10s %12s %12s %10s %12s\n", "subtask", "f", "C_spatial",
              "C_resource", "C", "limited_by");
  for (const auto& sub : report.per_subtask) {
    std::printf("%-18s %10.4f %12s %12s %10s %12s\n", sub.id.c_str(),
                sub.fraction, sub.spatial_capacity.str().c_str(),
                sub.resource_capacity.str().c_str(),
                sub.concurrency.str().c_str(),
                parlens::limiting_dimension_name(sub.limiting).c_str());
  }
  if (diagnosis.empty()) {
    std::printf("no bottlenecked subtasks: S = N\n");
  } else {
    std::printf("marginal gains from +1 concurrency:\n");
    for (const auto& entry : diagnosis) {
      std::printf("  %-18s %-9s dS = %s\n", entry.id.c_str(),
                  parlens::limiting_dimension_name(entry.dimension).c_str(),
                  parlens::format_double(entry.delta_s).c_str());
    }
  }
}

void cmd_si(const std::string& log_path, double gamma) {
  auto log = parlens::TrajectoryLog::load(log_path);
  auto ids = log.agent_ids();
  if (ids.size() < 2)
    throw ValidationError("SI needs at least 2 agents in the log");
  std::vector<parlens::ActionDistribution> dists;
  for (const auto& id : ids)
    dists.push_back(parlens::visitation_distribution(log, id, gamma));
  std::cout << parlens::si_report_json(ids, dists).dump(2) << "\n";
}

void cmd_simulate(const std::string& spec_path, bool compare,
                  std::uint64_t seed, bool seed_set) {
  std::ifstream in(spec_path);
  if (!in) throw ValidationError("cannot open sim spec '" + spec_path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad JSON: ") + e.what());
  }
  parlens::SimConfig config = parlens::parse_sim_spec(j, dir_of(spec_path));
  if (seed_set || !j.contains("seed")) config.seed = seed;
  if (compare) {
    std::cout << parlens::comparison_to_json(parlens::compare_policies(config)).dump(2)
              << "\n";
  } else {
    std::cout << parlens::sim_result_to_json(parlens::simulate(config)).dump(2)
              << "\n";
  }
}

void cmd_stats(const std::string& csv_path, const std::string& x_col,
               const std::string& y_col, bool logistic, double threshold,
               double split, std::uint64_t seed) {
  auto table = parlens::CsvTable::read_file(csv_path);
  auto xs_raw = table.numeric_column(x_col);
  auto ys_raw = table.numeric_column(y_col);
  std::vector<double> xs, ys;
  for (size_t i = 0; i < xs_raw.size(); ++i) {
    if (std::isfinite(xs_raw[i]) && std::isfinite(ys_raw[i])) {
      xs.push_back(xs_raw[i]);
      ys.push_back(ys_raw[i]);
    }
  }
  Eigen::VectorXd x = Eigen::Map<Eigen::VectorXd>(xs.data(), xs.size());
  Eigen::VectorXd y = Eigen::Map<Eigen::VectorXd>(ys.data(), ys.size());
  auto corr = parlens::pearson(x, y, 10000, seed);

  nlohmann::json out{{"n", xs.size()}, {"r", corr.r}, {"p", corr.p}};
  if (logistic) {
    std::vector<int> labels;
    for (double v : ys) labels.push_back(v >= threshold ? 1 : 0);
    Eigen::MatrixXd features(x.size(), 1);
    features.col(0) = x;

    // seeded shuffle, then an 80/20-style split
    std::vector<int> order(labels.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::mt19937_64 rng(seed);
    for (size_t i = order.size() - 1; i > 0; --i) {
      std::uniform_int_distribution<size_t> pick(0, i);
      std::swap(order[i], order[pick(rng)]);
    }
    size_t n_train = std::max<size_t>(
        1, static_cast<size_t>(split * static_cast<double>(order.size())));
    n_train = std::min(n_train, order.size() - 1);

    Eigen::MatrixXd train_x(n_train, 1), test_x(order.size() - n_train, 1);
    std::vector<int> train_y, test_y;
    for (size_t i = 0; i < order.size(); ++i) {
      if (i < n_train) {
        train_x(static_cast<Eigen::Index>(i), 0) = x[order[i]];
        train_y.push_back(labels[order[i]]);
      } else {
        test_x(static_cast<Eigen::Index>(i - n_train), 0) = x[order[i]];
        test_y.push_back(labels[order[i]]);
      }
    }
    auto model = parlens::logistic_fit(train_x, train_y, true);
    auto train_pred = parlens::logistic_predict(model, train_x);
    auto train_report = parlens::classification_report(train_y, train_pred.labels);
    auto test_pred = parlens::logistic_predict(model, test_x);
    auto test_report = parlens::classification_report(test_y, test_pred.labels);

    auto metrics_json = [](const parlens::ClassificationReport& r) {
      return nlohmann::json{
          {"accuracy", r.accuracy},
          {"class0", {{"precision", r.per_class[0].precision},
                      {"recall", r.per_class[0].recall},
                      {"f1", r.per_class[0].f1}}},
          {"class1", {{"precision", r.per_class[1].precision},
                      {"recall", r.per_class[1].recall},
                      {"f1", r.per_class[1].f1}}}};
    };
    out["logistic"] = {{"threshold", threshold},
                       {"split", split},
                       {"weight", model.weights[0]},
                       {"bias", model.bias},
                       {"train", metrics_json(train_report)},
                       {"test", metrics_json(test_report)}};
  }
  std::cout << out.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"parlens: task parallelizability and specialization analysis"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  bool seed_set = false;
  app.add_option_function<std::uint64_t>(
         "--seed", [&](std::uint64_t s) { seed = s; seed_set = true; },
         "global seed (overrides PARLENS_SEED)")
      ->expected(1);

  std::string layout_path, task_path, graph_out_path;
  int agents = 2;
  auto* analyze = app.add_subcommand("analyze", "parallelizability report JSON");
  analyze->add_option("--layout", layout_path, "layout grid file");
  analyze->add_option("--task", task_path, "task spec JSON")->required();
  analyze->add_option("--graph-out", graph_out_path, "write layout graph JSON");
  analyze->add_option("--agents", agents, "team size N")->default_val(2);

  auto* predict = app.add_subcommand("predict", "regime and bottleneck table");
  predict->add_option("--layout", layout_path, "layout grid file");
  predict->add_option("--task", task_path, "task spec JSON")->required();
  predict->add_option("--agents", agents, "team size N")->required();

  std::string log_path;
  double gamma = 0.99;
  auto* si_cmd = app.add_subcommand("si", "specialization index from a trajectory log");
  si_cmd->add_option("--log", log_path, "trajectory CSV")->required();
  si_cmd->add_option("--gamma", gamma, "discount for visitation weights")
      ->default_val(0.99);

  std::string spec_path, out_path;
  bool compare = false;
  auto* simulate = app.add_subcommand("simulate", "contention simulator");
  simulate->add_option("--spec", spec_path, "sim spec JSON")->required();
  simulate->add_flag("--compare", compare, "run generalist vs specialist");

  auto* learn = app.add_subcommand("learn", "tabular learner sweep CSV");
  learn->add_option("--spec", spec_path, "learner spec JSON")->required();
  learn->add_option("--out", out_path, "output CSV")->required();

  bool resume = false;
  auto* sweep = app.add_subcommand("sweep", "full pipeline sweep CSV");
  sweep->add_option("--spec", spec_path, "sweep spec JSON")->required();
  sweep->add_option("--out", out_path, "output CSV")->required();
  sweep->add_flag("--resume", resume, "keep completed env_ids in the output");

  std::string csv_path, x_col, y_col;
  bool logistic = false;
  double threshold = 0.5, split = 0.8;
  auto* stats = app.add_subcommand("stats", "correlation and classification");
  stats->add_option("--csv", csv_path, "input CSV")->required();
  stats->add_option("--x", x_col, "x column")->required();
  stats->add_option("--y", y_col, "y column")->required();
  stats->add_flag("--logistic", logistic, "fit a class-weighted classifier");
  stats->add_option("--threshold", threshold, "y threshold for the positive class")
      ->default_val(0.5);
  stats->add_option("--si-threshold", threshold,
                    "alias for --threshold (SI >= t is specialist)");
  stats->add_option("--split", split, "train fraction")->default_val(0.8);

  auto* plot = app.add_subcommand("plot", "SVG scatter plot");
  plot->add_option("--csv", csv_path, "input CSV")->required();
  plot->add_option("--x", x_col, "x column")->required();
  plot->add_option("--y", y_col, "y column")->required();
  plot->add_option("--out", out_path, "output SVG")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    std::uint64_t s = global_seed(seed, seed_set);
    if (analyze->parsed()) {
      cmd_analyze(layout_path, task_path, graph_out_path, agents);
    } else if (predict->parsed()) {
      cmd_predict(layout_path, task_path, agents);
    } else if (si_cmd->parsed()) {
      cmd_si(log_path, gamma);
    } else if (simulate->parsed()) {
      cmd_simulate(spec_path, compare, s, seed_set || std::getenv("PARLENS_SEED"));
    } else if (learn->parsed()) {
      parlens::run_learn_spec(spec_path, s).write_file(out_path);
    } else if (sweep->parsed()) {
      parlens::run_sweep(spec_path, out_path, resume, s);
    } else if (stats->parsed()) {
      cmd_stats(csv_path, x_col, y_col, logistic, threshold, split, s);
    } else if (plot->parsed()) {
      parlens::render_scatter(parlens::CsvTable::read_file(csv_path), x_col,
                              y_col, out_path);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
