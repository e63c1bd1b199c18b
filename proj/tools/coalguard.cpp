// Command-line front end: validate, run, analyze and bench scenarios.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "coalguard/bench.hpp"
#include "coalguard/scenario.hpp"

namespace {

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> sizes;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) sizes.push_back(static_cast<std::size_t>(std::stoul(item)));
  }
  return sizes;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace coalguard;

  CLI::App app{"Blocks hidden-coalition attacks in multi-agent systems of propositional control"};
  app.require_subcommand(1);

  std::string file;
  bool allow_insecure = false;
  bool allow_single_agent = false;

  auto* validate = app.add_subcommand("validate", "Load and validate a scenario");
  validate->add_option("file", file, "Scenario file")->required();
  validate->add_flag("--allow-insecure-start", allow_insecure, "Accept an insecure initial state");
  validate->add_flag("--allow-single-agent", allow_single_agent, "Warn instead of failing on single-agent formulas");

  std::size_t ticks = 1;
  std::string policy;
  std::optional<std::uint64_t> seed;
  std::string trace_path;
  auto* run = app.add_subcommand("run", "Run the engine for a number of ticks");
  run->add_option("file", file, "Scenario file")->required();
  run->add_option("--ticks", ticks, "Number of ticks")->check(CLI::PositiveNumber);
  run->add_option("--policy", policy, "none | greedy | nondeterministic")
      ->check(CLI::IsMember({"none", "greedy", "nondeterministic"}));
  run->add_option("--seed", seed, "Seed for the oracle's choices");
  run->add_option("--trace", trace_path, "Write the trace (one JSON record per tick) here; '-' for stdout");
  run->add_flag("--allow-insecure-start", allow_insecure, "Accept an insecure initial state");
  run->add_flag("--allow-single-agent", allow_single_agent, "Warn instead of failing on single-agent formulas");

  bool want_graph = false;
  bool want_horn = false;
  bool want_audit = false;
  std::string edge_list;
  std::string reading = "falsifying";
  auto* analyze = app.add_subcommand("analyze", "State-graph, Horn and vulnerability analyses");
  analyze->add_option("file", file, "Scenario file")->required();
  analyze->add_flag("--state-graph", want_graph, "State-graph statistics and connectivity");
  analyze->add_flag("--horn", want_horn, "Horn labeling per formula");
  analyze->add_flag("--audit", want_audit, "Minimal coalitions able to falsify security");
  analyze->add_option("--edge-list", edge_list, "Export the state graph as an edge list");
  analyze->add_option("--lemma-reading", reading, "falsifying | satisfying")
      ->check(CLI::IsMember({"falsifying", "satisfying"}));
  analyze->add_flag("--allow-insecure-start", allow_insecure, "Accept an insecure initial state");
  analyze->add_flag("--allow-single-agent", allow_single_agent, "Warn instead of failing on single-agent formulas");

  std::string sizes = "25,50,100,200";
  std::uint64_t bench_seed = 0;
  std::size_t repeats = 3;
  auto* bench = app.add_subcommand("bench", "Time the greedy method on synthetic worst cases");
  bench->add_option("--sizes", sizes, "Comma-separated instance sizes");
  bench->add_option("--seed", bench_seed, "Seed for request order");
  bench->add_option("--repeats", repeats, "Runs per size (best time kept)");

  CLI11_PARSE(app, argc, argv);

  try {
    LoadOptions load{allow_insecure, allow_single_agent};

    if (*validate) {
      Scenario s = load_scenario(file, load);
      for (const auto& w : validate_model(s.model, ValidationOptions{allow_single_agent}).warnings) {
        std::cout << "warning: " << w.describe() << '\n';
      }
      std::cout << "ok: " << s.model.agent_count() << " agents, " << s.model.variable_count() << " variables, "
                << s.model.critical_formulas().size() << " formulas, " << s.queue.size() << " queued requests; "
                << "initial state " << (is_secure(s.model, s.initial) ? "secure" : "insecure") << '\n';
      return 0;
    }

    if (*run) {
      Scenario s = load_scenario(file, load);
      RunOptions options;
      options.ticks = ticks;
      if (!policy.empty()) options.policy = parse_policy(policy);
      options.seed = seed;
      RunResult result = run_scenario(s, options);
      if (trace_path == "-") {
        write_trace(std::cout, s.model, result.trace);
      } else if (!trace_path.empty()) {
        std::ofstream out(trace_path);
        if (!out) throw Error(ErrorKind::io, "cannot write trace '" + trace_path + "'");
        write_trace(out, s.model, result.trace);
      }
      for (const auto& r : result.trace) {
        std::cerr << "tick " << r.tick << ": blocked [";
        for (std::size_t i = 0; i < r.blocked.size(); ++i) std::cerr << (i ? ", " : "") << s.model.name(r.blocked[i]);
        std::cerr << "], executed " << r.executed.size() << ", " << (r.secure ? "secure" : "INSECURE") << '\n';
      }
      return result.all_secure ? 0 : 1;
    }

    if (*analyze) {
      Scenario s = load_scenario(file, load);
      AnalyzeOptions options;
      if (want_graph || want_horn || want_audit) {
        options.state_graph = want_graph;
        options.horn = want_horn;
        options.audit = want_audit;
      }
      if (!edge_list.empty()) {
        options.edge_list = edge_list;
        options.state_graph = true;
      }
      options.reading = reading == "satisfying" ? LemmaReading::satisfying : LemmaReading::falsifying;
      std::cout << analyze_scenario(s, options);
      return 0;
    }

    if (*bench) {
      BenchResult result = run_bench(parse_sizes(sizes), bench_seed, repeats);
      std::cout << std::setw(6) << "n" << std::setw(14) << "seconds" << std::setw(12) << "iterations"
                << std::setw(10) << "blocked" << '\n';
      for (const auto& p : result.points) {
        std::cout << std::setw(6) << p.n << std::setw(14) << std::setprecision(6) << std::fixed << p.seconds
                  << std::setw(12) << p.iterations << std::setw(10) << p.blocked << '\n';
      }
      std::cout << "log-log slope: " << std::setprecision(3) << result.slope
                << (result.slope <= 3.5 ? " (within cubic trend)" : " (above cubic trend)") << '\n';
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return 2;
  }
  return 0;
}
