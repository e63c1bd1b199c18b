#include "coalguard/scenario.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

namespace coalguard {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void bad(const std::string& message) { throw Error(ErrorKind::syntax, "scenario: " + message); }

const json& require(const json& doc, const char* key) {
  if (!doc.contains(key)) bad(std::string("missing key '") + key + "'");
  return doc.at(key);
}

std::string as_string(const json& j, const std::string& where) {
  if (!j.is_string()) bad(where + ": expected a string");
  return j.get<std::string>();
}

bool as_bool(const json& j, const std::string& where) {
  if (!j.is_boolean()) bad(where + ": expected a boolean");
  return j.get<bool>();
}

std::uint64_t as_uint(const json& j, const std::string& where) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    bad(where + ": expected a nonnegative integer");
  }
  return j.get<std::uint64_t>();
}

TieBreak parse_tie_break(const std::string& text) {
  if (text == "fifo") return TieBreak::fifo;
  if (text == "lexicographic") return TieBreak::lexicographic;
  bad("unknown tie_break '" + text + "'");
}

BlockingStrategy parse_strategy(const json& j) {
  BlockingStrategy out;
  std::string kind = j.is_string() ? j.get<std::string>() : as_string(require(j, "kind"), "blocking_strategy.kind");
  if (kind == "drop_tick") {
    out.kind = BlockingStrategy::Kind::drop_tick;
  } else if (kind == "block_until_tick") {
    out.kind = BlockingStrategy::Kind::block_until_tick;
    out.until_tick = as_uint(require(j, "until"), "blocking_strategy.until");
  } else if (kind == "block_for_random_interval") {
    out.kind = BlockingStrategy::Kind::block_for_random_interval;
    out.interval_lo = as_uint(require(j, "lo"), "blocking_strategy.lo");
    out.interval_hi = as_uint(require(j, "hi"), "blocking_strategy.hi");
    if (out.interval_hi < out.interval_lo) bad("blocking_strategy: hi < lo");
    if (j.contains("seed")) out.seed = as_uint(j.at("seed"), "blocking_strategy.seed");
  } else if (kind == "silent_freeze") {
    out.kind = BlockingStrategy::Kind::silent_freeze;
  } else {
    bad("unknown blocking_strategy '" + kind + "'");
  }
  return out;
}

EngineConfig parse_config(const json& j) {
  EngineConfig cfg;
  if (j.is_null()) return cfg;
  if (!j.is_object()) bad("config: expected an object");
  if (j.contains("max_actions_per_tick")) {
    const auto& n = j.at("max_actions_per_tick");
    if (n.is_string()) {
      if (n.get<std::string>() != "auto") bad("config.max_actions_per_tick: expected \"auto\" or a positive integer");
    } else {
      std::uint64_t value = as_uint(n, "config.max_actions_per_tick");
      if (value == 0) bad("config.max_actions_per_tick must be positive");
      cfg.max_actions_per_tick = static_cast<std::size_t>(value);
    }
  }
  if (j.contains("policy")) cfg.policy = parse_policy(as_string(j.at("policy"), "config.policy"));
  if (j.contains("blocking_strategy")) cfg.blocking_strategy = parse_strategy(j.at("blocking_strategy"));
  if (j.contains("tie_break")) cfg.tie_break = parse_tie_break(as_string(j.at("tie_break"), "config.tie_break"));
  if (j.contains("seed")) cfg.random_seed = as_uint(j.at("seed"), "config.seed");
  return cfg;
}

json names(const Model& m, const std::vector<AgentId>& agents) {
  json out = json::array();
  for (AgentId a : agents) out.push_back(m.name(a));
  return out;
}

json formula_names(const std::vector<std::size_t>& indices) {
  json out = json::array();
  for (std::size_t i : indices) out.push_back(formula_label(i));
  return out;
}

json requests_json(const Model& m, const Batch& batch) {
  json out = json::array();
  for (const auto& r : batch) {
    json item;
    item["agent"] = m.name(r.agent);
    item["var"] = m.name(r.variable);
    item["value"] = r.value;
    item["arrival"] = r.arrival_index;
    out.push_back(std::move(item));
  }
  return out;
}

json iterations_json(const Model& m, const BlockReport* report) {
  json out = json::array();
  if (report == nullptr) return out;
  for (const auto& step : report->greedy_steps) {
    json item;
    item["became_true"] = formula_names(step.became_true);
    item["implicated"] = names(m, step.implicated);
    json matrix;
    matrix["columns"] = names(m, step.matrix.columns);
    json rows = json::array();
    for (std::size_t r = 0; r < step.matrix.rows.size(); ++r) {
      json row;
      row["formula"] = formula_label(step.matrix.rows[r]);
      json marks = json::array();
      for (bool b : step.matrix.marks[r]) marks.push_back(b);
      row["marks"] = std::move(marks);
      rows.push_back(std::move(row));
    }
    matrix["rows"] = std::move(rows);
    matrix["counters"] = step.matrix.counters;
    item["matrix"] = std::move(matrix);
    item["ranking"] = names(m, step.ranking);
    item["chosen"] = m.name(step.chosen);
    out.push_back(std::move(item));
  }
  for (const auto& step : report->oracle_steps) {
    json item;
    json frontier = json::array();
    for (const auto& member : step.frontier.members) {
      json f;
      f["agents"] = names(m, member.agents);
      f["false_count"] = member.false_count;
      frontier.push_back(std::move(f));
    }
    item["frontier"] = std::move(frontier);
    item["representative"] = names(m, step.frontier.members.at(step.representative).agents);
    item["all_false"] = step.all_false;
    out.push_back(std::move(item));
  }
  return out;
}

}  // namespace

std::string formula_label(std::size_t index) { return "phi" + std::to_string(index + 1); }

Policy parse_policy(const std::string& text) {
  if (text == "none") return Policy::none;
  if (text == "greedy") return Policy::greedy;
  if (text == "nondeterministic") return Policy::nondeterministic;
  throw Error(ErrorKind::syntax, "unknown policy '" + text + "'");
}

const char* to_string(Policy policy) noexcept {
  switch (policy) {
    case Policy::none: return "none";
    case Policy::greedy: return "greedy";
    case Policy::nondeterministic: return "nondeterministic";
  }
  return "unknown";
}

Scenario parse_scenario(const std::string& text, const LoadOptions& options) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::syntax, std::string("scenario: ") + e.what());
  }
  if (!doc.is_object()) bad("top level must be an object");

  const json& agents = require(doc, "agents");
  if (!agents.is_object()) bad("agents: expected an object");
  Model::Partition partition;
  for (const auto& [agent, vars] : agents.items()) {
    if (!vars.is_array()) bad("agents." + agent + ": expected a list of variables");
    std::vector<std::string> owned;
    for (const auto& v : vars) owned.push_back(as_string(v, "agents." + agent));
    partition.emplace_back(agent, std::move(owned));
  }

  std::vector<Formula> formulas;
  if (doc.contains("formulas")) {
    const json& list = doc.at("formulas");
    if (!list.is_array()) bad("formulas: expected a list of strings");
    for (std::size_t i = 0; i < list.size(); ++i) {
      std::string where = "formulas[" + std::to_string(i) + "]";
      try {
        formulas.push_back(parse_formula(as_string(list[i], where)));
      } catch (const SyntaxError& e) {
        throw Error(e.kind(), "scenario: " + where + ": " + e.what());
      }
    }
  }

  const json& initial = require(doc, "initial");
  if (!initial.is_object()) bad("initial: expected an object");
  std::vector<std::string> variables;
  std::map<std::string, bool> values;
  for (const auto& [name, value] : initial.items()) {
    variables.push_back(name);
    values[name] = as_bool(value, "initial." + name);
  }
  // Variables owned by an agent but missing from `initial` still belong to the model.
  for (const auto& [agent, vars] : partition) {
    for (const auto& v : vars) {
      if (!values.contains(v) && std::find(variables.begin(), variables.end(), v) == variables.end()) {
        variables.push_back(v);
      }
    }
  }

  Model model(std::move(partition), std::move(variables), std::move(formulas));
  ValidationResult validation =
      validate_model(model, ValidationOptions{options.allow_single_agent_formulas});
  if (!validation.ok()) {
    std::string message = "invalid model:";
    for (const auto& v : validation.violations) message += " " + v.describe();
    throw Error(ErrorKind::invalid_model, message);
  }
  for (const auto& name : model.variables()) {
    if (!values.contains(name)) bad("initial: variable '" + name + "' has no value");
  }
  SystemState state = make_state(model, values);

  ActionQueue queue;
  if (doc.contains("queue")) {
    const json& list = doc.at("queue");
    if (!list.is_array()) bad("queue: expected a list");
    for (std::size_t i = 0; i < list.size(); ++i) {
      std::string where = "queue[" + std::to_string(i) + "]";
      const json& item = list[i];
      if (!item.is_object()) bad(where + ": expected an object");
      AgentId agent = model.agent(as_string(require(item, "agent"), where + ".agent"));
      VarId var = model.variable(as_string(require(item, "var"), where + ".var"));
      queue = enqueue(model, std::move(queue), agent, var, as_bool(require(item, "value"), where + ".value"));
    }
  }

  EngineConfig config = parse_config(doc.contains("config") ? doc.at("config") : json());

  if (!options.allow_insecure_start && !is_secure(model, state)) {
    std::string which;
    for (std::size_t i = 0; i < model.compiled().size(); ++i) {
      if (model.compiled()[i].eval(state.valuation)) which += " " + formula_label(i);
    }
    throw Error(ErrorKind::insecure_start, "initial state is insecure:" + which);
  }
  return Scenario{std::move(model), std::move(state), std::move(queue), config};
}

Scenario load_scenario(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot read scenario '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), options);
}

RunResult run_scenario(const Scenario& scenario, const RunOptions& options) {
  EngineConfig cfg = scenario.config;
  if (options.policy) cfg.policy = *options.policy;
  if (options.seed) cfg.random_seed = *options.seed;

  RunResult result;
  BlockedRegistry registry(cfg.blocking_strategy.seed);
  SystemState state = scenario.initial;
  ActionQueue queue = scenario.queue;
  for (std::size_t t = 0; t < options.ticks; ++t) {
    TickResult step = tick(scenario.model, state, std::move(queue), cfg, registry);
    result.all_secure = result.all_secure && step.record.secure;
    result.trace.push_back(std::move(step.record));
    state = std::move(step.state);
    queue = std::move(step.queue);
  }
  result.final_state = std::move(state);
  return result;
}

std::string trace_record_json(const Model& m, const TickRecord& record) {
  json j;
  j["tick"] = record.tick;
  j["batch"] = requests_json(m, record.batch);
  j["suppressed"] = requests_json(m, record.suppressed);
  j["iterations"] = iterations_json(m, record.blocking.get());
  j["blocked"] = names(m, record.blocked);
  j["executed"] = requests_json(m, record.executed);
  json valuation = json::object();
  for (std::size_t i = 0; i < m.variable_count(); ++i) valuation[m.variables()[i]] = static_cast<bool>(record.valuation[i]);
  j["valuation"] = std::move(valuation);
  j["secure"] = record.secure;
  return j.dump();
}

void write_trace(std::ostream& out, const Model& m, const RunTrace& trace) {
  for (const auto& record : trace) out << trace_record_json(m, record) << '\n';
}

std::string check_trace_replay(const Scenario& scenario, std::istream& trace) {
  const Model& m = scenario.model;
  SystemState state = scenario.initial;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(trace, line)) {
    ++line_no;
    if (line.empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      return "line " + std::to_string(line_no) + ": " + e.what();
    }
    Batch executed;
    for (const auto& r : record.at("executed")) {
      executed.push_back(ActionRequest{m.agent(r.at("agent").get<std::string>()),
                                       m.variable(r.at("var").get<std::string>()), r.at("value").get<bool>(),
                                       r.at("arrival").get<std::uint64_t>()});
    }
    state = apply_actions(state, executed);
    for (const auto& [name, value] : record.at("valuation").items()) {
      if (state.valuation[index_of(m.variable(name))] != value.get<bool>()) {
        return "line " + std::to_string(line_no) + ": variable " + name + " differs after replay";
      }
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// analyze

namespace {

std::string agent_set(const Model& m, const std::vector<AgentId>& agents) {
  std::string out = "{";
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (i) out += ", ";
    out += m.name(agents[i]);
  }
  return out + "}";
}

std::string labeling_text(const HornLabeling& labeling, const std::vector<std::string>& order) {
  std::string out;
  for (const auto& v : order) {
    if (!out.empty()) out += ", ";
    bool flipped = labeling.count(v) && labeling.at(v);
    out += "λ(" + v + ")=" + (flipped ? "¬" : "") + v;
  }
  return out;
}

}  // namespace

std::string analyze_scenario(const Scenario& scenario, const AnalyzeOptions& options) {
  const Model& m = scenario.model;
  std::ostringstream out;
  out << "variables: " << m.variable_count() << "  agents: " << m.agent_count()
      << "  formulas: " << m.critical_formulas().size() << '\n';

  if (options.state_graph) {
    StateGraph g = build_state_graph(m);
    std::size_t secure = static_cast<std::size_t>(std::count(g.secure.begin(), g.secure.end(), true));
    out << "state graph: " << g.vertex_count() << " vertices, " << g.edges.size() << " edges\n";
    out << "full graph: " << (is_connected(g, false) ? "connected" : "disconnected") << '\n';
    bool secure_connected = is_connected(g, true);
    if (secure == g.vertex_count()) {
      out << "secure set = full graph; " << (secure_connected ? "connected" : "disconnected") << '\n';
    } else {
      out << "secure set: " << (secure_connected ? "connected" : "disconnected") << " (" << secure << " of "
          << g.vertex_count() << " vertices)\n";
    }
    if (options.edge_list) {
      std::ofstream edges(*options.edge_list);
      if (!edges) throw Error(ErrorKind::io, "cannot write edge list '" + options.edge_list->string() + "'");
      write_edge_list(edges, g, m);
    }
  }

  if (options.horn) {
    for (std::size_t i = 0; i < m.critical_formulas().size(); ++i) {
      const Formula& f = m.critical_formulas()[i];
      out << formula_label(i) << ": ";
      if (f.has_diamond()) {
        out << "renamable Horn: n/a (contains a diamond)\n";
        continue;
      }
      auto vars = vars_of(f);
      auto labeling = find_horn_labeling(f);
      if (labeling) {
        out << "renamable Horn: yes (" << labeling_text(*labeling, vars) << ")";
      } else {
        out << "renamable Horn: no";
      }
      if (vars.size() <= kStateGraphBudget) {
        LemmaCheck check = check_connected_horn(f, vars, options.reading);
        out << "; " << to_string(options.reading) << " set " << (check.set_connected ? "connected" : "disconnected");
      }
      out << '\n';
    }
  }

  if (options.audit) {
    auto audit = audit_vulnerabilities(m, scenario.initial);
    out << "audit: " << audit.size() << " minimal coalition(s)\n";
    for (const auto& v : audit) {
      out << "  " << agent_set(m, v.coalition) << " -> " << formula_label(v.formula) << " witness";
      for (const auto& [var, value] : v.witness.assignment) out << ' ' << m.name(var) << '=' << (value ? "T" : "F");
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace coalguard
