#include "folspec/cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "folspec/validate.hpp"

namespace folspec {

namespace {

struct RawFlags {
  std::string model;
  int truncation = 0;
  std::vector<std::string> weights;
  int count = 0;
  double tolerance = 0.0;
  std::string out_path;
  std::string format;
  std::string config_path;
};

void merge_config(const std::string& path, RawFlags& flags, const CLI::App& sub) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Usage, "cannot read config file '" + path + "'");
  OrderedJson doc;
  try {
    std::ostringstream text;
    text << in.rdbuf();
    doc = OrderedJson::parse(text.str());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Schema, "config: not valid JSON: " + std::string(e.what()));
  }
  if (!doc.is_object()) fail(ErrorKind::Schema, "config: must be a JSON object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& key = it.key();
    const OrderedJson& v = *it;
    auto want = [&](bool ok, const char* type) {
      if (!ok) fail(ErrorKind::Schema, "config: '" + key + "' must be " + type);
    };
    if (key == "model") {
      want(v.is_string(), "a string");
      if (sub.count("--model") == 0) flags.model = v.get<std::string>();
    } else if (key == "truncation") {
      want(v.is_number_integer(), "an integer");
      if (sub.count("--truncation") == 0) flags.truncation = v.get<int>();
    } else if (key == "weight") {
      std::vector<std::string> ws;
      if (v.is_string()) {
        ws.push_back(v.get<std::string>());
      } else if (v.is_array()) {
        for (const auto& e : v) {
          want(e.is_string(), "a string or an array of strings");
          ws.push_back(e.get<std::string>());
        }
      } else {
        want(false, "a string or an array of strings");
      }
      if (sub.count("--weight") == 0) flags.weights = std::move(ws);
    } else if (key == "count") {
      want(v.is_number_integer(), "an integer");
      if (sub.count("--count") == 0) flags.count = v.get<int>();
    } else if (key == "tol") {
      want(v.is_number(), "a number");
      if (sub.count("--tol") == 0) flags.tolerance = v.get<double>();
    } else if (key == "out") {
      want(v.is_string(), "a string");
      if (sub.count("--out") == 0) flags.out_path = v.get<std::string>();
    } else if (key == "format") {
      want(v.is_string(), "a string");
      if (sub.count("--format") == 0) flags.format = v.get<std::string>();
    } else {
      fail(ErrorKind::Schema, "config: unknown field '" + key + "'");
    }
  }
}

ModelDescriptor resolve_model(const std::string& name) {
  for (const auto& info : list_models())
    if (info.name == name) return default_descriptor(model_kind_from_name(name));
  if (name == "synthetic")
    fail(ErrorKind::Usage,
         "synthetic models are loaded from descriptor files; pass the file path "
         "as --model");
  if (std::filesystem::exists(name)) {
    ModelDescriptor d;
    d.kind = ModelKind::Synthetic;
    d.name = name;
    d.truncation = 0;  // descriptor file decides unless --truncation overrides
    d.synthetic_source = name;
    return d;
  }
  std::string known;
  for (const auto& info : list_models()) {
    if (!known.empty()) known += ", ";
    known += info.name;
  }
  fail(ErrorKind::Usage,
       "unknown model '" + name + "' (registry: " + known + "; or a descriptor file path)");
}

}  // namespace

CommandPlan parse_invocation(const std::vector<std::string>& args) {
  CLI::App app{"spectral laboratory for basic-form complexes of model foliations"};
  app.require_subcommand(1);

  RawFlags raw;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"models", "list the built-in models"},
      {"spectrum", "lowest basic Dirac eigenvalues of one model"},
      {"invariance", "compare basic Dirac spectra across weight deformations"},
      {"cohomology", "Betti numbers of the three differentials and their pairing"},
      {"estimates", "eigenvalue lower bounds against the computed spectrum"},
      {"convergence", "spectral observable across a truncation ladder"},
      {"validate", "structural identity suite"},
  };
  for (const auto& [name, blurb] : commands) {
    CLI::App* s = app.add_subcommand(name, blurb);
    s->add_option("--model", raw.model, "registry model name or descriptor file path");
    s->add_option("--truncation", raw.truncation, "basis truncation");
    s->add_option("--weight", raw.weights,
                  "weight exponent literal, e.g. fourier:0,0,1 (repeatable)");
    s->add_option("--count", raw.count, "how many eigenvalues");
    s->add_option("--tol", raw.tolerance, "comparison tolerance");
    s->add_option("--out", raw.out_path, "write the report to this file");
    s->add_option("--format", raw.format, "table, json, or csv");
    s->add_option("--config", raw.config_path, "JSON file with the same keys as the flags");
  }

  std::vector<const char*> argv;
  argv.push_back("folspec");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    CommandPlan plan;
    plan.command = "help";
    plan.help_text = app.help();
    return plan;
  } catch (const CLI::ParseError& e) {
    fail(ErrorKind::Usage, e.what());
  }

  CLI::App* sub = app.get_subcommands().front();
  if (!raw.config_path.empty()) merge_config(raw.config_path, raw, *sub);

  CommandPlan plan;
  plan.command = sub->get_name();

  if (!raw.format.empty()) {
    if (raw.format != "table" && raw.format != "json" && raw.format != "csv")
      fail(ErrorKind::Usage, "unknown format '" + raw.format + "' (table, json, csv)");
    plan.format = raw.format;
  }
  plan.out_path = raw.out_path;

  if (raw.count != 0) {
    if (raw.count < 1) fail(ErrorKind::Usage, "--count must be positive");
    plan.count = raw.count;
  }
  if (raw.tolerance != 0.0) {
    if (raw.tolerance <= 0) fail(ErrorKind::Usage, "--tol must be positive");
    plan.tolerance = raw.tolerance;
  }
  for (const auto& w : raw.weights) plan.weights.push_back(WeightLiteral::parse(w));

  if (!raw.model.empty()) {
    plan.descriptor = resolve_model(raw.model);
    plan.model_given = true;
  }
  if (raw.truncation != 0) {
    if (raw.truncation < 4)
      fail(ErrorKind::Usage, "--truncation must be at least 4");
    plan.descriptor.truncation = raw.truncation;
  }

  const bool needs_model = plan.command != "models" && plan.command != "validate";
  if (needs_model && !plan.model_given)
    fail(ErrorKind::Usage, "pick a model with --model (see the models subcommand)");
  return plan;
}

namespace {

std::string render_models_table() {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-17s %5s %-8s %11s  %s\n", "model", "codim",
                "module", "truncation", "summary");
  os << line;
  for (const auto& m : list_models()) {
    std::snprintf(line, sizeof line, "%-17s %5d %-8s %11d  %s\n", m.name.c_str(),
                  m.codimension, m.module.c_str(), m.default_truncation,
                  m.summary.c_str());
    os << line;
  }
  return os.str();
}

std::string render_models_json() {
  OrderedJson arr = OrderedJson::array();
  for (const auto& m : list_models()) {
    OrderedJson j = OrderedJson::object();
    j["model"] = m.name;
    j["codimension"] = m.codimension;
    j["module"] = m.module;
    j["truncation"] = m.default_truncation;
    j["summary"] = m.summary;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::string render_table(const Report& rep) {
  std::ostringstream os;
  os << "verdict: " << rep.verdict << "\n";
  if (!rep.runs.empty()) {
    os << "runs:\n";
    for (const auto& r : rep.runs) {
      char head[200];
      std::snprintf(head, sizeof head, "  %s | %s | %s | dim %lld | truncation %d%s\n",
                    r.model.c_str(), r.run.c_str(), r.spectrum.operator_name.c_str(),
                    static_cast<long long>(r.spectrum.dimension), r.spectrum.truncation,
                    r.spectrum.iterative ? " | iterative" : "");
      os << head;
      os << "    ";
      const Eigen::Index n = r.spectrum.eigenvalues.size();
      for (Eigen::Index i = 0; i < n; ++i) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.10g", r.spectrum.eigenvalues(i));
        os << buf;
        if (i + 1 < n) os << (i % 6 == 5 ? "\n    " : "  ");
      }
      os << "\n";
    }
  }
  if (!rep.checks.empty()) {
    os << "checks:\n";
    for (const auto& c : rep.checks) {
      const char* status = !c.conclusive ? "[????]" : c.passed ? "[PASS]" : "[FAIL]";
      char line[256];
      std::snprintf(line, sizeof line, "  %s %-58s %11.4g vs %-10.4g %s\n", status,
                    c.name.c_str(), c.measured, c.bound, c.note.c_str());
      os << line;
    }
  }
  return os.str();
}

void deliver(const std::string& payload, const CommandPlan& plan, std::ostream& out,
             const std::string& verdict_line) {
  if (plan.out_path.empty()) {
    out << payload;
    return;
  }
  std::ofstream file(plan.out_path);
  if (!file) fail(ErrorKind::Usage, "cannot write to '" + plan.out_path + "'");
  file << payload;
  out << verdict_line;
}

}  // namespace

int exit_code_for_verdict(const std::string& verdict) {
  if (verdict == "pass") return 0;
  if (verdict == "inconclusive") return 3;
  return 1;
}

int exit_code_for_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage:
    case ErrorKind::Schema:
    case ErrorKind::ModelDefinition:
    case ErrorKind::UnsupportedModel:
      return 2;
    case ErrorKind::Numerical:
    case ErrorKind::Internal:
      return 4;
  }
  return 4;
}

int run_plan(const CommandPlan& plan, std::ostream& out, std::ostream& err) {
  (void)err;
  if (plan.command == "help") {
    out << plan.help_text;
    return 0;
  }
  if (plan.command == "models") {
    if (plan.format == "csv")
      fail(ErrorKind::Usage, "the models listing has no csv rendering");
    out << (plan.format == "json" ? render_models_json() : render_models_table());
    return 0;
  }

  const auto t0 = std::chrono::steady_clock::now();
  ExperimentResult result;
  if (plan.command == "spectrum") {
    ModelDescriptor d = plan.descriptor;
    for (const auto& w : plan.weights) d.deformations.push_back(w);
    result = run_spectrum_experiment(d, plan.count > 0 ? plan.count : 12);
  } else if (plan.command == "invariance") {
    InvarianceOptions opt;
    opt.weights = plan.weights;
    opt.count = plan.count;
    opt.rel_tol = plan.tolerance;
    result = run_invariance_experiment(plan.descriptor, opt);
  } else if (plan.command == "cohomology") {
    result = run_cohomology_experiment(plan.descriptor);
  } else if (plan.command == "estimates") {
    result = run_estimate_experiment(plan.descriptor, plan.count > 0 ? plan.count : 12);
  } else if (plan.command == "convergence") {
    result = run_convergence_study(plan.descriptor).result;
  } else if (plan.command == "validate") {
    result = plan.model_given ? run_validation_suite(plan.descriptor)
                              : run_validation_suite();
  } else {
    fail(ErrorKind::Internal, "unhandled command '" + plan.command + "'");
  }

  Report rep;
  rep.config["command"] = plan.command;
  if (plan.model_given) {
    rep.config["model"] = plan.descriptor.name.empty()
                              ? model_kind_name(plan.descriptor.kind)
                              : plan.descriptor.name;
    rep.config["truncation"] = plan.descriptor.truncation;
  }
  if (!plan.weights.empty()) {
    OrderedJson ws = OrderedJson::array();
    for (const auto& w : plan.weights) ws.push_back(w.text());
    rep.config["weights"] = std::move(ws);
  }
  if (plan.count > 0) rep.config["count"] = plan.count;
  if (plan.tolerance > 0) rep.config["tol"] = plan.tolerance;
  rep.runs = std::move(result.runs);
  rep.checks = std::move(result.checks);
  rep.verdict = verdict_of(rep.checks);
  rep.meta.timestamp = current_timestamp();
  rep.meta.wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();

  std::string payload;
  if (plan.format == "json")
    payload = render_json(rep);
  else if (plan.format == "csv")
    payload = render_csv(rep);
  else
    payload = render_table(rep);
  deliver(payload, plan, out, "verdict: " + rep.verdict + "\n");
  return exit_code_for_verdict(rep.verdict);
}

int run_cli(int argc, char** argv) {
  try {
    const std::vector<std::string> args(argv + 1, argv + argc);
    return run_plan(parse_invocation(args), std::cout, std::cerr);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for_error(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace folspec
