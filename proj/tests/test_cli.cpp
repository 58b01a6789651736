#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "folspec/cli.hpp"
#include "folspec/complex.hpp"
#include "folspec/models.hpp"
#include "folspec/report.hpp"

using namespace folspec;
namespace fs = std::filesystem;

// Path of the command-line binary, when the test runner passes one.  The
// subprocess cases skip themselves otherwise.
static std::string g_cli_path;

int main(int argc, char** argv) {
  std::vector<const char*> kept;
  for (int i = 0; i < argc; ++i) {
    if (i > 0 && g_cli_path.empty() && argv[i][0] != '-' && fs::exists(argv[i]) &&
        fs::is_regular_file(argv[i])) {
      g_cli_path = argv[i];
      continue;
    }
    kept.push_back(argv[i]);
  }
  doctest::Context ctx(int(kept.size()), const_cast<char**>(kept.data()));
  return ctx.run();
}

namespace {

template <class Fn>
ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  REQUIRE_MESSAGE(false, "expected an Error");
  return ErrorKind::Internal;
}

template <class Fn>
std::string message_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  REQUIRE_MESSAGE(false, "expected an Error");
  return {};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path temp_file(const std::string& stem, const std::string& text) {
  const fs::path p =
      fs::temp_directory_path() / (stem + "_" + std::to_string(::getpid()) + ".json");
  std::ofstream out(p);
  out << text;
  return p;
}

struct ProcResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

ProcResult run_tool(const std::vector<std::string>& args) {
  static int serial = 0;
  const auto base = fs::temp_directory_path() /
                    ("folspec_proc_" + std::to_string(::getpid()) + "_" +
                     std::to_string(serial++));
  const fs::path out_file = base.string() + ".out";
  const fs::path err_file = base.string() + ".err";
  std::string cmd = "'" + g_cli_path + "'";
  for (const auto& a : args) cmd += " '" + a + "'";
  cmd += " >'" + out_file.string() + "' 2>'" + err_file.string() + "'";
  const int rc = std::system(cmd.c_str());
  ProcResult r;
  r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = slurp(out_file);
  r.err = slurp(err_file);
  fs::remove(out_file);
  fs::remove(err_file);
  return r;
}

}  // namespace

TEST_CASE("invocation parsing fills defaults and keeps weight order") {
  const CommandPlan plan = parse_invocation({"spectrum", "--model", "carriere",
                                             "--weight", "fourier:0,0,1", "--weight",
                                             "fourier:0,0,0,1"});
  CHECK(plan.command == "spectrum");
  CHECK(plan.model_given);
  CHECK(plan.descriptor.kind == ModelKind::Carriere);
  CHECK(plan.descriptor.name == "carriere");
  CHECK(plan.descriptor.truncation == default_descriptor(ModelKind::Carriere).truncation);
  CHECK(plan.count == 0);
  CHECK(plan.tolerance == 0.0);
  CHECK(plan.format == "table");
  REQUIRE(plan.weights.size() == 2);
  CHECK(plan.weights[0].text() == "fourier:0,0,1");
  CHECK(plan.weights[1].text() == "fourier:0,0,0,1");

  const CommandPlan tuned = parse_invocation({"estimates", "--model", "hopf-spinor",
                                              "--truncation", "10", "--count", "8",
                                              "--tol", "0.25", "--format", "csv"});
  CHECK(tuned.descriptor.kind == ModelKind::HopfSpinor);
  CHECK(tuned.descriptor.truncation == 10);
  CHECK(tuned.count == 8);
  CHECK(tuned.tolerance == doctest::Approx(0.25));
  CHECK(tuned.format == "csv");
}

TEST_CASE("help lands in the plan instead of a report") {
  const CommandPlan plan = parse_invocation({"--help"});
  CHECK(plan.command == "help");
  CHECK(plan.help_text.find("models") != std::string::npos);
  CHECK(plan.help_text.find("spectrum") != std::string::npos);

  std::ostringstream out, err;
  CHECK(run_plan(plan, out, err) == 0);
  CHECK(out.str() == plan.help_text);

  CHECK(kind_of([] { parse_invocation({}); }) == ErrorKind::Usage);
  CHECK(kind_of([] { parse_invocation({"transmogrify"}); }) == ErrorKind::Usage);
}

TEST_CASE("flag validation messages name the offending flag") {
  CHECK(message_of([] {
          parse_invocation({"spectrum", "--model", "carriere", "--count", "-2"});
        }).find("--count must be positive") != std::string::npos);
  CHECK(message_of([] {
          parse_invocation({"spectrum", "--model", "carriere", "--tol", "-1"});
        }).find("--tol must be positive") != std::string::npos);
  CHECK(message_of([] {
          parse_invocation({"spectrum", "--model", "carriere", "--truncation", "3"});
        }).find("--truncation must be at least 4") != std::string::npos);
  CHECK(message_of([] {
          parse_invocation({"spectrum", "--model", "carriere", "--format", "xml"});
        }).find("unknown format 'xml' (table, json, csv)") != std::string::npos);
  CHECK(message_of([] { parse_invocation({"cohomology"}); })
            .find("pick a model with --model") != std::string::npos);

  // No model needed for the listing or the full validation sweep.
  CHECK(parse_invocation({"models"}).command == "models");
  CHECK_FALSE(parse_invocation({"validate"}).model_given);
}

TEST_CASE("model resolution covers registry names, files, and rejections") {
  for (const auto& info : list_models()) {
    const CommandPlan plan = parse_invocation({"spectrum", "--model", info.name});
    CHECK(plan.descriptor.kind == model_kind_from_name(info.name));
    CHECK(plan.descriptor.truncation == info.default_truncation);
  }

  CHECK(message_of([] { parse_invocation({"spectrum", "--model", "synthetic"}); })
            .find("descriptor files") != std::string::npos);

  const std::string unknown = message_of(
      [] { parse_invocation({"spectrum", "--model", "klein-bottle"}); });
  CHECK(unknown.find("unknown model 'klein-bottle'") != std::string::npos);
  CHECK(unknown.find("carriere") != std::string::npos);

  // Any existing file resolves to a synthetic descriptor; content is read later.
  const fs::path p = temp_file("resolve_probe", "{}");
  const CommandPlan plan = parse_invocation({"spectrum", "--model", p.string()});
  CHECK(plan.descriptor.kind == ModelKind::Synthetic);
  CHECK(plan.descriptor.synthetic_source == p.string());
  CHECK(plan.descriptor.truncation == 0);
  const CommandPlan forced =
      parse_invocation({"spectrum", "--model", p.string(), "--truncation", "8"});
  CHECK(forced.descriptor.truncation == 8);
  fs::remove(p);
}

TEST_CASE("config files fill unset flags and flags win") {
  const fs::path cfg = temp_file("cli_config", R"({
    "model": "torus-base",
    "truncation": 8,
    "count": 7,
    "tol": 0.5,
    "format": "json",
    "weight": ["fourier:0,0,1", "fourier:0,0,0,1"]
  })");

  const CommandPlan filled = parse_invocation({"spectrum", "--config", cfg.string()});
  CHECK(filled.descriptor.kind == ModelKind::TorusBase);
  CHECK(filled.descriptor.truncation == 8);
  CHECK(filled.count == 7);
  CHECK(filled.tolerance == doctest::Approx(0.5));
  CHECK(filled.format == "json");
  CHECK(filled.weights.size() == 2);

  const CommandPlan overridden = parse_invocation(
      {"spectrum", "--model", "carriere", "--count", "3", "--config", cfg.string()});
  CHECK(overridden.descriptor.kind == ModelKind::Carriere);
  CHECK(overridden.count == 3);
  CHECK(overridden.descriptor.truncation == 8);  // still from the config
  fs::remove(cfg);

  const fs::path bad_key = temp_file("cli_config_key", R"({"surprise": 1})");
  const std::string msg = message_of(
      [&] { parse_invocation({"spectrum", "--model", "carriere", "--config", bad_key.string()}); });
  CHECK(msg.find("config: unknown field 'surprise'") != std::string::npos);
  fs::remove(bad_key);

  const fs::path bad_type = temp_file("cli_config_type", R"({"count": "many"})");
  CHECK(message_of([&] {
          parse_invocation({"spectrum", "--model", "carriere", "--config", bad_type.string()});
        }).find("'count' must be an integer") != std::string::npos);
  fs::remove(bad_type);

  const fs::path not_json = temp_file("cli_config_syntax", "{nope");
  CHECK(kind_of([&] {
          parse_invocation({"spectrum", "--model", "carriere", "--config", not_json.string()});
        }) == ErrorKind::Schema);
  fs::remove(not_json);

  CHECK(kind_of([] {
          parse_invocation({"spectrum", "--model", "carriere", "--config", "/no/such/config"});
        }) == ErrorKind::Usage);
}

TEST_CASE("exit codes map verdicts and error kinds") {
  CHECK(exit_code_for_verdict("pass") == 0);
  CHECK(exit_code_for_verdict("fail") == 1);
  CHECK(exit_code_for_verdict("inconclusive") == 3);

  CHECK(exit_code_for_error(ErrorKind::Usage) == 2);
  CHECK(exit_code_for_error(ErrorKind::Schema) == 2);
  CHECK(exit_code_for_error(ErrorKind::ModelDefinition) == 2);
  CHECK(exit_code_for_error(ErrorKind::UnsupportedModel) == 2);
  CHECK(exit_code_for_error(ErrorKind::Numerical) == 4);
  CHECK(exit_code_for_error(ErrorKind::Internal) == 4);
}

TEST_CASE("models listing renders as table and json, not csv") {
  CommandPlan plan;
  plan.command = "models";

  std::ostringstream table, err;
  CHECK(run_plan(plan, table, err) == 0);
  CHECK(table.str().find("model") != std::string::npos);
  CHECK(table.str().find("carriere") != std::string::npos);
  CHECK(table.str().find("hopf-spinor") != std::string::npos);

  plan.format = "json";
  std::ostringstream json_out;
  CHECK(run_plan(plan, json_out, err) == 0);
  const OrderedJson arr = OrderedJson::parse(json_out.str());
  REQUIRE(arr.is_array());
  CHECK(arr.size() == list_models().size());
  CHECK(arr.at(0).contains("model"));
  CHECK(arr.at(0).contains("codimension"));
  CHECK(arr.at(0).contains("truncation"));

  plan.format = "csv";
  std::ostringstream csv_out;
  CHECK(message_of([&] { run_plan(plan, csv_out, err); })
            .find("no csv rendering") != std::string::npos);
}

TEST_CASE("spectrum plans produce a parseable report in any format") {
  CommandPlan plan;
  plan.command = "spectrum";
  plan.descriptor = default_descriptor(ModelKind::Carriere);
  plan.descriptor.truncation = 8;
  plan.model_given = true;
  plan.count = 4;
  plan.format = "json";

  std::ostringstream out, err;
  CHECK(run_plan(plan, out, err) == 0);
  const Report rep = parse_report(out.str());
  CHECK(rep.verdict == "pass");
  REQUIRE(rep.runs.size() == 1);
  CHECK(rep.runs[0].model == "carriere");
  CHECK(rep.config.at("command") == "spectrum");
  CHECK(rep.config.at("model") == "carriere");
  CHECK(rep.config.at("truncation") == 8);
  CHECK(rep.config.at("count") == 4);
  CHECK(rep.meta.wall_ms > 0.0);

  plan.format = "csv";
  std::ostringstream csv_out;
  CHECK(run_plan(plan, csv_out, err) == 0);
  CHECK(csv_out.str().rfind("model,run,index,eigenvalue,residual\n", 0) == 0);
  CHECK(csv_out.str().find("carriere,base,0,") != std::string::npos);

  plan.format = "table";
  std::ostringstream table_out;
  CHECK(run_plan(plan, table_out, err) == 0);
  CHECK(table_out.str().rfind("verdict: pass", 0) == 0);
  CHECK(table_out.str().find("[PASS]") != std::string::npos);
}

TEST_CASE("--out diverts the payload and stdout keeps the verdict") {
  const fs::path out_path =
      fs::temp_directory_path() / ("cli_out_" + std::to_string(::getpid()) + ".json");
  CommandPlan plan;
  plan.command = "spectrum";
  plan.descriptor = default_descriptor(ModelKind::Carriere);
  plan.descriptor.truncation = 8;
  plan.model_given = true;
  plan.count = 4;
  plan.format = "json";
  plan.out_path = out_path.string();

  std::ostringstream out, err;
  CHECK(run_plan(plan, out, err) == 0);
  CHECK(out.str() == "verdict: pass\n");
  CHECK(parse_report(slurp(out_path)).verdict == "pass");
  fs::remove(out_path);

  plan.out_path = "/no/such/dir/report.json";
  std::ostringstream sink;
  CHECK(kind_of([&] { run_plan(plan, sink, err); }) == ErrorKind::Usage);
}

TEST_CASE("the installed binary honours the exit code contract") {
  if (g_cli_path.empty()) {
    MESSAGE("no cli binary on the command line; skipping subprocess checks");
    return;
  }

  const ProcResult listing = run_tool({"models"});
  CHECK(listing.exit_code == 0);
  CHECK(listing.out.find("carriere") != std::string::npos);

  const ProcResult spectrum = run_tool({"spectrum", "--model", "carriere",
                                        "--truncation", "8", "--count", "4",
                                        "--format", "json"});
  CHECK(spectrum.exit_code == 0);
  CHECK(parse_report(spectrum.out).verdict == "pass");

  const ProcResult bogus = run_tool({"transmogrify"});
  CHECK(bogus.exit_code == 2);
  CHECK(bogus.err.rfind("error:", 0) == 0);

  const ProcResult missing_model = run_tool({"spectrum"});
  CHECK(missing_model.exit_code == 2);
  CHECK(missing_model.err.find("pick a model") != std::string::npos);

  const ProcResult bad_format =
      run_tool({"spectrum", "--model", "carriere", "--format", "xml"});
  CHECK(bad_format.exit_code == 2);

  const ProcResult unknown =
      run_tool({"spectrum", "--model", "klein-bottle"});
  CHECK(unknown.exit_code == 2);
  CHECK(unknown.err.find("unknown model") != std::string::npos);

  const ProcResult validated =
      run_tool({"validate", "--model", "carriere", "--truncation", "8"});
  CHECK(validated.exit_code == 0);
  CHECK(validated.out.find("verdict: pass") != std::string::npos);
}

TEST_CASE("repeated runs agree after scrubbing volatile metadata") {
  if (g_cli_path.empty()) {
    MESSAGE("no cli binary on the command line; skipping subprocess checks");
    return;
  }

  const auto stamp = std::to_string(::getpid());
  const fs::path a = fs::temp_directory_path() / ("cli_golden_a_" + stamp + ".json");
  const fs::path b = fs::temp_directory_path() / ("cli_golden_b_" + stamp + ".json");

  const std::vector<std::string> common = {"spectrum", "--model",  "carriere",
                                           "--truncation", "12",   "--count",
                                           "8",        "--format", "json"};
  auto with_out = [&](const fs::path& p) {
    std::vector<std::string> args = common;
    args.push_back("--out");
    args.push_back(p.string());
    return args;
  };
  CHECK(run_tool(with_out(a)).exit_code == 0);
  CHECK(run_tool(with_out(b)).exit_code == 0);

  const std::string text_a = slurp(a);
  const std::string text_b = slurp(b);
  CHECK(parse_report(text_a).verdict == "pass");
  CHECK(normalized_for_comparison(OrderedJson::parse(text_a)) ==
        normalized_for_comparison(OrderedJson::parse(text_b)));
  fs::remove(a);
  fs::remove(b);
}
