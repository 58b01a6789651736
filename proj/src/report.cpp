#include "folspec/report.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

namespace folspec {

namespace {

[[noreturn]] void bad(const std::string& msg) {
  fail(ErrorKind::Schema, "report: " + msg);
}

void require_keys(const OrderedJson& obj, const std::string& where,
                  std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known) bad("unknown field '" + it.key() + "' in " + where);
  }
}

const OrderedJson& field(const OrderedJson& obj, const std::string& where,
                         const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) bad("missing field '" + std::string(key) + "' in " + where);
  return *it;
}

double num(const OrderedJson& v, const std::string& what) {
  if (!v.is_number()) bad(what + " must be a number");
  return v.get<double>();
}

bool boolean(const OrderedJson& v, const std::string& what) {
  if (!v.is_boolean()) bad(what + " must be a boolean");
  return v.get<bool>();
}

std::string str(const OrderedJson& v, const std::string& what) {
  if (!v.is_string()) bad(what + " must be a string");
  return v.get<std::string>();
}

Vec vec(const OrderedJson& v, const std::string& what) {
  if (!v.is_array()) bad(what + " must be an array of numbers");
  Vec out(Eigen::Index(v.size()));
  Eigen::Index i = 0;
  for (const auto& e : v) out(i++) = num(e, what);
  return out;
}

}  // namespace

OrderedJson report_to_json(const Report& report) {
  OrderedJson doc = OrderedJson::object();
  doc["schema_version"] = 1;
  doc["config"] = report.config;

  OrderedJson runs = OrderedJson::array();
  for (const auto& r : report.runs) {
    OrderedJson j = OrderedJson::object();
    j["model"] = r.model;
    j["run"] = r.run;
    j["operator"] = r.spectrum.operator_name;
    j["truncation"] = r.spectrum.truncation;
    j["dimension"] = r.spectrum.dimension;
    j["iterative"] = r.spectrum.iterative;
    j["eigenvalues"] = std::vector<double>(
        r.spectrum.eigenvalues.data(),
        r.spectrum.eigenvalues.data() + r.spectrum.eigenvalues.size());
    j["residuals"] = std::vector<double>(
        r.spectrum.residuals.data(),
        r.spectrum.residuals.data() + r.spectrum.residuals.size());
    OrderedJson clusters = OrderedJson::array();
    for (const auto& c : r.spectrum.clusters)
      clusters.push_back({c.first, c.second});
    j["clusters"] = std::move(clusters);
    runs.push_back(std::move(j));
  }
  doc["runs"] = std::move(runs);

  OrderedJson checks = OrderedJson::array();
  for (const auto& c : report.checks) {
    OrderedJson j = OrderedJson::object();
    j["name"] = c.name;
    j["passed"] = c.passed;
    j["conclusive"] = c.conclusive;
    j["measured"] = c.measured;
    j["bound"] = c.bound;
    j["note"] = c.note;
    checks.push_back(std::move(j));
  }
  doc["checks"] = std::move(checks);

  doc["verdict"] = report.verdict;

  OrderedJson meta = OrderedJson::object();
  meta["timestamp"] = report.meta.timestamp;
  meta["wall_ms"] = report.meta.wall_ms;
  meta["tool"] = report.meta.tool;
  meta["version"] = report.meta.version;
  doc["meta"] = std::move(meta);
  return doc;
}

Report report_from_json(const OrderedJson& doc) {
  if (!doc.is_object()) bad("top level must be an object");
  require_keys(doc, "the report",
               {"schema_version", "config", "runs", "checks", "verdict", "meta"});
  const auto& sv = field(doc, "the report", "schema_version");
  if (!sv.is_number_integer() || sv.get<int>() != 1)
    bad("schema_version must be 1");

  Report out;
  out.config = field(doc, "the report", "config");
  if (!out.config.is_object()) bad("config must be an object");

  const auto& runs = field(doc, "the report", "runs");
  if (!runs.is_array()) bad("runs must be an array");
  for (const auto& j : runs) {
    if (!j.is_object()) bad("each run must be an object");
    require_keys(j, "a run",
                 {"model", "run", "operator", "truncation", "dimension", "iterative",
                  "eigenvalues", "residuals", "clusters"});
    SpectrumRun r;
    r.model = str(field(j, "a run", "model"), "model");
    r.run = str(field(j, "a run", "run"), "run");
    r.spectrum.operator_name = str(field(j, "a run", "operator"), "operator");
    const auto& tr = field(j, "a run", "truncation");
    if (!tr.is_number_integer()) bad("truncation must be an integer");
    r.spectrum.truncation = tr.get<int>();
    const auto& dim = field(j, "a run", "dimension");
    if (!dim.is_number_integer()) bad("dimension must be an integer");
    r.spectrum.dimension = dim.get<Eigen::Index>();
    r.spectrum.iterative = boolean(field(j, "a run", "iterative"), "iterative");
    r.spectrum.eigenvalues = vec(field(j, "a run", "eigenvalues"), "eigenvalues");
    r.spectrum.residuals = vec(field(j, "a run", "residuals"), "residuals");
    const auto& cl = field(j, "a run", "clusters");
    if (!cl.is_array()) bad("clusters must be an array");
    for (const auto& c : cl) {
      if (!c.is_array() || c.size() != 2 || !c[0].is_number_integer() ||
          !c[1].is_number_integer())
        bad("each cluster must be an [begin, end) index pair");
      r.spectrum.clusters.emplace_back(c[0].get<Eigen::Index>(),
                                       c[1].get<Eigen::Index>());
    }
    out.runs.push_back(std::move(r));
  }

  const auto& checks = field(doc, "the report", "checks");
  if (!checks.is_array()) bad("checks must be an array");
  for (const auto& j : checks) {
    if (!j.is_object()) bad("each check must be an object");
    require_keys(j, "a check", {"name", "passed", "conclusive", "measured", "bound", "note"});
    CheckResult c;
    c.name = str(field(j, "a check", "name"), "name");
    c.passed = boolean(field(j, "a check", "passed"), "passed");
    c.conclusive = boolean(field(j, "a check", "conclusive"), "conclusive");
    c.measured = num(field(j, "a check", "measured"), "measured");
    c.bound = num(field(j, "a check", "bound"), "bound");
    c.note = str(field(j, "a check", "note"), "note");
    out.checks.push_back(std::move(c));
  }

  out.verdict = str(field(doc, "the report", "verdict"), "verdict");
  if (out.verdict != "pass" && out.verdict != "fail" && out.verdict != "inconclusive")
    bad("verdict must be pass, fail, or inconclusive");

  const auto& meta = field(doc, "the report", "meta");
  if (!meta.is_object()) bad("meta must be an object");
  require_keys(meta, "meta", {"timestamp", "wall_ms", "tool", "version"});
  out.meta.timestamp = str(field(meta, "meta", "timestamp"), "timestamp");
  out.meta.wall_ms = num(field(meta, "meta", "wall_ms"), "wall_ms");
  out.meta.tool = str(field(meta, "meta", "tool"), "tool");
  out.meta.version = str(field(meta, "meta", "version"), "version");
  return out;
}

Report parse_report(const std::string& text) {
  OrderedJson doc;
  try {
    doc = OrderedJson::parse(text);
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("not valid JSON: ") + e.what());
  }
  return report_from_json(doc);
}

std::string render_json(const Report& report) {
  return report_to_json(report).dump(2) + "\n";
}

std::string render_csv(const Report& report) {
  std::string out = "model,run,index,eigenvalue,residual\n";
  char buf[64];
  for (const auto& r : report.runs) {
    for (Eigen::Index i = 0; i < r.spectrum.eigenvalues.size(); ++i) {
      out += r.model + "," + r.run + "," + std::to_string(i) + ",";
      std::snprintf(buf, sizeof buf, "%.17g", r.spectrum.eigenvalues(i));
      out += buf;
      out += ",";
      std::snprintf(buf, sizeof buf, "%.17g",
                    i < r.spectrum.residuals.size() ? r.spectrum.residuals(i) : 0.0);
      out += buf;
      out += "\n";
    }
  }
  return out;
}

OrderedJson normalized_for_comparison(OrderedJson doc) {
  if (doc.contains("meta") && doc["meta"].is_object()) {
    if (doc["meta"].contains("timestamp")) doc["meta"]["timestamp"] = "";
    if (doc["meta"].contains("wall_ms")) doc["meta"]["wall_ms"] = 0.0;
  }
  return doc;
}

std::string current_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[80];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
  return buf;
}

}  // namespace folspec
