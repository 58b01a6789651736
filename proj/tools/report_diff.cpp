// Compare two JSON reports ignoring timestamp and wall-clock fields.
// Exit 0 when they match, 1 when they differ, 2 on usage or parse errors.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "folspec/report.hpp"

namespace {

std::string slurp(const char* path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(std::string("cannot open ") + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::fprintf(stderr, "usage: report_diff A.json B.json\n");
    return 2;
  }
  try {
    const auto a = folspec::normalized_for_comparison(
        folspec::OrderedJson::parse(slurp(argv[1])));
    const auto b = folspec::normalized_for_comparison(
        folspec::OrderedJson::parse(slurp(argv[2])));
    if (a == b) {
      std::printf("reports match\n");
      return 0;
    }
    const auto patch = folspec::OrderedJson::diff(a, b);
    for (const auto& op : patch)
      std::printf("%s %s\n", op.value("op", "?").c_str(),
                  op.value("path", "?").c_str());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
