// Compares dumped constants with an lr run and recomputes its RHS columns from them.
#include <cstdio>

#include "lrlab/report_io.hpp"

using namespace lrlab;

int main(int argc, char** argv) {
  if (argc != 3) {
    std::fprintf(stderr, "usage: check_constants DUMPED_CONSTANTS_JSON LR_OUT_DIR\n");
    return 2;
  }
  const std::string dir = argv[2];
  const nlohmann::json dumped = read_json(argv[1]);
  if (dumped != read_json(dir + "/constants.json")) {
    std::fprintf(stderr, "constants differ from the lr run\n");
    return 1;
  }
  const RhsInputs in = rhs_inputs_from_json(dumped);
  const nlohmann::json rep = read_json(dir + "/lr_report.json");
  const auto& times = rep.at("times");
  int bad = 0;
  for (std::size_t n = 0; n < times.size(); ++n) {
    const LRRhs r = lr_rhs(in.constants, in.f_c1, in.g_c1, in.D_XY, times[n].get<double>());
    if (r.sinh_form != rep.at("rhs_sinh")[n].get<double>() || r.exp_form != rep.at("rhs_exp")[n].get<double>()) {
      std::fprintf(stderr, "t = %.17g: recomputed RHS differs\n", times[n].get<double>());
      ++bad;
    }
  }
  std::printf("%zu times checked, %d mismatches\n", times.size(), bad);
  return bad == 0 ? 0 : 1;
}
