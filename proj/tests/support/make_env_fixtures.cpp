// Regenerates the golden env trajectories: make_env_fixtures <fixture dir>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "env_rollout.hpp"

using namespace entropic;

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_env_fixtures <dir>\n";
    return 2;
  }
  const std::filesystem::path dir = argv[1];
  std::filesystem::create_directories(dir);
  for (const auto& env : fixtures::golden_envs()) {
    for (std::uint64_t seed = 0; seed < 2; ++seed) {
      const auto rows = fixtures::golden_rollout(env, seed);
      std::ofstream out(dir / fixtures::golden_file_name(env, seed));
      out << "step";
      for (std::size_t i = 0; i < rows[0].state.size(); ++i) out << ",s" << i;
      for (std::size_t i = 0; i < rows[0].action.size(); ++i) out << ",a" << i;
      out << ",reward,done,risky\n";
      char buf[64];
      for (std::size_t t = 0; t < rows.size(); ++t) {
        out << t;
        for (double v : rows[t].state) out << ',' << (std::snprintf(buf, sizeof buf, "%.17g", v), buf);
        for (double v : rows[t].action) out << ',' << (std::snprintf(buf, sizeof buf, "%.17g", v), buf);
        std::snprintf(buf, sizeof buf, "%.17g", rows[t].reward);
        out << ',' << buf << ',' << rows[t].done << ',' << rows[t].risky << '\n';
      }
    }
  }
  return 0;
}
