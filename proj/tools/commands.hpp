#ifndef MULTILENS_TOOLS_COMMANDS_HPP
#define MULTILENS_TOOLS_COMMANDS_HPP

#include <optional>
#include <string>
#include <vector>

namespace mltool {

struct CommonFlags {
  std::string scene_path;
  std::string out_dir;            // empty: stdout only
  std::optional<int> grid;        // --grid
  std::optional<double> tol;      // --tol
  std::optional<double> window;   // --window
  std::string format = "both";    // csv | svg | both
};

int cmd_solve(const CommonFlags& flags);
int cmd_curves(const CommonFlags& flags);
int cmd_build(const std::vector<int>& g_list,
              const std::vector<double>& lambdas,
              const std::vector<double>& eps, const std::string& out_dir);
int cmd_cosmo(double omega_m, double omega_lambda,
              const std::vector<double>& redshifts);
int cmd_bounds(const std::vector<int>& g_list);
int cmd_tune(int g);
int cmd_eps_scan(const CommonFlags& flags, double eps_max, int steps);

/// Exit codes shared by the CLI and tests.
enum ExitCode {
  kOk = 0,
  kUsage = 1,
  kParseError = 2,
  kValidationError = 3,
  kSolverError = 4,
  kConstructionError = 5,
  kInternalError = 10,
};

/// Runs fn, mapping the library's exception taxonomy onto exit codes.
int run_mapped(int (*body)(void*), void* ctx);
template <typename Fn>
int run_command(Fn&& fn) {
  struct Ctx {
    Fn* fn;
  } ctx{&fn};
  return run_mapped(
      [](void* p) -> int { return (*static_cast<Ctx*>(p)->fn)(); }, &ctx);
}

}  // namespace mltool

#endif
