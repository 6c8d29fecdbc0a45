#ifndef TPFLOW_CONFIG_HPP
#define TPFLOW_CONFIG_HPP

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace tpflow {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat key = value run description. Lists are comma separated; '#' starts a
/// comment. Every key is optional; missing keys take the scenario defaults.
///
///   scenario    converge | longtime | q5spot | custom
///   problem     mms | relax | q5spot           (custom only)
///   model       log | brooks-corey             (must match the problem)
///   scheme      MP | BE | TL1 | TL2            (custom only)
///   schemes     list of the above              (sweeps)
///   tau         step size                      (custom)
///   taus        list of step sizes             (longtime, q5spot)
///   mesh        cells per side                 (custom)
///   meshes      list of cells per side; tau = 1/mesh  (converge)
///   degree      1 | 2
///   final_time  T
///   tol         subiteration tolerance
///   max_iters   subiteration cap
///   output_dir  directory for all files
///   write_vtk   true | false
///   timing      true | false   (adds wall time to step logs)
struct RunConfig {
  std::string scenario = "custom";
  std::string problem = "mms";
  std::string model = "log";
  std::string scheme = "MP";
  std::vector<std::string> schemes;
  double tau = 1.0 / 16.0;
  std::vector<double> taus;
  int mesh = 16;
  std::vector<int> meshes;
  int degree = 1;
  double final_time = 1.0;
  double tol = 1e-5;
  int max_iters = 50;
  std::string output_dir;
  bool write_vtk = false;
  bool timing = false;
};

/// Defaults of the given scenario. Throws ConfigError for unknown names.
RunConfig default_config(const std::string& scenario);

/// Applies the key = value pairs of `text` on top of `base`. Unknown keys,
/// malformed values and duplicate keys throw ConfigError naming the key.
RunConfig parse_config(const std::string& text, RunConfig base);
/// Reads the file, takes the scenario key (if any) to pick the defaults, then
/// applies the file. Throws ConfigError.
RunConfig load_config(const std::string& path, const std::string& fallback_scenario = "custom");

/// Cross-field checks (ranges, problem/model pairing). Throws ConfigError.
void validate_config(const RunConfig& config);

/// Canonical key = value dump; parse_config(to_text(c), ...) reproduces c.
std::string to_text(const RunConfig& config);

}  // namespace tpflow

#endif  // TPFLOW_CONFIG_HPP
